#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rrkn/samplers.hpp"
#include "test_util.hpp"

using namespace rrkn;
using rrkn::test::state;
using rrkn::test::vec;

TEST_CASE("sampler names") {
  CHECK(parse_sampler("uhmc") == SamplerKind::Uhmc);
  CHECK(parse_sampler("ukla") == SamplerKind::Ukla);
  CHECK(parse_sampler("exact-split") == SamplerKind::ExactSplit);
  CHECK_THROWS_AS(parse_sampler("mala"), UsageError);
}

TEST_CASE("chain config checks T/h") {
  ChainConfig cfg;
  cfg.T = std::numbers::pi / 2;
  cfg.h = std::numbers::pi / 8;
  CHECK(cfg.steps() == 4);
  cfg.h = 0.3;
  CHECK_THROWS_AS(cfg.steps(), UsageError);
  cfg.h = -0.1;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("ou map limits") {
  const PhaseState s = state({0.4}, {2.0});
  const PhaseState a = ou_map(1.5, 0.2, vec({0.0}), s);
  CHECK(a.x[0] == 0.4);
  CHECK(a.v[0] == doctest::Approx(std::exp(-0.3) * 2.0).epsilon(1e-15));
  const PhaseState b = ou_map(1e3, 1.0, vec({-0.7}), s);
  CHECK(b.v[0] == doctest::Approx(-0.7).epsilon(1e-15));
  const PhaseState c = ou_map(std::log(2.0), 1.0, vec({1.0}), state({0}, {0}));
  CHECK(c.x[0] == 0.0);
  CHECK(c.v[0] == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
  const PhaseState d = ou_map(0.0, 0.3, vec({5.0}), s);
  CHECK(d.v[0] == 2.0);
}

TEST_CASE("ou map preserves the standard normal velocity marginal") {
  RandomStream rng(8);
  std::vector<double> m1, m2;
  for (int i = 0; i < 1000000; ++i) {
    const PhaseState out = ou_map(0.7, 0.3, vec({rng.normal()}), state({0}, {rng.normal()}));
    m1.push_back(out.v[0]);
    m2.push_back(out.v[0] * out.v[0]);
  }
  CHECK(test::within_se(test::moment(m1), 0.0));
  CHECK(test::within_se(test::moment(m2), 1.0));
}

TEST_CASE("ukla step is the integrator step followed by the ou map") {
  FreePotential free(1);
  Integrator integ(Scheme::Rrkn25, free.force_field(), 1);
  auto streams = ChainStreams::derive(3, 0);
  auto copy = streams;
  PhaseState z = state({0}, {0});
  const double gamma = std::log(2.0);
  ukla_step(integ, gamma, 1.0, streams, z);
  const double xi = copy.velocity.normal();
  CHECK(z.x[0] == 0.0);
  CHECK(z.v[0] == doctest::Approx(std::sqrt(3.0) / 2 * xi).epsilon(1e-15));
}

TEST_CASE("ukla with zero friction is the bare integrator") {
  GaussianPotential g(2);
  Integrator a(Scheme::Rrkn35, g.force_field(), 2);
  Integrator b(Scheme::Rrkn35, g.force_field(), 2);
  auto streams = ChainStreams::derive(5, 1);
  auto copy = streams;
  PhaseState z = state({1, -1}, {0.5, 0.25});
  PhaseState w = z;
  for (int k = 0; k < 10; ++k) {
    ukla_step(a, 0.0, 0.1, streams, z);
    b.step(0.1, draw_stage_variable(Scheme::Rrkn35, copy.stage), w);
  }
  CHECK((z.x.array() == w.x.array()).all());
  CHECK((z.v.array() == w.v.array()).all());
}

TEST_CASE("exact splitting edge cases") {
  GaussianPotential g(1);
  auto streams = ChainStreams::derive(1, 1);
  const PhaseState z = state({0.3}, {-1.2});
  const PhaseState q = exact_splitting_steps(g, 0.0, std::numbers::pi / 2, 1, streams, z);
  CHECK(q.x[0] == doctest::Approx(-1.2).epsilon(1e-15));
  CHECK(q.v[0] == doctest::Approx(-0.3).epsilon(1e-15));
  const PhaseState id = exact_splitting_steps(g, 2.0, 0.1, 0, streams, z);
  CHECK(id.x[0] == z.x[0]);
  CHECK(id.v[0] == z.v[0]);
  Ng1Potential ng1;
  CHECK_THROWS_AS(exact_splitting_steps(ng1, 1.0, 0.1, 1, streams, state({0, 0}, {0, 0})),
                  UnsupportedError);
}

TEST_CASE("uhmc on the free target moves x by T xi") {
  FreePotential free(3);
  ChainConfig cfg;
  cfg.T = 0.75;
  cfg.h = 0.25;
  cfg.scheme = Scheme::Rrkn25;
  auto streams = ChainStreams::derive(12, 4);
  auto copy = streams;
  const Vector x = vec({1, 2, 3});
  const Vector out = uhmc_transition(free, cfg, streams, x);
  const Vector xi = copy.velocity.normal_vector(3);
  CHECK((out - (x + cfg.T * xi)).norm() < 1e-14);
}

TEST_CASE("verlet uhmc approaches the exact rotation as h shrinks") {
  GaussianPotential g(1);
  ChainConfig cfg;
  cfg.T = std::numbers::pi / 2;
  cfg.h = cfg.T / 1024;
  auto streams = ChainStreams::derive(4, 4);
  auto copy = streams;
  const Vector out = uhmc_transition(g, cfg, streams, vec({0.8}));
  const double xi = copy.velocity.normal();
  CHECK(std::abs(out[0] - (0.8 * std::cos(cfg.T) + xi * std::sin(cfg.T))) < 1e-4);
}

TEST_CASE("exact kernels preserve the standard normal") {
  GaussianPotential g(1);
  RandomStream init(99);
  std::vector<double> x1, x2, v1, v2, y1, y2;
  for (int r = 0; r < 100000; ++r) {
    auto streams = ChainStreams::derive(17, r);
    const Vector x = exact_uhmc_transition(g, 1.3, streams, vec({init.normal()}));
    x1.push_back(x[0]);
    x2.push_back(x[0] * x[0]);
    const PhaseState z = exact_splitting_steps(g, 2.0, 0.4, 5, streams,
                                               state({init.normal()}, {init.normal()}));
    y1.push_back(z.x[0]);
    y2.push_back(z.x[0] * z.x[0]);
    v1.push_back(z.v[0]);
    v2.push_back(z.v[0] * z.v[0]);
  }
  CHECK(test::within_se(test::moment(x1), 0.0));
  CHECK(test::within_se(test::moment(x2), 1.0));
  CHECK(test::within_se(test::moment(y1), 0.0));
  CHECK(test::within_se(test::moment(y2), 1.0));
  CHECK(test::within_se(test::moment(v1), 0.0));
  CHECK(test::within_se(test::moment(v2), 1.0));
}

TEST_CASE("chains are deterministic and sized") {
  GaussianPotential g(2);
  ChainConfig cfg;
  cfg.T = 1.0;
  cfg.h = 0.25;
  cfg.n = 50;
  cfg.burn_in = 5;
  cfg.scheme = Scheme::Rrkn35;
  const PhaseState init = state({0.1, 0.2}, {0, 0});
  for (SamplerKind k : {SamplerKind::Uhmc, SamplerKind::Ukla, SamplerKind::ExactSplit}) {
    cfg.gamma = k == SamplerKind::Uhmc ? 0.0 : 2.0;
    auto s1 = ChainStreams::derive(21, 0);
    auto s2 = ChainStreams::derive(21, 0);
    const auto a = run_chain(g, cfg, s1, init, k);
    const auto b = run_chain(g, cfg, s2, init, k);
    REQUIRE(a.samples.size() == 50);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      CHECK((a.samples[i].array() == b.samples[i].array()).all());
    CHECK(a.force_calls == b.force_calls);
  }
  auto s = ChainStreams::derive(21, 0);
  const auto c = run_chain(g, cfg, s, init, SamplerKind::Uhmc);
  CHECK(c.grad_evals_per_transition == 12);
  // FSAL: one priming call, then three per step.
  CHECK(c.force_calls == 1 + 3 * 4 * 55);
  CHECK(c.force_calls_per_transition == 12.0);
}

TEST_CASE("single transition chain") {
  GaussianPotential g(1);
  ChainConfig cfg;
  cfg.T = 1.0;
  cfg.h = 0.5;
  cfg.n = 1;
  cfg.scheme = Scheme::Rrkn25;
  auto s1 = ChainStreams::derive(2, 2);
  auto s2 = s1;
  const auto out = run_chain(g, cfg, s1, state({0.5}, {0}), SamplerKind::Uhmc);
  REQUIRE(out.samples.size() == 1);
  CHECK(out.samples[0][0] == uhmc_transition(g, cfg, s2, vec({0.5}))[0]);
}

TEST_CASE("verlet uhmc stationary variance on a 10-d Gaussian") {
  GaussianPotential g(10);
  ChainConfig cfg;
  const double h = std::numbers::pi / 8;
  cfg.T = std::numbers::pi / 2;
  cfg.h = h;
  cfg.n = 40000;
  cfg.burn_in = 100;
  cfg.scheme = Scheme::Verlet;
  auto streams = ChainStreams::derive(31, 0);
  std::vector<double> sq;
  run_chain_observed(g, cfg, streams, PhaseState{Vector::Zero(10), Vector::Zero(10)},
                     SamplerKind::Uhmc, [&](const Vector& x) { sq.push_back(x.squaredNorm() / 10); });
  CHECK(test::within_se(test::moment(sq), 1.0 / (1.0 - h * h / 4)));
}
