#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rrkn/reference.hpp"
#include "rrkn/rng.hpp"
#include "test_util.hpp"

using namespace rrkn;
using rrkn::test::state;
using rrkn::test::vec;

TEST_CASE("weighted norm") {
  CHECK(WeightedNorm(1.0)(state({3}, {4})) == 5.0);
  CHECK(WeightedNorm(4.0)(state({0}, {2})) == 1.0);
  CHECK(WeightedNorm(2.0)(state({0}, {0})) == 0.0);
  CHECK_THROWS_AS(WeightedNorm(0.0), UsageError);
}

TEST_CASE("oscillator flow") {
  const PhaseState z = state({1}, {1});
  const PhaseState a = oscillator_exact_flow(0.0, z);
  CHECK(a.x[0] == 1.0);
  CHECK(a.v[0] == 1.0);
  const PhaseState b = oscillator_exact_flow(std::numbers::pi / 2, state({0.3}, {-2}));
  CHECK(b.x[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(b.v[0] == doctest::Approx(-0.3).epsilon(1e-15));
  const PhaseState c = oscillator_exact_flow(1.0, z);
  CHECK(c.x[0] == doctest::Approx(std::cos(1.0) + std::sin(1.0)).epsilon(1e-15));
  CHECK(c.v[0] == doctest::Approx(std::cos(1.0) - std::sin(1.0)).epsilon(1e-15));
}

TEST_CASE("reference flow agrees with the closed form on the oscillator") {
  GaussianPotential osc(1, TargetKind::Oscillator1D);
  const PhaseState z = state({1}, {1});
  const PhaseState r = reference_flow(osc, 1.0, z, 0x1.0p-17);
  const PhaseState e = oscillator_exact_flow(1.0, z);
  CHECK(WeightedNorm(1.0).squared(r.x - e.x, r.v - e.v) < 1e-20);
  const PhaseState id = reference_flow(osc, 0.0, z, 0x1.0p-17);
  CHECK(id.x[0] == 1.0);
  CHECK(id.v[0] == 1.0);
}

TEST_CASE("double-well reference values") {
  DoubleWellPotential dw;
  const PhaseState z = state({1}, {1});
  const PhaseState r = reference_flow(dw, 1.0, z, 0x1.0p-17);
  CHECK(r.x[0] == doctest::Approx(1.234743685138239).epsilon(1e-9));
  CHECK(r.v[0] == doctest::Approx(-0.851353784934137).epsilon(1e-9));
  const auto traj = ReferenceTrajectory::richardson_verlet(dw, 1.0, 1.0 / 256, z, WeightedNorm(10.0));
  CHECK(traj.richardson_gap() < 1e-10);
  CHECK(traj.at(1.0).x[0] == doctest::Approx(1.234743685138239).epsilon(1e-9));
  CHECK(traj.at(1.0).v[0] == doctest::Approx(-0.851353784934137).epsilon(1e-9));
}

TEST_CASE("order fit") {
  std::vector<std::pair<double, double>> line, rate;
  for (int n = 3; n <= 8; ++n) {
    const double h = std::ldexp(1.0, -n);
    line.emplace_back(h, 3.0 * h * h);
    rate.emplace_back(h, 0.7 * std::pow(h, 2.5));
  }
  const OrderFit a = fit_order(line);
  CHECK(a.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.residual < 1e-12);
  CHECK(fit_order(rate).slope == doctest::Approx(2.5).epsilon(1e-12));
  line.resize(3);
  CHECK_THROWS_AS(fit_order(line), UsageError);
  CHECK(dyadic_steps(3, 5) == std::vector<double>{0.125, 0.0625, 0.03125});
}

TEST_CASE("verlet error ratio tends to one quarter") {
  GaussianPotential osc(1, TargetKind::Oscillator1D);
  ErrorStudy study;
  study.scheme = Scheme::Verlet;
  study.z0 = state({1}, {1});
  const auto h = dyadic_steps(7, 8);
  const auto ref = ReferenceTrajectory::exact(osc, 1.0, h.back(), study.z0);
  const auto pts = l2_error_curve(osc, study, h, ref);
  CHECK(pts[1].rms_error / pts[0].rms_error == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("rrkn25 slope on the oscillator with fewer replicas") {
  GaussianPotential osc(1, TargetKind::Oscillator1D);
  ErrorStudy study;
  study.scheme = Scheme::Rrkn25;
  study.z0 = state({1}, {1});
  study.replicas = 2000;
  study.seed = 5;
  const auto h = dyadic_steps(3, 8);
  const auto ref = ReferenceTrajectory::exact(osc, 1.0, h.back(), study.z0);
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : l2_error_curve(osc, study, h, ref)) pts.emplace_back(p.h, p.rms_error);
  CHECK(std::abs(fit_order(pts).slope - 2.5) <= 0.15);
}

TEST_CASE("error curves do not depend on the thread count") {
  GaussianPotential osc(1, TargetKind::Oscillator1D);
  ErrorStudy study;
  study.scheme = Scheme::Rrkn35;
  study.z0 = state({1}, {1});
  study.replicas = 700;
  const auto h = dyadic_steps(3, 5);
  const auto ref = ReferenceTrajectory::exact(osc, 1.0, h.back(), study.z0);
  const auto a = l2_error_curve(osc, study, h, ref);
  study.threads = 3;
  const auto b = l2_error_curve(osc, study, h, ref);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rms_error == b[i].rms_error);
    CHECK(a[i].mean_error == b[i].mean_error);
  }
}

TEST_CASE("error constant on a 1-d Gaussian with fewer replicas") {
  GaussianPotential g(1);
  ErrorStudy study;
  study.scheme = Scheme::Rrkn25;
  study.T = 0.5;
  study.z0 = state({1}, {1});
  study.replicas = 2000;
  const auto h = dyadic_steps(3, 8);
  const auto ref = ReferenceTrajectory::exact(g, 0.5, h.back(), study.z0);
  const double c = 1.1 * std::exp(2.5) * study.norm(study.z0);
  for (const auto& p : l2_error_curve(g, study, h, ref)) CHECK(p.rms_error <= c * std::pow(p.h, 2.5));
}

TEST_CASE("oscillator flow is Lipschitz with constant 1 + 6T") {
  RandomStream rng(6);
  const double T = 0.5;
  const WeightedNorm w(1.0);
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const PhaseState a{rng.normal_vector(1), rng.normal_vector(1)};
    const PhaseState b{rng.normal_vector(1), rng.normal_vector(1)};
    const double d0 = w.squared(a.x - b.x, a.v - b.v);
    for (int i = 0; i <= 1000; ++i) {
      const double s = T * i / 1000.0;
      const PhaseState fa = oscillator_exact_flow(s, a);
      const PhaseState fb = oscillator_exact_flow(s, b);
      if (w.squared(fa.x - fb.x, fa.v - fb.v) > (1 + 6 * T) * d0) ++violations;
    }
  }
  CHECK(violations == 0);
}
