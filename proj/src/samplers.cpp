#include "rrkn/samplers.hpp"

#include <cmath>
#include <string>

namespace rrkn {

SamplerKind parse_sampler(std::string_view text) {
  if (text == "uhmc") return SamplerKind::Uhmc;
  if (text == "ukla") return SamplerKind::Ukla;
  if (text == "exact-split") return SamplerKind::ExactSplit;
  throw UsageError("unknown sampler '" + std::string(text) + "'");
}

std::string_view sampler_name(SamplerKind s) {
  switch (s) {
    case SamplerKind::Uhmc: return "uhmc";
    case SamplerKind::Ukla: return "ukla";
    case SamplerKind::ExactSplit: return "exact-split";
  }
  return "?";
}

long long ChainConfig::steps() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("h must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw UsageError("T must be positive");
  const double ratio = T / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-12 * ratio) {
    throw UsageError("T/h must be a positive integer (T/h = " + std::to_string(ratio) + ")");
  }
  return static_cast<long long>(rounded);
}

void ChainConfig::validate() const {
  steps();
  if (n < 1) throw UsageError("chain length n must be at least 1");
  if (gamma < 0.0) throw UsageError("gamma must be nonnegative");
}

// ---------------------------------------------------------------------------

void ou_map_inplace(double gamma, double h, const Vector& b, PhaseState& s) {
  const double damp = std::exp(-gamma * h);
  const double noise = std::sqrt(-std::expm1(-2.0 * gamma * h));
  s.v = damp * s.v + noise * b;
}

PhaseState ou_map(double gamma, double h, const Vector& b, const PhaseState& s) {
  PhaseState out = s;
  ou_map_inplace(gamma, h, b, out);
  return out;
}

Vector uhmc_transition(Integrator& integ, const ChainConfig& cfg, ChainStreams& streams,
                       const Vector& x) {
  const long long n_steps = cfg.steps();
  PhaseState s{x, streams.velocity.normal_vector(static_cast<std::size_t>(x.size()))};
  for (long long k = 0; k < n_steps; ++k) {
    const double u = draw_stage_variable(integ.scheme(), streams.stage);
    try {
      integ.step(cfg.h, u, s);
    } catch (const NumericError&) {
      throw NumericError("uHMC integration failed: non-finite force", k);
    }
  }
  if (!s.x.allFinite()) throw NumericError("uHMC produced a non-finite state", n_steps - 1);
  return s.x;
}

Vector uhmc_transition(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                       const Vector& x) {
  Integrator integ(cfg.scheme, p.force_field(), p.dim());
  return uhmc_transition(integ, cfg, streams, x);
}

Vector exact_uhmc_transition(const Potential& p, double T, ChainStreams& streams, const Vector& x) {
  PhaseState s{x, streams.velocity.normal_vector(static_cast<std::size_t>(x.size()))};
  return p.exact_flow(T, s).x;
}

void ukla_step(Integrator& integ, double gamma, double h, ChainStreams& streams, PhaseState& z) {
  const double u = draw_stage_variable(integ.scheme(), streams.stage);
  integ.step(h, u, z);
  const Vector xi = streams.velocity.normal_vector(z.dim());
  ou_map_inplace(gamma, h, xi, z);
}

PhaseState ukla_transition(Integrator& integ, const ChainConfig& cfg, ChainStreams& streams,
                           const PhaseState& z) {
  const long long n_steps = cfg.steps();
  PhaseState s = z;
  for (long long k = 0; k < n_steps; ++k) {
    try {
      ukla_step(integ, cfg.gamma, cfg.h, streams, s);
    } catch (const NumericError&) {
      throw NumericError("ukLa integration failed: non-finite force", k);
    }
  }
  if (!s.finite()) throw NumericError("ukLa produced a non-finite state", n_steps - 1);
  return s;
}

PhaseState ukla_transition(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                           const PhaseState& z) {
  Integrator integ(cfg.scheme, p.force_field(), p.dim());
  return ukla_transition(integ, cfg, streams, z);
}

PhaseState exact_splitting_steps(const Potential& p, double gamma, double h, long long n_steps,
                                 ChainStreams& streams, const PhaseState& z) {
  if (!p.has_exact_flow()) throw UnsupportedError(p.name() + ": exact splitting needs a closed-form flow");
  PhaseState s = z;
  for (long long k = 0; k < n_steps; ++k) {
    s = p.exact_flow(h, s);
    const Vector xi = streams.velocity.normal_vector(s.dim());
    ou_map_inplace(gamma, h, xi, s);
  }
  return s;
}

PhaseState exact_splitting_transition(const Potential& p, const ChainConfig& cfg,
                                      ChainStreams& streams, const PhaseState& z) {
  return exact_splitting_steps(p, cfg.gamma, cfg.h, cfg.steps(), streams, z);
}

// ---------------------------------------------------------------------------

ChainOutput run_chain_observed(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                               const PhaseState& init, SamplerKind sampler,
                               const SampleObserver& observe) {
  cfg.validate();
  if (!init.finite()) throw UsageError("initial state must be finite");
  if (init.dim() != p.dim()) throw UsageError("initial state dimension mismatch");

  const long long n_steps = cfg.steps();
  ChainOutput out;
  out.grad_evals_per_transition =
      sampler == SamplerKind::ExactSplit ? 0 : n_steps * nominal_evals_per_step(cfg.scheme);
  out.finite.reserve(cfg.n);

  Integrator integ(cfg.scheme, p.force_field(), p.dim());
  PhaseState z = init;
  const std::size_t total = cfg.burn_in + cfg.n;
  std::uint64_t calls_after_first = 0;
  for (std::size_t k = 0; k < total; ++k) {
    try {
      switch (sampler) {
        case SamplerKind::Uhmc:
          z.x = uhmc_transition(integ, cfg, streams, z.x);
          break;
        case SamplerKind::Ukla:
          z = ukla_transition(integ, cfg, streams, z);
          break;
        case SamplerKind::ExactSplit:
          z = exact_splitting_transition(p, cfg, streams, z);
          break;
      }
    } catch (const NumericError& e) {
      throw NumericError(std::string("chain failed at transition: ") + e.what(),
                         static_cast<long long>(k));
    }
    if (!z.finite()) throw NumericError("chain reached a non-finite state", static_cast<long long>(k));
    if (k == 0) calls_after_first = integ.force_calls();
    if (k >= cfg.burn_in) {
      out.finite.push_back(true);
      observe(z.x);
    }
  }
  out.force_calls = integ.force_calls();
  out.force_calls_per_transition =
      total > 1 ? static_cast<double>(out.force_calls - calls_after_first) / static_cast<double>(total - 1)
                : static_cast<double>(out.force_calls);
  return out;
}

ChainOutput run_chain(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                      const PhaseState& init, SamplerKind sampler) {
  std::vector<Vector> samples;
  samples.reserve(cfg.n);
  ChainOutput out = run_chain_observed(p, cfg, streams, init, sampler,
                                       [&](const Vector& x) { samples.push_back(x); });
  out.samples = std::move(samples);
  return out;
}

}  // namespace rrkn
