#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "rrkn/integrators.hpp"
#include "rrkn/potentials.hpp"
#include "rrkn/rng.hpp"

namespace rrkn {

enum class SamplerKind { Uhmc, Ukla, ExactSplit };

SamplerKind parse_sampler(std::string_view text);
std::string_view sampler_name(SamplerKind s);

struct ChainConfig {
  double T = 1.0;      // duration of one transition
  double h = 0.1;      // step size; T/h must be a positive integer
  double gamma = 0.0;  // friction (ukLa and exact splitting)
  std::size_t n = 1000;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Verlet;

  /// T/h, checked integral to relative tolerance 1e-12. Throws UsageError.
  long long steps() const;
  void validate() const;
};

struct ChainOutput {
  std::vector<Vector> samples;
  /// Steady-state charge per transition under the nominal per-step costs.
  long long grad_evals_per_transition = 0;
  /// Force calls actually made, over the whole chain (burn-in included).
  std::uint64_t force_calls = 0;
  /// Force calls per transition once the FSAL cache is primed.
  double force_calls_per_transition = 0.0;
  std::vector<bool> finite;
};

/// O_h(b)(x, v) = (x, e^{-gamma h} v + sqrt(1 - e^{-2 gamma h}) b).
PhaseState ou_map(double gamma, double h, const Vector& b, const PhaseState& s);
void ou_map_inplace(double gamma, double h, const Vector& b, PhaseState& s);

/// uHMC transition x -> Q_T(x, xi) with xi ~ N(0, I) from `streams.velocity`.
/// The integrator's FSAL cache survives between calls because x is unchanged
/// by the velocity refresh.
Vector uhmc_transition(Integrator& integ, const ChainConfig& cfg, ChainStreams& streams,
                       const Vector& x);
Vector uhmc_transition(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                       const Vector& x);

/// uHMC with the closed-form flow in place of an integrator.
Vector exact_uhmc_transition(const Potential& p, double T, ChainStreams& streams, const Vector& x);

/// One composite ukLa step O_h(xi) ∘ Theta_h(U), in place.
void ukla_step(Integrator& integ, double gamma, double h, ChainStreams& streams, PhaseState& z);

/// T/h composite ukLa steps.
PhaseState ukla_transition(Integrator& integ, const ChainConfig& cfg, ChainStreams& streams,
                           const PhaseState& z);
PhaseState ukla_transition(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                           const PhaseState& z);

/// `n_steps` composite steps O_h(xi) ∘ phi_h with the closed-form flow.
/// Consumes the velocity lane exactly as ukLa does, so sharing that lane
/// couples the two chains synchronously.
PhaseState exact_splitting_steps(const Potential& p, double gamma, double h, long long n_steps,
                                 ChainStreams& streams, const PhaseState& z);
PhaseState exact_splitting_transition(const Potential& p, const ChainConfig& cfg,
                                      ChainStreams& streams, const PhaseState& z);

using SampleObserver = std::function<void(const Vector& x)>;

/// Runs burn_in + n transitions and hands every post-burn-in position to
/// `observe`. uHMC discards the velocity between transitions; ukLa and the
/// exact splitting carry it. Returns the output without samples.
ChainOutput run_chain_observed(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                               const PhaseState& init, SamplerKind sampler,
                               const SampleObserver& observe);

ChainOutput run_chain(const Potential& p, const ChainConfig& cfg, ChainStreams& streams,
                      const PhaseState& init, SamplerKind sampler);

}  // namespace rrkn
