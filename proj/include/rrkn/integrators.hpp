#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "rrkn/potentials.hpp"
#include "rrkn/rng.hpp"
#include "rrkn/types.hpp"

namespace rrkn {

enum class Scheme { Verlet, Smc, Rrkn25, Rrkn35 };

Scheme parse_scheme(std::string_view text);
std::string_view scheme_name(Scheme s);

/// Gradient evaluations charged per step when comparing schemes at equal
/// cost: Verlet 1, sMC 2, rRKN 2.5 2, rRKN 3.5 3. Verlet and rRKN 3.5 reach
/// this in steady state by reusing the end-of-step force (FSAL).
int nominal_evals_per_step(Scheme s);
// Steps per transition whose nominal cost is nearest to `evals` (ties round down, at least 1).
long long steps_for_budget(Scheme s, long long evals);

/// Whether the scheme draws a per-step stage variable.
bool is_randomized(Scheme s);

/// Per-step stage variable: Triangular(0,1) for rRKN, Uniform(0,1) for sMC.
double draw_stage_variable(Scheme s, RandomStream& rng);

/// Draws U = sqrt(W), W ~ Uniform(0,1): density 2u on [0,1].
double sample_triangular(RandomStream& rng);

struct StepOutput {
  PhaseState state;
  /// F at the new position, when the scheme evaluated it.
  std::optional<Vector> cached_force;
};

// One-step maps. `f_in`, when given, must equal F(s.x).
StepOutput verlet_step(const ForceField& force, double h, const PhaseState& s,
                       const Vector* f_in = nullptr);
StepOutput smc_step(const ForceField& force, double h, double u, const PhaseState& s);
StepOutput rrkn25_step(const ForceField& force, double h, double u, const PhaseState& s);
StepOutput rrkn35_step(const ForceField& force, double h, double u, const PhaseState& s,
                       const Vector* f_in = nullptr);

/// Stateful stepper used by the drivers and chains. Owns scratch buffers and
/// the FSAL cache, and counts every force call it makes.
///
/// The cache is keyed to the position: callers that move x by other means
/// must call `invalidate()`. Velocity-only updates keep it valid.
class Integrator {
 public:
  Integrator(Scheme scheme, ForceField force, std::size_t dim);

  Scheme scheme() const { return scheme_; }

  /// Advances `s` in place by one step of size h with stage variable u.
  void step(double h, double u, PhaseState& s);

  void invalidate() { cache_valid_ = false; }
  bool has_cached_force() const { return cache_valid_; }
  const Vector& cached_force() const { return f_cache_; }
  void set_cached_force(const Vector& f);

  std::uint64_t force_calls() const { return force_calls_; }
  void reset_force_calls() { force_calls_ = 0; }

 private:
  void eval(const Vector& x, Vector& out);

  Scheme scheme_;
  ForceField force_;
  std::uint64_t force_calls_ = 0;
  bool cache_valid_ = false;
  Vector f_cache_, f_minus_, f_plus_, f_star_, stage_x_;
};

struct IntegrationResult {
  PhaseState state;
  std::uint64_t force_calls = 0;
  std::optional<Vector> cached_force;
};

/// Applies `n_steps` one-step maps with fresh per-step stage variables drawn
/// from `rng`. Throws NumericError carrying the failing step index.
IntegrationResult integrate(Scheme scheme, const ForceField& force, double h, long long n_steps,
                            RandomStream& rng, const PhaseState& s0,
                            const Vector* f_in = nullptr);

}  // namespace rrkn
