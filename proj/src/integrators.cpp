#include "rrkn/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rrkn {

Scheme parse_scheme(std::string_view text) {
  if (text == "verlet") return Scheme::Verlet;
  if (text == "smc") return Scheme::Smc;
  if (text == "rrkn25") return Scheme::Rrkn25;
  if (text == "rrkn35") return Scheme::Rrkn35;
  throw UsageError("unknown scheme '" + std::string(text) + "'");
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Verlet: return "verlet";
    case Scheme::Smc: return "smc";
    case Scheme::Rrkn25: return "rrkn25";
    case Scheme::Rrkn35: return "rrkn35";
  }
  return "?";
}

int nominal_evals_per_step(Scheme s) {
  switch (s) {
    case Scheme::Verlet: return 1;
    case Scheme::Smc: return 2;
    case Scheme::Rrkn25: return 2;
    case Scheme::Rrkn35: return 3;
  }
  return 0;
}

long long steps_for_budget(Scheme s, long long evals) {
  const long long c = nominal_evals_per_step(s);
  const long long k = (2 * evals + c - 1) / (2 * c);
  return std::max(1LL, k);
}

bool is_randomized(Scheme s) { return s != Scheme::Verlet; }

double sample_triangular(RandomStream& rng) { return rng.triangular(); }

double draw_stage_variable(Scheme s, RandomStream& rng) {
  switch (s) {
    case Scheme::Verlet: return 1.0;
    case Scheme::Smc: return rng.uniform();
    case Scheme::Rrkn25:
    case Scheme::Rrkn35: return sample_triangular(rng);
  }
  return 1.0;
}

// ---------------------------------------------------------------------------

Integrator::Integrator(Scheme scheme, ForceField force, std::size_t dim)
    : scheme_(scheme), force_(std::move(force)) {
  const auto n = static_cast<Eigen::Index>(dim);
  f_cache_.setZero(n);
  f_minus_.setZero(n);
  f_plus_.setZero(n);
  f_star_.setZero(n);
  stage_x_.setZero(n);
}

void Integrator::set_cached_force(const Vector& f) {
  f_cache_ = f;
  cache_valid_ = true;
}

void Integrator::eval(const Vector& x, Vector& out) {
  force_(x, out);
  ++force_calls_;
  if (!out.allFinite()) throw NumericError("non-finite force", -1);
}

void Integrator::step(double h, double u, PhaseState& s) {
  if (!(h > 0.0)) throw UsageError("step size must be positive");
  Vector& x = s.x;
  Vector& v = s.v;

  switch (scheme_) {
    case Scheme::Verlet: {
      if (!cache_valid_) eval(x, f_cache_);
      v += (0.5 * h) * f_cache_;
      x += h * v;
      eval(x, f_cache_);
      v += (0.5 * h) * f_cache_;
      cache_valid_ = true;
      break;
    }
    case Scheme::Smc: {
      // G = F(x + u h v); x' = x + h v + (h^2/2) G; v' = v + h G
      stage_x_ = x + (u * h) * v;
      eval(stage_x_, f_plus_);
      x = x + h * v + (0.5 * h * h) * f_plus_;
      v += h * f_plus_;
      cache_valid_ = false;
      break;
    }
    case Scheme::Rrkn25: {
      if (!(u > 0.0)) throw UsageError("rRKN stage variable must be positive");
      eval(x, f_minus_);
      const double uh = u * h;
      stage_x_ = x + uh * v + (0.5 * uh * uh) * f_minus_;
      eval(stage_x_, f_plus_);
      f_plus_ -= f_minus_;  // F+ - F-
      x = x + h * v + (0.5 * h * h) * f_minus_ + (h * h / (6.0 * u)) * f_plus_;
      v = v + h * f_minus_ + (h / (2.0 * u)) * f_plus_;
      cache_valid_ = false;
      break;
    }
    case Scheme::Rrkn35: {
      if (!(u > 0.0)) throw UsageError("rRKN stage variable must be positive");
      if (cache_valid_) {
        f_minus_.swap(f_cache_);
      } else {
        eval(x, f_minus_);
      }
      const double uh = u * h;
      stage_x_ = x + uh * v + (0.5 * uh * uh) * f_minus_;
      eval(stage_x_, f_plus_);
      stage_x_ = x + (0.5 * h) * v + (h * h) * ((3.0 / 32.0) * f_minus_ + (1.0 / 32.0) * f_plus_);
      eval(stage_x_, f_star_);
      x = x + h * v + (h * h) * ((1.0 / 6.0) * f_minus_ + (1.0 / 3.0) * f_star_);
      eval(x, f_cache_);
      v = v + h * ((1.0 / 6.0) * f_minus_ + (2.0 / 3.0) * f_star_ + (1.0 / 6.0) * f_cache_);
      cache_valid_ = true;
      break;
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

StepOutput single_step(Scheme scheme, const ForceField& force, double h, double u,
                       const PhaseState& s, const Vector* f_in) {
  Integrator integ(scheme, force, s.dim());
  if (f_in != nullptr) integ.set_cached_force(*f_in);
  StepOutput out{s, std::nullopt};
  integ.step(h, u, out.state);
  if (integ.has_cached_force()) out.cached_force = integ.cached_force();
  return out;
}

}  // namespace

StepOutput verlet_step(const ForceField& force, double h, const PhaseState& s, const Vector* f_in) {
  return single_step(Scheme::Verlet, force, h, 1.0, s, f_in);
}

StepOutput smc_step(const ForceField& force, double h, double u, const PhaseState& s) {
  return single_step(Scheme::Smc, force, h, u, s, nullptr);
}

StepOutput rrkn25_step(const ForceField& force, double h, double u, const PhaseState& s) {
  return single_step(Scheme::Rrkn25, force, h, u, s, nullptr);
}

StepOutput rrkn35_step(const ForceField& force, double h, double u, const PhaseState& s,
                       const Vector* f_in) {
  return single_step(Scheme::Rrkn35, force, h, u, s, f_in);
}

IntegrationResult integrate(Scheme scheme, const ForceField& force, double h, long long n_steps,
                            RandomStream& rng, const PhaseState& s0, const Vector* f_in) {
  if (n_steps < 1) throw UsageError("integrate needs at least one step");
  Integrator integ(scheme, force, s0.dim());
  if (f_in != nullptr) integ.set_cached_force(*f_in);
  IntegrationResult result{s0, 0, std::nullopt};
  for (long long k = 0; k < n_steps; ++k) {
    const double u = draw_stage_variable(scheme, rng);
    try {
      integ.step(h, u, result.state);
    } catch (const NumericError&) {
      throw NumericError("integration failed: non-finite force", k);
    }
    if (!result.state.finite()) throw NumericError("integration failed: non-finite state", k);
  }
  result.force_calls = integ.force_calls();
  if (integ.has_cached_force()) result.cached_force = integ.cached_force();
  return result;
}

}  // namespace rrkn
