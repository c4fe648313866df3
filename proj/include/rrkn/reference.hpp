#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rrkn/integrators.hpp"
#include "rrkn/potentials.hpp"

namespace rrkn {

/// ||(x, v)||_w^2 = |x|^2 + |v|^2 / L.
struct WeightedNorm {
  double L = 1.0;

  explicit WeightedNorm(double lipschitz = 1.0);
  double operator()(const PhaseState& s) const;
  double squared(const Vector& dx, const Vector& dv) const;
};

double weighted_norm(const WeightedNorm& w, const PhaseState& s);

/// Rotation (x cos t + v sin t, -x sin t + v cos t), coordinatewise.
PhaseState oscillator_exact_flow(double t, const PhaseState& s);

/// Reference trajectory sampled on the grid t_k = k * grid_h, k = 0..T/grid_h.
class ReferenceTrajectory {
 public:
  /// Closed-form flow of `p` (throws UnsupportedError if unavailable).
  static ReferenceTrajectory exact(const Potential& p, double T, double grid_h,
                                   const PhaseState& z0);

  /// Fine-step Verlet. Starting from h_ref = grid_h / 64, h_ref is halved
  /// until two successive resolutions agree to `tolerance` in ||.||_w at every
  /// grid time; if that does not happen by `max_halvings` the construction is
  /// refused with NumericError.
  static ReferenceTrajectory richardson_verlet(const Potential& p, double T, double grid_h,
                                               const PhaseState& z0, const WeightedNorm& w,
                                               double tolerance = 1e-10, int max_halvings = 14);

  double grid_h() const { return grid_h_; }
  double T() const { return grid_h_ * static_cast<double>(states_.size() - 1); }
  double h_ref() const { return h_ref_; }
  double richardson_gap() const { return richardson_gap_; }

  /// State at time t, which must be a grid time.
  const PhaseState& at(double t) const;
  const std::vector<PhaseState>& states() const { return states_; }

 private:
  double grid_h_ = 0.0;
  double h_ref_ = 0.0;
  double richardson_gap_ = 0.0;
  std::vector<PhaseState> states_;
};

PhaseState reference_flow(const Potential& p, double t, const PhaseState& s, double h_ref);

struct ErrorPoint {
  double h = 0.0;
  long long steps = 0;
  std::size_t replicas = 0;
  /// max over grid times of sqrt(E ||numerical - reference||_w^2)
  double rms_error = 0.0;
  /// max over grid times of ||E[numerical] - reference||_w
  double mean_error = 0.0;
};

struct ErrorStudy {
  Scheme scheme = Scheme::Rrkn25;
  double T = 1.0;
  PhaseState z0;
  WeightedNorm norm;
  std::size_t replicas = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Strong-error curve of a scheme against a reference trajectory. Every h
/// must divide T and be a multiple of the reference grid spacing.
std::vector<ErrorPoint> l2_error_curve(const Potential& p, const ErrorStudy& study,
                                       const std::vector<double>& h_list,
                                       const ReferenceTrajectory& reference);

/// Strong error of ukLa (the study's scheme) against the exact splitting,
/// both driven by the same velocity noise, with friction gamma.
std::vector<ErrorPoint> ukla_coupling_curve(const Potential& p, const ErrorStudy& study,
                                            double gamma, const std::vector<double>& h_list);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log2 units
  std::vector<std::pair<double, double>> points;  // (log2 h, log2 error)
};

/// Ordinary least squares of log2(error) against log2(h). Needs >= 4 points
/// with positive errors.
OrderFit fit_order(const std::vector<std::pair<double, double>>& h_and_error);

/// h = 2^-n for n in [n_lo, n_hi].
std::vector<double> dyadic_steps(int n_lo, int n_hi);

}  // namespace rrkn
