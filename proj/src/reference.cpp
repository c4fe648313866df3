#include "rrkn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrkn/parallel.hpp"
#include "rrkn/samplers.hpp"

namespace rrkn {

WeightedNorm::WeightedNorm(double lipschitz) : L(lipschitz) {
  if (!(lipschitz > 0.0)) throw UsageError("weighted norm needs L > 0");
}

double WeightedNorm::squared(const Vector& dx, const Vector& dv) const {
  return dx.squaredNorm() + dv.squaredNorm() / L;
}

double WeightedNorm::operator()(const PhaseState& s) const { return std::sqrt(squared(s.x, s.v)); }

double weighted_norm(const WeightedNorm& w, const PhaseState& s) { return w(s); }

PhaseState oscillator_exact_flow(double t, const PhaseState& s) {
  const double c = std::cos(t);
  const double sn = std::sin(t);
  return {c * s.x + sn * s.v, -sn * s.x + c * s.v};
}

namespace {

long long checked_ratio(double a, double b, const char* what) {
  const double r = a / b;
  const double rounded = std::round(r);
  if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * r) {
    throw UsageError(std::string(what) + " must be an integer multiple");
  }
  return static_cast<long long>(rounded);
}

// Verlet at step h_ref, recording the state every `stride` steps.
std::vector<PhaseState> verlet_trajectory(const Potential& p, const PhaseState& z0, double h_ref,
                                          long long grid_points, long long stride) {
  Integrator integ(Scheme::Verlet, p.force_field(), p.dim());
  std::vector<PhaseState> out;
  out.reserve(static_cast<std::size_t>(grid_points + 1));
  PhaseState s = z0;
  out.push_back(s);
  for (long long k = 0; k < grid_points; ++k) {
    for (long long j = 0; j < stride; ++j) integ.step(h_ref, 1.0, s);
    if (!s.finite()) throw NumericError("reference trajectory diverged", k);
    out.push_back(s);
  }
  return out;
}

double trajectory_gap(const std::vector<PhaseState>& a, const std::vector<PhaseState>& b,
                      const WeightedNorm& w) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    gap = std::max(gap, std::sqrt(w.squared(a[k].x - b[k].x, a[k].v - b[k].v)));
  }
  return gap;
}

}  // namespace

ReferenceTrajectory ReferenceTrajectory::exact(const Potential& p, double T, double grid_h,
                                               const PhaseState& z0) {
  if (!p.has_exact_flow()) throw UnsupportedError(p.name() + ": no closed-form reference flow");
  const long long n = checked_ratio(T, grid_h, "T / grid_h");
  ReferenceTrajectory ref;
  ref.grid_h_ = grid_h;
  ref.states_.reserve(static_cast<std::size_t>(n + 1));
  for (long long k = 0; k <= n; ++k) ref.states_.push_back(p.exact_flow(static_cast<double>(k) * grid_h, z0));
  return ref;
}

ReferenceTrajectory ReferenceTrajectory::richardson_verlet(const Potential& p, double T,
                                                           double grid_h, const PhaseState& z0,
                                                           const WeightedNorm& w, double tolerance,
                                                           int max_halvings) {
  const long long n = checked_ratio(T, grid_h, "T / grid_h");
  long long stride = 64;
  auto coarse = verlet_trajectory(p, z0, grid_h / static_cast<double>(stride), n, stride);
  for (int i = 0; i < max_halvings; ++i) {
    stride *= 2;
    auto fine = verlet_trajectory(p, z0, grid_h / static_cast<double>(stride), n, stride);
    const double gap = trajectory_gap(coarse, fine, w);
    if (gap < tolerance) {
      ReferenceTrajectory ref;
      ref.grid_h_ = grid_h;
      ref.h_ref_ = grid_h / static_cast<double>(stride);
      ref.richardson_gap_ = gap;
      ref.states_ = std::move(fine);
      return ref;
    }
    coarse = std::move(fine);
  }
  throw NumericError("reference flow failed the Richardson check", max_halvings);
}

const PhaseState& ReferenceTrajectory::at(double t) const {
  const double r = t / grid_h_;
  const double k = std::round(r);
  if (k < 0.0 || std::abs(r - k) > 1e-9 * std::max(1.0, r) ||
      static_cast<std::size_t>(k) >= states_.size()) {
    throw UsageError("time is not on the reference grid");
  }
  return states_[static_cast<std::size_t>(k)];
}

PhaseState reference_flow(const Potential& p, double t, const PhaseState& s, double h_ref) {
  if (t == 0.0) return s;
  const long long n = checked_ratio(t, h_ref, "t / h_ref");
  auto coarse = verlet_trajectory(p, s, h_ref, 1, n);
  auto fine = verlet_trajectory(p, s, h_ref / 2.0, 1, 2 * n);
  const double gap = trajectory_gap(coarse, fine, WeightedNorm(1.0));
  if (gap >= 1e-10) {
    throw NumericError("reference flow failed the Richardson check (gap " + std::to_string(gap) + ")", n);
  }
  return fine.back();
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kBlock = 256;

// Per-grid-time accumulators for one block of replicas.
struct ErrorAccumulator {
  std::vector<double> sum_sq;
  std::vector<Vector> sum_dx, sum_dv;

  ErrorAccumulator(long long steps, std::size_t dim)
      : sum_sq(static_cast<std::size_t>(steps + 1), 0.0),
        sum_dx(static_cast<std::size_t>(steps + 1), Vector::Zero(static_cast<Eigen::Index>(dim))),
        sum_dv(static_cast<std::size_t>(steps + 1), Vector::Zero(static_cast<Eigen::Index>(dim))) {}

  void add(std::size_t k, const Vector& dx, const Vector& dv, const WeightedNorm& w) {
    sum_sq[k] += w.squared(dx, dv);
    sum_dx[k] += dx;
    sum_dv[k] += dv;
  }

  void merge(const ErrorAccumulator& o) {
    for (std::size_t k = 0; k < sum_sq.size(); ++k) {
      sum_sq[k] += o.sum_sq[k];
      sum_dx[k] += o.sum_dx[k];
      sum_dv[k] += o.sum_dv[k];
    }
  }
};

template <class ReplicaFn>
ErrorPoint accumulate_curve_point(double h, long long steps, std::size_t replicas, std::size_t dim,
                                  const WeightedNorm& w, unsigned threads, ReplicaFn&& run_replica) {
  const std::size_t blocks = (replicas + kBlock - 1) / kBlock;
  std::vector<ErrorAccumulator> acc(blocks, ErrorAccumulator(steps, dim));
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(replicas, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) run_replica(r, acc[b]);
  });
  for (std::size_t b = 1; b < blocks; ++b) acc[0].merge(acc[b]);

  ErrorPoint pt;
  pt.h = h;
  pt.steps = steps;
  pt.replicas = replicas;
  const double inv = 1.0 / static_cast<double>(replicas);
  for (std::size_t k = 0; k < acc[0].sum_sq.size(); ++k) {
    pt.rms_error = std::max(pt.rms_error, std::sqrt(acc[0].sum_sq[k] * inv));
    pt.mean_error = std::max(pt.mean_error, std::sqrt(w.squared(acc[0].sum_dx[k] * inv, acc[0].sum_dv[k] * inv)));
  }
  return pt;
}

}  // namespace

std::vector<ErrorPoint> l2_error_curve(const Potential& p, const ErrorStudy& study,
                                       const std::vector<double>& h_list,
                                       const ReferenceTrajectory& reference) {
  if (study.z0.dim() != p.dim()) throw UsageError("initial state dimension mismatch");
  std::vector<ErrorPoint> out;
  const ForceField force = p.force_field();
  for (std::size_t hi = 0; hi < h_list.size(); ++hi) {
    const double h = h_list[hi];
    const long long steps = checked_ratio(study.T, h, "T / h");
    checked_ratio(h, reference.grid_h(), "h / reference grid");
    const std::size_t replicas = is_randomized(study.scheme) ? study.replicas : 1;
    if (replicas < 1) throw UsageError("need at least one replica");

    out.push_back(accumulate_curve_point(
        h, steps, replicas, p.dim(), study.norm, study.threads,
        [&](std::size_t r, ErrorAccumulator& acc) {
          RandomStream rng = RandomStream::derive(study.seed, hi, r);
          Integrator integ(study.scheme, force, p.dim());
          PhaseState s = study.z0;
          for (long long k = 1; k <= steps; ++k) {
            integ.step(h, draw_stage_variable(study.scheme, rng), s);
            const PhaseState& ref = reference.at(static_cast<double>(k) * h);
            acc.add(static_cast<std::size_t>(k), s.x - ref.x, s.v - ref.v, study.norm);
          }
        }));
  }
  return out;
}

std::vector<ErrorPoint> ukla_coupling_curve(const Potential& p, const ErrorStudy& study,
                                            double gamma, const std::vector<double>& h_list) {
  if (!p.has_exact_flow()) throw UnsupportedError(p.name() + ": exact splitting needs a closed-form flow");
  if (study.z0.dim() != p.dim()) throw UsageError("initial state dimension mismatch");
  std::vector<ErrorPoint> out;
  const ForceField force = p.force_field();
  for (std::size_t hi = 0; hi < h_list.size(); ++hi) {
    const double h = h_list[hi];
    const long long steps = checked_ratio(study.T, h, "T / h");
    out.push_back(accumulate_curve_point(
        h, steps, study.replicas, p.dim(), study.norm, study.threads,
        [&](std::size_t r, ErrorAccumulator& acc) {
          ChainStreams numeric = ChainStreams::derive(study.seed ^ mix64(hi), r);
          ChainStreams exact = numeric;  // identical velocity noise
          Integrator integ(study.scheme, force, p.dim());
          PhaseState zu = study.z0;
          PhaseState ze = study.z0;
          for (long long k = 1; k <= steps; ++k) {
            ukla_step(integ, gamma, h, numeric, zu);
            ze = exact_splitting_steps(p, gamma, h, 1, exact, ze);
            acc.add(static_cast<std::size_t>(k), zu.x - ze.x, zu.v - ze.v, study.norm);
          }
        }));
  }
  return out;
}

OrderFit fit_order(const std::vector<std::pair<double, double>>& h_and_error) {
  if (h_and_error.size() < 4) throw UsageError("order fit needs at least 4 points");
  OrderFit fit;
  double sx = 0, sy = 0;
  for (const auto& [h, err] : h_and_error) {
    if (!(h > 0.0) || !(err > 0.0)) throw UsageError("order fit needs positive step sizes and errors");
    fit.points.emplace_back(std::log2(h), std::log2(err));
    sx += fit.points.back().first;
    sy += fit.points.back().second;
  }
  const double m = static_cast<double>(fit.points.size());
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& [lx, ly] : fit.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
  }
  if (sxx == 0.0) throw UsageError("order fit needs distinct step sizes");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (const auto& [lx, ly] : fit.points) {
    const double r = ly - (fit.intercept + fit.slope * lx);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

std::vector<double> dyadic_steps(int n_lo, int n_hi) {
  std::vector<double> hs;
  for (int n = n_lo; n <= n_hi; ++n) hs.push_back(std::ldexp(1.0, -n));
  return hs;
}

}  // namespace rrkn
