#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rrkn/integrators.hpp"
#include "rrkn/potentials.hpp"
#include "rrkn/samplers.hpp"

namespace rrkn {

/// Default transition durations: T = pi/2 for uHMC, T = pi (gamma = 2) for ukLa.
double default_duration(SamplerKind s);
double default_gamma(SamplerKind s);

/// Mean of replica-level values with a normal-approximation 95% interval.
struct ConfidenceInterval {
  double mean = 0.0;
  double sd = 0.0;
  double half_width = 0.0;  // 1.96 sd / sqrt(R)

  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
  bool contains(double value) const { return lo() <= value && value <= hi(); }
  bool overlaps(const ConfidenceInterval& o) const { return lo() <= o.hi() && o.lo() <= hi(); }
};

ConfidenceInterval summarize(const std::vector<double>& values);

/// (1/n) sum log pi(X_k) - E_pi[log pi].
double bias_estimate(const Potential& p, const std::vector<Vector>& samples, double ref_entropy);

bool has_exact_sampler(const Potential& p);
/// One exact draw from pi for Gauss, osc1d, NG1 and NG2 (t_8).
Vector exact_sample(const Potential& p, RandomStream& rng);

/// (X, V) after 1600 ukLa steps (rRKN 3.5, h = pi/16, gamma = 2) from
/// z1, z2 ~ N(0, I). Used where no exact sampler exists.
PhaseState warm_up_state(const Potential& p, RandomStream& rng, long long steps = 1600);

struct GridPoint {
  std::shared_ptr<const Potential> target;
  SamplerKind sampler = SamplerKind::Uhmc;
  Scheme scheme = Scheme::Verlet;
  long long steps = 1;  // T/h
};

struct ExperimentSettings {
  std::size_t n = 1000;
  std::size_t burn_in = 0;
  std::optional<double> T;      // defaults per sampler
  std::optional<double> gamma;  // defaults per sampler
  unsigned threads = 1;
};

struct ExperimentRecord {
  std::string target;
  std::string sampler;
  Scheme scheme = Scheme::Verlet;
  long long steps_per_transition = 0;
  long long grad_evals_per_transition = 0;
  std::size_t replicas = 0;
  double bias_mean = 0.0;
  double ci_half_width = 0.0;
  // Extra diagnostics, emitted after the fixed columns.
  double h = 0.0;
  double force_calls_per_transition = 0.0;
  std::size_t failed_replicas = 0;
  ConfidenceInterval ci() const { return {bias_mean, 0.0, ci_half_width}; }
};

/// For every grid point, R independent chains started at X0 ~ pi (warm-up
/// where no exact sampler exists) and the bias of the average log-density.
/// Records come back in grid order regardless of scheduling.
std::vector<ExperimentRecord> run_experiment(const std::vector<GridPoint>& grid, std::size_t R,
                                             const ExperimentSettings& settings,
                                             std::uint64_t master_seed);

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);

}  // namespace rrkn
