#include "rrkn/harness.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "rrkn/parallel.hpp"

namespace rrkn {

double default_duration(SamplerKind s) {
  return s == SamplerKind::Uhmc ? std::numbers::pi / 2.0 : std::numbers::pi;
}

double default_gamma(SamplerKind s) { return s == SamplerKind::Uhmc ? 0.0 : 2.0; }

ConfidenceInterval summarize(const std::vector<double>& values) {
  ConfidenceInterval ci;
  if (values.empty()) return ci;
  const double m = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  ci.mean = sum / m;
  if (values.size() < 2) return ci;
  double ss = 0.0;
  for (double v : values) ss += (v - ci.mean) * (v - ci.mean);
  ci.sd = std::sqrt(ss / (m - 1.0));
  ci.half_width = 1.96 * ci.sd / std::sqrt(m);
  return ci;
}

double bias_estimate(const Potential& p, const std::vector<Vector>& samples, double ref_entropy) {
  if (samples.empty()) throw UsageError("bias estimate needs at least one sample");
  double sum = 0.0;
  for (const auto& x : samples) sum += p.log_density(x);
  return sum / static_cast<double>(samples.size()) - ref_entropy;
}

bool has_exact_sampler(const Potential& p) {
  switch (p.kind()) {
    case TargetKind::Gauss:
    case TargetKind::Oscillator1D:
    case TargetKind::Ng1:
      return true;
    case TargetKind::Ng2:
      return !static_cast<const Ng2Potential&>(p).raw_power();
    default:
      return false;
  }
}

Vector exact_sample(const Potential& p, RandomStream& rng) {
  if (!has_exact_sampler(p)) throw UnsupportedError(p.name() + ": no exact sampler");
  switch (p.kind()) {
    case TargetKind::Ng1: {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      Vector q(2);
      q << z1, 0.25 * z1 * z1 + z2;
      return q;
    }
    case TargetKind::Ng2: {
      // Gaussian scale mixture: z * sqrt(nu / chi^2_nu), nu = 8.
      Vector z = rng.normal_vector(2);
      double chi2 = 0.0;
      for (int i = 0; i < 8; ++i) {
        const double g = rng.normal();
        chi2 += g * g;
      }
      return z * std::sqrt(8.0 / chi2);
    }
    default:
      return rng.normal_vector(p.dim());
  }
}

PhaseState warm_up_state(const Potential& p, RandomStream& rng, long long steps) {
  PhaseState z{rng.normal_vector(p.dim()), rng.normal_vector(p.dim())};
  ChainStreams streams{RandomStream(rng.next_u64()), RandomStream(rng.next_u64())};
  Integrator integ(Scheme::Rrkn35, p.force_field(), p.dim());
  const double h = std::numbers::pi / 16.0;
  for (long long k = 0; k < steps; ++k) {
    try {
      ukla_step(integ, 2.0, h, streams, z);
    } catch (const NumericError&) {
      throw NumericError("warm-up chain failed", k);
    }
  }
  if (!z.finite()) throw NumericError("warm-up chain reached a non-finite state", steps);
  return z;
}

namespace {

PhaseState initial_state(const Potential& p, RandomStream& rng) {
  if (has_exact_sampler(p)) {
    Vector x = exact_sample(p, rng);
    return {std::move(x), rng.normal_vector(p.dim())};
  }
  PhaseState z = warm_up_state(p, rng);
  z.v = rng.normal_vector(p.dim());
  return z;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const std::vector<GridPoint>& grid, std::size_t R,
                                             const ExperimentSettings& settings,
                                             std::uint64_t master_seed) {
  if (R < 2) throw UsageError("need at least 2 replicas for a confidence interval");
  for (const auto& g : grid) {
    if (!g.target) throw UsageError("grid point without a target");
    if (g.steps < 1) throw UsageError("steps per transition must be positive");
  }

  struct Job {
    std::size_t grid_index;
    std::size_t replica;
  };
  std::vector<Job> jobs;
  jobs.reserve(grid.size() * R);
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t r = 0; r < R; ++r) jobs.push_back({g, r});

  std::vector<double> estimates(jobs.size(), 0.0);
  std::vector<char> failed(jobs.size(), 0);
  std::vector<double> calls(jobs.size(), 0.0);

  parallel_for(jobs.size(), settings.threads, [&](std::size_t j) {
    const auto& gp = grid[jobs[j].grid_index];
    const Potential& p = *gp.target;
    ChainConfig cfg;
    cfg.T = settings.T.value_or(default_duration(gp.sampler));
    cfg.h = cfg.T / static_cast<double>(gp.steps);
    cfg.gamma = settings.gamma.value_or(default_gamma(gp.sampler));
    cfg.n = settings.n;
    cfg.burn_in = settings.burn_in;
    cfg.scheme = gp.scheme;
    const std::uint64_t point_seed = mix64(master_seed ^ mix64(jobs[j].grid_index));
    cfg.seed = point_seed;

    RandomStream init_rng = RandomStream::derive(point_seed, jobs[j].replica, 3);
    ChainStreams streams = ChainStreams::derive(point_seed, jobs[j].replica);
    const double ref = p.reference_entropy();
    try {
      const PhaseState init = initial_state(p, init_rng);
      double sum = 0.0;
      const ChainOutput out = run_chain_observed(p, cfg, streams, init, gp.sampler,
                                                 [&](const Vector& x) { sum += p.log_density(x); });
      estimates[j] = sum / static_cast<double>(cfg.n) - ref;
      calls[j] = out.force_calls_per_transition;
    } catch (const NumericError&) {
      failed[j] = 1;
    }
  });

  std::vector<ExperimentRecord> records;
  records.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto& gp = grid[g];
    ExperimentRecord rec;
    rec.target = gp.target->name();
    rec.sampler = std::string(sampler_name(gp.sampler));
    rec.scheme = gp.scheme;
    rec.steps_per_transition = gp.steps;
    rec.grad_evals_per_transition =
        gp.sampler == SamplerKind::ExactSplit ? 0 : gp.steps * nominal_evals_per_step(gp.scheme);
    rec.h = settings.T.value_or(default_duration(gp.sampler)) / static_cast<double>(gp.steps);
    std::vector<double> ok;
    for (std::size_t r = 0; r < R; ++r) {
      const std::size_t j = g * R + r;
      if (failed[j]) {
        ++rec.failed_replicas;
      } else {
        ok.push_back(estimates[j]);
        rec.force_calls_per_transition = calls[j];
      }
    }
    rec.replicas = ok.size();
    const ConfidenceInterval ci = summarize(ok);
    rec.bias_mean = ok.empty() ? std::nan("") : ci.mean;
    rec.ci_half_width = ok.size() < 2 ? std::nan("") : ci.half_width;
    records.push_back(rec);
  }
  return records;
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << "target,sampler,scheme,steps_per_transition,grad_evals_per_transition,replicas,"
        "bias_mean,ci_half_width,h,force_calls_per_transition,failed_replicas\n";
  os << std::setprecision(10);
  for (const auto& r : records) {
    os << r.target << ',' << r.sampler << ',' << scheme_name(r.scheme) << ','
       << r.steps_per_transition << ',' << r.grad_evals_per_transition << ',' << r.replicas << ','
       << r.bias_mean << ',' << r.ci_half_width << ',' << r.h << ','
       << r.force_calls_per_transition << ',' << r.failed_replicas << '\n';
  }
}

}  // namespace rrkn
