#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rrkn/harness.hpp"
#include "rrkn/integrators.hpp"
#include "rrkn/potentials.hpp"
#include "rrkn/samplers.hpp"

namespace rrkn {

/// Design matrix (intercept column first, other columns standardized) and
/// binary labels.
struct Dataset {
  Matrix features;
  Vector labels;
  bool has_intercept = true;
  std::vector<std::string> names;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
};

/// Columns scaled to sample mean 0 and sample sd 1. Columns that already
/// satisfy this to 1e-12 are passed through unchanged, so the operation is
/// idempotent bit for bit. Throws UsageError on a constant column.
Matrix standardize_columns(const Matrix& raw);

/// Builds a Dataset from raw (unstandardized) features and 0/1 labels.
Dataset make_dataset(const Matrix& raw_features, const Vector& labels,
                     std::vector<std::string> feature_names = {});

/// CSV with a header row; the column named "label" holds 0/1 responses and
/// every other column is a numeric feature. Throws IoError with the row and
/// column of the first bad cell.
Dataset load_dataset(const std::string& path);

/// Logistic data with a fixed ground truth, for when no real file is supplied.
Dataset synthetic_dataset(std::uint64_t seed, std::size_t rows = 532, std::size_t features = 7);

/// l(beta) = sum y_i eta_i - log(1 + e^{eta_i}), eta = X beta.
double log_likelihood(const Dataset& d, const Vector& beta);
Vector log_likelihood_gradient(const Dataset& d, const Vector& beta);
/// X^T W X with W = diag(sigma(eta)(1 - sigma(eta))).
Matrix observed_information(const Dataset& d, const Vector& beta);

/// beta = beta_hat + sigma_sqrt * q.
struct Preconditioner {
  Vector beta_hat;
  Matrix sigma;       // inverse observed Fisher information at beta_hat
  Matrix sigma_sqrt;  // symmetric PSD square root of sigma
  int iterations = 0;
  double gradient_norm = 0.0;

  Vector to_beta(const Vector& q) const { return beta_hat + sigma_sqrt * q; }
};

/// Newton-Raphson to |grad l| < 1e-10. Throws NumericError when 100
/// iterations do not suffice (separable or ill-conditioned data).
Preconditioner logistic_mle(const Dataset& d);

/// Negative log-likelihood in preconditioned coordinates under a flat prior,
/// shifted so U(0) = 0.
class LogisticPotential final : public Potential {
 public:
  LogisticPotential(Dataset data, Preconditioner pc);

  const Dataset& data() const { return data_; }
  const Preconditioner& preconditioner() const { return pc_; }

 protected:
  double energy_impl(const Vector& q) const override;
  void force_impl(const Vector& q, Vector& out) const override;

 private:
  Dataset data_;
  Preconditioner pc_;
  double loglik_at_mode_;
};

std::shared_ptr<const LogisticPotential> preconditioned_potential(const Dataset& d,
                                                                  const Preconditioner& pc);

struct SdStudyPoint {
  Scheme scheme = Scheme::Verlet;
  long long steps = 1;
};

struct SdStudySettings {
  SamplerKind sampler = SamplerKind::Uhmc;
  std::size_t R = 100;
  std::size_t n = 1000;
  std::size_t burn_in = 100;
  std::optional<double> T;
  std::optional<double> gamma;
  std::size_t coordinate = 0;  // intercept
  long long warm_up_steps = 1600;
  unsigned threads = 1;
};

struct SdRecord {
  Scheme scheme = Scheme::Verlet;
  std::string sampler;
  long long steps_per_transition = 0;
  long long grad_evals_per_transition = 0;
  std::size_t replicas = 0;
  double sd_estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Replica-averaged sample SD of beta[coordinate] over chains targeting
/// `target` (in q coordinates), each started from a warm-up ukLa state.
std::vector<SdRecord> posterior_sd_study(const Potential& target, const Preconditioner& pc,
                                         const std::vector<SdStudyPoint>& grid,
                                         const SdStudySettings& settings, std::uint64_t seed);

void write_sd_csv(std::ostream& os, const std::vector<SdRecord>& records);

}  // namespace rrkn
