#include "rrkn/bayes.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rrkn/parallel.hpp"

namespace rrkn {

namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Matrix standardize_columns(const Matrix& raw) {
  Matrix out = raw;
  const double n = static_cast<double>(raw.rows());
  if (raw.rows() < 2) throw UsageError("standardization needs at least 2 rows");
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double mean = raw.col(j).mean();
    const double sd = std::sqrt((raw.col(j).array() - mean).square().sum() / (n - 1.0));
    if (!(sd > 0.0)) throw UsageError("feature column " + std::to_string(j) + " is constant");
    if (std::abs(mean) < 1e-12 && std::abs(sd - 1.0) < 1e-12) continue;
    out.col(j) = (raw.col(j).array() - mean) / sd;
  }
  return out;
}

Dataset make_dataset(const Matrix& raw_features, const Vector& labels,
                     std::vector<std::string> feature_names) {
  if (raw_features.rows() != labels.size()) throw UsageError("features and labels differ in length");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw UsageError("label in row " + std::to_string(i + 1) + " is not 0 or 1");
    }
  }
  Dataset d;
  d.features.resize(raw_features.rows(), raw_features.cols() + 1);
  d.features.col(0).setOnes();
  d.features.rightCols(raw_features.cols()) = standardize_columns(raw_features);
  d.labels = labels;
  d.has_intercept = true;
  d.names.push_back("intercept");
  for (Eigen::Index j = 0; j < raw_features.cols(); ++j) {
    d.names.push_back(static_cast<std::size_t>(j) < feature_names.size()
                          ? feature_names[static_cast<std::size_t>(j)]
                          : "x" + std::to_string(j + 1));
  }
  if (d.rows() <= d.cols()) throw UsageError("dataset needs more rows than parameters");
  return d;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const auto header = split_csv_line(line);
  std::ptrdiff_t label_col = -1;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "label") {
      label_col = static_cast<std::ptrdiff_t>(j);
    } else {
      names.push_back(header[j]);
    }
  }
  if (label_col < 0) throw IoError(path + ": no column named 'label'");

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IoError(path + ": row " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                    " cells, expected " + std::to_string(header.size()));
    }
    std::vector<double> feats;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double value = 0.0;
      const auto& c = cells[j];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), value);
      if (c.empty() || ec != std::errc() || ptr != c.data() + c.size() || !std::isfinite(value)) {
        throw IoError(path + ": row " + std::to_string(row_no) + ", column '" + header[j] +
                      "': missing or non-numeric value '" + c + "'");
      }
      if (static_cast<std::ptrdiff_t>(j) == label_col) {
        if (value != 0.0 && value != 1.0) {
          throw IoError(path + ": row " + std::to_string(row_no) + ", column 'label': expected 0 or 1");
        }
        labels.push_back(value);
      } else {
        feats.push_back(value);
      }
    }
    rows.push_back(std::move(feats));
  }
  if (rows.empty()) throw IoError(path + ": no data rows");

  Matrix raw(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j)
      raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  Vector y = Eigen::Map<Vector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  return make_dataset(raw, y, names);
}

Dataset synthetic_dataset(std::uint64_t seed, std::size_t rows, std::size_t features) {
  RandomStream rng = RandomStream::derive(seed, 0, 7);
  const auto n = static_cast<Eigen::Index>(rows);
  const auto p = static_cast<Eigen::Index>(features);
  Matrix raw(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    double shared = rng.normal();
    for (Eigen::Index j = 0; j < p; ++j) raw(i, j) = 0.4 * shared + rng.normal() + 0.5 * static_cast<double>(j);
  }
  Matrix standardized = standardize_columns(raw);
  Vector beta(p + 1);
  for (Eigen::Index j = 0; j <= p; ++j) beta[j] = (j % 2 == 0 ? 0.9 : -0.6) / (1.0 + 0.3 * static_cast<double>(j));
  beta[0] = -0.7;
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = beta[0] + standardized.row(i).dot(beta.tail(p));
    y[i] = rng.uniform() < sigmoid(eta) ? 1.0 : 0.0;
  }
  return make_dataset(raw, y);
}

double log_likelihood(const Dataset& d, const Vector& beta) {
  const Vector eta = d.features * beta;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) sum += d.labels[i] * eta[i] - softplus(eta[i]);
  return sum;
}

Vector log_likelihood_gradient(const Dataset& d, const Vector& beta) {
  Vector resid = d.features * beta;
  for (Eigen::Index i = 0; i < resid.size(); ++i) resid[i] = d.labels[i] - sigmoid(resid[i]);
  return d.features.transpose() * resid;
}

Matrix observed_information(const Dataset& d, const Vector& beta) {
  const Vector eta = d.features * beta;
  Vector w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double s = sigmoid(eta[i]);
    w[i] = s * (1.0 - s);
  }
  return d.features.transpose() * w.asDiagonal() * d.features;
}

Preconditioner logistic_mle(const Dataset& d) {
  Preconditioner pc;
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(d.cols()));
  double ll = log_likelihood(d, beta);
  Vector grad = log_likelihood_gradient(d, beta);
  int it = 0;
  for (; it < 100 && grad.norm() >= 1e-10; ++it) {
    const Matrix info = observed_information(d, beta);
    const Vector step = info.ldlt().solve(grad);
    if (!step.allFinite()) break;
    // Damped Newton: halve until the likelihood does not decrease.
    double t = 1.0;
    Vector trial = beta + step;
    double trial_ll = log_likelihood(d, trial);
    while (trial_ll < ll - 1e-12 * std::abs(ll) && t > 1e-8) {
      t *= 0.5;
      trial = beta + t * step;
      trial_ll = log_likelihood(d, trial);
    }
    beta = trial;
    ll = trial_ll;
    grad = log_likelihood_gradient(d, beta);
  }
  if (!(grad.norm() < 1e-10) || !beta.allFinite()) {
    throw NumericError("logistic MLE did not converge; data may be separable (|grad| = " +
                           std::to_string(grad.norm()) + ")",
                       it);
  }
  pc.beta_hat = beta;
  pc.iterations = it;
  pc.gradient_norm = grad.norm();

  const Matrix info = observed_information(d, beta);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
  // Under (quasi-)separation the gradient still vanishes as |beta| grows, but
  // the information collapses along the separating direction.
  if (eig.info() != Eigen::Success ||
      eig.eigenvalues().minCoeff() <= 1e-8 * static_cast<double>(d.rows())) {
    throw NumericError("observed information is singular at the fitted beta; data may be separable", it);
  }
  const Vector inv = eig.eigenvalues().cwiseInverse();
  pc.sigma = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  pc.sigma_sqrt = eig.eigenvectors() * inv.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
  pc.sigma = 0.5 * (pc.sigma + pc.sigma.transpose()).eval();
  pc.sigma_sqrt = 0.5 * (pc.sigma_sqrt + pc.sigma_sqrt.transpose()).eval();
  return pc;
}

LogisticPotential::LogisticPotential(Dataset data, Preconditioner pc)
    : Potential(data.cols(), TargetKind::Logistic, "logistic"),
      data_(std::move(data)),
      pc_(std::move(pc)) {
  if (static_cast<std::size_t>(pc_.beta_hat.size()) != data_.cols() ||
      static_cast<std::size_t>(pc_.sigma_sqrt.rows()) != data_.cols()) {
    throw UsageError("preconditioner does not match the dataset");
  }
  loglik_at_mode_ = log_likelihood(data_, pc_.beta_hat);
}

double LogisticPotential::energy_impl(const Vector& q) const {
  return loglik_at_mode_ - log_likelihood(data_, pc_.to_beta(q));
}

void LogisticPotential::force_impl(const Vector& q, Vector& out) const {
  // F = -grad_q U = S^T grad_beta l, S symmetric
  out = pc_.sigma_sqrt * log_likelihood_gradient(data_, pc_.to_beta(q));
}

std::shared_ptr<const LogisticPotential> preconditioned_potential(const Dataset& d,
                                                                  const Preconditioner& pc) {
  return std::make_shared<LogisticPotential>(d, pc);
}

// ---------------------------------------------------------------------------

std::vector<SdRecord> posterior_sd_study(const Potential& target, const Preconditioner& pc,
                                         const std::vector<SdStudyPoint>& grid,
                                         const SdStudySettings& settings, std::uint64_t seed) {
  if (settings.R < 2) throw UsageError("need at least 2 replicas");
  if (settings.n < 2) throw UsageError("sample SD needs n >= 2");
  if (static_cast<std::size_t>(pc.sigma_sqrt.rows()) != target.dim()) {
    throw UsageError("preconditioner does not match the target dimension");
  }
  if (settings.coordinate >= target.dim()) throw UsageError("coordinate out of range");

  const std::size_t R = settings.R;
  std::vector<double> estimates(grid.size() * R, 0.0);
  std::vector<char> failed(grid.size() * R, 0);
  const auto c = static_cast<Eigen::Index>(settings.coordinate);
  const Vector row = pc.sigma_sqrt.row(c).transpose();

  parallel_for(grid.size() * R, settings.threads, [&](std::size_t j) {
    const std::size_t g = j / R;
    const std::size_t r = j % R;
    ChainConfig cfg;
    cfg.T = settings.T.value_or(default_duration(settings.sampler));
    cfg.h = cfg.T / static_cast<double>(grid[g].steps);
    cfg.gamma = settings.gamma.value_or(default_gamma(settings.sampler));
    cfg.n = settings.n;
    cfg.burn_in = settings.burn_in;
    cfg.scheme = grid[g].scheme;
    const std::uint64_t point_seed = mix64(seed ^ mix64(g));
    RandomStream init_rng = RandomStream::derive(point_seed, r, 3);
    ChainStreams streams = ChainStreams::derive(point_seed, r);
    try {
      const PhaseState init = warm_up_state(target, init_rng, settings.warm_up_steps);
      double sum = 0.0, sum_sq = 0.0;
      // Accumulate beta - beta_hat; the SD is shift invariant.
      run_chain_observed(target, cfg, streams, init, settings.sampler, [&](const Vector& q) {
        const double b = row.dot(q);
        sum += b;
        sum_sq += b * b;
      });
      const double m = static_cast<double>(cfg.n);
      const double var = (sum_sq - sum * sum / m) / (m - 1.0);
      estimates[j] = std::sqrt(std::max(var, 0.0));
    } catch (const NumericError&) {
      failed[j] = 1;
    }
  });

  std::vector<SdRecord> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> ok;
    for (std::size_t r = 0; r < R; ++r)
      if (!failed[g * R + r]) ok.push_back(estimates[g * R + r]);
    const ConfidenceInterval ci = summarize(ok);
    SdRecord rec;
    rec.scheme = grid[g].scheme;
    rec.sampler = std::string(sampler_name(settings.sampler));
    rec.steps_per_transition = grid[g].steps;
    rec.grad_evals_per_transition = grid[g].steps * nominal_evals_per_step(grid[g].scheme);
    rec.replicas = ok.size();
    rec.sd_estimate = ok.empty() ? std::nan("") : ci.mean;
    rec.ci_lo = ok.size() < 2 ? std::nan("") : ci.lo();
    rec.ci_hi = ok.size() < 2 ? std::nan("") : ci.hi();
    out.push_back(rec);
  }
  return out;
}

void write_sd_csv(std::ostream& os, const std::vector<SdRecord>& records) {
  os << "sampler,scheme,steps_per_transition,grad_evals_per_transition,replicas,sd_estimate,ci_lo,ci_hi\n";
  os << std::setprecision(10);
  for (const auto& r : records) {
    os << r.sampler << ',' << scheme_name(r.scheme) << ',' << r.steps_per_transition << ','
       << r.grad_evals_per_transition << ',' << r.replicas << ',' << r.sd_estimate << ','
       << r.ci_lo << ',' << r.ci_hi << '\n';
  }
}

}  // namespace rrkn
