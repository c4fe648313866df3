#include "rrkn/potentials.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rrkn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

/// Integral of f over the real line (adaptive Gauss-Kronrod on a mapped range).
template <class F>
double integrate_line(F f) {
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  return gauss_kronrod<double, 61>::integrate(f, -inf, inf, 15, 1e-14);
}

template <class F>
double integrate_half_line(F f) {
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  return gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 15, 1e-14);
}

struct NormalizationResult {
  double log_z;
  double entropy;  // E[log pi] = -log Z - E[U]
};

/// Density ∝ exp(-V(s)) on the line.
template <class V>
NormalizationResult normalize_line(V potential) {
  const double z = integrate_line([&](double s) { return std::exp(-potential(s)); });
  const double mean_u =
      integrate_line([&](double s) { return potential(s) * std::exp(-potential(s)); }) / z;
  return {std::log(z), -std::log(z) - mean_u};
}

std::size_t parse_dim(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    throw UsageError("invalid dimension '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// TargetId

TargetId TargetId::parse(std::string_view text) {
  TargetId id;
  if (text.starts_with("gauss:")) {
    id.kind = TargetKind::Gauss;
    id.dim = parse_dim(text.substr(6));
  } else if (text == "ng1") {
    id.kind = TargetKind::Ng1;
    id.dim = 2;
  } else if (text == "ng2") {
    id.kind = TargetKind::Ng2;
    id.dim = 2;
  } else if (text == "ng3") {
    id.kind = TargetKind::Ng3;
    id.dim = 2;
  } else if (text == "osc1d") {
    id.kind = TargetKind::Oscillator1D;
  } else if (text == "dw1d") {
    id.kind = TargetKind::DoubleWell1D;
  } else if (text.starts_with("logistic:")) {
    id.kind = TargetKind::Logistic;
    id.path = std::string(text.substr(9));
    if (id.path.empty()) throw UsageError("logistic target needs a dataset path");
  } else {
    throw UsageError("unknown target '" + std::string(text) + "'");
  }
  return id;
}

std::string TargetId::str() const {
  switch (kind) {
    case TargetKind::Gauss: return "gauss:" + std::to_string(dim);
    case TargetKind::Ng1: return "ng1";
    case TargetKind::Ng2: return "ng2";
    case TargetKind::Ng3: return "ng3";
    case TargetKind::Oscillator1D: return "osc1d";
    case TargetKind::DoubleWell1D: return "dw1d";
    case TargetKind::Logistic: return "logistic:" + path;
    case TargetKind::Free: return "free:" + std::to_string(dim);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Potential

Potential::Potential(std::size_t dim, TargetKind kind, std::string name)
    : dim_(dim), kind_(kind), name_(std::move(name)) {
  if (dim == 0) throw UsageError("potential dimension must be positive");
}

void Potential::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw UsageError(name_ + ": expected a vector of length " + std::to_string(dim_) +
                     ", got " + std::to_string(x.size()));
  }
}

double Potential::energy(const Vector& x) const {
  check_dim(x);
  return energy_impl(x);
}

Vector Potential::force(const Vector& x) const {
  Vector out(x.size());
  force(x, out);
  return out;
}

void Potential::force(const Vector& x, Vector& out) const {
  check_dim(x);
  if (out.size() != x.size()) out.resize(x.size());
  force_impl(x, out);
}

ForceField Potential::force_field() const {
  return [this](const Vector& x, Vector& out) { force(x, out); };
}

double Potential::log_density(const Vector& x) const {
  if (!log_norm_const_) throw UnsupportedError(name_ + ": unnormalized target");
  return -energy(x) - *log_norm_const_;
}

double Potential::reference_entropy() const {
  if (!reference_entropy_) throw UnsupportedError(name_ + ": no reference value for E[log pi]");
  return *reference_entropy_;
}

PhaseState Potential::exact_flow(double, const PhaseState&) const {
  throw UnsupportedError(name_ + ": no closed-form Hamiltonian flow");
}

// ---------------------------------------------------------------------------
// Zoo

GaussianPotential::GaussianPotential(std::size_t dim, TargetKind kind)
    : Potential(dim, kind, kind == TargetKind::Oscillator1D ? "osc1d" : "gauss:" + std::to_string(dim)) {
  if (kind == TargetKind::Oscillator1D && dim != 1) throw UsageError("osc1d has dimension 1");
  const double d = static_cast<double>(dim);
  grad_lipschitz_ = 1.0;
  hessian_lipschitz_ = 0.0;
  log_norm_const_ = 0.5 * d * kLog2Pi;
  reference_entropy_ = -0.5 * d * (1.0 + kLog2Pi);
}

double GaussianPotential::energy_impl(const Vector& x) const { return 0.5 * x.squaredNorm(); }

void GaussianPotential::force_impl(const Vector& x, Vector& out) const { out = -x; }

PhaseState GaussianPotential::exact_flow(double t, const PhaseState& s) const {
  check_dim(s.x);
  const double c = std::cos(t);
  const double sn = std::sin(t);
  return {c * s.x + sn * s.v, -sn * s.x + c * s.v};
}

FreePotential::FreePotential(std::size_t dim)
    : Potential(dim, TargetKind::Free, "free:" + std::to_string(dim)) {
  grad_lipschitz_ = 0.0;
  hessian_lipschitz_ = 0.0;
}

PhaseState FreePotential::exact_flow(double t, const PhaseState& s) const {
  check_dim(s.x);
  return {s.x + t * s.v, s.v};
}

Ng1Potential::Ng1Potential() : Potential(2, TargetKind::Ng1, "ng1") {
  log_norm_const_ = kLog2Pi;
  reference_entropy_ = -kLog2Pi - 1.0;
}

double Ng1Potential::energy_impl(const Vector& q) const {
  const double r = q[1] - 0.25 * q[0] * q[0];
  return 0.5 * q[0] * q[0] + 0.5 * r * r;
}

void Ng1Potential::force_impl(const Vector& q, Vector& out) const {
  const double r = q[1] - 0.25 * q[0] * q[0];
  out[0] = -q[0] + 0.5 * q[0] * r;
  out[1] = -r;
}

Ng2Potential::Ng2Potential(bool raw_power)
    : Potential(2, TargetKind::Ng2, raw_power ? "ng2-raw" : "ng2"), raw_power_(raw_power) {
  if (!raw_power) {
    // Gamma(5) / (Gamma(4) 8 pi) = 1/(2 pi); E[log(1 + |X|^2/8)] = psi(5) - psi(4) = 1/4.
    log_norm_const_ = kLog2Pi;
    reference_entropy_ = -kLog2Pi - 5.0 * 0.25;
    return;
  }
  // Radially symmetric: with rho = |q|^2, Z = pi * int_0^inf exp(-V(rho)) d rho.
  auto v = [](double rho) { return std::pow(1.0 + rho / 8.0, 5); };
  const double z = std::numbers::pi * integrate_half_line([&](double r) { return std::exp(-v(r)); });
  const double mean_u =
      std::numbers::pi * integrate_half_line([&](double r) { return v(r) * std::exp(-v(r)); }) / z;
  log_norm_const_ = std::log(z);
  reference_entropy_ = -std::log(z) - mean_u;
}

double Ng2Potential::energy_impl(const Vector& q) const {
  const double base = 1.0 + q.squaredNorm() / 8.0;
  return raw_power_ ? std::pow(base, 5) : 5.0 * std::log(base);
}

void Ng2Potential::force_impl(const Vector& q, Vector& out) const {
  const double base = 1.0 + q.squaredNorm() / 8.0;
  // dU/dq = U'(base) * q/4
  const double du_dbase = raw_power_ ? 5.0 * std::pow(base, 4) : 5.0 / base;
  out = -(du_dbase * 0.25) * q;
}

Ng3Potential::Ng3Potential() : Potential(2, TargetKind::Ng3, "ng3") {
  // Integrating out q2 | q1 (a unit Gaussian around q1) leaves a 1-D problem:
  // Z = sqrt(2 pi) * int exp(-(1 - s^2)^2) ds and E[U] = E[(1 - q1^2)^2] + 1/2.
  const auto marginal = normalize_line([](double s) {
    const double a = 1.0 - s * s;
    return a * a;
  });
  const double half_log_2pi = 0.5 * kLog2Pi;
  log_norm_const_ = marginal.log_z + half_log_2pi;
  // marginal.entropy = -log Z1 - E[(1-q1^2)^2]
  reference_entropy_ = marginal.entropy - half_log_2pi - 0.5;
}

double Ng3Potential::energy_impl(const Vector& q) const {
  const double a = 1.0 - q[0] * q[0];
  const double b = q[1] - q[0];
  return a * a + 0.5 * b * b;
}

void Ng3Potential::force_impl(const Vector& q, Vector& out) const {
  const double a = 1.0 - q[0] * q[0];
  const double b = q[1] - q[0];
  out[0] = 4.0 * q[0] * a + b;
  out[1] = -b;
}

DoubleWellPotential::DoubleWellPotential() : Potential(1, TargetKind::DoubleWell1D, "dw1d") {
  const auto norm = normalize_line([](double s) {
    const double a = 1.0 - s * s;
    return 0.5 * a * a;
  });
  log_norm_const_ = norm.log_z;
  reference_entropy_ = norm.entropy;
}

double DoubleWellPotential::energy_impl(const Vector& x) const {
  const double a = 1.0 - x[0] * x[0];
  return 0.5 * a * a;
}

void DoubleWellPotential::force_impl(const Vector& x, Vector& out) const {
  out[0] = 2.0 * x[0] * (1.0 - x[0] * x[0]);
}

std::shared_ptr<const Potential> make_potential(const TargetId& id, const PotentialOptions& opts) {
  switch (id.kind) {
    case TargetKind::Gauss: return std::make_shared<GaussianPotential>(id.dim);
    case TargetKind::Ng1: return std::make_shared<Ng1Potential>();
    case TargetKind::Ng2: return std::make_shared<Ng2Potential>(opts.ng2_raw_power);
    case TargetKind::Ng3: return std::make_shared<Ng3Potential>();
    case TargetKind::Oscillator1D:
      return std::make_shared<GaussianPotential>(1, TargetKind::Oscillator1D);
    case TargetKind::DoubleWell1D: return std::make_shared<DoubleWellPotential>();
    case TargetKind::Free: return std::make_shared<FreePotential>(id.dim);
    case TargetKind::Logistic:
      throw UnsupportedError("logistic targets are built from a fitted dataset");
  }
  throw UsageError("unknown target kind");
}

}  // namespace rrkn
