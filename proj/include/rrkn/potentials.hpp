#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "rrkn/types.hpp"

namespace rrkn {

enum class TargetKind { Gauss, Ng1, Ng2, Ng3, Oscillator1D, DoubleWell1D, Logistic, Free };

/// Target selector as written on the command line: "gauss:10", "ng1", "ng2",
/// "ng3", "osc1d", "dw1d", "logistic:<path>".
struct TargetId {
  TargetKind kind = TargetKind::Gauss;
  std::size_t dim = 1;  // meaningful for Gauss only
  std::string path;     // meaningful for Logistic only

  static TargetId parse(std::string_view text);
  std::string str() const;
};

/// Force closure: writes F(x) = -grad U(x) into `out` (already sized).
using ForceField = std::function<void(const Vector& x, Vector& out)>;

/// Potential energy U of a target pi ∝ exp(-U), with its force and, where
/// tractable, the normalizing constant and E_pi[log pi].
///
/// Implementations are immutable after construction and may be shared by
/// concurrently running chains.
class Potential {
 public:
  virtual ~Potential() = default;

  std::size_t dim() const { return dim_; }
  TargetKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double energy(const Vector& x) const;
  Vector force(const Vector& x) const;
  void force(const Vector& x, Vector& out) const;
  ForceField force_field() const;

  /// log pi(x) = -U(x) - log Z. Throws UnsupportedError when log Z is unknown.
  double log_density(const Vector& x) const;
  /// E_pi[log pi(X)]. Throws UnsupportedError for targets without a reference.
  double reference_entropy() const;

  std::optional<double> grad_lipschitz() const { return grad_lipschitz_; }
  std::optional<double> hessian_lipschitz() const { return hessian_lipschitz_; }
  std::optional<double> log_norm_const() const { return log_norm_const_; }

  /// Closed-form Hamiltonian flow phi_t, available for quadratic potentials.
  virtual bool has_exact_flow() const { return false; }
  virtual PhaseState exact_flow(double t, const PhaseState& s) const;

 protected:
  Potential(std::size_t dim, TargetKind kind, std::string name);

  virtual double energy_impl(const Vector& x) const = 0;
  virtual void force_impl(const Vector& x, Vector& out) const = 0;

  void check_dim(const Vector& x) const;

  std::optional<double> grad_lipschitz_;
  std::optional<double> hessian_lipschitz_;
  std::optional<double> log_norm_const_;
  std::optional<double> reference_entropy_;

 private:
  std::size_t dim_;
  TargetKind kind_;
  std::string name_;
};

/// Standard Gaussian, U(x) = |x|^2/2. "osc1d" is the d = 1 instance.
class GaussianPotential final : public Potential {
 public:
  explicit GaussianPotential(std::size_t dim, TargetKind kind = TargetKind::Gauss);

  bool has_exact_flow() const override { return true; }
  PhaseState exact_flow(double t, const PhaseState& s) const override;

 protected:
  double energy_impl(const Vector& x) const override;
  void force_impl(const Vector& x, Vector& out) const override;
};

/// U = 0. Free flight; used to test integrators and kernels.
class FreePotential final : public Potential {
 public:
  explicit FreePotential(std::size_t dim);

  bool has_exact_flow() const override { return true; }
  PhaseState exact_flow(double t, const PhaseState& s) const override;

 protected:
  double energy_impl(const Vector&) const override { return 0.0; }
  void force_impl(const Vector&, Vector& out) const override { out.setZero(); }
};

/// q1 ~ N(0,1), q2 | q1 ~ N(q1^2/4, 1).
class Ng1Potential final : public Potential {
 public:
  Ng1Potential();

 protected:
  double energy_impl(const Vector& x) const override;
  void force_impl(const Vector& x, Vector& out) const override;
};

/// Bivariate t_8 with zero mean and unit scale: U = 5 log(1 + |q|^2/8).
/// With `raw_power` the literal U = (1 + |q|^2/8)^5 is used instead.
class Ng2Potential final : public Potential {
 public:
  explicit Ng2Potential(bool raw_power = false);
  bool raw_power() const { return raw_power_; }

 protected:
  double energy_impl(const Vector& x) const override;
  void force_impl(const Vector& x, Vector& out) const override;

 private:
  bool raw_power_;
};

/// Bimodal U = (1 - q1^2)^2 + (q2 - q1)^2/2.
class Ng3Potential final : public Potential {
 public:
  Ng3Potential();

 protected:
  double energy_impl(const Vector& x) const override;
  void force_impl(const Vector& x, Vector& out) const override;
};

/// U = (1 - x^2)^2 / 2.
class DoubleWellPotential final : public Potential {
 public:
  DoubleWellPotential();

 protected:
  double energy_impl(const Vector& x) const override;
  void force_impl(const Vector& x, Vector& out) const override;
};

struct PotentialOptions {
  bool ng2_raw_power = false;
};

/// Builds a zoo target. Logistic targets need a dataset fit and are built by
/// the bayes module; asking for one here throws UnsupportedError.
std::shared_ptr<const Potential> make_potential(const TargetId& id,
                                                const PotentialOptions& opts = {});

}  // namespace rrkn
