#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rrkn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Position/velocity pair on phase space R^d x R^d.
struct PhaseState {
  Vector x;
  Vector v;

  std::size_t dim() const { return static_cast<std::size_t>(x.size()); }
  bool finite() const { return x.allFinite() && v.allFinite(); }
};

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Integration or chain failure; carries the step (or transition) index.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long long step() const { return step_; }

 private:
  long long step_;
};

}  // namespace rrkn
