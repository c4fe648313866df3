#pragma once

#include <cmath>
#include <vector>

#include "rrkn/types.hpp"

namespace rrkn::test {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline PhaseState state(std::initializer_list<double> x, std::initializer_list<double> v) {
  return {vec(x), vec(v)};
}

// Sample mean and its standard error.
struct Moment {
  double mean = 0.0;
  double se = 0.0;
};

inline Moment moment(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double m = 0.0;
  for (double x : xs) m += x;
  m /= n;
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  s2 /= (n - 1.0);
  return {m, std::sqrt(s2 / n)};
}

inline bool within_se(const Moment& m, double target, double k = 5.0) {
  return std::abs(m.mean - target) <= k * m.se;
}

}  // namespace rrkn::test
