#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "motscore/densities.hpp"

namespace motscore::testing {

inline StateVector vec2(double x, double y) {
  StateVector v(2);
  v << x, y;
  return v;
}

inline Eigen::MatrixXd iso_cov(int dim, double variance) {
  return Eigen::MatrixXd::Identity(dim, dim) * variance;
}

inline GaussianMixture single_gaussian(const StateVector& mean, double variance) {
  return GaussianMixture{
      {GaussianComponent(1.0, mean, iso_cov(static_cast<int>(mean.size()), variance))}};
}

// Deterministic uniforms decoupled from std:: distribution implementations.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace motscore::testing
