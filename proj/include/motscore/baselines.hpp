#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "motscore/densities.hpp"
#include "motscore/scoring.hpp"

namespace motscore {

// Hard estimates extracted from a tracker posterior.
class EstimateSet {
 public:
  EstimateSet() = default;
  explicit EstimateSet(std::vector<StateVector> elements,
                       const std::string& label = "estimates");

  const std::vector<StateVector>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  std::optional<int> dim() const;

 private:
  std::vector<StateVector> elements_;
};

// GOSPA fixed to order p = 1, alpha = 2 with the Euclidean base metric.
// Only the cutoff c is configurable.
struct GospaConfig {
  double cutoff;
  static constexpr int order = 1;
  static constexpr int alpha = 2;

  explicit GospaConfig(double cutoff_in);
};

struct GospaResult {
  double total = 0.0;
  double localization = 0.0;
  double missed_penalty = 0.0;  // (c/2) * |M(gamma)|
  double false_penalty = 0.0;   // (c/2) * |F(gamma)|
  std::vector<std::pair<std::size_t, std::size_t>> matching;  // (estimate, ground truth)
};

struct ClearMotResult {
  double mota = 0.0;
  std::optional<double> motp;  // undefined when no matches
  std::size_t matches = 0;
  std::size_t misses = 0;
  std::size_t false_positives = 0;
};

// min_gamma sum D(x_i, y_j) + (c/2)(|X| + |Y| - 2|gamma|). Pairs at D >= c
// are never matched (ties at exactly c resolve as unmatched).
GospaResult gospa(const EstimateSet& x, const GroundTruthSet& y, const GospaConfig& cfg);

// Single-scene CLEAR MOT: optimal matching under the cutoff (maximum matches,
// then minimum total distance). MOTA = 1 - (misses + false positives)/|Y|;
// MOTP = mean matched Euclidean distance. Empty ground truth is an error.
ClearMotResult clear_mot(const EstimateSet& x, const GroundTruthSet& y, double cutoff);

// Means of the Bernoulli state densities with r >= threshold, taken from the
// highest-weight hypothesis. CPHD posteriors are unsupported.
EstimateSet extract_estimates(const PosteriorDensity& posterior, double existence_threshold);

// Normalizer of the exponential kernel exp(-|x|) over R^d: the unit-sphere
// surface area times the radial integral, the latter by adaptive quadrature
// (tolerance 1e-10), cached per dimension. Equals 2*pi for d = 2.
double exp_kernel_normalizer(int dim);

// PMB construction satisfying the NLL<->GOSPA equivalence assumptions:
// uniform intensity lambda_bar/V <= 1 over a box, shared existence
// probability rho, exponential state kernels exp(-D(x_i, x))/k, and
// log(1 - rho) = log(lambda_bar/V) = -c/2.
class Theorem1Construction {
 public:
  Theorem1Construction(double rho, UniformIntensity intensity,
                       std::vector<StateVector> kernel_centers, double cutoff,
                       std::optional<double> normalizer = std::nullopt);

  // Derives lambda_bar = (1 - rho) * volume and c = -2 log(1 - rho) so the
  // coupling constraint holds by construction.
  static Theorem1Construction from_rho(double rho, Box region,
                                       std::vector<StateVector> kernel_centers);

  double rho() const { return rho_; }
  double cutoff() const { return cutoff_; }
  double normalizer() const { return normalizer_; }
  const UniformIntensity& intensity() const { return intensity_; }
  const std::vector<StateVector>& kernel_centers() const { return kernel_centers_; }
  int dim() const { return intensity_.region.dim(); }

 private:
  double rho_;
  double cutoff_;
  double normalizer_;
  UniformIntensity intensity_;
  std::vector<StateVector> kernel_centers_;
};

// Exact best-assignment NLL evaluator for the construction. The exponential
// kernels are not Gaussian, so this lives outside the Pmbm type; costs come
// from the construction's closed forms and the optimum from solve_optimal.
// Kernel mass outside the field of view is not truncated.
class Theorem1Evaluator {
 public:
  explicit Theorem1Evaluator(Theorem1Construction construction);

  const Theorem1Construction& construction() const { return construction_; }

  double nll(const GroundTruthSet& y) const;

  // Same evaluation with per-center existence probabilities (negative
  // control for assumption (ii)); values must lie in (0, 1).
  double nll_with_existence(const GroundTruthSet& y,
                            std::span<const double> existence) const;

 private:
  Theorem1Construction construction_;
};

inline Theorem1Evaluator build_theorem1_pmb(Theorem1Construction construction) {
  return Theorem1Evaluator(std::move(construction));
}

struct Theorem1Check {
  double lhs = 0.0;         // NLL from the construction's evaluator
  double rhs = 0.0;         // V(1-rho) + min_gamma sum(D + log(k/rho)) + (c/2)(...)
  double gospa_part = 0.0;  // min_gamma sum D + (c/2)(...), i.e. GOSPA_c(X, Y)
};

// Evaluates both sides of the equivalence; the right side minimizes over all
// assignment sets by brute-force enumeration (|X|, |Y| <= 6), independent of
// the Hungarian path used by the left side. Every y must lie inside the
// field of view.
Theorem1Check verify_theorem1(const Theorem1Construction& t, const GroundTruthSet& y);

}  // namespace motscore
