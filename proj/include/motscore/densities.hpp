#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "motscore/errors.hpp"
#include "motscore/logdomain.hpp"

namespace motscore {

using StateVector = Eigen::VectorXd;

// Weight tolerance for probability-normalized mixtures, cardinality pmfs and
// hypothesis weights.
inline constexpr double kWeightSumTol = 1e-9;

// Weighted Gaussian kernel. The covariance must be symmetric positive
// definite; the Cholesky factor is computed once at construction and reused
// for every density evaluation. A pivot below 1e-12 x the largest diagonal
// entry rejects the matrix.
class GaussianComponent {
 public:
  GaussianComponent(double weight, StateVector mean, Eigen::MatrixXd covariance,
                    const std::string& label = "component");

  double weight() const { return weight_; }
  const StateVector& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  // log N(x; mean, covariance), weight excluded. Always finite.
  double log_density(const StateVector& x) const;

 private:
  double weight_;
  StateVector mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_lower_;  // L with L L^T = covariance
  double log_det_;              // log |covariance|
};

// Ordered list of Gaussian components. Serves both as a probability density
// (weights sum to 1) and as a PPP intensity (weights are unconstrained
// nonnegative mass); callers that need normalization check is_normalized().
class GaussianMixture {
 public:
  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<GaussianComponent> components,
                           const std::string& label = "mixture");

  const std::vector<GaussianComponent>& components() const { return components_; }
  bool empty() const { return components_.empty(); }
  std::size_t size() const { return components_.size(); }
  std::optional<int> dim() const;
  double total_weight() const;
  bool is_normalized(double tol = kWeightSumTol) const;

  // log sum_i w_i N(x; mu_i, Sigma_i) via log-sum-exp; log-zero iff the total
  // weight is zero.
  double log_density(const StateVector& x) const;

  // Weight-averaged component mean (weights renormalized). Requires nonzero
  // total weight.
  StateVector mean() const;

 private:
  std::vector<GaussianComponent> components_;
};

// Axis-aligned box with positive volume.
struct Box {
  StateVector lo;
  StateVector hi;

  Box(StateVector lo_in, StateVector hi_in, const std::string& label = "region");
  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(const StateVector& x) const;
};

// Constant intensity lambda_bar / V over a box region, zero elsewhere.
struct UniformIntensity {
  double total_mass;  // lambda_bar
  Box region;

  UniformIntensity(double total_mass_in, Box region_in,
                   const std::string& label = "intensity");
  double log_density(const StateVector& x) const;
};

// PPP intensity function lambda(.): Gaussian mixture or uniform over a box.
class Intensity {
 public:
  Intensity() : value_(GaussianMixture{}) {}  // zero intensity
  Intensity(GaussianMixture mixture) : value_(std::move(mixture)) {}
  Intensity(UniformIntensity uniform) : value_(std::move(uniform)) {}

  static Intensity zero() { return Intensity{}; }

  bool is_uniform() const { return std::holds_alternative<UniformIntensity>(value_); }
  const GaussianMixture* as_mixture() const { return std::get_if<GaussianMixture>(&value_); }
  const UniformIntensity* as_uniform() const { return std::get_if<UniformIntensity>(&value_); }

  std::optional<int> dim() const;
  double total_mass() const;
  double log_density(const StateVector& x) const;

 private:
  std::variant<GaussianMixture, UniformIntensity> value_;
};

// Bernoulli RFS component: empty with probability 1-r, singleton with state
// density p(.) with probability r.
class Bernoulli {
 public:
  Bernoulli(double existence_probability, GaussianMixture state_density,
            const std::string& label = "bernoulli");

  double r() const { return r_; }
  const GaussianMixture& state_density() const { return state_density_; }
  int dim() const { return *state_density_.dim(); }

 private:
  double r_;
  GaussianMixture state_density_;
};

// One MB hypothesis of an MBM: a weight and an ordered list of Bernoullis.
class MultiBernoulli {
 public:
  MultiBernoulli(double weight, std::vector<Bernoulli> bernoullis,
                 const std::string& label = "hypothesis");

  double weight() const { return weight_; }
  const std::vector<Bernoulli>& bernoullis() const { return bernoullis_; }
  std::size_t size() const { return bernoullis_.size(); }

 private:
  double weight_;
  std::vector<Bernoulli> bernoullis_;
};

// Cardinality distribution p(|X|): Poisson or an explicit pmf over 0..N_max.
// Explicit entries beyond N_max evaluate to log-zero.
class CardinalityDistribution {
 public:
  static CardinalityDistribution poisson(double rate, const std::string& label = "cardinality");
  static CardinalityDistribution explicit_pmf(std::vector<double> pmf,
                                              const std::string& label = "cardinality");

  bool is_poisson() const { return std::holds_alternative<Poisson>(value_); }
  double poisson_rate() const { return std::get<Poisson>(value_).rate; }
  const std::vector<double>& pmf() const { return std::get<Explicit>(value_).pmf; }

  double log_pmf(std::size_t n) const;

 private:
  struct Poisson {
    double rate;
  };
  struct Explicit {
    std::vector<double> pmf;
  };
  explicit CardinalityDistribution(std::variant<Poisson, Explicit> v) : value_(std::move(v)) {}
  std::variant<Poisson, Explicit> value_;
};

// CPHD posterior: cardinality distribution plus iid single-object density.
class Cphd {
 public:
  Cphd(CardinalityDistribution cardinality, GaussianMixture state_density,
       const std::string& label = "cphd");

  const CardinalityDistribution& cardinality() const { return cardinality_; }
  const GaussianMixture& state_density() const { return state_density_; }
  int dim() const { return *state_density_.dim(); }

 private:
  CardinalityDistribution cardinality_;
  GaussianMixture state_density_;
};

// PMBM posterior: PPP intensity plus a mixture of MB hypotheses. Hypotheses
// are padded to a common Bernoulli count with r = 0 placeholders whose state
// density is never evaluated (an r = 0 Bernoulli is forbidden as an
// assignment target and contributes log(1 - 0) = 0 when unassigned).
class Pmbm {
 public:
  Pmbm(Intensity intensity, std::vector<MultiBernoulli> hypotheses,
       const std::string& label = "pmbm");

  const Intensity& intensity() const { return intensity_; }
  const std::vector<MultiBernoulli>& hypotheses() const { return hypotheses_; }
  std::size_t hypothesis_count() const { return hypotheses_.size(); }
  std::size_t bernoulli_count() const;  // common m after padding
  std::optional<int> dim() const;

  // Restricted-family views.
  bool is_pmb() const { return hypotheses_.size() == 1; }
  bool is_mbm() const { return intensity_.total_mass() == 0.0; }
  bool is_mbm01() const;
  bool is_bernoulli_set() const { return is_pmb() && is_mbm(); }

 private:
  Intensity intensity_;
  std::vector<MultiBernoulli> hypotheses_;
};

// The f_M scored by the NLL measure.
using PosteriorDensity = std::variant<Cphd, Pmbm>;

std::optional<int> posterior_dim(const PosteriorDensity& posterior);

// --- density evaluation operations ---

// log N(x; component). Dimension mismatch is a ValidationError.
double log_gaussian_pdf(const StateVector& x, const GaussianComponent& component);

// log-sum-exp mixture evaluation; log-zero iff total weight is zero.
double log_mixture_density(const StateVector& x, const GaussianMixture& mixture);

// log lambda(x); log-zero outside a uniform region or for zero mass.
double log_intensity(const StateVector& x, const Intensity& intensity);

// Integral of lambda: sum of mixture weights, or lambda_bar for uniform.
double intensity_total_mass(const Intensity& intensity);

// Bernoulli RFS set density: empty -> log(1 - r), singleton {x} ->
// log r + log p(x). Multi-element arguments are excluded by the signature.
double log_bernoulli_set_density(const Bernoulli& b, const std::optional<StateVector>& arg);

namespace detail {
// Throws ValidationError when v contains NaN/inf entries.
void require_finite(const StateVector& v, const std::string& label);
void require_finite(double v, const std::string& label);
}  // namespace detail

}  // namespace motscore
