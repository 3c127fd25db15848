#include "motscore/densities.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace motscore {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

// Cholesky with a scale-aware pivot check: any pivot below
// 1e-12 x max-diagonal rejects the matrix.
bool cholesky_lower(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower) {
  const int n = static_cast<int>(a.rows());
  const double pivot_floor = 1e-12 * a.diagonal().maxCoeff();
  lower = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double pivot = a(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(pivot >= pivot_floor) || !std::isfinite(pivot)) return false;
    lower(j, j) = std::sqrt(pivot);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j));
      lower(i, j) = s / lower(j, j);
    }
  }
  return true;
}

void require_finite_matrix(const Eigen::MatrixXd& m, const std::string& label) {
  if (!m.allFinite()) {
    throw ValidationError(label + ": matrix entries must be finite");
  }
}

}  // namespace

namespace detail {

void require_finite(const StateVector& v, const std::string& label) {
  if (!v.allFinite()) {
    throw ValidationError(label + ": vector entries must be finite");
  }
}

void require_finite(double v, const std::string& label) {
  if (!std::isfinite(v)) {
    throw ValidationError(label + ": value must be finite");
  }
}

}  // namespace detail

// --- GaussianComponent ---

GaussianComponent::GaussianComponent(double weight, StateVector mean,
                                     Eigen::MatrixXd covariance, const std::string& label)
    : weight_(weight), mean_(std::move(mean)), covariance_(std::move(covariance)) {
  detail::require_finite(weight_, label + ".weight");
  if (weight_ < 0.0) {
    throw ValidationError(label + ".weight: must be nonnegative, got " + std::to_string(weight_));
  }
  if (mean_.size() < 1) {
    throw ValidationError(label + ".mean: dimension must be at least 1");
  }
  detail::require_finite(mean_, label + ".mean");
  require_finite_matrix(covariance_, label + ".covariance");
  if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size()) {
    throw ValidationError(label + ".covariance: shape does not match mean dimension");
  }
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  for (int i = 0; i < covariance_.rows(); ++i) {
    for (int j = i + 1; j < covariance_.cols(); ++j) {
      if (std::abs(covariance_(i, j) - covariance_(j, i)) > 1e-9 * scale) {
        throw ValidationError(label + ".covariance: not symmetric");
      }
    }
  }
  if (!cholesky_lower(covariance_, chol_lower_)) {
    throw ValidationError(label + ".covariance: not positive definite");
  }
  log_det_ = 2.0 * chol_lower_.diagonal().array().log().sum();
}

double GaussianComponent::log_density(const StateVector& x) const {
  if (x.size() != mean_.size()) {
    throw ValidationError("log_gaussian_pdf: point dimension " + std::to_string(x.size()) +
                          " does not match component dimension " + std::to_string(mean_.size()));
  }
  const StateVector z =
      chol_lower_.triangularView<Eigen::Lower>().solve(x - mean_);
  return -0.5 * (dim() * kLogTwoPi + log_det_ + z.squaredNorm());
}

double log_gaussian_pdf(const StateVector& x, const GaussianComponent& component) {
  return component.log_density(x);
}

// --- GaussianMixture ---

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components,
                                 const std::string& label)
    : components_(std::move(components)) {
  for (std::size_t i = 1; i < components_.size(); ++i) {
    if (components_[i].dim() != components_[0].dim()) {
      throw ValidationError(label + ".components[" + std::to_string(i) +
                            "]: dimension differs from components[0]");
    }
  }
}

std::optional<int> GaussianMixture::dim() const {
  if (components_.empty()) return std::nullopt;
  return components_[0].dim();
}

double GaussianMixture::total_weight() const {
  double sum = 0.0;
  for (const auto& c : components_) sum += c.weight();
  return sum;
}

bool GaussianMixture::is_normalized(double tol) const {
  return std::abs(total_weight() - 1.0) <= tol;
}

double GaussianMixture::log_density(const StateVector& x) const {
  std::vector<double> terms;
  terms.reserve(components_.size());
  for (const auto& c : components_) {
    if (c.weight() == 0.0) continue;
    terms.push_back(std::log(c.weight()) + c.log_density(x));
  }
  return log_sum_exp(terms);
}

StateVector GaussianMixture::mean() const {
  const double total = total_weight();
  if (components_.empty() || total <= 0.0) {
    throw ValidationError("mixture mean: zero total weight");
  }
  StateVector m = StateVector::Zero(components_[0].dim());
  for (const auto& c : components_) m += (c.weight() / total) * c.mean();
  return m;
}

double log_mixture_density(const StateVector& x, const GaussianMixture& mixture) {
  return mixture.log_density(x);
}

// --- Box / UniformIntensity / Intensity ---

Box::Box(StateVector lo_in, StateVector hi_in, const std::string& label)
    : lo(std::move(lo_in)), hi(std::move(hi_in)) {
  detail::require_finite(lo, label + ".lo");
  detail::require_finite(hi, label + ".hi");
  if (lo.size() != hi.size() || lo.size() < 1) {
    throw ValidationError(label + ": lo/hi dimensions must match and be at least 1");
  }
  for (int i = 0; i < lo.size(); ++i) {
    if (!(lo(i) < hi(i))) {
      throw ValidationError(label + ": lo must be strictly below hi in every axis");
    }
  }
}

double Box::volume() const { return (hi - lo).prod(); }

bool Box::contains(const StateVector& x) const {
  if (x.size() != lo.size()) return false;
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

UniformIntensity::UniformIntensity(double total_mass_in, Box region_in,
                                   const std::string& label)
    : total_mass(total_mass_in), region(std::move(region_in)) {
  detail::require_finite(total_mass, label + ".totalMass");
  if (total_mass < 0.0) {
    throw ValidationError(label + ".totalMass: must be nonnegative");
  }
}

double UniformIntensity::log_density(const StateVector& x) const {
  if (!region.contains(x)) return log_zero;
  if (total_mass == 0.0) return log_zero;
  return std::log(total_mass) - std::log(region.volume());
}

std::optional<int> Intensity::dim() const {
  if (const auto* u = as_uniform()) return u->region.dim();
  return as_mixture()->dim();
}

double Intensity::total_mass() const {
  if (const auto* u = as_uniform()) return u->total_mass;
  return as_mixture()->total_weight();
}

double Intensity::log_density(const StateVector& x) const {
  if (const auto* u = as_uniform()) return u->log_density(x);
  return as_mixture()->log_density(x);
}

double log_intensity(const StateVector& x, const Intensity& intensity) {
  return intensity.log_density(x);
}

double intensity_total_mass(const Intensity& intensity) { return intensity.total_mass(); }

// --- Bernoulli / MultiBernoulli ---

Bernoulli::Bernoulli(double existence_probability, GaussianMixture state_density,
                     const std::string& label)
    : r_(existence_probability), state_density_(std::move(state_density)) {
  detail::require_finite(r_, label + ".r");
  if (r_ < 0.0 || r_ > 1.0) {
    throw ValidationError(label + ".r: must lie in [0, 1], got " + std::to_string(r_));
  }
  if (state_density_.empty() || !state_density_.is_normalized()) {
    throw ValidationError(label + ".stateDensity: weights must sum to 1");
  }
}

MultiBernoulli::MultiBernoulli(double weight, std::vector<Bernoulli> bernoullis,
                               const std::string& label)
    : weight_(weight), bernoullis_(std::move(bernoullis)) {
  detail::require_finite(weight_, label + ".weight");
  if (!(weight_ > 0.0) || weight_ > 1.0) {
    throw ValidationError(label + ".weight: must lie in (0, 1]");
  }
  for (std::size_t i = 1; i < bernoullis_.size(); ++i) {
    if (bernoullis_[i].dim() != bernoullis_[0].dim()) {
      throw ValidationError(label + ".bernoullis[" + std::to_string(i) +
                            "]: dimension differs from bernoullis[0]");
    }
  }
}

double log_bernoulli_set_density(const Bernoulli& b, const std::optional<StateVector>& arg) {
  if (!arg.has_value()) {
    return b.r() == 1.0 ? log_zero : std::log1p(-b.r());
  }
  if (b.r() == 0.0) return log_zero;
  return std::log(b.r()) + b.state_density().log_density(*arg);
}

// --- CardinalityDistribution ---

CardinalityDistribution CardinalityDistribution::poisson(double rate, const std::string& label) {
  detail::require_finite(rate, label + ".rate");
  if (rate < 0.0) {
    throw ValidationError(label + ".rate: must be nonnegative");
  }
  return CardinalityDistribution{Poisson{rate}};
}

CardinalityDistribution CardinalityDistribution::explicit_pmf(std::vector<double> pmf,
                                                              const std::string& label) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    detail::require_finite(pmf[i], label + ".pmf[" + std::to_string(i) + "]");
    if (pmf[i] < 0.0) {
      throw ValidationError(label + ".pmf[" + std::to_string(i) + "]: must be nonnegative");
    }
    sum += pmf[i];
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw ValidationError(label + ".pmf: entries must sum to 1, got " + std::to_string(sum));
  }
  return CardinalityDistribution{Explicit{std::move(pmf)}};
}

double CardinalityDistribution::log_pmf(std::size_t n) const {
  if (const auto* p = std::get_if<Poisson>(&value_)) {
    if (p->rate == 0.0) return n == 0 ? 0.0 : log_zero;
    const double dn = static_cast<double>(n);
    return dn * std::log(p->rate) - p->rate - std::lgamma(dn + 1.0);
  }
  const auto& pmf = std::get<Explicit>(value_).pmf;
  if (n >= pmf.size() || pmf[n] == 0.0) return log_zero;
  return std::log(pmf[n]);
}

// --- Cphd / Pmbm ---

Cphd::Cphd(CardinalityDistribution cardinality, GaussianMixture state_density,
           const std::string& label)
    : cardinality_(std::move(cardinality)), state_density_(std::move(state_density)) {
  if (state_density_.empty() || !state_density_.is_normalized()) {
    throw ValidationError(label + ".stateDensity: weights must sum to 1");
  }
}

Pmbm::Pmbm(Intensity intensity, std::vector<MultiBernoulli> hypotheses, const std::string& label)
    : intensity_(std::move(intensity)), hypotheses_(std::move(hypotheses)) {
  if (hypotheses_.empty()) {
    throw ValidationError(label + ".hypotheses: must be nonempty");
  }
  double weight_sum = 0.0;
  for (const auto& h : hypotheses_) weight_sum += h.weight();
  if (std::abs(weight_sum - 1.0) > kWeightSumTol) {
    throw ValidationError(label + ".hypotheses: weights must sum to 1, got " +
                          std::to_string(weight_sum));
  }

  std::optional<int> d = dim();
  for (const auto& h : hypotheses_) {
    if (!h.bernoullis().empty() && h.bernoullis()[0].dim() != *d) {
      throw ValidationError(label + ".hypotheses: state dimensions are inconsistent");
    }
  }
  if (const auto id = intensity_.dim(); id.has_value() && d.has_value() && *id != *d) {
    throw ValidationError(label + ".intensity: dimension differs from Bernoulli states");
  }

  // Pad every hypothesis to the common Bernoulli count with r = 0
  // placeholders; their state density is never evaluated.
  std::size_t m = 0;
  for (const auto& h : hypotheses_) m = std::max(m, h.size());
  if (m > 0) {
    const int pad_dim = d.value();
    const GaussianMixture placeholder{
        {GaussianComponent(1.0, StateVector::Zero(pad_dim),
                           Eigen::MatrixXd::Identity(pad_dim, pad_dim))}};
    for (auto& h : hypotheses_) {
      if (h.size() == m) continue;
      std::vector<Bernoulli> padded = h.bernoullis();
      while (padded.size() < m) padded.emplace_back(0.0, placeholder);
      h = MultiBernoulli(h.weight(), std::move(padded));
    }
  }
}

std::size_t Pmbm::bernoulli_count() const {
  return hypotheses_.empty() ? 0 : hypotheses_[0].size();
}

std::optional<int> Pmbm::dim() const {
  for (const auto& h : hypotheses_) {
    if (!h.bernoullis().empty()) return h.bernoullis()[0].dim();
  }
  return intensity_.dim();
}

bool Pmbm::is_mbm01() const {
  if (!is_mbm()) return false;
  for (const auto& h : hypotheses_) {
    for (const auto& b : h.bernoullis()) {
      if (b.r() != 0.0 && b.r() != 1.0) return false;
    }
  }
  return true;
}

std::optional<int> posterior_dim(const PosteriorDensity& posterior) {
  if (const auto* c = std::get_if<Cphd>(&posterior)) return c->dim();
  return std::get<Pmbm>(posterior).dim();
}

}  // namespace motscore
