#include "motscore/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "motscore/assignment.hpp"

namespace motscore {

namespace {

double euclidean(const StateVector& a, const StateVector& b) { return (a - b).norm(); }

void require_same_dim(const EstimateSet& x, const GroundTruthSet& y, const std::string& what) {
  if (x.dim() && y.dim() && *x.dim() != *y.dim()) {
    throw ValidationError(what + ": estimate dimension " + std::to_string(*x.dim()) +
                          " does not match ground-truth dimension " + std::to_string(*y.dim()));
  }
}

// Min-cost matching where pairs beyond (or at) the cutoff are Forbidden and
// every ground truth may fall through to a dedicated dummy row. `match_bonus`
// shifts each realized match by a constant, which is how the two users below
// select their optima: gospa uses c (so the objective becomes the GOSPA sum
// minus a constant), clear_mot uses a bonus large enough that the match count
// dominates.
std::vector<std::pair<std::size_t, std::size_t>> cutoff_matching(const EstimateSet& x,
                                                                 const GroundTruthSet& y,
                                                                 double cutoff,
                                                                 double match_bonus) {
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  CostMatrix costs(nx + ny, ny);
  for (std::size_t l = 0; l < ny; ++l) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double d = euclidean(x.elements()[i], y.elements()[l]);
      if (d < cutoff) costs.set(i, l, d - match_bonus);
    }
    costs.set(nx + l, l, 0.0);
  }
  const Assignment best = solve_optimal(costs);
  std::vector<std::pair<std::size_t, std::size_t>> matching;
  for (std::size_t l = 0; l < ny; ++l) {
    if (best.column_to_row[l] < nx) matching.emplace_back(best.column_to_row[l], l);
  }
  return matching;
}

// Adaptive Simpson quadrature.
double simpson(double (*f)(double, int), int d, double a, double b) {
  const double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a, d) + 4.0 * f(c, d) + f(b, d));
}

double adaptive_simpson(double (*f)(double, int), int d, double a, double b, double whole,
                        double tol, int depth) {
  const double c = 0.5 * (a + b);
  const double left = simpson(f, d, a, c);
  const double right = simpson(f, d, c, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, d, a, c, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, d, c, b, right, 0.5 * tol, depth - 1);
}

double radial_kernel(double r, int d) { return std::pow(r, d - 1) * std::exp(-r); }

}  // namespace

// --- EstimateSet ---

EstimateSet::EstimateSet(std::vector<StateVector> elements, const std::string& label)
    : elements_(std::move(elements)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    detail::require_finite(elements_[i], label + "[" + std::to_string(i) + "]");
    if (elements_[i].size() != elements_[0].size()) {
      throw ValidationError(label + "[" + std::to_string(i) +
                            "]: dimension differs from element 0");
    }
  }
}

std::optional<int> EstimateSet::dim() const {
  if (elements_.empty()) return std::nullopt;
  return static_cast<int>(elements_[0].size());
}

// --- GOSPA ---

GospaConfig::GospaConfig(double cutoff_in) : cutoff(cutoff_in) {
  detail::require_finite(cutoff, "gospa.cutoff");
  if (!(cutoff > 0.0)) throw ValidationError("gospa.cutoff: must be positive");
}

GospaResult gospa(const EstimateSet& x, const GroundTruthSet& y, const GospaConfig& cfg) {
  require_same_dim(x, y, "gospa");
  GospaResult result;
  result.matching = cutoff_matching(x, y, cfg.cutoff, cfg.cutoff);
  // Summing the matched distances in sorted order keeps the metric exactly
  // symmetric: gospa(x, y) and gospa(y, x) add the same values in the same
  // order.
  std::vector<double> distances;
  distances.reserve(result.matching.size());
  for (const auto& [i, l] : result.matching) {
    distances.push_back(euclidean(x.elements()[i], y.elements()[l]));
  }
  std::sort(distances.begin(), distances.end());
  for (const double d : distances) result.localization += d;
  result.missed_penalty = 0.5 * cfg.cutoff * static_cast<double>(y.size() - result.matching.size());
  result.false_penalty = 0.5 * cfg.cutoff * static_cast<double>(x.size() - result.matching.size());
  result.total = result.localization + (result.missed_penalty + result.false_penalty);
  return result;
}

// --- CLEAR MOT ---

ClearMotResult clear_mot(const EstimateSet& x, const GroundTruthSet& y, double cutoff) {
  require_same_dim(x, y, "clear_mot");
  detail::require_finite(cutoff, "clear_mot.cutoff");
  if (!(cutoff > 0.0)) throw ValidationError("clear_mot.cutoff: must be positive");
  if (y.size() == 0) {
    throw ValidationError("clear_mot: MOTA is undefined for an empty ground truth");
  }

  // Bonus beyond cutoff * (max matches + 1) makes the match count dominate;
  // total distance breaks ties among equal counts.
  const double bonus = cutoff * (static_cast<double>(std::min(x.size(), y.size())) + 1.0);
  const auto matching = cutoff_matching(x, y, cutoff, bonus);

  ClearMotResult result;
  result.matches = matching.size();
  result.misses = y.size() - result.matches;
  result.false_positives = x.size() - result.matches;
  result.mota = 1.0 - static_cast<double>(result.misses + result.false_positives) /
                          static_cast<double>(y.size());
  if (result.matches > 0) {
    double sum = 0.0;
    for (const auto& [i, l] : matching) sum += euclidean(x.elements()[i], y.elements()[l]);
    result.motp = sum / static_cast<double>(result.matches);
  }
  return result;
}

// --- estimate extraction ---

EstimateSet extract_estimates(const PosteriorDensity& posterior, double existence_threshold) {
  detail::require_finite(existence_threshold, "existenceThreshold");
  if (existence_threshold < 0.0 || existence_threshold > 1.0) {
    throw ValidationError("existenceThreshold: must lie in [0, 1]");
  }
  const auto* pmbm = std::get_if<Pmbm>(&posterior);
  if (pmbm == nullptr) {
    throw UnsupportedError("extract_estimates: only Bernoulli-based posteriors carry estimates");
  }
  std::size_t best = 0;
  for (std::size_t h = 1; h < pmbm->hypotheses().size(); ++h) {
    if (pmbm->hypotheses()[h].weight() > pmbm->hypotheses()[best].weight()) best = h;
  }
  std::vector<StateVector> means;
  for (const auto& b : pmbm->hypotheses()[best].bernoullis()) {
    if (b.r() >= existence_threshold) means.push_back(b.state_density().mean());
  }
  return EstimateSet(std::move(means));
}

// --- Theorem 1 ---

double exp_kernel_normalizer(int dim) {
  if (dim < 1) throw ValidationError("exp_kernel_normalizer: dimension must be at least 1");
  static std::map<int, double> cache;
  static std::mutex cache_mutex;
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (auto it = cache.find(dim); it != cache.end()) return it->second;

  // surface area of the unit (d-1)-sphere: 2 pi^{d/2} / Gamma(d/2)
  const double surface =
      2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
  // radial part: integral of r^{d-1} e^{-r}; the integrand is below 1e-16 of
  // its mass past r = 60 + 20 d for the dimensions in scope.
  const double upper = 60.0 + 20.0 * dim;
  const double radial = adaptive_simpson(radial_kernel, dim, 0.0, upper,
                                         simpson(radial_kernel, dim, 0.0, upper), 1e-12, 48);
  const double k = surface * radial;
  cache[dim] = k;
  return k;
}

Theorem1Construction::Theorem1Construction(double rho, UniformIntensity intensity,
                                           std::vector<StateVector> kernel_centers,
                                           double cutoff, std::optional<double> normalizer)
    : rho_(rho),
      cutoff_(cutoff),
      intensity_(std::move(intensity)),
      kernel_centers_(std::move(kernel_centers)) {
  detail::require_finite(rho_, "theorem1.rho");
  if (!(rho_ > 0.0 && rho_ < 1.0)) {
    throw ValidationError("theorem1.rho: must lie strictly inside (0, 1)");
  }
  detail::require_finite(cutoff_, "theorem1.cutoff");
  const double volume = intensity_.region.volume();
  const double density = intensity_.total_mass / volume;
  if (density > 1.0) {
    throw ValidationError("theorem1.intensity: lambda_bar / V must not exceed 1");
  }
  if (intensity_.total_mass <= 0.0) {
    throw ValidationError("theorem1.intensity: lambda_bar must be positive");
  }
  const double log_survive = std::log1p(-rho_);
  if (std::abs(log_survive - std::log(density)) > 1e-12 ||
      std::abs(log_survive + 0.5 * cutoff_) > 1e-12) {
    throw ValidationError(
        "theorem1: requires log(1 - rho) = log(lambda_bar / V) = -c/2 within 1e-12");
  }
  for (std::size_t i = 0; i < kernel_centers_.size(); ++i) {
    detail::require_finite(kernel_centers_[i], "theorem1.centers[" + std::to_string(i) + "]");
    if (kernel_centers_[i].size() != intensity_.region.lo.size()) {
      throw ValidationError("theorem1.centers[" + std::to_string(i) +
                            "]: dimension differs from the field of view");
    }
  }
  normalizer_ = normalizer.value_or(exp_kernel_normalizer(dim()));
  if (!(normalizer_ > 0.0) || !std::isfinite(normalizer_)) {
    throw ValidationError("theorem1.normalizer: must be positive and finite");
  }
}

Theorem1Construction Theorem1Construction::from_rho(double rho, Box region,
                                                    std::vector<StateVector> kernel_centers) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw ValidationError("theorem1.rho: must lie strictly inside (0, 1)");
  }
  const double volume = region.volume();
  const double mass = (1.0 - rho) * volume;
  const double cutoff = -2.0 * std::log1p(-rho);
  return Theorem1Construction(rho, UniformIntensity(mass, std::move(region)),
                              std::move(kernel_centers), cutoff);
}

Theorem1Evaluator::Theorem1Evaluator(Theorem1Construction construction)
    : construction_(std::move(construction)) {}

double Theorem1Evaluator::nll(const GroundTruthSet& y) const {
  const std::vector<double> shared(construction_.kernel_centers().size(), construction_.rho());
  return nll_with_existence(y, shared);
}

double Theorem1Evaluator::nll_with_existence(const GroundTruthSet& y,
                                             std::span<const double> existence) const {
  const auto& centers = construction_.kernel_centers();
  if (existence.size() != centers.size()) {
    throw ValidationError("theorem1: one existence probability per kernel center required");
  }
  if (y.dim() && *y.dim() != construction_.dim()) {
    throw ValidationError("theorem1: ground-truth dimension does not match the construction");
  }
  const double log_k = std::log(construction_.normalizer());
  const std::size_t m = centers.size();
  const std::size_t n = y.size();

  CostMatrix costs(m + n, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = existence[i];
    if (!(r > 0.0 && r < 1.0)) {
      throw ValidationError("theorem1: existence probabilities must lie in (0, 1)");
    }
    for (std::size_t l = 0; l < n; ++l) {
      const double d = euclidean(centers[i], y.elements()[l]);
      costs.set(i, l, d + log_k - std::log(r) + std::log1p(-r));
    }
  }
  for (std::size_t l = 0; l < n; ++l) {
    const double li = construction_.intensity().log_density(y.elements()[l]);
    if (!is_log_zero(li)) costs.set(m + l, l, -li);
  }

  double offset = construction_.intensity().total_mass;
  for (std::size_t i = 0; i < m; ++i) offset -= std::log1p(-existence[i]);

  try {
    return offset + solve_optimal(costs).total_cost;
  } catch (const InfeasibleError&) {
    return std::numeric_limits<double>::infinity();  // Y outside every explanation
  }
}

Theorem1Check verify_theorem1(const Theorem1Construction& t, const GroundTruthSet& y) {
  constexpr std::size_t kMaxBruteForce = 6;
  const auto& centers = t.kernel_centers();
  if (centers.size() > kMaxBruteForce || y.size() > kMaxBruteForce) {
    throw SizeLimitError("verify_theorem1 enumerates assignments for at most " +
                         std::to_string(kMaxBruteForce) + " points per set");
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!t.intensity().region.contains(y.elements()[j])) {
      throw ValidationError("verify_theorem1: groundTruth[" + std::to_string(j) +
                            "] lies outside the field of view");
    }
  }

  Theorem1Check check;
  check.lhs = Theorem1Evaluator(t).nll(y);

  // Right-hand side: brute-force min over all assignment sets gamma, matching
  // each ground truth to an unused center or leaving it unmatched. This path
  // shares no code with the Hungarian solver behind the left side.
  const double log_k_over_rho = std::log(t.normalizer() / t.rho());
  const double half_cutoff = 0.5 * t.cutoff();
  const std::size_t m = centers.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> used(m, 0);
  auto recurse = [&](auto&& self, std::size_t j, double match_sum, std::size_t match_count) -> void {
    if (j == y.size()) {
      const double value =
          match_sum + half_cutoff * static_cast<double>(m + y.size() - 2 * match_count);
      best = std::min(best, value);
      return;
    }
    self(self, j + 1, match_sum, match_count);  // y_j unmatched
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      const double d = euclidean(centers[i], y.elements()[j]);
      self(self, j + 1, match_sum + d + log_k_over_rho, match_count + 1);
      used[i] = 0;
    }
  };
  recurse(recurse, 0, 0.0, 0);
  check.rhs = t.intensity().region.volume() * (1.0 - t.rho()) + best;

  std::vector<StateVector> center_copy(centers.begin(), centers.end());
  check.gospa_part = gospa(EstimateSet(std::move(center_copy)), y, GospaConfig(t.cutoff())).total;
  return check;
}

}  // namespace motscore
