#include "motscore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "motscore/logdomain.hpp"

namespace motscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1e-300): stand-in for log(1 - r) at r = 1 in ranking costs.
const double kLogEpsilonExistence = std::log(1e-300);

void require_dim_match(const GroundTruthSet& gt, const std::optional<int>& posterior_dim,
                       const std::string& what) {
  const auto gd = gt.dim();
  if (gd && posterior_dim && *gd != *posterior_dim) {
    throw ValidationError(what + ": ground-truth dimension " + std::to_string(*gd) +
                          " does not match posterior dimension " +
                          std::to_string(*posterior_dim));
  }
}

double hypothesis_subtotal(const MultiBernoulli& hypothesis, const Intensity& intensity,
                           const GroundTruthSet& gt, const std::vector<Assignment>& assignments) {
  std::vector<double> terms;
  terms.reserve(assignments.size());
  for (const auto& a : assignments) {
    terms.push_back(log_assignment_term(hypothesis, intensity, gt, a));
  }
  return log_sum_exp(terms);
}

NllReport assemble_pmbm_report(const Pmbm& posterior, std::vector<double> subtotals,
                               NllMethod method, std::size_t q) {
  NllReport report;
  report.method = method;
  report.murty_q = method == NllMethod::MurtyApprox ? q : 0;
  for (std::size_t h = 0; h < subtotals.size(); ++h) {
    report.per_hypothesis.emplace_back(h, subtotals[h]);
  }
  const double log_likelihood = log_sum_exp(subtotals);
  report.total_nll = is_log_zero(log_likelihood)
                         ? kInf
                         : intensity_total_mass(posterior.intensity()) - log_likelihood;
  return report;
}

}  // namespace

// --- GroundTruthSet ---

GroundTruthSet::GroundTruthSet(std::vector<StateVector> elements, const std::string& label)
    : elements_(std::move(elements)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    detail::require_finite(elements_[i], label + "[" + std::to_string(i) + "]");
    if (elements_[i].size() != elements_[0].size()) {
      throw ValidationError(label + "[" + std::to_string(i) +
                            "]: dimension differs from element 0");
    }
  }
  for (std::size_t i = 0; i < elements_.size() && !has_duplicates_; ++i) {
    for (std::size_t j = i + 1; j < elements_.size(); ++j) {
      if (elements_[i] == elements_[j]) {
        has_duplicates_ = true;
        break;
      }
    }
  }
}

std::optional<int> GroundTruthSet::dim() const {
  if (elements_.empty()) return std::nullopt;
  return static_cast<int>(elements_[0].size());
}

// --- reports ---

double PmbDecomposition::total() const {
  return localization + false_detections + missed_objects;
}

// --- CPHD closed form ---

NllReport nll_cphd(const GroundTruthSet& gt, const Cphd& posterior) {
  require_dim_match(gt, posterior.dim(), "nll_cphd");
  const std::size_t n = gt.size();
  double log_likelihood = std::lgamma(static_cast<double>(n) + 1.0);
  log_likelihood += posterior.cardinality().log_pmf(n);
  for (const auto& y : gt.elements()) {
    log_likelihood += posterior.state_density().log_density(y);
  }
  NllReport report;
  report.method = NllMethod::CphdClosedForm;
  report.total_nll = is_log_zero(log_likelihood) ? kInf : -log_likelihood;
  return report;
}

// --- PMBM machinery ---

CostMatrix build_cost_matrix(const GroundTruthSet& gt, const MultiBernoulli& hypothesis,
                             const Intensity& intensity) {
  const std::size_t m = hypothesis.size();
  const std::size_t n = gt.size();
  CostMatrix costs(m + n, n);
  for (std::size_t k = 0; k < m; ++k) {
    const Bernoulli& b = hypothesis.bernoullis()[k];
    if (b.r() == 0.0) continue;  // row stays Forbidden
    const double log_norm = b.r() == 1.0 ? kLogEpsilonExistence : std::log1p(-b.r());
    for (std::size_t l = 0; l < n; ++l) {
      const double lp = b.state_density().log_density(gt.elements()[l]);
      if (is_log_zero(lp)) continue;
      costs.set(k, l, -(std::log(b.r()) + lp) + log_norm);
    }
  }
  for (std::size_t l = 0; l < n; ++l) {
    const double li = intensity.log_density(gt.elements()[l]);
    if (is_log_zero(li)) continue;
    costs.set(m + l, l, -li);
  }
  costs.mark_pmbm_structured(m);
  return costs;
}

double log_assignment_term(const MultiBernoulli& hypothesis, const Intensity& intensity,
                           const GroundTruthSet& gt, const Assignment& assignment) {
  const std::size_t m = hypothesis.size();
  double term = std::log(hypothesis.weight());
  std::vector<char> matched(m, 0);
  for (std::size_t l = 0; l < assignment.column_to_row.size(); ++l) {
    const std::size_t k = assignment.column_to_row[l];
    if (k < m) {
      const Bernoulli& b = hypothesis.bernoullis()[k];
      term += std::log(b.r()) + b.state_density().log_density(gt.elements()[l]);
      matched[k] = 1;
    } else {
      term += intensity.log_density(gt.elements()[l]);
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (matched[k]) continue;
    const double r = hypothesis.bernoullis()[k].r();
    term += r == 1.0 ? log_zero : std::log1p(-r);
  }
  return term;
}

NllReport nll_pmbm_murty(const GroundTruthSet& gt, const Pmbm& posterior, std::size_t q) {
  if (q < 1) throw ValidationError("nll_pmbm_murty: Q must be at least 1");
  require_dim_match(gt, posterior.dim(), "nll_pmbm_murty");

  std::vector<double> subtotals;
  for (const auto& hypothesis : posterior.hypotheses()) {
    const CostMatrix costs = build_cost_matrix(gt, hypothesis, posterior.intensity());
    std::vector<Assignment> best;
    try {
      best = murty_k_best(costs, q);
    } catch (const InfeasibleError&) {
      // This hypothesis cannot explain Y at all; it contributes zero mass.
    }
    subtotals.push_back(hypothesis_subtotal(hypothesis, posterior.intensity(), gt, best));
  }
  return assemble_pmbm_report(posterior, std::move(subtotals), NllMethod::MurtyApprox, q);
}

NllReport nll_exact(const GroundTruthSet& gt, const Pmbm& posterior) {
  require_dim_match(gt, posterior.dim(), "nll_exact");
  if (gt.size() > kOracleMaxObjects || posterior.bernoulli_count() > kOracleMaxBernoullis) {
    throw SizeLimitError("nll_exact supports at most " + std::to_string(kOracleMaxObjects) +
                         " ground truths and " + std::to_string(kOracleMaxBernoullis) +
                         " Bernoullis");
  }

  std::vector<double> subtotals;
  for (const auto& hypothesis : posterior.hypotheses()) {
    const CostMatrix costs = build_cost_matrix(gt, hypothesis, posterior.intensity());
    const std::vector<Assignment> all = enumerate_all_assignments(costs);
    subtotals.push_back(hypothesis_subtotal(hypothesis, posterior.intensity(), gt, all));
  }
  return assemble_pmbm_report(posterior, std::move(subtotals), NllMethod::Exact, 0);
}

NllReport nll_pmb_decomposed(const GroundTruthSet& gt, const Pmbm& posterior, std::size_t q) {
  if (!posterior.is_pmb()) {
    throw UnsupportedError("nll_pmb_decomposed: posterior is not a PMB (H = " +
                           std::to_string(posterior.hypothesis_count()) + ")");
  }
  require_dim_match(gt, posterior.dim(), "nll_pmb_decomposed");

  const MultiBernoulli& hypothesis = posterior.hypotheses()[0];
  const Intensity& intensity = posterior.intensity();
  const std::size_t m = hypothesis.size();

  CostMatrix costs = build_cost_matrix(gt, hypothesis, intensity);
  Assignment best;
  try {
    best = solve_optimal(costs);
  } catch (const InfeasibleError&) {
    // Likelihood is identically zero: every gamma has an infinite part. For
    // reporting, pick the gamma that parks as few ground truths as possible
    // on the zero intensity by opening those dummy arcs at a huge surrogate
    // cost; the decomposition below still uses the true -log lambda = +inf.
    CostMatrix relaxed = costs;
    for (std::size_t l = 0; l < gt.size(); ++l) {
      if (relaxed.is_forbidden(m + l, l)) relaxed.set(m + l, l, 1e18);
    }
    best = solve_optimal(relaxed);
  }

  PmbDecomposition dec;
  std::vector<char> matched(m, 0);
  for (std::size_t l = 0; l < best.column_to_row.size(); ++l) {
    const std::size_t k = best.column_to_row[l];
    if (k < m) {
      const Bernoulli& b = hypothesis.bernoullis()[k];
      dec.localization -=
          std::log(b.r()) + b.state_density().log_density(gt.elements()[l]);
      dec.assignment.emplace_back(k, l);
      matched[k] = 1;
    } else {
      dec.missed_ground_truths.push_back(l);
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (matched[k]) continue;
    dec.unmatched_bernoullis.push_back(k);
    const double r = hypothesis.bernoullis()[k].r();
    dec.false_detections -= r == 1.0 ? log_zero : std::log1p(-r);
  }
  dec.missed_objects = intensity_total_mass(intensity);
  for (const std::size_t l : dec.missed_ground_truths) {
    dec.missed_objects -= intensity.log_density(gt.elements()[l]);
  }

  NllReport report;
  report.method = NllMethod::MurtyApprox;
  report.murty_q = 1;
  report.total_nll = dec.total();
  report.per_hypothesis.emplace_back(0, log_assignment_term(hypothesis, intensity, gt, best));
  report.decomposition = std::move(dec);
  if (q > 1) {
    report.comparison_murty_nll = nll_pmbm_murty(gt, posterior, q).total_nll;
  }
  return report;
}

NllReport nll(const GroundTruthSet& gt, const PosteriorDensity& posterior,
              const NllConfig& config) {
  if (const auto* cphd = std::get_if<Cphd>(&posterior)) {
    return nll_cphd(gt, *cphd);
  }
  const Pmbm& pmbm = std::get<Pmbm>(posterior);
  const bool within_oracle_scale =
      gt.size() <= kOracleMaxObjects && pmbm.bernoulli_count() <= kOracleMaxBernoullis;

  NllReport report = config.force_exact || (config.prefer_exact && within_oracle_scale)
                         ? nll_exact(gt, pmbm)
                         : nll_pmbm_murty(gt, pmbm, config.q);
  if (pmbm.is_pmb()) {
    report.decomposition = nll_pmb_decomposed(gt, pmbm, 1).decomposition;
  }
  return report;
}

}  // namespace motscore
