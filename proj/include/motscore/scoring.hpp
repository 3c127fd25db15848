#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "motscore/assignment.hpp"
#include "motscore/densities.hpp"

namespace motscore {

// Ground-truth object states. Duplicate elements are permitted as distinct
// objects but flagged (RFS set semantics assume distinct elements; the
// pointwise density evaluation is still well-defined).
class GroundTruthSet {
 public:
  GroundTruthSet() = default;
  explicit GroundTruthSet(std::vector<StateVector> elements,
                          const std::string& label = "groundTruth");

  const std::vector<StateVector>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  std::optional<int> dim() const;
  bool has_duplicates() const { return has_duplicates_; }

 private:
  std::vector<StateVector> elements_;
  bool has_duplicates_ = false;
};

enum class NllMethod { Exact, MurtyApprox, CphdClosedForm };

// Three-way split of the PMB NLL over the minimizing assignment set gamma:
// localization (matched pairs), false detections (unmatched Bernoullis),
// missed objects (PPP terms for unmatched ground truths).
struct PmbDecomposition {
  double localization = 0.0;
  double false_detections = 0.0;
  double missed_objects = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> assignment;  // (bernoulli, ground truth)
  std::vector<std::size_t> unmatched_bernoullis;                // F(gamma)
  std::vector<std::size_t> missed_ground_truths;                // M(gamma)

  double total() const;  // +inf-absorbing sum of the three parts
};

struct NllReport {
  double total_nll = 0.0;  // +inf iff the evaluated likelihood is exactly zero
  NllMethod method = NllMethod::Exact;
  std::size_t murty_q = 0;  // populated for MurtyApprox
  // log of each hypothesis's term subtotal (hypothesis weight included).
  std::vector<std::pair<std::size_t, double>> per_hypothesis;
  std::optional<PmbDecomposition> decomposition;
  // In decomposed reports with Q > 1: the Q-term Murty NLL for comparison
  // (the decomposition itself always refers to the single best gamma).
  std::optional<double> comparison_murty_nll;
};

struct NllConfig {
  std::size_t q = 10;
  bool prefer_exact = false;
  // Oracle mode: always take the exact path for PMBM-family posteriors and
  // surface SizeLimitError beyond the enumeration caps instead of falling
  // back to Murty.
  bool force_exact = false;
};

// Oracle scale caps for exhaustive assignment enumeration.
inline constexpr std::size_t kOracleMaxObjects = 8;
inline constexpr std::size_t kOracleMaxBernoullis = 8;

// Closed-form CPHD NLL: -log(|Y|!) - log p(|Y|) - sum log s(y). O(|Y|).
NllReport nll_cphd(const GroundTruthSet& gt, const Cphd& posterior);

// The (m + |Y|) x |Y| assignment cost matrix for one hypothesis: Bernoulli
// rows carry -log(r p(y) / (1 - r)), the dedicated dummy row of column l
// carries -log lambda(y_l). Cells whose log argument is zero are Forbidden.
// For r = 1 the (1 - r) normalizer is replaced by 1e-300 so the matrix still
// ranks assignments; reported NLL values never form that ratio (the (1 - r)
// factors of matched pairs cancel algebraically in the term formula).
CostMatrix build_cost_matrix(const GroundTruthSet& gt, const MultiBernoulli& hypothesis,
                             const Intensity& intensity);

// Exact log of one assignment's likelihood contribution, computed in the
// cancellation form: log w_h + sum_matched log(r_k p_k(y_l))
// + sum_dummy log lambda(y_l) + sum_unmatched log(1 - r_k).
double log_assignment_term(const MultiBernoulli& hypothesis, const Intensity& intensity,
                           const GroundTruthSet& gt, const Assignment& assignment);

// Q-best approximation: the Q lowest-cost assignments per hypothesis via
// Murty, all H*Q terms combined by log-sum-exp. +inf when every hypothesis
// is infeasible or all terms are log-zero.
NllReport nll_pmbm_murty(const GroundTruthSet& gt, const Pmbm& posterior, std::size_t q);

// Exact NLL by full assignment enumeration; the ground-truth oracle.
// Requires |Y| <= 8 and m <= 8.
NllReport nll_exact(const GroundTruthSet& gt, const Pmbm& posterior);

// PMB (H = 1) report built around the best assignment: total_nll equals the
// decomposition sum; when q > 1 the Murty NLL at q is attached for
// comparison. Throws UnsupportedError when H > 1.
NllReport nll_pmb_decomposed(const GroundTruthSet& gt, const Pmbm& posterior, std::size_t q = 1);

// Dispatch facade: CPHD closed form, exact oracle (within scale, when
// preferred) or Murty approximation; attaches the best-gamma decomposition
// for H = 1 posteriors.
NllReport nll(const GroundTruthSet& gt, const PosteriorDensity& posterior,
              const NllConfig& config = {});

}  // namespace motscore
