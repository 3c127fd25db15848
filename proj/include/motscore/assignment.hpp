#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "motscore/errors.hpp"

namespace motscore {

enum class ProblemKind { Generic, PmbmStructured };

// Rectangular cost matrix with explicit Forbidden entries. Rows index the
// assignable components (Bernoullis plus one dedicated dummy row per column in
// the PMBM-structured case), columns index the ground-truth objects. Finite
// entries may be negative. Forbidden is a first-class tag rather than a large
// sentinel cost, so Q-best orderings are never corrupted by sentinel
// magnitudes.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols);  // starts all-Forbidden

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void set(std::size_t row, std::size_t col, double cost);  // finite required
  void set_forbidden(std::size_t row, std::size_t col);

  bool is_forbidden(std::size_t row, std::size_t col) const {
    return forbidden_[row * cols_ + col];
  }
  // Valid only for non-Forbidden cells.
  double at(std::size_t row, std::size_t col) const { return cost_[row * cols_ + col]; }

  bool column_feasible(std::size_t col) const;
  // Throws InfeasibleError naming the first all-Forbidden column, if any.
  void require_feasible_columns() const;

  ProblemKind kind() const { return kind_; }
  std::size_t structured_m() const { return structured_m_; }
  // Tags the matrix as PMBM-structured (rows = m + cols, row m + l
  // non-Forbidden only in column l) and verifies that shape.
  void mark_pmbm_structured(std::size_t m);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cost_;
  std::vector<char> forbidden_;
  ProblemKind kind_ = ProblemKind::Generic;
  std::size_t structured_m_ = 0;
};

// Feasible solution: every column assigned to exactly one row, no row used
// twice.
struct Assignment {
  std::vector<std::size_t> column_to_row;
  double total_cost = 0.0;

  bool operator==(const Assignment& other) const {
    return column_to_row == other.column_to_row;
  }
};

// Globally optimal assignment; deterministic under ties (lexicographically
// smallest column_to_row among exactly cost-tied optima).
// Throws InfeasibleError when no complete column assignment exists.
Assignment solve_optimal(const CostMatrix& costs);

// The q <= Q lowest-cost assignments in nondecreasing cost order, exact-cost
// ties ordered by lexicographic column_to_row. Throws InfeasibleError when no
// assignment exists at all.
std::vector<Assignment> murty_k_best(const CostMatrix& costs, std::size_t q);

// Every feasible assignment exactly once, sorted by cost then lexicographic
// column_to_row. Test/oracle path: independent of the Hungarian/Murty code.
// Throws SizeLimitError when cols > 8 or the count explodes.
std::vector<Assignment> enumerate_all_assignments(const CostMatrix& costs);

}  // namespace motscore
