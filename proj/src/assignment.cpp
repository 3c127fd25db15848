#include "motscore/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <string>

namespace motscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Canonical cost of a structure: sum of selected entries in column order.
// Used everywhere a cost is reported or compared, so identical structures
// always carry bit-identical costs.
double canonical_cost(const CostMatrix& m, const std::vector<std::size_t>& column_to_row) {
  double sum = 0.0;
  for (std::size_t l = 0; l < column_to_row.size(); ++l) sum += m.at(column_to_row[l], l);
  return sum;
}

bool cost_lex_less(const Assignment& a, const Assignment& b) {
  if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
  return a.column_to_row < b.column_to_row;
}

// Shortest-augmenting-path assignment core (Jonker-Volgenant style
// potentials). Each column must receive a distinct row; rows >= cols;
// Forbidden cells are IEEE +inf arcs, which stay exact under the min/compare
// operations used here. Returns nullopt when some column cannot be completed.
std::optional<std::vector<std::size_t>> shortest_path_assign(const CostMatrix& m) {
  const std::size_t nc = m.cols();
  const std::size_t nr = m.rows();
  if (nc == 0) return std::vector<std::size_t>{};
  if (nr < nc) return std::nullopt;

  auto cost = [&](std::size_t row, std::size_t col) {
    return m.is_forbidden(row, col) ? kInf : m.at(row, col);
  };

  // 1-based with a virtual row 0; p[row] = column matched to the row.
  std::vector<double> u(nc + 1, 0.0), v(nr + 1, 0.0);
  std::vector<std::size_t> p(nr + 1, 0), way(nr + 1, 0);
  for (std::size_t col = 1; col <= nc; ++col) {
    p[0] = col;
    std::size_t r0 = 0;
    std::vector<double> minv(nr + 1, kInf);
    std::vector<char> used(nr + 1, 0);
    do {
      used[r0] = 1;
      const std::size_t c0 = p[r0];
      double delta = kInf;
      std::size_t r1 = 0;
      for (std::size_t r = 1; r <= nr; ++r) {
        if (used[r]) continue;
        const double cur = cost(r - 1, c0 - 1) - u[c0] - v[r];
        if (cur < minv[r]) {
          minv[r] = cur;
          way[r] = r0;
        }
        if (minv[r] < delta) {
          delta = minv[r];
          r1 = r;
        }
      }
      if (delta == kInf) return std::nullopt;  // no augmenting path
      for (std::size_t r = 0; r <= nr; ++r) {
        if (used[r]) {
          u[p[r]] += delta;
          v[r] -= delta;
        } else {
          minv[r] -= delta;
        }
      }
      r0 = r1;
    } while (p[r0] != 0);
    do {
      const std::size_t r1 = way[r0];
      p[r0] = p[r1];
      r0 = r1;
    } while (r0 != 0);
  }

  std::vector<std::size_t> column_to_row(nc, 0);
  for (std::size_t r = 1; r <= nr; ++r) {
    if (p[r] != 0) column_to_row[p[r] - 1] = r - 1;
  }
  return column_to_row;
}

Assignment make_assignment(const CostMatrix& m, std::vector<std::size_t> column_to_row) {
  Assignment a;
  a.total_cost = canonical_cost(m, column_to_row);
  a.column_to_row = std::move(column_to_row);
  return a;
}

// Copy of `m` with column `col` forced to `row`: every other cell of the
// column and every other use of the row become Forbidden.
CostMatrix with_forced_arc(const CostMatrix& m, std::size_t row, std::size_t col) {
  CostMatrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r != row) out.set_forbidden(r, col);
  }
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c != col) out.set_forbidden(row, c);
  }
  return out;
}

}  // namespace

// --- CostMatrix ---

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), cost_(rows * cols, 0.0), forbidden_(rows * cols, 1) {}

void CostMatrix::set(std::size_t row, std::size_t col, double cost) {
  if (!std::isfinite(cost)) {
    throw ValidationError("CostMatrix: entries must be finite (use set_forbidden)");
  }
  cost_[row * cols_ + col] = cost;
  forbidden_[row * cols_ + col] = 0;
}

void CostMatrix::set_forbidden(std::size_t row, std::size_t col) {
  forbidden_[row * cols_ + col] = 1;
}

bool CostMatrix::column_feasible(std::size_t col) const {
  for (std::size_t r = 0; r < rows_; ++r) {
    if (!is_forbidden(r, col)) return true;
  }
  return false;
}

void CostMatrix::require_feasible_columns() const {
  for (std::size_t c = 0; c < cols_; ++c) {
    if (!column_feasible(c)) {
      throw InfeasibleError("column " + std::to_string(c) + " has no assignable row");
    }
  }
}

void CostMatrix::mark_pmbm_structured(std::size_t m) {
  if (rows_ != m + cols_) {
    throw ValidationError("PMBM-structured matrix requires rows = m + cols");
  }
  for (std::size_t l = 0; l < cols_; ++l) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c != l && !is_forbidden(m + l, c)) {
        throw ValidationError("PMBM-structured dummy row " + std::to_string(m + l) +
                              " must be Forbidden outside column " + std::to_string(l));
      }
    }
  }
  kind_ = ProblemKind::PmbmStructured;
  structured_m_ = m;
}

// --- solvers ---

Assignment solve_optimal(const CostMatrix& costs) {
  costs.require_feasible_columns();
  auto solved = shortest_path_assign(costs);
  if (!solved) throw InfeasibleError("no complete column assignment exists");
  Assignment best = make_assignment(costs, std::move(*solved));

  // Deterministic tie-break: walk the columns and force the smallest row that
  // still admits an assignment of exactly the optimal cost. Only exact cost
  // ties (bit-equal canonical sums) are rewired, so optimality is preserved.
  CostMatrix forced = costs;
  bool changed = false;
  for (std::size_t col = 0; col < costs.cols(); ++col) {
    for (std::size_t row = 0; row < costs.rows(); ++row) {
      if (forced.is_forbidden(row, col)) continue;
      if (row == best.column_to_row[col]) break;  // already minimal
      CostMatrix trial = with_forced_arc(forced, row, col);
      auto alt = shortest_path_assign(trial);
      if (alt && canonical_cost(costs, *alt) == best.total_cost) {
        best.column_to_row = std::move(*alt);
        changed = true;
        break;
      }
    }
    forced = with_forced_arc(forced, best.column_to_row[col], col);
  }
  if (changed) best = make_assignment(costs, std::move(best.column_to_row));
  return best;
}

std::vector<Assignment> murty_k_best(const CostMatrix& costs, std::size_t q) {
  struct Node {
    Assignment solution;
    CostMatrix subproblem;
  };
  auto node_greater = [](const Node& a, const Node& b) {
    return cost_lex_less(b.solution, a.solution);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(node_greater)> frontier(node_greater);

  // The root goes through solve_optimal so the first emitted assignment
  // carries the same lexicographic tie-break; partitioning is valid around
  // any optimum.
  frontier.push(Node{solve_optimal(costs), costs});

  std::vector<Assignment> result;
  std::set<std::vector<std::size_t>> seen;
  while (!frontier.empty() && result.size() < q) {
    Node node = frontier.top();
    frontier.pop();
    if (!seen.insert(node.solution.column_to_row).second) continue;
    result.push_back(node.solution);

    // Standard include/exclude partition around the emitted optimum: child j
    // keeps columns < j pinned to the emitted rows and bans the emitted arc
    // of column j. Child solution spaces are disjoint and cover everything
    // except the emitted assignment.
    CostMatrix pinned = node.subproblem;
    for (std::size_t j = 0; j < costs.cols(); ++j) {
      const std::size_t banned_row = node.solution.column_to_row[j];
      CostMatrix child = pinned;
      child.set_forbidden(banned_row, j);
      if (auto sol = shortest_path_assign(child)) {
        frontier.push(Node{make_assignment(costs, std::move(*sol)), std::move(child)});
      }
      pinned = with_forced_arc(pinned, banned_row, j);
    }
  }

  // Emission is already nondecreasing in cost; this only orders exact ties.
  std::stable_sort(result.begin(), result.end(), cost_lex_less);
  return result;
}

std::vector<Assignment> enumerate_all_assignments(const CostMatrix& costs) {
  constexpr std::size_t kMaxCols = 8;
  constexpr std::size_t kMaxCount = 20'000'000;
  if (costs.cols() > kMaxCols) {
    throw SizeLimitError("enumerate_all_assignments supports at most " +
                         std::to_string(kMaxCols) + " columns, got " +
                         std::to_string(costs.cols()));
  }

  std::vector<std::vector<std::size_t>> candidates(costs.cols());
  for (std::size_t c = 0; c < costs.cols(); ++c) {
    for (std::size_t r = 0; r < costs.rows(); ++r) {
      if (!costs.is_forbidden(r, c)) candidates[c].push_back(r);
    }
  }

  std::vector<Assignment> result;
  std::vector<std::size_t> current(costs.cols(), 0);
  std::vector<char> used(costs.rows(), 0);
  auto recurse = [&](auto&& self, std::size_t col) -> void {
    if (col == costs.cols()) {
      if (result.size() >= kMaxCount) {
        throw SizeLimitError("assignment enumeration exceeded " + std::to_string(kMaxCount));
      }
      result.push_back(make_assignment(costs, current));
      return;
    }
    for (std::size_t r : candidates[col]) {
      if (used[r]) continue;
      used[r] = 1;
      current[col] = r;
      self(self, col + 1);
      used[r] = 0;
    }
  };
  recurse(recurse, 0);

  std::stable_sort(result.begin(), result.end(), cost_lex_less);
  return result;
}

}  // namespace motscore
