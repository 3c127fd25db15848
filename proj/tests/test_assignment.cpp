#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "motscore/assignment.hpp"

using namespace motscore;
using namespace motscore::testing;

namespace {

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

CostMatrix random_matrix(TestRng& rng, std::size_t rows, std::size_t cols,
                         double forbidden_prob, bool integer_costs = false) {
  CostMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng.chance(forbidden_prob)) continue;
      const double value = integer_costs ? std::floor(rng.uniform(-9.0, 10.0))
                                         : rng.uniform(-10.0, 10.0);
      m.set(r, c, value);
    }
  }
  return m;
}

bool enumeration_feasible(const CostMatrix& m) {
  return !enumerate_all_assignments(m).empty();
}

// Murty vs oracle: costs equal rank by rank, and every returned structure
// appears in the oracle's equal-cost band.
void check_against_oracle(const CostMatrix& m, std::size_t q) {
  const auto oracle = enumerate_all_assignments(m);
  if (oracle.empty()) {
    CHECK_THROWS_AS(murty_k_best(m, q), InfeasibleError);
    return;
  }
  const auto approx = murty_k_best(m, q);
  REQUIRE(approx.size() == std::min<std::size_t>(q, oracle.size()));

  std::set<std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    CHECK(approx[i].total_cost == doctest::Approx(oracle[i].total_cost).epsilon(1e-9));
    CHECK(seen.insert(approx[i].column_to_row).second);  // no duplicates
    const bool in_band = std::any_of(oracle.begin(), oracle.end(), [&](const Assignment& a) {
      return a.column_to_row == approx[i].column_to_row &&
             std::abs(a.total_cost - approx[i].total_cost) <= 1e-9;
    });
    CHECK(in_band);
  }
  for (std::size_t i = 1; i < approx.size(); ++i) {
    CHECK(approx[i - 1].total_cost <= approx[i].total_cost);  // nondecreasing
  }
}

}  // namespace

TEST_CASE("solve_optimal on a 1x1 matrix") {
  const auto a = solve_optimal(from_rows({{5.0}}));
  CHECK(a.column_to_row == std::vector<std::size_t>{0});
  CHECK(a.total_cost == 5.0);
}

TEST_CASE("solve_optimal picks the cheaper permutation") {
  const auto a = solve_optimal(from_rows({{4.0, 1.0}, {2.0, 3.0}}));
  CHECK(a.column_to_row == std::vector<std::size_t>{1, 0});
  CHECK(a.total_cost == doctest::Approx(3.0));
}

TEST_CASE("solve_optimal keeps a column that only admits its dummy row") {
  // 3x2: column 1 is Forbidden everywhere except row 2.
  CostMatrix m(3, 2);
  m.set(0, 0, 1.0);
  m.set(1, 0, 2.0);
  m.set(0, 1, 0.5);
  m.set(1, 1, 0.1);
  m.set(2, 1, 4.0);
  m.set_forbidden(0, 1);
  m.set_forbidden(1, 1);
  const auto a = solve_optimal(m);
  CHECK(a.column_to_row[1] == 2);
  CHECK(a.total_cost == doctest::Approx(5.0));
}

TEST_CASE("solve_optimal infeasibility") {
  CostMatrix all_forbidden(2, 2);
  all_forbidden.set(0, 0, 1.0);
  CHECK_THROWS_AS(solve_optimal(all_forbidden), InfeasibleError);

  // both columns can only use row 0
  CostMatrix blocked(2, 2);
  blocked.set(0, 0, 1.0);
  blocked.set(0, 1, 1.0);
  CHECK_THROWS_AS(solve_optimal(blocked), InfeasibleError);

  // fewer rows than columns
  CostMatrix wide(1, 2);
  wide.set(0, 0, 1.0);
  wide.set(0, 1, 1.0);
  CHECK_THROWS_AS(solve_optimal(wide), InfeasibleError);
}

TEST_CASE("solve_optimal handles negative entries") {
  const auto a = solve_optimal(from_rows({{-5.0, -1.0}, {-2.0, -3.0}}));
  CHECK(a.total_cost == doctest::Approx(-8.0));
}

TEST_CASE("empty problem has the empty assignment") {
  const CostMatrix m(3, 0);
  CHECK(solve_optimal(m).column_to_row.empty());
  CHECK(solve_optimal(m).total_cost == 0.0);
  CHECK(enumerate_all_assignments(m).size() == 1);
  CHECK(murty_k_best(m, 5).size() == 1);
}

TEST_CASE("murty_k_best on the 2x2 example") {
  const auto best = murty_k_best(from_rows({{4.0, 1.0}, {2.0, 3.0}}), 2);
  REQUIRE(best.size() == 2);
  CHECK(best[0].total_cost == doctest::Approx(3.0));
  CHECK(best[1].total_cost == doctest::Approx(7.0));
  CHECK(best[0].column_to_row == std::vector<std::size_t>{1, 0});
  CHECK(best[1].column_to_row == std::vector<std::size_t>{0, 1});
}

TEST_CASE("murty_k_best with Q = 1 equals solve_optimal") {
  TestRng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = random_matrix(rng, 4, 3, 0.2);
    if (!enumeration_feasible(m)) continue;
    const auto single = murty_k_best(m, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].total_cost == solve_optimal(m).total_cost);
    CHECK(single[0].column_to_row == solve_optimal(m).column_to_row);
  }
  // including under exact ties
  const auto tied = murty_k_best(from_rows({{1.0, 1.0}, {1.0, 1.0}}), 1);
  CHECK(tied[0].column_to_row == std::vector<std::size_t>{0, 1});
}

TEST_CASE("murty_k_best exhausts all n! permutations of a square matrix") {
  TestRng rng(13);
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto m = random_matrix(rng, n, n, 0.0);
    std::size_t factorial = 1;
    for (std::size_t i = 2; i <= n; ++i) factorial *= i;
    const auto all = murty_k_best(m, factorial + 5);
    CHECK(all.size() == factorial);
    for (std::size_t i = 1; i < all.size(); ++i) {
      CHECK(all[i - 1].total_cost <= all[i].total_cost);
    }
  }
}

TEST_CASE("enumerate_all_assignments basics") {
  CHECK(enumerate_all_assignments(from_rows({{1.0, 2.0}, {3.0, 4.0}})).size() == 2);

  // Forbidden entry removes the relaxed optimum from the list.
  CostMatrix m = from_rows({{1.0, 10.0}, {10.0, 1.0}});
  m.set_forbidden(0, 0);
  const auto all = enumerate_all_assignments(m);
  REQUIRE(all.size() == 1);
  CHECK(all[0].column_to_row == std::vector<std::size_t>{1, 0});

  CHECK_THROWS_AS(enumerate_all_assignments(CostMatrix(10, 9)), SizeLimitError);
}

TEST_CASE("enumerate_all_assignments counts the PMBM-structured space") {
  // m = 2 Bernoulli rows, 2 columns, each column with a private dummy row:
  // 3 x 3 candidate pairs minus the two double-booked Bernoulli cases = 7.
  CostMatrix m(4, 2);
  m.set(0, 0, 1.0);
  m.set(0, 1, 2.0);
  m.set(1, 0, 3.0);
  m.set(1, 1, 4.0);
  m.set(2, 0, 5.0);
  m.set(3, 1, 6.0);
  m.mark_pmbm_structured(2);
  CHECK(m.kind() == ProblemKind::PmbmStructured);
  CHECK(enumerate_all_assignments(m).size() == 7);
}

TEST_CASE("mark_pmbm_structured validates the dummy pattern") {
  CostMatrix bad(4, 2);
  bad.set(2, 0, 1.0);
  bad.set(2, 1, 1.0);  // dummy row used by a foreign column
  CHECK_THROWS_AS(bad.mark_pmbm_structured(2), ValidationError);
  CHECK_THROWS_AS(CostMatrix(3, 2).mark_pmbm_structured(2), ValidationError);
}

TEST_CASE("murty_k_best equals the enumeration oracle on random matrices") {
  TestRng rng(42);
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t cols = 1 + rng.index(6);
    const std::size_t rows = cols + rng.index(3);
    const double forbidden = trial % 3 == 0 ? 0.35 : 0.1;
    const auto m = random_matrix(rng, rows, cols, forbidden);
    const std::size_t q = 1 + rng.index(12);
    check_against_oracle(m, q);
  }
}

TEST_CASE("column shift moves every cost by exactly the shift") {
  TestRng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t cols = 2 + rng.index(3);
    const std::size_t rows = cols + rng.index(2);
    const auto m = random_matrix(rng, rows, cols, 0.15, /*integer_costs=*/true);
    if (!enumeration_feasible(m)) continue;

    const double shift = 3.0;
    const std::size_t target = rng.index(cols);
    CostMatrix shifted = m;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!m.is_forbidden(r, target)) shifted.set(r, target, m.at(r, target) + shift);
    }

    const auto base = murty_k_best(m, 64);
    const auto moved = murty_k_best(shifted, 64);
    REQUIRE(base.size() == moved.size());
    std::set<std::vector<std::size_t>> base_set, moved_set;
    for (const auto& a : base) base_set.insert(a.column_to_row);
    for (const auto& a : moved) moved_set.insert(a.column_to_row);
    CHECK(base_set == moved_set);  // assignment set preserved
    for (const auto& a : moved) {
      const double original = a.total_cost - shift;  // integer arithmetic: exact
      const bool found = std::any_of(base.begin(), base.end(), [&](const Assignment& b) {
        return b.column_to_row == a.column_to_row && b.total_cost == original;
      });
      CHECK(found);
    }
  }
}

TEST_CASE("solve_optimal is invariant under row permutation up to relabeling") {
  TestRng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t cols = 1 + rng.index(4);
    const std::size_t rows = cols + rng.index(3);
    const auto m = random_matrix(rng, rows, cols, 0.15);
    if (!enumeration_feasible(m)) continue;

    std::vector<std::size_t> perm(rows);
    for (std::size_t r = 0; r < rows; ++r) perm[r] = r;
    for (std::size_t r = rows; r > 1; --r) std::swap(perm[r - 1], perm[rng.index(r)]);

    CostMatrix shuffled(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (!m.is_forbidden(r, c)) shuffled.set(perm[r], c, m.at(r, c));
      }
    }
    CHECK(solve_optimal(m).total_cost == solve_optimal(shuffled).total_cost);
  }
}

TEST_CASE("equal-cost assignments come out in lexicographic order") {
  // two identical rows: both permutations cost 2
  const auto best = murty_k_best(from_rows({{1.0, 1.0}, {1.0, 1.0}}), 4);
  REQUIRE(best.size() == 2);
  CHECK(best[0].column_to_row == std::vector<std::size_t>{0, 1});
  CHECK(best[1].column_to_row == std::vector<std::size_t>{1, 0});
  CHECK(solve_optimal(from_rows({{1.0, 1.0}, {1.0, 1.0}})).column_to_row ==
        std::vector<std::size_t>{0, 1});
}
