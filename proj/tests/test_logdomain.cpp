#include <doctest.h>

#include <cmath>
#include <vector>

#include "motscore/logdomain.hpp"

using namespace motscore;

TEST_CASE("log_add handles log-zero operands") {
  CHECK(is_log_zero(log_add(log_zero, log_zero)));
  CHECK(log_add(log_zero, 0.5) == 0.5);
  CHECK(log_add(0.5, log_zero) == 0.5);
  CHECK(log_add(std::log(0.25), std::log(0.75)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log_sum_exp of empty or all-log-zero input is log-zero") {
  CHECK(is_log_zero(log_sum_exp({})));
  const std::vector<double> zeros{log_zero, log_zero, log_zero};
  CHECK(is_log_zero(log_sum_exp(zeros)));
}

TEST_CASE("log_sum_exp matches naive arithmetic away from underflow") {
  const std::vector<double> vals{std::log(0.1), std::log(0.25), std::log(0.3)};
  CHECK(log_sum_exp(vals) == doctest::Approx(std::log(0.65)).epsilon(1e-13));
}

TEST_CASE("log_sum_exp survives scales where naive arithmetic underflows") {
  const std::vector<double> vals{-1000.0, -1001.0, log_zero};
  const double expected = -1000.0 + std::log1p(std::exp(-1.0));
  CHECK(log_sum_exp(vals) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("log-zero annihilates log-domain products and is absorbed by sums") {
  CHECK(is_log_zero(log_zero + 3.5));          // product term
  CHECK(log_add(log_zero, -2.0) == -2.0);      // sum term
}
