#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "simba/relate.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace simba;

TEST_CASE("fit_pair_regression recovers exact linear data") {
  const std::vector<double> x{0.1, 0.2, 0.3}, y{0.2, 0.4, 0.6};
  const auto fit = fit_pair_regression(x, y, Family::kLinear);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exponential fit matches an independent log-space OLS") {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(0.1 * i);
    y.push_back(std::exp(2.0 * 0.1 * i));
  }
  const auto fit = fit_pair_regression(x, y, Family::kExponential);
  const auto ref = oracle::ols(x, oracle::log_of(y));
  CHECK(std::fabs(fit.r_squared - 1.0) < 1e-9);
  CHECK(std::fabs(fit.r_squared - ref.r_squared) < 1e-12);
  CHECK(std::fabs(fit.slope - ref.slope) < 1e-9);
  CHECK(std::fabs(fit.intercept - ref.intercept) < 1e-9);
}

TEST_CASE("fit_pair_regression error paths") {
  const std::vector<double> x{0.1, 0.2, 0.3}, c{0.4, 0.4, 0.4};
  CHECK_THROWS_AS(fit_pair_regression(x, c, Family::kLinear), DegenerateFitError);
  CHECK_THROWS_AS(fit_pair_regression(c, x, Family::kLinear), DegenerateFitError);
  CHECK_THROWS_AS(fit_pair_regression(std::vector<double>{0.1, 0.2}, std::vector<double>{0.3, 0.4}, Family::kLinear),
                  InsufficientDataError);
  CHECK_THROWS_AS(fit_pair_regression(x, std::vector<double>{-1.0, 0.2, 0.3}, Family::kExponential),
                  DegenerateFitError);
}

TEST_CASE("constant target yields NONE") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.5}, c{0.4, 0.4, 0.4, 0.4};
  const auto v = classify_relationship(x, c);
  CHECK(v.klass == RelationClass::kNone);
  CHECK_FALSE(v.best_fit.has_value());
  CHECK_FALSE(v.diagnostic.empty());
}

TEST_CASE("classify_relationship on exact linear data") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.7}, y{0.2, 0.4, 0.6, 1.4};
  const auto v = classify_relationship(x, y);
  CHECK(v.klass == RelationClass::kLinear);
  CHECK(v.best_fit->r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v.n_common == 4);
}

TEST_CASE("independent random vectors classify as NONE, checked by brute force") {
  Rng rng(20240601);
  std::vector<double> x(20), y(20);
  for (auto& v : x) v = rng.uniform();
  for (auto& v : y) v = rng.uniform();
  const auto r2 = oracle::six_r2(x, y);
  const double oracle_max = *std::max_element(r2.begin(), r2.end());
  REQUIRE(oracle_max < 0.5);
  const auto v = classify_relationship(x, y);
  CHECK(v.klass == RelationClass::kNone);
  CHECK(v.best_fit->r_squared == doctest::Approx(oracle_max).epsilon(1e-10));
}

TEST_CASE("power-law data classifies as POWER_LAW, checked by brute force") {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(i / 20.0);
    y.push_back(std::pow(i / 20.0, 1.7));
  }
  const auto r2 = oracle::six_r2(x, y);
  const auto best = std::max_element(r2.begin(), r2.end()) - r2.begin();
  CHECK(best >= 4);  // one of the log-log fits
  const auto v = classify_relationship(x, y);
  CHECK(v.klass == RelationClass::kPowerLaw);
  CHECK(v.best_fit->r_squared == doctest::Approx(r2[static_cast<std::size_t>(best)]).epsilon(1e-10));
}

TEST_CASE("exactly generated families are recovered") {
  std::vector<double> x, lin, ex, pw;
  for (int i = 0; i < 15; ++i) {
    const double t = 0.2 + 0.8 * i / 14.0;
    x.push_back(t);
    lin.push_back(0.3 * t + 0.1);
    ex.push_back(0.1 * std::exp(1.5 * t));
    pw.push_back(0.9 * std::pow(t, 2.3));
  }
  const auto a = classify_relationship(x, lin);
  CHECK(a.klass == RelationClass::kLinear);
  CHECK(a.best_fit->r_squared >= 1.0 - 1e-9);
  const auto b = classify_relationship(x, ex);
  CHECK(b.klass == RelationClass::kExponential);
  CHECK(b.best_fit->r_squared >= 1.0 - 1e-9);
  const auto c = classify_relationship(x, pw);
  CHECK(c.klass == RelationClass::kPowerLaw);
  CHECK(c.best_fit->r_squared >= 1.0 - 1e-9);
}

TEST_CASE("verdict class is symmetric in its arguments") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(12), y(12);
    const double power = rng.uniform(0.3, 3.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform();
      y[i] = std::clamp(std::pow(x[i], power) + rng.uniform(-0.1, 0.1), 0.0, 1.0);
    }
    CHECK(classify_relationship(x, y).klass == classify_relationship(y, x).klass);
  }
}

TEST_CASE("linear r^2 is invariant under affine maps of the predictor") {
  Rng rng(8);
  std::vector<double> x(15), y(15), x2(15);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform();
    y[i] = 0.5 * x[i] + rng.uniform(-0.2, 0.2);
    x2[i] = 2.0 * x[i] + 0.1;
  }
  CHECK(fit_pair_regression(x, y, Family::kLinear).r_squared ==
        doctest::Approx(fit_pair_regression(x2, y, Family::kLinear).r_squared).epsilon(1e-12));
}

TEST_CASE("census totals equal n choose 2") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t m = 3 + seed, d = 2 + seed % 6;
    const auto bench = fixtures::uniform(m, d, seed);
    const auto ds = compare_all_datasets(bench);
    const auto ms = compare_all_models(bench);
    CHECK(ds.total() == d * (d - 1) / 2);
    CHECK(ds.verdicts.size() == d * (d - 1) / 2);
    CHECK(ms.total() == m * (m - 1) / 2);
  }
}

TEST_CASE("census edge cases") {
  SUBCASE("two datasets give one verdict") {
    const auto c = compare_all_datasets(fixtures::uniform(6, 2, 3));
    CHECK(c.total() == 1);
  }
  SUBCASE("identical columns are all LINEAR") {
    auto rows = std::vector<std::vector<double>>{{0.1, 0.1, 0.1}, {0.5, 0.5, 0.5}, {0.3, 0.3, 0.3}, {0.9, 0.9, 0.9}};
    const auto c = compare_all_datasets(fixtures::from_rows(rows));
    CHECK(c.count(RelationClass::kLinear) == 3);
  }
  SUBCASE("duplicate model rows are LINEAR with r^2 = 1") {
    auto rows = std::vector<std::vector<double>>{{0.1, 0.4, 0.2, 0.8}, {0.1, 0.4, 0.2, 0.8}, {0.9, 0.3, 0.5, 0.1}};
    const auto c = compare_all_models(fixtures::from_rows(rows));
    const auto& v = c.verdicts.front();
    CHECK(v.a == 0);
    CHECK(v.b == 1);
    CHECK(v.verdict.klass == RelationClass::kLinear);
    CHECK(v.verdict.best_fit->r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("pairs with too few common rows become flagged NONE") {
    Grid g(4, 2, std::numeric_limits<double>::quiet_NaN());
    g(0, 0) = 0.1;
    g(1, 0) = 0.2;
    g(2, 1) = 0.3;
    g(3, 1) = 0.4;
    const Benchmark bench(fixtures::ids("m", 4), fixtures::ids("d", 2), g);
    const auto c = compare_all_datasets(bench);
    CHECK(c.count(RelationClass::kNone) == 1);
    CHECK(c.verdicts.front().verdict.n_common == 0);
    CHECK_FALSE(c.verdicts.front().verdict.diagnostic.empty());
  }
}

TEST_CASE("commonly observed rows only") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> x{0.1, 0.2, nan, 0.4, 0.5}, y{0.2, 0.4, 0.9, 0.8, nan};
  const auto v = classify_relationship(x, y);
  CHECK(v.n_common == 3);
  CHECK(v.klass == RelationClass::kLinear);
}
