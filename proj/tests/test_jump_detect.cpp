#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "saw/jump_detect.hpp"
#include "saw/pipeline.hpp"

using Eigen::MatrixXd;

namespace {

saw::SawFit noise_free_fit(const MatrixXd& beta, Eigen::Index n, std::uint64_t seed) {
  const auto panel = testing::noise_free_panel(beta, n, seed);
  const auto dp = saw::prepare_differenced(panel, saw::TimeEffects::unit_regressor);
  return saw::fit_saw(dp);
}

int nonzero(const std::vector<double>& v) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-9; }));
}

MatrixXd steps(int T, const std::vector<int>& taus, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> size(0.5, 2.0);
  std::vector<double> values{1.0};
  for (std::size_t j = 0; j < taus.size(); ++j) {
    values.push_back(values.back() + (j % 2 == 0 ? 1.0 : -1.0) * size(rng));
  }
  return testing::step_path(T, taus, values);
}

}  // namespace

TEST_CASE("constant paths give empty detail trees and no jumps") {
  const auto fit = noise_free_fit(MatrixXd::Constant(17, 1, 2.0), 4, 1);
  const auto trees = saw::univariate_trees(fit, 1);
  for (const auto* tree : {&trees.shifted[0], &trees.unshifted[0]}) {
    for (const auto& level : tree->c) CHECK(nonzero(level) == 0);
  }
  const auto report = saw::detect(trees, fit.lambda, 17);
  CHECK(report.regressors[0].count() == 0);
}

TEST_CASE("dyadic jump at tau = 8") {
  const auto fit = noise_free_fit(testing::step_path(17, {8}, {1.0, 3.0}), 4, 2);
  const auto trees = saw::univariate_trees(fit, 1);
  // only the ancestor path of the break carries detail, so at most one coefficient per level
  for (const auto* tree : {&trees.shifted[0], &trees.unshifted[0]}) {
    for (const auto& level : tree->c) CHECK(nonzero(level) <= 1);
  }
  const auto report = saw::detect(trees, fit.lambda, 17);
  REQUIRE(report.regressors[0].count() == 1);
  CHECK(report.regressors[0].tau[0] == 8);
  CHECK(report.regressors[0].delta_beta[0] == doctest::Approx(2.0));
}

TEST_CASE("non-dyadic jump at tau = 11 is caught by one tree only") {
  const auto fit = noise_free_fit(testing::step_path(17, {11}, {1.0, -1.0}), 4, 3);
  const auto trees = saw::univariate_trees(fit, 1);
  const auto& fs = trees.shifted[0].c.back();
  const auto& fu = trees.unshifted[0].c.back();
  CHECK(nonzero(fs) + nonzero(fu) == 1);
  const auto& hit = nonzero(fs) == 1 ? fs : fu;
  CHECK(std::abs(hit[5]) > 1e-9);  // k = 6

  const auto report = saw::detect(trees, fit.lambda, 17);
  CHECK(report.regressors[0].tau == std::vector<int>{11});
  CHECK(report.regressors[0].delta_beta[0] == doctest::Approx(-2.0));
  // the coarser shifted-tree coefficients straddle 8..12 but never reach the finest level
  CHECK(nonzero(trees.shifted[0].c[trees.shifted[0].c.size() - 2]) > 0);
}

TEST_CASE("exhaustive single and double jumps are recovered exactly") {
  std::mt19937_64 rng(4);
  const int T = 17;
  int cases = 0;
  auto run = [&](const std::vector<int>& taus) {
    const auto fit = noise_free_fit(steps(T, taus, rng), 4, 100 + cases++);
    const auto report = saw::detect_jumps(fit, 1, T);
    CHECK(report.regressors[0].tau == taus);
  };
  for (int a = 2; a <= T - 2; ++a) {
    run({a});
    for (int b = a + 2; b <= T - 2; ++b) run({a, b});
  }
  CHECK(cases == 14 + 78);
}

TEST_CASE("each regressor reports its own jumps") {
  const MatrixXd path = testing::step_path(17, {6, 13}, {0.0, 2.0, 1.0});
  for (int carrier = 0; carrier < 2; ++carrier) {
    MatrixXd beta = MatrixXd::Constant(17, 2, 0.5);
    beta.col(carrier) = path;
    const auto fit = noise_free_fit(beta, 8, 11);
    const auto report = saw::detect_jumps(fit, 2, 17);
    CHECK(report.regressors[carrier].tau == std::vector<int>{6, 13});
    CHECK(report.regressors[1 - carrier].count() == 0);
  }
}

TEST_CASE("jump counts never increase with lambda") {
  const auto panel = testing::noise_free_panel(testing::step_path(33, {10, 21}, {1.0, -1.0, 1.0}), 40, 5, false, 1.0);
  const auto dp = saw::prepare_differenced(panel, saw::TimeEffects::unit_regressor);
  const auto trees = saw::univariate_trees(saw::fit_saw(dp), 1);
  int previous = 1 << 20;
  for (double lambda : {0.0, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 5.0}) {
    const int count = saw::detect(trees, lambda, 33).regressors[0].count();
    CHECK(count <= previous);
    previous = count;
  }
  CHECK(previous == 0);
}

TEST_CASE("detections in the padded range are dropped") {
  // T = 13 pads the differenced length 12 to 16, so the reflected tail could echo the break.
  const auto fit = noise_free_fit(testing::step_path(13, {9}, {1.0, 4.0}), 4, 6);
  const auto report = saw::detect_jumps(fit, 1, 13);
  for (int tau : report.regressors[0].tau) CHECK(tau < 13);
  CHECK(std::find(report.regressors[0].tau.begin(), report.regressors[0].tau.end(), 9) !=
        report.regressors[0].tau.end());
}

TEST_CASE("hausdorff") {
  CHECK(saw::hausdorff({8}, {8}, 16) == 0.0);
  CHECK(saw::hausdorff({8}, {10}, 16) == 2.0);
  CHECK(saw::hausdorff({}, {8}, 16) == 16.0);
  CHECK(saw::hausdorff({8}, {}, 16) == 16.0);
  CHECK(saw::hausdorff({}, {}, 16) == 0.0);
  CHECK(saw::hausdorff({1, 20}, {2}, 33) == 18.0);

  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pos(1, 32), len(0, 4);
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<int> a(len(rng)), b(len(rng));
    for (int& x : a) x = pos(rng);
    for (int& x : b) x = pos(rng);
    const double ab = saw::hausdorff(a, b, 33);
    CHECK(ab == saw::hausdorff(b, a, 33));
    CHECK(ab >= 0.0);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    CHECK((ab == 0.0) == (a == b));
    CHECK(saw::hausdorff(a, a, 33) == 0.0);
  }
}
