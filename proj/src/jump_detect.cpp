#include "saw/jump_detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "saw/errors.hpp"

namespace saw {
namespace {

// Δψ_{L,k}(u) = ψ_{L,k}(u) − ψ_{L,k}(u−1), ψ(0) = 0, summed against the
// thresholded finest-level coefficients.
double finest_difference(const std::vector<double>& c, int u, int L) {
  double total = 0.0;
  const int first = u / 2;
  const int last = (u + 1) / 2;
  for (int k = std::max(first, 1); k <= last; ++k) {
    if (k > static_cast<int>(c.size()) || c[k - 1] == 0.0) continue;
    const double now = haar::psi(L, k, u, L);
    const double before = u > 1 ? haar::psi(L, k, u - 1, L) : 0.0;
    total += (now - before) * c[k - 1];
  }
  return total;
}

}  // namespace

UnivariateTrees univariate_trees(const SawFit& fit, int P) {
  if (fit.gamma_raw.cols() < 2 * P) {
    fail(ErrorCode::ShapeMismatch, "fit has fewer than 2P coefficient paths");
  }
  UnivariateTrees trees;
  for (int p = 0; p < P; ++p) {
    const Eigen::VectorXd now = fit.gamma_raw.col(p);
    const Eigen::VectorXd lag = fit.gamma_raw.col(p + P);
    trees.shifted.push_back(haar::decompose({now.data(), static_cast<std::size_t>(now.size())}));
    trees.unshifted.push_back(haar::decompose({lag.data(), static_cast<std::size_t>(lag.size())}));
  }
  return trees;
}

std::vector<int> JumpReport::union_tau() const {
  std::vector<int> all;
  for (const auto& r : regressors) all.insert(all.end(), r.tau.begin(), r.tau.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

JumpReport detect(const UnivariateTrees& trees, double lambda, int T) {
  if (trees.shifted.size() != trees.unshifted.size()) {
    fail(ErrorCode::ShapeMismatch, "tree families differ in size");
  }
  JumpReport report;
  report.lambda = lambda;
  report.T = T;
  for (std::size_t p = 0; p < trees.shifted.size(); ++p) {
    const int L = trees.shifted[p].depth;
    if (L < 2) fail(ErrorCode::NonDyadicLength, "trees need at least two levels");
    auto finest = [&](const haar::HaarCoefficients& c) {
      std::vector<double> f = c.c.back();
      for (double& v : f) v = std::abs(v) > lambda ? v : 0.0;
      return f;
    };
    const auto cs = finest(trees.shifted[p]);
    const auto cu = finest(trees.unshifted[p]);

    std::map<int, double> found;
    const int grid = 1 << (L - 1);
    for (int u = 2; u <= grid; u += 2) {
      const double du = finest_difference(cu, u, L);
      if (du != 0.0) found[u - 1] += du;
      const double ds = finest_difference(cs, u, L);
      if (ds != 0.0) found[u] += ds;
    }

    RegressorJumps r;
    for (const auto& [tau, delta] : found) {
      if (tau >= 1 && tau < T) {
        r.tau.push_back(tau);
        r.delta_beta.push_back(delta);
      }
    }
    report.regressors.push_back(std::move(r));
    report.c_shift.push_back(cs);
    report.c_unshift.push_back(cu);
  }
  return report;
}

JumpReport detect_jumps(const SawFit& fit, int P, int T) {
  return detect(univariate_trees(fit, P), fit.lambda, T);
}

double hausdorff(const std::vector<int>& a, const std::vector<int>& b, double horizon) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return horizon;
  auto directed = [](const std::vector<int>& from, const std::vector<int>& to) {
    double worst = 0.0;
    for (int x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (int y : to) best = std::min(best, std::abs(static_cast<double>(x - y)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace saw
