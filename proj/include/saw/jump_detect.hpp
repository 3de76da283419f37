#pragma once

#include <vector>

#include "saw/haar_basis.hpp"
#include "saw/saw_core.hpp"

namespace saw {

/// Univariate Haar trees of the unshrunk SAW paths for every regressor p.
/// `shifted` decomposes the contemporaneous estimate γ̃_{·,p}, `unshifted` the
/// lag-component estimate γ̃_{·,p+P}. Since the lag component at stored slot s
/// estimates β one period earlier than the contemporaneous one, the two trees
/// see the same slope path on grids offset by one period.
struct UnivariateTrees {
  std::vector<haar::HaarCoefficients> shifted;
  std::vector<haar::HaarCoefficients> unshifted;
};

UnivariateTrees univariate_trees(const SawFit& fit, int P);

struct RegressorJumps {
  std::vector<int> tau;             // last period of each old segment, 1-based original time
  std::vector<double> delta_beta;   // β_{τ+1} − β_τ
  int count() const { return static_cast<int>(tau.size()); }
};

struct JumpReport {
  double lambda = 0.0;
  int T = 0;  // original number of periods
  std::vector<RegressorJumps> regressors;
  /// Finest-level coefficients after thresholding, per regressor.
  std::vector<std::vector<double>> c_shift, c_unshift;

  int P() const { return static_cast<int>(regressors.size()); }
  /// Sorted union of all detected locations.
  std::vector<int> union_tau() const;
};

/// Hard-thresholds the finest-level coefficients of both trees and reads off
/// the jumps: the unshifted tree covers changes between periods (2k−1, 2k),
/// the shifted tree those between (2k, 2k+1). Locations in the padded range
/// (τ ≥ T) are dropped.
JumpReport detect(const UnivariateTrees& trees, double lambda, int T);

/// Convenience: univariate_trees + detect with the fit's λ.
JumpReport detect_jumps(const SawFit& fit, int P, int T);

/// Hausdorff distance between two jump sets; `horizon` when exactly one set is
/// empty and 0 when both are.
double hausdorff(const std::vector<int>& a, const std::vector<int>& b, double horizon);

}  // namespace saw
