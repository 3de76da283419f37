#pragma once

#include <Eigen/Dense>
#include <vector>

#include "saw/jump_detect.hpp"
#include "saw/panel_data.hpp"

namespace saw {

/// Column (p, j) of the segment design: regressor p restricted to periods
/// start < t ≤ end (1-based original time).
struct SegmentColumn {
  int p = 0;
  int j = 0;
  int start = 0;
  int end = 0;
};

/// Differenced, cross-section demeaned, segment-interacted regressors and
/// instruments on the original (unpadded) time range. Row s·n + i holds
/// observation i at differenced period s (periods s+1 → s+2).
struct SegmentDesign {
  Eigen::Index n = 0;
  int T = 0;
  int P = 0;
  std::vector<std::vector<int>> taus;  // per regressor
  std::vector<SegmentColumn> columns;  // D entries
  Eigen::MatrixXd dx;
  Eigen::MatrixXd zt;
  Eigen::VectorXd dy;
  Eigen::VectorXd t_lengths;  // T_{j,p} per column

  int D() const { return static_cast<int>(columns.size()); }
};

/// `panel.instruments()` supplies the instrument for each regressor, so call
/// prepare_instruments first for two-stage designs. Throws EmptySegment for a
/// zero-length segment and CollinearDesign when the regressor columns are
/// linearly dependent.
SegmentDesign build_design(const PanelDataset& panel, const std::vector<std::vector<int>>& taus);
SegmentDesign build_design(const PanelDataset& panel, const JumpReport& jumps,
                           bool common_jumps = false);

struct SegmentRow {
  int p = 0;
  int j = 0;
  int start = 0;
  int end = 0;
  double coef = 0.0;
  double se = 0.0;
};

struct ChowTest {
  int p = 0;
  int j = 0;  // compares segment j with segment j−1
  double diff = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

struct PostSawFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  int variance_case = 0;   // 0 until covariance() runs
  Eigen::MatrixXd sigma;   // Σ̂ on the √(n T_j) scale
  Eigen::MatrixXd cov;     // covariance of β̂ itself
  Eigen::VectorXd t_lengths;
  std::vector<SegmentRow> segments;
  std::vector<ChowTest> tests;
};

/// Solves Σ Z Δ̃Ẋ' β = Σ Z ΔẎ. Throws SingularCrossProduct.
PostSawFit estimate(const SegmentDesign& design);

/// Fills sigma, cov and the segment standard errors. Case 1: pooled σ̂²;
/// 2: per-unit σ̂²_i; 3: per-period σ̂²_t; 4: observation-wise residual².
void covariance(const SegmentDesign& design, PostSawFit& fit, int variance_case = 4);

/// Consecutive-segment z tests from the joint covariance block.
std::vector<ChowTest> chow_tests(const SegmentDesign& design, const PostSawFit& fit);

/// estimate → covariance → chow_tests.
PostSawFit fit_post_saw(const SegmentDesign& design, int variance_case = 4);

/// T × P slope path implied by the segment coefficients.
Eigen::MatrixXd beta_path(const SegmentDesign& design, const Eigen::VectorXd& beta);

}  // namespace saw
