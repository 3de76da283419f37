#include "saw/post_saw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "saw/errors.hpp"

namespace saw {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Differenced copy of an n × T array restricted to periods start < t ≤ end,
// stacked as rows s·n + i.
VectorXd interacted_difference(const MatrixXd& series, int start, int end) {
  const Index n = series.rows();
  const Index T = series.cols();
  VectorXd out(n * (T - 1));
  auto inside = [&](Index period) { return period > start && period <= end ? 1.0 : 0.0; };
  for (Index s = 0; s + 1 < T; ++s) {
    const double now = inside(s + 2);
    const double before = inside(s + 1);
    out.segment(s * n, n) = now * series.col(s + 1) - before * series.col(s);
  }
  return out;
}

}  // namespace

SegmentDesign build_design(const PanelDataset& panel, const std::vector<std::vector<int>>& taus) {
  validate(panel);
  const int P = panel.P();
  const int T = static_cast<int>(panel.T);
  if (static_cast<int>(taus.size()) != P) {
    fail(ErrorCode::ShapeMismatch, "need one jump list per regressor");
  }
  const auto& inst = panel.instruments();
  if (static_cast<int>(inst.size()) != P) {
    fail(ErrorCode::ShapeMismatch, "instrument count differs from regressor count");
  }

  SegmentDesign d;
  d.n = panel.n;
  d.T = T;
  d.P = P;
  d.taus = taus;
  for (int p = 0; p < P; ++p) {
    std::vector<int> bounds{0};
    bounds.insert(bounds.end(), taus[p].begin(), taus[p].end());
    bounds.push_back(T);
    const int S = static_cast<int>(taus[p].size());
    for (int j = 1; j <= S + 1; ++j) {
      const int start = bounds[j - 1];
      const int end = bounds[j];
      if (end <= start || start < 0 || end > T) {
        fail(ErrorCode::EmptySegment, "regressor " + std::to_string(p + 1) + " segment " +
                                          std::to_string(j) + " (" + std::to_string(start) +
                                          ", " + std::to_string(end) + "] is empty");
      }
      d.columns.push_back({p, j, start, end});
    }
  }

  const Index rows = panel.n * (panel.T - 1);
  const int D = d.D();
  d.dx.resize(rows, D);
  d.zt.resize(rows, D);
  d.t_lengths.resize(D);
  std::vector<MatrixXd> x_dot, z_dot;
  for (int p = 0; p < P; ++p) {
    x_dot.push_back(dot_transform(panel.x[p]));
    z_dot.push_back(dot_transform(inst[p]));
  }
  for (int c = 0; c < D; ++c) {
    const SegmentColumn& col = d.columns[c];
    d.dx.col(c) = interacted_difference(x_dot[col.p], col.start, col.end);
    d.zt.col(c) = interacted_difference(z_dot[col.p], col.start, col.end);
    const bool last = col.j == static_cast<int>(taus[col.p].size()) + 1;
    d.t_lengths(c) = last ? T - col.start : col.end - col.start + 1;
  }
  d.dy = interacted_difference(dot_transform(panel.y), 0, T);

  Eigen::ColPivHouseholderQR<MatrixXd> qr(d.dx);
  qr.setThreshold(1e-10);
  if (qr.rank() < D) {
    fail(ErrorCode::CollinearDesign, "segment design has rank " + std::to_string(qr.rank()) +
                                         " < " + std::to_string(D) + " columns");
  }
  return d;
}

SegmentDesign build_design(const PanelDataset& panel, const JumpReport& jumps, bool common_jumps) {
  std::vector<std::vector<int>> taus;
  const auto shared = jumps.union_tau();
  for (int p = 0; p < panel.P(); ++p) {
    if (common_jumps) {
      taus.push_back(shared);
    } else {
      taus.push_back(p < jumps.P() ? jumps.regressors[p].tau : std::vector<int>{});
    }
  }
  return build_design(panel, taus);
}

PostSawFit estimate(const SegmentDesign& design) {
  const MatrixXd a = design.zt.transpose() * design.dx;
  const VectorXd rhs = design.zt.transpose() * design.dy;
  Eigen::FullPivLU<MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    fail(ErrorCode::SingularCrossProduct, "instrument/regressor cross product is singular (rank " +
                                              std::to_string(lu.rank()) + " < " +
                                              std::to_string(design.D()) + ")");
  }
  PostSawFit fit;
  fit.beta = lu.solve(rhs);
  fit.residuals = design.dy - design.dx * fit.beta;
  fit.t_lengths = design.t_lengths;
  for (int c = 0; c < design.D(); ++c) {
    const SegmentColumn& col = design.columns[c];
    fit.segments.push_back({col.p, col.j, col.start, col.end, fit.beta(c), 0.0});
  }
  return fit;
}

void covariance(const SegmentDesign& design, PostSawFit& fit, int variance_case) {
  if (variance_case < 1 || variance_case > 4) {
    fail(ErrorCode::InvalidArgument, "variance case must be 1..4");
  }
  const Index n = design.n;
  const Index td = design.T - 1;
  const VectorXd r2 = fit.residuals.array().square();
  VectorXd w(r2.size());
  switch (variance_case) {
    case 1:
      w.setConstant(r2.mean());
      break;
    case 2: {
      VectorXd per_unit = VectorXd::Zero(n);
      for (Index s = 0; s < td; ++s) per_unit += r2.segment(s * n, n);
      per_unit /= static_cast<double>(td);
      for (Index s = 0; s < td; ++s) w.segment(s * n, n) = per_unit;
      break;
    }
    case 3:
      for (Index s = 0; s < td; ++s) w.segment(s * n, n).setConstant(r2.segment(s * n, n).mean());
      break;
    default:
      w = r2;
  }

  const MatrixXd a = design.zt.transpose() * design.dx;
  const MatrixXd m = design.zt.transpose() * w.asDiagonal() * design.zt;
  const MatrixXd a_inv = a.fullPivLu().inverse();
  MatrixXd cov = a_inv * m * a_inv.transpose();
  cov = 0.5 * (cov + cov.transpose());
  const VectorXd scale = (static_cast<double>(n) * design.t_lengths.array()).sqrt();

  fit.variance_case = variance_case;
  fit.cov = cov;
  fit.sigma = scale.asDiagonal() * cov * scale.asDiagonal();
  for (int c = 0; c < design.D(); ++c) fit.segments[c].se = std::sqrt(std::max(cov(c, c), 0.0));
}

std::vector<ChowTest> chow_tests(const SegmentDesign& design, const PostSawFit& fit) {
  if (fit.cov.size() == 0) fail(ErrorCode::InvalidArgument, "covariance has not been computed");
  std::vector<ChowTest> tests;
  for (int c = 1; c < design.D(); ++c) {
    const SegmentColumn& cur = design.columns[c];
    const SegmentColumn& prev = design.columns[c - 1];
    if (cur.p != prev.p) continue;
    ChowTest t;
    t.p = cur.p;
    t.j = cur.j;
    t.diff = fit.beta(c) - fit.beta(c - 1);
    const double var = fit.cov(c, c) + fit.cov(c - 1, c - 1) - 2.0 * fit.cov(c, c - 1);
    if (t.diff == 0.0) {
      t.z = 0.0;
    } else if (var > 0.0) {
      t.z = t.diff / std::sqrt(var);
    } else {
      t.z = std::copysign(INFINITY, t.diff);
    }
    t.p_value = std::erfc(std::abs(t.z) / std::sqrt(2.0));
    tests.push_back(t);
  }
  return tests;
}

PostSawFit fit_post_saw(const SegmentDesign& design, int variance_case) {
  PostSawFit fit = estimate(design);
  covariance(design, fit, variance_case);
  fit.tests = chow_tests(design, fit);
  return fit;
}

MatrixXd beta_path(const SegmentDesign& design, const VectorXd& beta) {
  if (beta.size() != design.D()) fail(ErrorCode::ShapeMismatch, "beta must have D entries");
  MatrixXd path = MatrixXd::Zero(design.T, design.P);
  for (int c = 0; c < design.D(); ++c) {
    const SegmentColumn& col = design.columns[c];
    for (int t = col.start + 1; t <= col.end; ++t) path(t - 1, col.p) = beta(c);
  }
  return path;
}

}  // namespace saw
