#include "saw/saw_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "saw/errors.hpp"
#include "saw/haar_basis.hpp"
#include "saw/linalg.hpp"
#include "saw/log.hpp"

namespace saw {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double n_obs(const DifferencedPanel& dp) { return static_cast<double>(dp.n * dp.t_diff); }

// Prefix sums over time of a per-time sequence of matrices.
template <typename M>
std::vector<M> prefix_sums(const std::vector<M>& per_t) {
  std::vector<M> out(per_t.size() + 1);
  out[0] = M::Zero(per_t.front().rows(), per_t.front().cols());
  for (std::size_t t = 0; t < per_t.size(); ++t) out[t + 1] = out[t] + per_t[t];
  return out;
}

template <typename M>
M range_sum(const std::vector<M>& prefix, Index begin, Index end) {
  return prefix[static_cast<std::size_t>(end)] - prefix[static_cast<std::size_t>(begin)];
}

MatrixXd checked_inverse(const MatrixXd& q, double eps_rank, int l, int m) {
  const double smallest = min_abs_eigenvalue(q);
  if (!(smallest >= eps_rank)) {
    fail(ErrorCode::SingularMatrix,
         "Q(l=" + std::to_string(l) + ", m=" + std::to_string(m) +
             ") is singular (smallest |eigenvalue| " + std::to_string(smallest) +
             "); the dyadic block has too few observations for the regressor count");
  }
  return q.partialPivLu().inverse();
}

MatrixXd checked_inv_sqrt(const MatrixXd& m, double eps_rank, int l, int k) {
  try {
    return inv_sqrt(m, eps_rank);
  } catch (const Error& e) {
    fail(e.code(), "block (l=" + std::to_string(l) + ", k=" + std::to_string(k) + "): " + e.what());
  }
}

void check_dp(const DifferencedPanel& dp) {
  if (dp.levels < 2 || (Index{1} << (dp.levels - 1)) != dp.t_diff) {
    fail(ErrorCode::NonDyadicLength, "differenced panel must be padded to a power of two");
  }
}

// (1/N) Σ_i z_it w_it' per time, with weights w_it = r_it² when given.
std::vector<MatrixXd> instrument_moments(const DifferencedPanel& dp, const VectorXd* weights) {
  const double N = n_obs(dp);
  std::vector<MatrixXd> out(static_cast<std::size_t>(dp.t_diff));
  for (Index t = 0; t < dp.t_diff; ++t) {
    const auto z = dp.zu.middleRows(t * dp.n, dp.n);
    if (weights) {
      const auto w = weights->segment(t * dp.n, dp.n);
      out[t] = z.transpose() * w.asDiagonal() * z / N;
    } else {
      out[t] = z.transpose() * z / N;
    }
  }
  return out;
}

}  // namespace

MatrixXd SawBasis::W(std::size_t j, Index t) const {
  const BasisBlock& b = blocks.at(j);
  if (t >= b.begin && t < b.mid) return b.w_pos;
  if (t >= b.mid && t < b.end) return b.w_neg;
  return MatrixXd::Zero(width, width);
}

MatrixXd SawBasis::V(std::size_t j, Index t) const {
  const BasisBlock& b = blocks.at(j);
  if (t >= b.begin && t < b.mid) return b.v_pos;
  if (t >= b.mid && t < b.end) return b.v_neg;
  return MatrixXd::Zero(width, width);
}

std::vector<MatrixXd> time_cross_products(const DifferencedPanel& dp) {
  const double N = n_obs(dp);
  std::vector<MatrixXd> out(static_cast<std::size_t>(dp.t_diff));
  for (Index t = 0; t < dp.t_diff; ++t) {
    out[t] = dp.zu.middleRows(t * dp.n, dp.n).transpose() * dp.xu.middleRows(t * dp.n, dp.n) / N;
  }
  return out;
}

SawBasis build_basis(const DifferencedPanel& dp, double eps_rank) {
  check_dp(dp);
  const Index w = dp.width();
  const int L = dp.levels;
  const auto prefix = prefix_sums(time_cross_products(dp));

  SawBasis basis;
  basis.L = L;
  basis.t_diff = dp.t_diff;
  basis.width = w;
  basis.blocks.reserve(static_cast<std::size_t>(dp.t_diff));

  {
    BasisBlock top;
    top.begin = 0;
    top.mid = dp.t_diff;
    top.end = dp.t_diff;
    top.q_pos = prefix.back();
    if (!(min_abs_eigenvalue(top.q_pos) >= eps_rank)) {
      fail(ErrorCode::SingularMatrix, "Q(l=1, m=1) is singular");
    }
    top.a_pos = checked_inv_sqrt(top.q_pos, eps_rank, 1, 1);
    top.q_neg = top.a_neg = top.w_neg = top.v_neg = MatrixXd::Zero(w, w);
    top.w_pos = top.a_pos;
    top.v_pos = top.a_pos;
    basis.blocks.push_back(std::move(top));
  }

  for (int l = 2; l <= L; ++l) {
    for (int k = 1; k <= haar::translations(l); ++k) {
      const haar::Support s = haar::support(l, k, L);
      const double amp = s.amplitude;
      BasisBlock b;
      b.level = l;
      b.k = k;
      b.begin = static_cast<Index>(s.begin);
      b.mid = static_cast<Index>(s.mid);
      b.end = static_cast<Index>(s.end);
      b.q_pos = range_sum(prefix, b.begin, b.mid) * (amp * amp);
      b.q_neg = range_sum(prefix, b.mid, b.end) * (amp * amp);
      const MatrixXd inv_pos = checked_inverse(b.q_pos, eps_rank, l, 2 * k - 1);
      const MatrixXd inv_neg = checked_inverse(b.q_neg, eps_rank, l, 2 * k);
      const MatrixXd s_half = checked_inv_sqrt(inv_pos + inv_neg, eps_rank, l, k);
      b.a_pos = inv_pos * s_half;
      b.a_neg = inv_neg * s_half;
      b.w_pos = amp * b.a_pos;
      b.w_neg = -amp * b.a_neg;
      b.v_pos = amp * s_half * inv_pos;
      b.v_neg = -amp * s_half * inv_neg;
      basis.blocks.push_back(std::move(b));
    }
  }
  return basis;
}

double orthonormality_defect(const DifferencedPanel& dp, const SawBasis& basis) {
  const auto cross = time_cross_products(dp);
  const Index w = basis.width;
  double worst = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const BasisBlock& a = basis.blocks[j];
    for (std::size_t jj = 0; jj < basis.size(); ++jj) {
      const BasisBlock& b = basis.blocks[jj];
      const Index lo = std::max(a.begin, b.begin);
      const Index hi = std::min(a.end, b.end);
      MatrixXd sum = MatrixXd::Zero(w, w);
      for (Index t = lo; t < hi; ++t) sum += basis.V(j, t) * cross[t] * basis.W(jj, t);
      if (j == jj) sum -= MatrixXd::Identity(w, w);
      worst = std::max(worst, sum.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

std::vector<VectorXd> estimate_b(const DifferencedPanel& dp, const SawBasis& basis) {
  const double N = n_obs(dp);
  std::vector<VectorXd> score(static_cast<std::size_t>(dp.t_diff));
  for (Index t = 0; t < dp.t_diff; ++t) {
    score[t] = dp.zu.middleRows(t * dp.n, dp.n).transpose() * dp.dy.segment(t * dp.n, dp.n) / N;
  }
  const auto prefix = prefix_sums(score);
  std::vector<VectorXd> b;
  b.reserve(basis.size());
  for (const BasisBlock& blk : basis.blocks) {
    VectorXd v = blk.v_pos * range_sum(prefix, blk.begin, blk.mid);
    if (blk.end > blk.mid) v += blk.v_neg * range_sum(prefix, blk.mid, blk.end);
    b.push_back(std::move(v));
  }
  return b;
}

MatrixXd reconstruct_paths(const SawBasis& basis, const std::vector<VectorXd>& b) {
  if (b.size() != basis.size()) fail(ErrorCode::ShapeMismatch, "one coefficient vector per block");
  MatrixXd gamma = MatrixXd::Zero(basis.t_diff, basis.width);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (b[j].isZero(0.0)) continue;
    const BasisBlock& blk = basis.blocks[j];
    const Eigen::RowVectorXd up = (blk.w_pos * b[j]).transpose();
    const Eigen::RowVectorXd down = (blk.w_neg * b[j]).transpose();
    for (Index t = blk.begin; t < blk.mid; ++t) gamma.row(t) += up;
    for (Index t = blk.mid; t < blk.end; ++t) gamma.row(t) += down;
  }
  return gamma;
}

double kappa_for(double n) { return 1.0 - std::log(std::log(n)) / std::log(n); }

Threshold select_threshold(const DifferencedPanel& dp, const SawBasis& basis,
                           const std::vector<VectorXd>& b_raw, const ThresholdOptions& opts) {
  const MatrixXd gamma = reconstruct_paths(basis, b_raw);
  VectorXd resid(dp.dy.size());
  for (Index t = 0; t < dp.t_diff; ++t) {
    resid.segment(t * dp.n, dp.n) =
        dp.dy.segment(t * dp.n, dp.n) - dp.xu.middleRows(t * dp.n, dp.n) * gamma.row(t).transpose();
  }

  const VectorXd sq = resid.array().square();
  const bool robust = opts.variance == ThresholdVariance::robust_max;
  const auto prefix = prefix_sums(instrument_moments(dp, robust ? &sq : nullptr));
  double largest = 0.0;
  for (const BasisBlock& blk : basis.blocks) {
    VectorXd d = (blk.v_pos * range_sum(prefix, blk.begin, blk.mid) * blk.v_pos.transpose()).diagonal();
    if (blk.end > blk.mid) {
      d += (blk.v_neg * range_sum(prefix, blk.mid, blk.end) * blk.v_neg.transpose()).diagonal();
    }
    largest = std::max(largest, d.maxCoeff());
  }

  Threshold th;
  th.v_hat = robust ? largest : sq.mean() * largest;
  const double N = n_obs(dp);
  const double T = static_cast<double>(dp.t_diff);
  const double w = static_cast<double>(dp.width());
  th.kappa = kappa_for(N);
  double lambda = std::sqrt(std::max(th.v_hat, 0.0)) *
                  std::pow(2.0 * w * std::log(T * w) /
                               (static_cast<double>(dp.n) * std::pow(T, 1.0 / th.kappa)),
                           th.kappa / 2.0);
  if (opts.small_n) lambda *= std::pow(std::sqrt(T) / std::log(T), th.kappa / 2.0);
  double scale = 1.0;
  for (const VectorXd& v : b_raw) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  const double floor = opts.lambda_floor * scale;
  if (!(th.v_hat > 0.0) || !(lambda >= floor)) {
    th.degenerate = true;
    log::info("threshold variance is degenerate; using the lambda floor");
    lambda = floor;
  }
  th.lambda = lambda;
  return th;
}

SawFit shrink_and_reconstruct(const std::vector<VectorXd>& b_raw, double lambda,
                              const SawBasis& basis) {
  SawFit fit;
  fit.b_raw = b_raw;
  fit.lambda = lambda;
  fit.b_shrunk.reserve(b_raw.size());
  for (const VectorXd& b : b_raw) {
    fit.b_shrunk.push_back((b.array().abs() > lambda).select(b, 0.0));
  }
  fit.gamma_raw = reconstruct_paths(basis, fit.b_raw);
  fit.gamma_hat = reconstruct_paths(basis, fit.b_shrunk);
  return fit;
}

SawFit fit_saw(const DifferencedPanel& dp, const SawOptions& opts) {
  return fit_saw(dp, build_basis(dp, opts.eps_rank), opts);
}

SawFit fit_saw(const DifferencedPanel& dp, const SawBasis& basis, const SawOptions& opts) {
  if (opts.lambda && !(*opts.lambda >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "lambda override must be non-negative");
  }
  const auto b_raw = estimate_b(dp, basis);
  const Threshold th = select_threshold(dp, basis, b_raw, opts.threshold);
  SawFit fit = shrink_and_reconstruct(b_raw, opts.lambda.value_or(th.lambda), basis);
  fit.v_hat = th.v_hat;
  fit.kappa = th.kappa;
  fit.degenerate = th.degenerate && !opts.lambda;
  return fit;
}

}  // namespace saw
