#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "saw/panel_data.hpp"

namespace saw {

/// One (l, k) block of the structure-adapted basis. Block 0 is (1, 1) and
/// spans the whole grid with only a positive half; block j ≥ 1 at level l
/// has j = 2^{l-2} + k - 1 (heap order).
///
/// Regressor side: W(t) = w_pos on [begin, mid), w_neg on [mid, end).
/// Instrument side: 𝒵_it = V(t) z_it with V(t) = v_pos / v_neg likewise.
struct BasisBlock {
  int level = 1;
  int k = 1;
  Eigen::Index begin = 0;
  Eigen::Index mid = 0;
  Eigen::Index end = 0;
  Eigen::MatrixXd q_pos, q_neg;  // H²-weighted cross products Q_{l,2k-1}, Q_{l,2k}
  Eigen::MatrixXd a_pos, a_neg;  // A_{l,2k-1}, A_{l,2k} (a_pos = A_{1,1} for block 0)
  Eigen::MatrixXd w_pos, w_neg;
  Eigen::MatrixXd v_pos, v_neg;
};

struct SawBasis {
  int L = 0;
  Eigen::Index t_diff = 0;
  Eigen::Index width = 0;  // P̲
  std::vector<BasisBlock> blocks;

  std::size_t size() const { return blocks.size(); }
  static std::size_t index(int l, int k) {
    return l == 1 ? 0 : (std::size_t{1} << (l - 2)) + static_cast<std::size_t>(k) - 1;
  }
  const BasisBlock& block(int l, int k) const { return blocks.at(index(l, k)); }
  /// W_{l,k}(t) at 0-based stored time t (zero outside the support).
  Eigen::MatrixXd W(std::size_t j, Eigen::Index t) const;
  Eigen::MatrixXd V(std::size_t j, Eigen::Index t) const;
};

/// Per-time cross products (1/N) Σ_i z_it x_it' with N = n·T_diff.
std::vector<Eigen::MatrixXd> time_cross_products(const DifferencedPanel& dp);

/// Throws SingularMatrix naming the (l, m) block whose Q is not invertible.
SawBasis build_basis(const DifferencedPanel& dp, double eps_rank = 1e-10);

/// Largest entrywise deviation of (1/N) Σ_{i,t} 𝒵_j 𝒳_{j'}' from δ_{jj'} I
/// over all block pairs.
double orthonormality_defect(const DifferencedPanel& dp, const SawBasis& basis);

/// b̃_j = (1/N) Σ_{i,t} 𝒵_{j,it} ΔY_it, one P̲-vector per block.
std::vector<Eigen::VectorXd> estimate_b(const DifferencedPanel& dp, const SawBasis& basis);

/// γ_t = Σ_j W_j(t) b_j as a T_diff × P̲ array.
Eigen::MatrixXd reconstruct_paths(const SawBasis& basis, const std::vector<Eigen::VectorXd>& b);

enum class ThresholdVariance {
  pooled,     // σ̂² · max_{j,p} (1/N) Σ 𝒵_p²
  robust_max  // max_{j,p} (1/N) Σ (𝒵_p Δẽ)²
};

struct ThresholdOptions {
  ThresholdVariance variance = ThresholdVariance::pooled;
  bool small_n = false;
  /// Lower bound relative to max(1, max |b̃|), so exact fits keep their
  /// nonzero coefficients while rounding residue is still removed.
  double lambda_floor = 1e-9;
};

struct Threshold {
  double lambda = 0.0;
  double v_hat = 0.0;
  double kappa = 0.0;
  bool degenerate = false;  // V̂ ≤ 0 or the formula fell below the floor
};

double kappa_for(double n_obs);

/// λ = V̂^{1/2} (2P̲ log(T P̲) / (n T^{1/κ}))^{κ/2} from the residuals of the
/// λ = 0 fit described by b_raw.
Threshold select_threshold(const DifferencedPanel& dp, const SawBasis& basis,
                           const std::vector<Eigen::VectorXd>& b_raw,
                           const ThresholdOptions& opts = {});

struct SawFit {
  std::vector<Eigen::VectorXd> b_raw;
  std::vector<Eigen::VectorXd> b_shrunk;
  double lambda = 0.0;
  double v_hat = 0.0;
  double kappa = 0.0;
  bool degenerate = false;
  Eigen::MatrixXd gamma_hat;  // T_diff × P̲
  Eigen::MatrixXd gamma_raw;
};

/// Hard thresholding b̂ = b̃·1(|b̃| > λ) and reconstruction of both paths.
SawFit shrink_and_reconstruct(const std::vector<Eigen::VectorXd>& b_raw, double lambda,
                              const SawBasis& basis);

struct SawOptions {
  double eps_rank = 1e-10;
  ThresholdOptions threshold;
  std::optional<double> lambda;  // overrides the data-driven threshold
};

/// build_basis → estimate_b → select_threshold → shrink_and_reconstruct.
SawFit fit_saw(const DifferencedPanel& dp, const SawOptions& opts = {});
SawFit fit_saw(const DifferencedPanel& dp, const SawBasis& basis, const SawOptions& opts = {});

}  // namespace saw
