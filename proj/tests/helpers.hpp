#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "saw/panel_data.hpp"

namespace testing {

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

/// Noise-free panel Y = α_i + θ_t + Σ_p X_p β_{t,p} with random regressors.
/// beta is T × P. With separate instruments the draws are Z = X₀ + ν and
/// X = X₀ + gap·ν, so Z ≠ X while both stay strongly correlated.
inline saw::PanelDataset noise_free_panel(const Eigen::MatrixXd& beta, Eigen::Index n,
                                          std::uint64_t seed, bool separate_instruments = false,
                                          double noise_sd = 0.0, bool with_theta = true,
                                          double gap = 0.5) {
  std::mt19937_64 rng(seed);
  const Eigen::Index T = beta.rows();
  const int P = static_cast<int>(beta.cols());
  const Eigen::VectorXd alpha = gaussian(rng, n, 1);
  const Eigen::VectorXd theta = with_theta ? Eigen::VectorXd(gaussian(rng, T, 1)) : Eigen::VectorXd::Zero(T);
  std::vector<Eigen::MatrixXd> x, z;
  for (int p = 0; p < P; ++p) {
    Eigen::MatrixXd xp = gaussian(rng, n, T);
    xp.colwise() += 0.5 * alpha;
    if (separate_instruments) {
      const Eigen::MatrixXd nu = gaussian(rng, n, T);
      z.push_back(xp + nu);
      xp += gap * nu;
    }
    x.push_back(xp);
  }
  Eigen::MatrixXd y = noise_sd * gaussian(rng, n, T);
  y.colwise() += alpha;
  y.rowwise() += theta.transpose();
  for (int p = 0; p < P; ++p) {
    y += (x[p].array().rowwise() * beta.col(p).transpose().array()).matrix();
  }
  return saw::make_panel(y, x, z);
}

/// Step path of length T with the given last-periods-of-segment and values.
inline Eigen::VectorXd step_path(int T, const std::vector<int>& taus, const std::vector<double>& values) {
  Eigen::VectorXd b(T);
  int start = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const int end = j < taus.size() ? taus[j] : T;
    for (int t = start; t < end; ++t) b(t) = values[j];
    start = end;
  }
  return b;
}

}  // namespace testing
