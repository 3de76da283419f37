#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "saw/panel_data.hpp"
#include "saw/pipeline.hpp"

namespace saw {

enum class NoiseParam { variance, sd };

struct DgpSpec {
  int dgp = 1;                 // 1..6
  int n = 120;
  int T = 33;
  std::uint64_t seed = 1;
  int jumps = -1;              // S for DGP2-5; -1 selects the default (3)
  NoiseParam noise_param = NoiseParam::variance;
  double noise_scale = 1.0;    // multiplies every error standard deviation
};

/// Signal amplitude a_n for n ∈ {30, 60, 120, 300}; other n take the nearest
/// entry and set `approximate`.
double signal_amplitude(int n, bool* approximate = nullptr);

struct StepPath {
  Eigen::VectorXd values;  // length T
  std::vector<int> taus;   // τ_j = ⌊j (T−1)/(S+1)⌋
};

/// β_t = (a/3)(−1)^j on τ_{j−1} < t ≤ τ_j.
StepPath true_beta(int S, int T, double a);

struct DgpTruth {
  Eigen::MatrixXd beta;                // T × P
  std::vector<std::vector<int>> taus;  // per regressor
  Eigen::VectorXd theta;               // length T
  std::vector<int> theta_taus;
  Eigen::VectorXd alpha;
  double mu = 0.0;
  double a_n = 0.0;
  bool a_n_approximate = false;
};

struct GeneratedPanel {
  PanelDataset panel;
  DgpTruth truth;
};

/// Validates the spec (throws InvalidArgument) and draws one panel.
GeneratedPanel generate(const DgpSpec& spec);

/// Stream seed for replication r.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep);

/// Alternative jump detector for comparisons: returns one location list per regressor.
using Detector = std::function<std::vector<std::vector<int>>(const PanelDataset&)>;

struct MonteCarloOptions {
  PipelineOptions pipeline;
  unsigned threads = 0;     // 0 = hardware concurrency
  bool oracle_taus = false; // refit on the true locations instead of detecting
  Detector detector;        // used instead of SAW detection when set
};

struct McRecord {
  int rep = 0;
  bool failed = false;
  std::string error;
  std::vector<int> s_tilde;        // per regressor
  std::vector<double> hd;          // HD_p / T
  std::vector<double> mse;         // ‖β̂_p − β_p‖² / T
  std::vector<int> column_p;       // per post-SAW column
  std::vector<double> coef;
  std::vector<double> se;
  std::vector<double> truth_coef;  // true slope at the column's last period
  std::vector<std::vector<int>> taus;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
};

struct McResult {
  DgpSpec spec;
  int reps = 0;
  int failures = 0;
  bool a_n_approximate = false;
  std::vector<McRecord> records;
  std::vector<Summary> s_tilde, hd, mse;  // per regressor, over successful reps
};

Summary summarize(const std::vector<double>& values);

/// Recomputes the per-regressor aggregates from the records.
void aggregate(McResult& result);

/// Runs `reps` independent replications; the result does not depend on the
/// thread count. Failed replications are counted, not thrown.
McResult run_monte_carlo(const DgpSpec& spec, int reps, const MonteCarloOptions& opts = {});

}  // namespace saw
