#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace saw {

/// Balanced long panel. Every series is an n × T matrix (row = unit, column = period).
struct PanelDataset {
  Eigen::Index n = 0;
  Eigen::Index T = 0;
  Eigen::MatrixXd y;
  std::vector<Eigen::MatrixXd> x;  // P regressors
  std::vector<Eigen::MatrixXd> z;  // Q instruments; empty means exogenous (z ≡ x)
  std::vector<std::string> unit_labels;
  std::vector<std::string> time_labels;
  std::vector<std::string> regressor_names;
  std::vector<std::string> instrument_names;

  int P() const { return static_cast<int>(x.size()); }
  int Q() const { return static_cast<int>(z.size()); }
  bool has_instruments() const { return !z.empty(); }
  /// Instruments paired column-by-column with the regressors.
  const std::vector<Eigen::MatrixXd>& instruments() const { return z.empty() ? x : z; }
};

/// Builds a panel and checks the type invariants (balanced shapes, finite values,
/// P ≥ 1, n ≥ 1, T ≥ 3). Labels default to 1..n and 1..T.
PanelDataset make_panel(Eigen::MatrixXd y, std::vector<Eigen::MatrixXd> x,
                        std::vector<Eigen::MatrixXd> z = {},
                        std::vector<std::string> unit_labels = {},
                        std::vector<std::string> time_labels = {});

void validate(const PanelDataset& panel);

/// Column roles for long-format input. Empty regressor list means "every
/// column named x<k>"; empty instrument list means "every column named z<k>".
struct ColumnSchema {
  std::string unit = "unit";
  std::string time = "time";
  std::string outcome = "y";
  std::vector<std::string> regressors;
  std::vector<std::string> instruments;
};

/// Reads a long-format CSV with a mandatory header row. Rows are sorted by
/// (unit, time); time labels are ordered numerically when every label parses
/// as a number and lexicographically otherwise.
PanelDataset load_panel(std::istream& in, const ColumnSchema& schema = {});
PanelDataset load_panel_file(const std::string& path, const ColumnSchema& schema = {});

/// Writes the panel back in the long format accepted by load_panel.
void write_panel_csv(std::ostream& out, const PanelDataset& panel);

enum class TimeEffects { unit_regressor, between };

/// First-differenced model in stacked form. Observation (i, t) lives in row
/// t·n + i (t is 0-based, stored t = 0 is the difference between periods 1 and 2).
/// xu/zu rows are (X_{t+1}', −X_t', 1); the unit column is dropped in between mode.
struct DifferencedPanel {
  Eigen::Index n = 0;
  Eigen::Index t_diff = 0;       // stored length (power of two after padding)
  Eigen::Index t_orig_diff = 0;  // T − 1
  int levels = 0;                // L with t_diff = 2^{L−1}; 0 while non-dyadic
  int P = 0;
  bool unit_column = true;
  Eigen::VectorXd dy;
  Eigen::MatrixXd xu;
  Eigen::MatrixXd zu;

  Eigen::Index width() const { return xu.cols(); }
  Eigen::Index row(Eigen::Index i, Eigen::Index t) const { return t * n + i; }
};

DifferencedPanel first_difference(const PanelDataset& panel);

/// Extends the differenced sample to the next power of two by mirroring the last
/// observations: appended slot T₀+j copies slot T₀−(j−1) (1-based).
DifferencedPanel reflect_pad(const DifferencedPanel& dp);

/// Cross-sectional demeaning of an n × T array (each column gets mean zero).
Eigen::MatrixXd dot_transform(const Eigen::MatrixXd& series);

/// Between transform of a differenced panel: demeans dy/xu/zu across units at
/// every t and drops the unit regressor.
DifferencedPanel between_transform(const DifferencedPanel& dp);

/// first_difference → (between) → reflect_pad.
DifferencedPanel prepare_differenced(const PanelDataset& panel, TimeEffects mode);

/// Two-way (unit and time) demeaning of an n × T array.
Eigen::MatrixXd within_transform(const Eigen::MatrixXd& series);

enum class InstrumentMode { self, two_stage };

/// Returns a copy whose z holds exactly P columns aligned with x. In self mode
/// z := x. In two_stage mode each endogenous regressor (all of them when
/// `endogenous` is empty) is replaced by its fitted values from a two-way
/// fixed-effects regression on the instrument columns and the exogenous
/// regressors; exogenous regressors instrument themselves.
PanelDataset prepare_instruments(const PanelDataset& panel, InstrumentMode mode,
                                 const std::vector<int>& endogenous = {});

struct ModelComponents {
  double mu = 0.0;
  Eigen::VectorXd alpha;  // length n, sums to zero
  Eigen::VectorXd theta;  // length T, sums to zero
};

/// Overall, unit and time averages of R_it = Y_it − Σ_p X_it,p β_{t,p};
/// beta_path is T × P.
ModelComponents recover_effects(const PanelDataset& panel, const Eigen::MatrixXd& beta_path);

}  // namespace saw
