#include "saw/panel_data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

#include "saw/csv.hpp"
#include "saw/errors.hpp"

namespace saw {
namespace {

bool all_numeric(const std::vector<std::string>& labels) {
  return std::all_of(labels.begin(), labels.end(),
                     [](const std::string& s) { return csv::parse_double(s).has_value(); });
}

void sort_labels(std::vector<std::string>& labels) {
  if (all_numeric(labels)) {
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return *csv::parse_double(a) < *csv::parse_double(b);
    });
  } else {
    std::sort(labels.begin(), labels.end());
  }
}

std::vector<std::string> numbered_columns(const std::vector<std::string>& header, char prefix) {
  const std::regex pattern(std::string(1, prefix) + "([0-9]+)");
  std::vector<std::pair<int, std::string>> found;
  for (const auto& h : header) {
    std::smatch m;
    if (std::regex_match(h, m, pattern)) found.emplace_back(std::stoi(m[1].str()), h);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> names;
  for (auto& [idx, name] : found) names.push_back(name);
  return names;
}

std::vector<std::string> default_labels(Eigen::Index count) {
  std::vector<std::string> labels;
  for (Eigen::Index i = 1; i <= count; ++i) labels.push_back(std::to_string(i));
  return labels;
}

bool is_missing_token(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "null";
}

bool is_power_of_two(Eigen::Index v) { return v > 0 && (v & (v - 1)) == 0; }

int levels_for(Eigen::Index t_diff) {
  int levels = 1;
  while ((Eigen::Index{1} << (levels - 1)) < t_diff) ++levels;
  return levels;
}

// Least-squares projection residual of `target` on the columns of `design`.
Eigen::VectorXd projection_residual(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                    const std::string& what) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) {
    fail(ErrorCode::RankDeficientFirstStage,
         "first-stage cross-product is singular for " + what + " (rank " +
             std::to_string(qr.rank()) + " of " + std::to_string(design.cols()) + ")");
  }
  return target - design * qr.solve(target);
}

Eigen::Map<const Eigen::VectorXd> flat(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace

void validate(const PanelDataset& p) {
  if (p.n < 1) fail(ErrorCode::InvalidPanel, "panel needs at least one unit");
  if (p.T < 3) fail(ErrorCode::InvalidPanel, "panel needs at least three periods");
  if (p.x.empty()) fail(ErrorCode::InvalidPanel, "panel needs at least one regressor");
  auto check = [&](const Eigen::MatrixXd& m, const std::string& what) {
    if (m.rows() != p.n || m.cols() != p.T) {
      fail(ErrorCode::ShapeMismatch, what + " is not n x T");
    }
    if (!m.allFinite()) fail(ErrorCode::NonNumericValue, what + " has non-finite values");
  };
  check(p.y, "outcome");
  for (std::size_t k = 0; k < p.x.size(); ++k) check(p.x[k], "regressor " + std::to_string(k + 1));
  for (std::size_t k = 0; k < p.z.size(); ++k) check(p.z[k], "instrument " + std::to_string(k + 1));
  if (static_cast<Eigen::Index>(p.unit_labels.size()) != p.n ||
      static_cast<Eigen::Index>(p.time_labels.size()) != p.T) {
    fail(ErrorCode::ShapeMismatch, "label counts do not match the panel dimensions");
  }
}

PanelDataset make_panel(Eigen::MatrixXd y, std::vector<Eigen::MatrixXd> x,
                        std::vector<Eigen::MatrixXd> z, std::vector<std::string> unit_labels,
                        std::vector<std::string> time_labels) {
  PanelDataset p;
  p.n = y.rows();
  p.T = y.cols();
  p.y = std::move(y);
  p.x = std::move(x);
  p.z = std::move(z);
  p.unit_labels = unit_labels.empty() ? default_labels(p.n) : std::move(unit_labels);
  p.time_labels = time_labels.empty() ? default_labels(p.T) : std::move(time_labels);
  for (int k = 1; k <= p.P(); ++k) p.regressor_names.push_back("x" + std::to_string(k));
  for (int k = 1; k <= p.Q(); ++k) p.instrument_names.push_back("z" + std::to_string(k));
  validate(p);
  return p;
}

PanelDataset load_panel(std::istream& in, const ColumnSchema& schema) {
  const csv::Table table = csv::read(in);

  auto require = [&](const std::string& name) {
    auto idx = table.column(name);
    if (!idx) fail(ErrorCode::MissingColumn, "missing column '" + name + "'");
    return *idx;
  };
  const std::size_t unit_col = require(schema.unit);
  const std::size_t time_col = require(schema.time);
  const std::size_t y_col = require(schema.outcome);

  const auto regressors =
      schema.regressors.empty() ? numbered_columns(table.header, 'x') : schema.regressors;
  const auto instruments =
      schema.instruments.empty() ? numbered_columns(table.header, 'z') : schema.instruments;
  if (regressors.empty()) fail(ErrorCode::MissingColumn, "no regressor columns (x1..xP)");
  std::vector<std::size_t> x_cols, z_cols;
  for (const auto& name : regressors) x_cols.push_back(require(name));
  for (const auto& name : instruments) z_cols.push_back(require(name));

  std::vector<std::string> units, times;
  {
    std::map<std::string, int> seen_u, seen_t;
    for (const auto& row : table.rows) {
      if (seen_u.emplace(row[unit_col], 0).second) units.push_back(row[unit_col]);
      if (seen_t.emplace(row[time_col], 0).second) times.push_back(row[time_col]);
    }
  }
  sort_labels(units);
  sort_labels(times);
  std::map<std::string, Eigen::Index> unit_index, time_index;
  for (std::size_t i = 0; i < units.size(); ++i) unit_index[units[i]] = static_cast<Eigen::Index>(i);
  for (std::size_t t = 0; t < times.size(); ++t) time_index[times[t]] = static_cast<Eigen::Index>(t);

  const auto n = static_cast<Eigen::Index>(units.size());
  const auto T = static_cast<Eigen::Index>(times.size());
  PanelDataset p;
  p.n = n;
  p.T = T;
  p.y = Eigen::MatrixXd::Zero(n, T);
  p.x.assign(x_cols.size(), Eigen::MatrixXd::Zero(n, T));
  p.z.assign(z_cols.size(), Eigen::MatrixXd::Zero(n, T));
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, T, false);

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const Eigen::Index i = unit_index.at(row[unit_col]);
    const Eigen::Index t = time_index.at(row[time_col]);
    const std::string cell = "(unit " + row[unit_col] + ", time " + row[time_col] + ")";
    if (present(i, t)) fail(ErrorCode::DuplicateCell, "duplicate cell " + cell);
    present(i, t) = true;
    auto value = [&](std::size_t col) {
      const std::string& text = row[col];
      if (is_missing_token(text)) {
        fail(ErrorCode::UnbalancedPanel,
             "missing value in column '" + table.header[col] + "' at " + cell);
      }
      auto v = csv::parse_double(text);
      if (!v) {
        fail(ErrorCode::NonNumericValue, "non-numeric value '" + text + "' in column '" +
                                             table.header[col] + "' at " + cell);
      }
      return *v;
    };
    p.y(i, t) = value(y_col);
    for (std::size_t k = 0; k < x_cols.size(); ++k) p.x[k](i, t) = value(x_cols[k]);
    for (std::size_t k = 0; k < z_cols.size(); ++k) p.z[k](i, t) = value(z_cols[k]);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < T; ++t) {
      if (!present(i, t)) {
        fail(ErrorCode::UnbalancedPanel,
             "missing cell (unit " + units[i] + ", time " + times[t] + ")");
      }
    }
  }

  p.unit_labels = std::move(units);
  p.time_labels = std::move(times);
  p.regressor_names = regressors;
  p.instrument_names = instruments;
  validate(p);
  return p;
}

PanelDataset load_panel_file(const std::string& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return load_panel(in, schema);
}

void write_panel_csv(std::ostream& out, const PanelDataset& p) {
  out << "unit,time,y";
  for (int k = 0; k < p.P(); ++k) out << ",x" << k + 1;
  for (int k = 0; k < p.Q(); ++k) out << ",z" << k + 1;
  out << '\n';
  std::ostringstream num;
  num.precision(17);
  for (Eigen::Index i = 0; i < p.n; ++i) {
    for (Eigen::Index t = 0; t < p.T; ++t) {
      num.str("");
      num << p.y(i, t);
      for (const auto& m : p.x) num << ',' << m(i, t);
      for (const auto& m : p.z) num << ',' << m(i, t);
      out << csv::escape(p.unit_labels[i]) << ',' << csv::escape(p.time_labels[t]) << ','
          << num.str() << '\n';
    }
  }
}

DifferencedPanel first_difference(const PanelDataset& panel) {
  validate(panel);
  const Eigen::Index n = panel.n;
  const Eigen::Index td = panel.T - 1;
  const int P = panel.P();
  const auto& inst = panel.instruments();
  if (static_cast<int>(inst.size()) != P) {
    fail(ErrorCode::ShapeMismatch,
         "instrument count differs from regressor count; call prepare_instruments first");
  }

  DifferencedPanel dp;
  dp.n = n;
  dp.t_diff = td;
  dp.t_orig_diff = td;
  dp.levels = is_power_of_two(td) ? levels_for(td) : 0;
  dp.P = P;
  dp.unit_column = true;
  const Eigen::Index width = 2 * P + 1;
  dp.dy.resize(n * td);
  dp.xu.resize(n * td, width);
  dp.zu.resize(n * td, width);
  for (Eigen::Index t = 0; t < td; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index r = dp.row(i, t);
      dp.dy(r) = panel.y(i, t + 1) - panel.y(i, t);
      for (int p = 0; p < P; ++p) {
        dp.xu(r, p) = panel.x[p](i, t + 1);
        dp.xu(r, p + P) = -panel.x[p](i, t);
        dp.zu(r, p) = inst[p](i, t + 1);
        dp.zu(r, p + P) = -inst[p](i, t);
      }
      dp.xu(r, width - 1) = 1.0;
      dp.zu(r, width - 1) = 1.0;
    }
  }
  return dp;
}

DifferencedPanel reflect_pad(const DifferencedPanel& dp) {
  if (dp.t_diff < 2) fail(ErrorCode::InvalidArgument, "reflect_pad needs at least two periods");
  DifferencedPanel out = dp;
  if (is_power_of_two(dp.t_diff)) {
    out.levels = levels_for(dp.t_diff);
    return out;
  }
  Eigen::Index target = 1;
  while (target <= dp.t_diff) target <<= 1;
  const Eigen::Index n = dp.n;
  const Eigen::Index t0 = dp.t_diff;
  const Eigen::Index m = target - t0;
  out.t_diff = target;
  out.levels = levels_for(target);
  out.dy.resize(n * target);
  out.xu.resize(n * target, dp.width());
  out.zu.resize(n * target, dp.width());
  out.dy.head(n * t0) = dp.dy;
  out.xu.topRows(n * t0) = dp.xu;
  out.zu.topRows(n * t0) = dp.zu;
  for (Eigen::Index j = 1; j <= m; ++j) {
    const Eigen::Index dst = t0 - 1 + j;  // 0-based slot T0+j
    const Eigen::Index src = t0 - j;      // 0-based slot T0−(j−1)
    out.dy.segment(dst * n, n) = dp.dy.segment(src * n, n);
    out.xu.middleRows(dst * n, n) = dp.xu.middleRows(src * n, n);
    out.zu.middleRows(dst * n, n) = dp.zu.middleRows(src * n, n);
  }
  return out;
}

Eigen::MatrixXd dot_transform(const Eigen::MatrixXd& series) {
  return series.rowwise() - series.colwise().mean();
}

Eigen::MatrixXd within_transform(const Eigen::MatrixXd& series) {
  const double grand = series.mean();
  Eigen::MatrixXd out = series.rowwise() - series.colwise().mean();
  out.colwise() -= series.rowwise().mean();
  out.array() += grand;
  return out;
}

DifferencedPanel between_transform(const DifferencedPanel& dp) {
  DifferencedPanel out = dp;
  const Eigen::Index keep = dp.unit_column ? dp.width() - 1 : dp.width();
  out.xu = dp.xu.leftCols(keep);
  out.zu = dp.zu.leftCols(keep);
  out.unit_column = false;
  for (Eigen::Index t = 0; t < dp.t_diff; ++t) {
    auto dy = out.dy.segment(t * dp.n, dp.n);
    dy.array() -= dy.mean();
    auto xb = out.xu.middleRows(t * dp.n, dp.n);
    xb.rowwise() -= xb.colwise().mean();
    auto zb = out.zu.middleRows(t * dp.n, dp.n);
    zb.rowwise() -= zb.colwise().mean();
  }
  return out;
}

DifferencedPanel prepare_differenced(const PanelDataset& panel, TimeEffects mode) {
  DifferencedPanel dp = first_difference(panel);
  if (mode == TimeEffects::between) dp = between_transform(dp);
  return reflect_pad(dp);
}

PanelDataset prepare_instruments(const PanelDataset& panel, InstrumentMode mode,
                                 const std::vector<int>& endogenous) {
  validate(panel);
  PanelDataset out = panel;
  if (mode == InstrumentMode::self) {
    out.z = panel.x;
    out.instrument_names = panel.regressor_names;
    return out;
  }

  const int P = panel.P();
  std::vector<bool> is_endog(P, endogenous.empty());
  for (int p : endogenous) {
    if (p < 0 || p >= P) fail(ErrorCode::InvalidArgument, "endogenous index out of range");
    is_endog[p] = true;
  }
  const int n_endog = static_cast<int>(std::count(is_endog.begin(), is_endog.end(), true));
  if (panel.Q() < n_endog) {
    fail(ErrorCode::InvalidArgument, "two-stage mode needs at least as many instruments (" +
                                         std::to_string(panel.Q()) +
                                         ") as endogenous regressors (" +
                                         std::to_string(n_endog) + ")");
  }

  // First-stage design: within-transformed instruments and exogenous regressors.
  std::vector<Eigen::MatrixXd> columns;
  for (const auto& zq : panel.z) columns.push_back(within_transform(zq));
  for (int p = 0; p < P; ++p) {
    if (!is_endog[p]) columns.push_back(within_transform(panel.x[p]));
  }
  const Eigen::Index rows = panel.n * panel.T;
  Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) design.col(static_cast<Eigen::Index>(c)) = flat(columns[c]);

  out.z.clear();
  out.instrument_names.clear();
  for (int p = 0; p < P; ++p) {
    if (!is_endog[p]) {
      out.z.push_back(panel.x[p]);
      out.instrument_names.push_back(panel.regressor_names.at(p));
      continue;
    }
    const Eigen::MatrixXd xw = within_transform(panel.x[p]);
    const Eigen::VectorXd resid =
        projection_residual(design, flat(xw), panel.regressor_names.at(p));
    Eigen::MatrixXd fitted = panel.x[p];
    fitted -= Eigen::Map<const Eigen::MatrixXd>(resid.data(), panel.n, panel.T);
    out.z.push_back(std::move(fitted));
    out.instrument_names.push_back(panel.regressor_names.at(p) + "_hat");
  }
  return out;
}

ModelComponents recover_effects(const PanelDataset& panel, const Eigen::MatrixXd& beta_path) {
  if (beta_path.rows() != panel.T || beta_path.cols() != panel.P()) {
    fail(ErrorCode::ShapeMismatch, "beta_path must be T x P");
  }
  Eigen::MatrixXd r = panel.y;
  for (int p = 0; p < panel.P(); ++p) {
    r -= (panel.x[p].array().rowwise() * beta_path.col(p).transpose().array()).matrix();
  }
  ModelComponents mc;
  mc.mu = r.mean();
  mc.alpha = r.rowwise().mean().array() - mc.mu;
  mc.theta = r.colwise().mean().transpose().array() - mc.mu;
  return mc;
}

}  // namespace saw
