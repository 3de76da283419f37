#include "saw/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "saw/csv.hpp"
#include "saw/errors.hpp"

namespace saw::report {
namespace {

using nlohmann::json;

std::string label(const PipelineResult& r, int period) {
  return r.panel.time_labels.at(static_cast<std::size_t>(period - 1));
}

std::string name_of(const PipelineResult& r, int p) {
  return r.panel.regressor_names.at(static_cast<std::size_t>(p));
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

const ChowTest* test_for(const PipelineResult& r, int p, int j) {
  for (const auto& t : r.post.tests) {
    if (t.p == p && t.j == j) return &t;
  }
  return nullptr;
}

}  // namespace

std::string saw_fit_json(const PipelineResult& r) {
  const auto& fit = r.saw;
  const auto& dp = r.differenced;
  const int P = r.panel.P();
  json doc;
  doc["lambda"] = fit.lambda;
  doc["kappa"] = fit.kappa;
  doc["v_hat"] = fit.v_hat;
  doc["degenerate_variance"] = fit.degenerate;
  doc["n"] = dp.n;
  doc["T_diff"] = dp.t_diff;
  doc["T_orig_diff"] = dp.t_orig_diff;
  doc["levels"] = dp.levels;
  json times = json::array();
  for (Eigen::Index s = 0; s < dp.t_orig_diff; ++s) times.push_back(label(r, static_cast<int>(s) + 2));
  doc["time"] = times;
  json paths = json::object();
  for (Eigen::Index c = 0; c < fit.gamma_hat.cols(); ++c) {
    std::string key;
    if (c < P) key = name_of(r, static_cast<int>(c));
    else if (c < 2 * P) key = name_of(r, static_cast<int>(c - P)) + "_lag";
    else key = "delta_theta";
    json hat = json::array(), raw = json::array();
    for (Eigen::Index s = 0; s < dp.t_orig_diff; ++s) {
      hat.push_back(fit.gamma_hat(s, c));
      raw.push_back(fit.gamma_raw(s, c));
    }
    paths[key] = {{"gamma_hat", hat}, {"gamma_raw", raw}};
  }
  doc["paths"] = paths;
  json nonzero = json::array();
  for (std::size_t j = 0; j < fit.b_shrunk.size(); ++j) {
    if (fit.b_shrunk[j].isZero(0.0)) continue;
    int level = 1;
    while ((std::size_t{1} << (level - 1)) <= j) ++level;
    const auto& b = fit.b_shrunk[j];
    json entry;
    entry["level"] = level;
    entry["k"] = j == 0 ? 1 : static_cast<int>(j - (std::size_t{1} << (level - 2))) + 1;
    entry["b"] = std::vector<double>(b.data(), b.data() + b.size());
    nonzero.push_back(entry);
  }
  doc["nonzero_coefficients"] = nonzero;
  return doc.dump(2);
}

std::string jumps_json(const PipelineResult& r) {
  json doc;
  doc["lambda"] = r.jumps.lambda;
  doc["T"] = r.jumps.T;
  json regs = json::array();
  for (int p = 0; p < r.jumps.P(); ++p) {
    const auto& rj = r.jumps.regressors[p];
    json locs = json::array(), periods = json::array();
    for (int tau : rj.tau) {
      locs.push_back(label(r, tau));
      periods.push_back(tau);
    }
    regs.push_back({{"regressor", name_of(r, p)},
                    {"count", rj.count()},
                    {"locations", locs},
                    {"periods", periods},
                    {"jump_sizes", rj.delta_beta}});
  }
  doc["regressors"] = regs;
  return doc.dump(2);
}

std::string post_saw_json(const PipelineResult& r) {
  json doc;
  doc["variance_case"] = r.post.variance_case;
  doc["D"] = r.design.D();
  json segs = json::array();
  for (const auto& row : r.post.segments) {
    segs.push_back({{"regressor", name_of(r, row.p)},
                    {"segment", row.j},
                    {"start", label(r, row.start + 1)},
                    {"end", label(r, row.end)},
                    {"coefficient", number(row.coef)},
                    {"std_error", number(row.se)}});
  }
  doc["segments"] = segs;
  json tests = json::array();
  for (const auto& t : r.post.tests) {
    tests.push_back({{"regressor", name_of(r, t.p)},
                     {"segment", t.j},
                     {"difference", number(t.diff)},
                     {"z", number(t.z)},
                     {"p_value", number(t.p_value)}});
  }
  doc["tests"] = tests;
  json cov = json::array();
  for (Eigen::Index i = 0; i < r.post.cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.post.cov.cols(); ++j) row.push_back(number(r.post.cov(i, j)));
    cov.push_back(row);
  }
  doc["covariance"] = cov;
  return doc.dump(2);
}

void write_report_csv(std::ostream& out, const PipelineResult& r) {
  out << "regressor,segment,start,end,coefficient,std_error,z,p_value\n";
  for (const auto& row : r.post.segments) {
    out << csv::escape(name_of(r, row.p)) << ',' << row.j << ',' << csv::escape(label(r, row.start + 1))
        << ',' << csv::escape(label(r, row.end)) << ',' << fixed(row.coef, 8) << ','
        << fixed(row.se, 8) << ',';
    if (const ChowTest* t = test_for(r, row.p, row.j)) {
      out << fixed(t->z, 4) << ',' << fixed(t->p_value, 6);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

std::string regressor_svg(const PipelineResult& r, int p) {
  const int width = 720, panel_h = 220, margin = 40;
  const Eigen::Index td = r.differenced.t_orig_diff;
  const int T = static_cast<int>(r.panel.T);
  std::vector<double> saw_path(static_cast<std::size_t>(td));
  for (Eigen::Index s = 0; s < td; ++s) saw_path[s] = r.saw.gamma_hat(s, p);
  std::vector<double> step(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) step[t] = r.beta_path(t, p);

  auto panel = [&](const std::vector<double>& ys, int first_period, int top, const std::string& title,
                   bool steps) {
    double lo = *std::min_element(ys.begin(), ys.end());
    double hi = *std::max_element(ys.begin(), ys.end());
    if (hi - lo < 1e-12) {
      lo -= 1.0;
      hi += 1.0;
    }
    auto xpos = [&](int period) {
      return margin + (width - 2.0 * margin) * (period - 1) / std::max(T - 1, 1);
    };
    auto ypos = [&](double v) { return top + panel_h - margin / 2.0 - (panel_h - margin) * (v - lo) / (hi - lo); };
    std::ostringstream s;
    s << "<text x=\"" << margin << "\" y=\"" << top + 16 << "\" font-size=\"13\">" << title << "</text>\n";
    s << "<rect x=\"" << margin << "\" y=\"" << top + margin / 2 << "\" width=\"" << width - 2 * margin
      << "\" height=\"" << panel_h - margin << "\" fill=\"none\" stroke=\"#999\"/>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const int period = first_period + static_cast<int>(i);
      if (steps && i > 0) s << fixed(xpos(period), 2) << ',' << fixed(ypos(ys[i - 1]), 2) << ' ';
      s << fixed(xpos(period), 2) << ',' << fixed(ypos(ys[i]), 2) << ' ';
    }
    s << "\"/>\n";
    s << "<text x=\"4\" y=\"" << fixed(ypos(hi) + 4, 1) << "\" font-size=\"10\">" << fixed(hi, 2) << "</text>\n";
    s << "<text x=\"4\" y=\"" << fixed(ypos(lo) + 4, 1) << "\" font-size=\"10\">" << fixed(lo, 2) << "</text>\n";
    s << "<text x=\"" << margin << "\" y=\"" << top + panel_h + 4 << "\" font-size=\"10\">"
      << r.panel.time_labels.front() << "</text>\n";
    s << "<text x=\"" << width - margin - 20 << "\" y=\"" << top + panel_h + 4 << "\" font-size=\"10\">"
      << r.panel.time_labels.back() << "</text>\n";
    return s.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << 2 * panel_h + 30 << "\">\n";
  svg << panel(saw_path, 2, 0, "SAW estimate of " + name_of(r, p), false);
  svg << panel(step, 1, panel_h + 10, "post-SAW estimate of " + name_of(r, p), true);
  svg << "</svg>\n";
  return svg.str();
}

void write_fit_artifacts(const std::string& dir, const PipelineResult& r, bool plot) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  const fs::path root(dir);
  write_file(root / "saw_fit.json", saw_fit_json(r) + "\n");
  write_file(root / "jumps.json", jumps_json(r) + "\n");
  write_file(root / "post_saw.json", post_saw_json(r) + "\n");
  std::ostringstream table;
  write_report_csv(table, r);
  write_file(root / "report.csv", table.str());
  if (plot) {
    for (int p = 0; p < r.panel.P(); ++p) write_file(root / (name_of(r, p) + ".svg"), regressor_svg(r, p));
  }
}

void write_mc_table(std::ostream& out, const McResult& mc) {
  const std::size_t P = mc.s_tilde.size();
  out << "dgp,T,n,reps,failures,a_n_approximate";
  for (std::size_t p = 1; p <= P; ++p) {
    out << ",S" << p << "_mean,S" << p << "_sd,HD" << p << "_T_mean,HD" << p << "_T_sd,MSE" << p
        << "_mean,MSE" << p << "_sd";
  }
  out << '\n';
  out << mc.spec.dgp << ',' << mc.spec.T << ',' << mc.spec.n << ',' << mc.reps << ',' << mc.failures
      << ',' << (mc.a_n_approximate ? 1 : 0);
  for (std::size_t p = 0; p < P; ++p) {
    for (const Summary& s : {mc.s_tilde[p], mc.hd[p], mc.mse[p]}) {
      out << ',' << fixed(s.mean) << ',' << fixed(s.sd);
    }
  }
  out << '\n';
}

void write_mc_summary(std::ostream& out, const McResult& mc) {
  out << "DGP" << mc.spec.dgp << "  T=" << mc.spec.T << "  n=" << mc.spec.n << "  reps=" << mc.reps
      << "  failed=" << mc.failures << (mc.a_n_approximate ? "  (a_n from nearest n)" : "") << '\n';
  for (std::size_t p = 0; p < mc.s_tilde.size(); ++p) {
    auto cell = [](const Summary& s, int digits) {
      return fixed(s.mean, digits) + " (" + fixed(s.sd, digits) + ")";
    };
    out << "  regressor " << p + 1 << ":  S " << cell(mc.s_tilde[p], 2) << "   HD/T "
        << cell(mc.hd[p], 2) << "   |b-beta|^2/T " << cell(mc.mse[p], 3) << '\n';
  }
}

}  // namespace saw::report
