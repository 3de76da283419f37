#include "saw/dgp_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "saw/errors.hpp"
#include "saw/jump_detect.hpp"
#include "saw/log.hpp"

namespace saw {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Draws {
 public:
  Draws(std::uint64_t seed, NoiseParam param) : engine_(seed), param_(param) {}

  // N(0, v) with v read as a variance or a standard deviation.
  double normal(double v) {
    const double sd = param_ == NoiseParam::variance ? std::sqrt(v) : v;
    return sd * std_normal_(engine_);
  }
  double standard() { return std_normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double sd_of(double v) const { return param_ == NoiseParam::variance ? std::sqrt(v) : v; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> std_normal_;
  NoiseParam param_;
};

void check_spec(const DgpSpec& s) {
  if (s.dgp < 1 || s.dgp > 6) fail(ErrorCode::InvalidArgument, "dgp must be 1..6");
  if (s.n < 1) fail(ErrorCode::InvalidArgument, "n must be positive");
  if (s.T < 3) fail(ErrorCode::InvalidArgument, "T must be at least 3");
  if (s.jumps < -1 || s.jumps >= s.T - 1) fail(ErrorCode::InvalidArgument, "invalid jump count");
  if (!(s.noise_scale >= 0.0)) fail(ErrorCode::InvalidArgument, "noise scale must be non-negative");
}

Eigen::MatrixXd regressor(Draws& d, const Eigen::VectorXd& alpha, int T) {
  Eigen::MatrixXd x(alpha.size(), T);
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    for (int t = 0; t < T; ++t) x(i, t) = 0.5 * alpha(i) + d.standard();
  }
  return x;
}

// e_it = ρ_i e_{i,t−1} + ζ_it, started from the stationary distribution.
Eigen::MatrixXd ar_errors(Draws& d, Eigen::Index n, int T, double zeta_v, double scale) {
  Eigen::MatrixXd e(n, T);
  const double zeta_sd = d.sd_of(zeta_v);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rho = d.uniform(0.25, 0.75);
    e(i, 0) = zeta_sd / std::sqrt(1.0 - rho * rho) * d.standard();
    for (int t = 1; t < T; ++t) e(i, t) = rho * e(i, t - 1) + zeta_sd * d.standard();
  }
  return scale * e;
}

}  // namespace

double signal_amplitude(int n, bool* approximate) {
  static const std::map<int, double> table{{30, 7.0}, {60, 5.0}, {120, 4.0}, {300, 3.0}};
  int best = 30;
  for (const auto& [key, value] : table) {
    if (std::abs(n - key) < std::abs(n - best)) best = key;
  }
  if (approximate) *approximate = table.find(n) == table.end();
  return table.at(best);
}

StepPath true_beta(int S, int T, double a) {
  if (S < 0) fail(ErrorCode::InvalidArgument, "jump count must be non-negative");
  StepPath path;
  path.values.resize(T);
  for (int j = 1; j <= S; ++j) {
    path.taus.push_back(static_cast<int>(std::floor(static_cast<double>(j) * (T - 1) / (S + 1))));
  }
  int start = 0;
  for (int j = 1; j <= S + 1; ++j) {
    const int end = j <= S ? path.taus[j - 1] : T;
    const double value = a / 3.0 * (j % 2 == 0 ? 1.0 : -1.0);
    for (int t = start; t < end; ++t) path.values(t) = value;
    start = end;
  }
  return path;
}

GeneratedPanel generate(const DgpSpec& spec) {
  check_spec(spec);
  const int n = spec.n;
  const int T = spec.T;
  const int S = spec.jumps < 0 ? 3 : spec.jumps;
  const double scale = spec.noise_scale;
  Draws d(spec.seed, spec.noise_param);

  GeneratedPanel g;
  DgpTruth& truth = g.truth;
  truth.a_n = signal_amplitude(n, &truth.a_n_approximate);
  truth.theta = Eigen::VectorXd::Zero(T);
  truth.alpha.resize(n);
  for (int i = 0; i < n; ++i) truth.alpha(i) = d.standard();

  std::vector<Eigen::MatrixXd> x, z;
  Eigen::MatrixXd noise(n, T);
  auto set_beta = [&](const std::vector<StepPath>& paths) {
    truth.beta.resize(T, static_cast<Eigen::Index>(paths.size()));
    for (std::size_t p = 0; p < paths.size(); ++p) {
      truth.beta.col(static_cast<Eigen::Index>(p)) = paths[p].values;
      truth.taus.push_back(paths[p].taus);
    }
  };

  switch (spec.dgp) {
    case 1: {
      set_beta({true_beta(2, T, truth.a_n), true_beta(3, T, truth.a_n)});
      x = {regressor(d, truth.alpha, T), regressor(d, truth.alpha, T)};
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < T; ++t) noise(i, t) = scale * d.normal(2.0);
      break;
    }
    case 2: {
      set_beta({true_beta(S, T, truth.a_n)});
      Eigen::MatrixXd inst = regressor(d, truth.alpha, T);
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < T; ++t) noise(i, t) = scale * d.normal(0.5);
      x = {3.0 * inst + noise};
      z = {inst};
      break;
    }
    case 3:
    case 5: {
      set_beta({true_beta(S, T, truth.a_n)});
      x = {regressor(d, truth.alpha, T)};
      const double hi = spec.dgp == 3 ? 3.0 : 2.0;
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < T; ++t) {
          const double sigma = std::sqrt(d.uniform(1.0, hi));
          noise(i, t) = scale * sigma * d.normal(0.5);
        }
      }
      if (spec.dgp == 5) {
        const StepPath theta = true_beta(T / 10, T, 7.0);
        truth.theta = theta.values;
        truth.theta_taus = theta.taus;
      }
      break;
    }
    case 4: {
      set_beta({true_beta(S, T, truth.a_n)});
      x = {regressor(d, truth.alpha, T)};
      noise = ar_errors(d, n, T, 3.0, scale);
      break;
    }
    default: {
      StepPath flat;
      flat.values = Eigen::VectorXd::Ones(T);
      set_beta({flat});
      x = {regressor(d, truth.alpha, T)};
      noise = ar_errors(d, n, T, 4.0, scale);
    }
  }

  Eigen::MatrixXd y = noise;
  y.colwise() += truth.alpha;
  y.rowwise() += truth.theta.transpose();
  for (std::size_t p = 0; p < x.size(); ++p) {
    y += (x[p].array().rowwise() * truth.beta.col(static_cast<Eigen::Index>(p)).transpose().array()).matrix();
  }
  g.panel = make_panel(std::move(y), std::move(x), std::move(z));
  return g;
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) {
  return splitmix64(splitmix64(master) ^ (rep + 0x632BE59BD9B4E019ULL));
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

void aggregate(McResult& result) {
  result.failures = 0;
  std::size_t P = 0;
  for (const auto& r : result.records) {
    if (r.failed) ++result.failures;
    else P = std::max(P, r.s_tilde.size());
  }
  result.s_tilde.assign(P, {});
  result.hd.assign(P, {});
  result.mse.assign(P, {});
  for (std::size_t p = 0; p < P; ++p) {
    std::vector<double> s, h, m;
    for (const auto& r : result.records) {
      if (r.failed) continue;
      s.push_back(r.s_tilde[p]);
      h.push_back(r.hd[p]);
      m.push_back(r.mse[p]);
    }
    result.s_tilde[p] = summarize(s);
    result.hd[p] = summarize(h);
    result.mse[p] = summarize(m);
  }
}

namespace {

McRecord run_replication(const DgpSpec& base, int rep, const MonteCarloOptions& opts) {
  McRecord rec;
  rec.rep = rep;
  DgpSpec spec = base;
  spec.seed = replication_seed(base.seed, static_cast<std::uint64_t>(rep));
  try {
    const GeneratedPanel g = generate(spec);
    PipelineOptions po = opts.pipeline;
    if (opts.oracle_taus) {
      po.known_taus = g.truth.taus;
    } else if (opts.detector) {
      po.known_taus = opts.detector(g.panel);
    }
    const PipelineResult res = run_pipeline(g.panel, po);
    const int P = g.panel.P();
    const double T = static_cast<double>(spec.T);
    for (int p = 0; p < P; ++p) {
      const auto& taus = res.design.taus[p];
      rec.taus.push_back(taus);
      rec.s_tilde.push_back(static_cast<int>(taus.size()));
      rec.hd.push_back(hausdorff(taus, g.truth.taus[p], T) / T);
      rec.mse.push_back((res.beta_path.col(p) - g.truth.beta.col(p)).squaredNorm() / T);
    }
    for (const SegmentRow& row : res.post.segments) {
      rec.column_p.push_back(row.p);
      rec.coef.push_back(row.coef);
      rec.se.push_back(row.se);
      rec.truth_coef.push_back(g.truth.beta(row.end - 1, row.p));
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

McResult run_monte_carlo(const DgpSpec& spec, int reps, const MonteCarloOptions& opts) {
  check_spec(spec);
  if (reps < 1) fail(ErrorCode::InvalidArgument, "replication count must be at least 1");
  McResult result;
  result.spec = spec;
  result.reps = reps;
  signal_amplitude(spec.n, &result.a_n_approximate);
  result.records.resize(static_cast<std::size_t>(reps));

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(reps));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) result.records[r] = run_replication(spec, r, opts);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  aggregate(result);
  if (result.failures > 0) {
    log::warn(std::to_string(result.failures) + " of " + std::to_string(reps) +
              " replications failed");
  }
  return result;
}

}  // namespace saw
