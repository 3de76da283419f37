#include <doctest.h>

#include <cmath>

#include "saw/dgp_sim.hpp"
#include "saw/errors.hpp"

using Eigen::MatrixXd;

TEST_CASE("true_beta jump grid") {
  const auto two = saw::true_beta(2, 33, 3.0);
  CHECK(two.taus == std::vector<int>{10, 21});
  CHECK(two.values(0) == -1.0);
  CHECK(two.values(9) == -1.0);
  CHECK(two.values(10) == 1.0);
  CHECK(two.values(21) == -1.0);
  CHECK(two.values(32) == -1.0);
  CHECK(saw::true_beta(3, 33, 4.0).taus == std::vector<int>{8, 16, 24});
  const auto none = saw::true_beta(0, 33, 4.0);
  CHECK(none.taus.empty());
  CHECK((none.values.array() == -4.0 / 3.0).all());
  CHECK_THROWS_AS(saw::true_beta(-1, 33, 1.0), saw::Error);
}

TEST_CASE("signal amplitude map") {
  bool approx = true;
  CHECK(saw::signal_amplitude(30, &approx) == 7.0);
  CHECK_FALSE(approx);
  CHECK(saw::signal_amplitude(60) == 5.0);
  CHECK(saw::signal_amplitude(120) == 4.0);
  CHECK(saw::signal_amplitude(300) == 3.0);
  CHECK(saw::signal_amplitude(100, &approx) == 4.0);
  CHECK(approx);
  CHECK(saw::signal_amplitude(1000, &approx) == 3.0);
  CHECK(approx);
}

TEST_CASE("generation is deterministic in the seed") {
  saw::DgpSpec spec;
  spec.dgp = 1;
  spec.n = 120;
  spec.T = 33;
  spec.seed = 7;
  const auto a = saw::generate(spec);
  const auto b = saw::generate(spec);
  CHECK(a.panel.y == b.panel.y);
  CHECK(a.panel.x[0] == b.panel.x[0]);
  CHECK(a.panel.x[1] == b.panel.x[1]);
  spec.seed = 8;
  CHECK(saw::generate(spec).panel.y != a.panel.y);
  CHECK(saw::replication_seed(1, 0) != saw::replication_seed(1, 1));
  CHECK(saw::replication_seed(1, 0) != saw::replication_seed(2, 0));
}

TEST_CASE("truth records per DGP") {
  saw::DgpSpec spec;
  spec.n = 30;
  spec.T = 33;
  spec.dgp = 1;
  auto g = saw::generate(spec);
  CHECK(g.panel.P() == 2);
  CHECK(g.truth.taus[0] == std::vector<int>{10, 21});
  CHECK(g.truth.taus[1] == std::vector<int>{8, 16, 24});
  CHECK(g.truth.a_n == 7.0);

  spec.dgp = 2;
  g = saw::generate(spec);
  CHECK(g.panel.has_instruments());
  CHECK(g.truth.taus[0] == std::vector<int>{8, 16, 24});

  spec.dgp = 5;
  g = saw::generate(spec);
  CHECK(g.truth.theta_taus.size() == 3);
  CHECK(g.truth.theta(0) == doctest::Approx(-7.0 / 3.0));

  spec.dgp = 6;
  g = saw::generate(spec);
  CHECK(g.truth.taus[0].empty());
  CHECK((g.truth.beta.array() == 1.0).all());

  spec.dgp = 4;
  spec.jumps = 1;
  CHECK(saw::generate(spec).truth.taus[0] == std::vector<int>{16});
}

TEST_CASE("zero noise reproduces the structural equation exactly") {
  for (int dgp = 1; dgp <= 6; ++dgp) {
    saw::DgpSpec spec;
    spec.dgp = dgp;
    spec.n = 20;
    spec.T = 17;
    spec.noise_scale = 0.0;
    const auto g = saw::generate(spec);
    MatrixXd fitted = MatrixXd::Zero(20, 17);
    fitted.colwise() += g.truth.alpha;
    fitted.rowwise() += g.truth.theta.transpose();
    for (int p = 0; p < g.panel.P(); ++p) {
      fitted += (g.panel.x[p].array().rowwise() * g.truth.beta.col(p).transpose().array()).matrix();
    }
    CHECK((fitted - g.panel.y).cwiseAbs().maxCoeff() < 1e-12);
    const auto effects = saw::recover_effects(g.panel, g.truth.beta);
    const double theta_mean = g.truth.theta.mean();
    const double alpha_mean = g.truth.alpha.mean();
    CHECK(effects.mu == doctest::Approx(alpha_mean + theta_mean));
    CHECK(((effects.alpha.array() - (g.truth.alpha.array() - alpha_mean)).abs() < 1e-10).all());
    CHECK(((effects.theta.array() - (g.truth.theta.array() - theta_mean)).abs() < 1e-10).all());
  }
}

TEST_CASE("noise parameterisation switch") {
  saw::DgpSpec spec;
  spec.dgp = 1;
  spec.n = 300;
  spec.T = 33;
  auto residual_var = [&](saw::NoiseParam param) {
    spec.noise_param = param;
    const auto g = saw::generate(spec);
    MatrixXd r = g.panel.y;
    r.colwise() -= g.truth.alpha;
    for (int p = 0; p < 2; ++p) r -= (g.panel.x[p].array().rowwise() * g.truth.beta.col(p).transpose().array()).matrix();
    return r.array().square().mean();
  };
  CHECK(residual_var(saw::NoiseParam::variance) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(residual_var(saw::NoiseParam::sd) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("invalid specs") {
  saw::DgpSpec spec;
  spec.dgp = 7;
  CHECK_THROWS_AS(saw::generate(spec), saw::Error);
  spec.dgp = 1;
  spec.T = 2;
  CHECK_THROWS_AS(saw::generate(spec), saw::Error);
  spec.T = 33;
  spec.noise_scale = -1.0;
  CHECK_THROWS_AS(saw::generate(spec), saw::Error);
  spec.noise_scale = 1.0;
  CHECK_THROWS_AS(saw::run_monte_carlo(spec, 0), saw::Error);
}

TEST_CASE("monte carlo results do not depend on the thread count") {
  saw::DgpSpec spec;
  spec.dgp = 1;
  spec.n = 30;
  spec.T = 17;
  spec.seed = 3;
  saw::MonteCarloOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = saw::run_monte_carlo(spec, 12, one);
  const auto b = saw::run_monte_carlo(spec, 12, many);
  REQUIRE(a.records.size() == 12);
  for (std::size_t r = 0; r < 12; ++r) {
    CHECK(a.records[r].rep == static_cast<int>(r));
    CHECK(a.records[r].taus == b.records[r].taus);
    CHECK(a.records[r].coef == b.records[r].coef);
    CHECK(a.records[r].mse == b.records[r].mse);
  }
  for (int p = 0; p < 2; ++p) {
    CHECK(a.s_tilde[p].mean == b.s_tilde[p].mean);
    CHECK(a.mse[p].sd == b.mse[p].sd);
  }
}

TEST_CASE("aggregates are recomputable from the records") {
  saw::DgpSpec spec;
  spec.dgp = 4;
  spec.n = 60;
  spec.T = 17;
  auto mc = saw::run_monte_carlo(spec, 8);
  std::vector<double> s;
  for (const auto& r : mc.records) s.push_back(r.s_tilde[0]);
  const auto direct = saw::summarize(s);
  CHECK(mc.s_tilde[0].mean == doctest::Approx(direct.mean));
  CHECK(mc.s_tilde[0].sd == doctest::Approx(direct.sd));
  const auto before = mc.hd[0];
  saw::aggregate(mc);
  CHECK(mc.hd[0].mean == before.mean);

  const auto sm = saw::summarize({1.0, 2.0, 3.0});
  CHECK(sm.mean == 2.0);
  CHECK(sm.sd == 1.0);
}

TEST_CASE("noise-free replications detect the exact truth") {
  for (int dgp : {1, 3, 4, 6}) {
    saw::DgpSpec spec;
    spec.dgp = dgp;
    spec.n = 30;
    spec.T = 33;
    spec.noise_scale = 0.0;
    const auto mc = saw::run_monte_carlo(spec, 5);
    CHECK(mc.failures == 0);
    for (const auto& r : mc.records) {
      for (double h : r.hd) CHECK(h == 0.0);
      for (double m : r.mse) CHECK(m < 1e-16);
    }
  }
}

TEST_CASE("failed replications are counted, not thrown") {
  saw::DgpSpec spec;
  spec.dgp = 1;
  spec.n = 30;
  spec.T = 17;
  saw::MonteCarloOptions opts;
  opts.detector = [](const saw::PanelDataset&) {
    return std::vector<std::vector<int>>{{3, 3}, {}};
  };
  const auto mc = saw::run_monte_carlo(spec, 4, opts);
  CHECK(mc.failures == 4);
  CHECK(mc.records[0].error.find("empty") != std::string::npos);
  CHECK(mc.s_tilde.empty());
}

TEST_CASE("a plugged-in detector replaces SAW detection") {
  saw::DgpSpec spec;
  spec.dgp = 1;
  spec.n = 120;
  spec.T = 33;
  saw::MonteCarloOptions opts;
  opts.detector = [](const saw::PanelDataset&) {
    return std::vector<std::vector<int>>{{10, 21}, {8, 16, 24}};
  };
  const auto mc = saw::run_monte_carlo(spec, 3, opts);
  for (const auto& r : mc.records) {
    CHECK(r.hd[0] == 0.0);
    CHECK(r.s_tilde[1] == 3);
  }
}

TEST_CASE("detection quality does not degrade along the sample-size grid") {
  double previous = 1.0;
  for (int n : {30, 60, 120, 300}) {
    saw::DgpSpec spec;
    spec.dgp = 1;
    spec.n = n;
    spec.T = 33;
    spec.seed = 1;
    const auto mc = saw::run_monte_carlo(spec, 100);
    const double hd = 0.5 * (mc.hd[0].mean + mc.hd[1].mean);
    MESSAGE("n = " << n << ": mean HD/T " << hd);
    CHECK(hd <= previous + 1e-12);
    previous = hd;
  }
}
