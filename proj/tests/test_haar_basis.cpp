#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "saw/errors.hpp"
#include "saw/haar_basis.hpp"

namespace haar = saw::haar;

namespace {

// Brute-force dyadic block membership straight from the block definition.
bool in_block(int l, int m, int t, int L) {
  const int width = 1 << (L - l);
  for (int s = width * (m - 1) + 1; s <= width * m; ++s) {
    if (s == t) return true;
  }
  return false;
}

std::vector<double> dense_psi(int l, int k, int L) {
  std::vector<double> v;
  for (int t = 1; t <= 1 << (L - 1); ++t) v.push_back(haar::psi(l, k, t, L));
  return v;
}

std::vector<double> piecewise(int tstar, const std::set<int>& jumps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> level(-3.0, 3.0);
  std::vector<double> g(tstar);
  double current = level(rng);
  for (int t = 0; t < tstar; ++t) {
    if (jumps.count(t)) current += 1.0 + level(rng) * level(rng);
    g[t] = current;
  }
  return g;
}

}  // namespace

TEST_CASE("indicator") {
  CHECK(haar::indicator(3, 2, 2, 3) == 1);
  CHECK(haar::indicator(2, 1, 3, 3) == 0);
  CHECK(haar::indicator(2, 1, 0, 3) == 0);
  CHECK(haar::indicator(2, 2, 5, 3) == 0);
  const int L = 4;
  for (int l = 1; l <= L; ++l) {
    const int blocks = l == 1 ? 1 : 2 * haar::translations(l);
    for (int m = 1; m <= blocks; ++m) {
      for (int t = 1; t <= 8; ++t) {
        if (l == 1) continue;
        CHECK(haar::indicator(l, m, t, L) == (in_block(l, m, t, L) ? 1 : 0));
      }
    }
  }
}

TEST_CASE("psi values") {
  CHECK(dense_psi(2, 1, 3) == std::vector<double>{1, 1, -1, -1});
  const double r2 = std::sqrt(2.0);
  CHECK(dense_psi(3, 1, 3) == std::vector<double>{r2, -r2, 0, 0});
  CHECK_THROWS_AS(haar::psi(1, 1, 1, 3), saw::Error);
  CHECK_THROWS_AS(haar::psi(3, 3, 1, 3), saw::Error);
  CHECK_THROWS_AS(haar::psi(4, 1, 1, 3), saw::Error);
}

TEST_CASE("basis completeness, support size and orthonormality") {
  for (int L = 2; L <= 8; ++L) {
    const int tstar = 1 << (L - 1);
    int count = 1;
    std::vector<std::vector<double>> basis{std::vector<double>(tstar, 1.0)};
    for (int l = 2; l <= L; ++l) {
      count += haar::translations(l);
      for (int k = 1; k <= haar::translations(l); ++k) {
        basis.push_back(dense_psi(l, k, L));
        int support = 0;
        double sum = 0.0, sq = 0.0;
        for (double v : basis.back()) {
          support += v != 0.0;
          sum += v;
          sq += v * v;
        }
        CHECK(support == 1 << (L - l + 1));
        CHECK(std::abs(sum) < 1e-12);
        CHECK(sq == doctest::Approx(tstar));
      }
    }
    CHECK(count == tstar);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = 0; b < basis.size(); ++b) {
        double dot = 0.0;
        for (int t = 0; t < tstar; ++t) dot += basis[a][t] * basis[b][t];
        CHECK(std::abs(dot / tstar - (a == b ? 1.0 : 0.0)) < 1e-10);
      }
    }
  }
}

TEST_CASE("decompose and reconstruct") {
  SUBCASE("constant") {
    const auto c = haar::decompose(std::vector<double>{1, 1, 1, 1});
    CHECK(c.c1 == 1.0);
    CHECK(haar::count_nonzero(c) == 1);
  }
  SUBCASE("single step") {
    const auto c = haar::decompose(std::vector<double>{1, 1, 3, 3});
    CHECK(c.depth == 3);
    CHECK(c.c1 == doctest::Approx(2.0));
    CHECK(c.at(2, 1) == doctest::Approx(-1.0));
    CHECK(c.at(3, 1) == 0.0);
    CHECK(c.at(3, 2) == 0.0);
    CHECK(c.size() == 4);
  }
  SUBCASE("hand reconstruction") {
    haar::HaarCoefficients c;
    c.depth = 3;
    c.c1 = 2.0;
    c.c = {{-1.0}, {0.0, 0.0}};
    CHECK(haar::reconstruct(c) == std::vector<double>{1, 1, 3, 3});
    c.c1 = 0.0;
    c.c = {{0.0}, {0.0, 0.0}};
    CHECK(haar::reconstruct(c) == std::vector<double>(4, 0.0));
  }
  SUBCASE("matches the brute-force inner products, round-trips and is linear") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int L = 1; L <= 7; ++L) {
      const int tstar = 1 << (L - 1);
      std::vector<double> g(tstar), h(tstar), mix(tstar);
      for (int t = 0; t < tstar; ++t) {
        g[t] = nd(rng);
        h[t] = nd(rng);
        mix[t] = 2.5 * g[t] + h[t];
      }
      const auto cg = haar::decompose(g);
      const auto ch = haar::decompose(h);
      const auto cm = haar::decompose(mix);
      CHECK(cm.c1 == doctest::Approx(2.5 * cg.c1 + ch.c1).epsilon(1e-10));
      for (int l = 2; l <= L; ++l) {
        for (int k = 1; k <= haar::translations(l); ++k) {
          double brute = 0.0;
          for (int t = 1; t <= tstar; ++t) brute += haar::psi(l, k, t, L) * g[t - 1];
          CHECK(std::abs(cg.at(l, k) - brute / tstar) < 1e-12);
          CHECK(std::abs(cm.at(l, k) - (2.5 * cg.at(l, k) + ch.at(l, k))) < 1e-10);
        }
      }
      const auto back = haar::reconstruct(cg);
      for (int t = 0; t < tstar; ++t) CHECK(std::abs(back[t] - g[t]) < 1e-10);
    }
  }
  SUBCASE("non-dyadic input") {
    CHECK_THROWS_AS(haar::decompose(std::vector<double>{1, 2, 3}), saw::Error);
    CHECK_THROWS_AS(haar::decompose(std::vector<double>{}), saw::Error);
  }
}

TEST_CASE("sparsity bound for piecewise-constant functions") {
  std::mt19937_64 rng(5);
  for (int tstar : {4, 8, 16, 32}) {
    const int L = haar::depth_for_length(tstar);
    auto check = [&](const std::set<int>& jumps) {
      const auto c = haar::decompose(piecewise(tstar, jumps, rng));
      CHECK(haar::count_nonzero(c, 1e-12) <= (jumps.size() + 1) * static_cast<std::size_t>(L));
    };
    check({});
    for (int a = 1; a < tstar; ++a) {
      check({a});
      for (int b = a + 1; b < tstar; ++b) check({a, b});
    }
  }
}
