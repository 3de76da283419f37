#include "saw/haar_basis.hpp"

#include <cmath>
#include <string>

#include "saw/errors.hpp"

namespace saw::haar {
namespace {

void check_index(int l, int k, int L) {
  if (L < 2 || l < 2 || l > L || k < 1 || k > translations(l)) {
    fail(ErrorCode::IndexOutOfRange, "no Haar function (l=" + std::to_string(l) +
                                         ", k=" + std::to_string(k) + ") at depth " +
                                         std::to_string(L));
  }
}

}  // namespace

int translations(int l) { return l <= 1 ? 1 : 1 << (l - 2); }

int indicator(int l, int m, int t, int L) {
  const long width = 1L << (L - l);
  return t > width * (m - 1) && t <= width * m && t >= 1 && t <= (1L << (L - 1)) ? 1 : 0;
}

double psi(int l, int k, int t, int L) {
  check_index(l, k, L);
  const double amp = std::sqrt(static_cast<double>(1L << (l - 2)));
  return amp * (indicator(l, 2 * k - 1, t, L) - indicator(l, 2 * k, t, L));
}

Support support(int l, int k, int L) {
  check_index(l, k, L);
  const std::size_t half = std::size_t{1} << (L - l);
  Support s;
  s.begin = static_cast<std::size_t>(2 * k - 2) * half;
  s.mid = s.begin + half;
  s.end = s.mid + half;
  s.amplitude = std::sqrt(static_cast<double>(1L << (l - 2)));
  return s;
}

int depth_for_length(std::size_t length) {
  if (length < 1 || (length & (length - 1)) != 0) {
    fail(ErrorCode::NonDyadicLength,
         "length " + std::to_string(length) + " is not a power of two");
  }
  int L = 1;
  while ((std::size_t{1} << (L - 1)) < length) ++L;
  return L;
}

std::size_t HaarCoefficients::size() const {
  std::size_t total = 1;
  for (const auto& level : c) total += level.size();
  return total;
}

HaarCoefficients decompose(std::span<const double> g) {
  const int L = depth_for_length(g.size());
  const double tstar = static_cast<double>(g.size());
  std::vector<double> prefix(g.size() + 1, 0.0);
  for (std::size_t t = 0; t < g.size(); ++t) prefix[t + 1] = prefix[t] + g[t];

  HaarCoefficients out;
  out.depth = L;
  out.c1 = prefix.back() / tstar;
  for (int l = 2; l <= L; ++l) {
    std::vector<double> level(translations(l));
    for (int k = 1; k <= translations(l); ++k) {
      const Support s = support(l, k, L);
      const double pos = prefix[s.mid] - prefix[s.begin];
      const double neg = prefix[s.end] - prefix[s.mid];
      level[k - 1] = s.amplitude * (pos - neg) / tstar;
    }
    out.c.push_back(std::move(level));
  }
  return out;
}

std::vector<double> reconstruct(const HaarCoefficients& coeffs) {
  const int L = coeffs.depth;
  if (L < 1 || static_cast<int>(coeffs.c.size()) != L - 1) {
    fail(ErrorCode::InvalidArgument, "malformed Haar coefficient set");
  }
  std::vector<double> g(std::size_t{1} << (L - 1), coeffs.c1);
  for (int l = 2; l <= L; ++l) {
    if (static_cast<int>(coeffs.c[l - 2].size()) != translations(l)) {
      fail(ErrorCode::InvalidArgument, "level " + std::to_string(l) + " has the wrong width");
    }
    for (int k = 1; k <= translations(l); ++k) {
      const double v = coeffs.c[l - 2][k - 1];
      if (v == 0.0) continue;
      const Support s = support(l, k, L);
      for (std::size_t t = s.begin; t < s.mid; ++t) g[t] += s.amplitude * v;
      for (std::size_t t = s.mid; t < s.end; ++t) g[t] -= s.amplitude * v;
    }
  }
  return g;
}

std::size_t count_nonzero(const HaarCoefficients& coeffs, double tol) {
  std::size_t count = std::abs(coeffs.c1) > tol ? 1 : 0;
  for (const auto& level : coeffs.c) {
    for (double v : level) count += std::abs(v) > tol ? 1 : 0;
  }
  return count;
}

}  // namespace saw::haar
