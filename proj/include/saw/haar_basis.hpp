#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace saw::haar {

// Grid t = 1..T* with T* = 2^{L-1}. Level 1 is the constant function; level
// l ≥ 2 has K_l = 2^{l-2} translations.

/// Number of translations at level l.
int translations(int l);

/// 1 iff t lies in the dyadic block 2^{L-l}(m-1)+1 .. 2^{L-l}m.
int indicator(int l, int m, int t, int L);

/// ψ_{l,k}(t) = sqrt(2^{l-2}) (I_{l,2k-1}(t) - I_{l,2k}(t)). Throws IndexOutOfRange.
double psi(int l, int k, int t, int L);

/// Support of ψ_{l,k} in 0-based half-open form: positive half [begin, mid),
/// negative half [mid, end).
struct Support {
  std::size_t begin = 0;
  std::size_t mid = 0;
  std::size_t end = 0;
  double amplitude = 1.0;
};
Support support(int l, int k, int L);

/// Depth L for a dyadic grid length, throws NonDyadicLength otherwise.
int depth_for_length(std::size_t length);

struct HaarCoefficients {
  int depth = 0;                       // L
  double c1 = 0.0;
  std::vector<std::vector<double>> c;  // c[l-2][k-1]

  double at(int l, int k) const { return c.at(l - 2).at(k - 1); }
  std::size_t size() const;
};

/// c1 = mean(g), c_{l,k} = (1/T*) Σ_t ψ_{l,k}(t) g_t.
HaarCoefficients decompose(std::span<const double> g);

/// g_t = c1 + Σ_{l,k} ψ_{l,k}(t) c_{l,k}.
std::vector<double> reconstruct(const HaarCoefficients& coeffs);

/// Coefficients with |c| > tol (c1 included).
std::size_t count_nonzero(const HaarCoefficients& coeffs, double tol = 0.0);

}  // namespace saw::haar
