#pragma once

// Slow reference implementations used by the tests. They work on raw digit
// vectors and share no code with the library's transforms or counters.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "lshape/function_table.hpp"

namespace oracle {

using lshape::Complex;
using lshape::Index;

inline std::vector<int> digits(Index v, int p, int m) {
  std::vector<int> d(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    d[static_cast<std::size_t>(i)] = static_cast<int>(v % static_cast<Index>(p));
    v /= static_cast<Index>(p);
  }
  return d;
}

inline Index encode(const std::vector<int>& d, int p) {
  Index v = 0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) v = v * static_cast<Index>(p) + static_cast<Index>(*it);
  return v;
}

inline Index ipow(int p, int m) {
  Index r = 1;
  for (int i = 0; i < m; ++i) r *= static_cast<Index>(p);
  return r;
}

// a*x + b*y coordinatewise in F_p^m.
inline Index lin(int p, int m, int a, Index x, int b, Index y) {
  const auto dx = digits(x, p, m);
  const auto dy = digits(y, p, m);
  std::vector<int> out(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (((a * dx[i] + b * dy[i]) % p) + p) % p;
  return encode(out, p);
}

// fhat(xi) = E_x f(x) e_p(-xi . x), one exponential per term.
inline std::vector<Complex> dft(const lshape::FunctionTable& f) {
  const int p = f.p(), m = f.dim();
  const Index N = ipow(p, m);
  std::vector<Complex> out(static_cast<std::size_t>(N));
  for (Index xi = 0; xi < N; ++xi) {
    const auto dxi = digits(xi, p, m);
    Complex acc = 0.0;
    for (Index x = 0; x < N; ++x) {
      const auto dx = digits(x, p, m);
      int dot = 0;
      for (int i = 0; i < m; ++i) dot += dxi[static_cast<std::size_t>(i)] * dx[static_cast<std::size_t>(i)];
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(dot % p) / p;
      acc += f[x] * std::polar(1.0, angle);
    }
    out[static_cast<std::size_t>(xi)] = acc / static_cast<double>(N);
  }
  return out;
}

// Average of the alternating product over all s-dimensional cubes.
inline Complex gowers_power(const lshape::FunctionTable& f, int s) {
  const int p = f.p(), m = f.dim();
  const Index N = ipow(p, m);
  Index total = N;
  for (int i = 0; i < s; ++i) total *= N;
  Complex acc = 0.0;
  std::vector<Index> h(static_cast<std::size_t>(s));
  for (Index t = 0; t < total; ++t) {
    Index r = t;
    const Index x = r % N;
    r /= N;
    for (auto& hi : h) {
      hi = r % N;
      r /= N;
    }
    Complex prod = 1.0;
    for (unsigned mask = 0; mask < (1u << s); ++mask) {
      Index pt = x;
      int weight = 0;
      for (int i = 0; i < s; ++i) {
        if (mask & (1u << i)) {
          pt = lin(p, m, 1, pt, 1, h[static_cast<std::size_t>(i)]);
          ++weight;
        }
      }
      prod *= (weight % 2) ? std::conj(f[pt]) : f[pt];
    }
    acc += prod;
  }
  return acc / static_cast<double>(total);
}

// E_{x,y,z} g0(x,y) g1(x,y+z) g2(x,y+2z) g3(x+z,y) on F_p^n x F_p^n.
inline Complex lambda_L(const lshape::FunctionTable& g0, const lshape::FunctionTable& g1,
                        const lshape::FunctionTable& g2, const lshape::FunctionTable& g3, int n) {
  const int p = g0.p();
  const Index N = ipow(p, n);
  Complex acc = 0.0;
  for (Index x = 0; x < N; ++x) {
    for (Index y = 0; y < N; ++y) {
      for (Index z = 0; z < N; ++z) {
        const Index y1 = lin(p, n, 1, y, 1, z);
        const Index y2 = lin(p, n, 1, y, 2, z);
        const Index x1 = lin(p, n, 1, x, 1, z);
        acc += g0[x + N * y] * g1[x + N * y1] * g2[x + N * y2] * g3[x1 + N * y];
      }
    }
  }
  return acc / static_cast<double>(N * N * N);
}

// Number of (x, y, z) with all four L points in s; z = 0 included when asked.
inline std::uint64_t count_L(const lshape::IndicatorSet& s, int n, bool include_trivial) {
  const int p = s.p();
  const Index N = ipow(p, n);
  std::uint64_t c = 0;
  for (Index x = 0; x < N; ++x) {
    for (Index y = 0; y < N; ++y) {
      if (!s.contains(x + N * y)) continue;
      for (Index z = include_trivial ? 0 : 1; z < N; ++z) {
        if (s.contains(x + N * lin(p, n, 1, y, 1, z)) && s.contains(x + N * lin(p, n, 1, y, 2, z)) &&
            s.contains(lin(p, n, 1, x, 1, z) + N * y)) {
          ++c;
        }
      }
    }
  }
  return c;
}

// Largest L-free subset of F_p x F_p (n = 1) by trying every subset.
inline int max_L_free_n1(int p) {
  const int cells = p * p;
  int best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
    const int size = std::popcount(mask);
    if (size <= best) continue;
    auto in = [&](int x, int y) { return (mask >> (((x % p) + p) % p + p * (((y % p) + p) % p))) & 1u; };
    bool free = true;
    for (int x = 0; x < p && free; ++x) {
      for (int y = 0; y < p && free; ++y) {
        for (int z = 1; z < p && free; ++z) {
          if (in(x, y) && in(x, y + z) && in(x, y + 2 * z) && in(x + z, y)) free = false;
        }
      }
    }
    if (free) best = size;
  }
  return best;
}

}  // namespace oracle
