#include "lshape/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "lshape/diagnostics.hpp"

namespace lshape {

const std::vector<Complex>& twiddles(int p) {
  static std::mutex mu;
  static std::map<int, std::vector<Complex>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it == cache.end()) {
    std::vector<Complex> w(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) w[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / p);
    it = cache.emplace(p, std::move(w)).first;
  }
  return it->second;
}

namespace {

// In-place tensor transform. sign = -1 for forward, +1 for inverse.
void tensor_pass(std::vector<Complex>& a, int p, int m, int sign) {
  const auto& w = twiddles(p);
  const Index P = static_cast<Index>(p);
  std::vector<Complex> line(static_cast<std::size_t>(p));
  std::vector<Complex> out(static_cast<std::size_t>(p));
  Index stride = 1;
  for (int axis = 0; axis < m; ++axis) {
    const Index block = stride * P;
    for (Index base = 0; base < a.size(); base += block) {
      for (Index off = 0; off < stride; ++off) {
        for (Index k = 0; k < P; ++k) line[k] = a[base + off + k * stride];
        for (Index xi = 0; xi < P; ++xi) {
          Complex acc = 0.0;
          for (Index k = 0; k < P; ++k) {
            const Index e = (xi * k) % P;
            acc += line[k] * w[sign < 0 ? (P - e) % P : e];
          }
          out[xi] = acc;
        }
        for (Index k = 0; k < P; ++k) a[base + off + k * stride] = out[k];
      }
    }
    stride = block;
  }
}

}  // namespace

Spectrum dft(const FunctionTable& f) {
  std::vector<Complex> a(f.values().begin(), f.values().end());
  tensor_pass(a, f.p(), f.dim(), -1);
  const double scale = 1.0 / static_cast<double>(a.size());
  for (auto& v : a) v *= scale;
  return Spectrum(f.p(), f.dim(), std::move(a));
}

FunctionTable inverse_dft(const Spectrum& fhat) {
  std::vector<Complex> a(fhat.values().begin(), fhat.values().end());
  tensor_pass(a, fhat.p(), fhat.dim(), +1);
  return FunctionTable(fhat.p(), fhat.dim(), std::move(a));
}

double u2_fourth_power(const FunctionTable& f) {
  const auto fhat = dft(f);
  std::vector<double> q(fhat.size());
  for (Index i = 0; i < fhat.size(); ++i) q[i] = std::pow(std::norm(fhat[i]), 2);
  return pairwise_sum(std::span<const double>(q));
}

InverseU2Result inverse_u2(const FunctionTable& f, double delta) {
  if (!f.is_one_bounded()) warn("inverse_u2: input is not 1-bounded; the correlation guarantee lapses");
  const auto fhat = dft(f);
  Index best = 0;
  double best_mod = -1.0;
  std::vector<double> q(fhat.size());
  for (Index i = 0; i < fhat.size(); ++i) {
    const double mod = std::abs(fhat[i]);
    q[i] = std::pow(mod, 4);
    if (mod > best_mod) {
      best_mod = mod;
      best = i;
    }
  }
  InverseU2Result r;
  r.xi = GroupVector::from_index(f.p(), f.dim(), best);
  r.corr = best_mod;
  r.u2 = std::pow(std::max(0.0, pairwise_sum(std::span<const double>(q))), 0.25);
  // max|fhat|^2 >= sum |fhat|^4 / sum |fhat|^2 >= ||f||_{U^2}^4 for 1-bounded f
  r.contract_holds = r.corr >= r.u2 * r.u2 * (1.0 - 1e-12) - 1e-15;
  if (r.u2 >= delta && r.corr < delta * delta - 1e-15) r.contract_holds = false;
  return r;
}

SubspaceAverageReport subspace_average_bound_check(const FunctionTable& f, const AffineSubspace& c,
                                                   double slack) {
  if (!f.is_one_bounded()) warn("subspace_average_bound_check: input is not 1-bounded");
  SubspaceAverageReport r;
  r.codim = c.codim();
  if (c.empty()) throw std::invalid_argument("subspace_average_bound_check: empty coset");
  r.average_modulus = std::abs(restrict(f, c).mean());
  r.bound = std::pow(static_cast<double>(f.p()), r.codim) *
            std::pow(std::max(0.0, u2_fourth_power(f)), 0.25);
  r.holds = r.average_modulus <= r.bound + slack;
  return r;
}

FunctionTable convolve(const FunctionTable& f, const FunctionTable& g) {
  if (f.p() != g.p() || f.dim() != g.dim()) throw std::invalid_argument("convolve: shape mismatch");
  const auto fh = dft(f);
  const auto gh = dft(g);
  return inverse_dft(fh * gh);
}

}  // namespace lshape
