#pragma once

#include <vector>

#include "lshape/function_table.hpp"
#include "lshape/group.hpp"

namespace lshape {

/// Fourier coefficients over the dual group, stored on the same index space:
/// entry xi holds E_x f(x) e_p(-xi . x).
using Spectrum = FunctionTable;

/// e_p(k) = exp(2 pi i k / p) for k in [0, p), computed once per p.
const std::vector<Complex>& twiddles(int p);

/// Forward transform with the 1/p^m average, done as m passes of the
/// p-point DFT along each coordinate.
Spectrum dft(const FunctionTable& f);
/// Inverse transform (plain sum over the dual group).
FunctionTable inverse_dft(const Spectrum& fhat);

struct InverseU2Result {
  GroupVector xi;
  double corr = 0.0;
  double u2 = 0.0;
  /// corr >= u2^2.
  bool contract_holds = true;
};

/// Largest Fourier coefficient in modulus; ties go to the smallest index.
/// `delta` only matters for the reported contract: when ||f||_{U^2} >= delta
/// then corr >= delta^2.
InverseU2Result inverse_u2(const FunctionTable& f, double delta = 0.0);

struct SubspaceAverageReport {
  double average_modulus = 0.0;
  double bound = 0.0;
  int codim = 0;
  bool holds = true;
};

/// Compares |E_{x in c} f(x)| with p^codim ||f||_{U^2}.
SubspaceAverageReport subspace_average_bound_check(const FunctionTable& f, const AffineSubspace& c,
                                                   double slack = 1e-9);

/// Convolution f * g (x) = E_y f(y) g(x - y).
FunctionTable convolve(const FunctionTable& f, const FunctionTable& g);

/// Sum_xi |fhat(xi)|^4, i.e. ||f||_{U^2}^4.
double u2_fourth_power(const FunctionTable& f);

}  // namespace lshape
