#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lshape/group.hpp"
#include "lshape/random.hpp"
#include "lshape/structured_sets.hpp"
#include "lshape_cli/report.hpp"

namespace lshape::cli {

struct SuiteOptions {
  int p = 3;
  int n = 1;
  int trials = 100;
  std::uint64_t seed = 1;
  double slack = 1e-9;
  double eps = 0.1;
  double tau = 0.1;
  ResourceLimits limits;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t instances = 0;
  std::vector<Assertion> assertions;

  bool passed() const;
};

/// spectral, control, trivial, gcs, gvn, usuniformity, subspaceavg, transfer,
/// telescope, energy, recursion, inverse.
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const SuiteOptions& options);

/// Seeded T with A, B, C, D of the given density and a codim-d Phi; retried
/// until T is non-empty.
TDescriptor random_T(Rng& rng, int p, int n, int d, double density = 0.8);

}  // namespace lshape::cli
