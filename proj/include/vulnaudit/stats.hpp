#pragma once

// Nonparametric tests for comparing metric runs produced outside this tool.

#include <cstdint>
#include <span>

namespace vulnaudit {

/// Upper tail of the standard normal, P(Z > z).
double normal_sf(double z);

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9). Requires 0 < p < 1.
double normal_quantile(double p);

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample
  double p_two_sided = 1.0;
  bool exact = false;
};

/// Midranks for ties. The p-value is exact by enumeration when the pooled
/// size is at most 12 and there are no ties; otherwise a normal approximation
/// with tie and continuity corrections is used.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kMannWhitneyExactLimit = 12;

struct KendallResult {
  double tau_b = 0.0;
  double p_two_sided = 1.0;
};

/// Tau-b with tie corrections; p from the normal approximation of the
/// concordance statistic. Throws DegenerateInput when either side is
/// entirely tied.
KendallResult kendall_tau(std::span<const double> x, std::span<const double> y);

/// Matthews correlation coefficient. A zero factor in the denominator yields 0.
double mcc(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn);

}  // namespace vulnaudit
