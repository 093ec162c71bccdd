#include "vulnaudit/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "vulnaudit/error.hpp"

namespace vulnaudit {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "normal quantile requires 0 < p < 1");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;

  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

namespace {

// Midranks (1-based) of `values`, plus the tie sum Σ(t³ − t).
std::vector<double> midranks(const std::vector<double>& values, double& tie_term) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

double exact_mwu_p(std::size_t n1, std::size_t n2, double u) {
  const std::size_t n = n1 + n2;
  const auto base = static_cast<long>(n1 * (n1 + 1) / 2);
  const long observed = std::lround(u);
  std::uint64_t le = 0;
  std::uint64_t ge = 0;
  std::uint64_t total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n1) continue;
    long rank_sum = 0;
    for (std::size_t bit = 0; bit < n; ++bit) {
      if (mask & (1u << bit)) rank_sum += static_cast<long>(bit) + 1;
    }
    const long arrangement_u = rank_sum - base;
    ++total;
    if (arrangement_u <= observed) ++le;
    if (arrangement_u >= observed) ++ge;
  }
  const double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
  return std::min(1.0, 2.0 * tail);
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::InvalidArgument, "Mann-Whitney U needs two non-empty samples");
  }
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  if (std::any_of(pooled.begin(), pooled.end(), [](double v) { return std::isnan(v); })) {
    throw Error(ErrorCode::InvalidArgument, "Mann-Whitney U input contains NaN");
  }
  double tie_term = 0.0;
  const auto ranks = midranks(pooled, tie_term);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + a.size(), 0.0);

  MannWhitneyResult r;
  r.u = rank_sum - n1 * (n1 + 1.0) / 2.0;
  if (pooled.size() <= kMannWhitneyExactLimit && tie_term == 0.0) {
    r.exact = true;
    r.p_two_sided = exact_mwu_p(a.size(), b.size(), r.u);
    return r;
  }
  const double n = n1 + n2;
  const double mean = n1 * n2 / 2.0;
  const double variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) {
    r.p_two_sided = 1.0;
    return r;
  }
  const double z = (std::abs(r.u - mean) - 0.5) / std::sqrt(variance);
  r.p_two_sided = std::clamp(2.0 * normal_sf(z), 0.0, 1.0);
  return r;
}

KendallResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "Kendall tau needs equal-length inputs");
  }
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "Kendall tau needs at least two pairs");

  double concordant = 0;
  double discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0) {
        ++concordant;
      } else if (s < 0) {
        ++discordant;
      }
    }
  }

  // Tie groups on each side: Σt(t−1), Σt(t−1)(t−2), Σt(t−1)(2t+5).
  struct TieSums {
    double pairs = 0, triples = 0, variance = 0;
  };
  auto tie_sums = [](std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    TieSums s;
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      s.pairs += t * (t - 1);
      s.triples += t * (t - 1) * (t - 2);
      s.variance += t * (t - 1) * (2 * t + 5);
      i = j;
    }
    return s;
  };
  const auto tx = tie_sums(x);
  const auto ty = tie_sums(y);

  const double nd = static_cast<double>(n);
  const double total_pairs = nd * (nd - 1) / 2;
  const double denom = std::sqrt((total_pairs - tx.pairs / 2) * (total_pairs - ty.pairs / 2));
  if (denom == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "Kendall tau is undefined when a side is all ties");
  }

  KendallResult r;
  const double s = concordant - discordant;
  r.tau_b = std::clamp(s / denom, -1.0, 1.0);

  double variance = (nd * (nd - 1) * (2 * nd + 5) - tx.variance - ty.variance) / 18.0;
  variance += tx.pairs * ty.pairs / (2.0 * nd * (nd - 1));
  if (n > 2) variance += tx.triples * ty.triples / (9.0 * nd * (nd - 1) * (nd - 2));
  r.p_two_sided =
      variance > 0 ? std::clamp(2.0 * normal_sf(std::abs(s) / std::sqrt(variance)), 0.0, 1.0)
                   : 1.0;
  return r;
}

double mcc(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
  if (tp + fp + tn + fn == 0) {
    throw Error(ErrorCode::InvalidArgument, "MCC needs at least one non-zero count");
  }
  const double tpd = static_cast<double>(tp);
  const double fpd = static_cast<double>(fp);
  const double tnd = static_cast<double>(tn);
  const double fnd = static_cast<double>(fn);
  const double denom = (tpd + fpd) * (tpd + fnd) * (tnd + fpd) * (tnd + fnd);
  if (denom == 0.0) return 0.0;
  return (tpd * tnd - fpd * fnd) / std::sqrt(denom);
}

}  // namespace vulnaudit
