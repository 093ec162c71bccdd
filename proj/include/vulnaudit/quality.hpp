#pragma once

// Attribute scores and the per-dataset quality report.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vulnaudit/clones.hpp"
#include "vulnaudit/corpus.hpp"
#include "vulnaudit/lexer.hpp"
#include "vulnaudit/review.hpp"

namespace vulnaudit {

/// How members of a duplicate cluster count toward uniqueness.
///  Member:         every member is a duplicate.
///  Representative: one member per cluster (see representative()) counts as
///                  unique.
enum class UniquenessConvention { Member, Representative };

std::string_view convention_name(UniquenessConvention c) noexcept;

struct QualityConfig {
  CloneConfig clones;
  UniquenessConvention convention = UniquenessConvention::Member;
};

/// Cluster member kept when a cluster is collapsed: earliest report date
/// (dated before undated), ties broken by smallest id.
std::string representative(const CloneCluster& cluster, const Dataset& dataset);

struct UniquenessResult {
  AttributeScore score;
  std::vector<CloneCluster> clusters;  // same-label Type-3
  std::size_t clustered_samples = 0;
};

UniquenessResult uniqueness_detail(const Dataset& dataset, const QualityConfig& config = {});
inline AttributeScore uniqueness(const Dataset& dataset, const QualityConfig& config = {}) {
  return uniqueness_detail(dataset, config).score;
}

struct ConsistencyResult {
  AttributeScore score;
  std::vector<CloneCluster> inconsistent_clusters;  // Type-1 with both labels
  std::vector<std::string> affected_ids;            // sorted
};

ConsistencyResult consistency_detail(const Dataset& dataset);
inline AttributeScore consistency(const Dataset& dataset) {
  return consistency_detail(dataset).score;
}

using CompletenessBreakdown = std::array<std::size_t, kCompletenessClasses.size()>;

struct CompletenessResult {
  AttributeScore score;
  CompletenessBreakdown breakdown{};  // indexed like kCompletenessClasses
  std::vector<CompletenessClass> classes;  // per sample, dataset order
};

CompletenessResult completeness(const Dataset& dataset);

/// Token text → relative frequency.
using TokenDistribution = std::map<std::string, double>;

/// Base-2 Jensen-Shannon divergence, in [0, 1]. Terms with zero mass
/// contribute nothing.
double jensen_shannon_divergence(const TokenDistribution& p, const TokenDistribution& q);

struct DatedHalves {
  std::vector<std::size_t> older;  // dataset indices, date order
  std::vector<std::size_t> newer;
  std::size_t undated = 0;
};

/// Dated samples sorted by (date, id); the older half takes the extra sample
/// when the count is odd.
DatedHalves split_dated_halves(const Dataset& dataset);

/// Bag-of-tokens distribution over the given samples' raw token text.
TokenDistribution token_distribution(const Dataset& dataset,
                                     const std::vector<std::size_t>& indices);

struct CurrentnessResult {
  AttributeScore score;
  double divergence = 0.0;
  std::size_t older_count = 0;
  std::size_t newer_count = 0;
  std::size_t undated = 0;
};

/// Throws InsufficientData with fewer than two dated samples.
CurrentnessResult currentness(const Dataset& dataset);

struct QualityReport {
  std::string dataset_name;
  std::size_t sample_count = 0;
  QualityConfig config;

  std::optional<AttributeScore> accuracy;
  AttributeScore uniqueness;
  AttributeScore consistency;
  AttributeScore completeness;
  std::optional<AttributeScore> currentness;  // absent with < 2 dated samples

  CompletenessBreakdown completeness_breakdown{};
  std::size_t uniqueness_clusters = 0;
  std::size_t clustered_samples = 0;
  std::size_t inconsistent_clusters = 0;
  std::vector<std::string> inconsistent_ids;
  std::optional<double> divergence;
  std::size_t older_half = 0;
  std::size_t newer_half = 0;
  std::size_t undated = 0;
};

/// Throws ScoreUndefined on an empty dataset. Accuracy is present only when
/// an adjudicated review sheet is supplied.
QualityReport audit(const Dataset& dataset, const QualityConfig& config = {},
                    const ReviewSheet* review = nullptr);

/// Stable, pretty-printed JSON with a fixed key order.
std::string report_to_json(const QualityReport& report);
void save_report(const QualityReport& report, const std::filesystem::path& path);

}  // namespace vulnaudit
