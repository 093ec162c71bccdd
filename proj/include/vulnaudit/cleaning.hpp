#pragma once

// Remediation filters and evaluation split protocols.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vulnaudit/clones.hpp"
#include "vulnaudit/corpus.hpp"

namespace vulnaudit {

enum class SplitProtocol { Random, Temporal };
enum class PartitionRole { Train, Validation, Tune, Test };

std::string_view protocol_name(SplitProtocol p) noexcept;
std::string_view role_name(PartitionRole r) noexcept;

struct Partition {
  PartitionRole role;
  std::vector<std::string> ids;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Random protocol: partitions train, validation, test.
/// Temporal protocol: ten date-ordered partitions, train×4, tune×1, test×5.
struct SplitAssignment {
  SplitProtocol protocol = SplitProtocol::Random;
  std::optional<std::uint64_t> seed;
  std::vector<Partition> partitions;

  /// Union of every partition with the given role, in partition order.
  std::vector<std::string> ids(PartitionRole role) const;
  std::size_t total() const;

  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

struct Removal {
  std::string id;
  std::string reason;

  friend bool operator==(const Removal&, const Removal&) = default;
};

using RemovalLog = std::vector<Removal>;

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

/// Sizes floor(train·n), floor(validation·n), remainder to test. Requires
/// n >= 10.
SplitAssignment random_split(const Dataset& dataset, std::uint64_t seed,
                             const SplitRatios& ratios = {});

inline constexpr std::size_t kTemporalPartitions = 10;

/// Dated samples only, sorted by (date, id); earlier partitions take the
/// extras. Requires at least ten dated samples.
SplitAssignment temporal_split(const Dataset& dataset);

struct SplitCleanResult {
  SplitAssignment split;
  RemovalLog removed;
};

/// Drops every test id sharing a cluster with a train or validation id.
SplitCleanResult remove_cross_set_duplicates(const SplitAssignment& split,
                                             const std::vector<CloneCluster>& clusters);

struct CleanResult {
  Dataset dataset;
  RemovalLog removed;
  std::optional<SplitAssignment> split;  // updated copy when a split was supplied
};

enum class ConsistencyScope { TestOnly, All };

/// Removes the non-vulnerable members of Type-1 clusters carrying both
/// labels. TestOnly restricts removal to members in the split's test
/// partitions (train is left as is) and requires `split`.
CleanResult enforce_consistency(const Dataset& dataset, ConsistencyScope scope,
                                const SplitAssignment* split = nullptr);

/// Keeps one representative per cluster (see representative()).
CleanResult deduplicate(const Dataset& dataset, CloneTier tier, bool same_label_only,
                        const CloneConfig& config = {});

/// Keeps only samples classified Complete.
CleanResult drop_incomplete(const Dataset& dataset);

/// Removes `ids` from every partition.
SplitAssignment without_ids(const SplitAssignment& split, const RemovalLog& removed);

std::string split_to_json(const SplitAssignment& split);
SplitAssignment split_from_json(std::string_view text);
void save_split(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment load_split(const std::filesystem::path& path);

/// One {"id":..,"reason":..} record per line.
void write_removal_log(const RemovalLog& log, std::ostream& out);

}  // namespace vulnaudit
