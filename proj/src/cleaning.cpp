#include "vulnaudit/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "io.hpp"
#include "rng.hpp"
#include "vulnaudit/error.hpp"
#include "vulnaudit/lexer.hpp"
#include "vulnaudit/quality.hpp"

namespace vulnaudit {

std::string_view protocol_name(SplitProtocol p) noexcept {
  return p == SplitProtocol::Random ? "random" : "temporal";
}

std::string_view role_name(PartitionRole r) noexcept {
  switch (r) {
    case PartitionRole::Train: return "train";
    case PartitionRole::Validation: return "validation";
    case PartitionRole::Tune: return "tune";
    case PartitionRole::Test: return "test";
  }
  return "train";
}

std::vector<std::string> SplitAssignment::ids(PartitionRole role) const {
  std::vector<std::string> out;
  for (const auto& p : partitions) {
    if (p.role == role) out.insert(out.end(), p.ids.begin(), p.ids.end());
  }
  return out;
}

std::size_t SplitAssignment::total() const {
  std::size_t n = 0;
  for (const auto& p : partitions) n += p.ids.size();
  return n;
}

SplitAssignment random_split(const Dataset& dataset, std::uint64_t seed,
                             const SplitRatios& ratios) {
  const std::size_t n = dataset.size();
  if (n < 10) {
    throw Error(ErrorCode::InsufficientData,
                "random split needs at least 10 samples, got " + std::to_string(n));
  }
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "split ratios must be non-negative and sum to 1");
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& s : dataset.samples()) ids.push_back(s.id);
  detail::SeededRng rng(seed);
  rng.shuffle(ids);

  const double nd = static_cast<double>(n);
  const auto train = static_cast<std::size_t>(std::floor(ratios.train * nd + 1e-9));
  const auto validation = static_cast<std::size_t>(std::floor(ratios.validation * nd + 1e-9));

  SplitAssignment split;
  split.protocol = SplitProtocol::Random;
  split.seed = seed;
  auto at = [&](std::size_t k) { return ids.begin() + static_cast<std::ptrdiff_t>(k); };
  split.partitions.push_back({PartitionRole::Train, {at(0), at(train)}});
  split.partitions.push_back({PartitionRole::Validation, {at(train), at(train + validation)}});
  split.partitions.push_back({PartitionRole::Test, {at(train + validation), ids.end()}});
  return split;
}

SplitAssignment temporal_split(const Dataset& dataset) {
  std::vector<const CodeSample*> dated;
  for (const auto& s : dataset.samples()) {
    if (s.report_date) dated.push_back(&s);
  }
  if (dated.size() < kTemporalPartitions) {
    throw Error(ErrorCode::InsufficientData,
                "temporal split needs at least 10 dated samples, got " +
                    std::to_string(dated.size()));
  }
  std::sort(dated.begin(), dated.end(), [](const CodeSample* a, const CodeSample* b) {
    if (*a->report_date != *b->report_date) return *a->report_date < *b->report_date;
    return a->id < b->id;
  });

  SplitAssignment split;
  split.protocol = SplitProtocol::Temporal;
  const std::size_t base = dated.size() / kTemporalPartitions;
  const std::size_t extra = dated.size() % kTemporalPartitions;
  std::size_t next = 0;
  for (std::size_t k = 0; k < kTemporalPartitions; ++k) {
    const PartitionRole role =
        k < 4 ? PartitionRole::Train : (k == 4 ? PartitionRole::Tune : PartitionRole::Test);
    Partition part{role, {}};
    const std::size_t size = base + (k < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) part.ids.push_back(dated[next++]->id);
    split.partitions.push_back(std::move(part));
  }
  return split;
}

SplitAssignment without_ids(const SplitAssignment& split, const RemovalLog& removed) {
  std::unordered_set<std::string> drop;
  for (const auto& r : removed) drop.insert(r.id);
  SplitAssignment out = split;
  for (auto& p : out.partitions) {
    std::erase_if(p.ids, [&](const std::string& id) { return drop.contains(id); });
  }
  return out;
}

SplitCleanResult remove_cross_set_duplicates(const SplitAssignment& split,
                                             const std::vector<CloneCluster>& clusters) {
  if (split.protocol != SplitProtocol::Random) {
    throw Error(ErrorCode::InvalidArgument, "cross-set removal expects a random split");
  }
  std::unordered_map<std::string_view, PartitionRole> role_of;
  for (const auto& p : split.partitions) {
    for (const auto& id : p.ids) role_of.emplace(id, p.role);
  }
  std::vector<std::string> drop;
  for (const auto& c : clusters) {
    bool leaks = false;
    for (const auto& id : c.member_ids) {
      auto it = role_of.find(id);
      if (it != role_of.end() && it->second != PartitionRole::Test) leaks = true;
    }
    if (!leaks) continue;
    for (const auto& id : c.member_ids) {
      auto it = role_of.find(id);
      if (it != role_of.end() && it->second == PartitionRole::Test) drop.push_back(id);
    }
  }
  std::sort(drop.begin(), drop.end());
  drop.erase(std::unique(drop.begin(), drop.end()), drop.end());

  SplitCleanResult r;
  for (auto& id : drop) r.removed.push_back({std::move(id), "cross_set_duplicate"});
  r.split = without_ids(split, r.removed);
  return r;
}

namespace {

// Applies `reasons` (id → reason) in dataset order.
CleanResult apply_removals(const Dataset& dataset,
                           const std::unordered_map<std::string, std::string>& reasons) {
  CleanResult r;
  r.dataset = Dataset(dataset.name());
  for (const auto& s : dataset.samples()) {
    auto it = reasons.find(s.id);
    if (it == reasons.end()) {
      r.dataset.add(s);
    } else {
      r.removed.push_back({s.id, it->second});
    }
  }
  return r;
}

}  // namespace

CleanResult enforce_consistency(const Dataset& dataset, ConsistencyScope scope,
                                const SplitAssignment* split) {
  if (scope == ConsistencyScope::TestOnly && split == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "test-only consistency cleaning needs a split");
  }
  std::unordered_set<std::string> test_ids;
  if (split != nullptr) {
    for (auto& id : split->ids(PartitionRole::Test)) test_ids.insert(std::move(id));
  }

  std::unordered_map<std::string, std::string> reasons;
  for (const auto& c : cluster(dataset, CloneTier::Type1, /*same_label_only=*/false)) {
    if (!c.mixed_labels()) continue;
    for (const auto& id : c.member_ids) {
      const auto& sample = dataset[*dataset.index_of(id)];
      if (sample.label != Label::NonVulnerable) continue;
      if (scope == ConsistencyScope::TestOnly && !test_ids.contains(id)) continue;
      reasons.emplace(id, "inconsistent_label");
    }
  }
  auto r = apply_removals(dataset, reasons);
  if (split != nullptr) r.split = without_ids(*split, r.removed);
  return r;
}

CleanResult deduplicate(const Dataset& dataset, CloneTier tier, bool same_label_only,
                        const CloneConfig& config) {
  std::unordered_map<std::string, std::string> reasons;
  for (const auto& c : cluster(dataset, tier, same_label_only, config)) {
    const auto keep = representative(c, dataset);
    for (const auto& id : c.member_ids) {
      if (id != keep) reasons.emplace(id, "duplicate_of:" + keep);
    }
  }
  return apply_removals(dataset, reasons);
}

CleanResult drop_incomplete(const Dataset& dataset) {
  std::unordered_map<std::string, std::string> reasons;
  if (!dataset.empty()) {
    const auto classes = completeness(dataset).classes;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (classes[i] != CompletenessClass::Complete) {
        reasons.emplace(dataset[i].id, "incomplete:" + std::string(completeness_name(classes[i])));
      }
    }
  }
  return apply_removals(dataset, reasons);
}

std::string split_to_json(const SplitAssignment& split) {
  nlohmann::ordered_json doc;
  doc["protocol"] = protocol_name(split.protocol);
  doc["seed"] = split.seed ? nlohmann::ordered_json(*split.seed) : nlohmann::ordered_json();
  auto parts = nlohmann::ordered_json::array();
  for (const auto& p : split.partitions) {
    parts.push_back({{"role", role_name(p.role)}, {"ids", p.ids}});
  }
  doc["partitions"] = std::move(parts);
  return doc.dump(2) + "\n";
}

SplitAssignment split_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    SplitAssignment split;
    const auto protocol = doc.at("protocol").get<std::string>();
    if (protocol == "random") {
      split.protocol = SplitProtocol::Random;
    } else if (protocol == "temporal") {
      split.protocol = SplitProtocol::Temporal;
    } else {
      throw Error(ErrorCode::Parse, "unknown split protocol \"" + protocol + "\"");
    }
    if (doc.contains("seed") && !doc["seed"].is_null()) {
      split.seed = doc["seed"].get<std::uint64_t>();
    }
    std::unordered_set<std::string> seen;
    for (const auto& item : doc.at("partitions")) {
      const auto role_text = item.at("role").get<std::string>();
      std::optional<PartitionRole> role;
      for (auto r : {PartitionRole::Train, PartitionRole::Validation, PartitionRole::Tune,
                     PartitionRole::Test}) {
        if (role_text == role_name(r)) role = r;
      }
      if (!role) throw Error(ErrorCode::Parse, "unknown partition role \"" + role_text + "\"");
      Partition p{*role, item.at("ids").get<std::vector<std::string>>()};
      for (const auto& id : p.ids) {
        if (!seen.insert(id).second) {
          throw Error(ErrorCode::Parse, "id \"" + id + "\" appears in more than one partition");
        }
      }
      split.partitions.push_back(std::move(p));
    }
    return split;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("split document: ") + e.what());
  }
}

void save_split(const SplitAssignment& split, const std::filesystem::path& path) {
  detail::write_text_file(path, split_to_json(split));
}

SplitAssignment load_split(const std::filesystem::path& path) {
  return split_from_json(detail::read_text_file(path));
}

void write_removal_log(const RemovalLog& log, std::ostream& out) {
  for (const auto& r : log) {
    nlohmann::ordered_json record;
    record["id"] = r.id;
    record["reason"] = r.reason;
    out << record.dump() << '\n';
  }
}

}  // namespace vulnaudit
