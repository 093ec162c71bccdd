#include "vulnaudit/quality.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "io.hpp"
#include "vulnaudit/error.hpp"
#include "vulnaudit/parallel.hpp"

namespace vulnaudit {

std::string_view convention_name(UniquenessConvention c) noexcept {
  return c == UniquenessConvention::Member ? "member" : "representative";
}

std::string representative(const CloneCluster& cluster, const Dataset& dataset) {
  const std::string* best = nullptr;
  std::optional<Date> best_date;
  for (const auto& id : cluster.member_ids) {
    const auto idx = dataset.index_of(id);
    if (!idx) throw Error(ErrorCode::InvalidArgument, "cluster member \"" + id + "\" not in dataset");
    const auto& date = dataset[*idx].report_date;
    bool better = false;
    if (best == nullptr) {
      better = true;
    } else if (date && (!best_date || *date < *best_date)) {
      better = true;
    } else if (date == best_date && id < *best) {
      better = true;
    }
    if (better) {
      best = &id;
      best_date = date;
    }
  }
  if (best == nullptr) throw Error(ErrorCode::InvalidArgument, "empty cluster");
  return *best;
}

UniquenessResult uniqueness_detail(const Dataset& dataset, const QualityConfig& config) {
  if (dataset.empty()) {
    throw Error(ErrorCode::ScoreUndefined, "uniqueness is undefined over zero entries");
  }
  UniquenessResult r;
  r.clusters = cluster(dataset, CloneTier::Type3, /*same_label_only=*/true, config.clones);
  std::unordered_set<std::string> duplicates;
  for (const auto& c : r.clusters) {
    r.clustered_samples += c.member_ids.size();
    const auto keep = config.convention == UniquenessConvention::Representative
                          ? representative(c, dataset)
                          : std::string();
    for (const auto& id : c.member_ids) {
      if (id != keep) duplicates.insert(id);
    }
  }
  r.score = attribute_score_from_counts(Attribute::Uniqueness,
                                        dataset.size() - duplicates.size(), dataset.size());
  return r;
}

ConsistencyResult consistency_detail(const Dataset& dataset) {
  if (dataset.empty()) {
    throw Error(ErrorCode::ScoreUndefined, "consistency is undefined over zero entries");
  }
  ConsistencyResult r;
  for (auto& c : cluster(dataset, CloneTier::Type1, /*same_label_only=*/false)) {
    if (!c.mixed_labels()) continue;
    r.affected_ids.insert(r.affected_ids.end(), c.member_ids.begin(), c.member_ids.end());
    r.inconsistent_clusters.push_back(std::move(c));
  }
  std::sort(r.affected_ids.begin(), r.affected_ids.end());
  r.score = attribute_score_from_counts(Attribute::Consistency,
                                        dataset.size() - r.affected_ids.size(), dataset.size());
  return r;
}

CompletenessResult completeness(const Dataset& dataset) {
  if (dataset.empty()) {
    throw Error(ErrorCode::ScoreUndefined, "completeness is undefined over zero entries");
  }
  CompletenessResult r;
  r.classes.resize(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      r.classes[i] = classify_completeness(dataset[i].code);
    }
  });
  for (auto c : r.classes) ++r.breakdown[static_cast<std::size_t>(c)];
  r.score = attribute_score_from_counts(
      Attribute::Completeness,
      r.breakdown[static_cast<std::size_t>(CompletenessClass::Complete)], dataset.size());
  return r;
}

double jensen_shannon_divergence(const TokenDistribution& p, const TokenDistribution& q) {
  if (p.empty() || q.empty()) {
    throw Error(ErrorCode::InvalidArgument, "Jensen-Shannon divergence needs non-empty inputs");
  }
  auto term = [](double x, double m) { return x > 0.0 ? 0.5 * x * std::log2(x / m) : 0.0; };
  double total = 0.0;
  auto ip = p.begin();
  auto iq = q.begin();
  while (ip != p.end() || iq != q.end()) {
    double pv = 0.0;
    double qv = 0.0;
    if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
      pv = (ip++)->second;
    } else if (ip == p.end() || iq->first < ip->first) {
      qv = (iq++)->second;
    } else {
      pv = (ip++)->second;
      qv = (iq++)->second;
    }
    const double m = 0.5 * (pv + qv);
    total += term(pv, m) + term(qv, m);
  }
  return std::clamp(total, 0.0, 1.0);
}

DatedHalves split_dated_halves(const Dataset& dataset) {
  DatedHalves halves;
  std::vector<std::size_t> dated;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].report_date) {
      dated.push_back(i);
    } else {
      ++halves.undated;
    }
  }
  std::sort(dated.begin(), dated.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = dataset[a];
    const auto& sb = dataset[b];
    if (*sa.report_date != *sb.report_date) return *sa.report_date < *sb.report_date;
    return sa.id < sb.id;
  });
  const std::size_t older = (dated.size() + 1) / 2;
  halves.older.assign(dated.begin(), dated.begin() + static_cast<std::ptrdiff_t>(older));
  halves.newer.assign(dated.begin() + static_cast<std::ptrdiff_t>(older), dated.end());
  return halves;
}

TokenDistribution token_distribution(const Dataset& dataset,
                                     const std::vector<std::size_t>& indices) {
  std::vector<std::unordered_map<std::string, std::uint64_t>> partial(thread_count());
  parallel_for(indices.size(), [&](std::size_t begin, std::size_t end, std::size_t worker) {
    auto& counts = partial[worker];
    for (std::size_t k = begin; k < end; ++k) {
      for (auto& t : tokenize(dataset[indices[k]].code).tokens) ++counts[std::move(t.text)];
    }
  });
  std::map<std::string, std::uint64_t> merged;
  std::uint64_t total = 0;
  for (auto& counts : partial) {
    for (auto& [text, n] : counts) {
      merged[text] += n;
      total += n;
    }
  }
  TokenDistribution dist;
  for (const auto& [text, n] : merged) {
    dist.emplace_hint(dist.end(), text, static_cast<double>(n) / static_cast<double>(total));
  }
  return dist;
}

CurrentnessResult currentness(const Dataset& dataset) {
  const auto halves = split_dated_halves(dataset);
  if (halves.older.size() + halves.newer.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "currentness needs at least two dated samples");
  }
  const auto older = token_distribution(dataset, halves.older);
  const auto newer = token_distribution(dataset, halves.newer);
  if (older.empty() || newer.empty()) {
    throw Error(ErrorCode::InsufficientData, "a dated half contains no tokens");
  }
  CurrentnessResult r;
  r.divergence = jensen_shannon_divergence(older, newer);
  r.score = distributional_score(Attribute::Currentness, 1.0 - r.divergence);
  r.older_count = halves.older.size();
  r.newer_count = halves.newer.size();
  r.undated = halves.undated;
  return r;
}

QualityReport audit(const Dataset& dataset, const QualityConfig& config,
                    const ReviewSheet* review) {
  if (dataset.empty()) {
    throw Error(ErrorCode::ScoreUndefined, "cannot audit an empty dataset");
  }
  QualityReport report;
  report.dataset_name = dataset.name();
  report.sample_count = dataset.size();
  report.config = config;

  if (review != nullptr) report.accuracy = accuracy_score(*review);

  auto unique = uniqueness_detail(dataset, config);
  report.uniqueness = unique.score;
  report.uniqueness_clusters = unique.clusters.size();
  report.clustered_samples = unique.clustered_samples;

  auto consistent = consistency_detail(dataset);
  report.consistency = consistent.score;
  report.inconsistent_clusters = consistent.inconsistent_clusters.size();
  report.inconsistent_ids = std::move(consistent.affected_ids);

  auto complete = completeness(dataset);
  report.completeness = complete.score;
  report.completeness_breakdown = complete.breakdown;

  const auto halves = split_dated_halves(dataset);
  report.older_half = halves.older.size();
  report.newer_half = halves.newer.size();
  report.undated = halves.undated;
  try {
    auto current = currentness(dataset);
    report.currentness = current.score;
    report.divergence = current.divergence;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  return report;
}

namespace {

nlohmann::ordered_json score_json(const AttributeScore& s) {
  nlohmann::ordered_json j;
  j["value"] = s.value;
  if (s.basis != ScoreBasis::Distributional) {
    j["satisfied"] = s.satisfied_count;
    j["total"] = s.total_count;
  }
  j["basis"] = basis_name(s.basis);
  return j;
}

}  // namespace

std::string report_to_json(const QualityReport& report) {
  nlohmann::ordered_json doc;
  doc["dataset"] = report.dataset_name;
  doc["samples"] = report.sample_count;
  doc["config"] = {
      {"type3_multiset", report.config.clones.multiset_threshold},
      {"type3_set", report.config.clones.set_threshold},
      {"min_tokens", report.config.clones.min_tokens},
      {"uniqueness_convention", convention_name(report.config.convention)},
  };
  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  if (report.accuracy) scores["accuracy"] = score_json(*report.accuracy);
  scores["uniqueness"] = score_json(report.uniqueness);
  scores["consistency"] = score_json(report.consistency);
  scores["completeness"] = score_json(report.completeness);
  if (report.currentness) scores["currentness"] = score_json(*report.currentness);
  doc["scores"] = std::move(scores);

  nlohmann::ordered_json breakdown = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kCompletenessClasses.size(); ++i) {
    breakdown[std::string(completeness_name(kCompletenessClasses[i]))] =
        report.completeness_breakdown[i];
  }
  doc["completeness_breakdown"] = std::move(breakdown);
  doc["uniqueness_detail"] = {{"clusters", report.uniqueness_clusters},
                              {"clustered_samples", report.clustered_samples}};
  doc["consistency_detail"] = {{"inconsistent_clusters", report.inconsistent_clusters},
                               {"affected_ids", report.inconsistent_ids}};
  doc["currentness_detail"] = {
      {"divergence", report.divergence ? nlohmann::ordered_json(*report.divergence)
                                       : nlohmann::ordered_json()},
      {"older_half", report.older_half},
      {"newer_half", report.newer_half},
      {"undated", report.undated},
  };
  return doc.dump(2) + "\n";
}

void save_report(const QualityReport& report, const std::filesystem::path& path) {
  detail::write_text_file(path, report_to_json(report));
}

}  // namespace vulnaudit
