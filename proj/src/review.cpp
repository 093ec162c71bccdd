#include "vulnaudit/review.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "io.hpp"
#include "rng.hpp"
#include "vulnaudit/error.hpp"
#include "vulnaudit/stats.hpp"

namespace vulnaudit {

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Unset: return "unset";
    case Verdict::Correct: return "correct";
    case Verdict::Incorrect: return "incorrect";
  }
  return "unset";
}

std::string_view reason_name(ReasonTag r) noexcept {
  switch (r) {
    case ReasonTag::Irrelevant: return "irrelevant";
    case ReasonTag::Cleanup: return "cleanup";
    case ReasonTag::InaccurateFixId: return "inaccurate_fix_id";
    case ReasonTag::Other: return "other";
  }
  return "other";
}

std::string_view label_filter_name(LabelFilter f) noexcept {
  switch (f) {
    case LabelFilter::Vulnerable: return "vulnerable";
    case LabelFilter::NonVulnerable: return "non_vulnerable";
    case LabelFilter::Any: return "any";
  }
  return "any";
}

std::optional<LabelFilter> parse_label_filter(std::string_view text) noexcept {
  if (text == "vulnerable") return LabelFilter::Vulnerable;
  if (text == "non_vulnerable") return LabelFilter::NonVulnerable;
  if (text == "any") return LabelFilter::Any;
  return std::nullopt;
}

ReviewSheet::ReviewSheet(std::string dataset_name, std::vector<std::string> sampled_ids)
    : dataset_name_(std::move(dataset_name)) {
  std::unordered_set<std::string> seen;
  entries_.reserve(sampled_ids.size());
  for (auto& id : sampled_ids) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::InvalidArgument, "review sheet lists \"" + id + "\" twice");
    }
    ReviewEntry e;
    e.id = std::move(id);
    entries_.push_back(std::move(e));
  }
}

std::vector<std::string> ReviewSheet::sampled_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries_.size());
  for (const auto& e : entries_) ids.push_back(e.id);
  return ids;
}

ReviewEntry& ReviewSheet::entry(std::string_view id) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const ReviewEntry& e) { return e.id == id; });
  if (it == entries_.end()) {
    throw Error(ErrorCode::InvalidArgument, "id \"" + std::string(id) + "\" is not on the sheet");
  }
  return *it;
}

void ReviewSheet::set_verdict(std::string_view id, std::size_t rater, Verdict verdict) {
  if (rater >= kRaterCount) throw Error(ErrorCode::InvalidArgument, "rater index out of range");
  auto& e = entry(id);
  e.verdicts[rater] = verdict;
  if (verdict == Verdict::Unset) e.adjudicated.reset();
}

void ReviewSheet::adjudicate(std::string_view id, Verdict verdict,
                             std::optional<ReasonTag> reason) {
  if (verdict == Verdict::Unset) {
    throw Error(ErrorCode::InvalidArgument, "adjudication must be correct or incorrect");
  }
  auto& e = entry(id);
  for (auto v : e.verdicts) {
    if (v == Verdict::Unset) {
      throw Error(ErrorCode::IncompleteReview,
                  "\"" + e.id + "\" needs both rater verdicts before adjudication");
    }
  }
  e.adjudicated = verdict;
  if (reason) e.reason = reason;
}

void ReviewSheet::set_reason(std::string_view id, std::optional<ReasonTag> reason) {
  entry(id).reason = reason;
}

void ReviewSheet::check() const {
  std::unordered_set<std::string_view> seen;
  for (const auto& e : entries_) {
    if (e.id.empty()) throw Error(ErrorCode::Parse, "review entry with empty id");
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::Parse, "review sheet lists \"" + e.id + "\" twice");
    }
    if (e.adjudicated) {
      if (*e.adjudicated == Verdict::Unset) {
        throw Error(ErrorCode::Parse, "\"" + e.id + "\" adjudicated as unset");
      }
      for (auto v : e.verdicts) {
        if (v == Verdict::Unset) {
          throw Error(ErrorCode::IncompleteReview,
                      "\"" + e.id + "\" is adjudicated but a rater verdict is unset");
        }
      }
    }
  }
}

std::size_t cochran_sample_size(double confidence, double margin, double proportion,
                                std::size_t population) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence must lie in (0, 1)");
  }
  if (!(margin > 0.0 && margin < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "margin must lie in (0, 1)");
  }
  if (!(proportion >= 0.0 && proportion <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "proportion must lie in [0, 1]");
  }
  if (population == 0) throw Error(ErrorCode::InvalidArgument, "population must be >= 1");

  const double z = normal_quantile(0.5 + confidence / 2.0);
  const double n0 =
      std::max(1.0, std::ceil(z * z * proportion * (1.0 - proportion) / (margin * margin) - 1e-9));
  const double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
  const auto rounded = static_cast<std::size_t>(std::ceil(n - 1e-9));
  return std::min(rounded, population);
}

namespace {

bool matches(const CodeSample& s, LabelFilter filter) {
  switch (filter) {
    case LabelFilter::Vulnerable: return s.label == Label::Vulnerable;
    case LabelFilter::NonVulnerable: return s.label == Label::NonVulnerable;
    case LabelFilter::Any: return true;
  }
  return false;
}

}  // namespace

ReviewSheet sample_for_review(const Dataset& dataset, LabelFilter filter, std::size_t n,
                              std::uint64_t seed) {
  std::vector<std::string> pool;
  for (const auto& s : dataset.samples()) {
    if (matches(s, filter)) pool.push_back(s.id);
  }
  if (n > pool.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot sample " + std::to_string(n) + " of " + std::to_string(pool.size()) +
                    " matching samples");
  }
  detail::SeededRng rng(seed);
  rng.shuffle_prefix(pool, n);
  pool.resize(n);
  ReviewSheet sheet(dataset.name(), std::move(pool));
  sheet.seed = seed;
  sheet.label_filter = filter;
  return sheet;
}

double cohen_kappa(const ReviewSheet& sheet) {
  if (sheet.size() == 0) throw Error(ErrorCode::IncompleteReview, "review sheet is empty");
  // table[a][b]: rater A verdict a, rater B verdict b (0 = correct).
  double table[2][2] = {{0, 0}, {0, 0}};
  for (const auto& e : sheet.entries()) {
    if (e.verdicts[0] == Verdict::Unset || e.verdicts[1] == Verdict::Unset) {
      throw Error(ErrorCode::IncompleteReview, "\"" + e.id + "\" has an unset rater verdict");
    }
    table[e.verdicts[0] == Verdict::Correct ? 0 : 1][e.verdicts[1] == Verdict::Correct ? 0 : 1] +=
        1;
  }
  const double n = static_cast<double>(sheet.size());
  const double observed = (table[0][0] + table[1][1]) / n;
  const double a_correct = table[0][0] + table[0][1];
  const double b_correct = table[0][0] + table[1][0];
  const double expected =
      (a_correct * b_correct + (n - a_correct) * (n - b_correct)) / (n * n);
  if (expected >= 1.0) return observed >= 1.0 ? 1.0 : 0.0;
  return (observed - expected) / (1.0 - expected);
}

AttributeScore accuracy_score(const ReviewSheet& sheet) {
  std::size_t correct = 0;
  for (const auto& e : sheet.entries()) {
    if (!e.adjudicated) {
      throw Error(ErrorCode::IncompleteReview, "\"" + e.id + "\" is not adjudicated");
    }
    if (*e.adjudicated == Verdict::Correct) ++correct;
  }
  return attribute_score_from_counts(Attribute::Accuracy, correct, sheet.size(),
                                     ScoreBasis::Sample);
}

namespace {

nlohmann::ordered_json verdict_json(std::optional<Verdict> v) {
  if (!v || *v == Verdict::Unset) return nullptr;
  return verdict_name(*v);
}

Verdict parse_verdict(const nlohmann::json& value, const std::string& id) {
  if (value.is_null()) return Verdict::Unset;
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    if (text == "correct") return Verdict::Correct;
    if (text == "incorrect") return Verdict::Incorrect;
    if (text == "unset") return Verdict::Unset;
  }
  throw Error(ErrorCode::Parse, "bad verdict for \"" + id + "\": " + value.dump());
}

ReasonTag parse_reason(const nlohmann::json& value, const std::string& id) {
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    for (auto r : {ReasonTag::Irrelevant, ReasonTag::Cleanup, ReasonTag::InaccurateFixId,
                   ReasonTag::Other}) {
      if (text == reason_name(r)) return r;
    }
  }
  throw Error(ErrorCode::Parse, "bad reason for \"" + id + "\": " + value.dump());
}

}  // namespace

std::string review_sheet_to_json(const ReviewSheet& sheet) {
  nlohmann::ordered_json doc;
  doc["dataset"] = sheet.dataset_name();
  doc["label_filter"] = label_filter_name(sheet.label_filter);
  doc["seed"] = sheet.seed ? nlohmann::ordered_json(*sheet.seed) : nlohmann::ordered_json();
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : sheet.entries()) {
    nlohmann::ordered_json item;
    item["id"] = e.id;
    item["rater_a"] = verdict_json(e.verdicts[0]);
    item["rater_b"] = verdict_json(e.verdicts[1]);
    item["adjudicated"] = verdict_json(e.adjudicated);
    item["reason"] = e.reason ? nlohmann::ordered_json(reason_name(*e.reason))
                              : nlohmann::ordered_json();
    entries.push_back(std::move(item));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

ReviewSheet review_sheet_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("review sheet: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
      throw Error(ErrorCode::Parse, "review sheet needs an \"entries\" array");
    }
    std::vector<std::string> ids;
    for (const auto& item : doc["entries"]) ids.push_back(item.at("id").get<std::string>());
    ReviewSheet sheet;
    try {
      sheet = ReviewSheet(doc.value("dataset", std::string{}), ids);
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, e.what());
    }
    if (doc.contains("seed") && !doc["seed"].is_null()) {
      sheet.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("label_filter")) {
      const auto f = parse_label_filter(doc["label_filter"].get<std::string>());
      if (!f) throw Error(ErrorCode::Parse, "bad label_filter");
      sheet.label_filter = *f;
    }
    for (const auto& item : doc["entries"]) {
      const auto id = item.at("id").get<std::string>();
      const auto a = parse_verdict(item.value("rater_a", nlohmann::json()), id);
      const auto b = parse_verdict(item.value("rater_b", nlohmann::json()), id);
      sheet.set_verdict(id, 0, a);
      sheet.set_verdict(id, 1, b);
      const auto reason = item.value("reason", nlohmann::json());
      if (!reason.is_null()) sheet.set_reason(id, parse_reason(reason, id));
      const auto adjudicated = parse_verdict(item.value("adjudicated", nlohmann::json()), id);
      if (adjudicated != Verdict::Unset) {
        if (a == Verdict::Unset || b == Verdict::Unset) {
          throw Error(ErrorCode::IncompleteReview,
                      "\"" + id + "\" is adjudicated but a rater verdict is unset");
        }
        sheet.adjudicate(id, adjudicated);
      }
    }
    sheet.check();
    return sheet;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("review sheet: ") + e.what());
  }
}

void save_review_sheet(const ReviewSheet& sheet, const std::filesystem::path& path) {
  detail::write_text_file(path, review_sheet_to_json(sheet));
}

ReviewSheet load_review_sheet(const std::filesystem::path& path) {
  return review_sheet_from_json(detail::read_text_file(path));
}

}  // namespace vulnaudit
