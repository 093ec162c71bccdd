#include "vulnaudit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "vulnaudit/error.hpp"

namespace vulnaudit {

std::string_view label_name(Label label) noexcept {
  return label == Label::Vulnerable ? "vulnerable" : "non_vulnerable";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  if (text == "vulnerable") return Label::Vulnerable;
  if (text == "non_vulnerable") return Label::NonVulnerable;
  return std::nullopt;
}

namespace {

template <typename T>
bool parse_digits(std::string_view text, T& out) {
  if (text.empty() || !std::all_of(text.begin(), text.end(),
                                   [](char c) { return c >= '0' && c <= '9'; })) {
    return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) noexcept {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  Date d;
  if (!parse_digits(text.substr(0, 4), d.year) || !parse_digits(text.substr(5, 2), d.month) ||
      !parse_digits(text.substr(8, 2), d.day)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{d.year}, std::chrono::month{d.month},
                                        std::chrono::day{d.day}};
  if (!ymd.ok()) return std::nullopt;
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

Dataset::Dataset(std::string name, std::vector<CodeSample> samples) : name_(std::move(name)) {
  samples_.reserve(samples.size());
  index_.reserve(samples.size());
  for (auto& s : samples) add(std::move(s));
}

void Dataset::add(CodeSample sample) {
  if (sample.id.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sample id must be non-empty");
  }
  auto [it, inserted] = index_.try_emplace(sample.id, samples_.size());
  if (!inserted) {
    throw Error(ErrorCode::DuplicateId, "duplicate sample id \"" + sample.id + "\"");
  }
  samples_.push_back(std::move(sample));
}

bool Dataset::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

std::optional<std::size_t> Dataset::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::filter(const std::function<bool(const CodeSample&)>& keep) const {
  Dataset out(name_);
  for (const auto& s : samples_) {
    if (keep(s)) out.add(s);
  }
  return out;
}

Dataset Dataset::without(const std::unordered_set<std::string>& ids) const {
  return filter([&](const CodeSample& s) { return !ids.contains(s.id); });
}

std::string_view attribute_name(Attribute attribute) noexcept {
  switch (attribute) {
    case Attribute::Accuracy: return "accuracy";
    case Attribute::Uniqueness: return "uniqueness";
    case Attribute::Consistency: return "consistency";
    case Attribute::Completeness: return "completeness";
    case Attribute::Currentness: return "currentness";
  }
  return "unknown";
}

std::string_view basis_name(ScoreBasis basis) noexcept {
  switch (basis) {
    case ScoreBasis::FullDataset: return "full_dataset";
    case ScoreBasis::Sample: return "sample";
    case ScoreBasis::Distributional: return "distributional";
  }
  return "unknown";
}

AttributeScore attribute_score(Attribute attribute, const std::vector<bool>& flags) {
  const auto satisfied =
      static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  return attribute_score_from_counts(attribute, satisfied, flags.size());
}

AttributeScore attribute_score_from_counts(Attribute attribute, std::size_t satisfied,
                                           std::size_t total, ScoreBasis basis) {
  if (total == 0) {
    throw Error(ErrorCode::ScoreUndefined,
                std::string(attribute_name(attribute)) + " is undefined over zero entries");
  }
  if (satisfied > total) {
    throw Error(ErrorCode::InvalidArgument, "satisfied count exceeds total");
  }
  return AttributeScore{attribute,
                        static_cast<double>(satisfied) / static_cast<double>(total),
                        satisfied, total, basis};
}

AttributeScore distributional_score(Attribute attribute, double value) {
  return AttributeScore{attribute, std::clamp(value, 0.0, 1.0), 0, 0,
                        ScoreBasis::Distributional};
}

}  // namespace vulnaudit
