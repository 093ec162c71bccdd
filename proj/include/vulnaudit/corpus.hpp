#pragma once

// Core value types shared by every audit stage.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace vulnaudit {

enum class Label { Vulnerable, NonVulnerable };

inline constexpr std::size_t kLabelCount = 2;

/// Interchange spelling: "vulnerable" / "non_vulnerable".
std::string_view label_name(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;

inline std::size_t label_index(Label label) noexcept {
  return label == Label::Vulnerable ? 0 : 1;
}

/// Calendar date at day precision.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  /// Strict YYYY-MM-DD; rejects impossible dates such as 2021-02-30.
  static std::optional<Date> parse(std::string_view text) noexcept;
  std::string to_string() const;

  friend auto operator<=>(const Date&, const Date&) = default;
  friend bool operator==(const Date&, const Date&) = default;
};

struct CodeSample {
  std::string id;
  std::string code;
  Label label = Label::NonVulnerable;
  std::optional<std::string> project;
  std::optional<std::string> commit_id;
  std::optional<std::string> cve_id;
  std::optional<Date> report_date;
  std::string origin;

  friend bool operator==(const CodeSample&, const CodeSample&) = default;
};

/// Ordered collection of samples with unique, non-empty ids.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::string name) : name_(std::move(name)) {}
  /// Throws Error{DuplicateId} / Error{InvalidArgument} on bad ids.
  Dataset(std::string name, std::vector<CodeSample> samples);

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  void add(CodeSample sample);

  std::span<const CodeSample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const CodeSample& operator[](std::size_t i) const { return samples_[i]; }

  bool contains(std::string_view id) const;
  /// Position of `id` in insertion order.
  std::optional<std::size_t> index_of(std::string_view id) const;

  /// Subset preserving order and name.
  Dataset filter(const std::function<bool(const CodeSample&)>& keep) const;
  Dataset without(const std::unordered_set<std::string>& ids) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.name_ == b.name_ && a.samples_ == b.samples_;
  }

 private:
  std::string name_;
  std::vector<CodeSample> samples_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Attribute { Accuracy, Uniqueness, Consistency, Completeness, Currentness };
enum class ScoreBasis { FullDataset, Sample, Distributional };

std::string_view attribute_name(Attribute attribute) noexcept;
std::string_view basis_name(ScoreBasis basis) noexcept;

struct AttributeScore {
  Attribute attribute = Attribute::Uniqueness;
  double value = 0.0;
  std::size_t satisfied_count = 0;
  std::size_t total_count = 0;
  ScoreBasis basis = ScoreBasis::FullDataset;

  friend bool operator==(const AttributeScore&, const AttributeScore&) = default;
};

/// Fraction of entries satisfying the attribute. Throws ScoreUndefined when
/// `flags` is empty.
AttributeScore attribute_score(Attribute attribute, const std::vector<bool>& flags);

AttributeScore attribute_score_from_counts(Attribute attribute, std::size_t satisfied,
                                           std::size_t total,
                                           ScoreBasis basis = ScoreBasis::FullDataset);

/// Distribution-based score; counts are left at 0/0.
AttributeScore distributional_score(Attribute attribute, double value);

}  // namespace vulnaudit
