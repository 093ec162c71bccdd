#pragma once

// Manual accuracy review: sizing, sampling, two-rater verdicts, agreement and
// the resulting accuracy score.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulnaudit/corpus.hpp"

namespace vulnaudit {

enum class Verdict { Unset, Correct, Incorrect };
enum class ReasonTag { Irrelevant, Cleanup, InaccurateFixId, Other };
enum class LabelFilter { Vulnerable, NonVulnerable, Any };

std::string_view verdict_name(Verdict v) noexcept;
std::string_view reason_name(ReasonTag r) noexcept;
std::string_view label_filter_name(LabelFilter f) noexcept;
std::optional<LabelFilter> parse_label_filter(std::string_view text) noexcept;

inline constexpr std::size_t kRaterCount = 2;

struct ReviewEntry {
  std::string id;
  std::array<Verdict, kRaterCount> verdicts{Verdict::Unset, Verdict::Unset};
  std::optional<Verdict> adjudicated;  // Correct or Incorrect
  std::optional<ReasonTag> reason;

  friend bool operator==(const ReviewEntry&, const ReviewEntry&) = default;
};

class ReviewSheet {
 public:
  ReviewSheet() = default;
  /// Throws InvalidArgument on repeated ids.
  ReviewSheet(std::string dataset_name, std::vector<std::string> sampled_ids);

  const std::string& dataset_name() const noexcept { return dataset_name_; }
  const std::vector<ReviewEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<std::string> sampled_ids() const;

  std::optional<std::uint64_t> seed;
  LabelFilter label_filter = LabelFilter::Vulnerable;

  void set_verdict(std::string_view id, std::size_t rater, Verdict verdict);
  /// Only allowed once both raters have a verdict; `verdict` must be set.
  void adjudicate(std::string_view id, Verdict verdict,
                  std::optional<ReasonTag> reason = std::nullopt);
  void set_reason(std::string_view id, std::optional<ReasonTag> reason);

  /// Re-checks every invariant; used after importing a hand-edited sheet.
  void check() const;

  friend bool operator==(const ReviewSheet&, const ReviewSheet&) = default;

 private:
  ReviewEntry& entry(std::string_view id);

  std::string dataset_name_;
  std::vector<ReviewEntry> entries_;
};

/// Cochran sample size for estimating a proportion:
///   n0 = ceil(z² p (1 − p) / e²),  n = ceil(n0 / (1 + (n0 − 1) / N)),
/// capped at the population N. z is the two-sided normal quantile for
/// `confidence`.
std::size_t cochran_sample_size(double confidence, double margin, double proportion,
                                std::size_t population);

/// Uniform sample without replacement among samples matching `filter`,
/// reproducible for a given seed. Throws InvalidArgument if `n` exceeds the
/// number of matching samples.
ReviewSheet sample_for_review(const Dataset& dataset, LabelFilter filter, std::size_t n,
                              std::uint64_t seed);

/// Cohen's kappa over the two raters' verdicts. Returns 1 when expected
/// agreement is 1 and the raters agree everywhere.
double cohen_kappa(const ReviewSheet& sheet);

/// Share of adjudicated entries judged Correct (basis: Sample).
AttributeScore accuracy_score(const ReviewSheet& sheet);

std::string review_sheet_to_json(const ReviewSheet& sheet);
ReviewSheet review_sheet_from_json(std::string_view text);
void save_review_sheet(const ReviewSheet& sheet, const std::filesystem::path& path);
ReviewSheet load_review_sheet(const std::filesystem::path& path);

}  // namespace vulnaudit
