#pragma once

// Type-1/2/3 clone detection over lexed functions.
//
// Type-1: identical token sequences (layout and comments already dropped by
//         the lexer).
// Type-2: identical after abstracting identifiers and literals.
// Type-3: Type-2 clones, or near-misses whose token multisets and
//         identifier/literal sets both reach a Jaccard threshold.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vulnaudit/corpus.hpp"
#include "vulnaudit/lexer.hpp"

namespace vulnaudit {

/// 128-bit FNV-1a digest; collisions are negligible at corpus sizes of
/// interest (birthday bound ~2^64 items).
struct Digest128 {
  std::uint64_t high = 0;
  std::uint64_t low = 0;

  std::string hex() const;
  friend auto operator<=>(const Digest128&, const Digest128&) = default;
};

enum class FingerprintTier { Type1, Type2 };

struct Fingerprint {
  FingerprintTier tier;
  Digest128 digest;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

Fingerprint type1_fingerprint(const TokenStream& stream);
Fingerprint type2_fingerprint(const TokenStream& stream);

/// "ID", "LITN", "LITS", "LITC" for identifiers and literals; the token text
/// otherwise.
std::string_view type2_text(const Token& token) noexcept;

struct CloneSketch {
  std::map<std::string, std::uint32_t> token_multiset;
  std::set<std::string> idlit_set;  // identifier and literal texts
  std::size_t token_count = 0;
  /// Type-2 digest of the source sequence; hand-built sketches may omit it.
  std::optional<Digest128> type2_digest;
};

CloneSketch make_sketch(const TokenStream& stream);

/// Σmin / Σmax over token counts; 1 when both are empty.
double multiset_jaccard(const CloneSketch& a, const CloneSketch& b);
/// |A∩B| / |A∪B| over identifier/literal sets; 1 when both are empty.
double set_jaccard(const CloneSketch& a, const CloneSketch& b);

struct CloneConfig {
  double multiset_threshold = 0.8;
  double set_threshold = 0.7;
  std::size_t min_tokens = 5;
};

/// Symmetric. False when either sketch has fewer than `min_tokens` tokens.
/// True when both carry equal Type-2 digests, or when both Jaccard scores
/// reach their thresholds.
bool is_type3_pair(const CloneSketch& a, const CloneSketch& b, double multiset_threshold,
                   double set_threshold, std::size_t min_tokens = 5);

/// `value / total >= threshold` with the comparison shared by every path that
/// scores a pair.
bool meets_threshold(std::uint64_t value, std::uint64_t total, double threshold) noexcept;

enum class CloneTier { Type1, Type3 };

std::string_view clone_tier_name(CloneTier tier) noexcept;

struct CloneCluster {
  CloneTier tier = CloneTier::Type1;
  std::vector<std::string> member_ids;        // sorted
  std::array<std::size_t, kLabelCount> label_profile{};  // by label_index()

  bool mixed_labels() const noexcept { return label_profile[0] > 0 && label_profile[1] > 0; }
  friend bool operator==(const CloneCluster&, const CloneCluster&) = default;
};

/// Clusters of size >= 2, members sorted by id and clusters ordered by their
/// smallest member. Type1 groups equal fingerprints; Type3 takes connected
/// components of the is_type3_pair relation. With `same_label_only`,
/// cross-label pairs are not edges.
///
/// Type-3 candidate pairs come from prefix filtering on the identifier/literal
/// sets (rarest tokens first), which never drops a pair that reaches
/// `set_threshold`.
std::vector<CloneCluster> cluster(const Dataset& dataset, CloneTier tier, bool same_label_only,
                                  const CloneConfig& config = {});

/// One JSON record per line: {"tier":..,"members":[..],"label_profile":{..}}.
void write_clusters(const std::vector<CloneCluster>& clusters, std::ostream& out);

}  // namespace vulnaudit
