#pragma once

// Test-only corpus builders.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vulnaudit/corpus.hpp"

namespace vulnaudit::testing {

CodeSample sample(std::string id, std::string code, Label label = Label::Vulnerable,
                  std::optional<Date> date = std::nullopt);

/// 2015-01-01 plus `offset` days.
Date day(int offset);

/// Space-separated C function whose identifiers and literals are unique to
/// `index` and whose statement structure encodes `index` (so two different
/// indices are never Type-2 clones). `extra` appends that many
/// "x = x + p ;" statements.
std::string planted_function(std::size_t index, const std::string& type = "int",
                             std::size_t extra = 0);
std::string planted_truncated_start(std::size_t index, const std::string& type = "int");
std::string planted_truncated_end(std::size_t index, const std::string& type = "int");
std::string planted_truncated_both(std::size_t index, const std::string& type = "int");
/// Prototype with `k + 1` parameters.
std::string planted_declaration(std::size_t k, const std::string& type = "int");

/// Fixture with known defects and the values they imply.
struct PlantedFixture {
  Dataset dataset;
  std::size_t same_label_clustered = 0;     // members of same-label Type-3 clusters
  std::size_t same_label_clusters = 0;
  std::size_t inconsistent_members = 0;     // members of cross-label Type-1 clusters
  std::size_t inconsistent_clusters = 0;
  std::size_t per_truncation_class = 0;     // each of start/end/both/empty/declaration
  std::size_t undated = 0;
  std::vector<std::string> older_codes;     // dated halves by construction
  std::vector<std::string> newer_codes;
};

PlantedFixture planted_fixture();

/// Random C-like function built from a family vocabulary; used to make
/// clone families with controllable edit distance.
class FunctionGenerator {
 public:
  explicit FunctionGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string random_function(std::size_t family, std::size_t statements);
  /// Applies `edits` random statement-level edits (insert/delete/modify),
  /// occasionally renaming an identifier.
  std::string mutate(const std::string& code, std::size_t family, std::size_t edits);
  /// Re-layout: random whitespace and comments, same tokens.
  std::string relayout(const std::string& code);
  /// Renames every identifier consistently and changes every literal.
  std::string rename_all(const std::string& code);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::string statement(std::size_t family);
  std::string identifier(std::size_t family);

  std::mt19937_64 rng_;
};

/// Clone-rich random corpus of `size` samples with random labels.
Dataset random_clone_corpus(std::uint64_t seed, std::size_t size);

/// Random corpus with planted Type-1 duplicates (mixed labels), truncations
/// and dates.
Dataset random_defect_corpus(std::uint64_t seed, std::size_t size);

}  // namespace vulnaudit::testing
