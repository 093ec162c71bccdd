#pragma once

// Line-delimited JSON interchange format: one CodeSample per line.
//
//   {"id":"f1","code":"int f(){...}","label":"vulnerable","project":"linux",
//    "commit_id":"abc","cve_id":"CVE-2019-0001","report_date":"2019-01-31",
//    "origin":"big-vul"}
//
// id, code and label are required. Optional fields may be absent or null.
// Blank lines are ignored. Code text is kept byte-exact.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "vulnaudit/corpus.hpp"

namespace vulnaudit {

/// Dataset named after the file stem. Throws Error carrying the 1-based line
/// number for malformed records.
Dataset load_dataset(const std::filesystem::path& path);
Dataset read_dataset(std::istream& in, std::string name);

void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
void write_dataset(const Dataset& dataset, std::ostream& out);

/// Single record line without the trailing newline.
std::string encode_sample(const CodeSample& sample);
CodeSample decode_sample(std::string_view line, std::size_t line_number);

struct ValidationSummary {
  std::size_t total = 0;
  std::size_t vulnerable = 0;
  std::size_t non_vulnerable = 0;
  std::size_t missing_date = 0;
  std::size_t empty_code = 0;

  friend bool operator==(const ValidationSummary&, const ValidationSummary&) = default;
};

ValidationSummary validate(const Dataset& dataset);

}  // namespace vulnaudit
