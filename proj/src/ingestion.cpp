#include "vulnaudit/ingestion.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "vulnaudit/error.hpp"

namespace vulnaudit {

using ordered_json = nlohmann::ordered_json;

namespace {

std::optional<std::string> optional_text(const nlohmann::json& record, const char* key,
                                         std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::Parse, std::string("field \"") + key + "\" must be a string", line);
  }
  return it->get<std::string>();
}

std::string required_text(const nlohmann::json& record, const char* key, std::size_t line) {
  auto value = optional_text(record, key, line);
  if (!value) {
    throw Error(ErrorCode::Parse, std::string("missing required field \"") + key + "\"", line);
  }
  return *value;
}

}  // namespace

CodeSample decode_sample(std::string_view line, std::size_t line_number) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what(), line_number);
  }
  if (!record.is_object()) {
    throw Error(ErrorCode::Parse, "record must be a JSON object", line_number);
  }

  CodeSample s;
  s.id = required_text(record, "id", line_number);
  if (s.id.empty()) throw Error(ErrorCode::Parse, "empty id", line_number);
  s.code = required_text(record, "code", line_number);
  const auto label_text = required_text(record, "label", line_number);
  const auto label = parse_label(label_text);
  if (!label) {
    throw Error(ErrorCode::UnknownLabel, "unknown label \"" + label_text + "\"", line_number);
  }
  s.label = *label;
  s.project = optional_text(record, "project", line_number);
  s.commit_id = optional_text(record, "commit_id", line_number);
  s.cve_id = optional_text(record, "cve_id", line_number);
  if (auto date_text = optional_text(record, "report_date", line_number)) {
    auto date = Date::parse(*date_text);
    if (!date) {
      throw Error(ErrorCode::Parse, "report_date \"" + *date_text + "\" is not YYYY-MM-DD",
                  line_number);
    }
    s.report_date = *date;
  }
  s.origin = optional_text(record, "origin", line_number).value_or("");
  return s;
}

std::string encode_sample(const CodeSample& sample) {
  ordered_json record;
  record["id"] = sample.id;
  record["code"] = sample.code;
  record["label"] = label_name(sample.label);
  if (sample.project) record["project"] = *sample.project;
  if (sample.commit_id) record["commit_id"] = *sample.commit_id;
  if (sample.cve_id) record["cve_id"] = *sample.cve_id;
  if (sample.report_date) record["report_date"] = sample.report_date->to_string();
  record["origin"] = sample.origin;
  try {
    return record.dump();
  } catch (const nlohmann::json::type_error& e) {
    throw Error(ErrorCode::InvalidArgument,
                "sample \"" + sample.id + "\" is not valid UTF-8: " + e.what());
  }
}

Dataset read_dataset(std::istream& in, std::string name) {
  Dataset dataset(std::move(name));
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto sample = decode_sample(line, line_number);
    if (dataset.contains(sample.id)) {
      throw Error(ErrorCode::DuplicateId, "duplicate sample id \"" + sample.id + "\"",
                  line_number);
    }
    dataset.add(std::move(sample));
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read failure");
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_dataset(in, path.stem().string());
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& s : dataset.samples()) {
    out << encode_sample(s) << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_dataset(dataset, out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failure on " + path.string());
}

ValidationSummary validate(const Dataset& dataset) {
  ValidationSummary summary;
  summary.total = dataset.size();
  for (const auto& s : dataset.samples()) {
    (s.label == Label::Vulnerable ? summary.vulnerable : summary.non_vulnerable)++;
    if (!s.report_date) ++summary.missing_date;
    if (s.code.empty()) ++summary.empty_code;
  }
  return summary;
}

}  // namespace vulnaudit
