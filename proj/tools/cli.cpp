#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vulnaudit/cleaning.hpp"
#include "vulnaudit/clones.hpp"
#include "vulnaudit/error.hpp"
#include "vulnaudit/ingestion.hpp"
#include "vulnaudit/quality.hpp"
#include "vulnaudit/review.hpp"
#include "vulnaudit/stats.hpp"

namespace vulnaudit::cli {

namespace {

namespace fs = std::filesystem;

// Usage problems detected after CLI11 has parsed the flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest round-trip spelling, e.g. "1.0", "0.8".
std::string number(double v) { return nlohmann::json(v).dump(); }

struct CloneFlags {
  double multiset = CloneConfig{}.multiset_threshold;
  double set = CloneConfig{}.set_threshold;
  std::size_t min_tokens = CloneConfig{}.min_tokens;

  void attach(CLI::App* cmd) {
    cmd->add_option("--type3-multiset", multiset, "Type-3 token multiset Jaccard threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--type3-set", set, "Type-3 identifier/literal set Jaccard threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--min-tokens", min_tokens, "Minimum tokens for a Type-3 pair");
  }

  CloneConfig config() const { return CloneConfig{multiset, set, min_tokens}; }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorCode::Io, "write failure on " + path.string());
}

std::string removal_log_text(const RemovalLog& log) {
  std::ostringstream buf;
  write_removal_log(log, buf);
  return buf.str();
}

void print_score(std::ostream& out, const AttributeScore& s) {
  out << attribute_name(s.attribute) << ": " << number(s.value);
  if (s.basis != ScoreBasis::Distributional) {
    out << " (" << s.satisfied_count << "/" << s.total_count << ")";
  }
  out << " [" << basis_name(s.basis) << "]\n";
}

// ---- audit ---------------------------------------------------------------

struct AuditArgs {
  std::string input;
  std::string report;
  std::string review;
  std::string clusters;
  std::string convention = "member";
  CloneFlags clones;
};

int run_audit(const AuditArgs& a, std::ostream& out) {
  const auto dataset = load_dataset(a.input);
  QualityConfig config;
  config.clones = a.clones.config();
  config.convention = a.convention == "representative" ? UniquenessConvention::Representative
                                                        : UniquenessConvention::Member;
  std::optional<ReviewSheet> sheet;
  if (!a.review.empty()) sheet = load_review_sheet(a.review);

  const auto report = audit(dataset, config, sheet ? &*sheet : nullptr);
  if (!a.report.empty()) save_report(report, a.report);
  if (!a.clusters.empty()) {
    std::ostringstream buf;
    write_clusters(cluster(dataset, CloneTier::Type3, true, config.clones), buf);
    write_file(a.clusters, buf.str());
  }

  out << "dataset: " << report.dataset_name << " (" << report.sample_count << " samples)\n";
  if (report.accuracy) print_score(out, *report.accuracy);
  print_score(out, report.uniqueness);
  print_score(out, report.consistency);
  print_score(out, report.completeness);
  if (report.currentness) {
    print_score(out, *report.currentness);
  } else {
    out << "currentness: n/a (fewer than two dated samples)\n";
  }
  return kExitOk;
}

// ---- validate ------------------------------------------------------------

int run_validate(const std::string& input, std::ostream& out) {
  const auto dataset = load_dataset(input);
  const auto s = validate(dataset);
  out << "samples: " << s.total << "\n"
      << "vulnerable: " << s.vulnerable << "\n"
      << "non_vulnerable: " << s.non_vulnerable << "\n"
      << "missing_date: " << s.missing_date << "\n"
      << "empty_code: " << s.empty_code << "\n";
  return kExitOk;
}

// ---- clean ---------------------------------------------------------------

struct CleanArgs {
  std::string input;
  std::string output;
  std::vector<std::string> ops;
  std::string scope = "all";
  std::string split;
  std::string split_out;
  std::string log;
  std::string dedup_tier = "type3";
  bool any_label = false;
  CloneFlags clones;
};

int run_clean(const CleanArgs& a, std::ostream& out) {
  const bool test_only = a.scope == "test-only";
  const bool wants_consistency =
      std::find(a.ops.begin(), a.ops.end(), "consistency") != a.ops.end();
  if (test_only && a.split.empty() && wants_consistency) {
    throw UsageError("--scope test-only requires --split");
  }

  auto dataset = load_dataset(a.input);
  std::optional<SplitAssignment> split;
  if (!a.split.empty()) split = load_split(a.split);

  RemovalLog log;
  for (const auto& op : a.ops) {
    CleanResult r;
    if (op == "dedup") {
      r = deduplicate(dataset,
                      a.dedup_tier == "type1" ? CloneTier::Type1 : CloneTier::Type3,
                      !a.any_label, a.clones.config());
    } else if (op == "consistency") {
      r = enforce_consistency(dataset, test_only ? ConsistencyScope::TestOnly : ConsistencyScope::All,
                              split ? &*split : nullptr);
    } else if (op == "completeness") {
      r = drop_incomplete(dataset);
    } else {
      throw UsageError("unknown cleaning op \"" + op + "\"");
    }
    out << op << ": removed " << r.removed.size() << "\n";
    if (split) split = without_ids(*split, r.removed);
    log.insert(log.end(), r.removed.begin(), r.removed.end());
    dataset = std::move(r.dataset);
  }

  save_dataset(dataset, a.output);
  if (!a.log.empty()) write_file(a.log, removal_log_text(log));
  if (!a.split_out.empty()) {
    if (!split) throw UsageError("--split-out requires --split");
    save_split(*split, a.split_out);
  }
  out << "kept: " << dataset.size() << "\n";
  return kExitOk;
}

// ---- split ---------------------------------------------------------------

struct SplitArgs {
  std::string input;
  std::string protocol = "random";
  std::uint64_t seed = 0;
  bool dedup_cross_set = false;
  bool any_label = false;
  std::string out;
  std::string log;
  CloneFlags clones;
};

int run_split(const SplitArgs& a, std::ostream& out) {
  if (a.dedup_cross_set && a.protocol != "random") {
    throw UsageError("--dedup-cross-set applies to the random protocol only");
  }
  const auto dataset = load_dataset(a.input);
  SplitAssignment split =
      a.protocol == "temporal" ? temporal_split(dataset) : random_split(dataset, a.seed);
  RemovalLog removed;
  if (a.dedup_cross_set) {
    auto clusters = cluster(dataset, CloneTier::Type3, !a.any_label, a.clones.config());
    auto r = remove_cross_set_duplicates(split, clusters);
    split = std::move(r.split);
    removed = std::move(r.removed);
    out << "cross-set duplicates removed from test: " << removed.size() << "\n";
  }
  save_split(split, a.out);
  if (!a.log.empty()) write_file(a.log, removal_log_text(removed));
  for (const auto& p : split.partitions) {
    out << role_name(p.role) << ": " << p.ids.size() << "\n";
  }
  return kExitOk;
}

// ---- review --------------------------------------------------------------

struct ReviewSampleArgs {
  std::string input;
  std::optional<std::size_t> n;
  std::uint64_t seed = 0;
  std::string label = "vulnerable";
  double confidence = 0.90;
  double margin = 0.10;
  std::string out;
};

int run_review_sample(const ReviewSampleArgs& a, std::ostream& out) {
  const auto dataset = load_dataset(a.input);
  const auto filter = parse_label_filter(a.label);
  std::size_t population = 0;
  for (const auto& s : dataset.samples()) {
    if (*filter == LabelFilter::Any ||
        (s.label == Label::Vulnerable) == (*filter == LabelFilter::Vulnerable)) {
      ++population;
    }
  }
  if (population == 0) throw Error(ErrorCode::InsufficientData, "no samples match the label filter");
  const std::size_t n =
      a.n ? *a.n : cochran_sample_size(a.confidence, a.margin, 0.5, population);
  const auto sheet = sample_for_review(dataset, *filter, n, a.seed);
  save_review_sheet(sheet, a.out);
  out << "population: " << population << "\n" << "sampled: " << sheet.size() << "\n";
  return kExitOk;
}

// ---- stats ---------------------------------------------------------------

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',' || c == '\t' || c == ';' || c == ' ') {
      if (!field.empty()) fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!field.empty()) fields.push_back(std::move(field));
  return fields;
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

// Column `column` of a delimiter-separated file; a non-numeric first row is
// taken as a header.
std::vector<double> read_column(const fs::path& path, std::size_t column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_number = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (column >= fields.size()) {
      throw Error(ErrorCode::Parse, path.string() + ": missing column " + std::to_string(column),
                  line_number);
    }
    const auto v = parse_double(fields[column]);
    if (!v) {
      if (first_row) {
        first_row = false;
        continue;
      }
      throw Error(ErrorCode::Parse, path.string() + ": \"" + fields[column] + "\" is not a number",
                  line_number);
    }
    first_row = false;
    values.push_back(*v);
  }
  return values;
}

struct StatsArgs {
  std::string test;
  std::string a;
  std::string b;
  std::size_t a_column = 0;
  std::size_t b_column = 0;
};

int run_stats(const StatsArgs& s, std::ostream& out) {
  const auto a = read_column(s.a, s.a_column);
  const auto b = read_column(s.b, s.b_column);
  if (s.test == "mwu") {
    const auto r = mann_whitney_u(a, b);
    out << "U: " << number(r.u) << "\n"
        << "p: " << number(r.p_two_sided) << "\n"
        << "method: " << (r.exact ? "exact" : "normal") << "\n";
  } else {
    const auto r = kendall_tau(a, b);
    out << "tau_b: " << number(r.tau_b) << "\n" << "p: " << number(r.p_two_sided) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audit function-level vulnerability datasets for data quality", "vulnaudit"};
  app.require_subcommand(1);

  AuditArgs audit_args;
  auto* audit_cmd = app.add_subcommand("audit", "Score a dataset on every quality attribute");
  audit_cmd->add_option("--input", audit_args.input, "Dataset (JSON lines)")->required();
  audit_cmd->add_option("--report", audit_args.report, "Write the JSON report here");
  audit_cmd->add_option("--review", audit_args.review, "Adjudicated review sheet for accuracy");
  audit_cmd->add_option("--clusters", audit_args.clusters, "Dump same-label Type-3 clusters here");
  audit_cmd->add_option("--uniqueness-convention", audit_args.convention)
      ->check(CLI::IsMember({"member", "representative"}));
  audit_args.clones.attach(audit_cmd);

  std::string validate_input;
  auto* validate_cmd = app.add_subcommand("validate", "Count labels, missing dates, empty code");
  validate_cmd->add_option("--input", validate_input)->required();

  CleanArgs clean_args;
  auto* clean_cmd = app.add_subcommand("clean", "Apply cleaning operations in order");
  clean_cmd->add_option("--input", clean_args.input)->required();
  clean_cmd->add_option("--output", clean_args.output)->required();
  clean_cmd->add_option("--ops", clean_args.ops, "dedup,consistency,completeness")
      ->delimiter(',')
      ->required()
      ->check(CLI::IsMember({"dedup", "consistency", "completeness"}));
  clean_cmd->add_option("--scope", clean_args.scope)->check(CLI::IsMember({"all", "test-only"}));
  clean_cmd->add_option("--split", clean_args.split, "Split document (needed for test-only)");
  clean_cmd->add_option("--split-out", clean_args.split_out, "Write the pruned split here");
  clean_cmd->add_option("--log", clean_args.log, "Write the removal log here");
  clean_cmd->add_option("--dedup-tier", clean_args.dedup_tier)
      ->check(CLI::IsMember({"type1", "type3"}));
  clean_cmd->add_flag("--any-label", clean_args.any_label, "Deduplicate across labels");
  clean_args.clones.attach(clean_cmd);

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "Produce a random or temporal split");
  split_cmd->add_option("--input", split_args.input)->required();
  split_cmd->add_option("--protocol", split_args.protocol)
      ->check(CLI::IsMember({"random", "temporal"}));
  split_cmd->add_option("--seed", split_args.seed);
  split_cmd->add_flag("--dedup-cross-set", split_args.dedup_cross_set,
                      "Drop test samples duplicated in train/validation");
  split_cmd->add_flag("--cross-set-any-label", split_args.any_label,
                      "Treat cross-label clones as cross-set duplicates too");
  split_cmd->add_option("--out", split_args.out)->required();
  split_cmd->add_option("--log", split_args.log, "Write the removal log here");
  split_args.clones.attach(split_cmd);

  ReviewSampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("review-sample", "Draw a review sheet");
  sample_cmd->add_option("--input", sample_args.input)->required();
  sample_cmd->add_option("--n", sample_args.n, "Sample size (default: Cochran)");
  sample_cmd->add_option("--seed", sample_args.seed);
  sample_cmd->add_option("--label", sample_args.label)
      ->check(CLI::IsMember({"vulnerable", "non_vulnerable", "any"}));
  sample_cmd->add_option("--confidence", sample_args.confidence);
  sample_cmd->add_option("--margin", sample_args.margin);
  sample_cmd->add_option("--out", sample_args.out)->required();

  std::string kappa_sheet;
  auto* kappa_cmd = app.add_subcommand("review-kappa", "Cohen's kappa between the two raters");
  kappa_cmd->add_option("--sheet", kappa_sheet)->required();

  std::string score_sheet;
  auto* score_cmd = app.add_subcommand("review-score", "Accuracy from adjudicated verdicts");
  score_cmd->add_option("--sheet", score_sheet)->required();

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Compare metric runs");
  stats_cmd->add_option("--test", stats_args.test)
      ->required()
      ->check(CLI::IsMember({"mwu", "kendall"}));
  stats_cmd->add_option("--a", stats_args.a)->required();
  stats_cmd->add_option("--b", stats_args.b)->required();
  stats_cmd->add_option("--a-column", stats_args.a_column);
  stats_cmd->add_option("--b-column", stats_args.b_column);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (audit_cmd->parsed()) return run_audit(audit_args, out);
    if (validate_cmd->parsed()) return run_validate(validate_input, out);
    if (clean_cmd->parsed()) return run_clean(clean_args, out);
    if (split_cmd->parsed()) return run_split(split_args, out);
    if (sample_cmd->parsed()) return run_review_sample(sample_args, out);
    if (kappa_cmd->parsed()) {
      out << "kappa: " << number(cohen_kappa(load_review_sheet(kappa_sheet))) << "\n";
      return kExitOk;
    }
    if (score_cmd->parsed()) {
      const auto s = accuracy_score(load_review_sheet(score_sheet));
      out << "accuracy: " << number(s.value) << " (" << s.satisfied_count << "/" << s.total_count
          << ")\n";
      return kExitOk;
    }
    if (stats_cmd->parsed()) return run_stats(stats_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace vulnaudit::cli
