#include "fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <unordered_map>

#include "vulnaudit/lexer.hpp"

namespace vulnaudit::testing {

CodeSample sample(std::string id, std::string code, Label label, std::optional<Date> date) {
  CodeSample s;
  s.id = std::move(id);
  s.code = std::move(code);
  s.label = label;
  s.report_date = date;
  s.origin = "fixture";
  return s;
}

Date day(int offset) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2015} / January / 1} + days{offset}};
  return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
              static_cast<unsigned>(ymd.day())};
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

struct PlantedParts {
  std::string header;      // "TYPE fn_i ( TYPE p_i ) {"
  std::string type;        // return type alone
  std::string body;        // statements
  std::string tail;        // "return x_i ; }"
};

PlantedParts planted_parts(std::size_t index, const std::string& type, std::size_t extra) {
  const auto i = std::to_string(index);
  const std::string x = "x_" + i;
  const std::string p = "p_" + i;
  std::size_t literal = index * 16;
  auto lit = [&] { return std::to_string(literal++); };

  std::vector<std::string> body;
  body.push_back(type + " " + x + " = " + lit() + " ;");
  std::size_t code = index;
  for (int slot = 0; slot < 4; ++slot) {
    switch (code % 4) {
      case 0: body.push_back(x + " = " + x + " + " + p + " ;"); break;
      case 1: body.push_back("if ( " + x + " > " + lit() + " ) { " + x + " = " + lit() + " ; }"); break;
      case 2: body.push_back("while ( " + p + " < " + lit() + " ) { " + p + " ++ ; }"); break;
      default: body.push_back("call_" + i + " ( " + x + " ) ;"); break;
    }
    code /= 4;
  }
  for (std::size_t e = 0; e < extra; ++e) body.push_back(x + " = " + x + " + " + p + " ;");
  return PlantedParts{"fn_" + i + " ( " + type + " " + p + " ) {", type, join(body),
                      "return " + x + " ; }"};
}

}  // namespace

std::string planted_function(std::size_t index, const std::string& type, std::size_t extra) {
  const auto parts = planted_parts(index, type, extra);
  return parts.type + " " + parts.header + " " + parts.body + " " + parts.tail;
}

std::string planted_truncated_start(std::size_t index, const std::string& type) {
  const auto parts = planted_parts(index, type, 0);
  return parts.header + " " + parts.body + " " + parts.tail;
}

std::string planted_truncated_end(std::size_t index, const std::string& type) {
  const auto parts = planted_parts(index, type, 0);
  return parts.type + " " + parts.header + " " + parts.body;
}

std::string planted_truncated_both(std::size_t index, const std::string& type) {
  const auto parts = planted_parts(index, type, 0);
  return parts.header + " " + parts.body;
}

std::string planted_declaration(std::size_t k, const std::string& type) {
  std::vector<std::string> params;
  for (std::size_t j = 0; j <= k; ++j) {
    params.push_back(type + " a_" + std::to_string(k) + "_" + std::to_string(j));
  }
  return type + " decl_" + std::to_string(k) + " ( " + join(params, " , ") + " ) ;";
}

PlantedFixture planted_fixture() {
  struct Draft {
    std::string code;
    Label label;
    bool dated = true;
  };
  // Each draft knows its half up front so its code can use that half's
  // vocabulary ("int" for older, "long" for newer).
  constexpr std::size_t kTotal = 200;
  constexpr std::size_t kUndated = 4;
  constexpr std::size_t kDated = kTotal - kUndated;
  constexpr std::size_t kOlder = (kDated + 1) / 2;

  // Slot order: dated slots first (date order), then undated ones. A fixed
  // shuffle decides which defect lands in which slot.
  std::vector<std::size_t> slots(kTotal);
  for (std::size_t i = 0; i < kTotal; ++i) slots[i] = i;
  std::mt19937_64 rng(20240611);
  std::shuffle(slots.begin(), slots.end(), rng);
  std::size_t next_slot = 0;
  std::vector<Draft> drafts(kTotal);
  auto type_of = [&](std::size_t slot) { return slot < kOlder ? "int" : "long"; };

  std::size_t base = 0;
  PlantedFixture f;

  // Three same-label Type-3 clusters: base plus variants with extra statements.
  // Clones keep one spelling of the type so the half they land in cannot
  // weaken their similarity.
  const std::size_t cluster_sizes[] = {3, 4, 5};
  const Label cluster_labels[] = {Label::Vulnerable, Label::NonVulnerable, Label::Vulnerable};
  for (int c = 0; c < 3; ++c) {
    const std::size_t index = base++;
    for (std::size_t m = 0; m < cluster_sizes[c]; ++m) {
      const auto slot = slots[next_slot++];
      drafts[slot] = {planted_function(index, "int", m), cluster_labels[c]};
    }
    f.same_label_clustered += cluster_sizes[c];
    ++f.same_label_clusters;
  }

  // Two cross-label Type-1 clusters: same tokens, different layout.
  for (int c = 0; c < 2; ++c) {
    const std::size_t index = base++;
    const auto slot_a = slots[next_slot++];
    const auto slot_b = slots[next_slot++];
    const auto code = planted_function(index, "int");
    std::string relaid = code;
    std::replace(relaid.begin(), relaid.end(), ' ', '\n');
    drafts[slot_a] = {code, Label::Vulnerable};
    drafts[slot_b] = {"\t" + relaid + "\n", Label::NonVulnerable};
    f.inconsistent_members += 2;
    ++f.inconsistent_clusters;
  }

  // Five of each incompleteness class.
  f.per_truncation_class = 5;
  for (std::size_t k = 0; k < 5; ++k) {
    auto slot = slots[next_slot++];
    drafts[slot] = {planted_truncated_start(base++, type_of(slot)), Label::NonVulnerable};
    slot = slots[next_slot++];
    drafts[slot] = {planted_truncated_end(base++, type_of(slot)), Label::Vulnerable};
    slot = slots[next_slot++];
    drafts[slot] = {planted_truncated_both(base++, type_of(slot)), Label::NonVulnerable};
    slot = slots[next_slot++];
    drafts[slot] = {"", Label::NonVulnerable};
    slot = slots[next_slot++];
    drafts[slot] = {planted_declaration(k, type_of(slot)), Label::Vulnerable};
  }

  // Clean, unique fill.
  while (next_slot < kTotal) {
    const auto slot = slots[next_slot++];
    drafts[slot] = {planted_function(base++, type_of(slot)),
                    (slot % 3 == 0) ? Label::Vulnerable : Label::NonVulnerable};
  }

  for (std::size_t slot = kDated; slot < kTotal; ++slot) drafts[slot].dated = false;
  f.undated = kUndated;

  // Dataset order and ids are decoupled from slot (date) order.
  std::vector<std::size_t> order(kTotal);
  for (std::size_t i = 0; i < kTotal; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  f.dataset = Dataset("planted");
  for (std::size_t pos = 0; pos < kTotal; ++pos) {
    const auto slot = order[pos];
    char id[16];
    std::snprintf(id, sizeof id, "s%03zu", pos);
    auto& d = drafts[slot];
    f.dataset.add(sample(id, d.code, d.label,
                         d.dated ? std::optional<Date>(day(static_cast<int>(slot) * 3))
                                 : std::nullopt));
  }
  for (std::size_t slot = 0; slot < kDated; ++slot) {
    (slot < kOlder ? f.older_codes : f.newer_codes).push_back(drafts[slot].code);
  }
  return f;
}

// ---- FunctionGenerator ----------------------------------------------------

std::string FunctionGenerator::identifier(std::size_t family) {
  static const char* common[] = {"i", "len", "buf", "ret", "ptr", "size", "ctx"};
  if (rng_() % 3 == 0) return common[rng_() % std::size(common)];
  return "f" + std::to_string(family) + "_v" + std::to_string(rng_() % 6);
}

std::string FunctionGenerator::statement(std::size_t family) {
  auto id = [&] { return identifier(family); };
  auto num = [&] { return std::to_string(rng_() % 16); };
  switch (rng_() % 8) {
    case 0: return id() + " = " + id() + " + " + id() + " ;";
    case 1: return "if ( " + id() + " > " + num() + " ) { " + id() + " = " + num() + " ; }";
    case 2: return "for ( i = 0 ; i < " + id() + " ; i ++ ) { " + id() + " += " + id() + " ; }";
    case 3:
      return id() + " = g" + std::to_string(family) + "_" + std::to_string(rng_() % 3) + " ( " +
             id() + " , " + num() + " ) ;";
    case 4: return "while ( " + id() + " -- > 0 ) " + id() + " ++ ;";
    case 5: return "memcpy ( buf , " + id() + " , len ) ;";
    case 6: return "if ( ! " + id() + " ) return - 1 ;";
    default: return "ptr = \"s" + num() + "\" ;";
  }
}

std::string FunctionGenerator::random_function(std::size_t family, std::size_t statements) {
  std::ostringstream out;
  out << "int f" << family << "_fn" << (rng_() % 4) << " ( int " << identifier(family)
      << " , char * buf ) {\n";
  for (std::size_t s = 0; s < statements; ++s) out << "  " << statement(family) << "\n";
  out << "  return ret ;\n}";
  return out.str();
}

std::string FunctionGenerator::mutate(const std::string& code, std::size_t family,
                                      std::size_t edits) {
  std::vector<std::string> lines;
  std::istringstream in(code);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  if (lines.size() < 3) return code;
  for (std::size_t e = 0; e < edits; ++e) {
    const std::size_t body = lines.size() - 3;  // header, return, closing brace
    const auto op = rng_() % 3;
    if (op == 0 || body == 0) {
      const auto at = 1 + rng_() % (body + 1);
      lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(at), "  " + statement(family));
    } else if (op == 1) {
      lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(1 + rng_() % body));
    } else {
      lines[1 + rng_() % body] = "  " + statement(family);
    }
  }
  return join(lines, "\n");
}

std::string FunctionGenerator::relayout(const std::string& code) {
  const auto stream = tokenize(code);
  static const char* gaps[] = {" ", "  ", "\n", "\t", " /* note */ ", "\n  // trailing\n"};
  std::string out = (rng_() % 2) ? "// header comment\n" : "";
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    if (i) out += gaps[rng_() % std::size(gaps)];
    out += stream.tokens[i].text;
  }
  return out;
}

std::string FunctionGenerator::rename_all(const std::string& code) {
  const auto stream = tokenize(code);
  std::vector<std::string> out;
  for (const auto& t : stream.tokens) {
    switch (t.kind) {
      case TokenKind::Identifier: out.push_back("rn_" + t.text); break;
      case TokenKind::NumberLiteral: out.push_back(t.text + "0"); break;
      case TokenKind::StringLiteral: out.push_back("\"renamed\""); break;
      case TokenKind::CharLiteral: out.push_back("'r'"); break;
      default: out.push_back(t.text); break;
    }
  }
  return join(out);
}

Dataset random_clone_corpus(std::uint64_t seed, std::size_t size) {
  FunctionGenerator gen(seed);
  auto& rng = gen.rng();
  Dataset d("random-" + std::to_string(seed));
  std::vector<std::pair<std::string, std::size_t>> pool;  // (code, family)
  std::size_t families = 0;
  for (std::size_t k = 0; k < size; ++k) {
    std::string code;
    std::size_t family = 0;
    const auto roll = rng() % 100;
    if (pool.empty() || roll < 25) {
      family = families++;
      code = gen.random_function(family, 2 + rng() % 8);
    } else if (roll < 30) {
      static const char* tiny[] = {"x ;", "f ( ) ;", "{ { return ; } }", "{ { { } } }",
                                   "int a ;", "return 0 ;"};
      code = tiny[rng() % std::size(tiny)];
    } else {
      const auto& [parent, fam] = pool[rng() % pool.size()];
      family = fam;
      const auto kind = rng() % 10;
      if (kind < 2) {
        code = gen.relayout(parent);
      } else if (kind < 3) {
        code = gen.rename_all(parent);
      } else if (kind < 8) {
        code = gen.mutate(parent, family, 1 + rng() % 2);
      } else {
        code = gen.mutate(parent, family, 3 + rng() % 4);
      }
    }
    if (code.find('\n') != std::string::npos) pool.emplace_back(code, family);
    d.add(sample("r" + std::to_string(k), code,
                 rng() % 2 ? Label::Vulnerable : Label::NonVulnerable,
                 day(static_cast<int>(rng() % 2000))));
  }
  return d;
}

Dataset random_defect_corpus(std::uint64_t seed, std::size_t size) {
  FunctionGenerator gen(seed);
  auto& rng = gen.rng();
  Dataset d("defects-" + std::to_string(seed));
  std::vector<std::pair<std::string, std::size_t>> pool;
  for (std::size_t k = 0; k < size; ++k) {
    std::string code;
    const auto roll = rng() % 100;
    if (pool.empty() || roll < 40) {
      const std::size_t family = 1000 + k;
      code = gen.random_function(family, 2 + rng() % 6);
      pool.emplace_back(code, family);
    } else if (roll < 60) {
      code = gen.relayout(pool[rng() % pool.size()].first);  // exact duplicate
    } else if (roll < 72) {
      const auto& [parent, family] = pool[rng() % pool.size()];
      code = gen.mutate(parent, family, 1);
    } else if (roll < 80) {
      const auto& parent = pool[rng() % pool.size()].first;
      code = parent.substr(parent.find(' ') + 1);  // drop the return type
    } else if (roll < 88) {
      const auto& parent = pool[rng() % pool.size()].first;
      code = parent.substr(0, parent.rfind('}'));  // drop the closing brace
    } else if (roll < 92) {
      code = "";
    } else {
      code = "int proto_" + std::to_string(k) + " ( void ) ;";
    }
    std::optional<Date> date;
    if (rng() % 10) date = day(static_cast<int>(rng() % 3000));
    d.add(sample("d" + std::to_string(k), code,
                 rng() % 2 ? Label::Vulnerable : Label::NonVulnerable, date));
  }
  return d;
}

}  // namespace vulnaudit::testing
