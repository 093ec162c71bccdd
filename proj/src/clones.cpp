#include "vulnaudit/clones.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "hash.hpp"
#include "union_find.hpp"
#include "vulnaudit/parallel.hpp"

namespace vulnaudit {

std::string Digest128::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(high),
                static_cast<unsigned long long>(low));
  return buf;
}

std::string_view type2_text(const Token& token) noexcept {
  switch (token.kind) {
    case TokenKind::Identifier: return "ID";
    case TokenKind::NumberLiteral: return "LITN";
    case TokenKind::StringLiteral: return "LITS";
    case TokenKind::CharLiteral: return "LITC";
    default: return token.text;
  }
}

namespace {

bool is_idlit(TokenKind kind) {
  return kind == TokenKind::Identifier || kind == TokenKind::NumberLiteral ||
         kind == TokenKind::StringLiteral || kind == TokenKind::CharLiteral;
}

Digest128 digest_of(const detail::Fnv128& h) { return Digest128{h.high(), h.low()}; }

}  // namespace

Fingerprint type1_fingerprint(const TokenStream& stream) {
  detail::Fnv128 h;
  for (const auto& t : stream.tokens) h.update_token(t.text);
  return Fingerprint{FingerprintTier::Type1, digest_of(h)};
}

Fingerprint type2_fingerprint(const TokenStream& stream) {
  detail::Fnv128 h;
  for (const auto& t : stream.tokens) h.update_token(type2_text(t));
  return Fingerprint{FingerprintTier::Type2, digest_of(h)};
}

CloneSketch make_sketch(const TokenStream& stream) {
  CloneSketch sketch;
  for (const auto& t : stream.tokens) {
    ++sketch.token_multiset[t.text];
    if (is_idlit(t.kind)) sketch.idlit_set.insert(t.text);
  }
  sketch.token_count = stream.tokens.size();
  sketch.type2_digest = type2_fingerprint(stream).digest;
  return sketch;
}

bool meets_threshold(std::uint64_t value, std::uint64_t total, double threshold) noexcept {
  if (total == 0) return true;
  return static_cast<double>(value) >= threshold * static_cast<double>(total);
}

namespace {

struct MultisetOverlap {
  std::uint64_t min_sum = 0;
  std::uint64_t max_sum = 0;
};

MultisetOverlap overlap(const CloneSketch& a, const CloneSketch& b) {
  MultisetOverlap o;
  auto ia = a.token_multiset.begin();
  auto ib = b.token_multiset.begin();
  while (ia != a.token_multiset.end() || ib != b.token_multiset.end()) {
    if (ib == b.token_multiset.end() || (ia != a.token_multiset.end() && ia->first < ib->first)) {
      o.max_sum += ia->second;
      ++ia;
    } else if (ia == a.token_multiset.end() || ib->first < ia->first) {
      o.max_sum += ib->second;
      ++ib;
    } else {
      o.min_sum += std::min(ia->second, ib->second);
      o.max_sum += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return o;
}

std::pair<std::uint64_t, std::uint64_t> set_overlap(const CloneSketch& a, const CloneSketch& b) {
  std::uint64_t inter = 0;
  auto ia = a.idlit_set.begin();
  auto ib = b.idlit_set.begin();
  while (ia != a.idlit_set.end() && ib != b.idlit_set.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  return {inter, a.idlit_set.size() + b.idlit_set.size() - inter};
}

}  // namespace

double multiset_jaccard(const CloneSketch& a, const CloneSketch& b) {
  const auto o = overlap(a, b);
  return o.max_sum == 0 ? 1.0 : static_cast<double>(o.min_sum) / static_cast<double>(o.max_sum);
}

double set_jaccard(const CloneSketch& a, const CloneSketch& b) {
  const auto [inter, uni] = set_overlap(a, b);
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool is_type3_pair(const CloneSketch& a, const CloneSketch& b, double multiset_threshold,
                   double set_threshold, std::size_t min_tokens) {
  if (a.token_count < min_tokens || b.token_count < min_tokens) return false;
  if (a.type2_digest && b.type2_digest && *a.type2_digest == *b.type2_digest) return true;
  const auto [inter, uni] = set_overlap(a, b);
  if (!meets_threshold(inter, uni, set_threshold)) return false;
  const auto o = overlap(a, b);
  return meets_threshold(o.min_sum, o.max_sum, multiset_threshold);
}

std::string_view clone_tier_name(CloneTier tier) noexcept {
  return tier == CloneTier::Type1 ? "type1" : "type3";
}

namespace {

struct SampleDigests {
  Digest128 type1;
  Digest128 type2;
  std::size_t token_count = 0;
};

std::vector<SampleDigests> digest_all(const Dataset& dataset) {
  std::vector<SampleDigests> out(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto stream = tokenize(dataset[i].code);
      detail::Fnv128 h1;
      detail::Fnv128 h2;
      for (const auto& t : stream.tokens) {
        h1.update_token(t.text);
        h2.update_token(type2_text(t));
      }
      out[i] = SampleDigests{digest_of(h1), digest_of(h2), stream.tokens.size()};
    }
  });
  return out;
}

// Token-id form of a CloneSketch used on the production path.
struct IdSketch {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;  // sorted by token id
  std::vector<std::uint32_t> idlit;  // token ids, later replaced by rarity ranks
};

struct LocalSketch {
  std::vector<std::pair<std::string, std::uint32_t>> counts;
  std::vector<bool> idlit;  // parallel to counts
};

LocalSketch local_sketch(std::string_view code) {
  const auto stream = tokenize(code);
  std::unordered_map<std::string_view, std::size_t> slot;
  LocalSketch s;
  for (const auto& t : stream.tokens) {
    auto [it, inserted] = slot.try_emplace(t.text, s.counts.size());
    if (inserted) {
      s.counts.emplace_back(t.text, 0);
      s.idlit.push_back(false);
    }
    ++s.counts[it->second].second;
    if (is_idlit(t.kind)) s.idlit[it->second] = true;
  }
  return s;
}

std::vector<IdSketch> build_id_sketches(const Dataset& dataset,
                                        const std::vector<std::uint32_t>& reps) {
  std::vector<LocalSketch> local(reps.size());
  parallel_for(reps.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) local[i] = local_sketch(dataset[reps[i]].code);
  });

  std::unordered_map<std::string, std::uint32_t> vocab;
  std::vector<IdSketch> out(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    auto& ls = local[i];
    auto& sk = out[i];
    sk.counts.reserve(ls.counts.size());
    for (std::size_t k = 0; k < ls.counts.size(); ++k) {
      auto [it, _] = vocab.try_emplace(std::move(ls.counts[k].first),
                                       static_cast<std::uint32_t>(vocab.size()));
      sk.counts.emplace_back(it->second, ls.counts[k].second);
      if (ls.idlit[k]) sk.idlit.push_back(it->second);
    }
    std::sort(sk.counts.begin(), sk.counts.end());
    ls = LocalSketch{};
  }
  return out;
}

bool multiset_pass(const IdSketch& a, const IdSketch& b, double threshold) {
  std::uint64_t min_sum = 0;
  std::uint64_t max_sum = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.counts.size() || j < b.counts.size()) {
    if (j == b.counts.size() || (i < a.counts.size() && a.counts[i].first < b.counts[j].first)) {
      max_sum += a.counts[i++].second;
    } else if (i == a.counts.size() || b.counts[j].first < a.counts[i].first) {
      max_sum += b.counts[j++].second;
    } else {
      min_sum += std::min(a.counts[i].second, b.counts[j].second);
      max_sum += std::max(a.counts[i].second, b.counts[j].second);
      ++i;
      ++j;
    }
  }
  return meets_threshold(min_sum, max_sum, threshold);
}

bool set_pass(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
              double threshold) {
  std::uint64_t inter = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  return meets_threshold(inter, a.size() + b.size() - inter, threshold);
}

// Smallest overlap any partner must share with a set of `size` tokens to reach
// `threshold`; rounded down a hair so prefixes err on the long side.
std::size_t required_overlap(std::size_t size, double threshold) {
  const double need = std::ceil(threshold * static_cast<double>(size) - 1e-9);
  return static_cast<std::size_t>(std::clamp(need, 1.0, static_cast<double>(size)));
}

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// All pairs among `sketches` that pass both thresholds. Indices are local.
std::vector<Edge> near_miss_pairs(std::vector<IdSketch>& sketches, const CloneConfig& config) {
  const std::size_t n = sketches.size();
  std::vector<Edge> edges;

  // Rank identifier/literal tokens by document frequency, rarest first.
  std::unordered_map<std::uint32_t, std::uint32_t> df;
  for (const auto& s : sketches) {
    for (auto t : s.idlit) ++df[t];
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order;  // (df, token)
  order.reserve(df.size());
  for (auto [token, count] : df) order.emplace_back(count, token);
  std::sort(order.begin(), order.end());
  std::unordered_map<std::uint32_t, std::uint32_t> rank;
  rank.reserve(order.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r].second] = r;
  for (auto& s : sketches) {
    for (auto& t : s.idlit) t = rank[t];
    std::sort(s.idlit.begin(), s.idlit.end());
  }

  // Sketches without identifiers or literals: set similarity is 1 among
  // themselves and 0 against everything else.
  std::vector<std::uint32_t> bare;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (sketches[i].idlit.empty()) bare.push_back(i);
  }
  for (std::size_t a = 0; a < bare.size(); ++a) {
    for (std::size_t b = a + 1; b < bare.size(); ++b) {
      if (multiset_pass(sketches[bare[a]], sketches[bare[b]], config.multiset_threshold)) {
        edges.emplace_back(bare[a], bare[b]);
      }
    }
  }

  std::vector<std::size_t> prefix(n);
  std::vector<std::vector<std::uint32_t>> postings(order.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto size = sketches[i].idlit.size();
    if (size == 0) continue;
    prefix[i] = size - required_overlap(size, config.set_threshold) + 1;
    for (std::size_t k = 0; k < prefix[i]; ++k) postings[sketches[i].idlit[k]].push_back(i);
  }

  const std::size_t workers = thread_count();
  std::vector<std::vector<Edge>> found(workers);
  std::vector<std::vector<std::uint32_t>> stamps(workers);
  parallel_for(n, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    auto& seen = stamps[worker];
    if (seen.empty()) seen.assign(n, UINT32_MAX);
    auto& out = found[worker];
    for (std::size_t x = begin; x < end; ++x) {
      const auto& sx = sketches[x];
      const double size_x = static_cast<double>(sx.idlit.size());
      for (std::size_t k = 0; k < prefix[x]; ++k) {
        for (std::uint32_t y : postings[sx.idlit[k]]) {
          if (y >= x) break;
          if (seen[y] == x) continue;
          seen[y] = static_cast<std::uint32_t>(x);
          const auto& sy = sketches[y];
          const double size_y = static_cast<double>(sy.idlit.size());
          if (std::min(size_x, size_y) <
              config.set_threshold * std::max(size_x, size_y) - 1e-9) {
            continue;
          }
          if (set_pass(sx.idlit, sy.idlit, config.set_threshold) &&
              multiset_pass(sx, sy, config.multiset_threshold)) {
            out.emplace_back(y, static_cast<std::uint32_t>(x));
          }
        }
      }
    }
  });
  for (auto& f : found) edges.insert(edges.end(), f.begin(), f.end());
  return edges;
}

void link_type3(const Dataset& dataset, const std::vector<SampleDigests>& digests,
                const std::vector<std::uint32_t>& members, const CloneConfig& config,
                detail::UnionFind& uf) {
  // Type-2 equality (which covers Type-1) links directly.
  std::map<Digest128, std::uint32_t> type2_first;
  std::map<Digest128, std::uint32_t> type1_first;
  std::vector<std::uint32_t> reps;
  for (auto i : members) {
    auto [t2, new_t2] = type2_first.try_emplace(digests[i].type2, i);
    if (!new_t2) uf.unite(t2->second, i);
    auto [t1, new_t1] = type1_first.try_emplace(digests[i].type1, i);
    if (new_t1) reps.push_back(i);
  }

  auto sketches = build_id_sketches(dataset, reps);
  for (auto [a, b] : near_miss_pairs(sketches, config)) uf.unite(reps[a], reps[b]);
}

std::vector<CloneCluster> collect(const Dataset& dataset, detail::UnionFind& uf, CloneTier tier) {
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < dataset.size(); ++i) groups[uf.find(i)].push_back(i);

  std::vector<CloneCluster> clusters;
  for (auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    CloneCluster c;
    c.tier = tier;
    for (auto i : members) {
      c.member_ids.push_back(dataset[i].id);
      ++c.label_profile[label_index(dataset[i].label)];
    }
    std::sort(c.member_ids.begin(), c.member_ids.end());
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(), [](const CloneCluster& a, const CloneCluster& b) {
    return a.member_ids.front() < b.member_ids.front();
  });
  return clusters;
}

}  // namespace

std::vector<CloneCluster> cluster(const Dataset& dataset, CloneTier tier, bool same_label_only,
                                  const CloneConfig& config) {
  const auto digests = digest_all(dataset);
  detail::UnionFind uf(dataset.size());

  std::array<std::vector<std::uint32_t>, kLabelCount> partitions;
  for (std::uint32_t i = 0; i < dataset.size(); ++i) {
    const std::size_t part = same_label_only ? label_index(dataset[i].label) : 0;
    if (tier == CloneTier::Type3 && digests[i].token_count < config.min_tokens) continue;
    partitions[part].push_back(i);
  }

  for (const auto& members : partitions) {
    if (members.size() < 2) continue;
    if (tier == CloneTier::Type1) {
      std::map<Digest128, std::uint32_t> first;
      for (auto i : members) {
        auto [it, inserted] = first.try_emplace(digests[i].type1, i);
        if (!inserted) uf.unite(it->second, i);
      }
    } else {
      link_type3(dataset, digests, members, config, uf);
    }
  }
  return collect(dataset, uf, tier);
}

void write_clusters(const std::vector<CloneCluster>& clusters, std::ostream& out) {
  for (const auto& c : clusters) {
    nlohmann::ordered_json record;
    record["tier"] = clone_tier_name(c.tier);
    record["members"] = c.member_ids;
    record["label_profile"] = {{"vulnerable", c.label_profile[0]},
                               {"non_vulnerable", c.label_profile[1]}};
    out << record.dump() << '\n';
  }
}

}  // namespace vulnaudit
