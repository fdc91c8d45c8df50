#pragma once

// Brute-force reference implementations used to cross-check the production
// code. Everything here is deliberately quadratic and written directly from
// the scoring definition, sharing no code with the indexed fast path.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kb_store.hpp"
#include "text.hpp"

namespace oracle {

using sqa::EntityId;
using sqa::KbStore;
using sqa::TokenSeq;

inline bool contains_contiguous(const TokenSeq& hay, const TokenSeq& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s) {
    bool ok = true;
    for (std::size_t i = 0; i < needle.size(); ++i)
      if (hay[s + i] != needle[i]) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

// Maximal 1..3-grams of the fragment: a gram survives iff no other gram's
// token set strictly contains its token set, keeping one representative per
// token set (the first in longest-first, earliest-first order).
inline std::vector<TokenSeq> maximal_grams(const TokenSeq& fragment) {
  std::vector<std::pair<TokenSeq, std::set<std::string>>> all;
  for (std::size_t n = std::min<std::size_t>(3, fragment.size()); n >= 1; --n) {
    for (std::size_t s = 0; s + n <= fragment.size(); ++s) {
      TokenSeq g(fragment.begin() + s, fragment.begin() + s + n);
      std::set<std::string> gset(g.begin(), g.end());
      all.emplace_back(std::move(g), std::move(gset));
    }
    if (n == 1) break;
  }
  std::vector<TokenSeq> kept;
  std::set<std::set<std::string>> taken;
  for (const auto& [g, gset] : all) {
    bool subsumed = false;
    for (const auto& [o, oset] : all)
      if (oset.size() > gset.size() &&
          std::includes(oset.begin(), oset.end(), gset.begin(), gset.end())) {
        subsumed = true;
        break;
      }
    if (!subsumed && taken.insert(gset).second) kept.push_back(g);
  }
  return kept;
}

// Entity candidate set computed straight from the definition: exact alias
// matches win at score 1.0; otherwise each maximal gram g contributes
// |g| / (L * C) to every entity with an alias containing g, where L is that
// entity's shortest containing-alias token length and C the number of such
// entities; the ties at the global maximum are returned.
inline std::map<EntityId, double> brute_force_candidates(const KbStore& store,
                                                         const TokenSeq& fragment) {
  std::map<EntityId, double> exact;
  for (const auto& [id, rec] : store.records())
    for (const auto& alias : rec.aliases)
      if (sqa::tokenize(alias) == fragment) exact[id] = 1.0;
  if (!exact.empty()) return exact;

  std::map<EntityId, double> best;
  for (const auto& gram : maximal_grams(fragment)) {
    std::map<EntityId, std::size_t> shortest;  // entity -> L
    for (const auto& [id, rec] : store.records()) {
      for (const auto& alias : rec.aliases) {
        TokenSeq toks = sqa::tokenize(alias);
        if (!contains_contiguous(toks, gram)) continue;
        auto it = shortest.find(id);
        if (it == shortest.end() || toks.size() < it->second) shortest[id] = toks.size();
      }
    }
    if (shortest.empty()) continue;
    double c = static_cast<double>(shortest.size());
    for (const auto& [id, len] : shortest) {
      double s = static_cast<double>(gram.size()) / (static_cast<double>(len) * c);
      auto it = best.find(id);
      if (it == best.end() || s > it->second) best[id] = s;
    }
  }
  if (best.empty()) return {};
  double max_score = 0.0;
  for (const auto& [id, s] : best) max_score = std::max(max_score, s);
  std::map<EntityId, double> out;
  for (const auto& [id, s] : best)
    if (s == max_score) out[id] = s;
  return out;
}

// Random mini-store over a small shared vocabulary so that alias collisions
// and partial overlaps actually occur.
inline KbStore random_store(std::mt19937_64& rng, std::size_t max_entities) {
  static const std::vector<std::string> vocab = {
      "red",  "blue", "green", "stone", "river", "album",  "fearless", "city",
      "lake", "john", "mary",  "song",  "hill",  "valley", "north",    "south"};
  std::uniform_int_distribution<std::size_t> n_ent(1, max_entities);
  std::uniform_int_distribution<std::size_t> n_alias(1, 3);
  std::uniform_int_distribution<std::size_t> alias_len(1, 4);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);

  std::string aliases;
  std::size_t entities = n_ent(rng);
  for (std::size_t e = 0; e < entities; ++e) {
    std::string id = "/m/t" + std::to_string(e);
    std::size_t count = n_alias(rng);
    for (std::size_t a = 0; a < count; ++a) {
      std::string alias;
      std::size_t len = alias_len(rng);
      for (std::size_t w = 0; w < len; ++w) {
        if (w) alias += ' ';
        alias += vocab[pick(rng)];
      }
      aliases += id + "\t" + alias + "\n";
    }
  }
  KbStore kb;
  std::istringstream in(aliases);
  kb.ingest_aliases(in);
  return kb;
}

inline TokenSeq random_fragment(std::mt19937_64& rng) {
  static const std::vector<std::string> vocab = {
      "red",  "blue", "green", "stone", "river", "album",  "fearless", "city",
      "lake", "john", "mary",  "song",  "hill",  "valley", "north",    "south"};
  std::uniform_int_distribution<std::size_t> frag_len(1, 5);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  TokenSeq frag;
  std::size_t len = frag_len(rng);
  for (std::size_t i = 0; i < len; ++i) frag.push_back(vocab[pick(rng)]);
  return frag;
}

}  // namespace oracle
