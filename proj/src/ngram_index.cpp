#include "ngram_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace sqa {

std::vector<TokenSeq> extract_ngrams(const TokenSeq& fragment) {
  if (fragment.empty()) throw std::runtime_error("empty fragment");
  struct Gram {
    TokenSeq tokens;
    std::set<std::string> token_set;
  };
  std::vector<Gram> all;
  for (std::size_t n = 3; n >= 1; --n) {
    if (fragment.size() < n) continue;
    for (std::size_t start = 0; start + n <= fragment.size(); ++start) {
      Gram g;
      g.tokens.assign(fragment.begin() + start, fragment.begin() + start + n);
      g.token_set.insert(g.tokens.begin(), g.tokens.end());
      all.push_back(std::move(g));
    }
    if (n == 1) break;
  }
  std::vector<TokenSeq> out;
  std::set<std::set<std::string>> seen;
  for (auto& g : all) {
    bool subsumed = false;
    for (const auto& other : all) {
      if (other.token_set.size() > g.token_set.size() &&
          std::includes(other.token_set.begin(), other.token_set.end(), g.token_set.begin(),
                        g.token_set.end())) {
        subsumed = true;
        break;
      }
    }
    // one representative per token set; first in (longest, earliest) order wins
    if (subsumed || !seen.insert(g.token_set).second) continue;
    out.push_back(std::move(g.tokens));
  }
  return out;
}

double score_candidate(std::size_t gram_len, std::size_t alias_len, std::size_t retrieved) {
  if (alias_len == 0 || retrieved == 0) throw std::runtime_error("division by zero");
  return static_cast<double>(gram_len) /
         (static_cast<double>(alias_len) * static_cast<double>(retrieved));
}

void NgramIndex::index_alias(const EntityId& e, const std::string& alias) {
  TokenSeq toks = tokenize(alias);
  if (toks.empty()) return;
  exact_[join_tokens(toks)].insert(e);
  for (std::size_t n = 1; n <= 3 && n <= toks.size(); ++n) {
    for (std::size_t start = 0; start + n <= toks.size(); ++start) {
      TokenSeq gram(toks.begin() + start, toks.begin() + start + n);
      Hit& hit = grams_[join_tokens(gram)][e];
      if (hit.alias_len == 0 || toks.size() < hit.alias_len ||
          (toks.size() == hit.alias_len && alias < hit.alias)) {
        hit.alias_len = toks.size();
        hit.alias = alias;
      }
    }
  }
}

void NgramIndex::build(const KbStore& store) {
  grams_.clear();
  exact_.clear();
  for (const auto& [id, rec] : store.records())
    for (const auto& alias : rec.aliases) index_alias(id, alias);
}

std::set<EntityId> NgramIndex::exact_alias_match(const TokenSeq& fragment) const {
  auto it = exact_.find(join_tokens(fragment));
  return it == exact_.end() ? std::set<EntityId>{} : it->second;
}

std::vector<ScoredCandidate> NgramIndex::best_per_entity(const TokenSeq& fragment) const {
  std::map<EntityId, ScoredCandidate> best;
  for (const auto& gram : extract_ngrams(fragment)) {
    auto it = grams_.find(join_tokens(gram));
    if (it == grams_.end()) continue;
    std::size_t retrieved = it->second.size();
    for (const auto& [e, hit] : it->second) {
      double s = score_candidate(gram.size(), hit.alias_len, retrieved);
      auto found = best.find(e);
      if (found == best.end() || s > found->second.score)
        best[e] = ScoredCandidate{e, s, gram, hit.alias};
    }
  }
  std::vector<ScoredCandidate> out;
  out.reserve(best.size());
  for (auto& [e, c] : best) out.push_back(std::move(c));
  return out;
}

std::vector<ScoredCandidate> NgramIndex::retrieve_candidates(const TokenSeq& fragment) const {
  if (fragment.empty()) return {};
  auto exact = exact_alias_match(fragment);
  if (!exact.empty()) {
    std::vector<ScoredCandidate> out;
    for (const auto& e : exact)
      out.push_back(ScoredCandidate{e, 1.0, fragment, join_tokens(fragment)});
    return out;
  }
  auto scored = best_per_entity(fragment);
  if (scored.empty()) return {};
  double max_score = 0.0;
  for (const auto& c : scored) max_score = std::max(max_score, c.score);
  std::vector<ScoredCandidate> out;
  for (auto& c : scored)
    if (c.score == max_score) out.push_back(std::move(c));
  return out;
}

std::vector<ScoredCandidate> NgramIndex::retrieve_all(const TokenSeq& fragment) const {
  if (fragment.empty()) return {};
  std::vector<ScoredCandidate> out;
  auto exact = exact_alias_match(fragment);
  for (const auto& e : exact)
    out.push_back(ScoredCandidate{e, 1.0, fragment, join_tokens(fragment)});
  auto scored = best_per_entity(fragment);
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entity < b.entity;
  });
  for (auto& c : scored)
    if (!exact.count(c.entity)) out.push_back(std::move(c));
  return out;
}

std::set<EntityId> NgramIndex::entities_for_gram(const std::string& gram_key) const {
  std::set<EntityId> out;
  auto it = grams_.find(gram_key);
  if (it == grams_.end()) return out;
  for (const auto& [e, hit] : it->second) out.insert(e);
  return out;
}

void NgramIndex::save(std::ostream& out) const {
  out << "NGRAMIDX v1\n";
  for (const auto& [gram, hits] : grams_)
    for (const auto& [e, hit] : hits) out << gram << '\t' << e << '\n';
}

NgramIndex NgramIndex::load(std::istream& in, const KbStore& store) {
  std::string line;
  if (!std::getline(in, line) || (line != "NGRAMIDX v1" && line != "NGRAMIDX v1\r"))
    throw std::runtime_error("index snapshot: missing NGRAMIDX v1 header");
  std::map<std::string, std::set<EntityId>> wanted;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw std::runtime_error("index snapshot line " + std::to_string(lineno) +
                               ": expected gram<TAB>entity_id");
    wanted[fields[0]].insert(fields[1]);
  }
  // Alias metadata (shortest matching alias per hit) is not part of the
  // snapshot; rebuild it from the store and keep the file's gram map.
  NgramIndex idx;
  idx.build(store);
  for (auto it = idx.grams_.begin(); it != idx.grams_.end();) {
    auto want = wanted.find(it->first);
    if (want == wanted.end()) {
      it = idx.grams_.erase(it);
      continue;
    }
    for (auto jt = it->second.begin(); jt != it->second.end();) {
      if (!want->second.count(jt->first))
        jt = it->second.erase(jt);
      else
        ++jt;
    }
    ++it;
  }
  for (const auto& [gram, ids] : wanted) {
    auto& hits = idx.grams_[gram];
    for (const auto& e : ids)
      if (!hits.count(e))
        throw std::runtime_error("index snapshot: gram '" + gram + "' lists entity '" + e +
                                 "' with no matching alias in the store");
  }
  return idx;
}

bool NgramIndex::operator==(const NgramIndex& other) const {
  if (exact_ != other.exact_ || grams_.size() != other.grams_.size()) return false;
  for (const auto& [gram, hits] : grams_) {
    auto it = other.grams_.find(gram);
    if (it == other.grams_.end() || it->second.size() != hits.size()) return false;
    for (const auto& [e, hit] : hits) {
      auto jt = it->second.find(e);
      if (jt == it->second.end() || jt->second.alias_len != hit.alias_len ||
          jt->second.alias != hit.alias)
        return false;
    }
  }
  return true;
}

}  // namespace sqa
