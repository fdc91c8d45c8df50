#include "pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sqa {

PipelineMode pipeline_mode_from_string(const std::string& s) {
  if (s == "full_candidates") return PipelineMode::FullCandidates;
  if (s == "top1_none") return PipelineMode::Top1None;
  if (s == "top1_type") return PipelineMode::Top1Type;
  if (s == "top1_out_degree") return PipelineMode::Top1OutDegree;
  throw std::runtime_error("unknown pipeline mode: " + s);
}

std::string to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::FullCandidates: return "full_candidates";
    case PipelineMode::Top1None: return "top1_none";
    case PipelineMode::Top1Type: return "top1_type";
    case PipelineMode::Top1OutDegree: return "top1_out_degree";
  }
  return "?";
}

RankingMethod ranking_method_from_string(const std::string& s) {
  if (s == "none") return RankingMethod::None;
  if (s == "out_degree") return RankingMethod::OutDegree;
  if (s == "notable_type") return RankingMethod::NotableType;
  throw std::runtime_error("unknown ranking method: " + s);
}

std::string to_string(RankingMethod method) {
  switch (method) {
    case RankingMethod::None: return "none";
    case RankingMethod::OutDegree: return "out_degree";
    case RankingMethod::NotableType: return "notable_type";
  }
  return "?";
}

std::vector<QuestionRow> parse_questions(std::istream& in, std::uint64_t* skipped) {
  std::vector<QuestionRow> rows;
  std::uint64_t bad = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty() || fields[3].empty()) {
      ++bad;
      continue;
    }
    rows.push_back(QuestionRow{fields[0], fields[1], fields[2], fields[3]});
  }
  if (skipped) *skipped = bad;
  return rows;
}

Pipeline::Pipeline(const KbStore& store, const NgramIndex& index, const TaggerIface& tagger,
                   const Matcher& relation_matcher, const Matcher* type_matcher,
                   PipelineMode mode, RankingMethod disambiguation)
    : store_(store),
      index_(index),
      tagger_(tagger),
      relation_matcher_(relation_matcher),
      type_matcher_(type_matcher),
      mode_(mode),
      disambiguation_(disambiguation) {
  bool needs_types = mode_ == PipelineMode::Top1Type ||
                     (mode_ == PipelineMode::FullCandidates &&
                      disambiguation_ == RankingMethod::NotableType);
  if (needs_types && !type_matcher_)
    throw std::runtime_error("pipeline: mode requires a type matcher");
}

RankingMethod Pipeline::active_ranking() const {
  switch (mode_) {
    case PipelineMode::Top1None: return RankingMethod::None;
    case PipelineMode::Top1OutDegree: return RankingMethod::OutDegree;
    case PipelineMode::Top1Type: return RankingMethod::NotableType;
    case PipelineMode::FullCandidates: return disambiguation_;
  }
  return RankingMethod::None;
}

double Pipeline::ranking_key(const ScoredCandidate& c, const TokenSeq& question) const {
  switch (active_ranking()) {
    case RankingMethod::None: return c.score;
    case RankingMethod::OutDegree: return static_cast<double>(store_.out_degree(c.entity));
    case RankingMethod::NotableType: {
      auto type = store_.notable_type(c.entity);
      if (!type || !type_matcher_) return 0.0;
      TokenSeq toks = tokenize(*type);
      return toks.empty() ? 0.0 : type_matcher_->score(question, toks);
    }
  }
  return 0.0;
}

void Pipeline::order_by_method(std::vector<ScoredCandidate>& list, const TokenSeq& question,
                               RankingMethod method) const {
  std::vector<std::pair<double, std::size_t>> keys(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    double key = 0.0;
    switch (method) {
      case RankingMethod::None: key = list[i].score; break;
      case RankingMethod::OutDegree:
        key = static_cast<double>(store_.out_degree(list[i].entity));
        break;
      case RankingMethod::NotableType: {
        auto type = store_.notable_type(list[i].entity);
        if (type && type_matcher_) {
          TokenSeq toks = tokenize(*type);
          if (!toks.empty()) key = type_matcher_->score(question, toks);
        }
        break;
      }
    }
    keys[i] = {key, i};
  }
  std::vector<std::size_t> order(list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a].first != keys[b].first) return keys[a].first > keys[b].first;
    return list[a].entity < list[b].entity;
  });
  std::vector<ScoredCandidate> sorted;
  sorted.reserve(list.size());
  for (std::size_t i : order) sorted.push_back(std::move(list[i]));
  list = std::move(sorted);
}

std::vector<ScoredCandidate> Pipeline::candidate_set(const std::string& question) const {
  TokenSeq tokens = tokenize(question);
  if (tokens.empty()) return {};
  TagSequence tags = tagger_.tag(tokens);
  std::map<EntityId, ScoredCandidate> best;
  for (const auto& fragment : extract_fragments(tags, tokens)) {
    for (auto& c : index_.retrieve_candidates(fragment.tokens)) {
      auto it = best.find(c.entity);
      if (it == best.end() || c.score > it->second.score) best[c.entity] = std::move(c);
    }
  }
  std::vector<ScoredCandidate> out;
  out.reserve(best.size());
  for (auto& [e, c] : best) out.push_back(std::move(c));
  return out;
}

std::vector<ScoredCandidate> Pipeline::candidate_list(const std::string& question) const {
  TokenSeq tokens = tokenize(question);
  if (tokens.empty()) return {};
  TagSequence tags = tagger_.tag(tokens);
  std::map<EntityId, ScoredCandidate> best;
  for (const auto& fragment : extract_fragments(tags, tokens)) {
    for (auto& c : index_.retrieve_all(fragment.tokens)) {
      auto it = best.find(c.entity);
      if (it == best.end() || c.score > it->second.score) best[c.entity] = std::move(c);
    }
  }
  std::vector<ScoredCandidate> list;
  list.reserve(best.size());
  for (auto& [e, c] : best) list.push_back(std::move(c));
  order_by_method(list, tokens, active_ranking());
  if (list.size() > 400) list.resize(400);
  return list;
}

Answer Pipeline::answer(const std::string& question) const {
  TokenSeq tokens = tokenize(question);
  Answer out;
  if (tokens.empty()) return out;

  if (mode_ == PipelineMode::FullCandidates) {
    auto candidates = candidate_set(question);
    if (candidates.empty()) return out;
    std::set<RelationId> pool;
    for (const auto& c : candidates)
      for (const auto& r : store_.relations_of(c.entity)) pool.insert(r);
    if (pool.empty()) return out;
    auto ranked = rank_relations(relation_matcher_, tokens, pool);
    const RelationId& top = ranked.front().first;
    std::vector<ScoredCandidate> holders;
    for (const auto& c : candidates)
      if (store_.relations_of(c.entity).count(top)) holders.push_back(c);
    if (holders.empty()) return out;
    order_by_method(holders, tokens, disambiguation_);
    out.unanswered = false;
    out.subject = holders.front().entity;
    out.relation = top;
    out.objects = store_.objects_of(out.subject, out.relation);
    return out;
  }

  auto list = candidate_list(question);
  if (list.empty()) return out;
  const EntityId& e = list.front().entity;
  auto rels = store_.relations_of(e);
  if (rels.empty()) return out;
  auto ranked = rank_relations(relation_matcher_, tokens, rels);
  out.unanswered = false;
  out.subject = e;
  out.relation = ranked.front().first;
  out.objects = store_.objects_of(out.subject, out.relation);
  return out;
}

EvalReport Pipeline::evaluate(const std::vector<QuestionRow>& rows) const {
  EvalReport rep;
  rep.questions = rows.size();
  if (rows.empty()) return rep;
  std::uint64_t correct = 0, same_name = 0, unique = 0, not_unique = 0, rel_ok = 0;
  std::uint64_t recall_hits[4] = {0, 0, 0, 0};
  for (const auto& row : rows) {
    TokenSeq tokens = tokenize(row.text);

    auto e_set = candidate_set(row.text);
    bool has_gold = false;
    for (const auto& c : e_set)
      if (c.entity == row.subject) has_gold = true;
    if (has_gold && e_set.size() == 1)
      ++unique;
    else if (has_gold)
      ++not_unique;

    auto list = candidate_list(row.text);
    for (int k = 0; k < 4; ++k) {
      std::size_t limit = std::min<std::size_t>(list.size(),
                                                static_cast<std::size_t>(EvalReport::kRecallCutoffs[k]));
      for (std::size_t i = 0; i < limit; ++i)
        if (list[i].entity == row.subject) {
          ++recall_hits[k];
          break;
        }
    }

    auto gold_rels = store_.relations_of(row.subject);
    if (!gold_rels.empty() && !tokens.empty()) {
      auto ranked = rank_relations(relation_matcher_, tokens, gold_rels);
      if (ranked.front().first == row.relation) ++rel_ok;
    }

    Answer ans = answer(row.text);
    bool ok = !ans.unanswered && ans.subject == row.subject && ans.relation == row.relation;
    if (ok) {
      ++correct;
    } else if (!ans.unanswered && ans.subject != row.subject) {
      const EntityRecord* pred = store_.record(ans.subject);
      const EntityRecord* gold = store_.record(row.subject);
      if (pred && gold) {
        bool overlap = false;
        for (const auto& a : pred->aliases)
          if (gold->aliases.count(a)) {
            overlap = true;
            break;
          }
        if (overlap) ++same_name;
      }
    }
  }
  double n = static_cast<double>(rows.size());
  rep.accuracy = correct / n;
  rep.same_name_error = same_name / n;
  for (int k = 0; k < 4; ++k) rep.recall_at[k] = recall_hits[k] / n;
  rep.entity_unique = unique / n;
  rep.entity_not_unique = not_unique / n;
  rep.entity_total = (unique + not_unique) / n;
  rep.relation_accuracy_gold_entity = rel_ok / n;
  return rep;
}

EvalReport Pipeline::evaluate(std::istream& questions_tsv) const {
  std::uint64_t skipped = 0;
  auto rows = parse_questions(questions_tsv, &skipped);
  EvalReport rep = evaluate(rows);
  rep.skipped_rows = skipped;
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%5.1f%%", 100.0 * v);
  return buf;
}

}  // namespace

std::string EvalReport::machine_string() const {
  std::ostringstream out;
  out << "accuracy: " << fmt(accuracy) << '\n'
      << "entity_not_unique: " << fmt(entity_not_unique) << '\n'
      << "entity_total: " << fmt(entity_total) << '\n'
      << "entity_unique: " << fmt(entity_unique) << '\n'
      << "questions: " << questions << '\n'
      << "recall@1: " << fmt(recall_at[0]) << '\n'
      << "recall@10: " << fmt(recall_at[2]) << '\n'
      << "recall@400: " << fmt(recall_at[3]) << '\n'
      << "recall@5: " << fmt(recall_at[1]) << '\n'
      << "relation_accuracy_gold_entity: " << fmt(relation_accuracy_gold_entity) << '\n'
      << "same_name_error: " << fmt(same_name_error) << '\n'
      << "skipped_rows: " << skipped_rows << '\n';
  return out.str();
}

std::string EvalReport::human_string() const {
  std::ostringstream out;
  out << "Entity recognition accuracy\n"
      << "  unique       " << pct(entity_unique) << '\n'
      << "  not unique   " << pct(entity_not_unique) << '\n'
      << "  total        " << pct(entity_total) << '\n'
      << '\n'
      << "Question answering (" << questions << " questions, " << skipped_rows
      << " rows skipped)\n"
      << "  accuracy                 " << pct(accuracy) << '\n'
      << "  same-name entity error   " << pct(same_name_error) << '\n'
      << "  relation acc (gold e)    " << pct(relation_accuracy_gold_entity) << '\n'
      << '\n'
      << "Recall of top K entity candidates\n";
  for (int k = 0; k < 4; ++k) {
    char line[64];
    std::snprintf(line, sizeof(line), "  K=%-4d %s\n", kRecallCutoffs[k], pct(recall_at[k]).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace sqa
