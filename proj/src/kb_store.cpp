#include "kb_store.hpp"

#include <set>
#include <stdexcept>
#include <string>

#include "text.hpp"

namespace sqa {

namespace {

bool skip_line(const std::string& line) {
  return line.empty() || line[0] == '#';
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

[[noreturn]] void bad_line(const char* what, std::size_t lineno, std::size_t fields) {
  throw std::runtime_error(std::string(what) + " line " + std::to_string(lineno) +
                           ": expected tab-separated fields, got " + std::to_string(fields));
}

}  // namespace

EntityRecord& KbStore::touch(const EntityId& e) {
  auto it = records_.find(e);
  if (it == records_.end()) it = records_.emplace(e, EntityRecord{e, {}, std::nullopt, 0}).first;
  return it->second;
}

void KbStore::ingest_triples(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (skip_line(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
      bad_line("triples", lineno, fields.size());
    const auto& s = fields[0];
    const auto& r = fields[1];
    const auto& o = fields[2];
    bool inserted = by_subject_[s][r].insert(o).second;
    if (inserted) {
      ++triple_count_;
      touch(s).out_degree += 1;
      touch(o);
    }
  }
}

void KbStore::ingest_aliases(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (skip_line(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty())
      bad_line("aliases", lineno, fields.size());
    std::string alias = normalize_text(fields[1]);
    if (alias.empty()) continue;
    touch(fields[0]).aliases.insert(alias);
  }
}

void KbStore::ingest_notable_types(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (skip_line(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      bad_line("notable types", lineno, fields.size());
    touch(fields[0]).notable_type = fields[1];
  }
}

std::uint64_t KbStore::out_degree(const EntityId& e) const {
  auto it = records_.find(e);
  return it == records_.end() ? 0 : it->second.out_degree;
}

std::set<RelationId> KbStore::relations_of(const EntityId& e) const {
  std::set<RelationId> out;
  auto it = by_subject_.find(e);
  if (it == by_subject_.end()) return out;
  for (const auto& [r, objs] : it->second) out.insert(r);
  return out;
}

std::set<EntityId> KbStore::objects_of(const EntityId& e, const RelationId& r) const {
  auto it = by_subject_.find(e);
  if (it == by_subject_.end()) return {};
  auto jt = it->second.find(r);
  if (jt == it->second.end()) return {};
  return jt->second;
}

const EntityRecord* KbStore::record(const EntityId& e) const {
  auto it = records_.find(e);
  return it == records_.end() ? nullptr : &it->second;
}

std::optional<std::string> KbStore::notable_type(const EntityId& e) const {
  auto it = records_.find(e);
  return it == records_.end() ? std::nullopt : it->second.notable_type;
}

std::uint64_t KbStore::distinct_type_count() const {
  std::set<std::string> types;
  for (const auto& [id, rec] : records_)
    if (rec.notable_type) types.insert(*rec.notable_type);
  return types.size();
}

void KbStore::save(std::ostream& out) const {
  out << "SQAKB v1\n";
  for (const auto& [s, rels] : by_subject_)
    for (const auto& [r, objs] : rels)
      for (const auto& o : objs) out << "T\t" << s << '\t' << r << '\t' << o << '\n';
  for (const auto& [id, rec] : records_) {
    for (const auto& a : rec.aliases) out << "A\t" << id << '\t' << a << '\n';
    if (rec.notable_type) out << "Y\t" << id << '\t' << *rec.notable_type << '\n';
  }
}

KbStore KbStore::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "SQAKB v1")
    throw std::runtime_error("kb snapshot: missing SQAKB v1 header");
  KbStore kb;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (skip_line(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() < 3) bad_line("kb snapshot", lineno, fields.size());
    const auto& tag = fields[0];
    if (tag == "T" && fields.size() == 4) {
      bool inserted = kb.by_subject_[fields[1]][fields[2]].insert(fields[3]).second;
      if (inserted) {
        ++kb.triple_count_;
        kb.touch(fields[1]).out_degree += 1;
        kb.touch(fields[3]);
      }
    } else if (tag == "A" && fields.size() == 3) {
      kb.touch(fields[1]).aliases.insert(normalize_text(fields[2]));
    } else if (tag == "Y" && fields.size() == 3) {
      kb.touch(fields[1]).notable_type = fields[2];
    } else {
      bad_line("kb snapshot", lineno, fields.size());
    }
  }
  return kb;
}

bool KbStore::operator==(const KbStore& other) const {
  if (triple_count_ != other.triple_count_ || by_subject_ != other.by_subject_) return false;
  if (records_.size() != other.records_.size()) return false;
  for (const auto& [id, rec] : records_) {
    auto it = other.records_.find(id);
    if (it == other.records_.end()) return false;
    const auto& o = it->second;
    if (rec.aliases != o.aliases || rec.notable_type != o.notable_type ||
        rec.out_degree != o.out_degree)
      return false;
  }
  return true;
}

std::string rewrite_freebase_iri(const std::string& iri) {
  static const std::string kNs = "http://rdf.freebase.com/ns/";
  if (iri.rfind(kNs, 0) != 0) return iri;
  std::string rest = iri.substr(kNs.size());
  if (rest.rfind("m.", 0) == 0) return "/m/" + rest.substr(2);
  for (char& c : rest)
    if (c == '.') c = '/';
  return "/" + rest;
}

namespace {

// Minimal N-Triples reader: `<iri> <iri> (<iri> | "literal") .`
// Returns false when the line is not a well-formed statement.
bool parse_ntriple(const std::string& line, std::string& subj, std::string& pred,
                   std::string& obj, bool& obj_is_iri) {
  std::size_t i = 0;
  auto skip_ws = [&]() {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  };
  auto read_iri = [&](std::string& out) {
    if (i >= line.size() || line[i] != '<') return false;
    std::size_t end = line.find('>', i + 1);
    if (end == std::string::npos) return false;
    out = line.substr(i + 1, end - i - 1);
    i = end + 1;
    return !out.empty();
  };
  skip_ws();
  if (!read_iri(subj)) return false;
  skip_ws();
  if (!read_iri(pred)) return false;
  skip_ws();
  if (i >= line.size()) return false;
  if (line[i] == '<') {
    if (!read_iri(obj)) return false;
    obj_is_iri = true;
  } else if (line[i] == '"') {
    std::string text;
    ++i;
    bool closed = false;
    while (i < line.size()) {
      char c = line[i++];
      if (c == '\\' && i < line.size()) {
        char e = line[i++];
        switch (e) {
          case 'n': text.push_back('\n'); break;
          case 't': text.push_back('\t'); break;
          case '\\': text.push_back('\\'); break;
          case '"': text.push_back('"'); break;
          default: text.push_back(e); break;
        }
      } else if (c == '"') {
        closed = true;
        break;
      } else {
        text.push_back(c);
      }
    }
    if (!closed) return false;
    // drop @lang / ^^datatype suffixes
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    obj = text;
    obj_is_iri = false;
  } else {
    return false;
  }
  skip_ws();
  if (i >= line.size() || line[i] != '.') return false;
  ++i;
  skip_ws();
  return i == line.size();
}

}  // namespace

std::uint64_t extract_notable_types_ntriples(std::istream& in, std::ostream& out,
                                             const std::string& predicate_suffix,
                                             std::uint64_t* skipped) {
  std::uint64_t emitted = 0;
  std::uint64_t bad = 0;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    std::string subj, pred, obj;
    bool obj_is_iri = false;
    if (!parse_ntriple(line, subj, pred, obj, obj_is_iri)) {
      ++bad;
      continue;
    }
    if (pred.size() < predicate_suffix.size() ||
        pred.compare(pred.size() - predicate_suffix.size(), predicate_suffix.size(),
                     predicate_suffix) != 0)
      continue;
    std::string id = rewrite_freebase_iri(subj);
    std::string type_text = obj_is_iri ? rewrite_freebase_iri(obj) : obj;
    if (id.empty() || type_text.empty()) {
      ++bad;
      continue;
    }
    out << id << '\t' << type_text << '\n';
    ++emitted;
  }
  if (skipped) *skipped = bad;
  return emitted;
}

}  // namespace sqa
