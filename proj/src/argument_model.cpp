#include "arbiter/argument_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "arbiter/error.hpp"

namespace arbiter {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

std::optional<std::size_t> Debate::find_adu(std::string_view adu_id) const {
  for (std::size_t i = 0; i < adus.size(); ++i)
    if (adus[i].id == adu_id) return i;
  return std::nullopt;
}

std::string_view to_code(Stance s) { return s == Stance::Favour ? "F" : "A"; }

std::string_view to_code(Phase p) {
  switch (p) {
    case Phase::Introduction: return "intro";
    case Phase::Argumentation: return "arg";
    case Phase::Conclusion: return "concl";
  }
  return "arg";
}

std::string_view to_code(RelationKind k) {
  switch (k) {
    case RelationKind::Inference: return "inference";
    case RelationKind::Conflict: return "conflict";
    case RelationKind::Rephrase: return "rephrase";
  }
  return "inference";
}

Stance parse_stance(std::string_view code) {
  if (code == "F") return Stance::Favour;
  if (code == "A") return Stance::Against;
  throw ValidationError("invalid stance '" + std::string(code) + "' (expected \"F\" or \"A\")");
}

Phase parse_phase(std::string_view code) {
  if (code == "intro") return Phase::Introduction;
  if (code == "arg") return Phase::Argumentation;
  if (code == "concl") return Phase::Conclusion;
  throw ValidationError("invalid phase '" + std::string(code) +
                        "' (expected \"intro\", \"arg\" or \"concl\")");
}

RelationKind parse_relation_kind(std::string_view code) {
  if (code == "inference") return RelationKind::Inference;
  if (code == "conflict") return RelationKind::Conflict;
  if (code == "rephrase") return RelationKind::Rephrase;
  throw ValidationError("invalid relation kind '" + std::string(code) + "'");
}

void validate_debate(const Debate& debate) {
  const std::string where = "debate '" + debate.id + "'";
  std::unordered_set<std::string> ids;
  for (const Adu& adu : debate.adus) {
    if (!ids.insert(adu.id).second)
      throw ValidationError(where + ": duplicate ADU id '" + adu.id + "'");
    if (trim(adu.text).empty())
      throw ValidationError(where + ": ADU '" + adu.id + "' has empty text");
    if (adu.debate_id != debate.id)
      throw ValidationError(where + ": ADU '" + adu.id + "' belongs to debate '" + adu.debate_id +
                            "'");
  }
  for (const Relation& rel : debate.relations) {
    if (!ids.contains(rel.source))
      throw ValidationError(where + ": relation source '" + rel.source + "' is not a known ADU");
    if (!ids.contains(rel.target))
      throw ValidationError(where + ": relation target '" + rel.target + "' is not a known ADU");
    if (rel.source == rel.target)
      throw ValidationError(where + ": self-relation on ADU '" + rel.source + "'");
  }
}

Debate parse_debate_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end(), nullptr, true, /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed debate JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("debate JSON must be an object");

  Debate debate;
  debate.id = require_string(doc, "id", "debate");
  const std::string where = "debate '" + debate.id + "'";
  debate.winner = parse_stance(require_string(doc, "winner", where));

  const json& adus = require(doc, "adus", where);
  if (!adus.is_array()) throw ParseError(where + ": 'adus' must be an array");
  for (const json& a : adus) {
    if (!a.is_object()) throw ParseError(where + ": ADU entries must be objects");
    Adu adu;
    adu.id = require_string(a, "id", where + " ADU");
    const std::string aw = where + " ADU '" + adu.id + "'";
    adu.text = require_string(a, "text", aw);
    adu.stance = parse_stance(require_string(a, "stance", aw));
    adu.phase = parse_phase(require_string(a, "phase", aw));
    adu.debate_id = debate.id;
    debate.adus.push_back(std::move(adu));
  }

  const json& rels = require(doc, "relations", where);
  if (!rels.is_array()) throw ParseError(where + ": 'relations' must be an array");
  for (const json& r : rels) {
    if (!r.is_object()) throw ParseError(where + ": relation entries must be objects");
    Relation rel;
    rel.source = require_string(r, "source", where + " relation");
    rel.target = require_string(r, "target", where + " relation");
    rel.kind = parse_relation_kind(require_string(r, "kind", where + " relation"));
    debate.relations.push_back(std::move(rel));
  }

  validate_debate(debate);
  return debate;
}

std::string debate_to_json(const Debate& debate) {
  json doc;
  doc["id"] = debate.id;
  doc["winner"] = to_code(debate.winner);
  doc["adus"] = json::array();
  for (const Adu& a : debate.adus) {
    doc["adus"].push_back(
        {{"id", a.id}, {"text", a.text}, {"stance", to_code(a.stance)}, {"phase", to_code(a.phase)}});
  }
  doc["relations"] = json::array();
  for (const Relation& r : debate.relations)
    doc["relations"].push_back({{"source", r.source}, {"target", r.target}, {"kind", to_code(r.kind)}});
  return doc.dump(2) + "\n";
}

Debate load_debate(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_debate_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_debate(const Debate& debate, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << debate_to_json(debate);
}

std::vector<Debate> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ParseError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<Debate> debates;
  debates.reserve(files.size());
  std::set<std::string> seen;
  for (const auto& f : files) {
    debates.push_back(load_debate(f));
    if (!seen.insert(debates.back().id).second)
      throw ValidationError(f.string() + ": duplicate debate id '" + debates.back().id + "'");
  }
  return debates;
}

std::size_t count_words(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

StatsReport corpus_stats(const std::vector<Debate>& debates) {
  StatsReport r;
  r.debates = debates.size();
  for (const Debate& d : debates) {
    r.adus += d.adus.size();
    r.relations += d.relations.size();
    for (const Adu& a : d.adus) r.words += count_words(a.text);
    for (const Relation& rel : d.relations) ++r.relations_by_kind[rel.kind];
    (d.winner == Stance::Favour ? r.favour_wins : r.against_wins) += 1;
  }
  return r;
}

std::string StatsReport::to_text() const {
  std::ostringstream os;
  os << "debates: " << debates << "\n"
     << "adus: " << adus << "\n"
     << "words: " << words << "\n"
     << "relations: " << relations;
  if (!relations_by_kind.empty()) {
    os << " (";
    bool first = true;
    for (const auto& [kind, n] : relations_by_kind) {
      os << (first ? "" : ", ") << to_code(kind) << " " << n;
      first = false;
    }
    os << ")";
  }
  os << "\n"
     << "winners: " << favour_wins << " F / " << against_wins << " A\n";
  return os.str();
}

}  // namespace arbiter
