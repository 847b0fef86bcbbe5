#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arbiter {

enum class Stance { Favour, Against };
enum class Phase { Introduction, Argumentation, Conclusion };
enum class RelationKind { Inference, Conflict, Rephrase };

struct Adu {
  std::string id;
  std::string text;
  Stance stance = Stance::Favour;
  Phase phase = Phase::Argumentation;
  std::string debate_id;

  bool operator==(const Adu&) const = default;
};

struct Relation {
  std::string source;
  std::string target;
  RelationKind kind = RelationKind::Inference;

  bool operator==(const Relation&) const = default;
};

struct Debate {
  std::string id;
  std::vector<Adu> adus;
  std::vector<Relation> relations;
  Stance winner = Stance::Favour;

  bool operator==(const Debate&) const = default;

  // Index of the ADU with the given id, if any.
  std::optional<std::size_t> find_adu(std::string_view adu_id) const;
};

// Short wire codes used by the debate JSON schema ("F"/"A", "intro"/...).
std::string_view to_code(Stance s);
std::string_view to_code(Phase p);
std::string_view to_code(RelationKind k);
Stance parse_stance(std::string_view code);
Phase parse_phase(std::string_view code);
RelationKind parse_relation_kind(std::string_view code);

// Throws ValidationError naming the first violated invariant.
void validate_debate(const Debate& debate);

Debate parse_debate_json(std::string_view json_text);
std::string debate_to_json(const Debate& debate);

Debate load_debate(const std::filesystem::path& path);
void save_debate(const Debate& debate, const std::filesystem::path& path);

// Every *.json file in dir, sorted by file name.
std::vector<Debate> load_corpus(const std::filesystem::path& dir);

struct StatsReport {
  std::size_t debates = 0;
  std::size_t adus = 0;
  std::size_t words = 0;
  std::size_t relations = 0;
  std::size_t favour_wins = 0;
  std::size_t against_wins = 0;
  std::map<RelationKind, std::size_t> relations_by_kind;

  std::string to_text() const;
};

StatsReport corpus_stats(const std::vector<Debate>& debates);

// Whitespace-delimited token count.
std::size_t count_words(std::string_view text);

}  // namespace arbiter
