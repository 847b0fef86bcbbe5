#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "arbiter/af.hpp"
#include "arbiter/argument_model.hpp"
#include "arbiter/semantics.hpp"

namespace arbiter {

// ADU sentence vectors keyed "<debate_id>/<adu_id>".
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension = 768);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

  // Throws DimensionError on a length mismatch, ValidationError on a
  // non-finite entry or duplicate key.
  void add(std::string key, std::vector<double> vector);

  bool contains(std::string_view debate_id, std::string_view adu_id) const;
  // Throws ValidationError when missing.
  const std::vector<double>& at(std::string_view debate_id, std::string_view adu_id) const;

  // Keys in sorted order.
  std::vector<std::string> keys() const;

  static std::string key(std::string_view debate_id, std::string_view adu_id);

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

EmbeddingTable parse_embeddings(std::string_view text);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
// Rows in sorted key order, 9 significant digits.
std::string format_embeddings(const EmbeddingTable& table);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

// Deterministic unit-norm pseudo-embedding of `text`. Bit-identical across
// platforms: built from 64-bit integer hashing plus one correctly rounded sqrt.
std::vector<double> hash_embed(std::string_view text, std::size_t dimension, std::uint64_t seed);

// Embeds every ADU of the corpus with hash_embed.
EmbeddingTable hash_embed_corpus(const std::vector<Debate>& debates, std::size_t dimension, std::uint64_t seed);

struct BipartiteNode {
  ArgId argument = 0;
  Stance stance = Stance::Favour;
  std::vector<std::string> adu_ids;
};

struct BipartiteGraph {
  std::string debate_id;
  Semantics semantics = Semantics::Naive;
  std::vector<BipartiteNode> nodes;                      // ascending argument id
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (sender, receiver) node indices
};

// Complete bipartite digraph between the Favour and Against members of `ext`.
BipartiteGraph build_bipartite(const Extension& ext, const ArgumentationFramework& af);

struct SampleNode {
  ArgId argument = 0;
  Stance stance = Stance::Favour;
  std::vector<double> features;
};

struct SampleEdge {
  std::size_t sender = 0;
  std::size_t receiver = 0;
  std::vector<double> features;
};

struct LearningSample {
  std::string debate_id;
  std::string semantics;  // "naive", "preferred" or "graph"
  std::vector<SampleNode> nodes;
  std::vector<SampleEdge> edges;
  std::vector<double> global;
  int label = 0;  // 0 Favour won, 1 Against won

  std::size_t node_dim() const { return nodes.empty() ? 0 : nodes.front().features.size(); }
  std::size_t edge_dim() const { return edges.empty() ? 0 : edges.front().features.size(); }
};

inline int class_of(Stance winner) { return winner == Stance::Favour ? 0 : 1; }
inline Stance stance_of_class(int c) { return c == 0 ? Stance::Favour : Stance::Against; }

struct FeatureConfig {
  std::size_t edge_dim = 8;
  double edge_value = 1.0;
  std::size_t global_dim = 2;
};

// Node feature = mean of member-ADU embeddings; edges get the constant
// vector; global is zero; label from debate.winner.
LearningSample init_features(const BipartiteGraph& graph, const Debate& debate, const EmbeddingTable& emb,
                             const FeatureConfig& config = {});

struct SampleSet {
  std::vector<LearningSample> samples;
  std::size_t dropped_empty = 0;
};

// One sample per extension; extensions with no arguments are dropped.
SampleSet build_samples(const Debate& debate, const ArgumentationFramework& af,
                        const std::vector<Extension>& exts, const EmbeddingTable& emb,
                        const FeatureConfig& config = {});

// Throws ValidationError naming the first broken sample invariant.
void validate_sample(const LearningSample& sample);

std::string samples_to_json(const std::vector<LearningSample>& samples);
std::vector<LearningSample> samples_from_json(std::string_view text);
void save_samples(const std::vector<LearningSample>& samples, const std::filesystem::path& path);
std::vector<LearningSample> load_samples(const std::filesystem::path& path);

}  // namespace arbiter
