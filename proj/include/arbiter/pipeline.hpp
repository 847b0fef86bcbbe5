#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arbiter/af.hpp"
#include "arbiter/argument_model.hpp"
#include "arbiter/graph_network.hpp"
#include "arbiter/kv_config.hpp"
#include "arbiter/sample_builder.hpp"
#include "arbiter/semantics.hpp"

namespace arbiter {

// ---- splits and metrics ---------------------------------------------------

struct DebateSplit {
  std::vector<std::size_t> train;  // indices into the debate list, ascending
  std::vector<std::size_t> test;
};

// round(ratio * n) debates go to train (clamped so both sides are non-empty).
DebateSplit split_debates(std::size_t n_debates, double ratio, std::uint64_t seed);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double weighted_f1 = 0.0;
};

// Rows are gold classes, columns predictions: [[FF, FA], [AF, AA]].
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

// Per-class scores (0/0 -> 0) averaged with gold-support weights.
Metrics metrics(std::span<const int> predictions, std::span<const int> golds);
Confusion confusion(std::span<const int> predictions, std::span<const int> golds);

// ---- baselines ------------------------------------------------------------

std::vector<int> baseline_random(std::size_t n_debates, std::uint64_t seed);

// Counts member arguments of each stance over all extensions; larger total
// wins, ties go to Favour.
int atb_predict(const ArgumentationFramework& af, std::span<const Extension> exts);
std::vector<int> baseline_atb(std::span<const Debate> debates, Semantics semantics,
                              const EnumerationLimits& limits = {});

inline constexpr std::size_t kRelationKinds = 3;

// One sample per debate straight from the argument graph: nodes are ADUs,
// edges are relations with a one-hot (inference, conflict, rephrase) feature.
LearningSample build_graph_sample(const Debate& debate, const EmbeddingTable& emb, std::size_t global_dim = 2);

struct GnModelConfig {
  std::size_t hidden = 128;
  std::size_t edge_dim = 8;
  TrainConfig train;
  std::uint64_t init_seed = 0;
};

// Trains on the train debates' graph samples and predicts each test debate.
std::vector<int> baseline_gnb(std::span<const Debate> train_debates, std::span<const Debate> test_debates,
                              const EmbeddingTable& emb, const GnModelConfig& cfg);

// ---- synthetic corpus -----------------------------------------------------

struct SyntheticCorpus {
  std::vector<Debate> debates;
  EmbeddingTable embeddings;
};

struct SyntheticOptions {
  std::size_t min_adus = 10;
  std::size_t max_adus = 40;
  std::size_t dimension = 32;
  double noise = 1.0;  // total expected norm of the noise part
};

// Random lines of reasoning per stance, conflicts across stances. The ADUs of
// the winning side are shifted by `signal_strength` along a fixed unit
// direction owned by that side, so strength 0 makes features label-free.
SyntheticCorpus generate_synthetic_corpus(std::size_t n_debates, double signal_strength, std::uint64_t seed,
                                          const SyntheticOptions& options = {});

// ---- experiment -----------------------------------------------------------

enum class ModelKind { Random, NaiveAtb, PreferredAtb, Longformer, Gnb, NaiveGn, PreferredGn };

std::string_view to_string(ModelKind m);
ModelKind parse_model_kind(std::string_view name);

struct ExperimentConfig {
  std::filesystem::path corpus;              // directory of debate JSON files
  std::optional<std::size_t> synthetic_debates;  // replaces `corpus` when set
  double synthetic_signal = 1.0;
  std::uint64_t synthetic_seed = 0;
  std::size_t synthetic_dim = 32;

  std::string embeddings = "hash";  // path to an embedding file, or "hash"
  std::size_t hash_dim = 768;
  std::uint64_t hash_seed = 0;

  double split_ratio = 0.8;
  std::size_t runs = 3;
  std::uint64_t seed = 0;
  bool fixed_split = false;

  std::vector<ModelKind> models{ModelKind::Random,     ModelKind::NaiveAtb, ModelKind::PreferredAtb,
                                ModelKind::Longformer, ModelKind::Gnb,      ModelKind::NaiveGn,
                                ModelKind::PreferredGn};
  GnModelConfig gn;
  EnumerationLimits limits;
  std::size_t workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

ExperimentConfig experiment_config_from_kv(const KvConfig& kv);
TrainConfig train_config_from_kv(const KvConfig& kv);

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<std::string> test_debates;
  std::vector<int> predictions;
  std::vector<int> golds;
  Metrics debate_metrics;
  Confusion confusion{};
  std::optional<Metrics> sample_metrics;  // extension-wise, GN models only
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::size_t fallback_predictions = 0;  // test debates without samples
};

struct ModelReport {
  ModelKind model = ModelKind::Random;
  bool implemented = true;
  std::vector<RunResult> runs;
  Metrics mean;
  std::optional<Metrics> mean_sample_metrics;
  Confusion confusion{};  // summed over runs
};

struct SemanticsStats {
  std::size_t extensions = 0;
  std::size_t samples = 0;
  std::size_t class0 = 0;
  std::size_t class1 = 0;
  std::size_t dropped_empty = 0;
};

struct EvalReport {
  static constexpr int kSchemaVersion = 1;
  StatsReport corpus;
  std::optional<SemanticsStats> naive;
  std::optional<SemanticsStats> preferred;
  std::vector<ModelReport> models;

  std::string to_json() const;
  std::string to_text() const;
};

// Phase-I output for every debate under one semantics.
struct SolvedCorpus {
  std::vector<ArgumentationFramework> afs;
  std::vector<std::vector<Extension>> extensions;
};

// Encodes and solves every debate, in parallel across `workers` threads.
SolvedCorpus solve_corpus(std::span<const Debate> debates, Semantics semantics, const EnumerationLimits& limits,
                          std::size_t workers = 0);

// Extension and non-empty sample counts per winner class.
SemanticsStats semantics_stats(std::span<const Debate> debates, const SolvedCorpus& solved);

EvalReport run_experiment(const ExperimentConfig& cfg);
EvalReport run_experiment(const ExperimentConfig& cfg, std::span<const Debate> debates, const EmbeddingTable& emb);

}  // namespace arbiter
