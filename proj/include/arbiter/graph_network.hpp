#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "arbiter/sample_builder.hpp"

namespace arbiter {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

// Stack of dense layers with ReLU between them; the last layer is linear
// unless `activate_final` is set.
struct Mlp {
  std::vector<DenseLayer> layers;
  bool activate_final = false;

  std::size_t input_dim() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols()); }
  std::size_t output_dim() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows()); }
};

struct GnDims {
  std::size_t node_dim = 768;
  std::size_t edge_dim = 8;
  std::size_t global_dim = 2;
  std::size_t hidden = 128;

  bool operator==(const GnDims&) const = default;
};

// One graph-network block: edge update, node update, global update with a
// 2-unit linear head. The edge and node MLPs are two ReLU layers of
// `hidden` units; the global MLP adds the linear head on top.
struct GNParameters {
  GnDims dims;
  Mlp edge_update;    // [e_k, v_receiver, v_sender, u] -> hidden
  Mlp node_update;    // [mean incoming e'_k, v_i, u] -> hidden
  Mlp global_update;  // [mean e', mean v', u] -> 2 logits
  std::uint64_t rng_seed = 0;

  // Uniform(-sqrt(6/fan_in), +sqrt(6/fan_in)) weights for ReLU layers,
  // Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) for the linear head, zero biases.
  static GNParameters initialize(const GnDims& dims, std::uint64_t seed);
  static GNParameters zeros_like(const GNParameters& other);

  std::size_t parameter_count() const;

  // Calls f(name, rows, cols, span) for every tensor in a fixed order.
  template <typename F>
  void visit(F&& f) {
    visit_mlp("edge", edge_update, f);
    visit_mlp("node", node_update, f);
    visit_mlp("global", global_update, f);
  }
  template <typename F>
  void visit(F&& f) const {
    const_cast<GNParameters*>(this)->visit([&](const std::string& name, std::size_t r, std::size_t c,
                                               std::span<double> data) {
      f(name, r, c, std::span<const double>(data.data(), data.size()));
    });
  }

  // this += scale * other
  void add_scaled(const GNParameters& other, double scale);
  bool all_finite() const;

  bool operator==(const GNParameters& o) const;

 private:
  template <typename F>
  static void visit_mlp(const std::string& prefix, Mlp& mlp, F& f) {
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
      auto& layer = mlp.layers[l];
      const std::string base = prefix + "." + std::to_string(l);
      f(base + ".weight", static_cast<std::size_t>(layer.weight.rows()), static_cast<std::size_t>(layer.weight.cols()),
        std::span<double>(layer.weight.data(), static_cast<std::size_t>(layer.weight.size())));
      f(base + ".bias", static_cast<std::size_t>(layer.bias.size()), std::size_t{1},
        std::span<double>(layer.bias.data(), static_cast<std::size_t>(layer.bias.size())));
    }
  }
};

using ClassProbs = std::array<double, 2>;  // (p_Favour, p_Against)

// Throws DimensionError on feature/parameter shape mismatch or an empty
// sample, NumericError on a non-finite activation.
ClassProbs gn_forward(const GNParameters& params, const LearningSample& sample);

inline constexpr double kProbabilityFloor = 1e-12;

// -log(max(probs[label], 1e-12))
double gn_loss(const ClassProbs& probs, int label);

struct GradientResult {
  GNParameters gradient;
  ClassProbs probs{};
  double loss = 0.0;
};

// Exact gradient of gn_loss(gn_forward(params, sample), label).
GradientResult gn_loss_and_gradient(const GNParameters& params, const LearningSample& sample, int label);
GNParameters gn_gradient(const GNParameters& params, const LearningSample& sample, int label);

// Sum of per-sample gradients (labels taken from the samples).
GNParameters batch_gradient(const GNParameters& params, std::span<const LearningSample* const> batch);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
};

void validate_train_config(const TrainConfig& cfg);

struct TrainResult {
  GNParameters params;
  std::vector<double> loss_history;  // mean pre-update sample loss per epoch
};

// Called after each epoch with (epoch index, params, mean loss); return false to stop.
using EpochCallback = std::function<bool(std::size_t, const GNParameters&, double)>;

// Plain SGD, shuffled each epoch with a generator seeded from cfg.seed.
// Step = -lr * (sum of batch gradients) / batch size.
TrainResult train(GNParameters params, std::span<const LearningSample> samples, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

int predicted_class(const ClassProbs& probs);

struct DebatePrediction {
  int cls = 0;
  double confidence = 0.0;
};

// Majority vote over per-sample argmax; ties go to the class with larger
// mean probability, then to Favour.
DebatePrediction aggregate_predictions(std::span<const ClassProbs> per_sample);
DebatePrediction predict_debate(const GNParameters& params, std::span<const LearningSample> samples);

double training_accuracy(const GNParameters& params, std::span<const LearningSample> samples);

std::string checkpoint_to_json(const GNParameters& params);
GNParameters checkpoint_from_json(std::string_view text);
void save_checkpoint(const GNParameters& params, const std::filesystem::path& path);
GNParameters load_checkpoint(const std::filesystem::path& path);

}  // namespace arbiter
