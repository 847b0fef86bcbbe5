#include "arbiter/graph_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "arbiter/error.hpp"

namespace arbiter {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

Mlp make_mlp(const std::vector<std::size_t>& widths, bool activate_final, std::mt19937_64& rng) {
  Mlp mlp;
  mlp.activate_final = activate_final;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(widths[l]);
    const auto out = static_cast<Eigen::Index>(widths[l + 1]);
    DenseLayer layer{MatrixXd(out, in), VectorXd::Zero(out)};
    // He bound for ReLU layers; the linear head gets the plain 1/sqrt(fan_in)
    // bound so fresh models start near uniform output.
    const bool relu = l + 2 < widths.size() || activate_final;
    const double limit = std::sqrt((relu ? 6.0 : 1.0) / static_cast<double>(in));
    // Column-major fill order fixes the draw sequence.
    for (Eigen::Index j = 0; j < in; ++j)
      for (Eigen::Index i = 0; i < out; ++i) layer.weight(i, j) = limit * uniform_pm1(rng);
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

Mlp zeros_like(const Mlp& m) {
  Mlp z;
  z.activate_final = m.activate_final;
  for (const auto& l : m.layers)
    z.layers.push_back(DenseLayer{MatrixXd::Zero(l.weight.rows(), l.weight.cols()), VectorXd::Zero(l.bias.size())});
  return z;
}

bool activated(const Mlp& mlp, std::size_t layer) {
  return layer + 1 < mlp.layers.size() || mlp.activate_final;
}

// Activations of every layer for a batch of column inputs.
struct MlpTrace {
  std::vector<MatrixXd> inputs;  // inputs[l] feeds layer l
  std::vector<MatrixXd> pre;     // pre-activation of layer l
  MatrixXd output;
};

// Runs the MLP given layer 0's pre-activation (computed by the caller).
void forward_from_pre(const Mlp& mlp, MatrixXd first_pre, MlpTrace& trace) {
  trace.pre.clear();
  trace.inputs.resize(1);
  trace.pre.push_back(std::move(first_pre));
  for (std::size_t l = 0;; ++l) {
    MatrixXd act = activated(mlp, l) ? MatrixXd(trace.pre[l].cwiseMax(0.0)) : trace.pre[l];
    if (l + 1 == mlp.layers.size()) {
      trace.output = std::move(act);
      return;
    }
    const auto& next = mlp.layers[l + 1];
    MatrixXd z = next.weight * act;
    z.colwise() += next.bias;
    trace.inputs.push_back(std::move(act));
    trace.pre.push_back(std::move(z));
  }
}

void forward(const Mlp& mlp, const MatrixXd& x, MlpTrace& trace) {
  MatrixXd z = mlp.layers[0].weight * x;
  z.colwise() += mlp.layers[0].bias;
  forward_from_pre(mlp, std::move(z), trace);
  trace.inputs[0] = x;
}

// Back-propagates d(loss)/d(output); accumulates gradients of every layer
// except layer 0's weight into `grad` and returns d(loss)/d(layer-0 pre-activation).
MatrixXd backward_to_first_pre(const Mlp& mlp, const MlpTrace& trace, MatrixXd d_out, Mlp& grad) {
  for (std::size_t l = mlp.layers.size(); l-- > 0;) {
    MatrixXd dz = activated(mlp, l) ? MatrixXd(d_out.cwiseProduct((trace.pre[l].array() > 0.0).cast<double>().matrix()))
                                    : d_out;
    grad.layers[l].bias += dz.rowwise().sum();
    if (l == 0) return dz;
    grad.layers[l].weight.noalias() += dz * trace.inputs[l].transpose();
    d_out = mlp.layers[l].weight.transpose() * dz;
  }
  return d_out;
}

// Full backward pass; returns d(loss)/d(input).
MatrixXd backward(const Mlp& mlp, const MlpTrace& trace, const MatrixXd& d_out, Mlp& grad) {
  MatrixXd dz = backward_to_first_pre(mlp, trace, d_out, grad);
  grad.layers[0].weight.noalias() += dz * trace.inputs[0].transpose();
  return mlp.layers[0].weight.transpose() * dz;
}

std::size_t as_size(Eigen::Index i) { return static_cast<std::size_t>(i); }

// Cached intermediate values of one forward pass.
struct GnTrace {
  std::size_t n_nodes = 0, n_edges = 0;
  MatrixXd node_features;  // Dv x N
  MatrixXd edge_features;  // De x K
  VectorXd global;         // Du
  std::vector<std::size_t> senders, receivers;
  std::vector<std::size_t> in_degree;
  MlpTrace edge_trace, node_trace, global_trace;
  MatrixXd node_input;    // (H + Dv + Du) x N
  VectorXd global_input;  // 2H + Du
  VectorXd logits;
  ClassProbs probs{};
};

void check_dims(const GNParameters& p, const LearningSample& s) {
  const GnDims& d = p.dims;
  if (s.nodes.empty()) throw DimensionError("sample of debate '" + s.debate_id + "' has no nodes");
  if (s.global.size() != d.global_dim)
    throw DimensionError("global feature has dimension " + std::to_string(s.global.size()) + ", model expects " +
                         std::to_string(d.global_dim));
  for (const auto& n : s.nodes)
    if (n.features.size() != d.node_dim)
      throw DimensionError("node feature has dimension " + std::to_string(n.features.size()) + ", model expects " +
                           std::to_string(d.node_dim));
  for (const auto& e : s.edges) {
    if (e.features.size() != d.edge_dim)
      throw DimensionError("edge feature has dimension " + std::to_string(e.features.size()) + ", model expects " +
                           std::to_string(d.edge_dim));
    if (e.sender >= s.nodes.size() || e.receiver >= s.nodes.size())
      throw DimensionError("edge endpoint out of range");
  }
}

void run_forward(const GNParameters& p, const LearningSample& s, GnTrace& t) {
  check_dims(p, s);
  const GnDims& d = p.dims;
  const auto H = static_cast<Eigen::Index>(d.hidden);
  const auto Dv = static_cast<Eigen::Index>(d.node_dim);
  const auto De = static_cast<Eigen::Index>(d.edge_dim);
  const auto Du = static_cast<Eigen::Index>(d.global_dim);
  t.n_nodes = s.nodes.size();
  t.n_edges = s.edges.size();
  const auto N = static_cast<Eigen::Index>(t.n_nodes);
  const auto K = static_cast<Eigen::Index>(t.n_edges);

  t.node_features.resize(Dv, N);
  for (Eigen::Index i = 0; i < N; ++i)
    t.node_features.col(i) = Eigen::Map<const VectorXd>(s.nodes[as_size(i)].features.data(), Dv);
  t.edge_features.resize(De, K);
  t.senders.resize(as_size(K));
  t.receivers.resize(as_size(K));
  t.in_degree.assign(t.n_nodes, 0);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& e = s.edges[as_size(k)];
    t.edge_features.col(k) = Eigen::Map<const VectorXd>(e.features.data(), De);
    t.senders[as_size(k)] = e.sender;
    t.receivers[as_size(k)] = e.receiver;
    ++t.in_degree[e.receiver];
  }
  t.global = Eigen::Map<const VectorXd>(s.global.data(), Du);

  // Edge update. Layer 0 is split by input block so node terms are computed
  // once per node rather than once per edge.
  MatrixXd edge_out = MatrixXd::Zero(H, K);
  if (K > 0) {
    const MatrixXd& w0 = p.edge_update.layers[0].weight;
    const MatrixXd recv_term = w0.middleCols(De, Dv) * t.node_features;
    const MatrixXd send_term = w0.middleCols(De + Dv, Dv) * t.node_features;
    VectorXd shared = w0.middleCols(De + 2 * Dv, Du) * t.global + p.edge_update.layers[0].bias;
    MatrixXd z = w0.leftCols(De) * t.edge_features;
    for (Eigen::Index k = 0; k < K; ++k)
      z.col(k) += recv_term.col(static_cast<Eigen::Index>(t.receivers[as_size(k)])) +
                  send_term.col(static_cast<Eigen::Index>(t.senders[as_size(k)])) + shared;
    forward_from_pre(p.edge_update, std::move(z), t.edge_trace);
    edge_out = t.edge_trace.output;
  }

  // Mean of incoming updated edges per node (zero when there are none).
  MatrixXd incoming = MatrixXd::Zero(H, N);
  for (Eigen::Index k = 0; k < K; ++k) incoming.col(static_cast<Eigen::Index>(t.receivers[as_size(k)])) += edge_out.col(k);
  for (Eigen::Index i = 0; i < N; ++i)
    if (t.in_degree[as_size(i)] > 0) incoming.col(i) /= static_cast<double>(t.in_degree[as_size(i)]);

  t.node_input.resize(H + Dv + Du, N);
  t.node_input.topRows(H) = incoming;
  t.node_input.middleRows(H, Dv) = t.node_features;
  t.node_input.bottomRows(Du) = t.global.replicate(1, N);
  forward(p.node_update, t.node_input, t.node_trace);

  VectorXd edge_mean = K > 0 ? VectorXd(edge_out.rowwise().mean()) : VectorXd(VectorXd::Zero(H));
  VectorXd node_mean = t.node_trace.output.rowwise().mean();
  t.global_input.resize(2 * H + Du);
  t.global_input << edge_mean, node_mean, t.global;
  forward(p.global_update, t.global_input, t.global_trace);
  t.logits = t.global_trace.output.col(0);

  if (!t.logits.allFinite()) throw NumericError("non-finite logits for sample of debate '" + s.debate_id + "'");
  const double m = t.logits.maxCoeff();
  const double e0 = std::exp(t.logits(0) - m), e1 = std::exp(t.logits(1) - m);
  t.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace

GNParameters GNParameters::initialize(const GnDims& dims, std::uint64_t seed) {
  if (dims.node_dim == 0 || dims.hidden == 0) throw DimensionError("node and hidden dimensions must be positive");
  std::mt19937_64 rng(seed);
  GNParameters p;
  p.dims = dims;
  p.rng_seed = seed;
  const std::size_t H = dims.hidden;
  p.edge_update = make_mlp({dims.edge_dim + 2 * dims.node_dim + dims.global_dim, H, H}, true, rng);
  p.node_update = make_mlp({H + dims.node_dim + dims.global_dim, H, H}, true, rng);
  p.global_update = make_mlp({2 * H + dims.global_dim, H, H, 2}, false, rng);
  return p;
}

GNParameters GNParameters::zeros_like(const GNParameters& other) {
  GNParameters z;
  z.dims = other.dims;
  z.rng_seed = other.rng_seed;
  z.edge_update = arbiter::zeros_like(other.edge_update);
  z.node_update = arbiter::zeros_like(other.node_update);
  z.global_update = arbiter::zeros_like(other.global_update);
  return z;
}

std::size_t GNParameters::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, std::size_t, std::size_t, std::span<const double> d) { n += d.size(); });
  return n;
}

void GNParameters::add_scaled(const GNParameters& other, double scale) {
  std::vector<std::span<const double>> src;
  other.visit([&](const std::string&, std::size_t, std::size_t, std::span<const double> d) { src.push_back(d); });
  std::size_t t = 0;
  visit([&](const std::string& name, std::size_t, std::size_t, std::span<double> d) {
    if (t >= src.size() || src[t].size() != d.size()) throw DimensionError("parameter shape mismatch at " + name);
    const auto& s = src[t++];
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += scale * s[i];
  });
}

bool GNParameters::all_finite() const {
  bool ok = true;
  visit([&](const std::string&, std::size_t, std::size_t, std::span<const double> d) {
    ok = ok && std::all_of(d.begin(), d.end(), [](double x) { return std::isfinite(x); });
  });
  return ok;
}

bool GNParameters::operator==(const GNParameters& o) const {
  if (!(dims == o.dims) || rng_seed != o.rng_seed) return false;
  std::vector<std::vector<double>> a, b;
  visit([&](const std::string&, std::size_t, std::size_t, std::span<const double> d) { a.emplace_back(d.begin(), d.end()); });
  o.visit([&](const std::string&, std::size_t, std::size_t, std::span<const double> d) { b.emplace_back(d.begin(), d.end()); });
  return a == b;
}

ClassProbs gn_forward(const GNParameters& params, const LearningSample& sample) {
  GnTrace t;
  run_forward(params, sample, t);
  return t.probs;
}

double gn_loss(const ClassProbs& probs, int label) {
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbabilityFloor));
}

GradientResult gn_loss_and_gradient(const GNParameters& params, const LearningSample& sample, int label) {
  if (label != 0 && label != 1) throw DimensionError("label must be 0 or 1");
  GnTrace t;
  run_forward(params, sample, t);

  GradientResult r{GNParameters::zeros_like(params), t.probs, gn_loss(t.probs, label)};
  GNParameters& g = r.gradient;
  const GnDims& d = params.dims;
  const auto H = static_cast<Eigen::Index>(d.hidden);
  const auto Dv = static_cast<Eigen::Index>(d.node_dim);
  const auto De = static_cast<Eigen::Index>(d.edge_dim);
  const auto Du = static_cast<Eigen::Index>(d.global_dim);
  const auto N = static_cast<Eigen::Index>(t.n_nodes);
  const auto K = static_cast<Eigen::Index>(t.n_edges);

  // d(-log p_label)/d logits = p - onehot, zero where the floor clamps.
  MatrixXd d_logits(2, 1);
  if (t.probs[static_cast<std::size_t>(label)] > kProbabilityFloor) {
    d_logits(0, 0) = t.probs[0] - (label == 0 ? 1.0 : 0.0);
    d_logits(1, 0) = t.probs[1] - (label == 1 ? 1.0 : 0.0);
  } else {
    d_logits.setZero();
  }

  const MatrixXd d_global_in = backward(params.global_update, t.global_trace, d_logits, g.global_update);
  const VectorXd d_edge_mean = d_global_in.col(0).head(H);
  const VectorXd d_node_mean = d_global_in.col(0).segment(H, H);

  const MatrixXd d_node_out = (d_node_mean / static_cast<double>(N)).replicate(1, N);
  const MatrixXd d_node_in = backward(params.node_update, t.node_trace, d_node_out, g.node_update);

  if (K == 0) return r;

  MatrixXd d_edge_out = (d_edge_mean / static_cast<double>(K)).replicate(1, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto recv = t.receivers[as_size(k)];
    d_edge_out.col(k) += d_node_in.col(static_cast<Eigen::Index>(recv)).head(H) / static_cast<double>(t.in_degree[recv]);
  }

  const MatrixXd dz = backward_to_first_pre(params.edge_update, t.edge_trace, d_edge_out, g.edge_update);
  MatrixXd by_receiver = MatrixXd::Zero(H, N), by_sender = MatrixXd::Zero(H, N);
  for (Eigen::Index k = 0; k < K; ++k) {
    by_receiver.col(static_cast<Eigen::Index>(t.receivers[as_size(k)])) += dz.col(k);
    by_sender.col(static_cast<Eigen::Index>(t.senders[as_size(k)])) += dz.col(k);
  }
  MatrixXd& gw0 = g.edge_update.layers[0].weight;
  gw0.leftCols(De).noalias() += dz * t.edge_features.transpose();
  gw0.middleCols(De, Dv).noalias() += by_receiver * t.node_features.transpose();
  gw0.middleCols(De + Dv, Dv).noalias() += by_sender * t.node_features.transpose();
  gw0.middleCols(De + 2 * Dv, Du).noalias() += dz.rowwise().sum() * t.global.transpose();
  return r;
}

GNParameters gn_gradient(const GNParameters& params, const LearningSample& sample, int label) {
  return gn_loss_and_gradient(params, sample, label).gradient;
}

GNParameters batch_gradient(const GNParameters& params, std::span<const LearningSample* const> batch) {
  GNParameters total = GNParameters::zeros_like(params);
  for (const LearningSample* s : batch) total.add_scaled(gn_gradient(params, *s, s->label), 1.0);
  return total;
}

void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    throw ValidationError("learning_rate must be a finite non-negative number");
  if (cfg.epochs < 1) throw ValidationError("epochs must be at least 1");
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be at least 1");
}

TrainResult train(GNParameters params, std::span<const LearningSample> samples, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  validate_train_config(cfg);
  TrainResult result{std::move(params), {}};
  if (samples.empty()) return result;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      GNParameters step = GNParameters::zeros_like(result.params);
      for (std::size_t b = start; b < end; ++b) {
        const LearningSample& s = samples[order[b]];
        GradientResult gr = gn_loss_and_gradient(result.params, s, s.label);
        loss_sum += gr.loss;
        step.add_scaled(gr.gradient, 1.0);
      }
      result.params.add_scaled(step, -cfg.learning_rate / static_cast<double>(end - start));
    }
    const double mean_loss = loss_sum / static_cast<double>(samples.size());
    if (!std::isfinite(mean_loss) || !result.params.all_finite())
      throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) + " (loss " +
                         std::to_string(mean_loss) + ")");
    result.loss_history.push_back(mean_loss);
    if (on_epoch && !on_epoch(epoch, result.params, mean_loss)) break;
  }
  return result;
}

int predicted_class(const ClassProbs& probs) { return probs[1] > probs[0] ? 1 : 0; }

DebatePrediction aggregate_predictions(std::span<const ClassProbs> per_sample) {
  if (per_sample.empty()) throw ValidationError("cannot predict a debate without samples");
  std::array<std::size_t, 2> votes{0, 0};
  std::array<double, 2> mean{0.0, 0.0};
  for (const auto& p : per_sample) {
    ++votes[static_cast<std::size_t>(predicted_class(p))];
    mean[0] += p[0];
    mean[1] += p[1];
  }
  mean[0] /= static_cast<double>(per_sample.size());
  mean[1] /= static_cast<double>(per_sample.size());
  int cls = 0;
  if (votes[1] > votes[0]) cls = 1;
  else if (votes[1] == votes[0] && mean[1] > mean[0]) cls = 1;
  return {cls, mean[static_cast<std::size_t>(cls)]};
}

DebatePrediction predict_debate(const GNParameters& params, std::span<const LearningSample> samples) {
  std::vector<ClassProbs> probs;
  probs.reserve(samples.size());
  for (const auto& s : samples) probs.push_back(gn_forward(params, s));
  return aggregate_predictions(probs);
}

double training_accuracy(const GNParameters& params, std::span<const LearningSample> samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples)
    if (predicted_class(gn_forward(params, s)) == s.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

namespace {

nlohmann::json mlp_activation(const Mlp& m) { return m.activate_final; }

}  // namespace

std::string checkpoint_to_json(const GNParameters& params) {
  nlohmann::json doc;
  doc["format"] = "arbiter-gn";
  doc["version"] = 1;
  doc["dims"] = {{"node", params.dims.node_dim},
                 {"edge", params.dims.edge_dim},
                 {"global", params.dims.global_dim},
                 {"hidden", params.dims.hidden}};
  doc["rng_seed"] = params.rng_seed;
  doc["activate_final"] = {{"edge", mlp_activation(params.edge_update)},
                           {"node", mlp_activation(params.node_update)},
                           {"global", mlp_activation(params.global_update)}};
  doc["tensors"] = nlohmann::json::array();
  params.visit([&](const std::string& name, std::size_t rows, std::size_t cols, std::span<const double> data) {
    doc["tensors"].push_back({{"name", name},
                              {"shape", {rows, cols}},
                              {"data", std::vector<double>(data.begin(), data.end())}});
  });
  return doc.dump() + "\n";
}

GNParameters checkpoint_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text.begin(), text.end());
    if (doc.at("format") != "arbiter-gn" || doc.at("version") != 1)
      throw ParseError("not an arbiter-gn version 1 checkpoint");
    GnDims dims;
    dims.node_dim = doc.at("dims").at("node");
    dims.edge_dim = doc.at("dims").at("edge");
    dims.global_dim = doc.at("dims").at("global");
    dims.hidden = doc.at("dims").at("hidden");
    GNParameters p = GNParameters::zeros_like(GNParameters::initialize(dims, 0));
    p.rng_seed = doc.at("rng_seed");
    const auto& tensors = doc.at("tensors");
    std::size_t t = 0;
    p.visit([&](const std::string& name, std::size_t rows, std::size_t cols, std::span<double> data) {
      if (t >= tensors.size()) throw ParseError("checkpoint is missing tensor " + name);
      const auto& j = tensors[t++];
      if (j.at("name") != name) throw ParseError("checkpoint tensor order mismatch at " + name);
      const auto shape = j.at("shape").get<std::vector<std::size_t>>();
      if (shape != std::vector<std::size_t>{rows, cols})
        throw DimensionError("checkpoint tensor " + name + " has the wrong shape");
      const auto values = j.at("data").get<std::vector<double>>();
      if (values.size() != data.size()) throw DimensionError("checkpoint tensor " + name + " has the wrong size");
      std::copy(values.begin(), values.end(), data.begin());
    });
    if (t != tensors.size()) throw ParseError("checkpoint has unexpected extra tensors");
    if (!p.all_finite()) throw ValidationError("checkpoint contains non-finite weights");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const GNParameters& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << checkpoint_to_json(params);
}

GNParameters load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace arbiter
