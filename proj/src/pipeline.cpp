#include "arbiter/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "arbiter/af_encoder.hpp"
#include "arbiter/error.hpp"

namespace arbiter {

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller on our own uniforms keeps draws identical across standard libraries.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace

// ---- splits and metrics ---------------------------------------------------

DebateSplit split_debates(std::size_t n_debates, double ratio, std::uint64_t seed) {
  if (n_debates < 2) throw ValidationError("need at least 2 debates to split (got " + std::to_string(n_debates) + ")");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must lie in (0, 1)");
  std::vector<std::size_t> perm(n_debates);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n_debates; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);

  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n_debates)));
  n_train = std::clamp<std::size_t>(n_train, 1, n_debates - 1);
  DebateSplit s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Confusion confusion(std::span<const int> predictions, std::span<const int> golds) {
  if (predictions.size() != golds.size()) throw ValidationError("predictions and golds differ in length");
  Confusion c{};
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if ((golds[i] != 0 && golds[i] != 1) || (predictions[i] != 0 && predictions[i] != 1))
      throw ValidationError("classes must be 0 or 1");
    ++c[static_cast<std::size_t>(golds[i])][static_cast<std::size_t>(predictions[i])];
  }
  return c;
}

Metrics metrics(std::span<const int> predictions, std::span<const int> golds) {
  if (golds.empty()) throw ValidationError("metrics need at least one prediction");
  const Confusion c = confusion(predictions, golds);
  const double n = static_cast<double>(golds.size());
  Metrics m;
  for (std::size_t k = 0; k < 2; ++k) {
    const double tp = static_cast<double>(c[k][k]);
    const double predicted = static_cast<double>(c[0][k] + c[1][k]);
    const double support = static_cast<double>(c[k][0] + c[k][1]);
    const double p = predicted > 0 ? tp / predicted : 0.0;
    const double r = support > 0 ? tp / support : 0.0;
    const double f = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
    const double w = support / n;
    m.precision += w * p;
    m.recall += w * r;
    m.weighted_f1 += w * f;
  }
  return m;
}

// ---- baselines ------------------------------------------------------------

std::vector<int> baseline_random(std::size_t n_debates, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> out(n_debates);
  for (auto& c : out) c = static_cast<int>(rng() >> 63);
  return out;
}

int atb_predict(const ArgumentationFramework& af, std::span<const Extension> exts) {
  std::size_t favour = 0, against = 0;
  for (const auto& e : exts)
    for (ArgId a : e.arguments) (af.arguments().at(a).stance == Stance::Favour ? favour : against) += 1;
  return against > favour ? 1 : 0;
}

std::vector<int> baseline_atb(std::span<const Debate> debates, Semantics semantics, const EnumerationLimits& limits) {
  std::vector<int> out;
  out.reserve(debates.size());
  for (const auto& d : debates) {
    const auto af = encode_af(d);
    out.push_back(atb_predict(af, extensions(af, semantics, limits)));
  }
  return out;
}

LearningSample build_graph_sample(const Debate& debate, const EmbeddingTable& emb, std::size_t global_dim) {
  LearningSample s;
  s.debate_id = debate.id;
  s.semantics = "graph";
  s.label = class_of(debate.winner);
  s.global.assign(global_dim, 0.0);
  for (std::size_t i = 0; i < debate.adus.size(); ++i) {
    const Adu& a = debate.adus[i];
    s.nodes.push_back(SampleNode{static_cast<ArgId>(i), a.stance, emb.at(debate.id, a.id)});
  }
  for (const Relation& r : debate.relations) {
    std::vector<double> onehot(kRelationKinds, 0.0);
    onehot[static_cast<std::size_t>(r.kind)] = 1.0;
    s.edges.push_back(SampleEdge{*debate.find_adu(r.source), *debate.find_adu(r.target), std::move(onehot)});
  }
  return s;
}

namespace {

GNParameters train_gn(std::span<const LearningSample> train_samples, std::size_t node_dim, std::size_t edge_dim,
                      const GnModelConfig& cfg) {
  GnDims dims{node_dim, edge_dim, 2, cfg.hidden};
  auto params = GNParameters::initialize(dims, cfg.init_seed);
  if (train_samples.empty()) return params;
  return train(std::move(params), train_samples, cfg.train).params;
}

}  // namespace

std::vector<int> baseline_gnb(std::span<const Debate> train_debates, std::span<const Debate> test_debates,
                              const EmbeddingTable& emb, const GnModelConfig& cfg) {
  std::vector<LearningSample> train_samples;
  for (const auto& d : train_debates)
    if (!d.adus.empty()) train_samples.push_back(build_graph_sample(d, emb));
  const auto params = train_gn(train_samples, emb.dimension(), kRelationKinds, cfg);
  std::vector<int> out;
  for (const auto& d : test_debates) {
    if (d.adus.empty()) {
      out.push_back(0);
      continue;
    }
    out.push_back(predicted_class(gn_forward(params, build_graph_sample(d, emb))));
  }
  return out;
}

// ---- synthetic corpus -----------------------------------------------------

SyntheticCorpus generate_synthetic_corpus(std::size_t n_debates, double signal_strength, std::uint64_t seed,
                                          const SyntheticOptions& opt) {
  if (n_debates < 2) throw ValidationError("synthetic corpus needs at least 2 debates");
  if (!(signal_strength >= 0.0 && signal_strength <= 1.0)) throw ValidationError("signal strength must be in [0, 1]");
  if (opt.min_adus < 2 || opt.max_adus < opt.min_adus) throw ValidationError("bad synthetic ADU range");
  const std::size_t dim = opt.dimension;

  // The per-side directions are fixed, independent of the corpus seed.
  std::array<std::vector<double>, 2> direction;
  {
    std::mt19937_64 dir_rng(0x5eedd1ec7ULL);
    for (auto& v : direction) {
      v.resize(dim);
      double norm = 0.0;
      for (auto& x : v) {
        x = standard_normal(dir_rng);
        norm += x * x;
      }
      norm = std::sqrt(norm);
      for (auto& x : v) x /= norm;
    }
  }

  std::mt19937_64 rng(seed);
  SyntheticCorpus corpus{{}, EmbeddingTable(dim)};
  const double noise_scale = opt.noise / std::sqrt(static_cast<double>(dim));

  for (std::size_t d = 0; d < n_debates; ++d) {
    Debate debate;
    debate.id = "syn" + std::to_string(d);
    debate.winner = (rng() >> 63) ? Stance::Against : Stance::Favour;
    const std::size_t n = opt.min_adus + uniform_index(rng, opt.max_adus - opt.min_adus + 1);

    // Lines of reasoning: each stance gets 2..5 groups, each ADU joins one.
    std::array<std::size_t, 2> n_groups{2 + uniform_index(rng, 4), 2 + uniform_index(rng, 4)};
    std::array<std::vector<std::vector<std::size_t>>, 2> groups;
    groups[0].resize(n_groups[0]);
    groups[1].resize(n_groups[1]);
    for (std::size_t i = 0; i < n; ++i) {
      // Seed every group with one ADU before random assignment.
      std::size_t side, g;
      if (i < n_groups[0] + n_groups[1] && i < n) {
        side = i < n_groups[0] ? 0 : 1;
        g = side == 0 ? i : i - n_groups[0];
      } else {
        side = static_cast<std::size_t>(rng() >> 63);
        g = uniform_index(rng, n_groups[side]);
      }
      Adu adu;
      adu.id = (side == 0 ? "F" : "A") + std::to_string(i);
      adu.stance = side == 0 ? Stance::Favour : Stance::Against;
      adu.debate_id = debate.id;
      adu.phase = i * 5 < n ? Phase::Introduction : (i * 5 >= 4 * n ? Phase::Conclusion : Phase::Argumentation);
      adu.text = "synthetic " + debate.id + " " + adu.id + " group " + std::to_string(g);
      groups[side][g].push_back(debate.adus.size());
      debate.adus.push_back(std::move(adu));
    }
    for (const auto& side_groups : groups) {
      for (const auto& members : side_groups) {
        for (std::size_t m = 1; m < members.size(); ++m) {
          std::size_t a = members[m], b = members[uniform_index(rng, m)];
          if (rng() >> 63) std::swap(a, b);
          const RelationKind kind = unit_uniform(rng) < 0.8 ? RelationKind::Inference : RelationKind::Rephrase;
          debate.relations.push_back(Relation{debate.adus[a].id, debate.adus[b].id, kind});
        }
      }
    }
    std::array<std::vector<std::size_t>, 2> by_side;
    for (std::size_t i = 0; i < debate.adus.size(); ++i)
      by_side[debate.adus[i].stance == Stance::Favour ? 0 : 1].push_back(i);
    if (!by_side[0].empty() && !by_side[1].empty()) {
      const std::size_t total_groups = n_groups[0] + n_groups[1];
      const std::size_t n_conflicts = total_groups / 2 + uniform_index(rng, total_groups + 1);
      for (std::size_t c = 0; c < n_conflicts; ++c) {
        std::size_t a = by_side[0][uniform_index(rng, by_side[0].size())];
        std::size_t b = by_side[1][uniform_index(rng, by_side[1].size())];
        if (rng() >> 63) std::swap(a, b);
        debate.relations.push_back(Relation{debate.adus[a].id, debate.adus[b].id, RelationKind::Conflict});
      }
    }

    const std::size_t winner_side = debate.winner == Stance::Favour ? 0 : 1;
    for (const Adu& a : debate.adus) {
      std::vector<double> v(dim);
      for (auto& x : v) x = noise_scale * standard_normal(rng);
      const std::size_t side = a.stance == Stance::Favour ? 0 : 1;
      if (side == winner_side)
        for (std::size_t k = 0; k < dim; ++k) v[k] += signal_strength * direction[side][k];
      corpus.embeddings.add(EmbeddingTable::key(debate.id, a.id), std::move(v));
    }
    validate_debate(debate);
    corpus.debates.push_back(std::move(debate));
  }
  return corpus;
}

// ---- experiment -----------------------------------------------------------

namespace {

constexpr std::array<std::pair<ModelKind, const char*>, 7> kModelNames{{
    {ModelKind::Random, "rb"},
    {ModelKind::NaiveAtb, "naive-atb"},
    {ModelKind::PreferredAtb, "preferred-atb"},
    {ModelKind::Longformer, "longformer"},
    {ModelKind::Gnb, "gnb"},
    {ModelKind::NaiveGn, "naive-gn"},
    {ModelKind::PreferredGn, "preferred-gn"},
}};

const char* display_name(ModelKind m) {
  switch (m) {
    case ModelKind::Random: return "RB";
    case ModelKind::NaiveAtb: return "Naive-ATB";
    case ModelKind::PreferredAtb: return "Preferred-ATB";
    case ModelKind::Longformer: return "Longformer";
    case ModelKind::Gnb: return "GNB";
    case ModelKind::NaiveGn: return "Naive-GN";
    case ModelKind::PreferredGn: return "Preferred-GN";
  }
  return "?";
}

std::optional<Semantics> semantics_of(ModelKind m) {
  switch (m) {
    case ModelKind::NaiveAtb:
    case ModelKind::NaiveGn: return Semantics::Naive;
    case ModelKind::PreferredAtb:
    case ModelKind::PreferredGn: return Semantics::Preferred;
    default: return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(ModelKind m) {
  for (const auto& [k, name] : kModelNames)
    if (k == m) return name;
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : kModelNames)
    if (name == n) return k;
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected rb, naive-atb, preferred-atb, longformer, gnb, naive-gn, preferred-gn)");
}

void ExperimentConfig::validate() const {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ValidationError("split_ratio must lie in (0, 1)");
  if (runs < 1) throw ValidationError("runs must be at least 1");
  if (!synthetic_debates && corpus.empty()) throw ValidationError("either corpus or synthetic.debates is required");
  if (synthetic_debates && *synthetic_debates < 2) throw ValidationError("synthetic.debates must be at least 2");
  if (gn.hidden < 1 || gn.edge_dim < 1) throw ValidationError("model.hidden and model.edge_dim must be positive");
  validate_train_config(gn.train);
}

TrainConfig train_config_from_kv(const KvConfig& kv) {
  TrainConfig t;
  t.learning_rate = kv.get_double("learning_rate", t.learning_rate);
  t.epochs = static_cast<std::size_t>(kv.get_uint("epochs", t.epochs));
  t.batch_size = static_cast<std::size_t>(kv.get_uint("batch_size", t.batch_size));
  t.seed = kv.get_uint("seed", t.seed);
  validate_train_config(t);
  return t;
}

ExperimentConfig experiment_config_from_kv(const KvConfig& kv) {
  kv.reject_unknown({"corpus", "embeddings", "hash_dim", "hash_seed", "split_ratio", "runs", "seed", "fixed_split",
                     "models", "workers", "synthetic.debates", "synthetic.signal", "synthetic.seed",
                     "synthetic.dim", "train.learning_rate", "train.epochs", "train.batch_size", "train.seed",
                     "model.hidden", "model.edge_dim", "model.init_seed", "limits.max_extensions",
                     "limits.time_budget_ms"});
  ExperimentConfig c;
  c.corpus = kv.get_string("corpus", "");
  if (kv.contains("synthetic.debates"))
    c.synthetic_debates = static_cast<std::size_t>(kv.get_uint("synthetic.debates", 0));
  c.synthetic_signal = kv.get_double("synthetic.signal", c.synthetic_signal);
  c.synthetic_seed = kv.get_uint("synthetic.seed", c.synthetic_seed);
  c.synthetic_dim = static_cast<std::size_t>(kv.get_uint("synthetic.dim", c.synthetic_dim));
  c.embeddings = kv.get_string("embeddings", c.embeddings);
  c.hash_dim = static_cast<std::size_t>(kv.get_uint("hash_dim", c.hash_dim));
  c.hash_seed = kv.get_uint("hash_seed", c.hash_seed);
  c.split_ratio = kv.get_double("split_ratio", c.split_ratio);
  c.runs = static_cast<std::size_t>(kv.get_uint("runs", c.runs));
  c.seed = kv.get_uint("seed", c.seed);
  c.fixed_split = kv.get_bool("fixed_split", c.fixed_split);
  c.workers = static_cast<std::size_t>(kv.get_uint("workers", c.workers));
  if (kv.contains("models")) {
    c.models.clear();
    for (const auto& m : kv.get_list("models", {})) c.models.push_back(parse_model_kind(m));
  }
  c.gn.train.learning_rate = kv.get_double("train.learning_rate", c.gn.train.learning_rate);
  c.gn.train.epochs = static_cast<std::size_t>(kv.get_uint("train.epochs", c.gn.train.epochs));
  c.gn.train.batch_size = static_cast<std::size_t>(kv.get_uint("train.batch_size", c.gn.train.batch_size));
  c.gn.train.seed = kv.get_uint("train.seed", c.gn.train.seed);
  c.gn.hidden = static_cast<std::size_t>(kv.get_uint("model.hidden", c.gn.hidden));
  c.gn.edge_dim = static_cast<std::size_t>(kv.get_uint("model.edge_dim", c.gn.edge_dim));
  c.gn.init_seed = kv.get_uint("model.init_seed", c.gn.init_seed);
  c.limits.max_extensions = static_cast<std::size_t>(kv.get_uint("limits.max_extensions", c.limits.max_extensions));
  c.limits.time_budget = std::chrono::milliseconds(
      kv.get_uint("limits.time_budget_ms", static_cast<std::uint64_t>(c.limits.time_budget.count())));
  c.validate();
  return c;
}

SolvedCorpus solve_corpus(std::span<const Debate> debates, Semantics semantics, const EnumerationLimits& limits,
                          std::size_t workers) {
  const std::size_t n = debates.size();
  SolvedCorpus out;
  out.afs.resize(n);
  out.extensions.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out.afs[i] = encode_af(debates[i]);
        out.extensions[i] = extensions(out.afs[i], semantics, limits);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ResourceLimitError& e) {
      throw ResourceLimitError("debate '" + debates[i].id + "': " + e.what());
    }
  }
  return out;
}

SemanticsStats semantics_stats(std::span<const Debate> debates, const SolvedCorpus& solved) {
  SemanticsStats s;
  for (std::size_t i = 0; i < debates.size(); ++i) {
    for (const auto& e : solved.extensions[i]) {
      ++s.extensions;
      if (e.arguments.empty()) {
        ++s.dropped_empty;
        continue;
      }
      ++s.samples;
      (debates[i].winner == Stance::Favour ? s.class0 : s.class1) += 1;
    }
  }
  return s;
}

namespace {

Metrics mean_of(const std::vector<Metrics>& ms) {
  Metrics m;
  for (const auto& x : ms) {
    m.precision += x.precision;
    m.recall += x.recall;
    m.weighted_f1 += x.weighted_f1;
  }
  const double n = static_cast<double>(ms.size());
  m.precision /= n;
  m.recall /= n;
  m.weighted_f1 /= n;
  return m;
}

void finalize(ModelReport& r) {
  if (r.runs.empty()) return;
  std::vector<Metrics> ms, sms;
  for (const auto& run : r.runs) {
    ms.push_back(run.debate_metrics);
    if (run.sample_metrics) sms.push_back(*run.sample_metrics);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) r.confusion[a][b] += run.confusion[a][b];
  }
  r.mean = mean_of(ms);
  if (sms.size() == r.runs.size()) r.mean_sample_metrics = mean_of(sms);
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& cfg, std::span<const Debate> debates, const EmbeddingTable& emb) {
  cfg.validate();
  EvalReport report;
  report.corpus = corpus_stats({debates.begin(), debates.end()});

  std::vector<int> golds_all;
  for (const auto& d : debates) golds_all.push_back(class_of(d.winner));

  FeatureConfig features;
  features.edge_dim = cfg.gn.edge_dim;

  // Phase I is independent of the run, so solve each needed semantics once.
  std::optional<SolvedCorpus> solved[2];
  std::vector<std::vector<LearningSample>> samples[2];
  auto need = [&](Semantics s) -> std::size_t {
    const std::size_t k = s == Semantics::Naive ? 0 : 1;
    if (!solved[k]) {
      solved[k] = solve_corpus(debates, s, cfg.limits, cfg.workers);
      (k == 0 ? report.naive : report.preferred) = semantics_stats(debates, *solved[k]);
    }
    return k;
  };
  auto need_samples = [&](Semantics s) -> std::size_t {
    const std::size_t k = need(s);
    if (samples[k].empty()) {
      samples[k].resize(debates.size());
      for (std::size_t i = 0; i < debates.size(); ++i)
        for (const auto& ext : solved[k]->extensions[i]) {
          BipartiteGraph g = build_bipartite(ext, solved[k]->afs[i]);
          if (!g.nodes.empty()) samples[k][i].push_back(init_features(g, debates[i], emb, features));
        }
    }
    return k;
  };

  for (ModelKind model : cfg.models) {
    ModelReport mr;
    mr.model = model;
    if (model == ModelKind::Longformer) {
      mr.implemented = false;
      report.models.push_back(std::move(mr));
      continue;
    }
    for (std::size_t run = 0; run < cfg.runs; ++run) {
      RunResult rr;
      rr.seed = cfg.seed + run;
      const DebateSplit split = split_debates(debates.size(), cfg.split_ratio, cfg.fixed_split ? cfg.seed : rr.seed);
      for (std::size_t i : split.test) {
        rr.test_debates.push_back(debates[i].id);
        rr.golds.push_back(golds_all[i]);
      }
      GnModelConfig gn = cfg.gn;
      gn.init_seed = cfg.gn.init_seed + run;
      gn.train.seed = cfg.gn.train.seed + run;

      switch (model) {
        case ModelKind::Random:
          rr.predictions = baseline_random(split.test.size(), rr.seed);
          break;
        case ModelKind::NaiveAtb:
        case ModelKind::PreferredAtb: {
          const std::size_t k = need(*semantics_of(model));
          for (std::size_t i : split.test) rr.predictions.push_back(atb_predict(solved[k]->afs[i], solved[k]->extensions[i]));
          break;
        }
        case ModelKind::Gnb: {
          std::vector<Debate> train_d, test_d;
          for (std::size_t i : split.train) train_d.push_back(debates[i]);
          for (std::size_t i : split.test) test_d.push_back(debates[i]);
          rr.train_samples = train_d.size();
          rr.test_samples = test_d.size();
          rr.predictions = baseline_gnb(train_d, test_d, emb, gn);
          break;
        }
        case ModelKind::NaiveGn:
        case ModelKind::PreferredGn: {
          const std::size_t k = need_samples(*semantics_of(model));
          std::vector<LearningSample> train_samples;
          for (std::size_t i : split.train)
            train_samples.insert(train_samples.end(), samples[k][i].begin(), samples[k][i].end());
          // Structural guard: training data only ever comes from train debates.
          for (const auto& s : train_samples)
            for (std::size_t i : split.test)
              if (s.debate_id == debates[i].id) throw std::logic_error("test debate sample leaked into training");
          rr.train_samples = train_samples.size();
          const auto params = train_gn(train_samples, emb.dimension(), cfg.gn.edge_dim, gn);
          std::vector<int> sample_pred, sample_gold;
          for (std::size_t i : split.test) {
            const auto& ds = samples[k][i];
            rr.test_samples += ds.size();
            if (ds.empty()) {
              rr.predictions.push_back(0);
              ++rr.fallback_predictions;
              continue;
            }
            std::vector<ClassProbs> probs;
            for (const auto& s : ds) {
              probs.push_back(gn_forward(params, s));
              sample_pred.push_back(predicted_class(probs.back()));
              sample_gold.push_back(s.label);
            }
            rr.predictions.push_back(aggregate_predictions(probs).cls);
          }
          if (!sample_gold.empty()) rr.sample_metrics = metrics(sample_pred, sample_gold);
          break;
        }
        case ModelKind::Longformer:
          break;
      }
      rr.debate_metrics = metrics(rr.predictions, rr.golds);
      rr.confusion = confusion(rr.predictions, rr.golds);
      mr.runs.push_back(std::move(rr));
    }
    finalize(mr);
    report.models.push_back(std::move(mr));
  }
  return report;
}

EvalReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.synthetic_debates) {
    SyntheticOptions opt;
    opt.dimension = cfg.synthetic_dim;
    auto corpus = generate_synthetic_corpus(*cfg.synthetic_debates, cfg.synthetic_signal, cfg.synthetic_seed, opt);
    return run_experiment(cfg, corpus.debates, corpus.embeddings);
  }
  const auto debates = load_corpus(cfg.corpus);
  if (cfg.embeddings == "hash") return run_experiment(cfg, debates, hash_embed_corpus(debates, cfg.hash_dim, cfg.hash_seed));
  const auto emb = load_embeddings(cfg.embeddings);
  for (const auto& d : debates)
    for (const auto& a : d.adus)
      if (!emb.contains(d.id, a.id)) throw ValidationError("no embedding for ADU '" + EmbeddingTable::key(d.id, a.id) + "'");
  return run_experiment(cfg, debates, emb);
}

// ---- reporting ------------------------------------------------------------

namespace {

nlohmann::json metrics_json(const Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"weighted_f1", m.weighted_f1}};
}

nlohmann::json confusion_json(const Confusion& c) {
  return nlohmann::json::array({{c[0][0], c[0][1]}, {c[1][0], c[1][1]}});
}

nlohmann::json stats_json(const SemanticsStats& s) {
  return {{"extensions", s.extensions}, {"samples", s.samples}, {"class0", s.class0}, {"class1", s.class1},
          {"dropped_empty", s.dropped_empty}};
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["corpus"] = {{"debates", corpus.debates},
                   {"adus", corpus.adus},
                   {"words", corpus.words},
                   {"favour_wins", corpus.favour_wins},
                   {"against_wins", corpus.against_wins}};
  doc["extensions"] = nlohmann::json::object();
  if (naive) doc["extensions"]["naive"] = stats_json(*naive);
  if (preferred) doc["extensions"]["preferred"] = stats_json(*preferred);
  doc["models"] = nlohmann::json::array();
  for (const auto& m : models) {
    nlohmann::json jm;
    jm["name"] = std::string(to_string(m.model));
    jm["implemented"] = m.implemented;
    if (m.implemented) {
      jm["mean"] = metrics_json(m.mean);
      if (m.mean_sample_metrics) jm["mean_sample_level"] = metrics_json(*m.mean_sample_metrics);
      jm["confusion"] = confusion_json(m.confusion);
      jm["runs"] = nlohmann::json::array();
      for (const auto& r : m.runs) {
        nlohmann::json jr;
        jr["seed"] = r.seed;
        jr["test_debates"] = r.test_debates;
        jr["predictions"] = r.predictions;
        jr["golds"] = r.golds;
        jr["metrics"] = metrics_json(r.debate_metrics);
        if (r.sample_metrics) jr["sample_level"] = metrics_json(*r.sample_metrics);
        jr["confusion"] = confusion_json(r.confusion);
        jr["train_samples"] = r.train_samples;
        jr["test_samples"] = r.test_samples;
        jr["fallback_predictions"] = r.fallback_predictions;
        jm["runs"].push_back(std::move(jr));
      }
    }
    doc["models"].push_back(std::move(jm));
  }
  return doc.dump(2) + "\n";
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "corpus: " << corpus.debates << " debates, " << corpus.adus << " ADUs, " << corpus.words << " words, winners "
     << corpus.favour_wins << " F / " << corpus.against_wins << " A\n";
  auto stats_line = [&](const char* name, const SemanticsStats& s) {
    os << name << ": " << s.extensions << " extensions, " << s.samples << " samples (class 0: " << s.class0
       << ", class 1: " << s.class1 << ")\n";
  };
  if (naive) stats_line("naive", *naive);
  if (preferred) stats_line("preferred", *preferred);
  os << "\n" << std::left << std::setw(16) << "Model" << std::right << std::setw(11) << "Precision" << std::setw(9)
     << "Recall" << std::setw(13) << "Weighted-F1" << "\n";
  os << std::fixed << std::setprecision(2);
  for (const auto& m : models) {
    os << std::left << std::setw(16) << display_name(m.model) << std::right;
    if (!m.implemented) {
      os << "  not implemented\n";
      continue;
    }
    os << std::setw(11) << m.mean.precision << std::setw(9) << m.mean.recall << std::setw(13) << m.mean.weighted_f1
       << "\n";
  }
  os << "\nAggregated confusion matrices (rows gold F/A, columns predicted F/A):\n";
  for (const auto& m : models) {
    if (!m.implemented) continue;
    os << "  " << std::left << std::setw(14) << display_name(m.model) << std::right << "[[" << m.confusion[0][0] << ", "
       << m.confusion[0][1] << "], [" << m.confusion[1][0] << ", " << m.confusion[1][1] << "]]\n";
  }
  return os.str();
}

}  // namespace arbiter
