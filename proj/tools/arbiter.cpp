#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arbiter/af.hpp"
#include "arbiter/af_encoder.hpp"
#include "arbiter/argument_model.hpp"
#include "arbiter/error.hpp"
#include "arbiter/graph_network.hpp"
#include "arbiter/kv_config.hpp"
#include "arbiter/pipeline.hpp"
#include "arbiter/sample_builder.hpp"
#include "arbiter/semantics.hpp"
#include "arbiter/sheet_converter.hpp"

namespace fs = std::filesystem;
using namespace arbiter;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
}

bool is_apx(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".apx";
}

std::vector<fs::path> expand(const std::vector<std::string>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.emplace_back(p);
    }
  }
  return out;
}

EmbeddingTable embeddings_for(const std::vector<Debate>& debates, const std::string& source, std::size_t hash_dim,
                              std::uint64_t hash_seed) {
  if (source == "hash") return hash_embed_corpus(debates, hash_dim, hash_seed);
  return load_embeddings(source);
}

int cmd_validate(const std::vector<std::string>& paths) {
  int bad = 0;
  for (const auto& p : expand(paths)) {
    try {
      const Debate d = load_debate(p);
      std::cout << "ok " << p.string() << " (" << d.adus.size() << " ADUs, " << d.relations.size()
                << " relations)\n";
    } catch (const ParseError& e) {
      std::cout << "invalid " << e.what() << "\n";
      ++bad;
    } catch (const ValidationError& e) {
      std::cout << "invalid " << e.what() << "\n";
      ++bad;
    }
  }
  return bad ? kExitValidation : 0;
}

int cmd_stats(const std::string& dir, bool json) {
  const auto report = corpus_stats(load_corpus(dir));
  if (json) {
    nlohmann::json j{{"debates", report.debates},         {"adus", report.adus},
                     {"words", report.words},             {"relations", report.relations},
                     {"favour_wins", report.favour_wins}, {"against_wins", report.against_wins}};
    for (const auto& [kind, n] : report.relations_by_kind) j["relations_by_kind"][std::string(to_code(kind))] = n;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << report.to_text();
  }
  return 0;
}

int cmd_encode(const std::string& path, const std::string& apx_out, bool summary) {
  const auto af = encode_af(load_debate(path));
  const std::string apx = export_apx(af);
  if (!apx_out.empty())
    write_text(apx_out, apx);
  else if (!summary)
    std::cout << apx;
  if (summary) std::cout << af_summary(af).to_text() << "\n";
  return 0;
}

int cmd_solve(const std::string& path, const std::string& semantics, bool oracle, const EnumerationLimits& limits) {
  const Semantics sem = parse_semantics(semantics);
  const auto af = is_apx(path) ? parse_apx(read_text(path)) : encode_af(load_debate(path));
  auto exts = oracle ? brute_force_extensions(af, sem) : extensions(af, sem, limits);
  sort_extensions(exts);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : exts) {
    nlohmann::json members = nlohmann::json::array();
    for (ArgId a : e.arguments) members.push_back(af.arguments()[a].name);
    out.push_back(members);
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_hash_embed(const std::string& dir, std::size_t dim, std::uint64_t seed, const std::string& out) {
  save_embeddings(hash_embed_corpus(load_corpus(dir), dim, seed), out);
  return 0;
}

int cmd_build_samples(const std::string& dir, const std::string& semantics, const std::string& emb_source,
                      std::size_t hash_dim, std::uint64_t hash_seed, std::size_t edge_dim, const std::string& out,
                      const EnumerationLimits& limits) {
  const Semantics sem = parse_semantics(semantics);
  const auto debates = load_corpus(dir);
  const auto emb = embeddings_for(debates, emb_source, hash_dim, hash_seed);
  const auto solved = solve_corpus(debates, sem, limits);
  FeatureConfig features;
  features.edge_dim = edge_dim;
  std::vector<LearningSample> all;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < debates.size(); ++i) {
    auto set = build_samples(debates[i], solved.afs[i], solved.extensions[i], emb, features);
    dropped += set.dropped_empty;
    std::move(set.samples.begin(), set.samples.end(), std::back_inserter(all));
  }
  save_samples(all, out);
  std::size_t c0 = 0;
  for (const auto& s : all) c0 += s.label == 0;
  std::cout << all.size() << " samples (class 0: " << c0 << ", class 1: " << all.size() - c0 << ", dropped empty: "
            << dropped << ") from " << debates.size() << " debates\n";
  return 0;
}

int cmd_train(const std::string& samples_path, const std::string& config_path, const std::string& out) {
  const auto samples = load_samples(samples_path);
  if (samples.empty()) throw ValidationError("no samples in '" + samples_path + "'");
  KvConfig kv;
  if (!config_path.empty()) kv = KvConfig::load(config_path);
  kv.reject_unknown({"learning_rate", "epochs", "batch_size", "seed", "hidden", "init_seed"});
  const TrainConfig cfg = train_config_from_kv(kv);
  GnDims dims;
  dims.node_dim = samples.front().node_dim();
  dims.edge_dim = std::max<std::size_t>(1, samples.front().edge_dim());
  dims.global_dim = samples.front().global.size();
  dims.hidden = kv.get_uint("hidden", dims.hidden);
  for (const auto& s : samples) {
    validate_sample(s);
    if (s.node_dim() != dims.node_dim || (!s.edges.empty() && s.edge_dim() != dims.edge_dim))
      throw DimensionError("samples disagree on feature dimensions");
  }
  const auto init = GNParameters::initialize(dims, kv.get_uint("init_seed", 0));
  const auto result = train(init, samples, cfg);
  save_checkpoint(result.params, out);
  std::cout << "trained " << cfg.epochs << " epochs on " << samples.size() << " samples, final loss "
            << result.loss_history.back() << ", training accuracy " << training_accuracy(result.params, samples)
            << "\n";
  return 0;
}

int cmd_predict(const std::string& model, const std::string& samples_path) {
  const auto params = load_checkpoint(model);
  const auto samples = load_samples(samples_path);
  std::map<std::string, std::vector<LearningSample>> by_debate;
  for (const auto& s : samples) by_debate[s.debate_id].push_back(s);
  std::vector<int> preds, golds;
  for (const auto& [id, group] : by_debate) {
    const auto p = predict_debate(params, group);
    preds.push_back(p.cls);
    golds.push_back(group.front().label);
    std::cout << id << "\t" << to_code(stance_of_class(p.cls)) << "\t" << p.confidence << "\n";
  }
  if (!preds.empty()) {
    const auto m = metrics(preds, golds);
    std::cout << "debates " << preds.size() << " precision " << m.precision << " recall " << m.recall
              << " weighted-F1 " << m.weighted_f1 << "\n";
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& json_out) {
  const auto cfg = experiment_config_from_kv(KvConfig::load(config_path));
  const auto report = run_experiment(cfg);
  std::cout << report.to_text();
  if (!json_out.empty()) write_text(json_out, report.to_json() + "\n");
  return 0;
}

int cmd_convert(const std::string& sheet, const std::string& id, const std::string& winner, const std::string& out) {
  ConversionReport report;
  const std::string debate_id = id.empty() ? fs::path(sheet).stem().string() : id;
  const Debate d = convert_debate_sheet(read_text(sheet), debate_id, parse_stance(winner), report);
  for (const auto& s : report.cross_stance_links) std::cerr << "cross-stance link kept: " << s << "\n";
  for (const auto& s : report.dropped) std::cerr << "dropped: " << s << "\n";
  if (out.empty())
    std::cout << debate_to_json(d) << "\n";
  else
    save_debate(d, out);
  return 0;
}

int cmd_synth(std::size_t n, double signal, std::uint64_t seed, std::size_t dim, const std::string& out_dir) {
  SyntheticOptions opt;
  opt.dimension = dim;
  const auto corpus = generate_synthetic_corpus(n, signal, seed, opt);
  fs::create_directories(fs::path(out_dir) / "debates");
  for (const auto& d : corpus.debates) save_debate(d, fs::path(out_dir) / "debates" / (d.id + ".json"));
  save_embeddings(corpus.embeddings, fs::path(out_dir) / "embeddings.txt");
  std::cout << corpus.debates.size() << " debates written to " << out_dir << "\n";
  return 0;
}

void add_limits(CLI::App* cmd, EnumerationLimits& limits, std::int64_t& budget_ms) {
  cmd->add_option("--max-extensions", limits.max_extensions, "Extension cap per framework")->capture_default_str();
  cmd->add_option("--time-budget-ms", budget_ms, "Enumeration time budget per framework")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debate evaluation with argumentation semantics and graph networks"};
  app.require_subcommand(1);

  std::vector<std::string> paths;
  auto* validate = app.add_subcommand("validate", "Check debate JSON files or directories");
  validate->add_option("paths", paths, "Files or directories")->required();

  std::string dir;
  bool json = false;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("dir", dir, "Corpus directory")->required();
  stats->add_flag("--json", json, "Print JSON");

  std::string input, apx_out;
  bool summary = false;
  auto* encode = app.add_subcommand("encode", "Build the argumentation framework of a debate");
  encode->add_option("debate", input, "Debate JSON")->required();
  encode->add_option("--apx", apx_out, "Write APX here instead of stdout");
  encode->add_flag("--summary", summary, "Print a one-line summary");

  std::string semantics;
  bool oracle = false;
  EnumerationLimits limits;
  std::int64_t budget_ms = limits.time_budget.count();
  auto* solve = app.add_subcommand("solve", "Enumerate extensions of a debate or APX file");
  solve->add_option("input", input, "Debate JSON or .apx")->required();
  solve->add_option("--semantics", semantics, "naive or preferred")->required();
  solve->add_flag("--oracle", oracle, "Use the brute-force enumerator (small AFs only)");
  add_limits(solve, limits, budget_ms);

  std::size_t dim = 768;
  std::uint64_t seed = 0;
  std::string out;
  auto* hash = app.add_subcommand("hash-embed", "Write deterministic hash embeddings for a corpus");
  hash->add_option("dir", dir, "Corpus directory")->required();
  hash->add_option("--dim", dim, "Dimension")->capture_default_str();
  hash->add_option("--seed", seed, "Hash seed")->capture_default_str();
  hash->add_option("--out", out, "Output file")->required();

  std::string embeddings = "hash";
  std::size_t edge_dim = 8;
  auto* build = app.add_subcommand("build-samples", "Build learning samples from extensions");
  build->add_option("dir", dir, "Corpus directory")->required();
  build->add_option("--semantics", semantics, "naive or preferred")->required();
  build->add_option("--embeddings", embeddings, "Embedding file, or 'hash'")->capture_default_str();
  build->add_option("--hash-dim", dim, "Dimension for hash embeddings")->capture_default_str();
  build->add_option("--hash-seed", seed, "Seed for hash embeddings")->capture_default_str();
  build->add_option("--edge-dim", edge_dim, "Constant edge feature width")->capture_default_str();
  build->add_option("--out", out, "Output samples JSON")->required();
  add_limits(build, limits, budget_ms);

  std::string samples_path, config_path, model;
  auto* train_cmd = app.add_subcommand("train", "Train a graph network on samples");
  train_cmd->add_option("--samples", samples_path, "Samples JSON")->required();
  train_cmd->add_option("--config", config_path, "Training config (key = value)");
  train_cmd->add_option("--out", out, "Checkpoint output")->required();

  auto* predict = app.add_subcommand("predict", "Predict debate winners from samples");
  predict->add_option("--model", model, "Checkpoint")->required();
  predict->add_option("--samples", samples_path, "Samples JSON")->required();

  std::string json_out;
  auto* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("--config", config_path, "Experiment config (key = value)")->required();
  run->add_option("--json", json_out, "Also write the JSON report here");

  std::string id, winner;
  auto* convert = app.add_subcommand("convert", "Convert a debate sheet (CSV/TSV) to debate JSON");
  convert->add_option("sheet", input, "Sheet file")->required();
  convert->add_option("--id", id, "Debate id (default: file stem)");
  convert->add_option("--winner", winner, "F or A")->required();
  convert->add_option("--out", out, "Output JSON (default stdout)");

  std::size_t n_debates = 0;
  double signal = 1.0;
  dim = 768;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic planted-signal corpus");
  synth->add_option("--debates", n_debates, "Number of debates")->required();
  synth->add_option("--signal", signal, "Signal strength in [0, 1]")->capture_default_str();
  synth->add_option("--seed", seed, "Seed")->capture_default_str();
  std::size_t synth_dim = 32;
  synth->add_option("--dim", synth_dim, "Embedding dimension")->capture_default_str();
  synth->add_option("--out-dir", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  limits.time_budget = std::chrono::milliseconds(budget_ms);

  try {
    if (*validate) return cmd_validate(paths);
    if (*stats) return cmd_stats(dir, json);
    if (*encode) return cmd_encode(input, apx_out, summary);
    if (*solve) return cmd_solve(input, semantics, oracle, limits);
    if (*hash) return cmd_hash_embed(dir, dim, seed, out);
    if (*build) return cmd_build_samples(dir, semantics, embeddings, dim, seed, edge_dim, out, limits);
    if (*train_cmd) return cmd_train(samples_path, config_path, out);
    if (*predict) return cmd_predict(model, samples_path);
    if (*run) return cmd_run(config_path, json_out);
    if (*convert) return cmd_convert(input, id, winner, out);
    if (*synth) return cmd_synth(n_debates, signal, seed, synth_dim, out);
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const EncodingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
