#include "arbiter/sample_builder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "arbiter/error.hpp"

namespace arbiter {

using nlohmann::json;

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw DimensionError("embedding dimension must be positive");
}

std::string EmbeddingTable::key(std::string_view debate_id, std::string_view adu_id) {
  std::string k;
  k.reserve(debate_id.size() + adu_id.size() + 1);
  k.append(debate_id).push_back('/');
  k.append(adu_id);
  return k;
}

void EmbeddingTable::add(std::string key, std::vector<double> vector) {
  if (vector.size() != dimension_)
    throw DimensionError("embedding '" + key + "' has " + std::to_string(vector.size()) +
                         " values, expected " + std::to_string(dimension_));
  for (double v : vector)
    if (!std::isfinite(v)) throw ValidationError("embedding '" + key + "' contains a non-finite value");
  auto [it, inserted] = vectors_.emplace(std::move(key), std::move(vector));
  if (!inserted) throw ValidationError("duplicate embedding key '" + it->first + "'");
}

bool EmbeddingTable::contains(std::string_view debate_id, std::string_view adu_id) const {
  return vectors_.contains(key(debate_id, adu_id));
}

const std::vector<double>& EmbeddingTable::at(std::string_view debate_id, std::string_view adu_id) const {
  auto it = vectors_.find(key(debate_id, adu_id));
  if (it == vectors_.end()) throw ValidationError("no embedding for ADU '" + key(debate_id, adu_id) + "'");
  return it->second;
}

std::vector<std::string> EmbeddingTable::keys() const {
  std::vector<std::string> out;
  out.reserve(vectors_.size());
  for (const auto& [k, v] : vectors_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

EmbeddingTable parse_embeddings(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || line.substr(0, 4) != "DIM ") throw ParseError("embeddings: first line must be 'DIM <d>'");
  std::size_t dim = 0;
  {
    std::string_view num = line.substr(4);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), dim);
    if (ec != std::errc() || p != num.data() + num.size() || dim == 0)
      throw ParseError("embeddings: bad dimension '" + std::string(num) + "'");
  }

  EmbeddingTable table(dim);
  while (next_line(line)) {
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0)
      throw ParseError("embeddings line " + std::to_string(line_no) + ": expected '<key>\\t<values>'");
    std::string key(line.substr(0, tab));
    std::vector<double> values;
    values.reserve(dim);
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      if (p >= end) break;
      double v = 0.0;
      auto [q, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || (q < end && *q != ' '))
        throw ParseError("embeddings line " + std::to_string(line_no) + ": bad number");
      values.push_back(v);
      p = q;
    }
    try {
      table.add(std::move(key), std::move(values));
    } catch (const DimensionError& e) {
      throw DimensionError("embeddings line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("embeddings line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_embeddings(buf.str());
}

std::string format_embeddings(const EmbeddingTable& table) {
  std::string out = "DIM " + std::to_string(table.dimension()) + "\n";
  char num[40];
  for (const auto& k : table.keys()) {
    const auto slash = k.find('/');
    const auto& vec = table.at(k.substr(0, slash), k.substr(slash + 1));
    out += k;
    out += '\t';
    for (std::size_t i = 0; i < vec.size(); ++i) {
      std::snprintf(num, sizeof num, "%.9g", vec[i]);
      if (i) out += ' ';
      out += num;
    }
    out += '\n';
  }
  return out;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_embeddings(table);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<double> hash_embed(std::string_view text, std::size_t dimension, std::uint64_t seed) {
  // FNV-1a over the little-endian seed bytes followed by the text bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>((seed >> (8 * i)) & 0xff));
  for (unsigned char c : text) mix(c);

  std::uint64_t state = h;
  std::vector<double> v(dimension);
  double norm_sq = 0.0;
  for (auto& x : v) {
    // 53 random bits -> [-1, 1), exact in binary64.
    x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
    norm_sq += x * x;
  }
  if (norm_sq == 0.0) {
    v[0] = 1.0;
    return v;
  }
  const double norm = std::sqrt(norm_sq);
  for (auto& x : v) x /= norm;
  return v;
}

EmbeddingTable hash_embed_corpus(const std::vector<Debate>& debates, std::size_t dimension, std::uint64_t seed) {
  EmbeddingTable table(dimension);
  for (const Debate& d : debates)
    for (const Adu& a : d.adus) table.add(EmbeddingTable::key(d.id, a.id), hash_embed(a.text, dimension, seed));
  return table;
}

BipartiteGraph build_bipartite(const Extension& ext, const ArgumentationFramework& af) {
  BipartiteGraph g;
  g.debate_id = ext.debate_id;
  g.semantics = ext.semantics;
  std::vector<ArgId> members = ext.arguments;
  std::sort(members.begin(), members.end());
  for (ArgId a : members) {
    if (a >= af.size()) throw ValidationError("extension names unknown argument " + std::to_string(a));
    const auto& arg = af.arguments()[a];
    g.nodes.push_back(BipartiteNode{a, arg.stance, arg.adu_ids});
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
      if (g.nodes[i].stance != g.nodes[j].stance) g.edges.emplace_back(i, j);
  return g;
}

LearningSample init_features(const BipartiteGraph& graph, const Debate& debate, const EmbeddingTable& emb,
                             const FeatureConfig& config) {
  LearningSample s;
  s.debate_id = debate.id;
  s.semantics = std::string(to_string(graph.semantics));
  s.label = class_of(debate.winner);
  s.global.assign(config.global_dim, 0.0);

  const std::size_t dim = emb.dimension();
  for (const BipartiteNode& node : graph.nodes) {
    if (node.adu_ids.empty())
      throw ValidationError("argument " + std::to_string(node.argument) + " has no member ADUs");
    std::vector<double> mean(dim, 0.0);
    for (const auto& adu_id : node.adu_ids) {
      const auto& v = emb.at(debate.id, adu_id);
      for (std::size_t k = 0; k < dim; ++k) mean[k] += v[k];
    }
    const double count = static_cast<double>(node.adu_ids.size());
    for (double& x : mean) x /= count;
    s.nodes.push_back(SampleNode{node.argument, node.stance, std::move(mean)});
  }
  const std::vector<double> edge_feature(config.edge_dim, config.edge_value);
  for (const auto& [sender, receiver] : graph.edges) s.edges.push_back(SampleEdge{sender, receiver, edge_feature});
  return s;
}

SampleSet build_samples(const Debate& debate, const ArgumentationFramework& af, const std::vector<Extension>& exts,
                        const EmbeddingTable& emb, const FeatureConfig& config) {
  SampleSet out;
  for (const Extension& ext : exts) {
    BipartiteGraph g = build_bipartite(ext, af);
    if (g.nodes.empty()) {
      ++out.dropped_empty;
      std::cerr << "warning: debate '" << debate.id << "': empty " << to_string(ext.semantics)
                << " extension dropped\n";
      continue;
    }
    g.debate_id = debate.id;
    out.samples.push_back(init_features(g, debate, emb, config));
  }
  return out;
}

void validate_sample(const LearningSample& s) {
  const std::string where = "sample of debate '" + s.debate_id + "'";
  if (s.label != 0 && s.label != 1) throw ValidationError(where + ": label must be 0 or 1");
  const std::size_t nd = s.node_dim(), ed = s.edge_dim();
  for (const auto& n : s.nodes)
    if (n.features.size() != nd) throw ValidationError(where + ": node feature dimensions differ");
  for (const auto& e : s.edges) {
    if (e.features.size() != ed) throw ValidationError(where + ": edge feature dimensions differ");
    if (e.sender >= s.nodes.size() || e.receiver >= s.nodes.size())
      throw ValidationError(where + ": edge endpoint out of range");
  }
  if (s.semantics == "graph") return;

  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : s.edges) {
    if (s.nodes[e.sender].stance == s.nodes[e.receiver].stance)
      throw ValidationError(where + ": edge joins two nodes of the same stance");
    edges.emplace(e.sender, e.receiver);
  }
  std::size_t favour = 0, against = 0;
  for (const auto& n : s.nodes) (n.stance == Stance::Favour ? favour : against) += 1;
  if (edges.size() != s.edges.size() || edges.size() != 2 * favour * against)
    throw ValidationError(where + ": edges are not the complete bipartite set");
}

namespace {

json sample_to_json(const LearningSample& s) {
  json j;
  j["debate_id"] = s.debate_id;
  j["semantics"] = s.semantics;
  j["label"] = s.label;
  j["global"] = s.global;
  j["nodes"] = json::array();
  for (const auto& n : s.nodes)
    j["nodes"].push_back({{"argument", n.argument}, {"stance", to_code(n.stance)}, {"features", n.features}});
  j["edges"] = json::array();
  for (const auto& e : s.edges)
    j["edges"].push_back({{"sender", e.sender}, {"receiver", e.receiver}, {"features", e.features}});
  return j;
}

LearningSample sample_from_json(const json& j) {
  LearningSample s;
  s.debate_id = j.at("debate_id").get<std::string>();
  s.semantics = j.at("semantics").get<std::string>();
  s.label = j.at("label").get<int>();
  s.global = j.at("global").get<std::vector<double>>();
  for (const auto& n : j.at("nodes"))
    s.nodes.push_back(SampleNode{n.at("argument").get<ArgId>(), parse_stance(n.at("stance").get<std::string>()),
                                 n.at("features").get<std::vector<double>>()});
  for (const auto& e : j.at("edges"))
    s.edges.push_back(SampleEdge{e.at("sender").get<std::size_t>(), e.at("receiver").get<std::size_t>(),
                                 e.at("features").get<std::vector<double>>()});
  return s;
}

}  // namespace

std::string samples_to_json(const std::vector<LearningSample>& samples) {
  json doc;
  doc["format"] = "arbiter-samples";
  doc["version"] = 1;
  doc["samples"] = json::array();
  for (const auto& s : samples) doc["samples"].push_back(sample_to_json(s));
  return doc.dump() + "\n";
}

std::vector<LearningSample> samples_from_json(std::string_view text) {
  std::vector<LearningSample> out;
  try {
    const json doc = json::parse(text.begin(), text.end());
    if (doc.value("version", 0) != 1) throw ParseError("unsupported samples file version");
    for (const auto& j : doc.at("samples")) {
      out.push_back(sample_from_json(j));
      validate_sample(out.back());
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed samples JSON: ") + e.what());
  }
  return out;
}

void save_samples(const std::vector<LearningSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << samples_to_json(samples);
}

std::vector<LearningSample> load_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return samples_from_json(buf.str());
}

}  // namespace arbiter
