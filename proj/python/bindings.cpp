#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "arbiter/af.hpp"
#include "arbiter/af_encoder.hpp"
#include "arbiter/argument_model.hpp"
#include "arbiter/error.hpp"
#include "arbiter/graph_network.hpp"
#include "arbiter/kv_config.hpp"
#include "arbiter/pipeline.hpp"
#include "arbiter/sample_builder.hpp"
#include "arbiter/semantics.hpp"

namespace py = pybind11;
using namespace arbiter;

namespace {

std::vector<std::vector<ArgId>> member_lists(std::vector<Extension> exts) {
  sort_extensions(exts);
  std::vector<std::vector<ArgId>> out;
  for (auto& e : exts) out.push_back(std::move(e.arguments));
  return out;
}

EnumerationLimits limits_of(std::size_t max_extensions, double time_budget_s) {
  EnumerationLimits l;
  l.max_extensions = max_extensions;
  l.time_budget = std::chrono::milliseconds(static_cast<std::int64_t>(time_budget_s * 1000.0));
  return l;
}

}  // namespace

PYBIND11_MODULE(_arbiter, m) {
  m.doc() = "Debate evaluation with argumentation semantics and graph networks";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<EncodingError>(m, "EncodingError", validation.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", validation.ptr());
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::enum_<Stance>(m, "Stance").value("FAVOUR", Stance::Favour).value("AGAINST", Stance::Against);
  py::enum_<Phase>(m, "Phase")
      .value("INTRODUCTION", Phase::Introduction)
      .value("ARGUMENTATION", Phase::Argumentation)
      .value("CONCLUSION", Phase::Conclusion);
  py::enum_<RelationKind>(m, "RelationKind")
      .value("INFERENCE", RelationKind::Inference)
      .value("CONFLICT", RelationKind::Conflict)
      .value("REPHRASE", RelationKind::Rephrase);

  py::class_<Adu>(m, "Adu")
      .def_readonly("id", &Adu::id)
      .def_readonly("text", &Adu::text)
      .def_readonly("stance", &Adu::stance)
      .def_readonly("phase", &Adu::phase);
  py::class_<Relation>(m, "Relation")
      .def_readonly("source", &Relation::source)
      .def_readonly("target", &Relation::target)
      .def_readonly("kind", &Relation::kind);
  py::class_<Debate>(m, "Debate")
      .def_readonly("id", &Debate::id)
      .def_readonly("adus", &Debate::adus)
      .def_readonly("relations", &Debate::relations)
      .def_readonly("winner", &Debate::winner)
      .def("to_json", &debate_to_json)
      .def("__eq__", [](const Debate& a, const Debate& b) { return a == b; });

  m.def("parse_debate", &parse_debate_json, py::arg("json_text"));
  m.def("load_debate", &load_debate, py::arg("path"));
  m.def("load_corpus", &load_corpus, py::arg("directory"));
  m.def(
      "corpus_stats",
      [](const std::vector<Debate>& ds) {
        const auto s = corpus_stats(ds);
        return py::dict(py::arg("debates") = s.debates, py::arg("adus") = s.adus, py::arg("words") = s.words,
                        py::arg("relations") = s.relations, py::arg("favour_wins") = s.favour_wins,
                        py::arg("against_wins") = s.against_wins);
      },
      py::arg("debates"));

  py::class_<AbstractArgument>(m, "Argument")
      .def_readonly("id", &AbstractArgument::id)
      .def_readonly("adu_ids", &AbstractArgument::adu_ids)
      .def_readonly("stance", &AbstractArgument::stance)
      .def_readonly("name", &AbstractArgument::name);
  py::class_<ArgumentationFramework>(m, "Framework")
      .def(py::init([](std::size_t n, const std::vector<std::pair<ArgId, ArgId>>& attacks) {
             return ArgumentationFramework::with_size(n, attacks);
           }),
           py::arg("size"), py::arg("attacks"))
      .def_property_readonly("arguments", &ArgumentationFramework::arguments)
      .def_property_readonly("attacks", [](const ArgumentationFramework& af) { return af.attacks(); })
      .def("__len__", &ArgumentationFramework::size)
      .def("to_apx", &export_apx)
      .def("__eq__", [](const ArgumentationFramework& a, const ArgumentationFramework& b) { return a == b; });

  m.def("encode_af", &encode_af, py::arg("debate"));
  m.def("parse_apx", &parse_apx, py::arg("text"));
  m.def("naive_extensions", [](const ArgumentationFramework& af) { return member_lists(naive_extensions(af)); },
        py::arg("af"));
  m.def("preferred_extensions",
        [](const ArgumentationFramework& af) { return member_lists(preferred_extensions(af)); }, py::arg("af"));
  m.def(
      "extensions",
      [](const ArgumentationFramework& af, const std::string& semantics, std::size_t max_extensions,
         double time_budget_s) {
        return member_lists(extensions(af, parse_semantics(semantics), limits_of(max_extensions, time_budget_s)));
      },
      py::arg("af"), py::arg("semantics"), py::arg("max_extensions") = 100000, py::arg("time_budget_s") = 60.0);
  m.def(
      "brute_force_extensions",
      [](const ArgumentationFramework& af, const std::string& semantics) {
        return member_lists(brute_force_extensions(af, parse_semantics(semantics)));
      },
      py::arg("af"), py::arg("semantics"));

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def(py::init<std::size_t>(), py::arg("dimension"))
      .def_property_readonly("dimension", &EmbeddingTable::dimension)
      .def("__len__", &EmbeddingTable::size)
      .def("add", &EmbeddingTable::add, py::arg("key"), py::arg("vector"))
      .def("get", &EmbeddingTable::at, py::arg("debate_id"), py::arg("adu_id"))
      .def("keys", &EmbeddingTable::keys)
      .def("to_text", &format_embeddings);
  m.def("parse_embeddings", &parse_embeddings, py::arg("text"));
  m.def("load_embeddings", &load_embeddings, py::arg("path"));
  m.def("hash_embed", &hash_embed, py::arg("text"), py::arg("dimension"), py::arg("seed") = 0);
  m.def("hash_embed_corpus", &hash_embed_corpus, py::arg("debates"), py::arg("dimension"), py::arg("seed") = 0);

  py::class_<LearningSample>(m, "LearningSample")
      .def_readonly("debate_id", &LearningSample::debate_id)
      .def_readonly("semantics", &LearningSample::semantics)
      .def_readonly("label", &LearningSample::label)
      .def_property_readonly("num_nodes", [](const LearningSample& s) { return s.nodes.size(); })
      .def_property_readonly("num_edges", [](const LearningSample& s) { return s.edges.size(); })
      .def_property_readonly("node_features",
                             [](const LearningSample& s) {
                               std::vector<std::vector<double>> out;
                               for (const auto& n : s.nodes) out.push_back(n.features);
                               return out;
                             })
      .def_property_readonly("edges", [](const LearningSample& s) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& e : s.edges) out.emplace_back(e.sender, e.receiver);
        return out;
      });
  m.def(
      "build_samples",
      [](const Debate& d, const std::string& semantics, const EmbeddingTable& emb) {
        const auto af = encode_af(d);
        const Semantics sem = parse_semantics(semantics);
        return build_samples(d, af, extensions(af, sem), emb).samples;
      },
      py::arg("debate"), py::arg("semantics"), py::arg("embeddings"));

  py::class_<GNParameters>(m, "GNParameters")
      .def_static(
          "initialize",
          [](std::size_t node_dim, std::size_t edge_dim, std::size_t hidden, std::uint64_t seed) {
            return GNParameters::initialize(GnDims{node_dim, edge_dim, 2, hidden}, seed);
          },
          py::arg("node_dim"), py::arg("edge_dim") = 8, py::arg("hidden") = 128, py::arg("seed") = 0)
      .def_property_readonly("parameter_count", &GNParameters::parameter_count)
      .def("save", &save_checkpoint, py::arg("path"))
      .def_static("load", &load_checkpoint, py::arg("path"))
      .def("__eq__", [](const GNParameters& a, const GNParameters& b) { return a == b; });
  m.def("gn_forward", &gn_forward, py::arg("params"), py::arg("sample"));
  m.def("gn_loss", &gn_loss, py::arg("probs"), py::arg("label"));
  m.def(
      "train",
      [](const GNParameters& params, const std::vector<LearningSample>& samples, double learning_rate,
         std::size_t epochs, std::size_t batch_size, std::uint64_t seed) {
        py::gil_scoped_release release;
        auto r = train(params, samples, TrainConfig{learning_rate, epochs, batch_size, seed});
        return std::make_pair(std::move(r.params), std::move(r.loss_history));
      },
      py::arg("params"), py::arg("samples"), py::arg("learning_rate") = 1e-3, py::arg("epochs") = 100,
      py::arg("batch_size") = 1, py::arg("seed") = 0);
  m.def(
      "predict_debate",
      [](const GNParameters& p, const std::vector<LearningSample>& samples) {
        const auto r = predict_debate(p, samples);
        return std::make_pair(r.cls, r.confidence);
      },
      py::arg("params"), py::arg("samples"));

  m.def(
      "metrics",
      [](const std::vector<int>& predictions, const std::vector<int>& golds) {
        const auto r = metrics(predictions, golds);
        return py::dict(py::arg("precision") = r.precision, py::arg("recall") = r.recall,
                        py::arg("weighted_f1") = r.weighted_f1);
      },
      py::arg("predictions"), py::arg("golds"));
  m.def(
      "split_debates",
      [](std::size_t n, double ratio, std::uint64_t seed) {
        auto s = split_debates(n, ratio, seed);
        return std::make_pair(s.train, s.test);
      },
      py::arg("n_debates"), py::arg("ratio"), py::arg("seed"));
  m.def("baseline_random", &baseline_random, py::arg("n_debates"), py::arg("seed"));
  m.def(
      "generate_synthetic_corpus",
      [](std::size_t n, double signal, std::uint64_t seed, std::size_t dimension) {
        SyntheticOptions opt;
        opt.dimension = dimension;
        auto c = generate_synthetic_corpus(n, signal, seed, opt);
        return std::make_pair(std::move(c.debates), std::move(c.embeddings));
      },
      py::arg("n_debates"), py::arg("signal"), py::arg("seed") = 0, py::arg("dimension") = 32);
  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const auto cfg = experiment_config_from_kv(KvConfig::parse(config_text));
        py::gil_scoped_release release;
        return run_experiment(cfg).to_json();
      },
      py::arg("config_text"), "Runs an experiment from key = value config text; returns the JSON report.");
}
