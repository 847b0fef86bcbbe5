#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "arbiter/af.hpp"
#include "arbiter/argument_model.hpp"
#include "arbiter/error.hpp"
#include "arbiter/sheet_converter.hpp"
#include "test_support.hpp"

using namespace arbiter;
namespace fs = std::filesystem;

static const fs::path kData = ARBITER_TEST_DATA;

TEST_CASE("load_debate: valid files") {
  const Debate d1 = load_debate(kData / "corpus" / "d1.json");
  CHECK(d1.id == "d1");
  CHECK(d1.winner == Stance::Favour);
  CHECK(d1.adus.size() == 4);
  CHECK(d1.relations.size() == 4);
  CHECK(d1.adus[0].phase == Phase::Introduction);
  CHECK(d1.adus[3].phase == Phase::Conclusion);
  CHECK(d1.adus[2].stance == Stance::Against);
  CHECK(d1.adus[1].debate_id == "d1");

  const Debate d2 = load_debate(kData / "corpus" / "d2.json");
  CHECK(d2.adus.size() == 2);
  REQUIRE(d2.relations.size() == 1);
  CHECK(d2.relations[0].kind == RelationKind::Conflict);

  const Debate d3 = load_debate(kData / "corpus" / "d3.json");
  CHECK(d3.adus.empty());
  CHECK(d3.relations.empty());
  CHECK(d3.winner == Stance::Favour);

  CHECK(load_debate(kData / "corpus" / "d1.json") == d1);
}

TEST_CASE("load_debate: invalid files") {
  auto message_of = [](const fs::path& p) -> std::string {
    try {
      load_debate(p);
    } catch (const ValidationError& e) {
      return std::string("validation: ") + e.what();
    } catch (const ParseError& e) {
      return std::string("parse: ") + e.what();
    }
    return "accepted";
  };
  const std::string dangling = message_of(kData / "bad" / "dangling.json");
  CHECK(dangling.starts_with("validation"));
  CHECK(dangling.find("x9") != std::string::npos);
  CHECK(message_of(kData / "bad" / "self.json").find("self-relation") != std::string::npos);
  CHECK(message_of(kData / "bad" / "duplicate.json").find("duplicate ADU id 'a'") != std::string::npos);
  CHECK(message_of(kData / "bad" / "enum.json").find("invalid stance 'N'") != std::string::npos);
  CHECK(message_of(kData / "bad" / "empty_text.json").find("empty text") != std::string::npos);
  CHECK(message_of(kData / "bad" / "malformed.json").starts_with("parse"));
  CHECK(message_of(kData / "missing.json").starts_with("parse"));
  CHECK_THROWS_AS(parse_debate_json(R"({"id":"x","winner":"F","adus":[]})"), ParseError);
  CHECK_THROWS_AS(parse_debate_json(R"({"id":"x","winner":"F","adus":[],"relations":[]} // c)"), ParseError);
}

TEST_CASE("save/load round trip on random debates") {
  std::mt19937_64 rng(5);
  const fs::path tmp = fs::temp_directory_path() / "arbiter_roundtrip.json";
  for (int trial = 0; trial < 25; ++trial) {
    Debate d = arbiter::testing::random_debate(rng, rng() % 12, 0.1, 0.1);
    for (auto& a : d.adus) a.phase = static_cast<Phase>(rng() % 3);
    d.adus.size() > 0 ? (void)(d.adus[0].text = "unicode \xc3\xa9s \"quoted\"\n") : (void)0;
    save_debate(d, tmp);
    const Debate back = load_debate(tmp);
    CHECK(back == d);
    CHECK_NOTHROW(validate_debate(back));
  }
  fs::remove(tmp);
}

TEST_CASE("corpus loading and statistics") {
  const auto corpus = load_corpus(kData / "corpus");
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].id == "d1");
  const StatsReport s = corpus_stats(corpus);
  CHECK(s.debates == 3);
  CHECK(s.adus == 6);
  CHECK(s.favour_wins == 2);
  CHECK(s.against_wins == 1);
  CHECK(s.words == 6 + 5 + 9 + 7 + 5 + 6);
  CHECK(s.relations_by_kind.at(RelationKind::Conflict) == 3);

  const StatsReport empty = corpus_stats({});
  CHECK(empty.debates == 0);
  CHECK(empty.adus == 0);
  CHECK(empty.words == 0);
  CHECK(empty.favour_wins + empty.against_wins == 0);

  CHECK(count_words("  two\twords\n") == 2);
  CHECK_THROWS_AS(load_corpus(kData / "nope"), ParseError);
}

TEST_CASE("APX export") {
  const auto single = arbiter::testing::named_af("a", {});
  CHECK(export_apx(single) == "arg(a).\n");
  const auto pair = arbiter::testing::named_af("ab", {{'a', 'b'}});
  CHECK(export_apx(pair) == "arg(a).\narg(b).\natt(a,b).\n");

  CHECK(sanitize_apx_name("F-12_x") == "f12x");
  CHECK(sanitize_apx_name("--") == "x");
  std::vector<AbstractArgument> clash{{0, {"u"}, Stance::Favour, "A-1"}, {1, {"v"}, Stance::Favour, "a1"}};
  const std::string text = export_apx(ArgumentationFramework("", clash, {{0, 1}}));
  CHECK(text == "arg(a1).\narg(a1x1).\natt(a1,a1x1).\n");
}

TEST_CASE("APX parse") {
  const auto af = parse_apx("% comment\narg(b). arg(a).\natt(a,b).\natt( b , b ).\n");
  REQUIRE(af.size() == 2);
  CHECK(af.arguments()[0].name == "a");
  CHECK(af.attacks(0, 1));
  CHECK(af.attacks(1, 1));
  CHECK_THROWS_AS(parse_apx("arg(a).\natt(a,c).\n"), ValidationError);
  CHECK_THROWS_AS(parse_apx("arg(a)\n"), ParseError);
  CHECK_THROWS_AS(parse_apx("foo(a).\n"), ParseError);
  CHECK_THROWS_AS(parse_apx("att(a).\n"), ParseError);
}

TEST_CASE("APX round trip on random frameworks") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto af = arbiter::testing::random_af(rng, rng() % 13, 0.3);
    const std::string text = export_apx(af);
    const auto back = parse_apx(text);
    REQUIRE(back.size() == af.size());
    // Parsing renumbers by name; compare attacks by name.
    std::set<std::pair<std::string, std::string>> a, b;
    for (auto [x, y] : af.attacks()) a.emplace(af.arguments()[x].name, af.arguments()[y].name);
    for (auto [x, y] : back.attacks()) b.emplace(back.arguments()[x].name, back.arguments()[y].name);
    CHECK(a == b);
    CHECK(export_apx(back) == text);
  }
}

TEST_CASE("spreadsheet conversion") {
  std::ifstream in(kData / "sheet.csv");
  std::stringstream buf;
  buf << in.rdbuf();
  ConversionReport report;
  const Debate d = convert_debate_sheet(buf.str(), "sheet", Stance::Against, report);
  CHECK(d.id == "sheet");
  CHECK(d.winner == Stance::Against);
  REQUIRE(d.adus.size() == 5);
  CHECK(d.adus[0].text == "Tuition should be free; always");
  CHECK(d.adus[0].phase == Phase::Introduction);
  CHECK(d.adus[1].phase == Phase::Argumentation);
  CHECK(d.adus[3].phase == Phase::Conclusion);
  CHECK(d.adus[3].stance == Stance::Against);
  // F2->F1 inference, F2->A1 conflict, A1->F1 conflict, A2->F2 inference, A2->A1 rephrase.
  CHECK(d.relations.size() == 5);
  REQUIRE(report.cross_stance_links.size() == 1);
  CHECK(report.cross_stance_links[0] == "A2 -inference-> F2");
  CHECK(report.dropped.size() == 2);
  CHECK_NOTHROW(validate_debate(d));

  ConversionReport r2;
  CHECK_THROWS_AS(convert_debate_sheet("NAME,X\n1,2\n", "s", Stance::Favour, r2), ParseError);
  CHECK_THROWS_AS(convert_debate_sheet("ID,TEXT\nQ1,hello\n", "s", Stance::Favour, r2), ValidationError);
  const Debate stance_col = convert_debate_sheet("ID,TEXT,STANCE\nq1,hello,A\n", "s", Stance::Favour, r2);
  CHECK(stance_col.adus[0].stance == Stance::Against);
}
