#include <doctest.h>

#include <algorithm>
#include <random>

#include "arbiter/error.hpp"
#include "arbiter/semantics.hpp"
#include "test_support.hpp"

using namespace arbiter;
using arbiter::testing::named_af;
using arbiter::testing::random_af;

namespace {

using Sets = std::vector<std::vector<ArgId>>;

Sets members(const std::vector<Extension>& exts) {
  Sets out;
  for (const auto& e : exts) out.push_back(e.arguments);
  return out;
}

// Straight from the definitions, on std::vector subsets; independent of the
// bitmask brute force in the library.
bool def_conflict_free(const ArgumentationFramework& af, const std::vector<ArgId>& s) {
  for (ArgId i : s)
    for (ArgId j : s)
      if (af.attacks().contains({i, j})) return false;
  return true;
}

bool def_admissible(const ArgumentationFramework& af, const std::vector<ArgId>& s) {
  if (!def_conflict_free(af, s)) return false;
  for (ArgId i : s)
    for (const auto& [k, target] : af.attacks()) {
      if (target != i) continue;
      bool countered = false;
      for (ArgId j : s) countered = countered || af.attacks().contains({j, k});
      if (!countered) return false;
    }
  return true;
}

Sets definition_oracle(const ArgumentationFramework& af, Semantics sem) {
  const std::size_t n = af.size();
  Sets ok;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<ArgId> s;
    for (std::size_t a = 0; a < n; ++a)
      if (mask >> a & 1U) s.push_back(static_cast<ArgId>(a));
    if (sem == Semantics::Naive ? def_conflict_free(af, s) : def_admissible(af, s)) ok.push_back(s);
  }
  Sets maximal;
  for (const auto& s : ok) {
    bool dominated = false;
    for (const auto& t : ok)
      if (t.size() > s.size() && std::includes(t.begin(), t.end(), s.begin(), s.end())) dominated = true;
    if (!dominated) maximal.push_back(s);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

}  // namespace

TEST_CASE("conflict-freeness") {
  const auto chain = named_af("abc", {{'a', 'b'}, {'b', 'c'}});
  CHECK(is_conflict_free(chain, std::vector<ArgId>{}));
  CHECK_FALSE(is_conflict_free(chain, std::vector<ArgId>{0, 1}));
  CHECK(is_conflict_free(chain, std::vector<ArgId>{0, 2}));

  const auto self = named_af("a", {{'a', 'a'}});
  CHECK_FALSE(is_conflict_free(self, std::vector<ArgId>{0}));
  CHECK_THROWS_AS(is_conflict_free(chain, std::vector<ArgId>{7}), ValidationError);
}

TEST_CASE("admissibility") {
  const auto chain = named_af("abc", {{'a', 'b'}, {'b', 'c'}});
  CHECK(is_admissible(chain, std::vector<ArgId>{}));
  CHECK_FALSE(is_admissible(chain, std::vector<ArgId>{2}));
  CHECK(is_admissible(chain, std::vector<ArgId>{0, 2}));
  CHECK(is_admissible(chain, std::vector<ArgId>{0}));
  CHECK_THROWS_AS(is_admissible(chain, std::vector<ArgId>{3}), ValidationError);

  // An unattacked singleton is always admissible.
  const auto star = named_af("abcd", {{'b', 'c'}, {'c', 'd'}, {'d', 'b'}});
  CHECK(is_admissible(star, std::vector<ArgId>{0}));
}

TEST_CASE("fixture frameworks") {
  const auto chain = named_af("abc", {{'a', 'b'}, {'b', 'c'}});
  CHECK(members(naive_extensions(chain)) == Sets{{0, 2}, {1}});
  CHECK(members(preferred_extensions(chain)) == Sets{{0, 2}});

  const auto mutual = named_af("ab", {{'a', 'b'}, {'b', 'a'}});
  CHECK(members(naive_extensions(mutual)) == Sets{{0}, {1}});
  CHECK(members(preferred_extensions(mutual)) == Sets{{0}, {1}});

  const auto self = named_af("a", {{'a', 'a'}});
  CHECK(members(naive_extensions(self)) == Sets{{}});
  CHECK(members(preferred_extensions(self)) == Sets{{}});

  const auto free = named_af("abc", {});
  CHECK(members(naive_extensions(free)) == Sets{{0, 1, 2}});
  CHECK(members(preferred_extensions(free)) == Sets{{0, 1, 2}});

  const ArgumentationFramework empty;
  CHECK(members(naive_extensions(empty)) == Sets{{}});
  CHECK(members(preferred_extensions(empty)) == Sets{{}});
  CHECK(members(brute_force_extensions(empty, Semantics::Naive)) == Sets{{}});
  CHECK(members(brute_force_extensions(empty, Semantics::Preferred)) == Sets{{}});
  CHECK(members(brute_force_extensions(mutual, Semantics::Naive)) == Sets{{0}, {1}});
}

TEST_CASE("extensions carry semantics and debate id") {
  std::vector<AbstractArgument> args{{0, {"x"}, Stance::Favour, "x"}};
  ArgumentationFramework af("deb7", args, {});
  const auto exts = preferred_extensions(af);
  REQUIRE(exts.size() == 1);
  CHECK(exts[0].semantics == Semantics::Preferred);
  CHECK(exts[0].debate_id == "deb7");
  CHECK(naive_extensions(af)[0].semantics == Semantics::Naive);
}

TEST_CASE("library brute force agrees with the definition oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const auto af = random_af(rng, 1 + trial % 8, std::array{0.1, 0.3, 0.5}[trial % 3]);
    for (Semantics s : {Semantics::Naive, Semantics::Preferred})
      CHECK(members(brute_force_extensions(af, s)) == definition_oracle(af, s));
  }
}

TEST_CASE("enumerators match brute force on random frameworks") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto af = random_af(rng, rng() % 13, std::array{0.1, 0.3, 0.5}[trial % 3]);
    CHECK(naive_extensions(af) == brute_force_extensions(af, Semantics::Naive));
    CHECK(preferred_extensions(af) == brute_force_extensions(af, Semantics::Preferred));
  }
}

TEST_CASE("semantic properties") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto af = random_af(rng, 2 + rng() % 10, 0.25);
    const auto naive = naive_extensions(af);
    const auto pref = preferred_extensions(af);
    CHECK_FALSE(naive.empty());
    CHECK_FALSE(pref.empty());
    for (const auto& p : pref) {
      CHECK(is_admissible(af, p.arguments));
      CHECK(is_conflict_free(af, p.arguments));
      // Subsets of a conflict-free set stay conflict-free.
      for (std::size_t drop = 0; drop < p.arguments.size(); ++drop) {
        auto sub = p.arguments;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
        CHECK(is_conflict_free(af, sub));
      }
      const bool inside_some_naive = std::any_of(naive.begin(), naive.end(), [&](const Extension& n) {
        return std::includes(n.arguments.begin(), n.arguments.end(), p.arguments.begin(), p.arguments.end());
      });
      CHECK(inside_some_naive);
    }
    for (const auto* family : {&naive, &pref})
      for (const auto& a : *family)
        for (const auto& b : *family)
          if (!(a == b))
            CHECK_FALSE(std::includes(b.arguments.begin(), b.arguments.end(), a.arguments.begin(), a.arguments.end()));
    // Unattacked arguments belong to every preferred extension.
    for (ArgId a = 0; a < af.size(); ++a)
      if (af.attackers_of(a).empty())
        for (const auto& p : pref) CHECK(std::binary_search(p.arguments.begin(), p.arguments.end(), a));
  }
}

TEST_CASE("resource caps") {
  // n disjoint mutual-attack pairs have 2^n naive extensions.
  std::vector<std::pair<ArgId, ArgId>> att;
  for (ArgId i = 0; i < 24; i += 2) {
    att.emplace_back(i, i + 1);
    att.emplace_back(i + 1, i);
  }
  const auto af = ArgumentationFramework::with_size(24, att);
  EnumerationLimits limits;
  limits.max_extensions = 1000;
  CHECK_THROWS_AS(naive_extensions(af, limits), ResourceLimitError);
  CHECK_THROWS_AS(preferred_extensions(af, limits), ResourceLimitError);
  CHECK(naive_extensions(af).size() == 4096);
  CHECK(preferred_extensions(af).size() == 4096);
  CHECK_THROWS_AS(brute_force_extensions(ArgumentationFramework::with_size(21), Semantics::Naive),
                  ResourceLimitError);
}

TEST_CASE("semantics names") {
  CHECK(parse_semantics("naive") == Semantics::Naive);
  CHECK(parse_semantics("preferred") == Semantics::Preferred);
  CHECK(to_string(Semantics::Preferred) == "preferred");
  CHECK_THROWS_AS(parse_semantics("grounded"), ValidationError);
}
