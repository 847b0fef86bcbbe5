#include "arbiter/semantics.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

#include "arbiter/error.hpp"

namespace arbiter {

std::string_view to_string(Semantics s) { return s == Semantics::Naive ? "naive" : "preferred"; }

Semantics parse_semantics(std::string_view name) {
  if (name == "naive") return Semantics::Naive;
  if (name == "preferred") return Semantics::Preferred;
  throw ValidationError("unknown semantics '" + std::string(name) + "' (expected naive|preferred)");
}

namespace {

void check_members(const ArgumentationFramework& af, std::span<const ArgId> set) {
  for (ArgId a : set)
    if (a >= af.size()) throw ValidationError("unknown argument id " + std::to_string(a));
}

// Fixed-capacity bitset over argument ids.
class ArgSet {
 public:
  ArgSet() = default;
  explicit ArgSet(std::size_t n) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  ArgSet operator&(const ArgSet& o) const {
    ArgSet r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }
  ArgSet& operator|=(const ArgSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  ArgSet minus(const ArgSet& o) const {
    ArgSet r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~o.words_[i];
    return r;
  }
  bool subset_of(const ArgSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  std::vector<ArgId> members() const {
    std::vector<ArgId> out;
    for_each([&](std::size_t i) { out.push_back(static_cast<ArgId>(i)); });
    return out;
  }

 private:
  std::vector<std::uint64_t> words_;
};

class Deadline {
 public:
  explicit Deadline(const EnumerationLimits& limits)
      : limits_(limits), start_(std::chrono::steady_clock::now()) {}

  void tick() {
    if ((++ticks_ & 0x3ff) != 0) return;
    if (std::chrono::steady_clock::now() - start_ > limits_.time_budget)
      throw ResourceLimitError("enumeration exceeded time budget of " +
                               std::to_string(limits_.time_budget.count()) + " ms");
  }

  void check_count(std::size_t found) const {
    if (found > limits_.max_extensions)
      throw ResourceLimitError("enumeration exceeded " + std::to_string(limits_.max_extensions) +
                               " extensions");
  }

 private:
  const EnumerationLimits& limits_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t ticks_ = 0;
};

Extension make_extension(const ArgumentationFramework& af, std::vector<ArgId> members, Semantics s) {
  return Extension{std::move(members), s, af.debate_id()};
}

// --- Naive -----------------------------------------------------------------

class MaximalCliques {
 public:
  MaximalCliques(std::vector<ArgSet> adjacency, Deadline& deadline)
      : adj_(std::move(adjacency)), deadline_(deadline) {}

  std::vector<ArgSet> run(std::size_t n, const ArgSet& candidates) {
    ArgSet r(n), x(n);
    expand(r, candidates, x);
    return std::move(found_);
  }

 private:
  void expand(ArgSet& r, ArgSet p, ArgSet x) {
    deadline_.tick();
    if (p.none()) {
      if (x.none()) {
        found_.push_back(r);
        deadline_.check_count(found_.size());
      }
      return;
    }
    // Pivot on the vertex of P u X with most neighbours in P.
    std::size_t pivot = 0, best = 0;
    bool have_pivot = false;
    auto consider = [&](std::size_t u) {
      const std::size_t c = (p & adj_[u]).count();
      if (!have_pivot || c > best) {
        pivot = u;
        best = c;
        have_pivot = true;
      }
    };
    p.for_each(consider);
    x.for_each(consider);

    const ArgSet branch = p.minus(adj_[pivot]);
    branch.for_each([&](std::size_t v) {
      r.set(v);
      expand(r, p & adj_[v], x & adj_[v]);
      r.reset(v);
      p.reset(v);
      x.set(v);
    });
  }

  std::vector<ArgSet> adj_;
  Deadline& deadline_;
  std::vector<ArgSet> found_;
};

// --- Preferred -------------------------------------------------------------

enum class Label : std::uint8_t { Blank, In, Out, MustOut, Undec };

class PreferredSearch {
 public:
  PreferredSearch(const ArgumentationFramework& af, const EnumerationLimits& limits)
      : af_(af), deadline_(limits), n_(af.size()) {}

  std::vector<ArgSet> run() {
    std::vector<Label> labels(n_, Label::Blank);
    for (std::size_t a = 0; a < n_; ++a)
      if (af_.self_attacking(static_cast<ArgId>(a))) labels[a] = Label::Undec;
    search(std::move(labels));
    return std::move(candidates_);
  }

 private:
  void make_in(std::vector<Label>& labels, ArgId x) const {
    labels[x] = Label::In;
    for (ArgId z : af_.attacked_by(x)) labels[z] = Label::Out;
    for (ArgId z : af_.attackers_of(x))
      if (labels[z] != Label::Out) labels[z] = Label::MustOut;
  }

  // Adds every blank argument whose attackers are all OUT (defended by IN).
  void propagate(std::vector<Label>& labels) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t y = 0; y < n_; ++y) {
        if (labels[y] != Label::Blank) continue;
        const auto& atk = af_.attackers_of(static_cast<ArgId>(y));
        if (std::all_of(atk.begin(), atk.end(), [&](ArgId z) { return labels[z] == Label::Out; })) {
          make_in(labels, static_cast<ArgId>(y));
          changed = true;
        }
      }
    }
  }

  // A MUST_OUT argument with no BLANK attacker can never be counter-attacked.
  bool dead_end(const std::vector<Label>& labels) const {
    for (std::size_t y = 0; y < n_; ++y) {
      if (labels[y] != Label::MustOut) continue;
      const auto& atk = af_.attackers_of(static_cast<ArgId>(y));
      if (std::none_of(atk.begin(), atk.end(), [&](ArgId z) { return labels[z] == Label::Blank; }))
        return true;
    }
    return false;
  }

  ArgSet collect(const std::vector<Label>& labels, bool include_blank) const {
    ArgSet s(n_);
    for (std::size_t a = 0; a < n_; ++a)
      if (labels[a] == Label::In || (include_blank && labels[a] == Label::Blank)) s.set(a);
    return s;
  }

  bool subsumed(const ArgSet& s) const {
    return std::any_of(candidates_.begin(), candidates_.end(), [&](const ArgSet& c) { return s.subset_of(c); });
  }

  void record(const ArgSet& s) {
    if (subsumed(s)) return;
    std::erase_if(candidates_, [&](const ArgSet& c) { return c.subset_of(s); });
    candidates_.push_back(s);
    deadline_.check_count(candidates_.size());
  }

  std::size_t pick_branch(const std::vector<Label>& labels) const {
    std::size_t fallback = n_;
    for (std::size_t x = 0; x < n_; ++x) {
      if (labels[x] != Label::Blank) continue;
      if (fallback == n_) fallback = x;
      for (ArgId z : af_.attacked_by(static_cast<ArgId>(x)))
        if (labels[z] == Label::MustOut) return x;
    }
    return fallback;
  }

  void search(std::vector<Label> labels) {
    deadline_.tick();
    propagate(labels);
    if (dead_end(labels)) return;
    if (!candidates_.empty() && subsumed(collect(labels, true))) return;

    const std::size_t x = pick_branch(labels);
    if (x == n_) {
      if (std::none_of(labels.begin(), labels.end(), [](Label l) { return l == Label::MustOut; }))
        record(collect(labels, false));
      return;
    }
    std::vector<Label> with_x = labels;
    make_in(with_x, static_cast<ArgId>(x));
    search(std::move(with_x));
    labels[x] = Label::Undec;
    search(std::move(labels));
  }

  const ArgumentationFramework& af_;
  Deadline deadline_;
  std::size_t n_;
  std::vector<ArgSet> candidates_;
};

}  // namespace

bool is_conflict_free(const ArgumentationFramework& af, std::span<const ArgId> set) {
  check_members(af, set);
  for (ArgId a : set)
    for (ArgId b : set)
      if (af.attacks(a, b)) return false;
  return true;
}

bool is_admissible(const ArgumentationFramework& af, std::span<const ArgId> set) {
  if (!is_conflict_free(af, set)) return false;
  for (ArgId member : set) {
    for (ArgId attacker : af.attackers_of(member)) {
      const bool defended =
          std::any_of(set.begin(), set.end(), [&](ArgId d) { return af.attacks(d, attacker); });
      if (!defended) return false;
    }
  }
  return true;
}

void sort_extensions(std::vector<Extension>& exts) {
  std::sort(exts.begin(), exts.end(),
            [](const Extension& a, const Extension& b) { return a.arguments < b.arguments; });
}

std::vector<Extension> naive_extensions(const ArgumentationFramework& af, const EnumerationLimits& limits) {
  const std::size_t n = af.size();
  ArgSet candidates(n);
  for (std::size_t a = 0; a < n; ++a)
    if (!af.self_attacking(static_cast<ArgId>(a))) candidates.set(a);

  // u ~ v iff neither attacks the other; self-attackers are isolated and excluded.
  std::vector<ArgSet> compatible(n, ArgSet(n));
  for (std::size_t u = 0; u < n; ++u) {
    if (!candidates.test(u)) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || !candidates.test(v)) continue;
      if (!af.attacks(static_cast<ArgId>(u), static_cast<ArgId>(v)) &&
          !af.attacks(static_cast<ArgId>(v), static_cast<ArgId>(u)))
        compatible[u].set(v);
    }
  }

  Deadline deadline(limits);
  MaximalCliques cliques(std::move(compatible), deadline);
  std::vector<Extension> out;
  for (const ArgSet& c : cliques.run(n, candidates))
    out.push_back(make_extension(af, c.members(), Semantics::Naive));
  sort_extensions(out);
  return out;
}

std::vector<Extension> preferred_extensions(const ArgumentationFramework& af, const EnumerationLimits& limits) {
  PreferredSearch search(af, limits);
  std::vector<Extension> out;
  for (const ArgSet& s : search.run()) out.push_back(make_extension(af, s.members(), Semantics::Preferred));
  sort_extensions(out);
  return out;
}

std::vector<Extension> extensions(const ArgumentationFramework& af, Semantics semantics,
                                  const EnumerationLimits& limits) {
  return semantics == Semantics::Naive ? naive_extensions(af, limits) : preferred_extensions(af, limits);
}

std::vector<Extension> brute_force_extensions(const ArgumentationFramework& af, Semantics semantics) {
  const std::size_t n = af.size();
  if (n > kBruteForceMaxArguments)
    throw ResourceLimitError("brute force is capped at " + std::to_string(kBruteForceMaxArguments) +
                             " arguments (got " + std::to_string(n) + ")");

  std::vector<std::uint32_t> out_mask(n, 0), in_mask(n, 0);
  for (const auto& [from, to] : af.attacks()) {
    out_mask[from] |= 1U << to;
    in_mask[to] |= 1U << from;
  }
  auto conflict_free = [&](std::uint32_t s) {
    for (std::size_t a = 0; a < n; ++a)
      if (((s >> a) & 1U) && (out_mask[a] & s)) return false;
    return true;
  };
  auto admissible = [&](std::uint32_t s) {
    if (!conflict_free(s)) return false;
    std::uint32_t defeated = 0;
    for (std::size_t a = 0; a < n; ++a)
      if ((s >> a) & 1U) defeated |= out_mask[a];
    for (std::size_t a = 0; a < n; ++a)
      if (((s >> a) & 1U) && (in_mask[a] & ~defeated)) return false;
    return true;
  };
  auto qualifies = [&](std::uint32_t s) {
    return semantics == Semantics::Naive ? conflict_free(s) : admissible(s);
  };

  const std::uint32_t total = n == 0 ? 1U : (1U << n);
  std::vector<std::uint32_t> ok;
  for (std::uint32_t s = 0; s < total; ++s)
    if (qualifies(s)) ok.push_back(s);
  std::stable_sort(ok.begin(), ok.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) > std::popcount(b); });
  std::vector<std::uint32_t> maximal;
  for (std::uint32_t s : ok) {
    const bool dominated = std::any_of(maximal.begin(), maximal.end(),
                                       [&](std::uint32_t m) { return (s & m) == s && s != m; });
    if (!dominated) maximal.push_back(s);
  }

  std::vector<Extension> result;
  for (std::uint32_t m : maximal) {
    std::vector<ArgId> members;
    for (std::size_t a = 0; a < n; ++a)
      if ((m >> a) & 1U) members.push_back(static_cast<ArgId>(a));
    result.push_back(make_extension(af, std::move(members), semantics));
  }
  sort_extensions(result);
  return result;
}

}  // namespace arbiter
