#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arbiter/af.hpp"

namespace arbiter {

enum class Semantics { Naive, Preferred };

std::string_view to_string(Semantics s);
Semantics parse_semantics(std::string_view name);

struct Extension {
  std::vector<ArgId> arguments;  // sorted ascending
  Semantics semantics = Semantics::Naive;
  std::string debate_id;

  bool operator==(const Extension&) const = default;
};

struct EnumerationLimits {
  std::size_t max_extensions = 100'000;
  std::chrono::milliseconds time_budget{60'000};
};

// Both predicates throw ValidationError if `set` names an unknown argument.
bool is_conflict_free(const ArgumentationFramework& af, std::span<const ArgId> set);
bool is_admissible(const ArgumentationFramework& af, std::span<const ArgId> set);

// Maximal conflict-free sets, enumerated as maximal cliques of the
// compatibility graph (Bron-Kerbosch with Tomita pivoting).
std::vector<Extension> naive_extensions(const ArgumentationFramework& af, const EnumerationLimits& limits = {});

// Maximal admissible sets, enumerated with a labelling-based backtracking
// search (IN / OUT / MUST_OUT / UNDEC / BLANK).
std::vector<Extension> preferred_extensions(const ArgumentationFramework& af,
                                            const EnumerationLimits& limits = {});

std::vector<Extension> extensions(const ArgumentationFramework& af, Semantics semantics,
                                  const EnumerationLimits& limits = {});

inline constexpr std::size_t kBruteForceMaxArguments = 20;

// Scans all 2^n subsets. Reference oracle; throws ResourceLimitError above
// kBruteForceMaxArguments.
std::vector<Extension> brute_force_extensions(const ArgumentationFramework& af, Semantics semantics);

// Sorts by member lists, the canonical output order.
void sort_extensions(std::vector<Extension>& exts);

}  // namespace arbiter
