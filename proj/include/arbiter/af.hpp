#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arbiter/argument_model.hpp"

namespace arbiter {

using ArgId = std::uint32_t;

struct AbstractArgument {
  ArgId id = 0;
  // Member ADU ids, sorted. Arguments read from APX carry their own name here.
  std::vector<std::string> adu_ids;
  Stance stance = Stance::Favour;
  // Display/export name; defaults to "a<id>".
  std::string name;

  bool operator==(const AbstractArgument&) const = default;
};

// Dung framework <A, R> with dense argument ids 0..n-1.
class ArgumentationFramework {
 public:
  ArgumentationFramework() = default;
  ArgumentationFramework(std::string debate_id, std::vector<AbstractArgument> arguments,
                         std::set<std::pair<ArgId, ArgId>> attacks);

  // n arguments named a0..a{n-1}, all Favour; handy for tests and APX input.
  static ArgumentationFramework with_size(std::size_t n,
                                          const std::vector<std::pair<ArgId, ArgId>>& attacks = {});

  const std::string& debate_id() const { return debate_id_; }
  const std::vector<AbstractArgument>& arguments() const { return arguments_; }
  const std::set<std::pair<ArgId, ArgId>>& attacks() const { return attacks_; }
  std::size_t size() const { return arguments_.size(); }

  bool attacks(ArgId from, ArgId to) const;
  bool self_attacking(ArgId a) const { return attacks(a, a); }
  const std::vector<ArgId>& attackers_of(ArgId a) const { return attackers_[a]; }
  const std::vector<ArgId>& attacked_by(ArgId a) const { return attacked_[a]; }

  bool operator==(const ArgumentationFramework& o) const {
    return arguments_ == o.arguments_ && attacks_ == o.attacks_;
  }

 private:
  std::string debate_id_;
  std::vector<AbstractArgument> arguments_;
  std::set<std::pair<ArgId, ArgId>> attacks_;
  std::vector<std::vector<ArgId>> attackers_;
  std::vector<std::vector<ArgId>> attacked_;
  std::vector<std::vector<bool>> matrix_;
};

// Lowercase alphanumerics only; empty input maps to "x".
std::string sanitize_apx_name(std::string_view name);

// arg/att facts, one per line, sorted lexicographically.
std::string export_apx(const ArgumentationFramework& af);

// Reads arg(x). / att(x,y). facts; `%` starts a comment. Arguments are
// numbered in sorted name order.
ArgumentationFramework parse_apx(std::string_view text);

}  // namespace arbiter
