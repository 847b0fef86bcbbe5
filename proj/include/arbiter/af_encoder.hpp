#pragma once

#include <cstddef>
#include <string>

#include "arbiter/af.hpp"
#include "arbiter/argument_model.hpp"

namespace arbiter {

// Groups ADUs joined by inference/rephrase relations (ignoring direction)
// into abstract arguments and lifts every conflict relation to an attack
// between the groups of its endpoints. Groups are numbered by their
// lexicographically smallest member ADU id. A group's stance is the strict
// majority stance of its members; a tie throws EncodingError.
ArgumentationFramework encode_af(const Debate& debate);

struct AfSummary {
  std::size_t arguments = 0;
  std::size_t attacks = 0;
  std::size_t favour_arguments = 0;
  std::size_t against_arguments = 0;
  std::size_t self_attacks = 0;

  std::string to_text() const;
};

AfSummary af_summary(const ArgumentationFramework& af);

}  // namespace arbiter
