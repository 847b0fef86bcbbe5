#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "arbiter/argument_model.hpp"

namespace arbiter {

struct ConversionReport {
  std::vector<std::string> cross_stance_links;  // inference/rephrase joining opposite stances
  std::vector<std::string> dropped;             // dangling targets and self-relations
};

// Converts one debate sheet in the published corpus layout into a Debate.
//
// The header row must name an ID column, a PHASE column, a text column
// (ADU_EN, ADU_CAT, ADU or TEXT, first match wins) and any of INFERENCE,
// CONFLICT, REPHRASE. Relation cells list target ids. Stance comes from a
// STANCE column when present, otherwise from the leading F/A of the id.
// The delimiter is detected from the header (tab, ';' or ',').
//
// Cross-stance inference/rephrase links are kept and listed in `report`;
// relations to unknown ids and self-relations are dropped and listed.
Debate convert_debate_sheet(std::string_view sheet, const std::string& debate_id, Stance winner,
                            ConversionReport& report);

}  // namespace arbiter
