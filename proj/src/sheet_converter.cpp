#include "arbiter/sheet_converter.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "arbiter/error.hpp"

namespace arbiter {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// RFC-4180-style records: quoted fields may hold delimiters, newlines and "" escapes.
std::vector<std::vector<std::string>> read_records(std::string_view text, char delim) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
      row.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError("sheet: unterminated quoted field");
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_ids(const std::string& cell, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : cell) {
    const bool sep = c == ';' || c == ',' || c == '|' || std::isspace(static_cast<unsigned char>(c));
    if (sep && c != delim) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Phase phase_of(const std::string& raw) {
  const std::string p = upper(raw);
  if (p.find("INTRO") != std::string::npos) return Phase::Introduction;
  if (p.find("CONC") != std::string::npos) return Phase::Conclusion;
  return Phase::Argumentation;
}

}  // namespace

Debate convert_debate_sheet(std::string_view sheet, const std::string& debate_id, Stance winner,
                            ConversionReport& report) {
  const std::string_view header_line = sheet.substr(0, sheet.find('\n'));
  char delim = ',';
  if (header_line.find('\t') != std::string_view::npos) delim = '\t';
  else if (header_line.find(';') != std::string_view::npos) delim = ';';

  const auto rows = read_records(sheet, delim);
  if (rows.empty()) throw ParseError("sheet: missing header row");

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col.emplace(upper(trim(rows[0][i])), i);
  auto find_col = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* n : names)
      if (auto it = col.find(n); it != col.end()) return it->second;
    return std::nullopt;
  };
  const auto id_col = find_col({"ID"});
  const auto phase_col = find_col({"PHASE"});
  const auto text_col = find_col({"ADU_EN", "ADU_CAT", "ADU", "TEXT"});
  const auto stance_col = find_col({"STANCE"});
  if (!id_col || !text_col) throw ParseError("sheet: header needs ID and a text column (ADU_EN/ADU_CAT/ADU/TEXT)");
  const std::pair<RelationKind, std::optional<std::size_t>> rel_cols[] = {
      {RelationKind::Inference, find_col({"INFERENCE"})},
      {RelationKind::Conflict, find_col({"CONFLICT"})},
      {RelationKind::Rephrase, find_col({"REPHRASE"})},
  };

  auto cell = [](const std::vector<std::string>& row, std::optional<std::size_t> c) -> std::string {
    return c && *c < row.size() ? trim(row[*c]) : std::string();
  };

  Debate d;
  d.id = debate_id;
  d.winner = winner;
  std::vector<std::pair<std::string, std::pair<RelationKind, std::string>>> pending;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    Adu adu;
    adu.id = cell(row, id_col);
    if (adu.id.empty()) continue;
    adu.text = cell(row, text_col);
    adu.phase = phase_col ? phase_of(cell(row, phase_col)) : Phase::Argumentation;
    adu.debate_id = debate_id;
    const std::string stance = upper(stance_col ? cell(row, stance_col) : adu.id.substr(0, 1));
    if (stance.starts_with("F")) adu.stance = Stance::Favour;
    else if (stance.starts_with("A")) adu.stance = Stance::Against;
    else throw ValidationError("sheet row " + std::to_string(r + 1) + ": cannot infer stance of ADU '" + adu.id + "'");
    for (const auto& [kind, c] : rel_cols)
      for (auto& target : split_ids(cell(row, c), delim)) pending.push_back({adu.id, {kind, std::move(target)}});
    d.adus.push_back(std::move(adu));
  }

  std::set<std::tuple<std::string, std::string, RelationKind>> seen;
  for (auto& [source, rel] : pending) {
    auto& [kind, target] = rel;
    const std::string desc = source + " -" + std::string(to_code(kind)) + "-> " + target;
    if (source == target) {
      report.dropped.push_back(desc + " (self-relation)");
      continue;
    }
    const auto si = d.find_adu(source);
    const auto ti = d.find_adu(target);
    if (!ti) {
      report.dropped.push_back(desc + " (unknown target)");
      continue;
    }
    if (!seen.emplace(source, target, kind).second) continue;
    if (kind != RelationKind::Conflict && d.adus[*si].stance != d.adus[*ti].stance)
      report.cross_stance_links.push_back(desc);
    d.relations.push_back(Relation{source, target, kind});
  }
  validate_debate(d);
  return d;
}

}  // namespace arbiter
