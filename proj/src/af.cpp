#include "arbiter/af.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "arbiter/error.hpp"

namespace arbiter {

ArgumentationFramework::ArgumentationFramework(std::string debate_id,
                                               std::vector<AbstractArgument> arguments,
                                               std::set<std::pair<ArgId, ArgId>> attacks)
    : debate_id_(std::move(debate_id)), arguments_(std::move(arguments)), attacks_(std::move(attacks)) {
  const std::size_t n = arguments_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (arguments_[i].id != i)
      throw ValidationError("argument ids must be dense and ordered (got " +
                            std::to_string(arguments_[i].id) + " at position " + std::to_string(i) + ")");
    if (arguments_[i].name.empty()) arguments_[i].name = "a" + std::to_string(i);
  }
  attackers_.assign(n, {});
  attacked_.assign(n, {});
  matrix_.assign(n, std::vector<bool>(n, false));
  for (const auto& [from, to] : attacks_) {
    if (from >= n || to >= n)
      throw ValidationError("attack (" + std::to_string(from) + "," + std::to_string(to) +
                            ") references an unknown argument");
    attackers_[to].push_back(from);
    attacked_[from].push_back(to);
    matrix_[from][to] = true;
  }
}

ArgumentationFramework ArgumentationFramework::with_size(
    std::size_t n, const std::vector<std::pair<ArgId, ArgId>>& attacks) {
  std::vector<AbstractArgument> args(n);
  for (std::size_t i = 0; i < n; ++i) {
    args[i].id = static_cast<ArgId>(i);
    args[i].name = "a" + std::to_string(i);
    args[i].adu_ids = {args[i].name};
  }
  return ArgumentationFramework("", std::move(args), {attacks.begin(), attacks.end()});
}

bool ArgumentationFramework::attacks(ArgId from, ArgId to) const {
  if (from >= size() || to >= size()) return false;
  return matrix_[from][to];
}

std::string sanitize_apx_name(std::string_view name) {
  std::string out;
  for (unsigned char c : name)
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  if (out.empty()) out = "x";
  return out;
}

std::string export_apx(const ArgumentationFramework& af) {
  // Sanitizing can merge distinct names; later duplicates get a numeric suffix.
  std::vector<std::string> names(af.size());
  std::set<std::string> used;
  for (const auto& arg : af.arguments()) {
    std::string base = sanitize_apx_name(arg.name);
    std::string candidate = base;
    for (int k = 1; used.contains(candidate); ++k) candidate = base + "x" + std::to_string(k);
    used.insert(candidate);
    names[arg.id] = candidate;
  }
  std::vector<std::string> lines;
  lines.reserve(af.size() + af.attacks().size());
  for (const auto& n : names) lines.push_back("arg(" + n + ").");
  for (const auto& [from, to] : af.attacks())
    lines.push_back("att(" + names[from] + "," + names[to] + ").");
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

namespace {

std::string strip(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

ArgumentationFramework parse_apx(std::string_view text) {
  std::set<std::string> arg_names;
  std::vector<std::pair<std::string, std::string>> raw_attacks;

  // Facts end with '.', may span lines, and several may share a line.
  std::string stripped;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (auto pct = line.find('%'); pct != std::string::npos) line.erase(pct);
      stripped += line;
      stripped += ' ';
    }
  }
  std::size_t pos = 0;
  int fact_no = 0;
  while (true) {
    const std::size_t dot = stripped.find('.', pos);
    std::string fact = strip(stripped.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos));
    if (dot == std::string::npos) {
      if (!fact.empty()) throw ParseError("APX: unterminated fact '" + fact + "'");
      break;
    }
    pos = dot + 1;
    ++fact_no;
    const auto open = fact.find('(');
    if (open == std::string::npos || fact.back() != ')')
      throw ParseError("APX fact " + std::to_string(fact_no) + ": expected pred(...), got '" + fact + "'");
    const std::string pred = strip(fact.substr(0, open));
    const std::string body = fact.substr(open + 1, fact.size() - open - 2);
    if (pred == "arg") {
      std::string name = strip(body);
      if (name.empty() || name.find(',') != std::string::npos)
        throw ParseError("APX fact " + std::to_string(fact_no) + ": bad argument name '" + body + "'");
      arg_names.insert(name);
    } else if (pred == "att") {
      const auto comma = body.find(',');
      if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos)
        throw ParseError("APX fact " + std::to_string(fact_no) + ": att needs two arguments");
      std::string a = strip(body.substr(0, comma));
      std::string b = strip(body.substr(comma + 1));
      if (a.empty() || b.empty())
        throw ParseError("APX fact " + std::to_string(fact_no) + ": empty attack endpoint");
      raw_attacks.emplace_back(std::move(a), std::move(b));
    } else {
      throw ParseError("APX fact " + std::to_string(fact_no) + ": unknown predicate '" + pred + "'");
    }
  }

  std::map<std::string, ArgId> index;
  std::vector<AbstractArgument> args;
  for (const auto& name : arg_names) {
    const auto id = static_cast<ArgId>(args.size());
    index[name] = id;
    args.push_back(AbstractArgument{id, {name}, Stance::Favour, name});
  }
  std::set<std::pair<ArgId, ArgId>> attacks;
  for (const auto& [a, b] : raw_attacks) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end()) throw ValidationError("APX: attack from undeclared argument '" + a + "'");
    if (ib == index.end()) throw ValidationError("APX: attack on undeclared argument '" + b + "'");
    attacks.emplace(ia->second, ib->second);
  }
  return ArgumentationFramework("", std::move(args), std::move(attacks));
}

}  // namespace arbiter
