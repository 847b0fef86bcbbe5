#include "arbiter/kv_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "arbiter/error.hpp"

namespace arbiter {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
    return v.substr(1, v.size() - 2);
  return v;
}

// Drops a trailing `# comment` that is outside quotes.
std::string strip_comment(const std::string& line) {
  bool in_quotes = false;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == quote) in_quotes = false;
    } else if (c == '"' || c == '\'') {
      in_quotes = true;
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

KvConfig KvConfig::parse(std::string_view text) {
  KvConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']') {
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.contains(key))
      throw ParseError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.values_[key] = unquote(trim(std::string_view(body).substr(eq + 1)));
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  double out = 0.0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size())
    throw ValidationError("config key '" + key + "': '" + *v + "' is not a number");
  return out;
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size())
    throw ValidationError("config key '" + key + "': '" + *v + "' is not an integer");
  return out;
}

std::uint64_t KvConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size())
    throw ValidationError("config key '" + key + "': '" + *v + "' is not a non-negative integer");
  return out;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("config key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<std::string> KvConfig::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::string s = *v;
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void KvConfig::reject_unknown(const std::set<std::string>& known) const {
  for (const auto& [k, v] : values_)
    if (!known.contains(k)) throw ValidationError("unknown config key '" + k + "'");
}

}  // namespace arbiter
