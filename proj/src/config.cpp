#include "varicart/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "varicart/common.hpp"

namespace varicart {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v, int line_no) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') return v;
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    char c = v[i];
    if (c == '\\') {
      if (i + 2 >= v.size()) throw ConfigError("line " + std::to_string(line_no) + ": dangling escape");
      char n = v[++i];
      switch (n) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: throw ConfigError("line " + std::to_string(line_no) + ": unknown escape");
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& inner) {
  std::vector<std::string> items;
  std::string cur;
  bool in_quotes = false;
  for (char c : inner) {
    if (c == '"') in_quotes = !in_quotes;
    if (c == ',' && !in_quotes) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) items.push_back(trim(cur));
  return items;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
      std::string joined;
      for (const auto& item : split_list(value.substr(1, value.size() - 2))) {
        if (!joined.empty()) joined.push_back('\x1f');
        joined += unquote(item, line_no);
      }
      cfg.values_[key] = joined;
    } else {
      cfg.values_[key] = unquote(value, line_no);
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

std::optional<std::int64_t> KeyValueConfig::get_int(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || p != s->data() + s->size()) throw ConfigError(key + ": not an integer: '" + *s + "'");
  return v;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  double v = 0;
  auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || p != s->data() + s->size()) throw ConfigError(key + ": not a number: '" + *s + "'");
  return v;
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  if (*s == "true" || *s == "1" || *s == "yes") return true;
  if (*s == "false" || *s == "0" || *s == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + *s + "'");
}

std::optional<std::vector<std::string>> KeyValueConfig::get_list(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::vector<std::string> out;
  if (s->empty()) return out;
  std::string cur;
  for (char c : *s) {
    if (c == '\x1f' || c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<std::vector<std::int64_t>> KeyValueConfig::get_int_list(const std::string& key) const {
  auto items = get_list(key);
  if (!items) return std::nullopt;
  std::vector<std::int64_t> out;
  for (const auto& s : *items) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key + ": not an integer: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

void KeyValueConfig::merge(const KeyValueConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::vector<std::string> KeyValueConfig::unused_keys(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (k.rfind(prefix, 0) == 0 && !used_.count(k)) out.push_back(k);
  return out;
}

}  // namespace varicart
