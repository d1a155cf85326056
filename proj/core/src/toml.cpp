#include "terracelab/toml.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace terracelab {

double TomlValue::as_number() const {
  if (type == Type::integer) return static_cast<double>(i);
  if (type == Type::floating) return f;
  throw std::runtime_error("TOML value is not a number");
}

std::string TomlValue::repr() const {
  switch (type) {
    case Type::string: return "\"" + s + "\"";
    case Type::boolean: return b ? "true" : "false";
    case Type::integer: return std::to_string(i);
    case Type::floating: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", f);
      return buf;
    }
    case Type::array: {
      std::string out = "[";
      for (size_t k = 0; k < arr.size(); ++k) {
        if (k) out += ",";
        out += arr[k].repr();
      }
      return out + "]";
    }
  }
  return "";
}

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.')
      return false;
  return true;
}

TomlValue parse_scalar(const std::string& text, int line) {
  TomlValue v;
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    v.type = TomlValue::Type::string;
    v.s = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.type = TomlValue::Type::boolean;
    v.b = text == "true";
    return v;
  }
  // Integer first, then float.
  {
    std::size_t pos = 0;
    try {
      const long long i = std::stoll(text, &pos);
      if (pos == text.size()) {
        v.type = TomlValue::Type::integer;
        v.i = i;
        return v;
      }
    } catch (...) {
    }
  }
  {
    std::size_t pos = 0;
    try {
      const double f = std::stod(text, &pos);
      if (pos == text.size()) {
        v.type = TomlValue::Type::floating;
        v.f = f;
        return v;
      }
    } catch (...) {
    }
  }
  throw TomlParseError(line, "cannot parse value: '" + text + "'");
}

TomlValue parse_value(const std::string& text, int line) {
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']')
      throw TomlParseError(line, "unterminated array");
    TomlValue v;
    v.type = TomlValue::Type::array;
    std::string body = text.substr(1, text.size() - 2);
    std::string item;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        const std::string it = strip(item);
        if (!it.empty()) v.arr.push_back(parse_scalar(it, line));
        item.clear();
      } else {
        item += c;
      }
    }
    const std::string it = strip(item);
    if (!it.empty()) v.arr.push_back(parse_scalar(it, line));
    return v;
  }
  return parse_scalar(text, line);
}

}  // namespace

TomlTable toml_parse(const std::string& text) {
  TomlTable table;
  std::istringstream in(text);
  std::string raw;
  std::string prefix;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw TomlParseError(line_no, "unterminated table header");
      prefix = strip(line.substr(1, line.size() - 2));
      if (!valid_key(prefix))
        throw TomlParseError(line_no, "bad table name: '" + prefix + "'");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw TomlParseError(line_no, "expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (!valid_key(key))
      throw TomlParseError(line_no, "bad key: '" + key + "'");
    if (val.empty()) throw TomlParseError(line_no, "missing value");
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (table.count(full))
      throw TomlParseError(line_no, "duplicate key: " + full);
    table[full] = parse_value(val, line_no);
  }
  return table;
}

}  // namespace terracelab
