#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace terracelab {

// Minimal TOML subset: [table] / [dotted.table] headers, key = value lines,
// comments, and scalar values (string, bool, integer, float) plus flat
// arrays.  Keys come back as dotted paths, which keeps unknown-key rejection
// a set lookup.
struct TomlValue {
  enum class Type { string, boolean, integer, floating, array };
  Type type = Type::string;
  std::string s;
  bool b = false;
  long long i = 0;
  double f = 0.0;
  std::vector<TomlValue> arr;

  double as_number() const;
  std::string repr() const;  // canonical text used for hashing
};

using TomlTable = std::map<std::string, TomlValue>;

struct TomlParseError : std::runtime_error {
  TomlParseError(int line, const std::string& msg)
      : std::runtime_error("TOML parse error at line " + std::to_string(line) +
                           ": " + msg),
        line_no(line) {}
  int line_no;
};

TomlTable toml_parse(const std::string& text);

}  // namespace terracelab
