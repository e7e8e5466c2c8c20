#pragma once

// Text format for instances and JSON form for plans.
//
//   # comment
//   vars 6
//   init 000000
//   goal 101101        (optional)
//   action -6 1        (signed 1-based literals: pre, eff)

#include <string>
#include <string_view>

#include <json.hpp>

#include "strips11/core.hpp"

namespace strips11 {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line;
  int column;
};

Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& p);

Instance load_instance(const std::string& path);
void save_text(const std::string& path, std::string_view text);
std::string load_text(const std::string& path);

/// {"steps": [ids], "trace": ["bits", ...]}; the trace is omitted when empty.
nlohmann::json plan_to_json(const Plan& plan, const Trace& trace);
/// Reads "steps"; "trace", when present, is ignored.
Plan plan_from_json(const nlohmann::json& j);

}  // namespace strips11
