#include "strips11/format.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace strips11 {

ParseError::ParseError(int line, int column, const std::string& what)
    : Error(fmt::format("{}:{}: {}", line, column, what)), line(line), column(column) {}

namespace {

struct Token {
  std::string_view text;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

int parse_int(const Token& tok, int line) {
  int value = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  if (!tok.text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(line, tok.column, "expected an integer, got '" + std::string(tok.text) + "'");
  }
  return value;
}

}  // namespace

Instance parse_instance(std::string_view text) {
  std::optional<int> n;
  std::optional<State> init;
  std::optional<State> goal;
  std::vector<std::pair<Literal, Literal>> actions;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    const std::string_view key = tokens[0].text;
    auto expect_args = [&](std::size_t count) {
      if (tokens.size() != count + 1) {
        throw ParseError(line_no, tokens[0].column,
                         fmt::format("'{}' takes {} argument(s)", key, count));
      }
    };
    auto read_state = [&](const Token& tok) {
      if (!n) throw ParseError(line_no, tok.column, "'vars' must precede states");
      State s;
      try {
        s = State::from_string(tok.text);
      } catch (const InvalidArgument& e) {
        throw ParseError(line_no, tok.column, e.what());
      }
      if (s.width() != *n) {
        throw ParseError(line_no, tok.column,
                         fmt::format("state has {} bits, expected {}", s.width(), *n));
      }
      return s;
    };
    auto read_literal = [&](const Token& tok) {
      const int v = parse_int(tok, line_no);
      if (v == 0 || v > *n || v < -*n) {
        throw ParseError(line_no, tok.column,
                         fmt::format("literal {} out of range for {} variables", v, *n));
      }
      return Literal::from_signed(v);
    };

    if (key == "vars") {
      expect_args(1);
      if (n) throw ParseError(line_no, tokens[0].column, "duplicate 'vars'");
      const int value = parse_int(tokens[1], line_no);
      if (value < 0 || value > kMaxVars) {
        throw ParseError(line_no, tokens[1].column, "vars must be in [0, 64]");
      }
      n = value;
    } else if (key == "init") {
      expect_args(1);
      if (init) throw ParseError(line_no, tokens[0].column, "duplicate 'init'");
      init = read_state(tokens[1]);
    } else if (key == "goal") {
      expect_args(1);
      if (goal) throw ParseError(line_no, tokens[0].column, "duplicate 'goal'");
      goal = read_state(tokens[1]);
    } else if (key == "action") {
      expect_args(2);
      if (!n) throw ParseError(line_no, tokens[0].column, "'vars' must precede actions");
      const Literal pre = read_literal(tokens[1]);
      const Literal eff = read_literal(tokens[2]);
      if (pre.var == eff.var) {
        throw ParseError(line_no, tokens[2].column,
                         "precondition and effect on the same variable");
      }
      actions.emplace_back(pre, eff);
    } else {
      throw ParseError(line_no, tokens[0].column, "unknown directive '" + std::string(key) + "'");
    }
  }
  if (!n) throw ParseError(line_no, 1, "missing 'vars'");
  if (!init) throw ParseError(line_no, 1, "missing 'init'");
  return make_instance(*n, actions, *init, goal);
}

std::string serialize_instance(const Instance& p) {
  std::string out = fmt::format("vars {}\ninit {}\n", p.n, p.init.to_string());
  if (p.goal) out += fmt::format("goal {}\n", p.goal->to_string());
  for (const Action& a : p.actions) {
    out += fmt::format("action {} {}\n", a.pre.to_signed(), a.eff.to_signed());
  }
  return out;
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << text;
  if (!out) throw std::ios_base::failure("write failed for " + path);
}

Instance load_instance(const std::string& path) { return parse_instance(load_text(path)); }

nlohmann::json plan_to_json(const Plan& plan, const Trace& trace) {
  nlohmann::json j;
  j["steps"] = plan.steps;
  if (!trace.states.empty()) {
    auto& arr = j["trace"] = nlohmann::json::array();
    for (const State& s : trace.states) arr.push_back(s.to_string());
  }
  return j;
}

Plan plan_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
    throw InvalidArgument("plan JSON needs a \"steps\" array");
  }
  Plan plan;
  for (const auto& v : j["steps"]) {
    if (!v.is_number_integer()) throw InvalidArgument("plan steps must be integers");
    plan.steps.push_back(v.get<int>());
  }
  return plan;
}

}  // namespace strips11
