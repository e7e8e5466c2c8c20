#pragma once

// Compilation of instances to conservative 1-safe Petri nets.
//
// Place numbering follows Literal::node: place v is the negative literal of
// variable v and place n + v the positive one. Transition t belongs to
// action t and has I(t) = {pre, not eff}, O(t) = {pre, eff}.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strips11/core.hpp"

namespace strips11 {

struct PetriNet {
  struct Transition {
    std::string name;
    int action = -1;
    std::vector<int> input;   // bag: repeated places count repeatedly
    std::vector<int> output;
  };
  std::vector<std::string> places;
  std::vector<Transition> transitions;

  int place_count() const { return static_cast<int>(places.size()); }
};

struct Marking {
  std::vector<std::uint32_t> tokens;

  std::uint64_t total() const;
  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;
};

struct CompiledPetri {
  PetriNet net;
  Marking initial;
  Marking goal;
};

class NotEnabled : public Error {
 public:
  using Error::Error;
};

class SafetyViolation : public Error {
 public:
  using Error::Error;
};

Marking marking_of(const State& s);
/// Inverse of marking_of; empty when the marking is not one token per
/// variable.
std::optional<State> state_of(const Marking& m, int n);

CompiledPetri compile_petri(const Instance& p);

bool enabled(const PetriNet& net, const Marking& m, int t);
Marking fire(const PetriNet& net, const Marking& m, int t);

/// Breadth-first reachability with the depth of every marking. Throws
/// SafetyViolation on a marking with more than one token in a place and
/// CapExceeded after `limit` markings.
std::map<Marking, std::uint32_t> petri_reach(const PetriNet& net, const Marking& initial,
                                             std::size_t limit = std::size_t{1} << 22);

bool check_safe(const PetriNet& net, const Marking& initial,
                std::size_t limit = std::size_t{1} << 22);
bool check_conservative(const PetriNet& net, const Marking& initial,
                        std::size_t limit = std::size_t{1} << 22);

struct CrossValidation {
  bool ok = false;
  std::uint32_t depths = 0;  // number of BFS layers compared
  std::string mismatch;      // first difference, if any
};

/// Compares depth-indexed reachable sets of the state graph and of the
/// compiled net under the state <-> marking bijection. Requires n <= 12.
CrossValidation cross_validate(const Instance& p);

nlohmann::json petri_to_json(const PetriNet& net, const Marking& initial,
                             const std::optional<Marking>& goal);
CompiledPetri petri_from_json(const nlohmann::json& j);

}  // namespace strips11
