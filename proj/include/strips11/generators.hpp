#pragma once

#include <cstdint>
#include <optional>

#include "strips11/core.hpp"

namespace strips11 {

/// Scaling family P_n: chain actions <+(i-1),+i> for i in [1,n-1], then
/// <-(n-1),+0>, chain actions <-(i-1),-i>, <+(n-1),-0> and <-2,+0>.
/// The order gives the usual a_0..a_12 numbering for n = 6.
/// Starts at 0^n and has no goal. Requires n >= 4.
Instance gen_P(int n);

struct LengthPrediction {
  int n = 0;
  int k = 0;
  std::int64_t length = 0;
};

/// Closed-form eccentricity of P_n from 0^n: -3 + 5k + 2k^2 for n = 2k and
/// -4 + 7k + 2k^2 for n = 2k + 1. Requires n >= 6.
LengthPrediction predicted_length_P(int n);

/// Known eccentricities of P_n for n in [6, 16]; empty elsewhere.
std::optional<std::int64_t> known_length_P(int n);

/// (10)(11)(01)^{k-2} for n = 2k, (10)(111)(01)^{k-2} for n = 2k + 1.
State predicted_far_state(int n);

}  // namespace strips11
