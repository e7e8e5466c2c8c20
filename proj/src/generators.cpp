#include "strips11/generators.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace strips11 {

Instance gen_P(int n) {
  if (n < 4) throw InvalidArgument("gen_P requires n >= 4");
  if (n > kMaxVars) throw InvalidArgument("gen_P requires n <= 64");
  std::vector<std::pair<Literal, Literal>> actions;
  auto add = [&actions](Literal pre, Literal eff) {
    const std::pair<Literal, Literal> a{pre, eff};
    if (std::ranges::find(actions, a) == actions.end()) actions.push_back(a);
  };
  for (int i = 1; i < n; ++i) add(Literal::pos(i - 1), Literal::pos(i));
  add(Literal::neg(n - 1), Literal::pos(0));
  for (int i = 1; i < n; ++i) add(Literal::neg(i - 1), Literal::neg(i));
  add(Literal::pos(n - 1), Literal::neg(0));
  add(Literal::neg(2), Literal::pos(0));
  return make_instance(n, actions, State::zeros(n));
}

LengthPrediction predicted_length_P(int n) {
  if (n < 6) throw InvalidArgument("predicted_length_P requires n >= 6");
  LengthPrediction out;
  out.n = n;
  out.k = n / 2;
  const std::int64_t k = out.k;
  out.length = n % 2 == 0 ? -3 + 5 * k + 2 * k * k : -4 + 7 * k + 2 * k * k;
  return out;
}

State predicted_far_state(int n) {
  if (n < 6) throw InvalidArgument("predicted_far_state requires n >= 6");
  if (n > kMaxVars) throw InvalidArgument("predicted_far_state requires n <= 64");
  const int k = n / 2;
  std::string bits = n % 2 == 0 ? "1011" : "10111";
  for (int i = 0; i < k - 2; ++i) bits += "01";
  return State::from_string(bits);
}

std::optional<std::int64_t> known_length_P(int n) {
  static constexpr std::array<std::int64_t, 11> kRow{30, 35, 49, 56, 72, 81, 99, 110, 130, 143, 165};
  if (n < 6 || n > 16) return std::nullopt;
  return kRow[static_cast<std::size_t>(n - 6)];
}

}  // namespace strips11
