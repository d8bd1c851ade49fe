#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace sponge {

enum class Norm { l2, linf };

std::string_view norm_label(Norm norm);  // "l2" / "linf"
Norm parse_norm(std::string_view label);

struct AttackConfig {
  int iterations = 100;
  int beam = 3;
  double alpha = 0.1;
  // Unset means the per-norm default below.
  std::optional<double> eps;
  Norm norm = Norm::l2;
  double ratio = 0.05;
  int candidates_per_strategy = 100;
  double target_y = 0.0;
  std::uint64_t seed = 0;

  static constexpr double kDefaultEpsL2 = 2.0;
  static constexpr double kDefaultEpsLinf = 0.5;

  double eps_for(Norm n) const;
  // Throws ConfigError naming the first violated invariant.
  void validate() const;
};

}  // namespace sponge
