#include "sponge/attack/config.hpp"

#include <cmath>
#include <string>

#include "sponge/error.hpp"

namespace sponge {

std::string_view norm_label(Norm norm) { return norm == Norm::l2 ? "l2" : "linf"; }

Norm parse_norm(std::string_view label) {
  if (label == "l2") return Norm::l2;
  if (label == "linf") return Norm::linf;
  throw ConfigError("unknown norm '" + std::string(label) + "' (expected l2 or linf)");
}

double AttackConfig::eps_for(Norm n) const {
  if (eps) return *eps;
  return n == Norm::l2 ? kDefaultEpsL2 : kDefaultEpsLinf;
}

void AttackConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (beam < 1) throw ConfigError("beam must be at least 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
  if (eps && (!(*eps > 0.0) || !std::isfinite(*eps))) throw ConfigError("eps must be positive");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("ratio must lie in (0, 1]");
  if (candidates_per_strategy < 1) throw ConfigError("candidates must be at least 1");
  if (target_y != 0.0 && target_y != 1.0) throw ConfigError("target_y must be 0 or 1");
}

}  // namespace sponge
