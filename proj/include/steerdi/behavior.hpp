#pragma once

#include <array>
#include <stdexcept>

#include "steerdi/linalg.hpp"

namespace steerdi {

/// Outcome-index helpers: outcomes +1/-1 map to slots 0/1, Bob's yes/no to 0/1.
inline int outcome_slot(int a) {
  if (a == 1) return 0;
  if (a == -1) return 1;
  throw std::invalid_argument("outcome must be +1 or -1");
}
inline int slot_outcome(int slot) { return slot == 0 ? 1 : -1; }

/// Joint statistics of the three-party protocol.
///
/// Steering block: P(a, bob, c | x, z) for Alice setting x, Charlie setting z
/// (both 1..3), Alice/Charlie outcomes +/-1 and Bob's binary yes/no answer.
/// Self-testing block: correlators E_{y,z} for Bob's six observables against
/// Charlie's three settings; only the 12 cells used by the three CHSH lines
/// need to be present.
struct Behavior {
  // [x-1][z-1][a slot][bob slot (0=yes)][c slot]
  std::array<std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 3>, 3> steer{};
  std::array<std::array<bool, 3>, 3> has_steer{};
  std::array<std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 3>, 3> steer_se{};
  bool has_steer_se = false;

  std::array<std::array<double, 3>, 6> chsh_e{};    // [y-1][z-1]
  std::array<std::array<double, 3>, 6> chsh_se{};
  std::array<std::array<bool, 3>, 6> has_chsh{};
  bool has_chsh_se = false;

  double p(int a, bool yes, int c, int x, int z) const {
    require_steer(x, z);
    return steer[x - 1][z - 1][static_cast<size_t>(outcome_slot(a))][yes ? 0 : 1]
                [static_cast<size_t>(outcome_slot(c))];
  }

  /// Alice-Charlie joint with Bob's answer marginalized out.
  double p_ac(int a, int c, int x, int z) const {
    return p(a, true, c, x, z) + p(a, false, c, x, z);
  }

  double correlator(int y, int z) const {
    if (y < 1 || y > 6 || z < 1 || z > 3) throw std::invalid_argument("correlator: setting out of range");
    if (!has_chsh[y - 1][z - 1]) throw std::invalid_argument("correlator: cell (y,z) missing");
    return chsh_e[y - 1][z - 1];
  }

  void require_steer(int x, int z) const {
    if (x < 1 || x > 3 || z < 1 || z > 3) throw std::invalid_argument("steering setting out of range");
    if (!has_steer[x - 1][z - 1]) throw std::invalid_argument("steering cell (x,z) missing");
  }

  /// Distribution sanity: conditionals normalized, probabilities in range,
  /// correlators bounded.
  void validate(double norm_eps = 1e-9) const {
    for (int x = 0; x < 3; ++x)
      for (int z = 0; z < 3; ++z) {
        if (!has_steer[x][z]) continue;
        double sum = 0;
        for (const auto& pa : steer[x][z])
          for (const auto& pb : pa)
            for (double v : pb) {
              if (v < -1e-12 || v > 1 + 1e-12) throw std::invalid_argument("probability out of range");
              sum += v;
            }
        if (std::abs(sum - 1.0) > norm_eps) throw std::invalid_argument("conditional not normalized");
      }
    for (int y = 0; y < 6; ++y)
      for (int z = 0; z < 3; ++z)
        if (has_chsh[y][z] && std::abs(chsh_e[y][z]) > 1 + 1e-9)
          throw std::invalid_argument("correlator out of [-1,1]");
  }
};

}  // namespace steerdi
