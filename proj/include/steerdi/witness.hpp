#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "steerdi/behavior.hpp"
#include "steerdi/linalg.hpp"
#include "steerdi/quantum_model.hpp"

namespace steerdi {

inline constexpr double kSqrt3 = 1.7320508075688772;
inline constexpr double kTsirelson = 2.8284271247461903;  // 2*sqrt(2)

enum class WitnessKind { w_s, w_qrs, w_di, payoff, triple_bell, bowles };

inline const char* witness_kind_name(WitnessKind k) {
  switch (k) {
    case WitnessKind::w_s: return "W_S";
    case WitnessKind::w_qrs: return "W_QRS";
    case WitnessKind::w_di: return "W_DI";
    case WitnessKind::payoff: return "payoff";
    case WitnessKind::triple_bell: return "triple_bell";
    case WitnessKind::bowles: return "bowles";
  }
  return "?";
}

struct WitnessReport {
  WitnessKind kind;
  double value = 0;
  double threshold = 0;
  bool violated = false;
  std::optional<double> stderr_est;
};

inline WitnessReport make_report(WitnessKind kind, double value, double threshold,
                                 std::optional<double> se = std::nullopt) {
  return {kind, value, threshold, value > threshold, se};
}

/// The three CHSH lines of the self-testing block: Pauli pair (i,j), Bob's
/// observables y+ = (s_i+s_j)/sqrt2 and y- = (s_i-s_j)/sqrt2, Charlie settings
/// z=i and z=j. Line value = E_{y+,i} + E_{y-,i} + E_{y+,j} - E_{y-,j}.
struct ChshLine {
  int pauli_i, pauli_j;
  int y_plus, y_minus;
};
inline constexpr std::array<ChshLine, 3> kChshLines{{{1, 2, 1, 2}, {1, 3, 3, 4}, {2, 3, 5, 6}}};

namespace detail {
inline void require_two_qubit_density(const DenseOperator& rho, const char* who) {
  if (rho.dim() != 4) throw std::invalid_argument(std::string(who) + ": need a 4-dim operator");
  if (!rho.is_hermitian(1e-9)) throw std::invalid_argument(std::string(who) + ": not Hermitian");
}
inline int opt_sign(double corr) { return corr >= 0 ? 1 : -1; }  // ties toward +1
}  // namespace detail

/// Linear steering witness with three mutually unbiased settings:
/// W_S = sum_j |<s_j (x) s_j>| - sqrt(3), steerable iff > 0.
/// For werner(v) this is exactly 3v - sqrt(3).
inline WitnessReport w_s_three_pauli(const DenseOperator& rho_ab) {
  detail::require_two_qubit_density(rho_ab, "w_s_three_pauli");
  double value = -kSqrt3;
  for (int j = 1; j <= 3; ++j) {
    const double corr = real_trace_of_product(kron(pauli(j).matrix, pauli(j).matrix), rho_ab);
    value += detail::opt_sign(corr) * corr;
  }
  return make_report(WitnessKind::w_s, value, 0.0);
}

/// Quantum-refereed witness, evaluated through Bob's partial BSM contraction
/// against referee inputs tau^T_{b,j}; equals W_S/2 for qubit inputs. The
/// constant -sqrt(3) line enters through the identity observable decomposed
/// as two I/2 inputs with unit weights.
inline WitnessReport w_qrs(const DenseOperator& rho_ab) {
  detail::require_two_qubit_density(rho_ab, "w_qrs");
  const DenseOperator b1 = partial_bsm(2).elements[0];  // acts on B (x) B0
  const DenseOperator id2 = DenseOperator::identity(2);

  // P-side correlator for setting j: sum_b b * <A_j (x) B1>_{rho (x) tau^T}
  const auto contraction = [&](const DenseOperator& alice_obs, const DenseOperator& tau) {
    const DenseOperator op = kron(alice_obs, b1);  // A (x) B (x) B0
    const DenseOperator state = kron(rho_ab, tau.transpose());
    return real_trace_of_product(op, state);
  };

  double value = 0;
  for (int j = 1; j <= 3; ++j) {
    double corr = 0;
    for (int b = -1; b <= 1; b += 2) corr += b * contraction(pauli(j).matrix, tau_input(b, j));
    value += detail::opt_sign(corr) * corr;
  }
  for (int b = -1; b <= 1; b += 2) value += -kSqrt3 * contraction(id2, id2 * cplx(0.5, 0));
  return make_report(WitnessKind::w_qrs, value, 0.0);
}

/// Fully device-independent witness on the four-party construction
/// rho_AB (x) |Phi+_2><Phi+_2|_{B0 C}: Alice measures s_j, Bob answers the
/// partial BSM on B B0, Charlie measures eigenprojectors of his axis j.
/// Equals W_QRS/2 = W_S/4 for exact quantum inputs.
inline WitnessReport w_di(const DenseOperator& rho_ab) {
  detail::require_two_qubit_density(rho_ab, "w_di");
  const DenseOperator b1 = partial_bsm(2).elements[0];
  const DenseOperator id2 = DenseOperator::identity(2);
  const DenseOperator state = kron(rho_ab, bell_phi_plus(2).projector());  // A B B0 C

  const auto term = [&](const DenseOperator& alice_obs, const DenseOperator& charlie_op) {
    return real_trace_of_product(kron(kron(alice_obs, b1), charlie_op), state);
  };

  double value = 0;
  for (int j = 1; j <= 3; ++j) {
    double corr = 0;
    for (int c = -1; c <= 1; c += 2) corr += c * term(pauli(j).matrix, charlie_projector(c, j));
    value += detail::opt_sign(corr) * corr;
  }
  for (int c = -1; c <= 1; c += 2) value += -kSqrt3 * term(id2, id2 * cplx(0.5, 0));
  return make_report(WitnessKind::w_di, value, 0.0);
}

inline void require_fidelities(const std::array<double, 3>& f, const char* who) {
  for (double fj : f)
    if (!(fj >= 0.0 && fj <= 1.0)) throw std::invalid_argument(std::string(who) + ": fidelity outside [0,1]");
}

inline double self_test_penalty(const std::array<double, 3>& f) {
  double s = 0;
  for (double fj : f) s += std::sqrt(1.0 - fj);
  return s;
}

/// Experimental payoff: 4 * sum_j [ s_j K_j - Y_j/sqrt3 ] - sum_j sqrt(1-f_j),
/// where K_j = sum_{a,c} a c P(a,yes,c | x=z=j), Y_j = P(yes | x=z=j) and the
/// signs s_j optimize each measured correlator. Positive value certifies
/// steering device-independently. For an exact Werner behavior with
/// visibility v this evaluates to 3v - sqrt(3) - sum_j sqrt(1-f_j).
inline WitnessReport payoff_eq7(const Behavior& beh, const std::array<double, 3>& f) {
  require_fidelities(f, "payoff_eq7");
  double value = 0;
  for (int j = 1; j <= 3; ++j) {
    beh.require_steer(j, j);
    double corr = 0, yes = 0;
    for (int a = -1; a <= 1; a += 2)
      for (int c = -1; c <= 1; c += 2) {
        const double pv = beh.p(a, true, c, j, j);
        corr += a * c * pv;
        yes += pv;
      }
    value += 4.0 * (detail::opt_sign(corr) * corr - yes / kSqrt3);
  }
  value -= self_test_penalty(f);
  return make_report(WitnessKind::payoff, value, 0.0);
}

/// Noisy DI witness at the two scalings that appear in the derivation chain;
/// the canonical payoff above equals 4*W_DI - sum_j sqrt(1-f_j).
enum class NoisyScale { payoff_x4, main_text, quarter };
inline double noisy_w_di(double w_di_value, const std::array<double, 3>& f, NoisyScale scale) {
  require_fidelities(f, "noisy_w_di");
  switch (scale) {
    case NoisyScale::payoff_x4: return 4.0 * w_di_value - self_test_penalty(f);
    case NoisyScale::main_text: return w_di_value - self_test_penalty(f);
    case NoisyScale::quarter: return w_di_value - self_test_penalty(f) / 4.0;
  }
  throw std::invalid_argument("noisy_w_di: bad scale");
}

/// Least Werner visibility the noisy witness can certify:
/// v* = (sqrt3 + sum_j sqrt(1-f_j)) / 3. Ideal self-testing recovers 1/sqrt3.
inline double noisy_threshold(const std::array<double, 3>& f) {
  require_fidelities(f, "noisy_threshold");
  return (kSqrt3 + self_test_penalty(f)) / 3.0;
}

struct TripleBellResult {
  std::array<double, 3> lines{};          // B_12, B_13, B_23
  std::array<double, 3> line_se{};
  bool has_se = false;
  WitnessReport report;                   // value = sum of lines, threshold = 6
};

/// Sum of the three CHSH lines. Classical bound 2 per line; quantum cap
/// 6*sqrt(2) for the total (a cap, not the violation threshold).
inline TripleBellResult triple_bell(const Behavior& beh) {
  TripleBellResult res;
  double total = 0, var = 0;
  for (size_t k = 0; k < kChshLines.size(); ++k) {
    const auto& ln = kChshLines[k];
    const double value = beh.correlator(ln.y_plus, ln.pauli_i) + beh.correlator(ln.y_minus, ln.pauli_i) +
                         beh.correlator(ln.y_plus, ln.pauli_j) - beh.correlator(ln.y_minus, ln.pauli_j);
    res.lines[k] = value;
    total += value;
    if (beh.has_chsh_se) {
      double v = 0;
      v += beh.chsh_se[ln.y_plus - 1][ln.pauli_i - 1] * beh.chsh_se[ln.y_plus - 1][ln.pauli_i - 1];
      v += beh.chsh_se[ln.y_minus - 1][ln.pauli_i - 1] * beh.chsh_se[ln.y_minus - 1][ln.pauli_i - 1];
      v += beh.chsh_se[ln.y_plus - 1][ln.pauli_j - 1] * beh.chsh_se[ln.y_plus - 1][ln.pauli_j - 1];
      v += beh.chsh_se[ln.y_minus - 1][ln.pauli_j - 1] * beh.chsh_se[ln.y_minus - 1][ln.pauli_j - 1];
      res.line_se[k] = std::sqrt(v);
      var += v;
      res.has_se = true;
    }
  }
  res.report = make_report(WitnessKind::triple_bell, total, 6.0,
                           res.has_se ? std::optional<double>(std::sqrt(var)) : std::nullopt);
  return res;
}

/// Optimal CHSH value of werner(v): 2*sqrt(2)*v; violation iff v > 1/sqrt(2).
inline double chsh_of_werner(double v) {
  if (v < 0.0 || v > 1.0) throw std::invalid_argument("chsh_of_werner: visibility must be in [0,1]");
  return kTsirelson * v;
}

struct BowlesComparison {
  double lhs = 0;
  double rhs = 0;
  bool certified = false;
};

/// Device-independent entanglement-witness benchmark for Werner states:
/// I = ((1-3v) eta^2 + 2 eta (1-eta) + (1-eta)^2/4) / 16 must fall below
/// -12((2 sqrt(1-sqrt f) - 2 sqrt f + 2)^2 - 2 sqrt f + 2 sqrt(1-sqrt f) + 2).
/// Needs self-testing fidelity above ~0.99998 even at eta = 1, v = 0.7.
inline BowlesComparison bowles_comparison(double v, double eta, double f) {
  if (v < 0 || v > 1 || eta < 0 || eta > 1 || f < 0 || f > 1)
    throw std::invalid_argument("bowles_comparison: inputs must be in [0,1]");
  const double lhs = ((1 - 3 * v) * eta * eta + 2 * eta * (1 - eta) + 0.25 * (1 - eta) * (1 - eta)) / 16.0;
  const double root = std::sqrt(1.0 - std::sqrt(f));
  const double bracket = 2 * root - 2 * std::sqrt(f) + 2;
  const double rhs = -12.0 * (bracket * bracket - 2 * std::sqrt(f) + 2 * root + 2);
  return {lhs, rhs, lhs <= rhs};
}

/// Smallest average self-testing fidelity certifying Werner visibility v in
/// the Bowles witness (eta fixed), by bisection on 1-f.
inline double bowles_minimal_fidelity(double v, double eta) {
  double lo = 0.0, hi = 1.0;  // lo: not certifying, hi: certifying (f=1)
  if (!bowles_comparison(v, eta, 1.0).certified) return 2.0;  // nothing certifiable
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bowles_comparison(v, eta, mid).certified)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace steerdi
