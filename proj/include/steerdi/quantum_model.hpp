#pragma once

#include <string>
#include <utility>
#include <vector>

#include "steerdi/linalg.hpp"

namespace steerdi {

/// A labeled Hermitian observable; dichotomic ones square to the identity.
struct Observable {
  DenseOperator matrix;
  std::string label;
};

/// POVM with per-element outcome labels. Elements must be PSD and sum to I.
struct Povm {
  std::vector<DenseOperator> elements;
  std::vector<std::string> outcomes;

  bool is_valid(double eps = tol::spectral) const {
    if (elements.empty()) return false;
    DenseOperator sum = DenseOperator::zero(elements.front().dim());
    for (const auto& e : elements) {
      if (!e.is_hermitian(eps)) return false;
      if (min_eigenvalue(e) < -eps) return false;
      sum += e;
    }
    return sum.max_abs_diff(DenseOperator::identity(sum.dim())) < eps;
  }
};

inline DenseOperator pauli_x() {
  DenseOperator m(2);
  m(0, 1) = 1;
  m(1, 0) = 1;
  return m;
}
inline DenseOperator pauli_y() {
  DenseOperator m(2);
  m(0, 1) = cplx(0, -1);
  m(1, 0) = cplx(0, 1);
  return m;
}
inline DenseOperator pauli_z() {
  DenseOperator m(2);
  m(0, 0) = 1;
  m(1, 1) = -1;
  return m;
}

/// pauli(1..3) -> sigma_x, sigma_y, sigma_z.
inline Observable pauli(int j) {
  switch (j) {
    case 1: return {pauli_x(), "sx"};
    case 2: return {pauli_y(), "sy"};
    case 3: return {pauli_z(), "sz"};
    default: throw std::invalid_argument("pauli: index must be in 1..3");
  }
}

/// Maximally entangled |Phi+_d> = sum_j |jj> / sqrt(d).
inline Ket bell_phi_plus(int d = 2) {
  if (d < 2) throw std::invalid_argument("bell_phi_plus: d must be >= 2");
  std::vector<cplx> amp(static_cast<size_t>(d) * d, cplx{});
  for (int j = 0; j < d; ++j) amp[static_cast<size_t>(j) * d + j] = 1.0;
  return Ket(std::move(amp));
}

/// Singlet |Psi-_2> = (|01> - |10>)/sqrt(2).
inline Ket bell_psi_minus() {
  std::vector<cplx> amp(4, cplx{});
  amp[1] = 1.0;
  amp[2] = -1.0;
  return Ket(std::move(amp));
}

/// Werner family v|Psi-><Psi-| + (1-v) I/4.
inline DenseOperator werner(double v) {
  if (v < 0.0 || v > 1.0) throw std::invalid_argument("werner: visibility must be in [0,1]");
  DenseOperator rho = bell_psi_minus().projector() * cplx(v, 0);
  rho += DenseOperator::identity(4) * cplx((1.0 - v) / 4.0, 0);
  return rho;
}

/// Depolarized |Phi+_2> with visibility w.
inline DenseOperator depolarized_phi_plus(double w) {
  if (w < 0.0 || w > 1.0) throw std::invalid_argument("depolarized_phi_plus: visibility must be in [0,1]");
  DenseOperator rho = bell_phi_plus(2).projector() * cplx(w, 0);
  rho += DenseOperator::identity(4) * cplx((1.0 - w) / 4.0, 0);
  return rho;
}

/// Referee input state tau_{b,j} = (I + b sigma_j)/2, a rank-1 projector.
inline DenseOperator tau_input(int b, int j) {
  if (b != 1 && b != -1) throw std::invalid_argument("tau_input: outcome must be +1 or -1");
  DenseOperator m = DenseOperator::identity(2);
  m += pauli(j).matrix * cplx(static_cast<double>(b), 0);
  return m * cplx(0.5, 0);
}

/// The pair ((sigma_i+sigma_j)/sqrt2, (sigma_i-sigma_j)/sqrt2) for i<j; both
/// dichotomic and mutually anticommuting.
inline std::pair<Observable, Observable> bob_chsh_observables(int i, int j) {
  if (!(i >= 1 && i <= 3 && j >= 1 && j <= 3 && i < j))
    throw std::invalid_argument("bob_chsh_observables: need 1 <= i < j <= 3");
  const double inv = 1.0 / std::sqrt(2.0);
  DenseOperator plus = (pauli(i).matrix + pauli(j).matrix) * cplx(inv, 0);
  DenseOperator minus = (pauli(i).matrix - pauli(j).matrix) * cplx(inv, 0);
  const std::string si = pauli(i).label, sj = pauli(j).label;
  return {{std::move(plus), "(" + si + "+" + sj + ")/sqrt2"},
          {std::move(minus), "(" + si + "-" + sj + ")/sqrt2"}};
}

/// Partial Bell state measurement {B1, I-B1} with B1 = |Phi+_d><Phi+_d|;
/// element 0 is the "yes" outcome.
inline Povm partial_bsm(int d = 2) {
  if (d < 2) throw std::invalid_argument("partial_bsm: d must be >= 2");
  DenseOperator b1 = bell_phi_plus(d).projector();
  DenseOperator rest = DenseOperator::identity(d * d) - b1;
  Povm p;
  p.elements = {std::move(b1), std::move(rest)};
  p.outcomes = {"yes", "no"};
  return p;
}

// ---------------------------------------------------------------------------
// Wave-plate calculus. Light traverses the QWP first, then the HWP, then an
// H/V analyzer, so the measured observable is U^dag sigma_z U with
// U = HWP(th_h) * QWP(th_q). Global phases are irrelevant under conjugation.
// With this convention the polarization Y axis comes out as -sigma_y, a
// global sign shared by every Y-bearing setting.
// ---------------------------------------------------------------------------

struct WaveplateSetting {
  double qwp_deg = 0.0;
  double hwp_deg = 0.0;
};

inline DenseOperator rotation2(double theta_rad) {
  DenseOperator r(2);
  r(0, 0) = std::cos(theta_rad);
  r(0, 1) = -std::sin(theta_rad);
  r(1, 0) = std::sin(theta_rad);
  r(1, 1) = std::cos(theta_rad);
  return r;
}

/// HWP Jones matrix at angle theta (degrees): [[cos2t, sin2t],[sin2t, -cos2t]].
inline DenseOperator hwp_jones(double theta_deg) {
  const double t = theta_deg * M_PI / 180.0;
  DenseOperator m(2);
  m(0, 0) = std::cos(2 * t);
  m(0, 1) = std::sin(2 * t);
  m(1, 0) = std::sin(2 * t);
  m(1, 1) = -std::cos(2 * t);
  return m;
}

/// QWP Jones matrix at angle theta (degrees): R(t) diag(1, i) R(-t).
inline DenseOperator qwp_jones(double theta_deg) {
  const double t = theta_deg * M_PI / 180.0;
  DenseOperator d(2);
  d(0, 0) = 1.0;
  d(1, 1) = cplx(0, 1);
  return rotation2(t) * d * rotation2(-t);
}

inline Observable waveplate_observable(const WaveplateSetting& s) {
  DenseOperator u = hwp_jones(s.hwp_deg) * qwp_jones(s.qwp_deg);
  DenseOperator obs = u.adjoint() * pauli_z() * u;
  // scrub numerical anti-Hermitian dust
  DenseOperator h = (obs + obs.adjoint()) * cplx(0.5, 0);
  return {std::move(h), "qwp" + std::to_string(s.qwp_deg) + "/hwp" + std::to_string(s.hwp_deg)};
}

/// Charlie's measurement axes in the frame fixed by the wave-plate table:
/// (sigma_x, -sigma_y, sigma_z). This is the unique axis assignment for which
/// each self-testing CHSH line reaches 2*sqrt(2) on |Phi+_2> with Bob's
/// (sigma_i +/- sigma_j)/sqrt2 pairs.
inline DenseOperator charlie_axis(int z) {
  switch (z) {
    case 1: return pauli_x();
    case 2: return pauli_y() * cplx(-1, 0);
    case 3: return pauli_z();
    default: throw std::invalid_argument("charlie_axis: index must be in 1..3");
  }
}

/// Projector (I + c * axis)/2 onto Charlie's outcome c for setting z.
inline DenseOperator charlie_projector(int c, int z) {
  if (c != 1 && c != -1) throw std::invalid_argument("charlie_projector: outcome must be +1 or -1");
  DenseOperator m = DenseOperator::identity(2);
  m += charlie_axis(z) * cplx(static_cast<double>(c), 0);
  return m * cplx(0.5, 0);
}

/// Bob's six self-testing observables, indexed y = 1..6 in the order
/// (1,2)+, (1,2)-, (1,3)+, (1,3)-, (2,3)+, (2,3)-.
inline Observable bob_selftest_observable(int y) {
  switch (y) {
    case 1: return bob_chsh_observables(1, 2).first;
    case 2: return bob_chsh_observables(1, 2).second;
    case 3: return bob_chsh_observables(1, 3).first;
    case 4: return bob_chsh_observables(1, 3).second;
    case 5: return bob_chsh_observables(2, 3).first;
    case 6: return bob_chsh_observables(2, 3).second;
    default: throw std::invalid_argument("bob_selftest_observable: index must be in 1..6");
  }
}

}  // namespace steerdi
