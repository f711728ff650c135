#pragma once

#include <array>

#include "steerdi/linalg.hpp"
#include "steerdi/quantum_model.hpp"

namespace steerdi {

namespace swap_detail {

inline void require_dichotomic(const DenseOperator& o, const char* who) {
  if (o.dim() != 2) throw std::invalid_argument(std::string(who) + ": observable must act on a qubit");
  if (!o.is_hermitian(1e-9)) throw std::invalid_argument(std::string(who) + ": observable not Hermitian");
  if ((o * o).max_abs_diff(DenseOperator::identity(2)) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": observable must square to the identity");
}

// gadget factor (I+Z)^{1-m} (X - ZX)^m (I+Z)^{1-n} (X - XZ)^n
inline DenseOperator gadget(const DenseOperator& x, const DenseOperator& z, int m, int n) {
  const DenseOperator id = DenseOperator::identity(2);
  const DenseOperator ipz = id + z;
  const DenseOperator left = (m == 0) ? ipz : (x - z * x);
  const DenseOperator right = (n == 0) ? ipz : (x - x * z);
  return left * right;
}

}  // namespace swap_detail

/// State left on the trusted ancilla pair by the swap isometry built from the
/// untrusted operators (Xb, Zb) and (Xc, Zc), applied after Charlie's
/// measurement operator m_j acted on his side of rho_BC:
///   rho_data = (1/16) sum_{mnkl} C_{mnkl} |m><n| (x) |k><l|,
///   C_{mnkl} = Tr[ Fb(m,n) (x) Fc(k,l) * (I (x) m_j) rho (I (x) m_j) ].
/// With ideal operators on |Phi+_2> this returns sigma_j^{C'} |Phi+><Phi+| sigma_j^{C'}.
inline DenseOperator swap_rho_data(const DenseOperator& rho_bc, const DenseOperator& xb,
                                   const DenseOperator& zb, const DenseOperator& xc,
                                   const DenseOperator& zc, const DenseOperator& mj) {
  if (rho_bc.dim() != 4) throw std::invalid_argument("swap_rho_data: need a two-qubit state");
  if (!rho_bc.is_hermitian(1e-9)) throw std::invalid_argument("swap_rho_data: state not Hermitian");
  swap_detail::require_dichotomic(xb, "swap_rho_data(Xb)");
  swap_detail::require_dichotomic(zb, "swap_rho_data(Zb)");
  swap_detail::require_dichotomic(xc, "swap_rho_data(Xc)");
  swap_detail::require_dichotomic(zc, "swap_rho_data(Zc)");
  if (mj.dim() != 2) throw std::invalid_argument("swap_rho_data: measurement must act on a qubit");

  const DenseOperator conj = kron(DenseOperator::identity(2), mj);
  const DenseOperator rho_j = conj * rho_bc * conj.adjoint();

  DenseOperator out(4);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      const DenseOperator fb = swap_detail::gadget(xb, zb, m, n);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const DenseOperator fc = swap_detail::gadget(xc, zc, k, l);
          const cplx c = trace_of_product(kron(fb, fc), rho_j) / 16.0;
          out(2 * m + k, 2 * n + l) += c;
        }
    }
  return out;
}

/// f_j = <Phi+| sigma_j^{C'} rho_data sigma_j^{C'} |Phi+>, with j = 0 scoring
/// against the bare Bell state. Invariant under sigma_y -> -sigma_y.
inline double swap_fidelity(const DenseOperator& rho_data, int j) {
  if (rho_data.dim() != 4) throw std::invalid_argument("swap_fidelity: need a 4x4 operator");
  if (j < 0 || j > 3) throw std::invalid_argument("swap_fidelity: j must be in 0..3");
  const DenseOperator sj = (j == 0) ? DenseOperator::identity(2) : pauli(j).matrix;
  const Ket target = apply(kron(DenseOperator::identity(2), sj), bell_phi_plus(2));
  return state_fidelity(target, rho_data);
}

/// Trace-distance equivalent of a self-testing fidelity: sqrt(2 (1 - sqrt f)).
inline double fidelity_to_trace_distance(double f) {
  if (f < 0.0 || f > 1.0) throw std::invalid_argument("fidelity_to_trace_distance: f must be in [0,1]");
  return std::sqrt(2.0 * (1.0 - std::sqrt(f)));
}

/// Inverse map t -> (1 - t^2/2)^2.
inline double trace_distance_to_fidelity(double t) {
  if (t < 0.0 || t > std::sqrt(2.0) + 1e-12)
    throw std::invalid_argument("trace_distance_to_fidelity: t must be in [0, sqrt2]");
  const double s = 1.0 - t * t / 2.0;
  return s * s;
}

/// Convenience: the measurement-self-testing fidelities of an explicit
/// realization (state + operator assignment), j = 0..3.
inline std::array<double, 4> realization_swap_fidelities(const DenseOperator& rho_bc,
                                                         const DenseOperator& xb, const DenseOperator& zb,
                                                         const DenseOperator& xc, const DenseOperator& zc,
                                                         const std::array<DenseOperator, 3>& charlie_ops) {
  std::array<double, 4> f{};
  f[0] = swap_fidelity(swap_rho_data(rho_bc, xb, zb, xc, zc, DenseOperator::identity(2)), 0);
  for (int j = 1; j <= 3; ++j)
    f[static_cast<size_t>(j)] =
        swap_fidelity(swap_rho_data(rho_bc, xb, zb, xc, zc, charlie_ops[static_cast<size_t>(j - 1)]), j);
  return f;
}

}  // namespace steerdi
