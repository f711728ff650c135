#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "steerdi/nc_polynomial.hpp"
#include "steerdi/witness.hpp"

namespace steerdi {

enum class SwapObjective { average, f0, f1, f2, f3 };

inline const char* swap_objective_name(SwapObjective o) {
  switch (o) {
    case SwapObjective::average: return "average";
    case SwapObjective::f0: return "f0";
    case SwapObjective::f1: return "f1";
    case SwapObjective::f2: return "f2";
    case SwapObjective::f3: return "f3";
  }
  return "?";
}

namespace moment_detail {

// Bob's effective x/z operators, extracted from the (1,3) CHSH pair:
// Xb = (B3+B4)/sqrt2, Zb = (B3-B4)/sqrt2.
inline NcPolynomial bob_x_poly() {
  return (bob_observable_poly(3) + bob_observable_poly(4)) * cplx(1.0 / std::sqrt(2.0), 0);
}
inline NcPolynomial bob_z_poly() {
  return (bob_observable_poly(3) - bob_observable_poly(4)) * cplx(1.0 / std::sqrt(2.0), 0);
}

inline NcPolynomial gadget_poly(const NcPolynomial& x, const NcPolynomial& z, int m, int n) {
  const NcPolynomial one(1.0);
  const NcPolynomial left = (m == 0) ? (one + z) : (x - z * x);
  const NcPolynomial right = (n == 0) ? (one + z) : (x - x * z);
  return left * right;
}

inline cplx pauli_entry(int j, int r, int c, bool flip_y) {
  if (j == 0) return r == c ? 1.0 : 0.0;
  DenseOperator s = pauli(j).matrix;
  cplx v = s(r, c);
  if (j == 2 && flip_y) v = -v;
  return v;
}

}  // namespace moment_detail

/// Symbolic expansion of the swap fidelity f_j as a polynomial in the
/// measured projectors: f_j = (1/32) sum_{mnkl} s_{mk} conj(s_{nl})
/// <M_j Fb(m,n) Fc(k,l) M_j>. The sigma_y sign drops out (the target enters
/// twice), which build_relaxation asserts.
inline NcPolynomial swap_fidelity_poly(int j, bool flip_y = false) {
  if (j < 0 || j > 3) throw std::invalid_argument("swap_fidelity_poly: j must be in 0..3");
  const NcPolynomial xb = moment_detail::bob_x_poly();
  const NcPolynomial zb = moment_detail::bob_z_poly();
  const NcPolynomial xc = charlie_observable_poly(1);
  const NcPolynomial zc = charlie_observable_poly(3);
  const NcPolynomial mj = (j == 0) ? NcPolynomial(1.0)
                                   : (j == 2 && flip_y ? charlie_observable_poly(2) * cplx(-1.0, 0)
                                                       : charlie_observable_poly(j));

  NcPolynomial out;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      const NcPolynomial fb = moment_detail::gadget_poly(xb, zb, m, n);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const cplx coeff = moment_detail::pauli_entry(j, m, k, flip_y) *
                             std::conj(moment_detail::pauli_entry(j, n, l, flip_y)) / 32.0;
          if (coeff == cplx{}) continue;
          const NcPolynomial fc = moment_detail::gadget_poly(xc, zc, k, l);
          out += coeff * (mj * fb * fc * mj);
        }
    }
  return out;
}

inline NcPolynomial swap_objective_poly(SwapObjective which) {
  switch (which) {
    case SwapObjective::f0: return swap_fidelity_poly(0);
    case SwapObjective::f1: return swap_fidelity_poly(1);
    case SwapObjective::f2: return swap_fidelity_poly(2);
    case SwapObjective::f3: return swap_fidelity_poly(3);
    case SwapObjective::average:
      return (swap_fidelity_poly(1) + swap_fidelity_poly(2) + swap_fidelity_poly(3)) *
             cplx(1.0 / 3.0, 0);
  }
  throw std::invalid_argument("swap_objective_poly: bad objective");
}

/// CHSH line polynomial: E_{y+,i} + E_{y-,i} + E_{y+,j} - E_{y-,j} with
/// E_{y,z} = <B_y C_z>.
inline NcPolynomial chsh_line_poly(int line) {
  if (line < 0 || line > 2) throw std::invalid_argument("chsh_line_poly: line must be 0..2");
  const auto& ln = kChshLines[static_cast<size_t>(line)];
  const auto corr = [](int y, int z) { return bob_observable_poly(y) * charlie_observable_poly(z); };
  return corr(ln.y_plus, ln.pauli_i) + corr(ln.y_minus, ln.pauli_i) + corr(ln.y_plus, ln.pauli_j) -
         corr(ln.y_minus, ln.pauli_j);
}

/// Moment-matrix relaxation: basis words index Gamma, Hermitian word classes
/// are the real moment variables, CHSH values enter as affine constraints and
/// the swap fidelity as the linear objective.
struct MomentRelaxation {
  std::vector<MonomialWord> basis;
  std::vector<MonomialWord> classes;  // class 0 is the identity word
  std::map<MonomialWord, int> class_index;

  struct Position {
    int r, c;  // r <= c
  };
  std::vector<std::vector<Position>> positions;  // per class

  struct Affine {
    std::vector<std::pair<int, double>> terms;  // (class, coeff)
    double rhs = 0;
    std::string name;
  };
  std::vector<Affine> constraints;  // normalization first, then the 3 lines

  std::vector<double> objective;  // per class; minimized
  SwapObjective objective_kind = SwapObjective::average;
  std::array<double, 3> chsh_values{};

  int n() const { return static_cast<int>(basis.size()); }
  int num_classes() const { return static_cast<int>(classes.size()); }
};

struct RelaxationOptions {
  bool within_bob_pairs = true;      // all B_a B_b words, a != b
  bool within_charlie_pairs = true;  // all C_a C_b words
  bool cross_pairs = true;           // B_a C_c words
  bool inequality_constraints = false;   // CHSH lines as >= instead of ==
  std::vector<MonomialWord> extra_words;  // appended before the closure step
};

namespace moment_detail {

inline void to_class_coeffs(const NcPolynomial& p, const std::map<MonomialWord, int>& class_index,
                            std::vector<double>& out, const char* who) {
  for (const auto& [w, c] : p.terms()) {
    if (std::abs(c.imag()) > 1e-10)
      throw std::logic_error(std::string(who) + ": non-real coefficient in Hermitian functional");
    const auto it = class_index.find(w.hermitian_rep());
    if (it == class_index.end())
      throw std::logic_error(std::string(who) + ": word " + w.str() + " missing from the moment matrix");
    out[static_cast<size_t>(it->second)] += c.real();
  }
}

}  // namespace moment_detail

/// Assemble the relaxation for measured CHSH line values. Basis = identity,
/// all 9 single projectors, the selected length-two products, plus the
/// closure of the objective: every objective word must factor as s^dag t with
/// s, t in the basis; missing splits are appended automatically.
inline MomentRelaxation build_relaxation(const std::array<double, 3>& chsh, SwapObjective which,
                                         const RelaxationOptions& opt = {}) {
  for (double v : chsh)
    if (std::abs(v) > kTsirelson + 1e-9)
      throw std::invalid_argument("build_relaxation: CHSH value outside the quantum range");

  // the sigma_y sign ambiguity: both signs must give the same objective
  if (which == SwapObjective::f2 || which == SwapObjective::average) {
    const NcPolynomial a = swap_fidelity_poly(2, false);
    const NcPolynomial b = swap_fidelity_poly(2, true);
    NcPolynomial diff = a - b;
    double md = 0;
    for (const auto& [w, c] : diff.terms()) md = std::max(md, std::abs(c));
    if (md > 1e-12) throw std::logic_error("build_relaxation: sigma_y sign changed the objective");
  }

  const NcPolynomial objective_poly = swap_objective_poly(which);
  if (!objective_poly.is_hermitian(1e-10))
    throw std::logic_error("build_relaxation: objective polynomial not Hermitian");

  MomentRelaxation rel;
  rel.objective_kind = which;
  rel.chsh_values = chsh;

  std::set<MonomialWord> basis_set;
  basis_set.insert(MonomialWord::identity());
  for (int y = 1; y <= 6; ++y) basis_set.insert(MonomialWord::bob_letter(y));
  for (int z = 1; z <= 3; ++z) basis_set.insert(MonomialWord::charlie_letter(z));
  if (opt.within_bob_pairs)
    for (int a = 1; a <= 6; ++a)
      for (int b = 1; b <= 6; ++b)
        if (a != b) basis_set.insert(MonomialWord::bob_letter(a) * MonomialWord::bob_letter(b));
  if (opt.within_charlie_pairs)
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b)
        if (a != b) basis_set.insert(MonomialWord::charlie_letter(a) * MonomialWord::charlie_letter(b));
  if (opt.cross_pairs)
    for (int a = 1; a <= 6; ++a)
      for (int b = 1; b <= 3; ++b)
        basis_set.insert(MonomialWord::bob_letter(a) * MonomialWord::charlie_letter(b));
  for (const auto& w : opt.extra_words) basis_set.insert(w);

  // closure: make every objective word reachable as s^dag t
  const auto all_products = [&]() {
    std::set<MonomialWord> prods;
    for (const auto& s : basis_set)
      for (const auto& t : basis_set) prods.insert(s.adjoint() * t);
    return prods;
  };

  const auto split_halves = [](const MonomialWord& w) {
    MonomialWord prefix, suffix;
    const size_t hb = w.bob.size() / 2;
    prefix.bob.assign(w.bob.begin(), w.bob.begin() + static_cast<long>(hb));
    suffix.bob.assign(w.bob.begin() + static_cast<long>(hb), w.bob.end());
    const size_t hc = w.charlie.size() / 2;
    prefix.charlie.assign(w.charlie.begin(), w.charlie.begin() + static_cast<long>(hc));
    suffix.charlie.assign(w.charlie.begin() + static_cast<long>(hc), w.charlie.end());
    return std::pair{prefix.adjoint(), suffix};  // s = adjoint(prefix), t = suffix
  };

  for (int round = 0;; ++round) {
    const std::set<MonomialWord> prods = all_products();
    bool added = false;
    for (const auto& [w, c] : objective_poly.terms()) {
      (void)c;
      if (prods.count(w) || prods.count(w.adjoint())) continue;
      const auto [s, t] = split_halves(w);
      added |= basis_set.insert(s).second;
      added |= basis_set.insert(t).second;
    }
    if (!added) break;
    if (round > 8) throw std::logic_error("build_relaxation: objective closure did not converge");
  }

  rel.basis.assign(basis_set.begin(), basis_set.end());

  // moment classes from every Gamma position
  for (int r = 0; r < rel.n(); ++r)
    for (int c = r; c < rel.n(); ++c) {
      const MonomialWord w = (rel.basis[static_cast<size_t>(r)].adjoint() * rel.basis[static_cast<size_t>(c)])
                                 .hermitian_rep();
      auto it = rel.class_index.find(w);
      int idx;
      if (it == rel.class_index.end()) {
        idx = static_cast<int>(rel.classes.size());
        rel.class_index.emplace(w, idx);
        rel.classes.push_back(w);
        rel.positions.emplace_back();
      } else {
        idx = it->second;
      }
      rel.positions[static_cast<size_t>(idx)].push_back({r, c});
    }

  // move the identity class to slot 0 for readability of dumps
  {
    const MonomialWord id = MonomialWord::identity();
    const int idx = rel.class_index.at(id);
    if (idx != 0) {
      std::swap(rel.classes[0], rel.classes[static_cast<size_t>(idx)]);
      std::swap(rel.positions[0], rel.positions[static_cast<size_t>(idx)]);
      rel.class_index[rel.classes[static_cast<size_t>(idx)]] = idx;
      rel.class_index[id] = 0;
    }
  }

  // normalization <1> = 1
  {
    MomentRelaxation::Affine norm;
    norm.terms.emplace_back(0, 1.0);
    norm.rhs = 1.0;
    norm.name = "normalization";
    rel.constraints.push_back(std::move(norm));
  }
  // CHSH lines
  for (int line = 0; line < 3; ++line) {
    std::vector<double> coeffs(rel.classes.size(), 0.0);
    moment_detail::to_class_coeffs(chsh_line_poly(line), rel.class_index, coeffs, "chsh constraint");
    MomentRelaxation::Affine aff;
    for (size_t k = 0; k < coeffs.size(); ++k)
      if (coeffs[k] != 0.0) aff.terms.emplace_back(static_cast<int>(k), coeffs[k]);
    aff.rhs = chsh[static_cast<size_t>(line)];
    aff.name = "chsh_line_" + std::to_string(line + 1);
    rel.constraints.push_back(std::move(aff));
  }

  rel.objective.assign(rel.classes.size(), 0.0);
  moment_detail::to_class_coeffs(objective_poly, rel.class_index, rel.objective, "objective");
  return rel;
}

/// Real moment vector of an explicit realization, indexed by class.
inline std::vector<double> realization_moments(const MomentRelaxation& rel, const Realization& r) {
  std::vector<double> y(rel.classes.size());
  for (size_t k = 0; k < rel.classes.size(); ++k)
    y[k] = word_moment(rel.classes[k], r).real();
  return y;
}

/// Gamma assembled from a moment vector.
inline DenseOperator moment_matrix_of(const MomentRelaxation& rel, const std::vector<double>& y) {
  DenseOperator g(rel.n());
  for (size_t k = 0; k < rel.positions.size(); ++k)
    for (const auto& pos : rel.positions[k]) {
      g(pos.r, pos.c) = y[k];
      g(pos.c, pos.r) = y[k];
    }
  return g;
}

inline double evaluate_affine(const MomentRelaxation::Affine& aff, const std::vector<double>& y) {
  double s = 0;
  for (const auto& [k, coeff] : aff.terms) s += coeff * y[static_cast<size_t>(k)];
  return s;
}

inline double evaluate_objective(const MomentRelaxation& rel, const std::vector<double>& y) {
  double s = 0;
  for (size_t k = 0; k < rel.objective.size(); ++k) s += rel.objective[k] * y[k];
  return s;
}

/// The ideal self-testing realization: |Phi+_2>, Bob's six pair observables,
/// Charlie's (sx, -sy, sz).
inline Realization ideal_realization(double phi_visibility = 1.0) {
  Realization r;
  r.rho_bc = depolarized_phi_plus(phi_visibility);
  for (int y = 1; y <= 6; ++y) r.bob_obs[static_cast<size_t>(y - 1)] = bob_selftest_observable(y).matrix;
  for (int z = 1; z <= 3; ++z) r.charlie_obs[static_cast<size_t>(z - 1)] = charlie_axis(z);
  return r;
}

/// CHSH line values of a realization (same combination the relaxation pins).
inline std::array<double, 3> realization_chsh(const Realization& r) {
  std::array<double, 3> out{};
  for (int line = 0; line < 3; ++line)
    out[static_cast<size_t>(line)] = poly_moment(chsh_line_poly(line), r).real();
  return out;
}

}  // namespace steerdi
