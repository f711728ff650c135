#pragma once

#include <map>
#include <optional>

#include "steerdi/moment_matrix.hpp"
#include "steerdi/sdp_solver.hpp"
#include "steerdi/swap_circuit.hpp"

namespace steerdi {

/// Relaxation compiled to the LMI form the solver consumes. Equality
/// constraints are eliminated by Gaussian pivoting (default); with
/// inequality_constraints the CHSH lines become 1x1 slack blocks appended to
/// the moment matrix instead.
struct CompiledRelaxation {
  SdpProblem problem;
  std::vector<int> free_class;  // free variable -> class index
  struct Pivot {
    int cls;
    double d;                                   // constant part
    std::vector<std::pair<int, double>> terms;  // over free variables
  };
  std::vector<Pivot> pivots;
  int num_classes = 0;
};

inline CompiledRelaxation compile_relaxation(const MomentRelaxation& rel,
                                             bool inequality_constraints = false) {
  const int mc = rel.num_classes();
  const int n = rel.n();

  // rows to eliminate: always the normalization; the CHSH lines too unless
  // they are kept as slack inequalities
  std::vector<std::map<int, double>> rows;
  std::vector<double> rhs;
  std::vector<const MomentRelaxation::Affine*> slack_rows;
  for (const auto& aff : rel.constraints) {
    const bool is_norm = aff.name == "normalization";
    if (!is_norm && inequality_constraints) {
      slack_rows.push_back(&aff);
      continue;
    }
    std::map<int, double> row;
    for (const auto& [cls, coeff] : aff.terms) row[cls] += coeff;
    rows.push_back(std::move(row));
    rhs.push_back(aff.rhs);
  }

  // Gaussian elimination with largest-coefficient pivoting
  const int nrows = static_cast<int>(rows.size());
  std::vector<int> pivot_cls(static_cast<size_t>(nrows), -1);
  std::vector<char> is_pivot(static_cast<size_t>(mc), 0);
  for (int r = 0; r < nrows; ++r) {
    int best = -1;
    double best_abs = 0;
    for (const auto& [cls, coeff] : rows[static_cast<size_t>(r)]) {
      if (is_pivot[static_cast<size_t>(cls)]) continue;
      if (std::abs(coeff) > best_abs) {
        best_abs = std::abs(coeff);
        best = cls;
      }
    }
    if (best < 0) {
      if (std::abs(rhs[static_cast<size_t>(r)]) > 1e-9)
        throw std::invalid_argument("compile_relaxation: inconsistent affine constraints");
      continue;  // dependent row
    }
    pivot_cls[static_cast<size_t>(r)] = best;
    is_pivot[static_cast<size_t>(best)] = 1;
    const double pv = rows[static_cast<size_t>(r)][best];
    for (int r2 = 0; r2 < nrows; ++r2) {
      if (r2 == r) continue;
      auto it = rows[static_cast<size_t>(r2)].find(best);
      if (it == rows[static_cast<size_t>(r2)].end()) continue;
      const double factor = it->second / pv;
      for (const auto& [cls, coeff] : rows[static_cast<size_t>(r)]) {
        rows[static_cast<size_t>(r2)][cls] -= factor * coeff;
        if (std::abs(rows[static_cast<size_t>(r2)][cls]) < 1e-14) rows[static_cast<size_t>(r2)].erase(cls);
      }
      rhs[static_cast<size_t>(r2)] -= factor * rhs[static_cast<size_t>(r)];
    }
  }

  CompiledRelaxation out;
  out.num_classes = mc;

  std::vector<int> class_to_free(static_cast<size_t>(mc), -1);
  for (int cls = 0; cls < mc; ++cls)
    if (!is_pivot[static_cast<size_t>(cls)]) {
      class_to_free[static_cast<size_t>(cls)] = static_cast<int>(out.free_class.size());
      out.free_class.push_back(cls);
    }

  // pivot expressions y_p = d + sum_f coeff * y_f
  for (int r = 0; r < nrows; ++r) {
    if (pivot_cls[static_cast<size_t>(r)] < 0) continue;
    CompiledRelaxation::Pivot piv;
    piv.cls = pivot_cls[static_cast<size_t>(r)];
    const double pv = rows[static_cast<size_t>(r)].at(piv.cls);
    piv.d = rhs[static_cast<size_t>(r)] / pv;
    for (const auto& [cls, coeff] : rows[static_cast<size_t>(r)]) {
      if (cls == piv.cls) continue;
      piv.terms.emplace_back(class_to_free[static_cast<size_t>(cls)], -coeff / pv);
    }
    out.pivots.push_back(std::move(piv));
  }

  const int nslack = static_cast<int>(slack_rows.size());
  const int nn = n + nslack;
  SdpProblem& p = out.problem;
  p.n = nn;
  p.f0.assign(static_cast<size_t>(nn) * nn, 0.0);
  p.fi.resize(out.free_class.size());
  p.c.assign(out.free_class.size(), 0.0);
  p.c0 = 0;

  // class contribution maps: constant part and per-free-variable part
  std::vector<double> const_part(static_cast<size_t>(mc), 0.0);
  std::vector<std::map<int, double>> free_part(static_cast<size_t>(mc));
  for (int cls = 0; cls < mc; ++cls) {
    const int f = class_to_free[static_cast<size_t>(cls)];
    if (f >= 0) free_part[static_cast<size_t>(cls)][f] = 1.0;
  }
  for (const auto& piv : out.pivots) {
    const_part[static_cast<size_t>(piv.cls)] = piv.d;
    for (const auto& [f, coeff] : piv.terms) free_part[static_cast<size_t>(piv.cls)][f] += coeff;
  }

  // moment-matrix block
  for (int cls = 0; cls < mc; ++cls) {
    for (const auto& pos : rel.positions[static_cast<size_t>(cls)]) {
      const double dconst = const_part[static_cast<size_t>(cls)];
      if (dconst != 0.0) {
        p.f0[static_cast<size_t>(pos.r) * nn + pos.c] += dconst;
        if (pos.r != pos.c) p.f0[static_cast<size_t>(pos.c) * nn + pos.r] += dconst;
      }
      for (const auto& [f, coeff] : free_part[static_cast<size_t>(cls)]) {
        if (coeff == 0.0) continue;
        p.fi[static_cast<size_t>(f)].push_back({pos.r, pos.c, coeff});
        if (pos.r != pos.c) p.fi[static_cast<size_t>(f)].push_back({pos.c, pos.r, coeff});
      }
    }
  }

  // slack blocks for inequality-mode CHSH lines: sum - rhs >= 0
  for (int s = 0; s < nslack; ++s) {
    const int d = n + s;
    p.f0[static_cast<size_t>(d) * nn + d] -= slack_rows[static_cast<size_t>(s)]->rhs;
    for (const auto& [cls, coeff] : slack_rows[static_cast<size_t>(s)]->terms) {
      p.f0[static_cast<size_t>(d) * nn + d] += const_part[static_cast<size_t>(cls)] * coeff;
      for (const auto& [f, w] : free_part[static_cast<size_t>(cls)])
        p.fi[static_cast<size_t>(f)].push_back({d, d, coeff * w});
    }
  }

  // objective over free variables
  for (int cls = 0; cls < mc; ++cls) {
    const double oc = rel.objective[static_cast<size_t>(cls)];
    if (oc == 0.0) continue;
    p.c0 += oc * const_part[static_cast<size_t>(cls)];
    for (const auto& [f, coeff] : free_part[static_cast<size_t>(cls)])
      p.c[static_cast<size_t>(f)] += oc * coeff;
  }

  // merge duplicate entries per variable
  for (auto& entries : p.fi) {
    std::map<std::pair<int, int>, double> merged;
    for (const auto& e : entries) merged[{e.r, e.c}] += e.w;
    entries.clear();
    for (const auto& [rc, w] : merged)
      if (w != 0.0) entries.push_back({rc.first, rc.second, w});
  }
  return out;
}

/// Full class-moment vector from a solver point.
inline std::vector<double> recover_class_moments(const CompiledRelaxation& comp,
                                                 const std::vector<double>& y_free) {
  std::vector<double> full(static_cast<size_t>(comp.num_classes), 0.0);
  for (size_t f = 0; f < comp.free_class.size(); ++f)
    full[static_cast<size_t>(comp.free_class[f])] = y_free[f];
  for (const auto& piv : comp.pivots) {
    double v = piv.d;
    for (const auto& [f, coeff] : piv.terms) v += coeff * y_free[static_cast<size_t>(f)];
    full[static_cast<size_t>(piv.cls)] = v;
  }
  return full;
}

struct SelfTestBound {
  double value = 0;  // certified lower bound on the swap fidelity
  SwapObjective objective = SwapObjective::average;
  std::array<double, 3> chsh{};
  SdpStatus status = SdpStatus::iteration_limit;
  double gap = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  int iterations = 0;
  int basis_size = 0;
  int num_classes = 0;

  bool reliable(double feas = 1e-7, double gap_bound = 1e-6) const {
    return primal_residual < feas && dual_residual < feas && gap < gap_bound;
  }
};

struct SelfTestOptions {
  RelaxationOptions relaxation{};
  SdpOptions sdp{};
};

/// build_relaxation -> solve_sdp; the optimum is a device-independent lower
/// bound on the swap fidelity of any quantum realization matching the CHSH
/// line values.
inline SelfTestBound fidelity_lower_bound(const std::array<double, 3>& chsh, SwapObjective which,
                                          const SelfTestOptions& opt = {}) {
  const MomentRelaxation rel = build_relaxation(chsh, which, opt.relaxation);
  const CompiledRelaxation comp = compile_relaxation(rel, opt.relaxation.inequality_constraints);
  const SdpSolution sol = solve_sdp(comp.problem, opt.sdp);

  SelfTestBound out;
  out.value = sol.value;
  out.objective = which;
  out.chsh = chsh;
  out.status = sol.status;
  out.gap = sol.gap;
  out.primal_residual = sol.primal_residual;
  out.dual_residual = sol.dual_residual;
  out.iterations = sol.iterations;
  out.basis_size = rel.n();
  out.num_classes = rel.num_classes();
  return out;
}

/// Everything the self-testing stage reports: per-measurement and average
/// fidelity bounds, their trace-distance equivalents, and the implied least
/// certifiable Werner visibility.
struct SelfTestReport {
  std::array<double, 3> chsh{};
  std::array<double, 3> f{};   // f1, f2, f3
  double f_avg = 0;
  std::array<double, 3> trace_distance{};
  double noisy_visibility_threshold = 0;
  std::array<SelfTestBound, 4> bounds;  // f1, f2, f3, average
};

inline SelfTestReport run_self_test(const std::array<double, 3>& chsh, const SelfTestOptions& opt = {}) {
  SelfTestReport rep;
  rep.chsh = chsh;
  const std::array<SwapObjective, 4> objs{SwapObjective::f1, SwapObjective::f2, SwapObjective::f3,
                                          SwapObjective::average};
  for (size_t k = 0; k < objs.size(); ++k) rep.bounds[k] = fidelity_lower_bound(chsh, objs[k], opt);
  for (int j = 0; j < 3; ++j) {
    const double fj = std::clamp(rep.bounds[static_cast<size_t>(j)].value, 0.0, 1.0);
    rep.f[static_cast<size_t>(j)] = fj;
    rep.trace_distance[static_cast<size_t>(j)] = fidelity_to_trace_distance(fj);
  }
  rep.f_avg = std::clamp(rep.bounds[3].value, 0.0, 1.0);
  rep.noisy_visibility_threshold = noisy_threshold(rep.f);
  return rep;
}

}  // namespace steerdi
