#pragma once

#include <array>
#include <cmath>
#include <random>

#include "steerdi/linalg.hpp"
#include "steerdi/quantum_model.hpp"

namespace steerdi {

/// Local-hidden-state decomposition over the 8 deterministic response
/// strategies for three dichotomic settings. Hidden member lambda answers
/// strat(lambda, x) deterministically and hands Bob the subnormalized state
/// omega_lambda = (t I + u.sigma)/2 with |u| <= t (weight t, Bloch u/t).
struct LhsModel {
  std::array<double, 8> weight{};
  std::array<std::array<double, 3>, 8> bloch_u{};  // unnormalized: omega = (t I + u.sigma)/2

  static int strat(int lambda, int x) { return ((lambda >> (x - 1)) & 1) ? -1 : 1; }

  DenseOperator omega(int lambda) const {
    DenseOperator m = DenseOperator::identity(2) * cplx(weight[static_cast<size_t>(lambda)], 0);
    for (int k = 0; k < 3; ++k)
      m += pauli(k + 1).matrix * cplx(bloch_u[static_cast<size_t>(lambda)][static_cast<size_t>(k)], 0);
    return m * cplx(0.5, 0);
  }
};

struct LhsSearchResult {
  bool feasible = false;
  double max_residual = 0;  // infeasibility witness: largest assemblage mismatch (Frobenius)
  LhsModel model;
  int restarts_used = 0;
};

struct LhsSearchOptions {
  int restarts = 64;
  double residual_tol = 1e-6;
  int max_iterations = 200000;
  std::uint64_t seed = 20240917;
};

namespace lhs_detail {

struct Target {
  double t;                  // trace of the steered state
  std::array<double, 3> u;   // Pauli components
};

// steered (unnormalized) states sigma_{a|x} = Tr_A[(Pi_{a|x} (x) I) rho]
inline std::array<std::array<Target, 2>, 3> assemblage(const DenseOperator& rho) {
  std::array<std::array<Target, 2>, 3> tg{};
  for (int x = 1; x <= 3; ++x)
    for (int a = -1; a <= 1; a += 2) {
      DenseOperator proj = (DenseOperator::identity(2) + pauli(x).matrix * cplx(a, 0)) * cplx(0.5, 0);
      DenseOperator steered = partial_trace(kron(proj, DenseOperator::identity(2)) * rho, {2, 2}, {1});
      Target t;
      t.t = steered.trace().real();
      for (int k = 0; k < 3; ++k) t.u[static_cast<size_t>(k)] = real_trace_of_product(pauli(k + 1).matrix, steered);
      tg[static_cast<size_t>(x - 1)][a == 1 ? 0 : 1] = t;
    }
  return tg;
}

// project (t, u) onto the PSD cone |u| <= t of 2x2 operators (t I + u.sigma)/2
inline void project_cone(double& t, std::array<double, 3>& u) {
  const double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  if (un <= t) return;
  if (t <= -un) {
    t = 0;
    u = {0, 0, 0};
    return;
  }
  const double alpha = 0.5 * (t + un);
  t = alpha;
  const double s = alpha / un;
  for (double& v : u) v *= s;
}

}  // namespace lhs_detail

/// Convex feasibility search for an LHS model of a two-qubit state under
/// Alice's three Pauli settings: accelerated projected gradient over the 8
/// subnormalized hidden states, restarted from random interior points.
/// Feasible when the assemblage is matched to within residual_tol.
inline LhsSearchResult lhs_brute_force(const DenseOperator& rho, const LhsSearchOptions& opt = {}) {
  if (rho.dim() != 4) throw std::invalid_argument("lhs_brute_force: need a two-qubit state");
  const auto target = lhs_detail::assemblage(rho);

  // 32 coordinates: (t, ux, uy, uz) per hidden member
  using Vec = std::array<double, 32>;
  const auto idx_t = [](int l) { return 4 * l; };

  const auto residuals = [&](const Vec& w, std::array<std::array<lhs_detail::Target, 2>, 3>& res) {
    for (int x = 1; x <= 3; ++x)
      for (int as = 0; as < 2; ++as) {
        lhs_detail::Target r{-target[static_cast<size_t>(x - 1)][static_cast<size_t>(as)].t,
                             {-target[static_cast<size_t>(x - 1)][static_cast<size_t>(as)].u[0],
                              -target[static_cast<size_t>(x - 1)][static_cast<size_t>(as)].u[1],
                              -target[static_cast<size_t>(x - 1)][static_cast<size_t>(as)].u[2]}};
        for (int l = 0; l < 8; ++l) {
          if (LhsModel::strat(l, x) != (as == 0 ? 1 : -1)) continue;
          r.t += w[static_cast<size_t>(idx_t(l))];
          for (int k = 0; k < 3; ++k) r.u[static_cast<size_t>(k)] += w[static_cast<size_t>(idx_t(l) + 1 + k)];
        }
        res[static_cast<size_t>(x - 1)][static_cast<size_t>(as)] = r;
      }
  };

  // f = (1/4) sum (dt^2 + |du|^2)  (= 1/2 sum ||R||_F^2);  grad Lipschitz <= 6
  const auto objective = [&](const Vec& w, Vec* grad, double* max_res) {
    std::array<std::array<lhs_detail::Target, 2>, 3> res;
    residuals(w, res);
    double f = 0, mr = 0;
    if (grad) grad->fill(0.0);
    for (int x = 1; x <= 3; ++x)
      for (int as = 0; as < 2; ++as) {
        const auto& r = res[static_cast<size_t>(x - 1)][static_cast<size_t>(as)];
        const double n2 = r.t * r.t + r.u[0] * r.u[0] + r.u[1] * r.u[1] + r.u[2] * r.u[2];
        f += 0.25 * n2;
        mr = std::max(mr, std::sqrt(0.5 * n2));
        if (grad)
          for (int l = 0; l < 8; ++l) {
            if (LhsModel::strat(l, x) != (as == 0 ? 1 : -1)) continue;
            (*grad)[static_cast<size_t>(idx_t(l))] += 0.5 * r.t;
            for (int k = 0; k < 3; ++k) (*grad)[static_cast<size_t>(idx_t(l) + 1 + k)] += 0.5 * r.u[static_cast<size_t>(k)];
          }
      }
    if (max_res) *max_res = mr;
    return f;
  };

  const auto project = [&](Vec& w) {
    for (int l = 0; l < 8; ++l) {
      std::array<double, 3> u{w[static_cast<size_t>(idx_t(l) + 1)], w[static_cast<size_t>(idx_t(l) + 2)],
                              w[static_cast<size_t>(idx_t(l) + 3)]};
      lhs_detail::project_cone(w[static_cast<size_t>(idx_t(l))], u);
      for (int k = 0; k < 3; ++k) w[static_cast<size_t>(idx_t(l) + 1 + k)] = u[static_cast<size_t>(k)];
    }
  };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  LhsSearchResult best;
  best.max_residual = 1e300;

  const double step = 1.0 / 6.5;
  for (int restart = 0; restart < opt.restarts; ++restart) {
    Vec w{};
    if (restart == 0) {
      for (int l = 0; l < 8; ++l) w[static_cast<size_t>(idx_t(l))] = 0.125;  // white-noise start
    } else {
      for (int l = 0; l < 8; ++l) {
        w[static_cast<size_t>(idx_t(l))] = 0.125;
        for (int k = 1; k <= 3; ++k) w[static_cast<size_t>(idx_t(l) + k)] = 0.1 * unif(rng);
      }
      project(w);
    }

    // FISTA with restart-on-increase
    Vec y = w, w_prev = w, grad{};
    double theta = 1.0;
    double f_prev = 1e300;
    double stall_best = 1e300;
    int stall_count = 0;

    for (int it = 0; it < opt.max_iterations; ++it) {
      double mr = 0;
      const double f = objective(y, &grad, nullptr);
      Vec w_new;
      for (size_t i = 0; i < w_new.size(); ++i) w_new[i] = y[i] - step * grad[i];
      project(w_new);

      const double f_new = objective(w_new, nullptr, &mr);
      if (f_new > f_prev) {  // momentum restart
        theta = 1.0;
        y = w_new;
      } else {
        const double theta_new = 0.5 * (1 + std::sqrt(1 + 4 * theta * theta));
        const double beta = (theta - 1) / theta_new;
        for (size_t i = 0; i < y.size(); ++i) y[i] = w_new[i] + beta * (w_new[i] - w_prev[i]);
        theta = theta_new;
      }
      w_prev = w_new;
      f_prev = f_new;

      if (mr < best.max_residual) {
        best.max_residual = mr;
        for (int l = 0; l < 8; ++l) {
          best.model.weight[static_cast<size_t>(l)] = w_new[static_cast<size_t>(idx_t(l))];
          for (int k = 0; k < 3; ++k)
            best.model.bloch_u[static_cast<size_t>(l)][static_cast<size_t>(k)] = w_new[static_cast<size_t>(idx_t(l) + 1 + k)];
        }
      }
      if (mr < 0.2 * opt.residual_tol) break;

      // plateau: no meaningful decrease for a long stretch means infeasible
      if (f_new < stall_best * (1 - 1e-10)) {
        stall_best = f_new;
        stall_count = 0;
      } else if (++stall_count > 3000) {
        break;
      }
      (void)f;
    }

    best.restarts_used = restart + 1;
    if (best.max_residual < opt.residual_tol) break;
  }

  best.feasible = best.max_residual < opt.residual_tol;
  return best;
}

}  // namespace steerdi
