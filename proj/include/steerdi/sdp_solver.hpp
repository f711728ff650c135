#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "steerdi/linalg.hpp"

namespace steerdi {

// ---------------------------------------------------------------------------
// Small dense real symmetric toolkit for the interior-point iterations.
// Row-major storage; sizes are the moment-matrix dimension (~10^2) and the
// Schur complement dimension (~10^3).
// ---------------------------------------------------------------------------

struct RMat {
  int n = 0;
  std::vector<double> a;

  RMat() = default;
  explicit RMat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

  double& at(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }

  static RMat identity(int dim, double s = 1.0) {
    RMat m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = s;
    return m;
  }

  void symmetrize() {
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) {
        const double v = 0.5 * (at(r, c) + at(c, r));
        at(r, c) = v;
        at(c, r) = v;
      }
  }

  double max_abs() const {
    double m = 0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

inline RMat rmul(const RMat& x, const RMat& y) {
  RMat z(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const double v = x.at(i, k);
      if (v == 0.0) continue;
      const double* yr = &y.a[static_cast<size_t>(k) * y.n];
      double* zr = &z.a[static_cast<size_t>(i) * z.n];
      for (int j = 0; j < x.n; ++j) zr[j] += v * yr[j];
    }
  return z;
}

inline double rdot(const RMat& x, const RMat& y) {
  double s = 0;
  for (size_t i = 0; i < x.a.size(); ++i) s += x.a[i] * y.a[i];
  return s;
}

/// In-place lower Cholesky; returns false if the matrix is not positive
/// definite. Input must be symmetric.
inline bool cholesky(RMat& m) {
  const int n = m.n;
  for (int j = 0; j < n; ++j) {
    double d = m.at(j, j);
    for (int k = 0; k < j; ++k) d -= m.at(j, k) * m.at(j, k);
    if (d <= 0.0 || !std::isfinite(d)) return false;
    const double dj = std::sqrt(d);
    m.at(j, j) = dj;
    for (int i = j + 1; i < n; ++i) {
      double s = m.at(i, j);
      const double* ri = &m.a[static_cast<size_t>(i) * n];
      const double* rj = &m.a[static_cast<size_t>(j) * n];
      for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
      m.at(i, j) = s / dj;
    }
  }
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) m.at(r, c) = 0.0;
  return true;
}

inline void chol_solve_vec(const RMat& l, std::vector<double>& b) {
  const int n = l.n;
  for (int i = 0; i < n; ++i) {
    double s = b[static_cast<size_t>(i)];
    for (int k = 0; k < i; ++k) s -= l.at(i, k) * b[static_cast<size_t>(k)];
    b[static_cast<size_t>(i)] = s / l.at(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<size_t>(i)];
    for (int k = i + 1; k < n; ++k) s -= l.at(k, i) * b[static_cast<size_t>(k)];
    b[static_cast<size_t>(i)] = s / l.at(i, i);
  }
}

/// A^{-1} from its Cholesky factor.
inline RMat chol_inverse(const RMat& l) {
  const int n = l.n;
  RMat inv(n);
  std::vector<double> e(static_cast<size_t>(n));
  for (int c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[static_cast<size_t>(c)] = 1.0;
    chol_solve_vec(l, e);
    for (int r = 0; r < n; ++r) inv.at(r, c) = e[static_cast<size_t>(r)];
  }
  inv.symmetrize();
  return inv;
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi (values only).
inline double sym_min_eig(RMat m) {
  const int n = m.n;
  if (n == 1) return m.at(0, 0);
  double scale = m.max_abs();
  if (scale == 0) return 0;
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m.at(p, q) * m.at(p, q);
    if (std::sqrt(off) < 1e-13 * scale * n) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = m.at(p, q);
        if (std::abs(apq) < 1e-16 * scale) continue;
        const double tau = (m.at(q, q) - m.at(p, p)) / (2 * apq);
        const double t = (tau >= 0) ? 1.0 / (tau + std::sqrt(1 + tau * tau))
                                    : 1.0 / (tau - std::sqrt(1 + tau * tau));
        const double c = 1.0 / std::sqrt(1 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m.at(k, p), mkq = m.at(k, q);
          m.at(k, p) = c * mkp - s * mkq;
          m.at(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m.at(p, k), mqk = m.at(q, k);
          m.at(p, k) = c * mpk - s * mqk;
          m.at(q, k) = s * mpk + c * mqk;
        }
      }
  }
  double mn = m.at(0, 0);
  for (int i = 1; i < n; ++i) mn = std::min(mn, m.at(i, i));
  return mn;
}

// ---------------------------------------------------------------------------
// Dual-form SDP:  minimize c.y  subject to  F(y) = F0 + sum_i y_i Fi >= 0,
// with sparse symmetric Fi. Primal-dual interior point, HKM direction,
// Mehrotra predictor-corrector, infeasible start.
// ---------------------------------------------------------------------------

struct SdpProblem {
  struct Entry {
    int r, c;   // full storage: both (r,c) and (c,r) listed for r != c
    double w;
  };
  int n = 0;
  std::vector<double> f0;                 // n x n row-major, symmetric
  std::vector<std::vector<Entry>> fi;     // per variable
  std::vector<double> c;                  // objective
  double c0 = 0;                          // constant added to reported value

  int m() const { return static_cast<int>(fi.size()); }
};

struct SdpOptions {
  int max_iterations = 500;
  double feas_tol = 1e-8;    // relative primal/dual feasibility target
  double gap_tol = 1e-7;     // relative primal-dual gap target
  double step_fraction = 0.98;
  bool verbose = false;
};

enum class SdpStatus { optimal, stalled, iteration_limit };

struct SdpSolution {
  SdpStatus status = SdpStatus::iteration_limit;
  double value = 0;             // c.y + c0 (primal estimate of the minimum)
  double dual_value = 0;        // -F0.Z + c0 (certified side of the gap)
  std::vector<double> y;
  double gap = 0;               // |value - dual_value| / (1 + |value| + |dual_value|)
  double primal_residual = 0;   // max |F(y) - X|, relative to problem scale
  double dual_residual = 0;     // max_i |c_i - Fi.Z|, relative to problem scale
  int iterations = 0;

  bool meets(double feas = 1e-7, double gap_bound = 1e-6) const {
    return primal_residual < feas && dual_residual < feas && gap < gap_bound;
  }
  double merit() const { return std::max({primal_residual, dual_residual, gap}); }
};

namespace sdp_detail {

inline RMat assemble_f(const SdpProblem& p, const std::vector<double>& y) {
  RMat f(p.n);
  std::copy(p.f0.begin(), p.f0.end(), f.a.begin());
  for (int i = 0; i < p.m(); ++i) {
    const double yi = y[static_cast<size_t>(i)];
    if (yi == 0.0) continue;
    for (const auto& e : p.fi[static_cast<size_t>(i)]) f.at(e.r, e.c) += yi * e.w;
  }
  return f;
}

inline double fi_dot(const std::vector<SdpProblem::Entry>& fi, const RMat& mat) {
  double s = 0;
  for (const auto& e : fi) s += e.w * mat.at(e.c, e.r);  // Tr[Fi M] = sum Fi[r,c] M[c,r]
  return s;
}

/// largest alpha in (0, 1] keeping S + alpha dS psd, given chol(S) = L
inline double max_step(const RMat& l, const RMat& ds, double fraction) {
  const int n = l.n;
  // M = L^{-1} dS L^{-T}
  RMat m = ds;
  // forward solve on columns: L W = dS  (column-wise)
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) {
      double s = m.at(i, c);
      for (int k = 0; k < i; ++k) s -= l.at(i, k) * m.at(k, c);
      m.at(i, c) = s / l.at(i, i);
    }
  }
  // now solve on rows: M L^T = W  ->  transpose trick
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < n; ++i) {
      double s = m.at(r, i);
      for (int k = 0; k < i; ++k) s -= l.at(i, k) * m.at(r, k);
      m.at(r, i) = s / l.at(i, i);
    }
  }
  m.symmetrize();
  const double lam = sym_min_eig(m);
  if (lam >= -1e-14) return 1.0;
  return std::min(1.0, -fraction / lam);
}

}  // namespace sdp_detail

inline SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opt = {}) {
  using namespace sdp_detail;
  const int n = prob.n;
  const int m = prob.m();
  if (n <= 0 || m < 0) throw std::invalid_argument("solve_sdp: malformed problem");

  // initial point: comfortably interior identities at the problem's scale
  double scale = 1.0;
  for (double v : prob.f0) scale = std::max(scale, std::abs(v));
  for (const auto& fi : prob.fi)
    for (const auto& e : fi) scale = std::max(scale, std::abs(e.w));
  for (double v : prob.c) scale = std::max(scale, std::abs(v));
  const double init = 10.0 * scale;

  std::vector<double> y(static_cast<size_t>(m), 0.0);
  RMat x = RMat::identity(n, init);
  RMat z = RMat::identity(n, init);

  SdpSolution sol;
  sol.y = y;
  SdpSolution best = sol;
  best.primal_residual = best.dual_residual = best.gap = 1e300;

  int stall = 0;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    sol.iterations = iter + 1;

    const RMat fy = assemble_f(prob, y);
    RMat rp = fy;  // primal residual F(y) - X
    for (size_t i = 0; i < rp.a.size(); ++i) rp.a[i] -= x.a[i];

    std::vector<double> rd(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
      rd[static_cast<size_t>(i)] = prob.c[static_cast<size_t>(i)] - fi_dot(prob.fi[static_cast<size_t>(i)], z);

    const double mu = rdot(x, z) / n;
    sol.primal_residual = rp.max_abs() / (1 + scale);
    double rdmax = 0;
    for (double v : rd) rdmax = std::max(rdmax, std::abs(v));
    sol.dual_residual = rdmax / (1 + scale);
    double obj = prob.c0;
    for (int i = 0; i < m; ++i) obj += prob.c[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    double dual_obj = prob.c0;
    for (size_t i = 0; i < prob.f0.size(); ++i) dual_obj -= prob.f0[i] * z.a[i];
    sol.value = obj;
    sol.dual_value = dual_obj;
    sol.gap = std::abs(obj - dual_obj) / (1 + std::abs(obj) + std::abs(dual_obj));
    sol.y = y;

    if (opt.verbose)
      std::printf("  it %3d  mu %9.2e  rp %9.2e  rd %9.2e  gap %9.2e  obj %+.9f  dual %+.9f\n",
                  iter, mu, sol.primal_residual, sol.dual_residual, sol.gap, obj, dual_obj);

    if (sol.merit() < best.merit()) {
      best = sol;
      stall = 0;
    } else if (++stall > 25) {
      best.status = SdpStatus::stalled;
      return best;
    }

    if (sol.primal_residual < opt.feas_tol && sol.dual_residual < opt.feas_tol &&
        sol.gap < opt.gap_tol) {
      sol.status = SdpStatus::optimal;
      return sol;
    }

    RMat lx = x;
    RMat lz = z;
    {
      const bool okx = cholesky(lx);
      const bool okz = okx && cholesky(lz);
      if (!okx || !okz) {  // endgame breakdown: the best iterate stands
        best.status = SdpStatus::stalled;
        return best;
      }
    }
    const RMat xinv = chol_inverse(lx);

    // Schur complement H_ij = Tr[Fi X^{-1} Fj Z]
    RMat h(m);
    for (int i = 0; i < m; ++i) {
      const auto& fe = prob.fi[static_cast<size_t>(i)];
      for (int j = i; j < m; ++j) {
        const auto& ge = prob.fi[static_cast<size_t>(j)];
        double s = 0;
        for (const auto& a : fe)
          for (const auto& b : ge) s += a.w * b.w * xinv.at(a.c, b.r) * z.at(b.c, a.r);
        h.at(i, j) = s;
        h.at(j, i) = s;
      }
    }

    RMat lh = h;
    {
      double ridge = 0;
      double hscale = h.max_abs();
      while (!cholesky(lh)) {
        ridge = (ridge == 0) ? 1e-13 * hscale : ridge * 100;
        if (ridge > 1e-4 * hscale) throw std::runtime_error("solve_sdp: Schur factorization failed");
        lh = h;
        for (int i = 0; i < m; ++i) lh.at(i, i) += ridge;
      }
    }

    const RMat xinv_rp_z = rmul(rmul(xinv, rp), z);

    // one Newton solve for a given complementarity target Rc
    const auto newton = [&](const RMat& rc, std::vector<double>& dy, RMat& dx, RMat& dz) {
      const RMat xinv_rc = rmul(xinv, rc);
      std::vector<double> rhs(static_cast<size_t>(m), 0.0);
      for (int i = 0; i < m; ++i) {
        const auto& fe = prob.fi[static_cast<size_t>(i)];
        rhs[static_cast<size_t>(i)] = fi_dot(fe, xinv_rc) + fi_dot(fe, z) -
                                      prob.c[static_cast<size_t>(i)] - fi_dot(fe, xinv_rp_z);
      }
      dy = rhs;
      chol_solve_vec(lh, dy);
      // one round of iterative refinement keeps the late-stage Schur solves honest
      {
        std::vector<double> resid = rhs;
        for (int i = 0; i < m; ++i) {
          const double* hrow = &h.a[static_cast<size_t>(i) * m];
          double s = 0;
          for (int j = 0; j < m; ++j) s += hrow[j] * dy[static_cast<size_t>(j)];
          resid[static_cast<size_t>(i)] -= s;
        }
        chol_solve_vec(lh, resid);
        for (int i = 0; i < m; ++i) dy[static_cast<size_t>(i)] += resid[static_cast<size_t>(i)];
      }
      dx = rp;
      for (int i = 0; i < m; ++i) {
        const double dyi = dy[static_cast<size_t>(i)];
        if (dyi == 0.0) continue;
        for (const auto& e : prob.fi[static_cast<size_t>(i)]) dx.at(e.r, e.c) += dyi * e.w;
      }
      // dZ = X^{-1} Rc - X^{-1} dX Z, symmetrized
      dz = rmul(xinv, rc);
      const RMat t = rmul(rmul(xinv, dx), z);
      for (size_t i = 0; i < dz.a.size(); ++i) dz.a[i] -= t.a[i];
      dz.symmetrize();
    };

    // predictor
    RMat rc = rmul(x, z);
    for (auto& v : rc.a) v = -v;
    std::vector<double> dy_a;
    RMat dx_a, dz_a;
    newton(rc, dy_a, dx_a, dz_a);
    const double ap_a = max_step(lx, dx_a, opt.step_fraction);
    const double ad_a = max_step(lz, dz_a, opt.step_fraction);

    // Mehrotra centering weight
    RMat xa = x, za = z;
    for (size_t i = 0; i < xa.a.size(); ++i) {
      xa.a[i] += ap_a * dx_a.a[i];
      za.a[i] += ad_a * dz_a.a[i];
    }
    const double mu_aff = rdot(xa, za) / n;
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::min(1.0, std::max(1e-10, sigma));

    // corrector
    rc = rmul(x, z);
    const RMat cross = rmul(dx_a, dz_a);
    for (size_t i = 0; i < rc.a.size(); ++i) rc.a[i] = -rc.a[i] - cross.a[i];
    for (int i = 0; i < n; ++i) rc.at(i, i) += sigma * mu;

    std::vector<double> dy;
    RMat dx, dz;
    newton(rc, dy, dx, dz);
    const double ap = max_step(lx, dx, opt.step_fraction);
    const double ad = max_step(lz, dz, opt.step_fraction);

    for (int i = 0; i < m; ++i) y[static_cast<size_t>(i)] += ap * dy[static_cast<size_t>(i)];
    for (size_t i = 0; i < x.a.size(); ++i) {
      x.a[i] += ap * dx.a[i];
      z.a[i] += ad * dz.a[i];
    }
  }

  best.status = SdpStatus::iteration_limit;
  return best;
}

}  // namespace steerdi
