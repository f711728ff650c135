#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace steerdi {

using cplx = std::complex<double>;

/// Tolerance ladder used across the library: structural identities are held
/// to 1e-12, spectral quantities (eigenvalues, PSD checks) to 1e-10, and
/// anything that has passed through the SDP solver to 1e-8.
namespace tol {
inline constexpr double structural = 1e-12;
inline constexpr double spectral = 1e-10;
inline constexpr double sdp = 1e-8;
}  // namespace tol

/// Dense square complex matrix, row-major. Small dimensions only (2..16 for
/// the quantum objects, ~10^2 for moment matrices).
class DenseOperator {
 public:
  DenseOperator() = default;
  explicit DenseOperator(int dim) : dim_(check_dim(dim)), a_(static_cast<size_t>(dim) * dim) {}

  static DenseOperator identity(int dim) {
    DenseOperator m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static DenseOperator zero(int dim) { return DenseOperator(dim); }

  int dim() const { return dim_; }

  cplx& operator()(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
  const cplx& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

  const std::vector<cplx>& entries() const { return a_; }

  DenseOperator& operator+=(const DenseOperator& o) {
    require_same_dim(o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  DenseOperator& operator-=(const DenseOperator& o) {
    require_same_dim(o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  DenseOperator& operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
  }

  friend DenseOperator operator+(DenseOperator a, const DenseOperator& b) { return a += b; }
  friend DenseOperator operator-(DenseOperator a, const DenseOperator& b) { return a -= b; }
  friend DenseOperator operator*(DenseOperator a, cplx s) { return a *= s; }
  friend DenseOperator operator*(cplx s, DenseOperator a) { return a *= s; }

  friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
    a.require_same_dim(b);
    const int n = a.dim_;
    DenseOperator c(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  DenseOperator adjoint() const {
    DenseOperator m(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }
  DenseOperator transpose() const {
    DenseOperator m(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }
  DenseOperator conj() const {
    DenseOperator m(dim_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = std::conj(a_[i]);
    return m;
  }

  cplx trace() const {
    cplx t = 0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs_diff(const DenseOperator& o) const {
    require_same_dim(o);
    double m = 0;
    for (size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
    return m;
  }

  bool is_hermitian(double eps = tol::structural) const {
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j)
        if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > eps) return false;
    return true;
  }

 private:
  static int check_dim(int d) {
    if (d <= 0) throw std::invalid_argument("DenseOperator: dim must be positive");
    return d;
  }
  void require_same_dim(const DenseOperator& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("DenseOperator: dimension mismatch");
  }

  int dim_ = 0;
  std::vector<cplx> a_;
};

/// Normalized state vector.
struct Ket {
  std::vector<cplx> amp;

  Ket() = default;
  explicit Ket(std::vector<cplx> a) : amp(std::move(a)) { normalize(); }

  int dim() const { return static_cast<int>(amp.size()); }

  double norm() const {
    double s = 0;
    for (const auto& v : amp) s += std::norm(v);
    return std::sqrt(s);
  }

  void normalize() {
    const double n = norm();
    if (n < tol::structural) throw std::invalid_argument("Ket: cannot normalize null vector");
    for (auto& v : amp) v /= n;
  }

  DenseOperator projector() const {
    DenseOperator p(dim());
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) p(i, j) = amp[i] * std::conj(amp[j]);
    return p;
  }
};

inline cplx inner(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
  cplx s = 0;
  for (int i = 0; i < a.dim(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
  return s;
}

inline Ket apply(const DenseOperator& m, const Ket& k) {
  if (m.dim() != k.dim()) throw std::invalid_argument("apply: dimension mismatch");
  std::vector<cplx> out(k.amp.size());
  for (int i = 0; i < m.dim(); ++i) {
    cplx s = 0;
    for (int j = 0; j < m.dim(); ++j) s += m(i, j) * k.amp[j];
    out[static_cast<size_t>(i)] = s;
  }
  Ket r;
  r.amp = std::move(out);
  return r;
}

/// Kronecker product; index convention (i1*dimB + i2, j1*dimB + j2).
inline DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
  const int da = a.dim(), db = b.dim();
  DenseOperator c(da * db);
  for (int i1 = 0; i1 < da; ++i1)
    for (int j1 = 0; j1 < da; ++j1) {
      const cplx v = a(i1, j1);
      if (v == cplx{}) continue;
      for (int i2 = 0; i2 < db; ++i2)
        for (int j2 = 0; j2 < db; ++j2) c(i1 * db + i2, j1 * db + j2) = v * b(i2, j2);
    }
  return c;
}

inline DenseOperator kron(const DenseOperator& a, const DenseOperator& b, const DenseOperator& c) {
  return kron(kron(a, b), c);
}
inline DenseOperator kron(const DenseOperator& a, const DenseOperator& b, const DenseOperator& c,
                          const DenseOperator& d) {
  return kron(kron(a, b), kron(c, d));
}

inline Ket kron(const Ket& a, const Ket& b) {
  std::vector<cplx> v(static_cast<size_t>(a.dim()) * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j) v[static_cast<size_t>(i) * b.dim() + j] = a.amp[i] * b.amp[j];
  Ket r;
  r.amp = std::move(v);
  return r;
}

/// Partial trace over the factors NOT listed in `keep`. `dims` are the tensor
/// factor dimensions, most significant first (matching kron above); `keep`
/// holds indices into `dims` in increasing order.
inline DenseOperator partial_trace(const DenseOperator& a, const std::vector<int>& dims,
                                   const std::vector<int>& keep) {
  const int nf = static_cast<int>(dims.size());
  long prod = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("partial_trace: factor dims must be positive");
    prod *= d;
  }
  if (prod != a.dim()) throw std::invalid_argument("partial_trace: dims do not factor the operator");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= nf) throw std::invalid_argument("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1]) throw std::invalid_argument("partial_trace: keep must be increasing");
  }

  int dkeep = 1;
  for (int k : keep) dkeep *= dims[static_cast<size_t>(k)];

  std::vector<int> stride(dims.size());
  int acc = 1;
  for (int f = nf - 1; f >= 0; --f) {
    stride[static_cast<size_t>(f)] = acc;
    acc *= dims[static_cast<size_t>(f)];
  }

  std::vector<int> traced;
  for (int f = 0; f < nf; ++f)
    if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);

  // enumerate kept multi-indices (row, col) and sum over traced multi-index
  const auto unrank = [](long r, const std::vector<int>& ds, const std::vector<int>& which,
                         std::vector<int>& out) {
    for (int i = static_cast<int>(which.size()) - 1; i >= 0; --i) {
      const int d = ds[static_cast<size_t>(which[static_cast<size_t>(i)])];
      out[static_cast<size_t>(i)] = static_cast<int>(r % d);
      r /= d;
    }
  };

  long ntr = 1;
  for (int f : traced) ntr *= dims[static_cast<size_t>(f)];

  DenseOperator out(dkeep);
  std::vector<int> ki(keep.size()), kj(keep.size()), ti(traced.size());
  for (long ri = 0; ri < dkeep; ++ri) {
    unrank(ri, dims, keep, ki);
    for (long rj = 0; rj < dkeep; ++rj) {
      unrank(rj, dims, keep, kj);
      cplx s = 0;
      for (long t = 0; t < ntr; ++t) {
        unrank(t, dims, traced, ti);
        long row = 0, col = 0;
        for (size_t f = 0; f < keep.size(); ++f) {
          row += static_cast<long>(ki[f]) * stride[static_cast<size_t>(keep[f])];
          col += static_cast<long>(kj[f]) * stride[static_cast<size_t>(keep[f])];
        }
        for (size_t f = 0; f < traced.size(); ++f) {
          row += static_cast<long>(ti[f]) * stride[static_cast<size_t>(traced[f])];
          col += static_cast<long>(ti[f]) * stride[static_cast<size_t>(traced[f])];
        }
        s += a(static_cast<int>(row), static_cast<int>(col));
      }
      out(static_cast<int>(ri), static_cast<int>(rj)) = s;
    }
  }
  return out;
}

struct EigResult {
  std::vector<double> values;  // ascending
  DenseOperator vectors;       // columns are eigenvectors, matching values
};

/// Cyclic Jacobi diagonalization for Hermitian matrices. Good to ~1e-14 on
/// the desk-scale dimensions used here.
inline EigResult hermitian_eig(const DenseOperator& a) {
  if (!a.is_hermitian(1e-9)) throw std::invalid_argument("hermitian_eig: input not Hermitian");
  const int n = a.dim();
  DenseOperator m = a;
  // force exact Hermiticity so rotations see consistent data
  for (int i = 0; i < n; ++i) {
    m(i, i) = cplx(m(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = avg;
      m(j, i) = std::conj(avg);
    }
  }
  DenseOperator v = DenseOperator::identity(n);

  double scale = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
  if (scale == 0) scale = 1;

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += std::norm(m(i, j));
    if (std::sqrt(off) < 1e-15 * scale * n) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = m(p, q);
        const double r = std::abs(apq);
        if (r < 1e-18 * scale) continue;
        const cplx phase = apq / r;  // e^{i theta}
        const double app = m(p, p).real();
        const double aqq = m(q, q).real();
        const double tau = (aqq - app) / (2 * r);
        const double s_ = std::sqrt(1 + tau * tau);
        // small-|t| root of t^2 - 2*tau*t - 1 = 0, evaluated without cancellation
        const double t = (tau >= 0) ? (-1.0 / (tau + s_)) : (1.0 / (s_ - tau));
        const double c = 1.0 / std::sqrt(1 + t * t);
        const double s = t * c;

        // unitary U: U(p,p)=c, U(p,q)=-phase*s, U(q,p)=conj(phase)*s, U(q,q)=c
        for (int k = 0; k < n; ++k) {
          const cplx mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp + std::conj(phase) * s * mkq;
          m(k, q) = -phase * s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const cplx mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk + phase * s * mqk;
          m(q, k) = -std::conj(phase) * s * mpk + c * mqk;
        }
        m(p, q) = 0;
        m(q, p) = 0;
        m(p, p) = cplx(m(p, p).real(), 0.0);
        m(q, q) = cplx(m(q, q).real(), 0.0);
        for (int k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp + std::conj(phase) * s * vkq;
          v(k, q) = -phase * s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return m(i, i).real() < m(j, j).real(); });

  EigResult res;
  res.values.resize(static_cast<size_t>(n));
  res.vectors = DenseOperator(n);
  for (int c = 0; c < n; ++c) {
    res.values[static_cast<size_t>(c)] = m(order[static_cast<size_t>(c)], order[static_cast<size_t>(c)]).real();
    for (int rrow = 0; rrow < n; ++rrow) res.vectors(rrow, c) = v(rrow, order[static_cast<size_t>(c)]);
  }
  return res;
}

inline double min_eigenvalue(const DenseOperator& a) { return hermitian_eig(a).values.front(); }

inline bool is_density(const DenseOperator& rho, double trace_eps = 1e-10, double psd_eps = 1e-10) {
  if (!rho.is_hermitian(trace_eps)) return false;
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > trace_eps) return false;
  return min_eigenvalue(rho) >= -psd_eps;
}

/// Trace norm ||A||_1 of a Hermitian operator (sum of |eigenvalues|).
inline double trace_norm(const DenseOperator& a) {
  double s = 0;
  for (double v : hermitian_eig(a).values) s += std::abs(v);
  return s;
}

/// Unnormalized trace distance ||rho - sigma||_1; 2 for orthogonal pure states.
inline double trace_distance(const DenseOperator& rho, const DenseOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return trace_norm(rho - sigma);
}

/// <psi|rho|psi>.
inline double state_fidelity(const Ket& psi, const DenseOperator& rho) {
  if (psi.dim() != rho.dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  cplx s = 0;
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j) s += std::conj(psi.amp[i]) * rho(i, j) * psi.amp[j];
  return s.real();
}

inline cplx trace_of_product(const DenseOperator& a, const DenseOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_of_product: dimension mismatch");
  cplx s = 0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) s += a(i, j) * b(j, i);
  return s;
}

inline double real_trace_of_product(const DenseOperator& a, const DenseOperator& b) {
  return trace_of_product(a, b).real();
}

}  // namespace steerdi
