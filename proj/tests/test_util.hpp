#pragma once

#include <random>

#include "steerdi/linalg.hpp"

namespace testutil {

using steerdi::cplx;
using steerdi::DenseOperator;
using steerdi::Ket;

inline DenseOperator random_hermitian(std::mt19937_64& rng, int dim, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  DenseOperator m(dim);
  for (int i = 0; i < dim; ++i) {
    m(i, i) = g(rng);
    for (int j = i + 1; j < dim; ++j) {
      const cplx v(g(rng), g(rng));
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

// Ginibre construction: G G^dag / tr, full rank almost surely.
inline DenseOperator random_density(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseOperator gmat(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) gmat(i, j) = cplx(g(rng), g(rng));
  DenseOperator rho = gmat * gmat.adjoint();
  rho *= cplx(1.0 / rho.trace().real(), 0);
  return rho;
}

inline Ket random_ket(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> amp(static_cast<size_t>(dim));
  for (auto& a : amp) a = cplx(g(rng), g(rng));
  return Ket(std::move(amp));
}

}  // namespace testutil
