#pragma once

#include "fqrep/module.hpp"

// Two-vertex double-arrow path algebra and its standard module families,
// shared by module, bilinear-form, and embedding tests.

namespace fqrep::fixtures {

// basis order: e1, e2, a, b with a,b running from vertex 1 to vertex 2
inline FdAlgebra kronecker_algebra(FqRef K) {
  u32 n = 4;
  std::vector<u32> sc(64, 0);
  auto at = [&](u32 i, u32 j, u32 k) -> u32& { return sc[(i * n + j) * n + k]; };
  at(0, 0, 0) = 1;  // e1 e1
  at(1, 1, 1) = 1;  // e2 e2
  at(2, 0, 2) = 1;  // a e1 = a
  at(1, 2, 2) = 1;  // e2 a = a
  at(3, 0, 3) = 1;  // b e1 = b
  at(1, 3, 3) = 1;  // e2 b = b
  Vec unit = {1, 1, 0, 0};
  return FdAlgebra(K, n, std::move(sc), std::move(unit));
}

// module from the two structure maps V1 -> V2 (rows of alpha/beta = dim V2)
inline FdModule kronecker_module(FqRef K, const Matrix& alpha, const Matrix& beta) {
  u32 n1 = alpha.cols(), n2 = alpha.rows();
  require(beta.cols() == n1 && beta.rows() == n2, "kronecker_module: shape mismatch");
  u32 n = n1 + n2;
  FdModule m;
  m.K = K;
  m.dim = n;
  Matrix e1(K, n, n), e2(K, n, n), a(K, n, n), b(K, n, n);
  for (u32 i = 0; i < n1; ++i) e1.set(i, i, 1);
  for (u32 i = 0; i < n2; ++i) e2.set(n1 + i, n1 + i, 1);
  for (u32 i = 0; i < n2; ++i)
    for (u32 j = 0; j < n1; ++j) {
      a.set(n1 + i, j, alpha.at(i, j));
      b.set(n1 + i, j, beta.at(i, j));
    }
  m.act = {e1, e2, a, b};
  return m;
}

// dimension vector (n, n+1), maps stacked identity / shifted identity
inline FdModule kronecker_preprojective(FqRef K, u32 n) {
  Matrix alpha(K, n + 1, n), beta(K, n + 1, n);
  for (u32 i = 0; i < n; ++i) {
    alpha.set(i, i, 1);
    beta.set(i + 1, i, 1);
  }
  return kronecker_module(K, alpha, beta);
}

// regular module with alpha = identity, beta = companion of f
inline FdModule kronecker_regular(FqRef K, const kpoly::Poly& f) {
  u32 n = static_cast<u32>(kpoly::deg(f));
  Matrix beta(K, n, n);
  for (u32 i = 0; i + 1 < n; ++i) beta.set(i + 1, i, 1);
  for (u32 i = 0; i < n; ++i) beta.set(i, n - 1, K->neg(f[i]));
  return kronecker_module(K, Matrix::identity(K, n), beta);
}

}  // namespace fqrep::fixtures
