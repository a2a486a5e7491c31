#pragma once

#include "fqrep/algebra.hpp"

namespace fqrep {

// A module presented by the matrices of a fixed generator list acting on K^dim.
// Two modules are comparable when their generator lists line up positionally.
struct FdModule {
  FqRef K;
  u32 dim = 0;
  std::vector<Matrix> act;

  static FdModule zero(FqRef K, u32 ngens) {
    FdModule m;
    m.K = K;
    m.dim = 0;
    m.act.assign(ngens, Matrix(K, 0, 0));
    return m;
  }
};

inline FdModule dsum(const FdModule& a, const FdModule& b) {
  require(a.act.size() == b.act.size(), "dsum: generator count mismatch");
  FdModule m;
  m.K = a.K ? a.K : b.K;
  m.dim = a.dim + b.dim;
  for (size_t g = 0; g < a.act.size(); ++g) {
    Matrix M(m.K, m.dim, m.dim);
    for (u32 i = 0; i < a.dim; ++i)
      for (u32 j = 0; j < a.dim; ++j) M.set(i, j, a.act[g].at(i, j));
    for (u32 i = 0; i < b.dim; ++i)
      for (u32 j = 0; j < b.dim; ++j) M.set(a.dim + i, a.dim + j, b.act[g].at(i, j));
    m.act.push_back(std::move(M));
  }
  return m;
}

// check that an action realizes the structure constants of an algebra whose
// basis is the generator list
inline void validate_action(const FdAlgebra& A, const FdModule& M) {
  require(A.dim() == M.act.size(), "validate_action: basis size mismatch");
  const FqLevel& K = *M.K;
  Matrix unit_act(M.K, M.dim, M.dim);
  for (u32 i = 0; i < A.dim(); ++i)
    if (A.unit()[i])
      unit_act = unit_act + M.act[i].scal(A.unit()[i]);
  require(unit_act == Matrix::identity(M.K, M.dim), "validate_action: unit acts wrong");
  for (u32 i = 0; i < A.dim(); ++i)
    for (u32 j = 0; j < A.dim(); ++j) {
      Matrix lhs = M.act[i] * M.act[j];
      Matrix rhs(M.K, M.dim, M.dim);
      for (u32 k = 0; k < A.dim(); ++k) {
        u32 c = A.sc(i, j, k);
        if (c) rhs = rhs + M.act[k].scal(c);
      }
      require(lhs == rhs, "validate_action: structure constants violated");
      (void)K;
    }
}

// Basis of { T : T a_g = b_g T for all generators }, i.e. Hom(M, N).
// One dense system for the first generator, then the solution space is
// refined per generator by evaluating residuals on its current basis —
// keeps memory at one (nn*nm)^2 block instead of stacking all generators.
inline std::vector<Matrix> hom_space(const FdModule& M, const FdModule& N) {
  require(M.act.size() == N.act.size(), "hom_space: generator count mismatch");
  FqRef K = M.K ? M.K : N.K;
  u32 nm = M.dim, nn = N.dim;
  if (nm == 0 || nn == 0) return {};
  u32 unknowns = nn * nm;
  auto unvec = [&](const Matrix& cols, u32 c) {
    Matrix T(K, nn, nm);
    for (u32 i = 0; i < nn; ++i)
      for (u32 j = 0; j < nm; ++j) T.set(i, j, cols.at(i * nm + j, c));
    return T;
  };
  Matrix ker(K, 0, 0);
  bool first = true;
  for (size_t g = 0; g < M.act.size(); ++g) {
    const Matrix& A = M.act[g];
    const Matrix& B = N.act[g];
    if (first) {
      // coefficient matrix of T -> T A - B T on unit matrices
      Matrix sys(K, unknowns, unknowns);
      for (u32 i = 0; i < nn; ++i)
        for (u32 j = 0; j < nm; ++j) {
          u32 row = i * nm + j;
          for (u32 k = 0; k < nm; ++k) {
            u32 v = A.at(k, j);
            if (v) sys.set(row, i * nm + k, K->add(sys.at(row, i * nm + k), v));
          }
          for (u32 k = 0; k < nn; ++k) {
            u32 v = B.at(i, k);
            if (v) sys.set(row, k * nm + j, K->sub(sys.at(row, k * nm + j), v));
          }
        }
      ker = kernel_basis(sys);
      first = false;
      continue;
    }
    u32 s = ker.cols();
    if (s == 0) break;
    Matrix res(K, unknowns, s);
    for (u32 c = 0; c < s; ++c) {
      Matrix T = unvec(ker, c);
      Matrix R = T * A - B * T;
      for (u32 i = 0; i < nn; ++i)
        for (u32 j = 0; j < nm; ++j) res.set(i * nm + j, c, R.at(i, j));
    }
    ker = ker * kernel_basis(res);
  }
  if (first) {
    // no generators: every matrix is a morphism
    ker = Matrix::identity(K, unknowns);
  }
  std::vector<Matrix> out;
  for (u32 c = 0; c < ker.cols(); ++c) out.push_back(unvec(ker, c));
  return out;
}

inline u32 hom_dim(const FdModule& M, const FdModule& N) {
  return static_cast<u32>(hom_space(M, N).size());
}

inline FdAlgebra end_algebra(const FdModule& M, const Caps& caps = default_caps()) {
  require(M.dim > 0, "end_algebra: zero module");
  return FdAlgebra::from_matrix_span(M.K, hom_space(M, M), caps);
}

// restrict the action to an invariant subspace given by independent columns
inline FdModule restrict_to_columns(const FdModule& M, const Matrix& C) {
  FdModule out;
  out.K = M.K;
  out.dim = C.cols();
  for (const Matrix& A : M.act) {
    LinSolve s = solve_linear(C, A * C);
    require(s.consistent, "restrict_to_columns: subspace not invariant");
    out.act.push_back(s.particular);
  }
  return out;
}

inline Matrix column_space_basis(const Matrix& A) {
  Echelon e = rref(A);
  Matrix out(A.field(), A.rows(), e.rank);
  for (u32 k = 0; k < e.rank; ++k)
    for (u32 i = 0; i < A.rows(); ++i) out.set(i, k, A.at(i, e.pivot_cols[k]));
  return out;
}

namespace detail {

inline void decompose_into(const FdModule& M, std::vector<FdModule>& out, Rng& rng,
                           const Caps& caps) {
  if (M.dim == 0) return;
  FdAlgebra E = end_algebra(M, caps);
  auto e = E.find_split_idempotent(rng);
  if (!e) {
    out.push_back(M);
    return;
  }
  std::vector<Matrix> H = hom_space(M, M);
  Matrix Em(M.K, M.dim, M.dim);
  for (u32 i = 0; i < H.size(); ++i)
    if ((*e)[i]) Em = Em + H[i].scal((*e)[i]);
  Matrix C1 = column_space_basis(Em);
  Matrix C2 = column_space_basis(Matrix::identity(M.K, M.dim) - Em);
  require(C1.cols() + C2.cols() == M.dim, "decompose: idempotent split dims off");
  decompose_into(restrict_to_columns(M, C1), out, rng, caps);
  decompose_into(restrict_to_columns(M, C2), out, rng, caps);
}

}  // namespace detail

inline std::vector<FdModule> decompose(const FdModule& M, u64 seed = 2357,
                                       const Caps& caps = default_caps()) {
  std::vector<FdModule> out;
  Rng rng(seed);
  detail::decompose_into(M, out, rng, caps);
  return out;
}

inline bool is_indecomposable(const FdModule& M, const Caps& caps = default_caps()) {
  if (M.dim == 0) return false;
  return end_algebra(M, caps).local_data().local;
}

// Isomorphism of indecomposables: some hom-basis element is invertible
// (the non-isomorphisms between indecomposables form a subspace).
inline bool iso_indec(const FdModule& M, const FdModule& N) {
  if (M.dim != N.dim) return false;
  if (M.dim == 0) return true;
  for (const Matrix& T : hom_space(M, N))
    if (is_invertible(T)) return true;
  return false;
}

// endolength of an indecomposable from its local endomorphism algebra
inline u32 endolength_indec(const FdModule& M, const Caps& caps = default_caps()) {
  FdAlgebra E = end_algebra(M, caps);
  auto ld = E.local_data();
  require(ld.local, "endolength_indec: endomorphism algebra not local");
  u32 dim_p = M.dim * M.K->degree();
  require(dim_p % ld.residue_degree == 0, "endolength_indec: dimension not divisible");
  return dim_p / ld.residue_degree;
}

// endolength of an arbitrary module: decompose, then sum over pairwise
// non-isomorphic indecomposable summands (multiplicities do not contribute)
inline u32 endolength(const FdModule& M, u64 seed = 2357,
                      const Caps& caps = default_caps()) {
  if (M.dim == 0) return 0;
  std::vector<FdModule> parts = decompose(M, seed, caps);
  std::vector<u32> class_rep;
  for (u32 i = 0; i < parts.size(); ++i) {
    bool seen = false;
    for (u32 r : class_rep)
      if (iso_indec(parts[r], parts[i])) {
        seen = true;
        break;
      }
    if (!seen) class_rep.push_back(i);
  }
  u32 total = 0;
  for (u32 r : class_rep) total += endolength_indec(parts[r], caps);
  return total;
}

// full isomorphism test: match indecomposable summands with multiplicity
inline bool iso_modules(const FdModule& M, const FdModule& N, u64 seed = 2357,
                        const Caps& caps = default_caps()) {
  if (M.dim != N.dim) return false;
  std::vector<FdModule> pm = decompose(M, seed, caps);
  std::vector<FdModule> pn = decompose(N, seed + 1, caps);
  if (pm.size() != pn.size()) return false;
  std::vector<bool> used(pn.size(), false);
  for (const auto& x : pm) {
    bool matched = false;
    for (u32 j = 0; j < pn.size(); ++j) {
      if (used[j]) continue;
      if (iso_indec(x, pn[j])) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace fqrep
