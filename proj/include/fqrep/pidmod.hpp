#pragma once

#include "fqrep/module.hpp"
#include "fqrep/skewpoly.hpp"

namespace fqrep {

namespace detail {

inline void set_block(Matrix& A, u32 r0, u32 c0, const Matrix& B) {
  for (u32 i = 0; i < B.rows(); ++i)
    for (u32 j = 0; j < B.cols(); ++j) A.set(r0 + i, c0 + j, B.at(i, j));
}

}  // namespace detail

// Finite-length left module over a skew polynomial ring, realized over the
// prime field: X is the action of x and W the action of the multiplicative
// generator of the coefficient field.  For cyclic quotients the basis slot
// i*m + j holds digit j of the coefficient of x^i.
struct PidModule {
  skew::SkewRing R;
  Matrix X;
  Matrix W;
  std::optional<skew::SkewPoly> socle_atom;  // atom under the socle, when known

  u32 dim_p() const { return X.rows(); }
  u32 dim_D() const { return X.rows() / R.D->degree(); }
};

// matrix of the left action of the coefficient a through the W-structure
inline Matrix coeff_action(const PidModule& M, u32 a) {
  auto d = M.R.D->digits(a);
  u32 n = M.dim_p();
  Matrix A(M.R.Fp, n, n);
  Matrix P = Matrix::identity(M.R.Fp, n);
  for (size_t j = 0; j < d.size(); ++j) {
    if (d[j]) A = A + P.scal(d[j]);
    if (j + 1 < d.size()) P = P * M.W;
  }
  return A;
}

// action of a full ring element (Horner from the top coefficient)
inline Matrix poly_action(const PidModule& M, const skew::SkewPoly& f) {
  u32 n = M.dim_p();
  Matrix A(M.R.Fp, n, n);
  for (i64 i = kpoly::deg(f); i >= 0; --i)
    A = A * M.X + coeff_action(M, f[static_cast<size_t>(i)]);
  return A;
}

// the W-structure makes the space a vector space over the coefficient field
// and X is semilinear over it: X*d = s(d)*X as operators
inline void validate_pid_module(const PidModule& M) {
  u32 m = M.R.D->degree();
  require(M.X.rows() == M.X.cols() && M.W.rows() == M.W.cols() &&
              M.X.rows() == M.W.rows(),
          "pid module: action matrices must be square of equal size");
  require(M.dim_p() % m == 0, "pid module: dimension not divisible");
  kpoly::Poly field_poly(M.R.D->modulus().begin(), M.R.D->modulus().end());
  Matrix Z(M.R.Fp, M.dim_p(), M.dim_p());
  require(kpoly::eval_matrix(*M.R.Fp, field_poly, M.W) == Z,
          "pid module: W does not satisfy the coefficient field polynomial");
  require(M.X * M.W == coeff_action(M, M.R.s(M.R.D->x_class())) * M.X,
          "pid module: twist law fails");
}

// view through the two distinguished operators, over the prime field
inline FdModule pid_to_fdmodule(const PidModule& M) {
  return FdModule{M.R.Fp, M.dim_p(), {M.W, M.X}};
}

// direct sum over a common ring, both actions block diagonal
inline PidModule pid_dsum(const PidModule& A, const PidModule& B) {
  require(A.R.D->modulus() == B.R.D->modulus() && A.R.twist == B.R.twist,
          "pid_dsum: modules over different rings");
  u32 da = A.dim_p(), db = B.dim_p();
  Matrix X(A.R.Fp, da + db, da + db), W(A.R.Fp, da + db, da + db);
  detail::set_block(X, 0, 0, A.X);
  detail::set_block(X, da, da, B.X);
  detail::set_block(W, 0, 0, A.W);
  detail::set_block(W, da, da, B.W);
  return PidModule{A.R, X, W, std::nullopt};
}

// cyclic quotient by a monic g in the power basis: twisted shift blocks
// below the diagonal, coefficients of g down the last block column
inline PidModule cyclic_module(const skew::SkewRing& R, const skew::SkewPoly& g) {
  require(kpoly::deg(g) >= 1 && g.back() == 1, "cyclic_module: monic input");
  u32 N = static_cast<u32>(kpoly::deg(g));
  u32 m = R.D->degree();
  u32 dim = N * m;
  Matrix S = Matrix::from_flat(R.Fp, m, m, R.D->frob_matrix(R.twist));
  Matrix X(R.Fp, dim, dim);
  for (u32 i = 0; i + 1 < N; ++i) detail::set_block(X, (i + 1) * m, i * m, S);
  for (u32 k = 0; k < N; ++k) {
    if (!g[k]) continue;
    Matrix L = Matrix::from_flat(R.Fp, m, m, R.D->mult_matrix(g[k]));
    detail::set_block(X, k * m, (N - 1) * m, (L * S).neg());
  }
  Matrix W(R.Fp, dim, dim);
  Matrix Lw = Matrix::from_flat(R.Fp, m, m, R.D->mult_matrix(R.D->x_class()));
  for (u32 i = 0; i < N; ++i) detail::set_block(W, i * m, i * m, Lw);
  return PidModule{R, X, W, std::nullopt};
}

// The unique indecomposable of length n over the atom p.  The quotient by
// p^n itself need not be indecomposable: the right model is the quotient by
// the n-th power of the bound b of p, which splits into r = deg(b)/deg(p)
// isomorphic indecomposable summands (the block is matrices of size r over a
// discrete valuation ring).  When r = 1 the chain of two-sided quotients
// makes the cyclic module itself uniserial and no splitting is needed.
inline PidModule indec_module(const skew::SkewRing& R, const skew::SkewPoly& p,
                              u32 n, const Caps& caps = default_caps()) {
  require(n >= 1, "indec_module: length must be positive");
  require(kpoly::deg(p) >= 1, "indec_module: atom must have positive degree");
  skew::SkewPoly pm = skew::monic_left(R, p);
  u32 dim = n * static_cast<u32>(kpoly::deg(pm)) * R.D->degree();
  require(dim <= caps.matrix_dim, "indec_module: dimension over cap");
  if (n == 1) {  // the cyclic quotient by an atom is always simple
    PidModule M = cyclic_module(R, pm);
    M.socle_atom = pm;
    return M;
  }
  skew::CenterData cd = skew::center_and_bound(R, pm, caps);
  u32 r = static_cast<u32>(kpoly::deg(cd.b) / kpoly::deg(pm));
  if (r == 1) {
    PidModule M = cyclic_module(R, skew::pow(R, pm, n));
    M.socle_atom = pm;
    return M;
  }
  PidModule big = cyclic_module(R, skew::pow(R, cd.b, n));
  auto parts = decompose(pid_to_fdmodule(big), 2357, caps);
  require(parts.size() == r, "indec_module: unexpected block splitting");
  for (const auto& part : parts)
    require(part.dim == dim, "indec_module: uneven block splitting");
  return PidModule{R, parts[0].act[1], parts[0].act[0], pm};
}

// matrix of [v mod g_from -> v*u mod g_to] on the power bases; right
// multiplication commutes with the left action, so this is a morphism
inline Matrix right_mult_matrix(const skew::SkewRing& R, const skew::SkewPoly& u,
                                const skew::SkewPoly& g_from,
                                const skew::SkewPoly& g_to) {
  require(skew::is_right_divisor(R, g_to, skew::mul(R, g_from, u)),
          "right_mult_matrix: not well defined on the quotients");
  u32 N1 = static_cast<u32>(kpoly::deg(g_from));
  u32 N2 = static_cast<u32>(kpoly::deg(g_to));
  u32 m = R.D->degree();
  Matrix A(R.Fp, N2 * m, N1 * m);
  for (u32 i = 0; i < N1; ++i) {
    skew::SkewPoly r = skew::div_r(R, skew::mul(R, skew::xpow(i), u), g_to).r;
    for (size_t k = 0; k < r.size(); ++k) {
      if (!r[k]) continue;
      Matrix L = Matrix::from_flat(R.Fp, m, m, R.D->mult_matrix(r[k]));
      detail::set_block(A, static_cast<u32>(k) * m, i * m, L);
    }
  }
  return A;
}

// conjugacy invariant of the simple module attached to an atom; equal keys
// are necessary for similarity, so this is a cheap first filter
inline kpoly::Poly similarity_key(const skew::SkewRing& R,
                                  const skew::SkewPoly& p,
                                  const Caps& caps = default_caps()) {
  return kpoly::charpoly(indec_module(R, p, 1, caps).X);
}

// atoms are similar when their simple modules are isomorphic; for simples a
// nonzero morphism is already an isomorphism
inline bool similar(const skew::SkewRing& R, const skew::Atom& a,
                    const skew::Atom& b, const Caps& caps = default_caps()) {
  if (kpoly::deg(a.poly) != kpoly::deg(b.poly)) return false;
  if (a.key.empty()) a.key = similarity_key(R, a.poly, caps);
  if (b.key.empty()) b.key = similarity_key(R, b.poly, caps);
  if (a.key != b.key) return false;
  FdModule Ma = pid_to_fdmodule(indec_module(R, a.poly, 1, caps));
  FdModule Mb = pid_to_fdmodule(indec_module(R, b.poly, 1, caps));
  return hom_dim(Ma, Mb) > 0;
}

inline bool similar(const skew::SkewRing& R, const skew::SkewPoly& p,
                    const skew::SkewPoly& q, const Caps& caps = default_caps()) {
  skew::Atom a{p, {}}, b{q, {}};
  return similar(R, a, b, caps);
}

namespace detail {

// a morphism of the requested rank between indecomposables of the same
// block; the morphisms of smaller rank form a proper subspace, so scanning
// the basis and then seeded combinations finds one quickly
inline Matrix full_rank_hom(const FdModule& A, const FdModule& B, u32 target,
                            u64 seed) {
  auto H = hom_space(A, B);
  for (const auto& T : H)
    if (rank(T) == target) return T;
  Rng rng(seed);
  for (u32 tries = 0; tries < 512; ++tries) {
    Matrix T(A.K, B.dim, A.dim);
    for (const auto& Hi : H) {
      u32 c = static_cast<u32>(rng.below(A.K->q()));
      if (c) T = T + Hi.scal(c);
    }
    if (rank(T) == target) return T;
  }
  throw ValidationError("ar_sequence: no morphism of full rank found");
}

}  // namespace detail

// Almost split sequence ending (and starting) at the length-n indecomposable
// over p: the middle term is the length n+1 module, joined by the length n-1
// module when n >= 2.
struct AlmostSplitSeq {
  PidModule left;
  std::vector<PidModule> middle;
  PidModule right;
  Matrix f;  // left -> middle
  Matrix g;  // middle -> right
};

// When the cyclic quotients are themselves the indecomposables, f embeds by
// right multiplication with p and projects, g projects and embeds with a
// sign.  Otherwise the maps are found inside the morphism spaces: an
// injective map up, a surjective map down, and a completion solved so the
// composite through the middle vanishes.
inline AlmostSplitSeq ar_sequence(const skew::SkewRing& R,
                                  const skew::SkewPoly& p, u32 n,
                                  const Caps& caps = default_caps()) {
  require(n >= 1, "ar_sequence: length must be positive");
  skew::SkewPoly pm = skew::monic_left(R, p);
  PidModule En = indec_module(R, pm, n, caps);
  PidModule Eup = indec_module(R, pm, n + 1, caps);
  AlmostSplitSeq seq{En, {}, En, Matrix(R.Fp, 0, 0), Matrix(R.Fp, 0, 0)};
  skew::CenterData cd = skew::center_and_bound(R, pm, caps);
  if (kpoly::deg(cd.b) == kpoly::deg(pm)) {
    auto gpow = [&](u32 k) { return skew::pow(R, pm, k); };
    Matrix mul_up = right_mult_matrix(R, pm, gpow(n), gpow(n + 1));
    Matrix proj_down = right_mult_matrix(R, kpoly::one(), gpow(n + 1), gpow(n));
    if (n == 1) {
      seq.middle = {Eup};
      seq.f = mul_up;
      seq.g = proj_down;
      return seq;
    }
    PidModule Edown = indec_module(R, pm, n - 1, caps);
    seq.middle = {Eup, Edown};
    seq.f = Matrix::vstack(
        mul_up, right_mult_matrix(R, kpoly::one(), gpow(n), gpow(n - 1)));
    seq.g = Matrix::hstack(
        proj_down, right_mult_matrix(R, pm, gpow(n - 1), gpow(n)).neg());
    return seq;
  }
  FdModule Fn = pid_to_fdmodule(En), Fup = pid_to_fdmodule(Eup);
  u32 d = En.dim_p();
  Matrix f1 = detail::full_rank_hom(Fn, Fup, d, 2357);
  Matrix g1 = detail::full_rank_hom(Fup, Fn, d, 5711);
  Matrix h = (g1 * f1).neg();
  if (n == 1) {
    // the composite lands in the radical of a division endomorphism ring
    require(h == Matrix(R.Fp, d, d), "ar_sequence: socle composite not zero");
    seq.middle = {Eup};
    seq.f = f1;
    seq.g = g1;
    return seq;
  }
  PidModule Edown = indec_module(R, pm, n - 1, caps);
  FdModule Fdown = pid_to_fdmodule(Edown);
  Matrix f2 = detail::full_rank_hom(Fn, Fdown, Edown.dim_p(), 2357);
  // complete the square: g2 with g2 * f2 = -(g1 * f1), solved inside the
  // morphism space so the pair stays a chain map
  auto Hd = hom_space(Fdown, Fn);
  Matrix C(R.Fp, d * d, static_cast<u32>(Hd.size()));
  for (size_t t = 0; t < Hd.size(); ++t) {
    Matrix ht = Hd[t] * f2;
    for (u32 i = 0; i < d; ++i)
      for (u32 j = 0; j < d; ++j)
        C.set(i * d + j, static_cast<u32>(t), ht.at(i, j));
  }
  Matrix rhs(R.Fp, d * d, 1);
  for (u32 i = 0; i < d; ++i)
    for (u32 j = 0; j < d; ++j) rhs.set(i * d + j, 0, h.at(i, j));
  auto sol = solve_linear(C, rhs);
  require(sol.consistent, "ar_sequence: down leg has no completion");
  Matrix g2(R.Fp, d, Edown.dim_p());
  for (size_t t = 0; t < Hd.size(); ++t) {
    u32 c = sol.particular.at(static_cast<u32>(t), 0);
    if (c) g2 = g2 + Hd[t].scal(c);
  }
  seq.middle = {Eup, Edown};
  seq.f = Matrix::vstack(f1, f2);
  seq.g = Matrix::hstack(g1, g2);
  return seq;
}

// Exactness, non-splitness, and the right-almost-split lifting property of
// the sequence, checked against every indecomposable of length <= len_cap in
// the same uniserial block.  Liftable maps into the right end form the image
// of composition with g; comparing its rank with the morphism space (or, at
// the right end itself, with the radical of the endomorphism algebra)
// certifies that exactly the non-retractions lift.
inline void verify_ar_sequence(const skew::SkewRing& R, const AlmostSplitSeq& seq,
                               u32 len_cap, const Caps& caps = default_caps()) {
  u32 dim_l = seq.left.dim_p(), dim_r = seq.right.dim_p();
  u32 dim_mid = 0;
  for (const auto& M : seq.middle) dim_mid += M.dim_p();
  require(seq.f.rows() == dim_mid && seq.f.cols() == dim_l &&
              seq.g.rows() == dim_r && seq.g.cols() == dim_mid,
          "ar sequence: map shapes");
  require(seq.g * seq.f == Matrix(R.Fp, dim_r, dim_l),
          "ar sequence: composition is not zero");
  require(rank(seq.f) == dim_l, "ar sequence: left map not injective");
  require(rank(seq.g) == dim_r, "ar sequence: right map not surjective");
  require(rank(seq.f) + rank(seq.g) == dim_mid,
          "ar sequence: not exact in the middle");

  FdModule mid = pid_to_fdmodule(seq.middle[0]);
  for (size_t i = 1; i < seq.middle.size(); ++i)
    mid = dsum(mid, pid_to_fdmodule(seq.middle[i]));
  FdModule right = pid_to_fdmodule(seq.right);

  // no section: g composed with a morphism never gives the identity
  auto H = hom_space(right, mid);
  Matrix C(R.Fp, dim_r * dim_r, static_cast<u32>(H.size()));
  for (size_t t = 0; t < H.size(); ++t) {
    Matrix gh = seq.g * H[t];
    for (u32 i = 0; i < dim_r; ++i)
      for (u32 j = 0; j < dim_r; ++j) C.set(i * dim_r + j, static_cast<u32>(t), gh.at(i, j));
  }
  Matrix id_vec(R.Fp, dim_r * dim_r, 1);
  for (u32 i = 0; i < dim_r; ++i) id_vec.set(i * dim_r + i, 0, 1);
  require(!solve_linear(C, id_vec).consistent, "ar sequence: a section exists");

  require(seq.right.socle_atom.has_value(), "ar sequence: no atom recorded");
  const auto& p = *seq.right.socle_atom;
  u32 n = seq.right.dim_D() / static_cast<u32>(kpoly::deg(p));
  for (u32 j = 1; j <= len_cap; ++j) {
    FdModule Ej = pid_to_fdmodule(indec_module(R, p, j, caps));
    auto Hm = hom_space(Ej, mid);
    u32 cols = static_cast<u32>(Hm.size());
    Matrix L(R.Fp, dim_r * Ej.dim, cols);
    for (u32 t = 0; t < cols; ++t) {
      Matrix gh = seq.g * Hm[t];
      for (u32 i = 0; i < dim_r; ++i)
        for (u32 c = 0; c < Ej.dim; ++c) L.set(i * Ej.dim + c, t, gh.at(i, c));
    }
    u32 expected = j == n
                       ? end_algebra(right, caps).local_data().radical_dim
                       : hom_dim(Ej, right);
    require(rank(L) == expected, "ar sequence: lifting property fails");
  }
}

// indices of the modules on which the two-sided element acts invertibly;
// exactly these restrict from the localization at its powers
inline std::vector<u32> localization_survivors(const skew::SkewRing& R,
                                               const skew::SkewPoly& b,
                                               const std::vector<PidModule>& mods) {
  require(kpoly::deg(b) >= 1, "localization_survivors: proper element required");
  require(skew::is_two_sided(R, b), "localization_survivors: b is not two-sided");
  std::vector<u32> out;
  for (size_t i = 0; i < mods.size(); ++i)
    if (is_invertible(poly_action(mods[i], b))) out.push_back(static_cast<u32>(i));
  return out;
}

// endolength through the module layer
inline u32 pid_endolength(const PidModule& M, u64 seed = 2357,
                          const Caps& caps = default_caps()) {
  return endolength(pid_to_fdmodule(M), seed, caps);
}

// the center-length bound on the endolength of the simple module over p
inline bool endol_bound_holds(const skew::SkewRing& R, const skew::SkewPoly& p,
                              const skew::CenterData& cd,
                              const Caps& caps = default_caps()) {
  u32 endol = pid_endolength(indec_module(R, p, 1, caps), 2357, caps);
  return endol <= cd.z_rank * cd.ell;
}

}  // namespace fqrep
