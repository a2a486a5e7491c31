#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fqrep/algebra.hpp"
#include "fqrep/pidmod.hpp"

namespace fqrep::embed {

// A bimodule tying a finite-dimensional algebra on the left to a skew
// polynomial ring on the right, free of rank r as a right module.  The left
// action of the e-th algebra basis element on column vectors is an r x r
// matrix of skew polynomials acting by left multiplication, so the two sides
// commute by construction.  When `ann` is set the algebra acts through the
// quotient by that two-sided element and products of action matrices are
// only well defined modulo it.
struct EmbeddingBimodule {
  FdAlgebra lambda;                                 // receiving algebra
  skew::SkewRing gamma;                             // source ring
  u32 rank = 0;                                     // right rank r
  std::vector<std::vector<skew::SkewPoly>> action;  // per basis, flat r x r
  std::vector<std::string> labels;                  // basis labels for i/o
  std::optional<skew::SkewPoly> ann;                // two-sided annihilator

  const skew::SkewPoly& entry(u32 e, u32 a, u32 b) const {
    return action[e][static_cast<size_t>(a) * rank + b];
  }
};

namespace detail {

inline skew::SkewPoly reduce_entry(const EmbeddingBimodule& Z, skew::SkewPoly f) {
  if (Z.ann) f = skew::div_r(Z.gamma, f, *Z.ann).r;
  return f;
}

// product of flat r x r skew polynomial matrices, entries multiplied left to
// right so composition matches left multiplication on columns
inline std::vector<skew::SkewPoly> skew_matmul(const skew::SkewRing& R, u32 r,
                                               const std::vector<skew::SkewPoly>& A,
                                               const std::vector<skew::SkewPoly>& B) {
  std::vector<skew::SkewPoly> P(static_cast<size_t>(r) * r);
  for (u32 a = 0; a < r; ++a)
    for (u32 b = 0; b < r; ++b) {
      skew::SkewPoly acc;
      for (u32 c = 0; c < r; ++c)
        acc = kpoly::add(*R.D, acc,
                         skew::mul(R, A[static_cast<size_t>(a) * r + c],
                                   B[static_cast<size_t>(c) * r + b]));
      P[static_cast<size_t>(a) * r + b] = acc;
    }
  return P;
}

inline std::vector<skew::SkewPoly> skew_mataxpy(const skew::SkewRing& R, u32 c,
                                                const std::vector<skew::SkewPoly>& A,
                                                std::vector<skew::SkewPoly> acc) {
  if (acc.empty()) acc.assign(A.size(), skew::SkewPoly{});
  if (c)
    for (size_t t = 0; t < A.size(); ++t)
      acc[t] = kpoly::add(*R.D, acc[t], kpoly::scal(*R.D, c, A[t]));
  return acc;
}

}  // namespace detail

// Structural checks: shapes, a scalar field shared with the coefficient
// field (equal presentation, or the prime subfield whose codes coincide with
// the constant digits), entries commuting with that scalar field, the unit
// acting as the identity, and the action matrices multiplying the way the
// algebra's structure constants say they must.
inline void validate_bimodule(const EmbeddingBimodule& Z,
                              const Caps& caps = default_caps()) {
  const skew::SkewRing& R = Z.gamma;
  const u32 n = Z.lambda.dim();
  const u32 r = Z.rank;
  require(r >= 1, "bimodule: right rank must be positive");
  require(Z.action.size() == n, "bimodule: one action matrix per basis element");
  for (const auto& A : Z.action)
    require(A.size() == static_cast<size_t>(r) * r, "bimodule: action matrix shape");
  require(Z.labels.empty() || Z.labels.size() == n, "bimodule: label count");
  require(Z.lambda.K().p() == R.D->p(), "bimodule: characteristic mismatch");
  require(Z.lambda.K().degree() == 1 || Z.lambda.K().modulus() == R.D->modulus(),
          "bimodule: scalar field not realized inside the coefficient field");
  if (Z.ann) {
    require(kpoly::deg(*Z.ann) >= 1, "bimodule: annihilator must be proper");
    require(skew::is_two_sided(R, *Z.ann), "bimodule: annihilator must be two-sided");
  }
  skew::SkewPoly w{Z.lambda.K().x_class()};
  for (const auto& A : Z.action)
    for (const auto& f : A) {
      require(kpoly::deg(f) <= static_cast<i64>(caps.poly_deg),
              "bimodule: entry degree over cap");
      require(skew::mul(R, w, f) == skew::mul(R, f, w),
              "bimodule: entries do not commute with the scalar field");
    }
  std::vector<skew::SkewPoly> unit_act;
  for (u32 e = 0; e < n; ++e)
    unit_act = detail::skew_mataxpy(R, Z.lambda.unit()[e], Z.action[e],
                                    std::move(unit_act));
  for (u32 a = 0; a < r; ++a)
    for (u32 b = 0; b < r; ++b) {
      skew::SkewPoly want = (a == b) ? kpoly::one() : skew::SkewPoly{};
      require(detail::reduce_entry(Z, unit_act[static_cast<size_t>(a) * r + b]) == want,
              "bimodule: unit does not act as the identity");
    }
  for (u32 i = 0; i < n; ++i)
    for (u32 j = 0; j < n; ++j) {
      auto P = detail::skew_matmul(R, r, Z.action[i], Z.action[j]);
      std::vector<skew::SkewPoly> S;
      for (u32 k = 0; k < n; ++k)
        S = detail::skew_mataxpy(R, Z.lambda.sc(i, j, k), Z.action[k], std::move(S));
      for (size_t t = 0; t < P.size(); ++t)
        require(detail::reduce_entry(Z, P[t]) == detail::reduce_entry(Z, S[t]),
                "bimodule: left action is not an algebra morphism");
    }
}

// Image of a module under the functor the bimodule represents: the space is
// r stacked copies of the module and each basis element acts by its matrix
// of skew polynomials evaluated through the module structure.  When the
// scalar field of the receiving algebra is larger than the prime field its
// generator action is prepended, so morphism solves see the right linearity.
inline FdModule apply(const EmbeddingBimodule& Z, const PidModule& N,
                      const Caps& caps = default_caps()) {
  const skew::SkewRing& R = Z.gamma;
  require(N.R.D->modulus() == R.D->modulus() && N.R.twist == R.twist &&
              N.R.Fp->p() == R.Fp->p(),
          "apply: module ring does not match the bimodule ring");
  if (Z.ann) {
    Matrix Ab = poly_action(N, *Z.ann);
    require(Ab == Matrix(N.R.Fp, Ab.rows(), Ab.cols()),
            "apply: module is not annihilated by the declared annihilator");
  }
  const u32 d = N.dim_p();
  const u32 r = Z.rank;
  const u64 dim = static_cast<u64>(r) * d;
  if (dim > caps.matrix_dim) throw CapError("apply: image dimension over cap");
  std::vector<Matrix> act;
  if (Z.lambda.K().degree() > 1) {
    Matrix W(N.R.Fp, static_cast<u32>(dim), static_cast<u32>(dim));
    for (u32 a = 0; a < r; ++a) fqrep::detail::set_block(W, a * d, a * d, N.W);
    act.push_back(W);
  }
  for (u32 e = 0; e < Z.lambda.dim(); ++e) {
    Matrix A(N.R.Fp, static_cast<u32>(dim), static_cast<u32>(dim));
    for (u32 a = 0; a < r; ++a)
      for (u32 b = 0; b < r; ++b) {
        const skew::SkewPoly& f = Z.entry(e, a, b);
        if (kpoly::is_zero(f)) continue;
        fqrep::detail::set_block(A, a * d, b * d, poly_action(N, f));
      }
    act.push_back(A);
  }
  return FdModule{N.R.Fp, static_cast<u32>(dim), std::move(act)};
}

// image of a module map: the free part carries it untouched to every copy
inline Matrix apply_hom(const EmbeddingBimodule& Z, const Matrix& f) {
  Matrix F(f.field(), Z.rank * f.rows(), Z.rank * f.cols());
  for (u32 a = 0; a < Z.rank; ++a)
    fqrep::detail::set_block(F, a * f.rows(), a * f.cols(), f);
  return F;
}

// The rank-two bimodule over the Kronecker algebra: two vertices, two
// parallel arrows, one arrow acting as a constant and the other as x.  The
// image of a module N is the representation (N => N) with maps (1, x).
inline EmbeddingBimodule kronecker_exemplar(u32 q, const Caps& caps = default_caps()) {
  u32 p = 0;
  for (u32 t = 2; t * t <= q; ++t)
    if (q % t == 0) {
      p = t;
      break;
    }
  if (!p) p = q;
  u32 m = 0;
  for (u64 v = q; v > 1; v /= p) {
    require(v % p == 0, "kronecker_exemplar: not a prime power");
    ++m;
  }
  require(m >= 1, "kronecker_exemplar: not a prime power");
  skew::SkewRing R = skew::make_skew_ring(p, m, 0, caps);
  // basis e1, e2, a, b with a = e2*a*e1 and b = e2*b*e1
  const u32 n = 4;
  std::vector<u32> sc(static_cast<size_t>(n) * n * n, 0);
  auto put = [&](u32 i, u32 j, u32 k) { sc[(static_cast<size_t>(i) * n + j) * n + k] = 1; };
  put(0, 0, 0);
  put(1, 1, 1);
  put(1, 2, 2);
  put(1, 3, 3);
  put(2, 0, 2);
  put(3, 0, 3);
  FdAlgebra L(R.D, n, std::move(sc), {1, 1, 0, 0}, caps);
  skew::SkewPoly one = kpoly::one();
  skew::SkewPoly x = skew::xpow(1);
  skew::SkewPoly z;
  EmbeddingBimodule Z{std::move(L),
                      R,
                      2,
                      {{one, z, z, z}, {z, z, z, one}, {z, z, one, z}, {z, z, x, z}},
                      {"e1", "e2", "a", "b"},
                      std::nullopt};
  validate_bimodule(Z, caps);
  return Z;
}

// Rank-one bimodule through the finite quotient by a two-sided g: the
// receiving algebra is the quotient on the basis w^j x^i over the prime
// field, every basis element acts by its representative, and the image of an
// annihilated module is the module itself with its operators relisted.
inline EmbeddingBimodule restriction_bimodule(const skew::SkewRing& R,
                                              const skew::SkewPoly& g,
                                              const Caps& caps = default_caps()) {
  skew::SkewPoly gm = skew::monic_left(R, g);
  require(kpoly::deg(gm) >= 1, "restriction_bimodule: proper quotient required");
  require(skew::is_two_sided(R, gm), "restriction_bimodule: element is not two-sided");
  const u32 d = static_cast<u32>(kpoly::deg(gm));
  const u32 m = R.D->degree();
  const u32 n = d * m;
  std::vector<skew::SkewPoly> reps(n);
  std::vector<std::string> labels(n);
  for (u32 i = 0; i < d; ++i)
    for (u32 j = 0; j < m; ++j) {
      skew::SkewPoly f(i + 1, 0);
      f[i] = R.D->pow(R.D->x_class(), j);
      reps[i * m + j] = f;
      std::string lab = "x^" + std::to_string(i);
      if (j) lab = "w^" + std::to_string(j) + "*" + lab;
      labels[i * m + j] = lab;
    }
  std::vector<u32> sc(static_cast<size_t>(n) * n * n, 0);
  for (u32 a = 0; a < n; ++a)
    for (u32 b = 0; b < n; ++b) {
      skew::SkewPoly rem = skew::div_r(R, skew::mul(R, reps[a], reps[b]), gm).r;
      for (size_t t = 0; t < rem.size(); ++t) {
        if (!rem[t]) continue;
        auto digits = R.D->digits(rem[t]);
        for (size_t u = 0; u < digits.size(); ++u)
          if (digits[u])
            sc[(static_cast<size_t>(a) * n + b) * n + t * m + u] = digits[u];
      }
    }
  Vec unit(n, 0);
  unit[0] = 1;
  FdAlgebra L(R.Fp, n, std::move(sc), std::move(unit), caps);
  EmbeddingBimodule Z{std::move(L), R, 1, {}, std::move(labels), gm};
  Z.action.reserve(n);
  for (u32 e = 0; e < n; ++e) Z.action.push_back({reps[e]});
  validate_bimodule(Z, caps);
  return Z;
}

struct IndecFailure {
  u32 index;                   // family position whose image split
  std::vector<u32> part_dims;  // dimensions of the pieces found
};

struct IsoFailure {
  u32 i, j;        // positions of non-isomorphic inputs
  Matrix witness;  // invertible intertwiner between their images, if found
};

struct VerificationReport {
  u32 family_size = 0;
  u32 indec_inputs = 0;
  u32 pairs_checked = 0;
  u32 ses_checked = 0;
  bool indec_preserved = true;
  bool non_iso_preserved = true;
  bool exact = true;
  std::vector<IndecFailure> indec_failures;
  std::vector<IsoFailure> iso_failures;
  std::vector<std::string> ses_failures;

  bool pass() const { return indec_preserved && non_iso_preserved && exact; }
};

namespace detail {

// Conjugation invariants of an action list: characteristic polynomials of
// the generators plus ranks of their pairwise pencils.  Charpolys are blind
// to the strictly triangular part of a quiver-shaped action, while the
// pencil ranks recover it, so together they make a sharp cheap filter.
struct ActSignature {
  std::vector<kpoly::Poly> ch;
  std::vector<u32> rk;

  bool operator==(const ActSignature&) const = default;
};

inline ActSignature act_signature(const FdModule& M) {
  ActSignature sig;
  for (const Matrix& A : M.act) {
    sig.ch.push_back(kpoly::charpoly(A));
    sig.rk.push_back(rank(A));
  }
  for (size_t k = 0; k < M.act.size(); ++k)
    for (size_t l = k + 1; l < M.act.size(); ++l)
      for (u32 c = 1; c < M.K->p(); ++c)
        sig.rk.push_back(rank(M.act[k] + M.act[l].scal(c)));
  return sig;
}

// invertible element of a morphism span: basis first, then seeded mixtures
inline std::optional<Matrix> invertible_in_span(FqRef K, u32 dim,
                                                const std::vector<Matrix>& H,
                                                u64 seed) {
  for (const Matrix& T : H)
    if (is_invertible(T)) return T;
  Rng rng(seed);
  for (u32 tries = 0; tries < 64 && !H.empty(); ++tries) {
    Matrix T(K, dim, dim);
    for (const Matrix& Hk : H) {
      u32 c = static_cast<u32>(rng.below(K->q()));
      if (c) T = T + Hk.scal(c);
    }
    if (is_invertible(T)) return T;
  }
  return std::nullopt;
}

struct SesSample {
  PidModule left, middle, right;
  Matrix f, g;
  std::string tag;
};

inline std::optional<SesSample> make_ses(const std::vector<PidModule>& family,
                                         Rng& rng, bool prefer_ar,
                                         const Caps& caps) {
  if (family.empty()) return std::nullopt;
  u32 i = static_cast<u32>(rng.below(family.size()));
  const PidModule& N = family[i];
  if (prefer_ar && N.socle_atom) {
    u32 step = static_cast<u32>(kpoly::deg(*N.socle_atom)) * N.R.D->degree();
    if (step && N.dim_p() % step == 0) {
      u32 len = N.dim_p() / step;
      try {
        AlmostSplitSeq seq = ar_sequence(N.R, *N.socle_atom, len, caps);
        PidModule mid = seq.middle[0];
        for (size_t t = 1; t < seq.middle.size(); ++t)
          mid = pid_dsum(mid, seq.middle[t]);
        return SesSample{seq.left, std::move(mid), seq.right, seq.f, seq.g,
                         "almost split sequence at member " + std::to_string(i)};
      } catch (const CapError&) {
      }
    }
  }
  u32 j = static_cast<u32>(rng.below(family.size()));
  const PidModule& Nj = family[j];
  u32 di = N.dim_p(), dj = Nj.dim_p();
  Matrix f = Matrix::vstack(Matrix::identity(N.R.Fp, di), Matrix(N.R.Fp, dj, di));
  Matrix g = Matrix::hstack(Matrix(N.R.Fp, dj, di), Matrix::identity(N.R.Fp, dj));
  return SesSample{N, pid_dsum(N, Nj), Nj, f, g,
                   "split sequence on members " + std::to_string(i) + "," +
                       std::to_string(j)};
}

inline bool ranks_exact(const Matrix& f, const Matrix& g, u32 dl, u32 dm, u32 dr) {
  if (!(g * f == Matrix(f.field(), g.rows(), f.cols()))) return false;
  u32 rf = rank(f), rg = rank(g);
  return rf == dl && rg == dr && rf + rg == dm;
}

inline bool intertwines(const FdModule& A, const FdModule& B, const Matrix& T) {
  for (size_t k = 0; k < A.act.size(); ++k)
    if (!(B.act[k] * T == T * A.act[k])) return false;
  return true;
}

}  // namespace detail

// Sampled certification that the functor preserves indecomposability,
// reflects isomorphism classes, and sends exact sequences to exact
// sequences.  Failures never throw; they land in the report together with a
// certificate (split dimensions, or an exhibited invertible intertwiner).
inline VerificationReport verify_embedding(const EmbeddingBimodule& Z,
                                           const std::vector<PidModule>& family,
                                           u64 seed = 1, u32 ses_samples = 20,
                                           const Caps& caps = default_caps()) {
  VerificationReport rep;
  rep.family_size = static_cast<u32>(family.size());
  std::vector<FdModule> img;
  std::vector<FdModule> src;
  img.reserve(family.size());
  for (const PidModule& N : family) {
    img.push_back(apply(Z, N, caps));
    src.push_back(pid_to_fdmodule(N));
  }
  std::vector<bool> in_indec(family.size(), false);
  for (size_t i = 0; i < family.size(); ++i) {
    in_indec[i] = is_indecomposable(src[i], caps);
    if (!in_indec[i]) continue;
    ++rep.indec_inputs;
    if (!is_indecomposable(img[i], caps)) {
      rep.indec_preserved = false;
      IndecFailure fail{static_cast<u32>(i), {}};
      for (const FdModule& piece : decompose(img[i], seed, caps))
        fail.part_dims.push_back(piece.dim);
      rep.indec_failures.push_back(std::move(fail));
    }
  }
  std::vector<detail::ActSignature> sig(img.size());
  for (size_t i = 0; i < img.size(); ++i) sig[i] = detail::act_signature(img[i]);
  for (size_t i = 0; i < img.size(); ++i)
    for (size_t j = i + 1; j < img.size(); ++j) {
      ++rep.pairs_checked;
      if (img[i].dim != img[j].dim || sig[i] != sig[j]) continue;
      auto H = hom_space(img[i], img[j]);
      if (H.empty()) continue;  // an isomorphism needs a morphism to live in
      std::optional<Matrix> wit =
          detail::invertible_in_span(img[i].K, img[i].dim, H, seed + i + j);
      bool images_iso = wit ? true : iso_modules(img[i], img[j], seed, caps);
      if (!images_iso) continue;
      if (iso_modules(src[i], src[j], seed, caps)) continue;  // inputs agree too
      rep.non_iso_preserved = false;
      rep.iso_failures.push_back(
          IsoFailure{static_cast<u32>(i), static_cast<u32>(j),
                     wit ? *wit : Matrix(img[i].K, 0, 0)});
    }
  Rng rng(seed);
  for (u32 k = 0; k < ses_samples; ++k) {
    auto ses = detail::make_ses(family, rng, k % 2 == 1, caps);
    if (!ses) break;
    ++rep.ses_checked;
    if (!detail::ranks_exact(ses->f, ses->g, ses->left.dim_p(),
                             ses->middle.dim_p(), ses->right.dim_p())) {
      rep.exact = false;
      rep.ses_failures.push_back("source sequence not exact: " + ses->tag);
      continue;
    }
    FdModule gl = apply(Z, ses->left, caps);
    FdModule gm = apply(Z, ses->middle, caps);
    FdModule gr = apply(Z, ses->right, caps);
    Matrix gf = apply_hom(Z, ses->f);
    Matrix gg = apply_hom(Z, ses->g);
    if (!detail::intertwines(gl, gm, gf) || !detail::intertwines(gm, gr, gg)) {
      rep.exact = false;
      rep.ses_failures.push_back("image maps are not morphisms: " + ses->tag);
      continue;
    }
    if (!detail::ranks_exact(gf, gg, gl.dim, gm.dim, gr.dim)) {
      rep.exact = false;
      rep.ses_failures.push_back("image sequence not exact: " + ses->tag);
    }
  }
  return rep;
}

struct ControlReport {
  std::string sample;
  u32 c = 1;
  u32 c_prime = 1;
  std::vector<std::pair<u32, u32>> rows;  // (source endolength, image endolength)
};

// Smallest integer constants bounding each endolength by the other across
// the sample; the right rank bounds the growth, so c_prime never needs to
// exceed it on honest data.
inline ControlReport control_constants(const EmbeddingBimodule& Z,
                                       const std::vector<PidModule>& family,
                                       u64 seed = 2357,
                                       const Caps& caps = default_caps()) {
  ControlReport rep;
  rep.sample = std::to_string(family.size()) + " modules through a rank-" +
               std::to_string(Z.rank) + " bimodule";
  auto ceil_div = [](u32 a, u32 b) { return (a + b - 1) / b; };
  for (const PidModule& N : family) {
    require(N.dim_p() > 0, "control_constants: zero module in the family");
    u32 a = pid_endolength(N, seed, caps);
    u32 b = endolength(apply(Z, N, caps), seed, caps);
    rep.rows.emplace_back(a, b);
    rep.c = std::max(rep.c, ceil_div(a, b));
    rep.c_prime = std::max(rep.c_prime, ceil_div(b, a));
  }
  return rep;
}

struct ScalingRow {
  u32 n;            // length of the source module over its atom
  u32 dim;          // dimension of the image
  u32 endol;        // endolength of the image
  u32 residue_dim;  // dimension of the endomorphism algebra mod its radical
};

struct ScalingTable {
  bool fullness_verified = false;  // hom dimensions agreed on the sampled pairs
  std::string diagnostic;          // set when the precheck fails
  std::vector<ScalingRow> rows;
  bool dim_linear = false;
  bool endol_linear = false;
  bool residue_constant = false;

  // the laws are only claimed when the functor looked full on the sample
  bool asserted() const {
    return fullness_verified && dim_linear && endol_linear && residue_constant;
  }
};

// Image data of the length-n chain over one atom, n = 1..n_max: both the
// dimension and the endolength scale linearly in n and the residue of the
// endomorphism algebra stays the same.  Fullness is checked first by
// comparing hom dimensions; on a mismatch the table still reports what it
// measured but carries a diagnostic instead of the scaling claims.
inline ScalingTable image_endolength_formula(const EmbeddingBimodule& Z,
                                             const skew::SkewPoly& p, u32 n_max,
                                             u64 seed = 2357,
                                             const Caps& caps = default_caps()) {
  require(n_max >= 1, "image_endolength_formula: need at least one row");
  ScalingTable table;
  std::vector<PidModule> chain;
  std::vector<FdModule> img;
  for (u32 n = 1; n <= n_max; ++n) {
    chain.push_back(indec_module(Z.gamma, p, n, caps));
    img.push_back(apply(Z, chain.back(), caps));
  }
  table.fullness_verified = true;
  u32 probe = std::min<u32>(2, n_max);
  for (u32 i = 0; i < probe && table.fullness_verified; ++i)
    for (u32 j = 0; j < probe; ++j) {
      u32 up = hom_dim(pid_to_fdmodule(chain[i]), pid_to_fdmodule(chain[j]));
      u32 down = hom_dim(img[i], img[j]);
      if (up != down) {
        table.fullness_verified = false;
        table.diagnostic = "hom dimensions disagree between lengths " +
                           std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                           ": source " + std::to_string(up) + ", image " +
                           std::to_string(down) +
                           "; the functor is not full on this sample and the "
                           "scaling laws are not asserted";
        break;
      }
    }
  for (u32 n = 1; n <= n_max; ++n) {
    const FdModule& G = img[n - 1];
    auto ld = end_algebra(G, caps).local_data();
    u32 residue = end_algebra(G, caps).dim() - ld.radical_dim;
    table.rows.push_back(ScalingRow{n, G.dim, endolength(G, seed, caps), residue});
  }
  table.dim_linear = true;
  table.endol_linear = true;
  table.residue_constant = true;
  for (const ScalingRow& row : table.rows) {
    table.dim_linear &= row.dim == row.n * table.rows[0].dim;
    table.endol_linear &= row.endol == row.n * table.rows[0].endol;
    table.residue_constant &= row.residue_dim == table.rows[0].residue_dim;
  }
  return table;
}

}  // namespace fqrep::embed
