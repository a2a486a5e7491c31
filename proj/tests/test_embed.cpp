#include "catch2/catch_amalgamated.hpp"
#include "fqrep/embed.hpp"

using namespace fqrep;
using namespace fqrep::skew;
using namespace fqrep::embed;
using Catch::Matchers::ContainsSubstring;

namespace {

// all monic atoms of the given degree, by exhaustive scan
std::vector<SkewPoly> atoms_of_degree(const SkewRing& R, u32 d) {
  std::vector<SkewPoly> out;
  u64 count = 1;
  for (u32 i = 0; i < d; ++i) count *= R.D->q();
  for (u64 code = 0; code < count; ++code) {
    SkewPoly g = monic_from_code(R, d, code);
    if (is_atom(R, g)) out.push_back(g);
  }
  return out;
}

bool intertwines_all(const FdModule& A, const FdModule& B, const Matrix& T) {
  for (size_t k = 0; k < A.act.size(); ++k)
    if (!(B.act[k] * T == T * A.act[k])) return false;
  return true;
}

}  // namespace

TEST_CASE("the kronecker data validates and rejects corrupted tables", "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  REQUIRE(Z.rank == 2);
  REQUIRE(Z.lambda.dim() == 4);
  REQUIRE(Z.labels == std::vector<std::string>{"e1", "e2", "a", "b"});
  REQUIRE_NOTHROW(Z.lambda.validate());
  REQUIRE_NOTHROW(validate_bimodule(Z));
  REQUIRE(Z.entry(3, 1, 0) == SkewPoly{0, 1});  // the second arrow carries x

  SkewPoly z;
  EmbeddingBimodule bad = Z;
  bad.action[2] = {z, z, SkewPoly{1}, SkewPoly{0, 1}};  // a*e2 needs zero
  REQUIRE_THROWS_WITH(validate_bimodule(bad),
                      ContainsSubstring("not an algebra morphism"));

  bad = Z;
  bad.action[0][0] = SkewPoly{0, 1};  // breaks the unit sum first
  REQUIRE_THROWS_WITH(validate_bimodule(bad),
                      ContainsSubstring("unit does not act as the identity"));

  bad = Z;
  bad.rank = 0;
  REQUIRE_THROWS_WITH(validate_bimodule(bad),
                      ContainsSubstring("right rank must be positive"));

  bad = Z;
  bad.action.pop_back();
  REQUIRE_THROWS_WITH(validate_bimodule(bad),
                      ContainsSubstring("one action matrix per basis element"));

  bad = Z;
  bad.action[1] = {z, z, SkewPoly{1}};
  REQUIRE_THROWS_WITH(validate_bimodule(bad), ContainsSubstring("matrix shape"));

  bad = Z;
  bad.labels = {"e1"};
  REQUIRE_THROWS_WITH(validate_bimodule(bad), ContainsSubstring("label count"));

  bad = Z;
  bad.gamma = make_skew_ring(3, 1, 0);
  REQUIRE_THROWS_WITH(validate_bimodule(bad),
                      ContainsSubstring("characteristic mismatch"));

  EmbeddingBimodule wide = kronecker_exemplar(4);
  wide.gamma = make_skew_ring(2, 3, 0);
  REQUIRE_THROWS_WITH(validate_bimodule(wide),
                      ContainsSubstring("scalar field not realized"));

  // a twisted ring puts x outside the reach of the full scalar field
  SkewRing R4 = make_skew_ring(2, 2, 1);
  FdAlgebra one_dim(R4.D, 1, {1}, {1});
  EmbeddingBimodule tw{one_dim, R4, 1, {{SkewPoly{0, 1}}}, {}, std::nullopt};
  REQUIRE_THROWS_WITH(validate_bimodule(tw),
                      ContainsSubstring("do not commute with the scalar field"));
  tw.action = {{SkewPoly{1}}};
  tw.ann = SkewPoly{1};
  REQUIRE_THROWS_WITH(validate_bimodule(tw),
                      ContainsSubstring("annihilator must be proper"));
  tw.ann = SkewPoly{R4.D->x_class(), 1};  // degree-one left ideal, not two-sided
  REQUIRE_THROWS_WITH(validate_bimodule(tw),
                      ContainsSubstring("annihilator must be two-sided"));
}

TEST_CASE("module images under the kronecker functor are frozen", "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  const SkewRing& R = Z.gamma;

  PidModule N1 = cyclic_module(R, SkewPoly{1, 1});  // x acts as 1
  FdModule G1 = apply(Z, N1);
  REQUIRE(G1.dim == 2);
  REQUIRE(G1.act.size() == 4);
  REQUIRE(G1.act[0] == Matrix::from_flat(R.Fp, 2, 2, {1, 0, 0, 0}));
  REQUIRE(G1.act[1] == Matrix::from_flat(R.Fp, 2, 2, {0, 0, 0, 1}));
  REQUIRE(G1.act[2] == Matrix::from_flat(R.Fp, 2, 2, {0, 0, 1, 0}));
  REQUIRE(G1.act[3] == Matrix::from_flat(R.Fp, 2, 2, {0, 0, 1, 0}));
  REQUIRE_NOTHROW(validate_action(Z.lambda, G1));

  PidModule N0 = cyclic_module(R, SkewPoly{0, 1});  // x acts as 0
  FdModule G0 = apply(Z, N0);
  REQUIRE(G0.act[2] == Matrix::from_flat(R.Fp, 2, 2, {0, 0, 1, 0}));
  REQUIRE(G0.act[3] == Matrix(R.Fp, 2, 2));
  REQUIRE_NOTHROW(validate_action(Z.lambda, G0));

  PidModule E2 = indec_module(R, SkewPoly{1, 1, 1}, 2);
  REQUIRE(apply(Z, E2).dim == 2 * E2.dim_p());

  Caps tight;
  tight.matrix_dim = 4;
  REQUIRE_THROWS_WITH(apply(Z, E2, tight),
                      ContainsSubstring("image dimension over cap"));

  SkewRing R3 = make_skew_ring(3, 1, 0);
  REQUIRE_THROWS_WITH(apply(Z, cyclic_module(R3, SkewPoly{0, 1})),
                      ContainsSubstring("module ring does not match"));
}

TEST_CASE("restriction through a finite quotient relists the operators", "[embed]") {
  SkewRing R = make_skew_ring(2, 1, 0);
  SkewPoly g{0, 1, 0, 0, 1};  // x^4 + x = x(x+1)(x^2+x+1)
  EmbeddingBimodule Zr = restriction_bimodule(R, g);
  REQUIRE(Zr.rank == 1);
  REQUIRE(Zr.lambda.dim() == 4);
  REQUIRE(Zr.labels == std::vector<std::string>{"x^0", "x^1", "x^2", "x^3"});
  REQUIRE_NOTHROW(Zr.lambda.validate());

  PidModule E1x = indec_module(R, SkewPoly{0, 1}, 1);
  FdModule Gx = apply(Zr, E1x);
  REQUIRE(Gx.dim == E1x.dim_p());
  REQUIRE(Gx.act[0] == Matrix::identity(R.Fp, 1));
  for (u32 k = 1; k < 4; ++k) REQUIRE(Gx.act[k] == Matrix(R.Fp, 1, 1));
  REQUIRE_NOTHROW(validate_action(Zr.lambda, Gx));

  PidModule E1p = indec_module(R, SkewPoly{1, 1, 1}, 1);
  FdModule Gp = apply(Zr, E1p);
  REQUIRE(Gp.dim == 2);
  REQUIRE(Gp.act[1] == E1p.X);
  REQUIRE(Gp.act[2] == E1p.X * E1p.X);
  REQUIRE_NOTHROW(validate_action(Zr.lambda, Gp));

  // x^2 is not annihilated by x^4 + x, so it cannot pass through
  REQUIRE_THROWS_WITH(apply(Zr, indec_module(R, SkewPoly{0, 1}, 2)),
                      ContainsSubstring("not annihilated"));

  // stripping the annihilator exposes products that only match modulo it
  EmbeddingBimodule naked = Zr;
  naked.ann.reset();
  REQUIRE_THROWS_WITH(validate_bimodule(naked),
                      ContainsSubstring("not an algebra morphism"));

  // a quotient with a larger coefficient field carries its generator along
  SkewRing R4 = make_skew_ring(2, 2, 0);
  u32 c = R4.D->x_class();
  EmbeddingBimodule Zq = restriction_bimodule(R4, SkewPoly{c, 1});
  REQUIRE(Zq.lambda.dim() == 2);
  REQUIRE(Zq.labels == std::vector<std::string>{"x^0", "w^1*x^0"});
  PidModule S = indec_module(R4, SkewPoly{c, 1}, 1);
  FdModule Gs = apply(Zq, S);
  REQUIRE(Gs.dim == 2);
  REQUIRE(Gs.act[0] == Matrix::identity(R4.Fp, 2));
  REQUIRE(Gs.act[1] == S.W);
}

TEST_CASE("corrupted arrows collapse distinct simple modules", "[embed]") {
  SkewPoly z;
  EmbeddingBimodule bad = kronecker_exemplar(2);
  bad.action[3] = {z, z, z, z};  // silence the x arrow
  REQUIRE_NOTHROW(validate_bimodule(bad));  // degenerate but consistent data
  const SkewRing& R = bad.gamma;

  std::vector<PidModule> fam = {indec_module(R, SkewPoly{0, 1}, 1),
                                indec_module(R, SkewPoly{1, 1}, 1)};
  VerificationReport rep = verify_embedding(bad, fam, 1, 4);
  REQUIRE_FALSE(rep.pass());
  REQUIRE_FALSE(rep.non_iso_preserved);
  REQUIRE(rep.indec_preserved);
  REQUIRE(rep.exact);
  REQUIRE(rep.iso_failures.size() == 1);
  REQUIRE(rep.iso_failures[0].i == 0);
  REQUIRE(rep.iso_failures[0].j == 1);
  const Matrix& W = rep.iso_failures[0].witness;
  REQUIRE(W.rows() == 2);
  REQUIRE(is_invertible(W));
  REQUIRE(intertwines_all(apply(bad, fam[0]), apply(bad, fam[1]), W));

  // with both arrows dead the images fall apart into simple summands
  EmbeddingBimodule dead = bad;
  dead.action[2] = {z, z, z, z};
  REQUIRE_NOTHROW(validate_bimodule(dead));
  VerificationReport rep2 =
      verify_embedding(dead, {indec_module(R, SkewPoly{1, 1, 1}, 1)}, 1, 2);
  REQUIRE_FALSE(rep2.indec_preserved);
  REQUIRE(rep2.indec_failures.size() == 1);
  REQUIRE(rep2.indec_failures[0].index == 0);
  REQUIRE(rep2.indec_failures[0].part_dims.size() == 4);
  for (u32 d : rep2.indec_failures[0].part_dims) REQUIRE(d == 1);

  // the same corruption breaks fullness, which turns into a diagnostic
  ScalingTable tab = image_endolength_formula(dead, SkewPoly{1, 1, 1}, 2);
  REQUIRE_FALSE(tab.fullness_verified);
  REQUIRE_THAT(tab.diagnostic, ContainsSubstring("not full"));
  REQUIRE_FALSE(tab.asserted());
  REQUIRE(tab.rows.size() == 2);
}

TEST_CASE("endolength control constants on chains over one atom", "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  const SkewRing& R = Z.gamma;
  std::vector<PidModule> fam;
  for (u32 n = 1; n <= 3; ++n) fam.push_back(indec_module(R, SkewPoly{1, 1, 1}, n));
  ControlReport ctl = control_constants(Z, fam);
  REQUIRE(ctl.rows ==
          std::vector<std::pair<u32, u32>>{{1, 2}, {2, 4}, {3, 6}});
  REQUIRE(ctl.c == 1);
  REQUIRE(ctl.c_prime == 2);
  REQUIRE(ctl.c_prime <= Z.rank);

  // the rank-one restriction changes nothing on simples
  EmbeddingBimodule Zr = restriction_bimodule(R, SkewPoly{0, 1, 0, 0, 1});
  std::vector<PidModule> simples = {indec_module(R, SkewPoly{0, 1}, 1),
                                    indec_module(R, SkewPoly{1, 1}, 1),
                                    indec_module(R, SkewPoly{1, 1, 1}, 1)};
  ControlReport flat = control_constants(Zr, simples);
  REQUIRE(flat.rows ==
          std::vector<std::pair<u32, u32>>{{1, 1}, {1, 1}, {1, 1}});
  REQUIRE(flat.c == 1);
  REQUIRE(flat.c_prime == 1);

  // over a bigger scalar field the generator action joins the image acts
  EmbeddingBimodule Z4 = kronecker_exemplar(4);
  const SkewRing& R4 = Z4.gamma;
  u32 c = R4.D->x_class();
  std::vector<PidModule> fam4;
  for (u32 n = 1; n <= 2; ++n) fam4.push_back(indec_module(R4, SkewPoly{c, 1}, n));
  REQUIRE(apply(Z4, fam4[0]).act.size() == 5);
  ControlReport ctl4 = control_constants(Z4, fam4);
  REQUIRE(ctl4.rows == std::vector<std::pair<u32, u32>>{{1, 2}, {2, 4}});
  REQUIRE(ctl4.c == 1);
  REQUIRE(ctl4.c_prime == 2);

  ControlReport empty = control_constants(Z, {});
  REQUIRE(empty.rows.empty());
  REQUIRE(empty.c == 1);
  REQUIRE(empty.c_prime == 1);
}

TEST_CASE("image growth is linear along a chain", "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  ScalingTable tab = image_endolength_formula(Z, SkewPoly{1, 1, 1}, 4);
  REQUIRE(tab.fullness_verified);
  REQUIRE(tab.diagnostic.empty());
  REQUIRE(tab.rows.size() == 4);
  for (u32 n = 1; n <= 4; ++n) {
    REQUIRE(tab.rows[n - 1].n == n);
    REQUIRE(tab.rows[n - 1].dim == 4 * n);
    REQUIRE(tab.rows[n - 1].endol == 2 * n);
    REQUIRE(tab.rows[n - 1].residue_dim == 2);
  }
  REQUIRE(tab.dim_linear);
  REQUIRE(tab.endol_linear);
  REQUIRE(tab.residue_constant);
  REQUIRE(tab.asserted());

  // over the rational atom the residue shrinks but the laws stay linear
  ScalingTable rat = image_endolength_formula(Z, SkewPoly{0, 1}, 3);
  REQUIRE(rat.asserted());
  for (u32 n = 1; n <= 3; ++n) {
    REQUIRE(rat.rows[n - 1].dim == 2 * n);
    REQUIRE(rat.rows[n - 1].endol == 2 * n);
    REQUIRE(rat.rows[n - 1].residue_dim == 1);
  }

  REQUIRE_THROWS_WITH(image_endolength_formula(Z, SkewPoly{0, 1}, 0),
                      ContainsSubstring("at least one row"));
}

TEST_CASE("sums of modules map to sums of images", "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  const SkewRing& R = Z.gamma;
  PidModule M = indec_module(R, SkewPoly{0, 1}, 1);
  PidModule N = indec_module(R, SkewPoly{1, 1}, 2);
  PidModule S = pid_dsum(M, N);
  REQUIRE(S.dim_p() == M.dim_p() + N.dim_p());
  REQUIRE_NOTHROW(validate_pid_module(S));

  FdModule GS = apply(Z, S);
  FdModule GT = dsum(apply(Z, M), apply(Z, N));
  u32 dm = M.dim_p(), dn = N.dim_p();
  Matrix P(R.Fp, GS.dim, GS.dim);
  for (u32 a = 0; a < Z.rank; ++a)
    for (u32 v = 0; v < dm + dn; ++v) {
      u32 src = a * (dm + dn) + v;
      u32 tgt = v < dm ? a * dm + v : Z.rank * dm + a * dn + (v - dm);
      P.set(tgt, src, 1);
    }
  REQUIRE(is_invertible(P));
  for (size_t k = 0; k < GS.act.size(); ++k)
    REQUIRE(P * GS.act[k] == GT.act[k] * P);
}

TEST_CASE("substitution composes with the rank-two functor", "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(4);
  const SkewRing& R = Z.gamma;
  u32 c = R.D->x_class();

  // rank-one substitution x -> c*x folded into the x arrow
  EmbeddingBimodule Zc = Z;
  SkewPoly z;
  Zc.action[3] = {z, z, SkewPoly{0, c}, z};
  REQUIRE_NOTHROW(validate_bimodule(Zc));

  auto substitute = [&](const PidModule& N) {
    return PidModule{N.R, coeff_action(N, c) * N.X, N.W, std::nullopt};
  };
  PidModule N = indec_module(R, SkewPoly{c, 1}, 2);
  PidModule Nc = substitute(N);
  REQUIRE_NOTHROW(validate_pid_module(Nc));
  FdModule composed = apply(Zc, N);
  FdModule stacked = apply(Z, Nc);
  REQUIRE(composed.act.size() == stacked.act.size());
  for (size_t k = 0; k < composed.act.size(); ++k)
    REQUIRE(composed.act[k] == stacked.act[k]);

  std::vector<PidModule> fam = {indec_module(R, SkewPoly{0, 1}, 1),
                                indec_module(R, SkewPoly{c, 1}, 1)};
  REQUIRE(verify_embedding(Zc, fam, 1, 4).pass());
}

TEST_CASE("torsion splits against the localization survivors", "[embed]") {
  SkewRing R = make_skew_ring(2, 1, 0);
  SkewPoly b{1, 1, 1};
  std::vector<PidModule> fam = {indec_module(R, SkewPoly{0, 1}, 1),
                                indec_module(R, SkewPoly{0, 1}, 2),
                                indec_module(R, b, 1),
                                indec_module(R, b, 2),
                                indec_module(R, SkewPoly{1, 1}, 1)};
  std::vector<u32> alive = localization_survivors(R, b, fam);
  REQUIRE(alive == std::vector<u32>{0, 1, 4});

  // the complement is exactly what the b-power quotient can receive
  EmbeddingBimodule Zb = restriction_bimodule(R, pow(R, b, 2));
  for (u32 i = 0; i < fam.size(); ++i) {
    bool survives =
        std::find(alive.begin(), alive.end(), i) != alive.end();
    if (survives) {
      REQUIRE_THROWS_WITH(apply(Zb, fam[i]), ContainsSubstring("not annihilated"));
    } else {
      FdModule G = apply(Zb, fam[i]);
      REQUIRE(G.dim == fam[i].dim_p());
      REQUIRE(is_indecomposable(G));
    }
  }
}

TEST_CASE("sampled morphisms become intertwiners and sequences stay exact",
          "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  const SkewRing& R = Z.gamma;
  std::vector<PidModule> fam;
  for (const SkewPoly& p :
       {SkewPoly{0, 1}, SkewPoly{1, 1}, SkewPoly{1, 1, 1}})
    for (u32 n = 1; n <= 2; ++n) fam.push_back(indec_module(R, p, n));

  VerificationReport rep = verify_embedding(Z, fam, 5, 12);
  REQUIRE(rep.pass());
  REQUIRE(rep.family_size == 6);
  REQUIRE(rep.indec_inputs == 6);
  REQUIRE(rep.pairs_checked == 15);
  REQUIRE(rep.ses_checked == 12);
  REQUIRE(rep.indec_failures.empty());
  REQUIRE(rep.iso_failures.empty());
  REQUIRE(rep.ses_failures.empty());
  REQUIRE(verify_embedding(Z, fam, 6, 12).pass());  // seed independence

  // a hom basis element pushes to an intertwiner of the images
  FdModule A = pid_to_fdmodule(fam[0]), B = pid_to_fdmodule(fam[1]);
  auto homs = hom_space(A, B);
  REQUIRE_FALSE(homs.empty());
  FdModule GA = apply(Z, fam[0]), GB = apply(Z, fam[1]);
  for (const Matrix& f : homs)
    REQUIRE(intertwines_all(GA, GB, apply_hom(Z, f)));
}

TEST_CASE("monic irreducibles of degree four and below stay separated",
          "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  const SkewRing& R = Z.gamma;
  std::vector<u32> expect_counts = {2, 1, 2, 3};
  std::vector<PidModule> fam;
  for (u32 d = 1; d <= 4; ++d) {
    auto atoms = atoms_of_degree(R, d);
    REQUIRE(atoms.size() == expect_counts[d - 1]);
    for (const auto& p : atoms) {
      fam.push_back(indec_module(R, p, 1));
      REQUIRE(apply(Z, fam.back()).dim == 2 * d);
    }
  }
  REQUIRE(fam.size() == 8);
  VerificationReport rep = verify_embedding(Z, fam, 3, 8);
  REQUIRE(rep.pass());
  REQUIRE(rep.indec_inputs == 8);
  REQUIRE(rep.pairs_checked == 28);
}

TEST_CASE("empty and single families certify vacuously", "[embed]") {
  EmbeddingBimodule Z = kronecker_exemplar(2);
  VerificationReport rep = verify_embedding(Z, {}, 1, 5);
  REQUIRE(rep.pass());
  REQUIRE(rep.family_size == 0);
  REQUIRE(rep.pairs_checked == 0);
  REQUIRE(rep.ses_checked == 0);

  std::vector<PidModule> one = {indec_module(Z.gamma, SkewPoly{0, 1}, 1)};
  VerificationReport single = verify_embedding(Z, one, 1, 3);
  REQUIRE(single.pass());
  REQUIRE(single.ses_checked == 3);
}
