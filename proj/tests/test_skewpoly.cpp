#include "catch2/catch_amalgamated.hpp"
#include "fqrep/skewpoly.hpp"

using namespace fqrep;
using namespace fqrep::skew;

namespace {

SkewPoly random_skew(const SkewRing& R, u32 degree_bound, Rng& rng) {
  SkewPoly f(degree_bound + 1, 0);
  for (auto& c : f) c = static_cast<u32>(rng.below(R.D->q()));
  kpoly::trim(f);
  return f;
}

std::vector<SkewPoly> sorted_polys(const std::vector<Atom>& atoms) {
  std::vector<SkewPoly> ps;
  for (const auto& a : atoms) ps.push_back(a.poly);
  std::sort(ps.begin(), ps.end());
  return ps;
}

}  // namespace

TEST_CASE("twisted multiplication commutes the right way", "[skewpoly]") {
  SkewRing R = make_skew_ring(2, 2, 1);  // F_4 with the Frobenius twist
  u32 w = R.D->x_class();
  REQUIRE(R.e == 2);
  REQUIRE(R.F->degree() == 1);
  // x * w = w^2 * x
  SkewPoly left = mul(R, xpow(1), SkewPoly{w});
  REQUIRE(left == SkewPoly({0, R.D->mul(w, w)}));
  // degrees add and the untwisted ring agrees with the plain product
  SkewRing C = make_skew_ring(3, 2, 0);
  REQUIRE(C.e == 1);
  Rng rng(411);
  for (int t = 0; t < 40; ++t) {
    SkewPoly a = random_skew(C, 4, rng), b = random_skew(C, 4, rng);
    REQUIRE(mul(C, a, b) == kpoly::mul(*C.D, a, b));
    if (!kpoly::is_zero(a) && !kpoly::is_zero(b))
      REQUIRE(kpoly::deg(mul(C, a, b)) == kpoly::deg(a) + kpoly::deg(b));
  }
}

TEST_CASE("skew products associate and divisions invert them", "[skewpoly]") {
  for (auto [p, m, t] : {std::array<u32, 3>{2, 2, 1}, {3, 2, 1}, {2, 4, 2}}) {
    SkewRing R = make_skew_ring(p, m, t);
    Rng rng(500 + p + t);
    for (int it = 0; it < 30; ++it) {
      SkewPoly a = random_skew(R, 3, rng), b = random_skew(R, 3, rng);
      SkewPoly c = random_skew(R, 3, rng);
      REQUIRE(mul(R, mul(R, a, b), c) == mul(R, a, mul(R, b, c)));
      if (kpoly::is_zero(b)) continue;
      SkewPoly f = random_skew(R, 6, rng);
      auto dr = div_r(R, f, b);
      REQUIRE(kpoly::add(*R.D, mul(R, dr.q, b), dr.r) == f);
      REQUIRE(kpoly::deg(dr.r) < kpoly::deg(b));
      auto dl = div_l(R, f, b);
      REQUIRE(kpoly::add(*R.D, mul(R, b, dl.q), dl.r) == f);
      REQUIRE(kpoly::deg(dl.r) < kpoly::deg(b));
    }
  }
}

TEST_CASE("left normalization and centrality", "[skewpoly]") {
  SkewRing R = make_skew_ring(2, 2, 1);
  u32 w = R.D->x_class();
  SkewPoly f{w, 1, w};  // w + x + w x^2
  SkewPoly mf = monic_left(R, f);
  REQUIRE(mf.back() == 1);
  REQUIRE(kpoly::scal(*R.D, f.back(), mf) == f);
  // the center of F_4[x;s] is F_2[x^2]
  REQUIRE(is_central(R, xpow(2)));
  REQUIRE(is_central(R, SkewPoly{1, 0, 1, 0, 1}));  // 1 + x^2 + x^4
  REQUIRE_FALSE(is_central(R, xpow(1)));
  REQUIRE_FALSE(is_central(R, SkewPoly{0, 0, w}));  // w x^2: coefficient moves
  REQUIRE(is_two_sided(R, xpow(1)));
  REQUIRE(is_two_sided(R, SkewPoly{1, 0, 1}));
  REQUIRE_FALSE(is_two_sided(R, SkewPoly{1, 1}));
  // in the untwisted ring everything is central
  SkewRing C = make_skew_ring(3, 1, 0);
  REQUIRE(is_central(C, SkewPoly{1, 2, 1}));
  REQUIRE(is_two_sided(C, SkewPoly{2, 1}));
}

TEST_CASE("atom factorization over commutative rings", "[skewpoly]") {
  SkewRing C3 = make_skew_ring(3, 1, 0);
  auto f3 = atom_factor(C3, SkewPoly{1, 0, 1});  // x^2 + 1, -1 a non-residue
  REQUIRE(f3.size() == 1);
  REQUIRE(f3[0].poly == SkewPoly({1, 0, 1}));
  REQUIRE(is_atom(C3, f3[0].poly));

  SkewRing C2 = make_skew_ring(2, 1, 0);
  auto f2 = atom_factor(C2, SkewPoly{0, 1, 1});  // x^2 + x
  REQUIRE(f2.size() == 2);
  REQUIRE(sorted_polys(f2) ==
          std::vector<SkewPoly>({SkewPoly{0, 1}, SkewPoly{1, 1}}));
  REQUIRE(mul(C2, f2[0].poly, f2[1].poly) == SkewPoly({0, 1, 1}));
}

TEST_CASE("atom factorization under the twist", "[skewpoly]") {
  SkewRing R = make_skew_ring(2, 2, 1);
  u32 w = R.D->x_class();
  SkewPoly sq{1, 0, 1};  // x^2 - 1 in characteristic two
  auto fs = atom_factor(R, sq);
  REQUIRE(fs.size() == 2);
  REQUIRE(mul(R, fs[0].poly, fs[1].poly) == sq);
  for (const auto& a : fs) {
    REQUIRE(kpoly::deg(a.poly) == 1);
    REQUIRE(is_atom(R, a.poly));
  }
  // different orderings of the linear atoms give the same product
  SkewPoly w1{w, 1}, w2{R.D->mul(w, w), 1};
  REQUIRE(mul(R, w1, w2) == sq);
  REQUIRE(mul(R, w2, w1) == sq);
  REQUIRE(atom_factor(R, mul(R, w2, w1)).size() == 2);

  // x^4 + x^2 + 1 has no linear right factor; its atoms are quadratic
  SkewPoly quartic{1, 0, 1, 0, 1};
  auto fq = atom_factor(R, quartic);
  REQUIRE(fq.size() == 2);
  REQUIRE(kpoly::deg(fq[0].poly) == 2);
  REQUIRE(kpoly::deg(fq[1].poly) == 2);
  REQUIRE(mul(R, fq[0].poly, fq[1].poly) == quartic);
  REQUIRE(is_atom(R, fq[0].poly));
  // factor counts are an invariant of the element, not the factorization
  auto refq = atom_factor(R, mul(R, fq[1].poly, fq[0].poly));
  REQUIRE(refq.size() == 2);
}

TEST_CASE("degree caps and degenerate inputs are rejected", "[skewpoly]") {
  SkewRing R = make_skew_ring(2, 2, 1);
  REQUIRE_THROWS_AS(atom_factor(R, SkewPoly{1}), ValidationError);
  REQUIRE_THROWS_AS(atom_factor(R, SkewPoly{}), ValidationError);
  Caps tight = default_caps();
  tight.poly_deg = 3;
  REQUIRE_THROWS_AS(atom_factor(R, SkewPoly{1, 0, 1, 0, 1}, tight), ValidationError);
  Caps tiny = default_caps();
  tiny.search_steps = 2;
  REQUIRE_THROWS_AS(atom_factor(R, SkewPoly{1, 0, 1, 0, 1}, tiny), CapError);
}

TEST_CASE("bounds and central generators of atoms", "[skewpoly]") {
  SkewRing C3 = make_skew_ring(3, 1, 0);
  SkewPoly p{1, 0, 1};
  auto cb = center_and_bound(C3, p);
  REQUIRE(cb.b == p);  // commutative: the bound is the atom itself
  REQUIRE(cb.z == p);
  REQUIRE(cb.ell == 1);
  REQUIRE(cb.z_rank == 1);
  auto cbx = center_and_bound(C3, SkewPoly{0, 1});
  REQUIRE(cbx.b == SkewPoly({0, 1}));
  REQUIRE(cbx.z == SkewPoly({0, 1}));

  SkewRing R = make_skew_ring(2, 2, 1);
  auto at_x = center_and_bound(R, SkewPoly{0, 1});
  REQUIRE(at_x.b == SkewPoly({0, 1}));
  REQUIRE(at_x.z == SkewPoly({0, 0, 1}));  // x^2 generates the central part of (x)
  REQUIRE(at_x.z_rank == 4);
  auto at_1 = center_and_bound(R, SkewPoly{1, 1});
  REQUIRE(at_1.b == SkewPoly({1, 0, 1}));  // x^2 + 1 = (x+1)^2 under the twist
  REQUIRE(at_1.z == at_1.b);
  REQUIRE(at_1.ell == 1);
  for (const auto& cd : {at_x, at_1}) {
    REQUIRE(is_two_sided(R, cd.b));
    REQUIRE(is_central(R, cd.z));
  }
  // the atom right-divides its bound
  REQUIRE(is_right_divisor(R, SkewPoly{1, 1}, at_1.b));
  // quadratic atoms get the quadratic central irreducible
  auto fq = atom_factor(R, SkewPoly{1, 0, 1, 0, 1});
  auto at_q = center_and_bound(R, fq[0].poly);
  REQUIRE(at_q.b == SkewPoly({1, 0, 1, 0, 1}));
  REQUIRE(is_right_divisor(R, fq[0].poly, at_q.b));
}
