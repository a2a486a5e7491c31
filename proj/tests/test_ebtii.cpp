#include "catch2/catch_amalgamated.hpp"
#include "fqrep/ebtii.hpp"

using namespace fqrep;
using namespace fqrep::skew;
using namespace fqrep::ebtii;
using Catch::Matchers::ContainsSubstring;

namespace {

// the monic irreducibles over F_2 by ascending (degree, code), degree <= 4
const std::vector<SkewPoly> kF2Atoms = {
    {0, 1}, {1, 1}, {1, 1, 1}, {1, 1, 0, 1}, {1, 0, 1, 1}, {1, 1, 0, 0, 1}};

}  // namespace

TEST_CASE("small irreducibles line up as simple witnesses", "[ebtii]") {
  SkewRing R = make_skew_ring(2, 1, 0);
  WitnessFamily fam = pid_witnesses(R, 1, 6, 4);

  REQUIRE(fam.size() == 6);
  REQUIRE(fam.level == 1);
  REQUIRE(fam.endolength == 1);
  REQUIRE(fam.source.size() == 6);
  for (size_t i = 0; i < 6; ++i) {
    REQUIRE(kpoly::charpoly(fam.source[i].X) == kF2Atoms[i]);
    REQUIRE(fam.members[i].dim == kpoly::deg(kF2Atoms[i]));
    REQUIRE(fam.members[i].act.size() == 2);
  }
  REQUIRE(fam.cert.pass());
  REQUIRE(fam.cert.seed == 1);
  REQUIRE(fam.cert.members_checked == 6);
  REQUIRE(fam.cert.pairs_checked == 15);
  REQUIRE(fam.cert.failure.empty());
}

TEST_CASE("level three triples the endolength over the same atoms", "[ebtii]") {
  SkewRing R = make_skew_ring(2, 1, 0);
  WitnessFamily fam = pid_witnesses(R, 3, 5, 3);

  REQUIRE(fam.size() == 5);
  REQUIRE(fam.endolength == 3);
  const FqLevel& F = *R.Fp;
  for (size_t i = 0; i < 5; ++i) {
    const SkewPoly& p = kF2Atoms[i];
    kpoly::Poly cube = kpoly::mul(F, kpoly::mul(F, p, p), p);
    REQUIRE(kpoly::charpoly(fam.source[i].X) == cube);
    REQUIRE(fam.members[i].dim == 3 * kpoly::deg(p));
  }
  REQUIRE(fam.cert.pass());
  REQUIRE(fam.cert.pairs_checked == 10);
}

TEST_CASE("certification catches duplicates, splits, and wrong claims",
          "[ebtii]") {
  SkewRing R = make_skew_ring(2, 1, 0);
  FdModule S = pid_to_fdmodule(indec_module(R, SkewPoly{0, 1}, 1));

  CertRecord dup = certify_members({S, S}, 1, 5);
  REQUIRE_FALSE(dup.pass());
  REQUIRE(dup.indecomposable);
  REQUIRE_FALSE(dup.pairwise_non_iso);
  REQUIRE_THAT(dup.failure, ContainsSubstring("members 0 and 1 are isomorphic"));

  CertRecord split = certify_members({dsum(S, S)}, 1, 5);
  REQUIRE_FALSE(split.pass());
  REQUIRE_FALSE(split.indecomposable);
  REQUIRE_THAT(split.failure, ContainsSubstring("member 0 decomposes"));
  REQUIRE(split.members_checked == 0);

  CertRecord wrong = certify_members({S}, 5, 5);
  REQUIRE_FALSE(wrong.pass());
  REQUIRE_FALSE(wrong.endolength_uniform);
  REQUIRE_THAT(wrong.failure,
               ContainsSubstring("has endolength 1, family claims 5"));

  CertRecord vac = certify_members({}, 0, 7);
  REQUIRE(vac.pass());
  REQUIRE(vac.seed == 7);
  REQUIRE(vac.members_checked == 0);
  REQUIRE(vac.pairs_checked == 0);
}

TEST_CASE("a zero count certifies an empty family and pushes to one",
          "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  WitnessFamily fam = pid_witnesses(Z.gamma, 1, 0);
  REQUIRE(fam.size() == 0);
  REQUIRE(fam.endolength == 0);
  REQUIRE(fam.cert.pass());

  WitnessFamily out = push_witnesses(Z, fam);
  REQUIRE(out.size() == 0);
  REQUIRE(out.endolength == 0);
  REQUIRE(out.cert.pass());
}

TEST_CASE("too few atoms below the cap is a capped failure", "[ebtii]") {
  SkewRing R = make_skew_ring(2, 1, 0);
  REQUIRE_THROWS_AS(pid_witnesses(R, 1, 6, 2), CapError);
  REQUIRE_THROWS_WITH(pid_witnesses(R, 1, 6, 2),
                      ContainsSubstring("insufficient atoms") &&
                          ContainsSubstring("found 3 of 6"));
}

TEST_CASE("the kronecker push doubles the endolength and keeps the family",
          "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  WitnessFamily fam = pid_witnesses(Z.gamma, 1, 4, 3);
  REQUIRE(fam.endolength == 1);

  WitnessFamily out = push_witnesses(Z, fam);
  REQUIRE(out.size() == 4);
  REQUIRE(out.endolength == 2);
  REQUIRE(out.cert.pass());
  REQUIRE(out.source.size() == 4);  // bucket preimages ride along
  std::vector<u32> dims;
  for (const auto& m : out.members) dims.push_back(m.dim);
  REQUIRE(dims == std::vector<u32>{2, 2, 4, 6});

  embed::ControlReport ctl = embed::control_constants(Z, fam.source);
  REQUIRE(ctl.c == 1);
  REQUIRE(ctl.c_prime == 2);
  REQUIRE(out.endolength <= ctl.c_prime * fam.endolength);
  REQUIRE(fam.endolength <= ctl.c * out.endolength);
}

TEST_CASE("pushes demand certified input with ring-side members", "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  WitnessFamily fam = pid_witnesses(Z.gamma, 1, 2, 2);

  WitnessFamily tampered = fam;
  tampered.cert.pairwise_non_iso = false;
  REQUIRE_THROWS_WITH(push_witnesses(Z, tampered),
                      ContainsSubstring("not certified"));

  WitnessFamily headless = fam;
  headless.source.clear();
  REQUIRE_THROWS_WITH(push_witnesses(Z, headless),
                      ContainsSubstring("ring-side"));
}

TEST_CASE("a collapsed functor is refused during the push", "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  SkewPoly z;
  Z.action[2] = {z, z, z, z};  // both arrows dead: images fall apart
  Z.action[3] = {z, z, z, z};
  REQUIRE_NOTHROW(embed::validate_bimodule(Z));

  WitnessFamily fam = pid_witnesses(Z.gamma, 1, 2, 2);
  REQUIRE_THROWS_WITH(push_witnesses(Z, fam),
                      ContainsSubstring("verification failed") &&
                          ContainsSubstring("an image decomposes"));
}

TEST_CASE("bucket selection prefers the crowd then the smaller value",
          "[ebtii]") {
  REQUIRE(ebtii::detail::pick_bucket({2, 2, 3}) == 2);
  REQUIRE(ebtii::detail::pick_bucket({3, 3, 2, 2}) == 2);
  REQUIRE(ebtii::detail::pick_bucket({5, 5, 5, 1}) == 5);
  REQUIRE(ebtii::detail::pick_bucket({7}) == 7);
  REQUIRE_THROWS_WITH(ebtii::detail::pick_bucket({}),
                      ContainsSubstring("empty"));
}

TEST_CASE("the ladder climbs with the measured gap rule", "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  Ladder lad = ebtii_ladder(Z, {1, 2, 3}, 3, 3);

  REQUIRE(lad.complete());
  REQUIRE(lad.steps.size() == 3);
  std::vector<u32> requested, used, src_endol, img_endol;
  for (const auto& s : lad.steps) {
    requested.push_back(s.requested);
    used.push_back(s.level);
    src_endol.push_back(s.source.endolength);
    img_endol.push_back(s.image.endolength);
    REQUIRE(s.c == 1);
    REQUIRE(s.c_prime == 2);
    REQUIRE(s.source.size() == 3);
    REQUIRE(s.image.size() == 3);
    REQUIRE(s.source.cert.pass());
    REQUIRE(s.image.cert.pass());
  }
  REQUIRE(requested == std::vector<u32>{1, 2, 3});
  REQUIRE(used == std::vector<u32>{1, 3, 7});
  REQUIRE(src_endol == std::vector<u32>{1, 3, 7});
  REQUIRE(img_endol == std::vector<u32>{2, 6, 14});

  std::vector<u32> top_dims;
  for (const auto& m : lad.steps.back().image.members)
    top_dims.push_back(m.dim);
  REQUIRE(top_dims == std::vector<u32>{14, 14, 28});
}

TEST_CASE("a tied level is advanced, not repeated", "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  Ladder lad = ebtii_ladder(Z, {1, 2}, 2, 2);

  REQUIRE(lad.complete());
  REQUIRE(lad.steps.size() == 2);
  REQUIRE(lad.steps[0].image.endolength == 2);
  // level 2 would give source endolength 2 = c * 2, not a strict gap
  REQUIRE(lad.steps[1].requested == 2);
  REQUIRE(lad.steps[1].level == 3);
  REQUIRE(lad.steps[1].image.endolength == 6);
}

TEST_CASE("caps stop the climb with the achieved prefix", "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  Caps tight;
  // rung two verifies sequence middles of image dimension 12; rung three
  // already needs module images of dimension 14
  tight.matrix_dim = 13;
  Ladder lad = ebtii_ladder(Z, {1, 2, 3}, 2, 2, 1, tight);

  REQUIRE_FALSE(lad.complete());
  REQUIRE(lad.steps.size() == 2);
  REQUIRE(lad.steps[1].image.endolength == 6);
  REQUIRE_THAT(lad.diagnostic, ContainsSubstring("level 3"));
  REQUIRE_THAT(lad.diagnostic, ContainsSubstring("over cap"));
  REQUIRE_THAT(lad.diagnostic, ContainsSubstring("achieved 2 of 3 levels"));
}

TEST_CASE("fresh seeds re-certify emitted families", "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  WitnessFamily fam = pid_witnesses(Z.gamma, 2, 5, 4, 1);
  CertRecord again = certify_members(fam.members, fam.endolength, 9876);
  REQUIRE(again.pass());
  REQUIRE(again.seed == 9876);
  REQUIRE(again.members_checked == 5);
  REQUIRE(again.pairs_checked == 10);

  WitnessFamily out = push_witnesses(Z, fam);
  CertRecord imaged = certify_members(out.members, out.endolength, 4242);
  REQUIRE(imaged.pass());
  REQUIRE(imaged.members_checked == out.size());
}

TEST_CASE("the atom pool grows with the degree cap", "[ebtii]") {
  SkewRing R = make_skew_ring(2, 1, 0);
  std::vector<size_t> sizes;
  for (u32 cap : {3, 4, 5}) sizes.push_back(witness_atoms(R, cap).size());
  REQUIRE(sizes == std::vector<size_t>{5, 8, 14});

  SkewRing R4 = make_skew_ring(2, 2, 0);
  REQUIRE(witness_atoms(R4, 1).size() == 4);
  REQUIRE(witness_atoms(R4, 2).size() == 10);

  // under the twist the three nonzero constants merge into one class
  SkewRing R4t = make_skew_ring(2, 2, 1);
  auto twisted = witness_atoms(R4t, 1);
  REQUIRE(twisted.size() == 2);
  REQUIRE(twisted[0].poly == SkewPoly{0, 1});
  REQUIRE(twisted[1].poly == SkewPoly{1, 1});
}

TEST_CASE("the ladder rejects malformed requests", "[ebtii]") {
  embed::EmbeddingBimodule Z = embed::kronecker_exemplar(2);
  REQUIRE_THROWS_WITH(ebtii_ladder(Z, {}, 2),
                      ContainsSubstring("at least one level"));
  REQUIRE_THROWS_WITH(ebtii_ladder(Z, {2, 2}, 2),
                      ContainsSubstring("strictly increasing"));
  REQUIRE_THROWS_WITH(ebtii_ladder(Z, {1, 2}, 0),
                      ContainsSubstring("count must be positive"));
}
