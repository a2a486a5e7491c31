#pragma once

#include "fqrep/module.hpp"

namespace fqrep {

// Weighted quiver data for a hereditary tensor algebra over vertex division
// rings: vertex_weight[i] is the base-field dimension of the ring at vertex i,
// arrow weight is the base-field dimension of its bimodule chunk.
struct SpeciesShape {
  struct Arrow {
    u32 src = 0, tgt = 0;
    u32 weight = 1;
  };
  std::vector<u32> vertex_weight;
  std::vector<Arrow> arrows;

  u32 vertices() const { return static_cast<u32>(vertex_weight.size()); }

  // bilinear form <a,b> = sum d_i a_i b_i - sum_(i->j) w a_i b_j; over the
  // base field this equals hom minus ext for hereditary module pairs
  i64 euler_form(const std::vector<i64>& a, const std::vector<i64>& b) const {
    require(a.size() == vertex_weight.size() && b.size() == vertex_weight.size(),
            "euler_form: dimension vector length");
    i64 s = 0;
    for (size_t i = 0; i < a.size(); ++i)
      s += static_cast<i64>(vertex_weight[i]) * a[i] * b[i];
    for (const auto& ar : arrows)
      s -= static_cast<i64>(ar.weight) * a[ar.src] * b[ar.tgt];
    return s;
  }

  i64 quadratic(const std::vector<i64>& a) const { return euler_form(a, a); }
};

// lengths over the vertex rings, read off the vertex idempotent actions
// (generator convention: the first `vertices` generators are the idempotents)
inline std::vector<i64> dim_vector(const SpeciesShape& S, const FdModule& M) {
  std::vector<i64> d(S.vertices(), 0);
  for (u32 v = 0; v < S.vertices(); ++v) {
    u32 r = rank(M.act[v]);
    u32 dp = r * M.K->degree();
    require(dp % S.vertex_weight[v] == 0, "dim_vector: vertex dim not divisible");
    d[v] = dp / S.vertex_weight[v];
  }
  return d;
}

// For modules over the hereditary tensor algebra of the shape, first
// extensions are determined by morphisms and the form.
inline u32 ext1_dim(const SpeciesShape& S, const FdModule& M, const FdModule& N) {
  i64 h = static_cast<i64>(hom_dim(M, N)) * M.K->degree();  // over base field
  i64 e = h - S.euler_form(dim_vector(S, M), dim_vector(S, N));
  require(e >= 0, "ext1_dim: negative value, shape does not match the modules");
  return static_cast<u32>(e);
}

}  // namespace fqrep
