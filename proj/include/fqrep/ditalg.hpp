// Layered differential tensor data over products of finite fields, with the
// module category at desk scale: validation of the differential (bilinearity,
// degree, triangularity, square zero), morphism spaces coupling a degree-0 and
// a degree-1 part, endo-algebra analysis, and norm / e-norm bookkeeping.
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fqrep/algebra.hpp"
#include "fqrep/common.hpp"
#include "fqrep/field.hpp"
#include "fqrep/matrix.hpp"

namespace fqrep {
namespace dit {

// One simple bimodule summand of a layer: a copy of the composite field
// F_{lcm(d_tgt, d_src)}, left-multiplied through D_tgt and right-multiplied
// through frob^twist of the embedded D_src.  Non-isomorphic summands over a
// fixed pair of vertices differ exactly by the twist.
struct Chunk {
  u32 src = 0;
  u32 tgt = 0;
  u32 twist = 0;
  u32 level = 0;
  std::string label;
};

// Basis element z^s of a named chunk, z the canonical generator of its field.
struct Letter {
  std::string chunk;
  u32 s = 0;
};

// One summand coeff * l_0 l_1 ... of a differential table; l_0 is applied
// last, so adjacent letters must satisfy src(l_t) == tgt(l_{t+1}).
struct DeltaWord {
  u32 coeff = 1;
  std::vector<Letter> letters;
};

// Cached linear data of one chunk.  Product columns are indexed by pairs
// (a, b) -> a * d_src + b, the pair meaning x_tgt^a * frob^twist(x_src^b).
struct ChunkOps {
  u32 lc = 0;        // k-dimension of the chunk
  u32 lbound = 0;    // lc / d_tgt: size of the left basis {z^u}
  FqRef Fl;          // the composite field
  Matrix exprs;      // (d_tgt*d_src) x lc, column s expresses z^s in products
  Matrix relations;  // kernel of the product matrix
  // left_expand[s][u] is the D_tgt coordinate of z^s along z^u, u < lbound
  std::vector<std::vector<u32>> left_expand;
};

struct Layer {
  TowerRef tower;
  FqRef k;                 // prime field of coefficients
  std::vector<u32> fields; // degrees d_i of the vertex fields
  std::vector<Chunk> w0;   // degree-0 generators (these act on modules)
  std::vector<Chunk> w1;   // degree-1 generators
  std::map<std::string, std::vector<DeltaWord>> delta;
  std::map<std::string, ChunkOps> ops;

  u32 p() const { return k->p(); }

  const Chunk* find_chunk(const std::string& label) const {
    for (const auto& c : w0)
      if (c.label == label) return &c;
    for (const auto& c : w1)
      if (c.label == label) return &c;
    return nullptr;
  }

  const Chunk& chunk(const std::string& label) const {
    const Chunk* c = find_chunk(label);
    require(c != nullptr, "layer: unknown chunk " + label);
    return *c;
  }

  bool is_w1(const std::string& label) const {
    for (const auto& c : w1)
      if (c.label == label) return true;
    return false;
  }

  const ChunkOps& op(const std::string& label) const {
    auto it = ops.find(label);
    require(it != ops.end(), "layer: unknown chunk " + label);
    return it->second;
  }

  const std::vector<DeltaWord>& table(const std::string& label) const {
    static const std::vector<DeltaWord> empty;
    auto it = delta.find(label);
    return it == delta.end() ? empty : it->second;
  }

  FqRef vertex_field(u32 i) const { return tower->level(fields[i]); }
};

namespace detail {

inline u32 lcm_u32(u32 a, u32 b) { return a / std::gcd(a, b) * b; }

inline ChunkOps build_chunk_ops(const TowerRef& tower, u32 d_src, u32 d_tgt,
                                u32 twist) {
  ChunkOps o;
  o.lc = lcm_u32(d_src, d_tgt);
  o.lbound = o.lc / d_tgt;
  o.Fl = tower->level(o.lc);
  FqRef Ds = tower->level(d_src), Dt = tower->level(d_tgt);
  FqRef k = tower->prime_level();
  // products x_tgt^a * frob^twist(x_src^b), written in the z-power basis
  Matrix P(k, o.lc, d_tgt * d_src);
  for (u32 a = 0; a < d_tgt; ++a) {
    u32 xa = tower->embed(d_tgt, o.lc, Dt->pow(Dt->x_class(), a));
    for (u32 b = 0; b < d_src; ++b) {
      u32 yb = tower->embed(d_src, o.lc, Ds->frob(Ds->pow(Ds->x_class(), b), twist));
      auto dg = o.Fl->digits(o.Fl->mul(xa, yb));
      for (u32 s = 0; s < o.lc; ++s) P.set(s, a * d_src + b, dg[s]);
    }
  }
  LinSolve ex = solve_linear(P, Matrix::identity(k, o.lc));
  require(ex.consistent, "layer: chunk products do not span the chunk");
  o.exprs = ex.particular;
  o.relations = ex.kernel;
  // z^s over the left basis {z^u : u < lbound} with D_tgt coordinates
  Matrix B(k, o.lc, o.lc);
  for (u32 u = 0; u < o.lbound; ++u) {
    u32 zu = o.Fl->pow(o.Fl->x_class(), u);
    for (u32 v = 0; v < d_tgt; ++v) {
      u32 xv = tower->embed(d_tgt, o.lc, Dt->pow(Dt->x_class(), v));
      auto dg = o.Fl->digits(o.Fl->mul(xv, zu));
      for (u32 s = 0; s < o.lc; ++s) B.set(s, u * d_tgt + v, dg[s]);
    }
  }
  LinSolve lx = solve_linear(B, Matrix::identity(k, o.lc));
  require(lx.consistent, "layer: left basis of a chunk is not a basis");
  o.left_expand.assign(o.lc, std::vector<u32>(o.lbound, 0));
  for (u32 s = 0; s < o.lc; ++s)
    for (u32 u = 0; u < o.lbound; ++u) {
      std::vector<u32> digs(d_tgt);
      for (u32 v = 0; v < d_tgt; ++v) digs[v] = lx.particular.at(u * d_tgt + v, s);
      o.left_expand[s][u] = Dt->from_digits(digs);
    }
  return o;
}

}  // namespace detail

// Canonical-form key of a word: the chunk labels and the reduced exponents.
using NormKey = std::pair<std::vector<std::string>, std::vector<u32>>;

// Reduce a formal sum of words to the canonical tensor basis: every letter but
// the leftmost gets an exponent below its left-basis bound, excess factors
// sliding left through the tensor.  The zero sum comes back as an empty map.
inline std::map<NormKey, u32> normalize_words(const Layer& A,
                                              const std::vector<DeltaWord>& in) {
  const FqLevel& k = *A.k;
  std::map<NormKey, u32> out;
  std::vector<DeltaWord> stack(in.begin(), in.end());
  u64 guard = 0;
  while (!stack.empty()) {
    require(++guard < 2000000, "normalize_words: expansion budget exceeded");
    DeltaWord w = std::move(stack.back());
    stack.pop_back();
    if (w.coeff % k.p() == 0) continue;
    u32 r = static_cast<u32>(w.letters.size());
    u32 bad = 0;
    bool found = false;
    for (u32 t = r; t-- > 1;) {
      if (w.letters[t].s >= A.op(w.letters[t].chunk).lbound) {
        bad = t;
        found = true;
        break;
      }
    }
    if (!found) {
      NormKey key;
      for (const auto& l : w.letters) {
        key.first.push_back(l.chunk);
        key.second.push_back(l.s);
      }
      u32 c = k.add(out.count(key) ? out[key] : 0, w.coeff % k.p());
      if (c)
        out[key] = c;
      else
        out.erase(key);
      continue;
    }
    const Chunk& ct = A.chunk(w.letters[bad].chunk);
    const ChunkOps& ot = A.op(w.letters[bad].chunk);
    const Chunk& cl = A.chunk(w.letters[bad - 1].chunk);
    const ChunkOps& ol = A.op(w.letters[bad - 1].chunk);
    FqRef Dm = A.vertex_field(ct.tgt);  // the field the tensor is taken over
    for (u32 u = 0; u < ot.lbound; ++u) {
      u32 d = ot.left_expand[w.letters[bad].s][u];
      if (!d) continue;
      u32 e = A.tower->embed(Dm->degree(), ol.lc, Dm->frob(d, cl.twist));
      u32 z = ol.Fl->pow(ol.Fl->x_class(), w.letters[bad - 1].s);
      auto dg = ol.Fl->digits(ol.Fl->mul(z, e));
      for (u32 sp = 0; sp < ol.lc; ++sp) {
        if (!dg[sp]) continue;
        DeltaWord nw = w;
        nw.coeff = k.mul(w.coeff % k.p(), dg[sp]);
        nw.letters[bad].s = u;
        nw.letters[bad - 1].s = sp;
        stack.push_back(std::move(nw));
      }
    }
  }
  return out;
}

namespace detail {

// words *= x_tgt^a on the left end (branches over the first letter's basis)
inline std::vector<DeltaWord> left_mult(const Layer& A,
                                        const std::vector<DeltaWord>& ws, u32 a) {
  std::vector<DeltaWord> out;
  for (const auto& w : ws) {
    const Chunk& c0 = A.chunk(w.letters.front().chunk);
    const ChunkOps& o0 = A.op(w.letters.front().chunk);
    FqRef Dt = A.vertex_field(c0.tgt);
    u32 xa = A.tower->embed(Dt->degree(), o0.lc, Dt->pow(Dt->x_class(), a));
    u32 z = o0.Fl->pow(o0.Fl->x_class(), w.letters.front().s);
    auto dg = o0.Fl->digits(o0.Fl->mul(xa, z));
    for (u32 sp = 0; sp < o0.lc; ++sp) {
      if (!dg[sp]) continue;
      DeltaWord nw = w;
      nw.coeff = A.k->mul(w.coeff, dg[sp]);
      nw.letters.front().s = sp;
      out.push_back(std::move(nw));
    }
  }
  return out;
}

// words *= y on the right end, y a code of the source field of the last letter
inline std::vector<DeltaWord> right_mult(const Layer& A,
                                         const std::vector<DeltaWord>& ws, u32 y) {
  std::vector<DeltaWord> out;
  for (const auto& w : ws) {
    const Chunk& cr = A.chunk(w.letters.back().chunk);
    const ChunkOps& orr = A.op(w.letters.back().chunk);
    FqRef Ds = A.vertex_field(cr.src);
    u32 ye = A.tower->embed(Ds->degree(), orr.lc, Ds->frob(y, cr.twist));
    u32 z = orr.Fl->pow(orr.Fl->x_class(), w.letters.back().s);
    auto dg = orr.Fl->digits(orr.Fl->mul(z, ye));
    for (u32 sp = 0; sp < orr.lc; ++sp) {
      if (!dg[sp]) continue;
      DeltaWord nw = w;
      nw.coeff = A.k->mul(w.coeff, dg[sp]);
      nw.letters.back().s = sp;
      out.push_back(std::move(nw));
    }
  }
  return out;
}

// differential of a single basis letter z^s of chunk `label`, via the product
// expansion of z^s and the bilinear extension of the generator's table
inline std::vector<DeltaWord> letter_delta(const Layer& A, const std::string& label,
                                           u32 s) {
  std::vector<DeltaWord> out;
  const auto& tab = A.table(label);
  if (tab.empty()) return out;
  const Chunk& c = A.chunk(label);
  const ChunkOps& o = A.op(label);
  u32 dt = A.fields[c.tgt], ds = A.fields[c.src];
  FqRef Ds = A.vertex_field(c.src);
  for (u32 a = 0; a < dt; ++a)
    for (u32 b = 0; b < ds; ++b) {
      u32 e = o.exprs.at(a * ds + b, s);
      if (!e) continue;
      auto part = right_mult(A, left_mult(A, tab, a), Ds->pow(Ds->x_class(), b));
      for (auto& w : part) {
        w.coeff = A.k->mul(w.coeff, e);
        out.push_back(std::move(w));
      }
    }
  return out;
}

inline void check_table_shape(const Layer& A, const std::string& label,
                              const std::vector<DeltaWord>& tab) {
  const Chunk& c = A.chunk(label);
  u32 want_w1 = A.is_w1(label) ? 2 : 1;
  for (const auto& w : tab) {
    require(w.coeff > 0 && w.coeff < A.p(), "layer: word coefficient out of range");
    require(!w.letters.empty(), "layer: empty word in a differential table");
    u32 n1 = 0;
    for (u32 t = 0; t < w.letters.size(); ++t) {
      const Chunk* lc = A.find_chunk(w.letters[t].chunk);
      require(lc != nullptr, "layer: word uses unknown chunk " + w.letters[t].chunk);
      require(w.letters[t].s < A.op(w.letters[t].chunk).lc,
              "layer: word exponent out of range");
      if (A.is_w1(w.letters[t].chunk))
        ++n1;
      else if (!A.is_w1(label))
        require(lc->level < c.level, "layer: differential does not descend the filtration");
      if (t + 1 < w.letters.size())
        require(lc->src == A.chunk(w.letters[t + 1].chunk).tgt,
                "layer: word letters do not compose");
    }
    require(n1 == want_w1, "layer: word degree does not raise by one");
    require(A.chunk(w.letters.front().chunk).tgt == c.tgt &&
                A.chunk(w.letters.back().chunk).src == c.src,
            "layer: word endpoints do not match the chunk");
  }
}

// the table must vanish on every linear relation among the chunk's products,
// otherwise the differential is not defined on the whole chunk
inline void check_table_bilinear(const Layer& A, const std::string& label) {
  const auto& tab = A.table(label);
  if (tab.empty()) return;
  const Chunk& c = A.chunk(label);
  const ChunkOps& o = A.op(label);
  u32 ds = A.fields[c.src];
  FqRef Ds = A.vertex_field(c.src);
  for (u32 r = 0; r < o.relations.cols(); ++r) {
    std::vector<DeltaWord> acc;
    for (u32 a = 0; a < A.fields[c.tgt]; ++a)
      for (u32 b = 0; b < ds; ++b) {
        u32 kc = o.relations.at(a * ds + b, r);
        if (!kc) continue;
        auto part = right_mult(A, left_mult(A, tab, a), Ds->pow(Ds->x_class(), b));
        for (auto& w : part) {
          w.coeff = A.k->mul(w.coeff, kc);
          acc.push_back(std::move(w));
        }
      }
    require(normalize_words(A, acc).empty(),
            "layer: differential table conflicts with the chunk relations on " + label);
  }
}

inline void check_delta_squared(const Layer& A, const std::string& label) {
  std::vector<DeltaWord> acc;
  for (const auto& w : A.table(label)) {
    u32 par = 0;  // degree-1 letters strictly to the left
    for (u32 t = 0; t < w.letters.size(); ++t) {
      auto inner = letter_delta(A, w.letters[t].chunk, w.letters[t].s);
      for (auto& iw : inner) {
        DeltaWord nw;
        nw.coeff = A.k->mul(w.coeff, iw.coeff);
        if (par & 1) nw.coeff = A.k->neg(nw.coeff);
        nw.letters.assign(w.letters.begin(), w.letters.begin() + t);
        nw.letters.insert(nw.letters.end(), iw.letters.begin(), iw.letters.end());
        nw.letters.insert(nw.letters.end(), w.letters.begin() + t + 1, w.letters.end());
        acc.push_back(std::move(nw));
      }
      if (A.is_w1(w.letters[t].chunk)) ++par;
    }
  }
  require(normalize_words(A, acc).empty(),
          "layer: differential does not square to zero on " + label);
}

}  // namespace detail

inline void validate_layer(const Layer& A, const Caps& caps = {}) {
  require(!A.fields.empty(), "layer: no vertex fields");
  for (u32 d : A.fields) require(d >= 1, "layer: vertex degree must be positive");
  u64 wdim = 0;
  std::vector<std::string> labels;
  for (const auto* part : {&A.w0, &A.w1})
    for (const auto& c : *part) {
      require(c.src < A.fields.size() && c.tgt < A.fields.size(),
              "layer: chunk endpoint out of range");
      require(c.twist < A.fields[c.src], "layer: chunk twist out of range");
      require(!c.label.empty(), "layer: chunk without a label");
      labels.push_back(c.label);
      wdim += A.op(c.label).lc;
    }
  if (wdim > caps.algebra_dim) throw CapError("layer: bimodule dimension exceeds cap");
  std::sort(labels.begin(), labels.end());
  require(std::adjacent_find(labels.begin(), labels.end()) == labels.end(),
          "layer: duplicate chunk label");
  for (const auto& [label, tab] : A.delta) {
    require(A.find_chunk(label) != nullptr, "layer: differential of unknown chunk " + label);
    detail::check_table_shape(A, label, tab);
  }
  for (const auto& lab : labels) {
    detail::check_table_bilinear(A, lab);
    detail::check_delta_squared(A, lab);
  }
}

inline Layer make_layer(u32 p, std::vector<u32> fields, std::vector<Chunk> w0,
                        std::vector<Chunk> w1,
                        std::map<std::string, std::vector<DeltaWord>> delta,
                        const Caps& caps = {}) {
  Layer A;
  A.fields = std::move(fields);
  A.w0 = std::move(w0);
  A.w1 = std::move(w1);
  A.delta = std::move(delta);
  require(!A.fields.empty(), "layer: no vertex fields");
  std::vector<u32> degs{1};
  for (u32 d : A.fields) {
    require(d >= 1, "layer: vertex degree must be positive");
    degs.push_back(d);
  }
  for (u32 a : A.fields)
    for (u32 b : A.fields) degs.push_back(detail::lcm_u32(a, b));
  std::sort(degs.begin(), degs.end());
  degs.erase(std::unique(degs.begin(), degs.end()), degs.end());
  A.tower = make_tower(p, degs, caps);
  A.k = A.tower->prime_level();
  for (const auto* part : {&A.w0, &A.w1})
    for (const auto& c : *part) {
      require(c.src < A.fields.size() && c.tgt < A.fields.size(),
              "layer: chunk endpoint out of range");
      require(c.twist < A.fields[c.src], "layer: chunk twist out of range");
      require(!A.ops.count(c.label) && !c.label.empty(), "layer: duplicate chunk label");
      A.ops.emplace(c.label, detail::build_chunk_ops(A.tower, A.fields[c.src],
                                                     A.fields[c.tgt], c.twist));
    }
  validate_layer(A, caps);
  return A;
}

// ---------------------------------------------------------------------------
// Modules

struct DitModule {
  std::vector<u32> ell;               // e_i M has dimension ell[i] * d_i
  std::map<std::string, Matrix> act;  // one matrix per degree-0 chunk
};

inline u32 dim_at(const Layer& A, const DitModule& M, u32 i) {
  return M.ell[i] * A.fields[i];
}

inline u32 dim_total(const Layer& A, const DitModule& M) {
  u32 n = 0;
  for (u32 i = 0; i < A.fields.size(); ++i) n += dim_at(A, M, i);
  return n;
}

inline bool is_sincere(const Layer& A, const DitModule& M) {
  (void)A;
  for (u32 l : M.ell)
    if (!l) return false;
  return true;
}

// block-diagonal action of a vertex field element on e_i M = D_i^{ell_i}
inline Matrix vertex_rho(const Layer& A, const DitModule& M, u32 i, u32 code) {
  FqRef D = A.vertex_field(i);
  u32 d = D->degree();
  Matrix base = Matrix::from_flat(A.k, d, d, D->mult_matrix(code));
  Matrix R(A.k, M.ell[i] * d, M.ell[i] * d);
  for (u32 t = 0; t < M.ell[i]; ++t)
    for (u32 r = 0; r < d; ++r)
      for (u32 c = 0; c < d; ++c) R.set(t * d + r, t * d + c, base.at(r, c));
  return R;
}

inline void validate_dit_module(const Layer& A, const DitModule& M,
                                const Caps& caps = {}) {
  require(M.ell.size() == A.fields.size(), "module: wrong number of vertex spaces");
  u64 total = 0;
  for (u32 i = 0; i < A.fields.size(); ++i) total += u64{M.ell[i]} * A.fields[i];
  require(total >= 1, "module: zero module");
  if (total > caps.matrix_dim) throw CapError("module: dimension exceeds cap");
  require(M.act.size() == A.w0.size(), "module: action count does not match chunks");
  for (const auto& c : A.w0) {
    auto it = M.act.find(c.label);
    require(it != M.act.end(), "module: missing action for chunk " + c.label);
    const Matrix& Ac = it->second;
    require(Ac.rows() == dim_at(A, M, c.tgt) && Ac.cols() == dim_at(A, M, c.src),
            "module: action shape mismatch on " + c.label);
    const ChunkOps& o = A.op(c.label);
    u32 dt = A.fields[c.tgt], ds = A.fields[c.src];
    FqRef Dt = A.vertex_field(c.tgt), Ds = A.vertex_field(c.src);
    for (u32 r = 0; r < o.relations.cols(); ++r) {
      Matrix acc(A.k, Ac.rows(), Ac.cols());
      for (u32 a = 0; a < dt; ++a)
        for (u32 b = 0; b < ds; ++b) {
          u32 kc = o.relations.at(a * ds + b, r);
          if (!kc) continue;
          Matrix term = vertex_rho(A, M, c.tgt, Dt->pow(Dt->x_class(), a)) * Ac *
                        vertex_rho(A, M, c.src, Ds->pow(Ds->x_class(), b));
          acc = acc + term.scal(kc);
        }
      require(acc == Matrix(A.k, Ac.rows(), Ac.cols()),
              "module: action violates the chunk relations on " + c.label);
    }
  }
}

// action of the basis element z^s of a degree-0 chunk, derived from the
// generator's action matrix through the product expansion of z^s
inline Matrix chunk_action(const Layer& A, const DitModule& M,
                           const std::string& label, u32 s) {
  const Chunk& c = A.chunk(label);
  require(!A.is_w1(label), "chunk_action: degree-1 chunks do not act");
  const Matrix& Ac = M.act.at(label);
  const ChunkOps& o = A.op(label);
  u32 dt = A.fields[c.tgt], ds = A.fields[c.src];
  FqRef Dt = A.vertex_field(c.tgt), Ds = A.vertex_field(c.src);
  Matrix out(A.k, Ac.rows(), Ac.cols());
  for (u32 a = 0; a < dt; ++a)
    for (u32 b = 0; b < ds; ++b) {
      u32 e = o.exprs.at(a * ds + b, s);
      if (!e) continue;
      Matrix term = vertex_rho(A, M, c.tgt, Dt->pow(Dt->x_class(), a)) * Ac *
                    vertex_rho(A, M, c.src, Ds->pow(Ds->x_class(), b));
      out = out + term.scal(e);
    }
  return out;
}

// evaluate a degree-0 word on a module (letters applied right to left)
inline Matrix word_action(const Layer& A, const DitModule& M,
                          const std::vector<Letter>& letters) {
  require(!letters.empty(), "word_action: empty word");
  Matrix out = chunk_action(A, M, letters.front().chunk, letters.front().s);
  for (u32 t = 1; t < letters.size(); ++t)
    out = out * chunk_action(A, M, letters[t].chunk, letters[t].s);
  return out;
}

// random module with prescribed multiplicities: each chunk action is a seeded
// combination of a basis of the solution space of the chunk relations
inline DitModule random_dit_module(const Layer& A, std::vector<u32> ell, u64 seed,
                                   const Caps& caps = {}) {
  DitModule M;
  M.ell = std::move(ell);
  require(M.ell.size() == A.fields.size(), "module: wrong number of vertex spaces");
  Rng rng(seed);
  for (const auto& c : A.w0) {
    u32 nr = dim_at(A, M, c.tgt), nc = dim_at(A, M, c.src);
    const ChunkOps& o = A.op(c.label);
    u32 dt = A.fields[c.tgt], ds = A.fields[c.src];
    FqRef Dt = A.vertex_field(c.tgt), Ds = A.vertex_field(c.src);
    if (nr == 0 || nc == 0) {
      M.act.emplace(c.label, Matrix(A.k, nr, nc));
      continue;
    }
    // rows: one block of constraints per chunk relation; columns: entries of A
    Matrix sys(A.k, o.relations.cols() * nr * nc, nr * nc);
    for (u32 r = 0; r < o.relations.cols(); ++r) {
      for (u32 a = 0; a < dt; ++a)
        for (u32 b = 0; b < ds; ++b) {
          u32 kc = o.relations.at(a * ds + b, r);
          if (!kc) continue;
          Matrix L = vertex_rho(A, M, c.tgt, Dt->pow(Dt->x_class(), a));
          Matrix R = vertex_rho(A, M, c.src, Ds->pow(Ds->x_class(), b));
          for (u32 i = 0; i < nr; ++i)
            for (u32 j = 0; j < nc; ++j)
              for (u32 ip = 0; ip < nr; ++ip)
                for (u32 jp = 0; jp < nc; ++jp) {
                  u32 v = A.k->mul(kc, A.k->mul(L.at(i, ip), R.at(jp, j)));
                  if (!v) continue;
                  u32 row = (r * nr + i) * nc + j;
                  u32 col = ip * nc + jp;
                  sys.set(row, col, A.k->add(sys.at(row, col), v));
                }
        }
    }
    Matrix ker = kernel_basis(sys);
    Matrix pick(A.k, nr * nc, 1);
    for (u32 t = 0; t < ker.cols(); ++t) {
      u32 co = static_cast<u32>(rng.below(A.p()));
      if (!co) continue;
      for (u32 i = 0; i < nr * nc; ++i)
        pick.set(i, 0, A.k->add(pick.at(i, 0), A.k->mul(co, ker.at(i, t))));
    }
    Matrix Ac(A.k, nr, nc);
    for (u32 i = 0; i < nr; ++i)
      for (u32 j = 0; j < nc; ++j) Ac.set(i, j, pick.at(i * nc + j, 0));
    M.act.emplace(c.label, Ac);
  }
  validate_dit_module(A, M, caps);
  return M;
}

// ---------------------------------------------------------------------------
// Morphisms

// A morphism M -> N: one block f0[i] per vertex, plus one matrix per degree-1
// chunk correcting the degree-0 intertwining through the differential.
struct DitHom {
  std::vector<Matrix> f0;
  std::map<std::string, Matrix> f1;
};

inline DitHom dit_identity(const Layer& A, const DitModule& M) {
  DitHom h;
  for (u32 i = 0; i < A.fields.size(); ++i)
    h.f0.push_back(Matrix::identity(A.k, dim_at(A, M, i)));
  for (const auto& v : A.w1)
    h.f1.emplace(v.label, Matrix(A.k, dim_at(A, M, v.tgt), dim_at(A, M, v.src)));
  return h;
}

// (f o g)^0 = f^0 g^0,  (f o g)^1_v = f^0_{tgt v} g^1_v + f^1_v g^0_{src v}
inline DitHom dit_compose(const Layer& A, const DitHom& f, const DitHom& g) {
  DitHom h;
  for (u32 i = 0; i < A.fields.size(); ++i) h.f0.push_back(f.f0[i] * g.f0[i]);
  for (const auto& v : A.w1)
    h.f1.emplace(v.label, f.f0[v.tgt] * g.f1.at(v.label) +
                              f.f1.at(v.label) * g.f0[v.src]);
  return h;
}

namespace detail {

struct HomLayout {
  std::vector<u32> f0_off;
  std::map<std::string, u32> f1_off;
  u32 total = 0;
};

inline HomLayout hom_layout(const Layer& A, const DitModule& M, const DitModule& N) {
  HomLayout L;
  u32 off = 0;
  for (u32 i = 0; i < A.fields.size(); ++i) {
    L.f0_off.push_back(off);
    off += dim_at(A, N, i) * dim_at(A, M, i);
  }
  for (const auto& v : A.w1) {
    L.f1_off.emplace(v.label, off);
    off += dim_at(A, N, v.tgt) * dim_at(A, M, v.src);
  }
  L.total = off;
  return L;
}

}  // namespace detail

// Basis of the space of morphisms M -> N: solutions (f0, f1) of the linear
// system made of (1) field-linearity of each f0 block, (2) chunk relations on
// each f1 block, (3) per degree-0 chunk w the intertwining of f0 corrected by
// the differential words of w evaluated with a single degree-1 letter.
inline std::vector<DitHom> dit_hom(const Layer& A, const DitModule& M,
                                   const DitModule& N, const Caps& caps = {}) {
  validate_dit_module(A, M, caps);
  validate_dit_module(A, N, caps);
  detail::HomLayout lay = detail::hom_layout(A, M, N);
  u32 rows = 0;
  for (u32 i = 0; i < A.fields.size(); ++i) rows += dim_at(A, N, i) * dim_at(A, M, i);
  for (const auto& v : A.w1)
    rows += A.op(v.label).relations.cols() * dim_at(A, N, v.tgt) * dim_at(A, M, v.src);
  for (const auto& w : A.w0) rows += dim_at(A, N, w.tgt) * dim_at(A, M, w.src);
  Matrix sys(A.k, rows, lay.total);
  u32 row0 = 0;
  // (1) f0_i rho_M(g) - rho_N(g) f0_i = 0 for the vertex field generator g
  for (u32 i = 0; i < A.fields.size(); ++i) {
    u32 nm = dim_at(A, M, i), nn = dim_at(A, N, i);
    FqRef D = A.vertex_field(i);
    Matrix PM = vertex_rho(A, M, i, D->x_class());
    Matrix PN = vertex_rho(A, N, i, D->x_class());
    for (u32 r = 0; r < nn; ++r)
      for (u32 c = 0; c < nm; ++c) {
        u32 row = row0 + r * nm + c;
        for (u32 cp = 0; cp < nm; ++cp) {
          u32 col = lay.f0_off[i] + r * nm + cp;
          sys.set(row, col, A.k->add(sys.at(row, col), PM.at(cp, c)));
        }
        for (u32 rp = 0; rp < nn; ++rp) {
          u32 col = lay.f0_off[i] + rp * nm + c;
          sys.set(row, col, A.k->sub(sys.at(row, col), PN.at(r, rp)));
        }
      }
    row0 += nn * nm;
  }
  // (2) chunk relations on each degree-1 block
  for (const auto& v : A.w1) {
    const ChunkOps& o = A.op(v.label);
    u32 nm = dim_at(A, M, v.src), nn = dim_at(A, N, v.tgt);
    u32 dt = A.fields[v.tgt], ds = A.fields[v.src];
    FqRef Dt = A.vertex_field(v.tgt), Ds = A.vertex_field(v.src);
    for (u32 r = 0; r < o.relations.cols(); ++r) {
      for (u32 a = 0; a < dt; ++a)
        for (u32 b = 0; b < ds; ++b) {
          u32 kc = o.relations.at(a * ds + b, r);
          if (!kc) continue;
          Matrix L = vertex_rho(A, N, v.tgt, Dt->pow(Dt->x_class(), a));
          Matrix R = vertex_rho(A, M, v.src, Ds->pow(Ds->x_class(), b));
          for (u32 i = 0; i < nn; ++i)
            for (u32 j = 0; j < nm; ++j) {
              u32 row = row0 + i * nm + j;
              for (u32 ip = 0; ip < nn; ++ip)
                for (u32 jp = 0; jp < nm; ++jp) {
                  u32 val = A.k->mul(kc, A.k->mul(L.at(i, ip), R.at(jp, j)));
                  if (!val) continue;
                  u32 col = lay.f1_off.at(v.label) + ip * nm + jp;
                  sys.set(row, col, A.k->add(sys.at(row, col), val));
                }
            }
        }
      row0 += nn * nm;
    }
  }
  // (3) f0_tgt A^M_w - A^N_w f0_src - sum over delta(w) = 0
  for (const auto& w : A.w0) {
    u32 nm = dim_at(A, M, w.src), nn = dim_at(A, N, w.tgt);
    const Matrix& AM = M.act.at(w.label);
    const Matrix& AN = N.act.at(w.label);
    for (u32 r = 0; r < nn; ++r)
      for (u32 c = 0; c < nm; ++c) {
        u32 row = row0 + r * nm + c;
        for (u32 cp = 0; cp < dim_at(A, M, w.tgt); ++cp) {
          u32 col = lay.f0_off[w.tgt] + r * dim_at(A, M, w.tgt) + cp;
          sys.set(row, col, A.k->add(sys.at(row, col), AM.at(cp, c)));
        }
        for (u32 rp = 0; rp < dim_at(A, N, w.src); ++rp) {
          u32 col = lay.f0_off[w.src] + rp * nm + c;
          sys.set(row, col, A.k->sub(sys.at(row, col), AN.at(r, rp)));
        }
      }
    for (const auto& word : A.table(w.label)) {
      u32 mid = 0;
      while (!A.is_w1(word.letters[mid].chunk)) ++mid;
      const Chunk& v = A.chunk(word.letters[mid].chunk);
      const ChunkOps& ov = A.op(word.letters[mid].chunk);
      Matrix Lm = Matrix::identity(A.k, dim_at(A, N, w.tgt));
      for (u32 t = 0; t < mid; ++t)
        Lm = Lm * chunk_action(A, N, word.letters[t].chunk, word.letters[t].s);
      Matrix Rm = Matrix::identity(A.k, dim_at(A, M, w.src));
      for (u32 t = static_cast<u32>(word.letters.size()); t-- > mid + 1;)
        Rm = chunk_action(A, M, word.letters[t].chunk, word.letters[t].s) * Rm;
      u32 dt = A.fields[v.tgt], ds = A.fields[v.src];
      FqRef Dt = A.vertex_field(v.tgt), Ds = A.vertex_field(v.src);
      u32 nvm = dim_at(A, M, v.src), nvn = dim_at(A, N, v.tgt);
      for (u32 a = 0; a < dt; ++a)
        for (u32 b = 0; b < ds; ++b) {
          u32 e = ov.exprs.at(a * ds + b, word.letters[mid].s);
          if (!e) continue;
          Matrix La = Lm * vertex_rho(A, N, v.tgt, Dt->pow(Dt->x_class(), a));
          Matrix Rb = vertex_rho(A, M, v.src, Ds->pow(Ds->x_class(), b)) * Rm;
          u32 m = A.k->neg(A.k->mul(word.coeff, e));
          for (u32 r = 0; r < nn; ++r)
            for (u32 c = 0; c < nm; ++c) {
              u32 row = row0 + r * nm + c;
              for (u32 rp = 0; rp < nvn; ++rp) {
                u32 lv = La.at(r, rp);
                if (!lv) continue;
                for (u32 cp = 0; cp < nvm; ++cp) {
                  u32 val = A.k->mul(m, A.k->mul(lv, Rb.at(cp, c)));
                  if (!val) continue;
                  u32 col = lay.f1_off.at(v.label) + rp * nvm + cp;
                  sys.set(row, col, A.k->add(sys.at(row, col), val));
                }
              }
            }
        }
    }
    row0 += nn * nm;
  }
  Matrix ker = kernel_basis(sys);
  std::vector<DitHom> out;
  for (u32 t = 0; t < ker.cols(); ++t) {
    DitHom h;
    for (u32 i = 0; i < A.fields.size(); ++i) {
      u32 nm = dim_at(A, M, i), nn = dim_at(A, N, i);
      Matrix f(A.k, nn, nm);
      for (u32 r = 0; r < nn; ++r)
        for (u32 c = 0; c < nm; ++c) f.set(r, c, ker.at(lay.f0_off[i] + r * nm + c, t));
      h.f0.push_back(std::move(f));
    }
    for (const auto& v : A.w1) {
      u32 nm = dim_at(A, M, v.src), nn = dim_at(A, N, v.tgt);
      Matrix f(A.k, nn, nm);
      for (u32 r = 0; r < nn; ++r)
        for (u32 c = 0; c < nm; ++c)
          f.set(r, c, ker.at(lay.f1_off.at(v.label) + r * nm + c, t));
      h.f1.emplace(v.label, std::move(f));
    }
    out.push_back(std::move(h));
  }
  return out;
}

// The endomorphisms form an algebra under dit_compose; it is realized
// faithfully by block-triangular matrices [[f0, f1], [0, f0']] acting on
// M + a slot per degree-1 chunk, so composition is matrix multiplication.
inline FdAlgebra dit_end_algebra(const Layer& A, const DitModule& M,
                                 const Caps& caps = {}) {
  std::vector<DitHom> homs = dit_hom(A, M, M, caps);
  u32 n = dim_total(A, M);
  std::vector<u32> voff{0};
  for (u32 i = 0; i < A.fields.size(); ++i) voff.push_back(voff.back() + dim_at(A, M, i));
  u32 nt = n;
  std::map<std::string, u32> slot;
  for (const auto& v : A.w1) {
    slot.emplace(v.label, nt);
    nt += dim_at(A, M, v.src);
  }
  std::vector<Matrix> reps;
  for (const auto& h : homs) {
    Matrix T(A.k, nt, nt);
    for (u32 i = 0; i < A.fields.size(); ++i)
      for (u32 r = 0; r < dim_at(A, M, i); ++r)
        for (u32 c = 0; c < dim_at(A, M, i); ++c)
          T.set(voff[i] + r, voff[i] + c, h.f0[i].at(r, c));
    for (const auto& v : A.w1) {
      const Matrix& B = h.f1.at(v.label);
      for (u32 r = 0; r < B.rows(); ++r)
        for (u32 c = 0; c < B.cols(); ++c) T.set(voff[v.tgt] + r, slot.at(v.label) + c, B.at(r, c));
      const Matrix& S = h.f0[v.src];
      for (u32 r = 0; r < S.rows(); ++r)
        for (u32 c = 0; c < S.cols(); ++c)
          T.set(slot.at(v.label) + r, slot.at(v.label) + c, S.at(r, c));
    }
    reps.push_back(std::move(T));
  }
  return FdAlgebra::from_matrix_span(A.k, reps, caps);
}

inline bool dit_is_indec(const Layer& A, const DitModule& M, const Caps& caps = {}) {
  return dit_end_algebra(A, M, caps).local_data().local;
}

// dimension over the residue division ring of the (local) endomorphism algebra
inline u32 dit_endolength(const Layer& A, const DitModule& M, const Caps& caps = {}) {
  FdAlgebra E = dit_end_algebra(A, M, caps);
  auto ld = E.local_data();
  require(ld.local, "dit_endolength: module is decomposable");
  u32 dK = E.dim() - ld.radical_dim;
  u32 n = dim_total(A, M);
  require(dK > 0 && n % dK == 0, "dit_endolength: dimension not divisible");
  return n / dK;
}

// ---------------------------------------------------------------------------
// Norms

inline u64 norm(const Layer& A, const DitModule& M) {
  require(M.ell.size() == A.fields.size(), "norm: wrong number of vertex spaces");
  u64 out = 0;
  for (const auto& c : A.w0)
    out += u64{A.op(c.label).lc} * M.ell[c.src] * M.ell[c.tgt];
  return out;
}

struct EnormReport {
  u64 c = 1;                  // lcm of the vertex field degrees
  std::vector<u64> c_i;       // c / d_i
  u32 endo_deg = 1;           // degree of the endo residue field over the prime field
  std::vector<u64> len_endo;  // length of each e_i M over that residue field
  u64 norm = 0;
  u64 enorm = 0;
};

// Both norms of an indecomposable module; the weighted one divides each vertex
// dimension by the endo residue degree and rescales chunks by c_i * c_j, which
// forces the exact identity enorm * endo_deg^2 == c^2 * norm.
inline EnormReport enorm(const Layer& A, const DitModule& M, const Caps& caps = {}) {
  EnormReport rep;
  rep.norm = norm(A, M);
  for (u32 d : A.fields) rep.c = detail::lcm_u32(static_cast<u32>(rep.c), d);
  for (u32 d : A.fields) rep.c_i.push_back(rep.c / d);
  FdAlgebra E = dit_end_algebra(A, M, caps);
  auto ld = E.local_data();
  require(ld.local, "enorm: module is decomposable");
  rep.endo_deg = ld.residue_degree;
  for (u32 i = 0; i < A.fields.size(); ++i) {
    u32 di = dim_at(A, M, i);
    require(di % rep.endo_deg == 0, "enorm: vertex dimension not divisible");
    rep.len_endo.push_back(di / rep.endo_deg);
  }
  for (const auto& c : A.w0)
    rep.enorm += rep.c_i[c.src] * rep.c_i[c.tgt] * A.op(c.label).lc *
                 rep.len_endo[c.src] * rep.len_endo[c.tgt];
  require(rep.enorm * rep.endo_deg * rep.endo_deg == rep.c * rep.c * rep.norm,
          "enorm: scaling identity violated");
  return rep;
}

// Seeded search for an isomorphism: a morphism whose degree-0 part is
// invertible at every vertex (the degree-1 part then inverts formally).
inline std::optional<DitHom> dit_iso_modules(const Layer& A, const DitModule& M,
                                             const DitModule& N, u64 seed = 1,
                                             const Caps& caps = {}) {
  if (M.ell.size() != N.ell.size()) return std::nullopt;
  for (u32 i = 0; i < M.ell.size(); ++i)
    if (dim_at(A, M, i) != dim_at(A, N, i)) return std::nullopt;
  std::vector<DitHom> basis = dit_hom(A, M, N, caps);
  auto all_invertible = [&](const DitHom& h) {
    for (u32 i = 0; i < A.fields.size(); ++i)
      if (dim_at(A, M, i) && !is_invertible(h.f0[i])) return false;
    return true;
  };
  for (const auto& h : basis)
    if (all_invertible(h)) return h;
  Rng rng(seed);
  for (u32 tries = 0; tries < 512 && !basis.empty(); ++tries) {
    DitHom h;
    for (u32 i = 0; i < A.fields.size(); ++i)
      h.f0.push_back(Matrix(A.k, dim_at(A, N, i), dim_at(A, M, i)));
    for (const auto& v : A.w1)
      h.f1.emplace(v.label, Matrix(A.k, dim_at(A, N, v.tgt), dim_at(A, M, v.src)));
    for (const auto& b : basis) {
      u32 co = static_cast<u32>(rng.below(A.p()));
      if (!co) continue;
      for (u32 i = 0; i < A.fields.size(); ++i) h.f0[i] = h.f0[i] + b.f0[i].scal(co);
      for (const auto& v : A.w1)
        h.f1[v.label] = h.f1[v.label] + b.f1.at(v.label).scal(co);
    }
    if (all_invertible(h)) return h;
  }
  return std::nullopt;
}

}  // namespace dit
}  // namespace fqrep
