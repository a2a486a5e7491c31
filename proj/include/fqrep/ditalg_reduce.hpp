// Reduction steps on layers: idempotent deletion, regularization of a split
// differential pair, reduction by the indecomposables of an A2 subalgebra,
// and the descent driver that iterates them toward a quasi-minimal layer,
// re-verifying the norm inequalities on sampled modules at every step.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fqrep/ditalg.hpp"

namespace fqrep {
namespace dit {

// ---------------------------------------------------------------------------
// Deletion of idempotents

struct Deletion {
  Layer layer;
  std::vector<u32> keep;        // kept old vertices, ascending
  std::vector<u32> new_of_old;  // old vertex -> new index (kept only)
};

// Remove the vertices outside `keep` together with every chunk incident to
// them; a differential word dies with any of its letters.  The two-sided
// ideal generated by the removed chunks is differential-stable, because every
// word of a removed chunk starts or ends in a removed vertex.
inline Deletion delete_idempotents(const Layer& A, std::vector<u32> keep,
                                   const Caps& caps = {}) {
  require(!keep.empty(), "delete_idempotents: empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (u32 v : keep) require(v < A.fields.size(), "delete_idempotents: vertex out of range");
  Deletion out;
  out.keep = keep;
  out.new_of_old.assign(A.fields.size(), 0);
  std::vector<bool> kept(A.fields.size(), false);
  std::vector<u32> fields;
  for (u32 t = 0; t < keep.size(); ++t) {
    kept[keep[t]] = true;
    out.new_of_old[keep[t]] = t;
    fields.push_back(A.fields[keep[t]]);
  }
  auto keep_chunk = [&](const Chunk& c) { return kept[c.src] && kept[c.tgt]; };
  std::set<std::string> alive;
  std::vector<Chunk> w0, w1;
  for (const auto& c : A.w0)
    if (keep_chunk(c)) {
      Chunk n = c;
      n.src = out.new_of_old[c.src];
      n.tgt = out.new_of_old[c.tgt];
      w0.push_back(n);
      alive.insert(c.label);
    }
  for (const auto& c : A.w1)
    if (keep_chunk(c)) {
      Chunk n = c;
      n.src = out.new_of_old[c.src];
      n.tgt = out.new_of_old[c.tgt];
      w1.push_back(n);
      alive.insert(c.label);
    }
  std::map<std::string, std::vector<DeltaWord>> delta;
  for (const auto& [label, tab] : A.delta) {
    if (!alive.count(label)) continue;
    std::vector<DeltaWord> nt;
    for (const auto& w : tab) {
      bool ok = true;
      for (const auto& l : w.letters)
        if (!alive.count(l.chunk)) ok = false;
      if (ok) nt.push_back(w);
    }
    if (!nt.empty()) delta.emplace(label, std::move(nt));
  }
  out.layer = make_layer(A.p(), std::move(fields), std::move(w0), std::move(w1),
                         std::move(delta), caps);
  return out;
}

// extend a module of the deleted layer by zero over the removed vertices
inline DitModule push_module(const Layer& A, const Deletion& d, const DitModule& N,
                             const Caps& caps = {}) {
  validate_dit_module(d.layer, N, caps);
  DitModule M;
  M.ell.assign(A.fields.size(), 0);
  std::vector<bool> kept(A.fields.size(), false);
  for (u32 t = 0; t < d.keep.size(); ++t) {
    kept[d.keep[t]] = true;
    M.ell[d.keep[t]] = N.ell[t];
  }
  for (const auto& c : A.w0) {
    if (kept[c.src] && kept[c.tgt])
      M.act.emplace(c.label, N.act.at(c.label));
    else
      M.act.emplace(c.label, Matrix(A.k, dim_at(A, M, c.tgt), dim_at(A, M, c.src)));
  }
  validate_dit_module(A, M, caps);
  return M;
}

// ---------------------------------------------------------------------------
// Regularization

struct Regularization {
  Layer layer;
  std::string removed_w0;  // the degree-0 generator whose differential splits
  std::string removed_w1;  // the degree-1 generator it maps onto
};

namespace detail {

// lowest filtration level among degree-0 chunks, ties by declaration order
inline u32 lowest_w0(const Layer& A) {
  require(!A.w0.empty(), "layer has no degree-zero generators");
  u32 best = 0;
  for (u32 t = 1; t < A.w0.size(); ++t)
    if (A.w0[t].level < A.w0[best].level) best = t;
  return best;
}

}  // namespace detail

// Contract a pair w, v with delta(w) a unit multiple of a single basis element
// of v: both generators die, and so does every word mentioning either (the
// pair generates a differential-stable ideal).  Modules of the result are the
// modules of the input on which w acts by zero.
inline Regularization regularize(const Layer& A, std::optional<std::string> pick = {},
                                 const Caps& caps = {}) {
  const Chunk& w = pick ? A.chunk(*pick) : A.w0[detail::lowest_w0(A)];
  require(!A.is_w1(w.label), "regularize: chosen generator has degree one");
  const auto& tab = A.table(w.label);
  require(!tab.empty(), "regularize: differential vanishes on the lowest summand");
  require(tab.size() == 1 && tab[0].letters.size() == 1,
          "regularize: differential of the lowest summand is not a split piece");
  const std::string v = tab[0].letters[0].chunk;
  Regularization out;
  out.removed_w0 = w.label;
  out.removed_w1 = v;
  std::vector<Chunk> w0, w1;
  for (const auto& c : A.w0)
    if (c.label != w.label) w0.push_back(c);
  for (const auto& c : A.w1)
    if (c.label != v) w1.push_back(c);
  std::map<std::string, std::vector<DeltaWord>> delta;
  for (const auto& [label, t] : A.delta) {
    if (label == w.label || label == v) continue;
    std::vector<DeltaWord> nt;
    for (const auto& word : t) {
      bool ok = true;
      for (const auto& l : word.letters)
        if (l.chunk == w.label || l.chunk == v) ok = false;
      if (ok) nt.push_back(word);
    }
    if (!nt.empty()) delta.emplace(label, std::move(nt));
  }
  out.layer = make_layer(A.p(), A.fields, std::move(w0), std::move(w1),
                         std::move(delta), caps);
  return out;
}

inline DitModule push_module(const Layer& A, const Regularization& r,
                             const DitModule& N, const Caps& caps = {}) {
  validate_dit_module(r.layer, N, caps);
  DitModule M;
  M.ell = N.ell;
  M.act = N.act;
  const Chunk& w = A.chunk(r.removed_w0);
  M.act.emplace(r.removed_w0, Matrix(A.k, dim_at(A, M, w.tgt), dim_at(A, M, w.src)));
  validate_dit_module(A, M, caps);
  return M;
}

// ---------------------------------------------------------------------------
// Reduction by the indecomposables of an A2 subalgebra

// The subalgebra is D_tgt x D_src with the chosen chunk as its bimodule; its
// indecomposables are the two simples and the one extension P.  New vertices
// are ordered [top simple of P, socle-free simple, P], then the untouched
// vertices in their old order.
struct Reduction {
  Layer layer;
  std::string chunk;  // the consumed degree-0 generator
  u32 vi = 0;         // its old source vertex
  u32 vt = 0;         // its old target vertex
  u32 tau = 0;        // its twist
  u32 d = 1;          // common degree of the two vertex fields
  std::vector<u32> outside;  // untouched old vertices, new index = 3 + position
};

namespace detail {

// new-layer slots meeting a given old vertex; ascending
inline std::vector<u32> a2_slots(const Reduction& r, u32 old_vertex) {
  if (old_vertex == r.vt) return {0, 2};
  if (old_vertex == r.vi) return {1, 2};
  for (u32 t = 0; t < r.outside.size(); ++t)
    if (r.outside[t] == old_vertex) return {3 + t};
  require(false, "reduction: vertex lookup failed");
  return {};
}

inline std::string comp_label(const std::string& base, u32 ns, u32 nt) {
  return base + "@" + std::to_string(ns) + "_" + std::to_string(nt);
}

}  // namespace detail

// Replace the A2 part by one vertex per indecomposable.  Chunks incident to
// the pair split into one component per valid slot pair; their differentials
// are the commutators with the two radical maps of the A2 category (the socle
// inclusion into P and the top projection out of P), which enter as fresh
// degree-1 generators.  Scope: the consumed chunk and every chunk meeting its
// vertices must have empty differential tables and appear in no word, no
// degree-1 chunk may meet those vertices, and a twisted chunk is only reduced
// when nothing else meets its vertices.
inline Reduction reduce_by_module(const Layer& A, const std::string& label,
                                  const Caps& caps = {}) {
  const Chunk& v = A.chunk(label);
  require(!A.is_w1(label), "reduce_by_module: generator has degree one");
  require(v.src != v.tgt, "reduce_by_module: generator is a loop");
  Reduction out;
  out.chunk = label;
  out.vi = v.src;
  out.vt = v.tgt;
  out.tau = v.twist;
  out.d = A.fields[v.src];
  require(A.fields[v.tgt] == out.d && A.op(label).lc == out.d,
          "reduce_by_module: species of dimensions (" +
              std::to_string(A.op(label).lc / A.fields[v.tgt]) + "," +
              std::to_string(A.op(label).lc / A.fields[v.src]) +
              ") is not of A2 type");
  auto touches = [&](const Chunk& c) {
    return c.src == out.vi || c.src == out.vt || c.tgt == out.vi || c.tgt == out.vt;
  };
  u32 incident = 0;
  for (const auto& c : A.w0)
    if (c.label != label && touches(c)) ++incident;
  for (const auto& c : A.w1)
    require(!touches(c), "reduce_by_module: a degree-one generator meets the pair");
  require(out.tau == 0 || incident == 0,
          "reduce_by_module: twisted reduction with extra incident chunks");
  for (const auto& c : A.w0)
    if (touches(c))
      require(A.table(c.label).empty(),
              "reduce_by_module: incident generator has a differential");
  for (const auto& [lab, tab] : A.delta)
    for (const auto& word : tab)
      for (const auto& l : word.letters)
        require(!touches(A.chunk(l.chunk)),
                "reduce_by_module: a word references the reduced pair");
  for (u32 r = 0; r < A.fields.size(); ++r)
    if (r != out.vi && r != out.vt) out.outside.push_back(r);
  std::vector<u32> fields{out.d, out.d, out.d};
  for (u32 r : out.outside) fields.push_back(A.fields[r]);
  const std::string rad_incl = "rad_incl@" + label;  // socle of P, slot 0 -> 2
  const std::string rad_proj = "rad_proj@" + label;  // top of P, slot 2 -> 1
  std::vector<Chunk> w0, w1;
  std::map<std::string, std::vector<DeltaWord>> delta;
  // r^{(alpha,gamma)} letters of the commutator formula
  auto rad_letter = [&](u32 alpha, u32 gamma) -> std::optional<std::string> {
    if (alpha == 0 && gamma == 2) return rad_incl;
    if (alpha == 2 && gamma == 1) return rad_proj;
    return std::nullopt;
  };
  for (const auto& c : A.w0) {
    if (c.label == label) continue;
    auto ss = detail::a2_slots(out, c.src), ts = detail::a2_slots(out, c.tgt);
    bool split = touches(c);
    for (u32 alpha : ss)
      for (u32 beta : ts) {
        Chunk n = c;
        n.src = alpha;
        n.tgt = beta;
        n.level = 3 * c.level + (alpha == 2 ? 1 : 0) + (beta == 2 ? 1 : 0);
        if (split) n.label = detail::comp_label(c.label, alpha, beta);
        w0.push_back(n);
        if (!split) continue;
        // delta(b^{ab}) = sum_g b^{gb} r^{ag} - sum_g r^{gb} b^{ag}
        std::vector<DeltaWord> tab;
        for (u32 gamma : ss) {
          auto r = rad_letter(alpha, gamma);
          if (!r) continue;
          DeltaWord wd;
          wd.coeff = 1;
          wd.letters = {{detail::comp_label(c.label, gamma, beta), 0}, {*r, 0}};
          tab.push_back(std::move(wd));
        }
        for (u32 gamma : ts) {
          auto r = rad_letter(gamma, beta);
          if (!r) continue;
          DeltaWord wd;
          wd.coeff = A.p() - 1;
          wd.letters = {{*r, 0}, {detail::comp_label(c.label, alpha, gamma), 0}};
          tab.push_back(std::move(wd));
        }
        if (!tab.empty()) delta.emplace(n.label, std::move(tab));
      }
    if (!split) {
      auto it = A.delta.find(c.label);
      if (it != A.delta.end()) delta.emplace(c.label, it->second);
    }
  }
  for (const auto& c : A.w1) {
    Chunk n = c;
    n.src = detail::a2_slots(out, c.src)[0];
    n.tgt = detail::a2_slots(out, c.tgt)[0];
    n.level = 3 * c.level;
    w1.push_back(n);
    auto it = A.delta.find(c.label);
    if (it != A.delta.end()) delta.emplace(c.label, it->second);
  }
  w1.push_back(Chunk{0, 2, out.tau ? out.d - out.tau : 0, 0, rad_incl});
  w1.push_back(Chunk{2, 1, 0, 0, rad_proj});
  out.layer = make_layer(A.p(), std::move(fields), std::move(w0), std::move(w1),
                         std::move(delta), caps);
  return out;
}

// assemble the module of the input layer carried by a reduced-layer module:
// old target vertex gets the slot-0 and slot-2 parts, old source the slot-1
// and slot-2 parts, the consumed chunk acting as the Frobenius-twist glue
// between the two copies of the slot-2 space
inline DitModule push_module(const Layer& A, const Reduction& r, const DitModule& N,
                             const Caps& caps = {}) {
  validate_dit_module(r.layer, N, caps);
  DitModule M;
  M.ell.assign(A.fields.size(), 0);
  M.ell[r.vt] = N.ell[0] + N.ell[2];
  M.ell[r.vi] = N.ell[1] + N.ell[2];
  for (u32 t = 0; t < r.outside.size(); ++t) M.ell[r.outside[t]] = N.ell[3 + t];
  // column offset of a slot inside the coordinate layout of an old vertex
  auto slot_off = [&](u32 old_vertex, u32 slot) -> u32 {
    auto ss = detail::a2_slots(r, old_vertex);
    u32 off = 0;
    for (u32 s : ss) {
      if (s == slot) return off;
      off += N.ell[s] * r.layer.fields[s];
    }
    require(false, "reduction: slot lookup failed");
    return 0;
  };
  FqRef D = A.vertex_field(r.vi);
  Matrix F = Matrix::from_flat(A.k, r.d, r.d, D->frob_matrix(r.tau));
  for (const auto& c : A.w0) {
    Matrix Z(A.k, dim_at(A, M, c.tgt), dim_at(A, M, c.src));
    if (c.label == r.chunk) {
      u32 ro = slot_off(r.vt, 2), co = slot_off(r.vi, 2);
      for (u32 t = 0; t < N.ell[2]; ++t)
        for (u32 a = 0; a < r.d; ++a)
          for (u32 b = 0; b < r.d; ++b)
            Z.set(ro + t * r.d + a, co + t * r.d + b, F.at(a, b));
    } else {
      for (u32 alpha : detail::a2_slots(r, c.src))
        for (u32 beta : detail::a2_slots(r, c.tgt)) {
          bool split = c.src == r.vi || c.src == r.vt || c.tgt == r.vi || c.tgt == r.vt;
          const Matrix& B =
              N.act.at(split ? detail::comp_label(c.label, alpha, beta) : c.label);
          u32 ro = slot_off(c.tgt, beta), co = slot_off(c.src, alpha);
          for (u32 i = 0; i < B.rows(); ++i)
            for (u32 j = 0; j < B.cols(); ++j) Z.set(ro + i, co + j, B.at(i, j));
        }
    }
    M.act.emplace(c.label, std::move(Z));
  }
  validate_dit_module(A, M, caps);
  return M;
}

// ---------------------------------------------------------------------------
// Descent driver

struct SampleCheck {
  std::vector<u32> ell;     // multiplicities over the reduced layer
  u64 reduced_enorm = 0;    // weighted norm before pushing
  u64 pushed_enorm = 0;     // weighted norm of the carried module
  bool sincere = false;     // the carried module meets every vertex
  bool strict = false;      // strict inequality was required and held
};

struct TraceStep {
  std::string tag;    // "1-regularize", "2.a", "2.b-infinite", "X-reduction"
  std::string chunk;  // the distinguished degree-0 generator of the step
  std::vector<u32> kept;  // for deletion steps
  std::vector<SampleCheck> samples;
};

// the tensor algebra of the terminal simple bimodule over its field(s)
struct MinimalAlgebra {
  std::vector<u32> fields;
  Chunk chunk;
  bool infinite_type = false;
};

struct ReductionTrace {
  u32 q = 1;
  std::vector<TraceStep> steps;
  std::string status;      // "quasi_minimal" or "diagnostic"
  std::string diagnostic;  // set when status == "diagnostic"
  std::optional<MinimalAlgebra> minimal;
  Layer final_layer;
};

struct DescendHints {
  std::optional<std::string> w0_first;      // overrides the lowest-level choice
  u32 max_steps = 8;
  u32 samples_per_step = 2;
  std::vector<std::vector<u32>> sample_ells;  // per reduced layer, optional
  u64 seed = 31337;
};

namespace detail {

// Verify the norm inequality of one reduction step on sampled indecomposable
// modules of the reduced layer: carried norms never drop below the reduced
// ones, strictly when the carried module is sincere (for regularization and
// reduction with a surviving degree-0 part).
template <typename Push>
inline std::vector<SampleCheck> verify_step(const Layer& before, const Layer& after,
                                            Push push, bool strict_when_sincere,
                                            const DescendHints& h, const Caps& caps) {
  std::vector<SampleCheck> out;
  std::vector<std::vector<u32>> cands = h.sample_ells;
  if (cands.empty()) {
    cands.push_back(std::vector<u32>(after.fields.size(), 1));
    if (!after.fields.empty()) {
      std::vector<u32> two(after.fields.size(), 1);
      two[0] = 2;
      cands.push_back(two);
    }
  }
  u32 made = 0;
  for (u32 ci = 0; ci < cands.size() && made < h.samples_per_step; ++ci) {
    if (cands[ci].size() != after.fields.size()) continue;
    for (u32 attempt = 0; attempt < 8; ++attempt) {
      DitModule N;
      try {
        N = random_dit_module(after, cands[ci], h.seed + 97 * ci + attempt, caps);
      } catch (const ValidationError&) {
        continue;  // zero module or invalid multiplicities for this layer
      }
      if (!dit_is_indec(after, N, caps)) continue;
      SampleCheck sc;
      sc.ell = cands[ci];
      sc.reduced_enorm = enorm(after, N, caps).enorm;
      DitModule M = push(N);
      sc.pushed_enorm = enorm(before, M, caps).enorm;
      sc.sincere = is_sincere(before, M);
      require(sc.reduced_enorm <= sc.pushed_enorm,
              "descend: carried module lowered the weighted norm");
      if (strict_when_sincere && sc.sincere) {
        require(sc.reduced_enorm < sc.pushed_enorm,
                "descend: sincere carried module kept the weighted norm");
        sc.strict = true;
      }
      out.push_back(std::move(sc));
      ++made;
      break;
    }
  }
  return out;
}

inline const Chunk* pick_w0(const Layer& A, const DescendHints& h) {
  if (h.w0_first && A.find_chunk(*h.w0_first) && !A.is_w1(*h.w0_first))
    return &A.chunk(*h.w0_first);
  return &A.w0[lowest_w0(A)];
}

}  // namespace detail

// Iterate the reduction steps on a layer until it is quasi-minimal (a single
// degree-0 generator with zero differential over its own vertex fields, of
// infinite representation type) or a branch outside the implemented scope is
// hit; q only annotates the trace, the steps do not depend on it.
inline ReductionTrace descend(const Layer& A, u32 q, const DescendHints& hints = {},
                              const Caps& caps = {}) {
  require(q >= 1, "descend: q must be positive");
  ReductionTrace tr;
  tr.q = q;
  Layer cur = A;
  DescendHints h = hints;
  for (u32 step = 0;; ++step) {
    if (cur.w0.empty()) {
      tr.status = "diagnostic";
      tr.diagnostic = "no degree-zero generators left";
      break;
    }
    const Chunk w = *detail::pick_w0(cur, h);
    h.w0_first.reset();  // the pin applies to the first step only
    u32 m_tgt = cur.op(w.label).lc / cur.fields[w.tgt];
    u32 m_src = cur.op(w.label).lc / cur.fields[w.src];
    bool shape_minimal = cur.w0.size() == 1 && cur.table(w.label).empty() &&
                         cur.fields.size() == (w.src == w.tgt ? 1u : 2u);
    if (shape_minimal && (w.src == w.tgt || m_tgt * m_src >= 4)) {
      tr.status = "quasi_minimal";
      tr.minimal = MinimalAlgebra{cur.fields, w, true};
      break;
    }
    if (step >= h.max_steps) {
      tr.status = "diagnostic";
      tr.diagnostic = "step budget exhausted";
      break;
    }
    if (!cur.table(w.label).empty()) {
      Regularization rg;
      try {
        rg = regularize(cur, w.label, caps);
      } catch (const ValidationError& e) {
        tr.status = "diagnostic";
        tr.diagnostic = e.what();
        break;
      }
      TraceStep ts;
      ts.tag = "1-regularize";
      ts.chunk = w.label;
      ts.samples = detail::verify_step(
          cur, rg.layer, [&](const DitModule& N) { return push_module(cur, rg, N, caps); },
          true, h, caps);
      tr.steps.push_back(std::move(ts));
      cur = rg.layer;
      continue;
    }
    if (w.src == w.tgt) {
      if (cur.fields.size() > 1) {
        Deletion dl = delete_idempotents(cur, {w.src}, caps);
        TraceStep ts;
        ts.tag = "2.a";
        ts.chunk = w.label;
        ts.kept = dl.keep;
        ts.samples = detail::verify_step(
            cur, dl.layer,
            [&](const DitModule& N) { return push_module(cur, dl, N, caps); }, false, h,
            caps);
        tr.steps.push_back(std::move(ts));
        cur = dl.layer;
      }
      tr.status = "quasi_minimal";
      tr.minimal = MinimalAlgebra{{cur.fields[cur.chunk(w.label).src]},
                                  cur.chunk(w.label), true};
      break;
    }
    if (m_tgt * m_src >= 4) {
      if (cur.fields.size() > 2) {
        Deletion dl = delete_idempotents(cur, {w.src, w.tgt}, caps);
        TraceStep ts;
        ts.tag = "2.b-infinite";
        ts.chunk = w.label;
        ts.kept = dl.keep;
        ts.samples = detail::verify_step(
            cur, dl.layer,
            [&](const DitModule& N) { return push_module(cur, dl, N, caps); }, false, h,
            caps);
        tr.steps.push_back(std::move(ts));
        cur = dl.layer;
      }
      const Chunk& wc = cur.chunk(w.label);
      tr.status = "quasi_minimal";
      tr.minimal =
          MinimalAlgebra{{cur.fields[wc.tgt], cur.fields[wc.src]}, wc, true};
      break;
    }
    if (m_tgt == 1 && m_src == 1) {
      Reduction rd;
      try {
        rd = reduce_by_module(cur, w.label, caps);
      } catch (const ValidationError& e) {
        tr.status = "diagnostic";
        tr.diagnostic = e.what();
        break;
      }
      TraceStep ts;
      ts.tag = "X-reduction";
      ts.chunk = w.label;
      ts.samples = detail::verify_step(
          cur, rd.layer, [&](const DitModule& N) { return push_module(cur, rd, N, caps); },
          !rd.layer.w0.empty(), h, caps);
      tr.steps.push_back(std::move(ts));
      cur = rd.layer;
      continue;
    }
    tr.status = "diagnostic";
    tr.diagnostic = "species of dimensions (" + std::to_string(m_tgt) + "," +
                    std::to_string(m_src) + ") beyond A2 type is not implemented";
    break;
  }
  tr.final_layer = cur;
  return tr;
}

}  // namespace dit
}  // namespace fqrep
