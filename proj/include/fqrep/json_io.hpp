// On-disk formats: JSON round-trips for algebras, modules over both kinds of
// rings, layers, bimodules, witness manifests, and the analysis reports.
// Every field element is written as its coordinate vector over the prime
// field; loaders check shapes and re-validate the algebraic laws, and they
// ignore unknown keys so artifacts may carry provenance stamps.
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fqrep/algebra.hpp"
#include "fqrep/ditalg.hpp"
#include "fqrep/ditalg_reduce.hpp"
#include "fqrep/ebtii.hpp"
#include "fqrep/embed.hpp"
#include "fqrep/module.hpp"
#include "fqrep/pidmod.hpp"

namespace fqrep {
namespace io {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Plumbing: deterministic text, file transport, checked key access

// canonical serialization: sorted keys (the container is a std::map) and a
// fixed indent, so identical values dump to identical bytes
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline std::string dump_line(const Json& j) { return j.dump(); }

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "io: cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ValidationError("io: " + path + " is not valid JSON: " + e.what());
  }
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io: cannot write " + path);
  out << text;
  require(out.good(), "io: short write on " + path);
}

inline void write_json(const std::string& path, const Json& j) {
  write_text(path, dump(j));
}

inline const Json& key(const Json& j, const char* name) {
  require(j.is_object(), std::string("json: expected an object holding '") + name + "'");
  auto it = j.find(name);
  require(it != j.end(), std::string("json: missing key '") + name + "'");
  return *it;
}

// integers arrive unsigned from the parser but signed from in-memory
// construction, so both storage classes are accepted
inline bool holds_u64(const Json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<i64>() >= 0);
}

inline bool holds_u32(const Json& v) {
  return holds_u64(v) && v.get<u64>() <= 0xffffffffull;
}

inline u32 get_u32(const Json& j, const char* name) {
  const Json& v = key(j, name);
  require(holds_u32(v),
          std::string("json: key '") + name + "' must be a small nonnegative integer");
  return v.get<u32>();
}

inline u64 get_u64(const Json& j, const char* name) {
  const Json& v = key(j, name);
  require(holds_u64(v),
          std::string("json: key '") + name + "' must be a nonnegative integer");
  return v.get<u64>();
}

inline std::string get_string(const Json& j, const char* name) {
  const Json& v = key(j, name);
  require(v.is_string(), std::string("json: key '") + name + "' must be a string");
  return v.get<std::string>();
}

inline std::vector<u32> get_u32_list(const Json& v, const std::string& what) {
  require(v.is_array(), "json: " + what + " must be an array");
  std::vector<u32> out;
  out.reserve(v.size());
  for (const Json& e : v) {
    require(holds_u32(e), "json: " + what + " entries must be small nonnegative integers");
    out.push_back(e.get<u32>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Field elements and matrices

inline Json save_elt(const FqLevel& K, u32 code) { return Json(K.digits(code)); }

inline u32 load_elt(const FqLevel& K, const Json& v) {
  auto d = get_u32_list(v, "field element");
  require(d.size() <= K.degree(), "field element: too many coordinates");
  for (u32 c : d) require(c < K.p(), "field element: coordinate out of range");
  return K.from_digits(d);
}

// entries as raw codes; used for matrices over the prime field
inline Json save_matrix(const Matrix& A) {
  Json rows = Json::array();
  for (u32 i = 0; i < A.rows(); ++i) {
    Json row = Json::array();
    for (u32 j = 0; j < A.cols(); ++j) row.push_back(A.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix load_matrix(FqRef K, const Json& v, const std::string& what) {
  require(v.is_array(), "json: " + what + " must be an array of rows");
  u32 rows = static_cast<u32>(v.size());
  u32 cols = rows ? static_cast<u32>(v.at(0).size()) : 0;
  Matrix A(K, rows, cols);
  for (u32 i = 0; i < rows; ++i) {
    auto r = get_u32_list(v.at(i), what + " row");
    require(r.size() == cols, "json: " + what + " rows must have equal length");
    for (u32 j = 0; j < cols; ++j) {
      require(r[j] < K->q(), "json: " + what + " entry out of range");
      A.set(i, j, r[j]);
    }
  }
  return A;
}

// entries as coordinate vectors; used for matrices over extension fields
inline Json save_matrix_elts(const FqLevel& K, const Matrix& A) {
  Json rows = Json::array();
  for (u32 i = 0; i < A.rows(); ++i) {
    Json row = Json::array();
    for (u32 j = 0; j < A.cols(); ++j) row.push_back(save_elt(K, A.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix load_matrix_elts(FqRef K, const Json& v, const std::string& what) {
  require(v.is_array(), "json: " + what + " must be an array of rows");
  u32 rows = static_cast<u32>(v.size());
  u32 cols = rows ? static_cast<u32>(v.at(0).size()) : 0;
  Matrix A(K, rows, cols);
  for (u32 i = 0; i < rows; ++i) {
    const Json& r = v.at(i);
    require(r.is_array() && r.size() == cols,
            "json: " + what + " rows must have equal length");
    for (u32 j = 0; j < cols; ++j) A.set(i, j, load_elt(*K, r.at(j)));
  }
  return A;
}

// ---------------------------------------------------------------------------
// Structure-constant algebras: {p, n, dim, basis, mul, unit[, idempotents]}

inline std::vector<std::string> default_labels(u32 n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (u32 i = 0; i < n; ++i) out.push_back("e" + std::to_string(i));
  return out;
}

inline Json save_algebra_elt(const FdAlgebra& A, const Vec& v) {
  Json out = Json::array();
  for (u32 k = 0; k < A.dim(); ++k) out.push_back(save_elt(A.K(), v[k]));
  return out;
}

inline Vec load_algebra_elt(const FdAlgebra& A, const Json& v) {
  require(v.is_array() && v.size() == A.dim(),
          "algebra element: one coordinate per basis vector");
  Vec out(A.dim());
  for (u32 k = 0; k < A.dim(); ++k) out[k] = load_elt(A.K(), v.at(k));
  return out;
}

inline Json save_algebra(const FdAlgebra& A, std::vector<std::string> labels = {},
                         const std::vector<Vec>& idempotents = {}) {
  const u32 n = A.dim();
  if (labels.empty()) labels = default_labels(n);
  require(labels.size() == n, "save algebra: one label per basis element");
  Json j;
  j["p"] = A.K().p();
  j["n"] = A.K().degree();
  j["dim"] = n;
  j["basis"] = labels;
  Json mul = Json::array();
  for (u32 i = 0; i < n; ++i) {
    Json row = Json::array();
    for (u32 jj = 0; jj < n; ++jj) {
      Json prod = Json::array();
      for (u32 k = 0; k < n; ++k) prod.push_back(save_elt(A.K(), A.sc(i, jj, k)));
      row.push_back(std::move(prod));
    }
    mul.push_back(std::move(row));
  }
  j["mul"] = std::move(mul);
  j["unit"] = save_algebra_elt(A, A.unit());
  if (!idempotents.empty()) {
    Json es = Json::array();
    for (const Vec& e : idempotents) es.push_back(save_algebra_elt(A, e));
    j["idempotents"] = std::move(es);
  }
  return j;
}

inline FdAlgebra load_algebra(const Json& j, const Caps& caps = default_caps()) {
  u32 p = get_u32(j, "p");
  u32 deg = get_u32(j, "n");
  u32 n = get_u32(j, "dim");
  if (n > caps.algebra_dim) throw CapError("algebra: dimension over cap algebra_dim");
  FqRef K = make_tower(p, {deg}, caps)->level(deg);
  const Json& basis = key(j, "basis");
  require(basis.is_array() && basis.size() == n, "algebra: one basis label per element");
  const Json& mul = key(j, "mul");
  require(mul.is_array() && mul.size() == n, "algebra: mul table must have dim rows");
  std::vector<u32> sc(static_cast<size_t>(n) * n * n, 0);
  for (u32 i = 0; i < n; ++i) {
    const Json& row = mul.at(i);
    require(row.is_array() && row.size() == n, "algebra: mul table must be square");
    for (u32 jj = 0; jj < n; ++jj) {
      const Json& prod = row.at(jj);
      require(prod.is_array() && prod.size() == n,
              "algebra: each product needs dim coefficients");
      for (u32 k = 0; k < n; ++k)
        sc[(static_cast<size_t>(i) * n + jj) * n + k] = load_elt(*K, prod.at(k));
    }
  }
  const Json& unit = key(j, "unit");
  require(unit.is_array() && unit.size() == n, "algebra: unit needs dim coefficients");
  Vec u(n);
  for (u32 k = 0; k < n; ++k) u[k] = load_elt(*K, unit.at(k));
  FdAlgebra A(K, n, std::move(sc), std::move(u), caps);
  if (j.contains("idempotents")) {
    const Json& es = j.at("idempotents");
    require(es.is_array(), "algebra: idempotents must be an array");
    for (const Json& ej : es) {
      Vec e = load_algebra_elt(A, ej);
      require(A.mul(e, e) == e, "algebra: listed element is not idempotent");
    }
  }
  return A;
}

inline std::vector<std::string> algebra_labels(const Json& j) {
  const Json& basis = key(j, "basis");
  require(basis.is_array(), "algebra: basis must be an array");
  std::vector<std::string> out;
  for (const Json& b : basis) {
    require(b.is_string(), "algebra: basis labels must be strings");
    out.push_back(b.get<std::string>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Modules over an algebra: {p, n, dim, act}, same element conventions

inline Json save_fdmodule(const FdModule& M) {
  Json j;
  j["p"] = M.K->p();
  j["n"] = M.K->degree();
  j["dim"] = M.dim;
  Json act = Json::array();
  for (const Matrix& A : M.act) act.push_back(save_matrix_elts(*M.K, A));
  j["act"] = std::move(act);
  return j;
}

inline FdModule load_fdmodule(const Json& j, const Caps& caps = default_caps()) {
  u32 p = get_u32(j, "p");
  u32 deg = get_u32(j, "n");
  u32 dim = get_u32(j, "dim");
  if (dim > caps.matrix_dim) throw CapError("module: dimension over cap matrix_dim");
  FdModule M;
  M.K = make_tower(p, {deg}, caps)->level(deg);
  M.dim = dim;
  const Json& act = key(j, "act");
  require(act.is_array(), "module: act must be an array of matrices");
  for (const Json& aj : act) {
    Matrix A = load_matrix_elts(M.K, aj, "module action");
    require(A.rows() == dim && A.cols() == dim, "module: actions must be dim x dim");
    M.act.push_back(std::move(A));
  }
  return M;
}

// ---------------------------------------------------------------------------
// Skew rings and their polynomials: {p, m, twist_exp[, coeffs]}

inline Json save_ring(const skew::SkewRing& R) {
  Json j;
  j["p"] = R.D->p();
  j["m"] = R.D->degree();
  j["twist_exp"] = R.twist;
  return j;
}

inline skew::SkewRing load_ring(const Json& j, const Caps& caps = default_caps()) {
  u32 p = get_u32(j, "p");
  u32 m = get_u32(j, "m");
  u32 twist = get_u32(j, "twist_exp");
  return skew::make_skew_ring(p, m, twist, caps);
}

inline bool ring_matches(const skew::SkewRing& R, const Json& j) {
  return get_u32(j, "p") == R.D->p() && get_u32(j, "m") == R.D->degree() &&
         get_u32(j, "twist_exp") == R.twist;
}

inline Json save_poly_coeffs(const skew::SkewRing& R, const skew::SkewPoly& f) {
  Json out = Json::array();
  i64 d = kpoly::deg(f);
  for (i64 i = 0; i <= d; ++i)
    out.push_back(save_elt(*R.D, f[static_cast<size_t>(i)]));
  return out;
}

inline skew::SkewPoly load_poly_coeffs(const skew::SkewRing& R, const Json& v) {
  require(v.is_array(), "skew poly: coeffs must be an array");
  skew::SkewPoly f;
  for (const Json& c : v) f.push_back(load_elt(*R.D, c));
  while (!f.empty() && f.back() == 0) f.pop_back();
  return f;
}

inline Json save_skew_poly(const skew::SkewRing& R, const skew::SkewPoly& f) {
  Json j = save_ring(R);
  j["coeffs"] = save_poly_coeffs(R, f);
  return j;
}

inline skew::SkewPoly load_skew_poly(const skew::SkewRing& R, const Json& j) {
  require(ring_matches(R, j), "skew poly: ring of the file does not match");
  return load_poly_coeffs(R, key(j, "coeffs"));
}

// ---------------------------------------------------------------------------
// Modules over a skew ring: {dim, x_action, field}
//
// Only the x action is stored.  The file basis is normalized so the
// coefficient generator acts by the block diagonal of its multiplication
// matrix, exactly the convention of the in-memory cyclic construction, so
// the loader can rebuild W without storing it.

namespace detail {

// chain basis v, Wv, ..., W^{m-1}v per block: W satisfies the irreducible
// field polynomial, so the space is semisimple over the subalgebra it
// generates and every vector outside the current span starts a fresh block
inline Matrix w_normalizer(const PidModule& M) {
  const u32 n = M.dim_p();
  const u32 m = M.R.D->degree();
  FqRef Fp = M.R.Fp;
  Matrix T(Fp, n, n);
  u32 filled = 0;
  for (u32 cand = 0; cand < n && filled < n; ++cand) {
    Matrix probe(Fp, n, filled + 1);
    for (u32 i = 0; i < n; ++i)
      for (u32 j = 0; j < filled; ++j) probe.set(i, j, T.at(i, j));
    probe.set(cand, filled, 1);
    if (rank(probe) <= filled) continue;
    Matrix v(Fp, n, 1);
    v.set(cand, 0, 1);
    for (u32 step = 0; step < m; ++step) {
      for (u32 i = 0; i < n; ++i) T.set(i, filled, v.at(i, 0));
      ++filled;
      if (step + 1 < m) v = M.W * v;
    }
  }
  require(filled == n, "pid module: coefficient action is not a field action");
  return T;
}

}  // namespace detail

inline Json save_pid_module(const PidModule& M) {
  const u32 m = M.R.D->degree();
  Matrix T = detail::w_normalizer(M);
  auto Ti = inverse(T);
  require(Ti.has_value(), "pid module: basis change is singular");
  Matrix X = *Ti * M.X * T;
  Json j;
  j["dim"] = M.dim_p() / m;
  j["x_action"] = save_matrix(X);
  j["field"] = save_ring(M.R);
  return j;
}

inline PidModule load_pid_module(const Json& j, const Caps& caps = default_caps()) {
  skew::SkewRing R = load_ring(key(j, "field"), caps);
  u32 dim = get_u32(j, "dim");
  u32 m = R.D->degree();
  u64 dim_p = static_cast<u64>(dim) * m;
  if (dim_p > caps.matrix_dim) throw CapError("pid module: dimension over cap matrix_dim");
  u32 n = static_cast<u32>(dim_p);
  Matrix X = load_matrix(R.Fp, key(j, "x_action"), "x_action");
  require(X.rows() == n && X.cols() == n,
          "pid module: x_action must be square of size dim * m");
  Matrix Lw = Matrix::from_flat(R.Fp, m, m, R.D->mult_matrix(R.D->x_class()));
  Matrix W(R.Fp, n, n);
  for (u32 b = 0; b < dim; ++b)
    for (u32 i = 0; i < m; ++i)
      for (u32 jj = 0; jj < m; ++jj) W.set(b * m + i, b * m + jj, Lw.at(i, jj));
  PidModule M{std::move(R), std::move(X), std::move(W), {}};
  validate_pid_module(M);
  return M;
}

// ---------------------------------------------------------------------------
// Layers: {p, fields, w0, w1, delta}; chunk twists are written only when set

inline Json save_chunk(const dit::Chunk& c) {
  Json j;
  j["src"] = c.src;
  j["tgt"] = c.tgt;
  j["level"] = c.level;
  j["label"] = c.label;
  if (c.twist) j["twist"] = c.twist;
  return j;
}

inline dit::Chunk load_chunk(const Json& j) {
  dit::Chunk c;
  c.src = get_u32(j, "src");
  c.tgt = get_u32(j, "tgt");
  c.level = get_u32(j, "level");
  c.label = get_string(j, "label");
  c.twist = j.contains("twist") ? get_u32(j, "twist") : 0;
  return c;
}

// a word is [coeff, [chunk, s], ...], letters applied left to right
inline Json save_word(const dit::DeltaWord& w) {
  Json j = Json::array();
  j.push_back(w.coeff);
  for (const dit::Letter& l : w.letters) j.push_back(Json::array({l.chunk, l.s}));
  return j;
}

inline dit::DeltaWord load_word(const Json& v) {
  require(v.is_array() && !v.empty(), "delta word: need [coeff, letters...]");
  dit::DeltaWord w;
  require(v.at(0).is_number_unsigned(), "delta word: coefficient must be an integer");
  w.coeff = v.at(0).get<u32>();
  for (size_t t = 1; t < v.size(); ++t) {
    const Json& l = v.at(t);
    require(l.is_array() && l.size() == 2 && l.at(0).is_string() &&
                l.at(1).is_number_unsigned(),
            "delta word: letters are [chunk, power] pairs");
    w.letters.push_back({l.at(0).get<std::string>(), l.at(1).get<u32>()});
  }
  return w;
}

inline Json save_layer(const dit::Layer& A) {
  Json j;
  j["p"] = A.p();
  j["fields"] = A.fields;
  Json w0 = Json::array();
  for (const dit::Chunk& c : A.w0) w0.push_back(save_chunk(c));
  j["w0"] = std::move(w0);
  Json w1 = Json::array();
  for (const dit::Chunk& c : A.w1) w1.push_back(save_chunk(c));
  j["w1"] = std::move(w1);
  Json delta = Json::object();
  for (const auto& [label, words] : A.delta) {
    if (words.empty()) continue;
    Json ws = Json::array();
    for (const dit::DeltaWord& w : words) ws.push_back(save_word(w));
    delta[label] = std::move(ws);
  }
  j["delta"] = std::move(delta);
  return j;
}

inline dit::Layer load_layer(const Json& j, const Caps& caps = default_caps()) {
  u32 p = get_u32(j, "p");
  std::vector<u32> fields = get_u32_list(key(j, "fields"), "fields");
  auto chunks = [](const Json& v, const char* what) {
    require(v.is_array(), std::string("layer: ") + what + " must be an array");
    std::vector<dit::Chunk> out;
    for (const Json& c : v) out.push_back(load_chunk(c));
    return out;
  };
  std::vector<dit::Chunk> w0 = chunks(key(j, "w0"), "w0");
  std::vector<dit::Chunk> w1 = chunks(key(j, "w1"), "w1");
  std::map<std::string, std::vector<dit::DeltaWord>> delta;
  if (j.contains("delta")) {
    const Json& dj = j.at("delta");
    require(dj.is_object(), "layer: delta must map labels to word lists");
    for (auto it = dj.begin(); it != dj.end(); ++it) {
      require(it.value().is_array(), "layer: delta entries must be arrays of words");
      std::vector<dit::DeltaWord> ws;
      for (const Json& w : it.value()) ws.push_back(load_word(w));
      delta[it.key()] = std::move(ws);
    }
  }
  return dit::make_layer(p, std::move(fields), std::move(w0), std::move(w1),
                         std::move(delta), caps);
}

// ---------------------------------------------------------------------------
// Layer modules: {ell, act}, one prime-field matrix per degree-0 chunk

inline Json save_dit_module(const dit::Layer& A, const dit::DitModule& M) {
  Json j;
  j["ell"] = M.ell;
  Json act = Json::object();
  for (const dit::Chunk& c : A.w0) act[c.label] = save_matrix(M.act.at(c.label));
  j["act"] = std::move(act);
  return j;
}

inline dit::DitModule load_dit_module(const dit::Layer& A, const Json& j,
                                      const Caps& caps = default_caps()) {
  dit::DitModule M;
  M.ell = get_u32_list(key(j, "ell"), "ell");
  const Json& act = key(j, "act");
  require(act.is_object(), "dit module: act must map labels to matrices");
  for (const dit::Chunk& c : A.w0) {
    require(act.contains(c.label), "dit module: missing action for chunk " + c.label);
    M.act.emplace(c.label, load_matrix(A.k, act.at(c.label), "action " + c.label));
  }
  dit::validate_dit_module(A, M, caps);
  return M;
}

// ---------------------------------------------------------------------------
// Embedding bimodules: {lambda, gamma, rank, actions[, ann]}
//
// Action entries are bare coefficient lists; the ring is pinned once by the
// gamma header.  The optional two-sided annihilator is stored the same way.

inline Json save_bimodule(const embed::EmbeddingBimodule& Z) {
  const u32 r = Z.rank;
  std::vector<std::string> labels =
      Z.labels.empty() ? default_labels(Z.lambda.dim()) : Z.labels;
  Json j;
  j["lambda"] = save_algebra(Z.lambda, labels);
  j["gamma"] = save_ring(Z.gamma);
  j["rank"] = r;
  Json actions = Json::object();
  for (u32 e = 0; e < Z.lambda.dim(); ++e) {
    Json mat = Json::array();
    for (u32 a = 0; a < r; ++a) {
      Json row = Json::array();
      for (u32 b = 0; b < r; ++b)
        row.push_back(save_poly_coeffs(Z.gamma, Z.entry(e, a, b)));
      mat.push_back(std::move(row));
    }
    actions[labels[e]] = std::move(mat);
  }
  j["actions"] = std::move(actions);
  if (Z.ann) j["ann"] = save_poly_coeffs(Z.gamma, *Z.ann);
  return j;
}

inline embed::EmbeddingBimodule load_bimodule(const Json& j,
                                              const Caps& caps = default_caps()) {
  embed::EmbeddingBimodule Z;
  Z.lambda = load_algebra(key(j, "lambda"), caps);
  Z.labels = algebra_labels(key(j, "lambda"));
  Z.gamma = load_ring(key(j, "gamma"), caps);
  Z.rank = get_u32(j, "rank");
  const Json& actions = key(j, "actions");
  require(actions.is_object(), "bimodule: actions must map labels to matrices");
  for (u32 e = 0; e < Z.lambda.dim(); ++e) {
    const std::string& label = Z.labels[e];
    require(actions.contains(label), "bimodule: missing action for basis " + label);
    const Json& mat = actions.at(label);
    require(mat.is_array() && mat.size() == Z.rank, "bimodule: action must have rank rows");
    std::vector<skew::SkewPoly> flat;
    flat.reserve(static_cast<size_t>(Z.rank) * Z.rank);
    for (const Json& row : mat) {
      require(row.is_array() && row.size() == Z.rank,
              "bimodule: action must have rank columns");
      for (const Json& f : row) flat.push_back(load_poly_coeffs(Z.gamma, f));
    }
    Z.action.push_back(std::move(flat));
  }
  if (j.contains("ann")) Z.ann = load_poly_coeffs(Z.gamma, j.at("ann"));
  embed::validate_bimodule(Z, caps);
  return Z;
}

// ---------------------------------------------------------------------------
// Reports

inline Json save_enorm_report(const dit::EnormReport& r) {
  Json j;
  j["c"] = r.c;
  j["c_i"] = r.c_i;
  j["endo_deg"] = r.endo_deg;
  j["len_endo"] = r.len_endo;
  j["norm"] = r.norm;
  j["enorm"] = r.enorm;
  return j;
}

inline Json save_cert(const ebtii::CertRecord& c) {
  Json j;
  j["seed"] = c.seed;
  j["members_checked"] = c.members_checked;
  j["pairs_checked"] = c.pairs_checked;
  j["indecomposable"] = c.indecomposable;
  j["pairwise_non_iso"] = c.pairwise_non_iso;
  j["endolength_uniform"] = c.endolength_uniform;
  if (!c.failure.empty()) j["failure"] = c.failure;
  j["pass"] = c.pass();
  return j;
}

inline Json save_verification_report(const embed::VerificationReport& r) {
  Json j;
  j["family_size"] = r.family_size;
  j["indec_inputs"] = r.indec_inputs;
  j["pairs_checked"] = r.pairs_checked;
  j["ses_checked"] = r.ses_checked;
  j["indec_preserved"] = r.indec_preserved;
  j["non_iso_preserved"] = r.non_iso_preserved;
  j["exact"] = r.exact;
  Json indec = Json::array();
  for (const auto& f : r.indec_failures) {
    Json e;
    e["index"] = f.index;
    e["part_dims"] = f.part_dims;
    indec.push_back(std::move(e));
  }
  j["indec_failures"] = std::move(indec);
  Json iso = Json::array();
  for (const auto& f : r.iso_failures) {
    Json e;
    e["i"] = f.i;
    e["j"] = f.j;
    e["witness"] = save_matrix(f.witness);
    iso.push_back(std::move(e));
  }
  j["iso_failures"] = std::move(iso);
  j["ses_failures"] = r.ses_failures;
  j["pass"] = r.pass();
  return j;
}

inline Json save_control_report(const embed::ControlReport& r) {
  Json j;
  j["sample"] = r.sample;
  j["c"] = r.c;
  j["c_prime"] = r.c_prime;
  Json rows = Json::array();
  for (const auto& [a, b] : r.rows) rows.push_back(Json::array({a, b}));
  j["rows"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// Reduction traces as JSON lines: one step per line, then a summary line

inline std::string trace_case(const std::string& tag) {
  if (tag == "1-regularize") return "regularization";
  if (tag == "X-reduction") return "reduction-by-module";
  if (tag.rfind("2.", 0) == 0) return "deletion";
  return tag;
}

inline Json save_minimal(const dit::MinimalAlgebra& m) {
  Json j;
  j["fields"] = m.fields;
  j["chunk"] = save_chunk(m.chunk);
  j["infinite_type"] = m.infinite_type;
  return j;
}

inline std::string save_trace_jsonl(const dit::ReductionTrace& tr) {
  std::ostringstream out;
  for (size_t s = 0; s < tr.steps.size(); ++s) {
    const dit::TraceStep& st = tr.steps[s];
    Json j;
    j["step"] = s;
    j["tag"] = st.tag;
    j["case"] = trace_case(st.tag);
    j["chunk"] = st.chunk;
    if (!st.kept.empty()) j["kept"] = st.kept;
    Json samples = Json::array();
    for (const dit::SampleCheck& sc : st.samples) {
      Json e;
      e["ell"] = sc.ell;
      e["reduced_enorm"] = sc.reduced_enorm;
      e["pushed_enorm"] = sc.pushed_enorm;
      e["sincere"] = sc.sincere;
      e["strict"] = sc.strict;
      samples.push_back(std::move(e));
    }
    j["samples"] = std::move(samples);
    out << dump_line(j) << "\n";
  }
  Json tail;
  tail["q"] = tr.q;
  tail["status"] = tr.status;
  if (!tr.diagnostic.empty()) tail["diagnostic"] = tr.diagnostic;
  if (tr.minimal) tail["minimal"] = save_minimal(*tr.minimal);
  tail["steps"] = tr.steps.size();
  out << dump_line(tail) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Witness manifests: {level, endolength, members, certificates} plus the
// ring-side members and constants needed to replay the verification

inline Json witness_manifest(const ebtii::LadderStep& step,
                             const std::vector<std::string>& member_paths,
                             const std::vector<std::string>& source_paths) {
  require(member_paths.size() == step.image.size(),
          "manifest: one path per image member");
  require(source_paths.size() == step.source.size(),
          "manifest: one path per source member");
  Json j;
  j["level"] = step.level;
  j["requested"] = step.requested;
  j["endolength"] = step.image.endolength;
  j["source_endolength"] = step.source.endolength;
  j["c"] = step.c;
  j["c_prime"] = step.c_prime;
  j["members"] = member_paths;
  j["source_members"] = source_paths;
  Json certs;
  certs["image"] = save_cert(step.image.cert);
  certs["source"] = save_cert(step.source.cert);
  j["certificates"] = std::move(certs);
  return j;
}

// family manifests name their module files under either key; ladder output
// keeps the ring-side modules under source_members
inline std::vector<std::string> manifest_member_paths(const Json& j) {
  const char* key_name = j.contains("source_members") ? "source_members" : "members";
  const Json& v = key(j, key_name);
  require(v.is_array(), "manifest: members must be an array of paths");
  std::vector<std::string> out;
  for (const Json& e : v) {
    require(e.is_string(), "manifest: member entries must be path strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace io
}  // namespace fqrep
