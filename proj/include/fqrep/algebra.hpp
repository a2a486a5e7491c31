#pragma once

#include "fqrep/kpoly.hpp"

namespace fqrep {

using Vec = std::vector<u32>;  // coordinates over a field level

// Finite-dimensional associative unital algebra given by structure constants:
// sc[(i*n + j)*n + k] is the e_k-coefficient of e_i * e_j.
class FdAlgebra {
 public:
  FdAlgebra() : n_(0) {}

  FdAlgebra(FqRef K, u32 dim, std::vector<u32> sc, Vec unit,
            const Caps& caps = default_caps())
      : K_(std::move(K)), n_(dim), sc_(std::move(sc)), unit_(std::move(unit)),
        caps_(caps) {
    if (n_ > caps.algebra_dim) throw CapError("FdAlgebra: dimension exceeds cap");
    require(sc_.size() == static_cast<size_t>(n_) * n_ * n_, "FdAlgebra: bad table size");
    require(unit_.size() == n_, "FdAlgebra: bad unit size");
  }

  u32 dim() const { return n_; }
  FqRef field() const { return K_; }
  const FqLevel& K() const { return *K_; }
  const Vec& unit() const { return unit_; }
  const Caps& caps() const { return caps_; }

  u32 sc(u32 i, u32 j, u32 k) const {
    return sc_[(static_cast<size_t>(i) * n_ + j) * n_ + k];
  }

  Vec zero() const { return Vec(n_, 0); }

  Vec basis_elt(u32 i) const {
    Vec v(n_, 0);
    v[i] = 1;
    return v;
  }

  Vec add(const Vec& a, const Vec& b) const {
    Vec r(n_);
    for (u32 i = 0; i < n_; ++i) r[i] = K_->add(a[i], b[i]);
    return r;
  }

  Vec sub(const Vec& a, const Vec& b) const {
    Vec r(n_);
    for (u32 i = 0; i < n_; ++i) r[i] = K_->sub(a[i], b[i]);
    return r;
  }

  Vec scal(u32 c, const Vec& a) const {
    Vec r(n_);
    for (u32 i = 0; i < n_; ++i) r[i] = K_->mul(c, a[i]);
    return r;
  }

  Vec mul(const Vec& a, const Vec& b) const {
    Vec r(n_, 0);
    for (u32 i = 0; i < n_; ++i) {
      if (!a[i]) continue;
      for (u32 j = 0; j < n_; ++j) {
        if (!b[j]) continue;
        u32 c = K_->mul(a[i], b[j]);
        const size_t base = (static_cast<size_t>(i) * n_ + j) * n_;
        for (u32 k = 0; k < n_; ++k)
          if (sc_[base + k]) r[k] = K_->add(r[k], K_->mul(c, sc_[base + k]));
      }
    }
    return r;
  }

  Vec power(Vec a, u64 e) const {
    Vec r = unit_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  // column j holds the coordinates of a * e_j
  Matrix lmul_matrix(const Vec& a) const {
    Matrix M(K_, n_, n_);
    for (u32 j = 0; j < n_; ++j) {
      Vec c = mul(a, basis_elt(j));
      for (u32 i = 0; i < n_; ++i) M.set(i, j, c[i]);
    }
    return M;
  }

  Matrix rmul_matrix(const Vec& a) const {
    Matrix M(K_, n_, n_);
    for (u32 j = 0; j < n_; ++j) {
      Vec c = mul(basis_elt(j), a);
      for (u32 i = 0; i < n_; ++i) M.set(i, j, c[i]);
    }
    return M;
  }

  // Horner evaluation of a polynomial at an algebra element
  Vec eval_poly(const kpoly::Poly& f, const Vec& a) const {
    Vec r = zero();
    for (size_t i = f.size(); i-- > 0;) {
      r = mul(r, a);
      if (f[i]) r = add(r, scal(f[i], unit_));
    }
    return r;
  }

  kpoly::Poly min_poly_of(const Vec& a) const {
    return kpoly::min_poly(lmul_matrix(a));  // regular rep is faithful (unital)
  }

  bool is_idempotent(const Vec& a) const { return mul(a, a) == a; }

  void validate() const {
    for (u32 i = 0; i < n_; ++i) {
      Vec ei = basis_elt(i);
      require(mul(unit_, ei) == ei && mul(ei, unit_) == ei, "FdAlgebra: unit law fails");
    }
    for (u32 i = 0; i < n_; ++i)
      for (u32 j = 0; j < n_; ++j) {
        Vec ij = mul(basis_elt(i), basis_elt(j));
        for (u32 k = 0; k < n_; ++k) {
          Vec l = mul(ij, basis_elt(k));
          Vec r = mul(basis_elt(i), mul(basis_elt(j), basis_elt(k)));
          require(l == r, "FdAlgebra: associativity fails");
        }
      }
  }

  Vec decode_element(u64 idx) const {
    Vec v(n_);
    for (u32 i = 0; i < n_; ++i) {
      v[i] = static_cast<u32>(idx % K_->q());
      idx /= K_->q();
    }
    return v;
  }

  Vec random_element(Rng& rng) const {
    Vec v(n_);
    for (auto& c : v) c = static_cast<u32>(rng.below(K_->q()));
    return v;
  }

  // ----- constructions -----

  // Algebra spanned by the given matrices (must be multiplicatively closed and
  // contain the identity in its span); structure constants by coordinate solve.
  static FdAlgebra from_matrix_span(FqRef K, const std::vector<Matrix>& basis,
                                    const Caps& caps = default_caps()) {
    require(!basis.empty(), "from_matrix_span: empty basis");
    u32 m = basis[0].rows();
    u32 d = static_cast<u32>(basis.size());
    Matrix phi(K, m * m, d);
    for (u32 c = 0; c < d; ++c) {
      require(basis[c].rows() == m && basis[c].cols() == m, "from_matrix_span: shape");
      for (u32 i = 0; i < m; ++i)
        for (u32 j = 0; j < m; ++j) phi.set(i * m + j, c, basis[c].at(i, j));
    }
    require(rank(phi) == d, "from_matrix_span: matrices not independent");
    // all d^2 products plus the identity, coordinatized in one elimination
    Matrix rhs(K, m * m, d * d + 1);
    for (u32 i = 0; i < d; ++i)
      for (u32 j = 0; j < d; ++j) {
        Matrix P = basis[i] * basis[j];
        for (u32 r = 0; r < m; ++r)
          for (u32 c = 0; c < m; ++c) rhs.set(r * m + c, i * d + j, P.at(r, c));
      }
    for (u32 r = 0; r < m; ++r) rhs.set(r * m + r, d * d, 1);
    LinSolve s = solve_linear(phi, rhs);
    require(s.consistent, "from_matrix_span: span not closed or identity missing");
    std::vector<u32> sc(static_cast<size_t>(d) * d * d, 0);
    for (u32 i = 0; i < d; ++i)
      for (u32 j = 0; j < d; ++j)
        for (u32 k = 0; k < d; ++k)
          sc[(static_cast<size_t>(i) * d + j) * d + k] = s.particular.at(k, i * d + j);
    Vec unit(d);
    for (u32 k = 0; k < d; ++k) unit[k] = s.particular.at(k, d * d);
    Caps ac = caps;
    ac.algebra_dim = std::max(caps.algebra_dim, d);
    return FdAlgebra(K, d, std::move(sc), std::move(unit), ac);
  }

  static FdAlgebra matrix_algebra(FqRef K, u32 m, const Caps& caps = default_caps()) {
    std::vector<Matrix> basis;
    for (u32 i = 0; i < m; ++i)
      for (u32 j = 0; j < m; ++j) {
        Matrix E(K, m, m);
        E.set(i, j, 1);
        basis.push_back(E);
      }
    return from_matrix_span(K, basis, caps);
  }

  // Quotient by a two-sided ideal, given a spanning set of it as columns;
  // defined after the class since the result carries an algebra by value.
  struct AlgebraQuotient quotient(const Matrix& ideal_cols) const;

  // Scalar restriction to the prime field: basis e_i x^t, index i*m + t.
  FdAlgebra restrict_to_prime() const {
    u32 m = K_->degree();
    if (m == 1) return *this;
    auto P = ::fqrep::prime_field(K_->p());
    u32 N = n_ * m;
    std::vector<u32> xpow(2 * m - 1);
    for (u32 s = 0; s < 2 * m - 1; ++s) xpow[s] = K_->pow(K_->x_class(), s);
    std::vector<u32> sc(static_cast<size_t>(N) * N * N, 0);
    for (u32 i = 0; i < n_; ++i)
      for (u32 j = 0; j < n_; ++j)
        for (u32 s = 0; s < m; ++s)
          for (u32 t = 0; t < m; ++t) {
            u32 row = i * m + s, col = j * m + t;
            for (u32 k = 0; k < n_; ++k) {
              u32 coef = K_->mul(sc_[(static_cast<size_t>(i) * n_ + j) * n_ + k],
                                 xpow[s + t]);
              if (!coef) continue;
              auto dg = K_->digits(coef);
              for (u32 u = 0; u < m; ++u)
                if (dg[u]) {
                  size_t idx = (static_cast<size_t>(row) * N + col) * N + (k * m + u);
                  sc[idx] = (sc[idx] + dg[u]) % K_->p();
                }
            }
          }
    Vec unit(N, 0);
    for (u32 i = 0; i < n_; ++i) {
      auto dg = K_->digits(unit_[i]);
      for (u32 u = 0; u < m; ++u) unit[i * m + u] = dg[u];
    }
    Caps ac = caps_;
    ac.algebra_dim = std::max(caps_.algebra_dim, N);
    return FdAlgebra(P, N, std::move(sc), std::move(unit), ac);
  }

  // ----- radical and structure -----

  // Basis of the Jacobson radical as columns over the algebra's own field.
  Matrix radical_basis() const {
    if (n_ == 0) return Matrix(K_, 0, 0);
    u32 m = K_->degree();
    if (m == 1) return friedl_ronyai(*this);
    FdAlgebra Ap = restrict_to_prime();
    Matrix radp = friedl_ronyai(Ap);  // (n*m) x r over F_p
    require(radp.cols() % m == 0, "radical: restriction dimension mismatch");
    Matrix cand(K_, n_, radp.cols());
    for (u32 c = 0; c < radp.cols(); ++c)
      for (u32 i = 0; i < n_; ++i) {
        std::vector<u32> dg(m);
        for (u32 t = 0; t < m; ++t) dg[t] = radp.at(i * m + t, c);
        cand.set(i, c, K_->from_digits(dg));
      }
    // extract a K-basis of the span
    Echelon e = rref(cand.transpose());
    Matrix out(K_, n_, e.rank);
    for (u32 k = 0; k < e.rank; ++k)
      for (u32 i = 0; i < n_; ++i) out.set(i, k, e.R.at(k, i));
    require(out.cols() == radp.cols() / m, "radical: rank mismatch after descent");
    return out;
  }

  struct LocalData {
    bool local = false;
    u32 radical_dim = 0;        // over the algebra's own field
    u32 residue_degree = 0;     // residue field degree over F_p (when local)
    u32 simple_factors = 0;     // number of simple factors of A/rad (commutative case)
  };

  LocalData local_data() const;

  // Idempotent distinct from 0 and 1, if the algebra is not local.  Searches
  // basis elements then seeded random elements; exact construction from a
  // minimal polynomial with at least two coprime primary parts.
  std::optional<Vec> find_split_idempotent(Rng& rng, u32 tries = 200) const {
    auto attempt = [&](const Vec& a) -> std::optional<Vec> {
      kpoly::Poly mu = min_poly_of(a);
      kpoly::Factors fs = kpoly::factor(*K_, mu, rng.raw() | 1, caps_);
      if (fs.size() < 2) return std::nullopt;
      kpoly::Poly g1 = kpoly::one();
      for (u32 e = 0; e < fs[0].second; ++e) g1 = kpoly::mul(*K_, g1, fs[0].first);
      kpoly::Poly g2 = kpoly::divexact(*K_, mu, g1);
      kpoly::Xgcd x = kpoly::xgcd(*K_, g1, g2);
      require(kpoly::deg(x.g) == 0, "split idempotent: primary parts not coprime");
      // e = u*g1 (mod mu) evaluated at a kills the g1-primary block
      kpoly::Poly ep = kpoly::mod(*K_, kpoly::mul(*K_, x.u, g1), mu);
      Vec e = eval_poly(ep, a);
      if (e == zero() || e == unit_) return std::nullopt;
      require(is_idempotent(e), "split idempotent: not idempotent");
      return e;
    };
    for (u32 i = 0; i < n_ && i < tries; ++i) {
      auto r = attempt(basis_elt(i));
      if (r) return r;
    }
    for (u32 t = 0; t < tries; ++t) {
      auto r = attempt(random_element(rng));
      if (r) return r;
    }
    return std::nullopt;
  }

 private:
  // Radical of an algebra over the prime field: iterated kernels of the
  // power-coefficient forms c_{p^i}(xy) on the regular representation.
  static Matrix friedl_ronyai(const FdAlgebra& A) {
    const FqLevel& F = A.K();
    require(F.degree() == 1, "friedl_ronyai: prime field required");
    u32 N = A.dim();
    u32 p = F.p();
    u32 l = 0;
    {
      u64 pw = p;
      while (pw <= N) {
        ++l;
        pw *= p;
      }
    }
    // stages i = 0 .. floor(log_p N), stage i kills the c_{p^i} form
    Matrix B = Matrix::identity(A.field(), N);  // columns span current layer
    u64 coef_pow = 1;
    for (u32 stage = 0; stage <= l; ++stage) {
      u32 d = B.cols();
      if (d == 0) break;
      Matrix M(A.field(), d, d);
      std::vector<Vec> cols(d);
      for (u32 c = 0; c < d; ++c) {
        Vec v(N);
        for (u32 i = 0; i < N; ++i) v[i] = B.at(i, c);
        cols[c] = std::move(v);
      }
      for (u32 yi = 0; yi < d; ++yi)
        for (u32 k = 0; k < d; ++k) {
          Vec z = A.mul(cols[k], cols[yi]);
          kpoly::Poly cp = kpoly::charpoly(A.lmul_matrix(z));
          u32 c = cp[N - coef_pow];
          M.set(yi, k, c);
        }
      Matrix ker = kernel_basis(M);
      B = B * ker;
      coef_pow *= p;
    }
    return B;
  }

  FqRef K_;
  u32 n_;
  std::vector<u32> sc_;
  Vec unit_;
  Caps caps_ = default_caps();
};

struct AlgebraQuotient {
  FdAlgebra Q;
  Matrix proj;  // qdim x n: coordinates of the class of each basis element
  Matrix lift;  // n x qdim: section picking complement basis vectors
};

inline AlgebraQuotient FdAlgebra::quotient(const Matrix& ideal_cols) const {
  Echelon e = rref(ideal_cols.transpose());
  u32 r = e.rank;
  std::vector<bool> is_pivot(n_, false);
  for (u32 c : e.pivot_cols) is_pivot[c] = true;
  std::vector<u32> comp;
  for (u32 c = 0; c < n_; ++c)
    if (!is_pivot[c]) comp.push_back(c);
  u32 qd = n_ - r;
  auto reduce = [&](Vec v) {
    for (u32 k = 0; k < r; ++k) {
      u32 pc = e.pivot_cols[k];
      u32 c = v[pc];
      if (!c) continue;
      for (u32 j = 0; j < n_; ++j) v[j] = K_->sub(v[j], K_->mul(c, e.R.at(k, j)));
    }
    Vec out(qd);
    for (u32 i = 0; i < qd; ++i) out[i] = v[comp[i]];
    return out;
  };
  AlgebraQuotient out;
  out.proj = Matrix(K_, qd, n_);
  for (u32 j = 0; j < n_; ++j) {
    Vec c = reduce(basis_elt(j));
    for (u32 i = 0; i < qd; ++i) out.proj.set(i, j, c[i]);
  }
  out.lift = Matrix(K_, n_, qd);
  for (u32 i = 0; i < qd; ++i) out.lift.set(comp[i], i, 1);
  std::vector<u32> sc(static_cast<size_t>(qd) * qd * qd, 0);
  for (u32 a = 0; a < qd; ++a)
    for (u32 b = 0; b < qd; ++b) {
      Vec prod = reduce(mul(basis_elt(comp[a]), basis_elt(comp[b])));
      for (u32 k = 0; k < qd; ++k)
        sc[(static_cast<size_t>(a) * qd + b) * qd + k] = prod[k];
    }
  Vec qunit = reduce(unit_);
  Caps ac = caps_;
  ac.algebra_dim = std::max(caps_.algebra_dim, qd);
  out.Q = FdAlgebra(K_, qd, std::move(sc), std::move(qunit), ac);
  return out;
}

inline FdAlgebra::LocalData FdAlgebra::local_data() const {
  LocalData out;
  require(n_ >= 1, "local_data: zero algebra");
  FdAlgebra Ap = restrict_to_prime();
  Matrix radp = friedl_ronyai(Ap);
  out.radical_dim = radp.cols() / K_->degree();
  auto qt = Ap.quotient(radp);
  const FdAlgebra& Q = qt.Q;
  bool comm = true;
  for (u32 i = 0; i < Q.dim() && comm; ++i)
    for (u32 j = i + 1; j < Q.dim() && comm; ++j)
      if (Q.mul(Q.basis_elt(i), Q.basis_elt(j)) !=
          Q.mul(Q.basis_elt(j), Q.basis_elt(i)))
        comm = false;
  if (!comm) {
    out.local = false;  // residue division ring over a finite field is a field
    return out;
  }
  // commutative semisimple: count factors as fixed points of the p-power map
  u32 qd = Q.dim();
  Matrix pm(Q.field(), qd, qd);
  for (u32 j = 0; j < qd; ++j) {
    Vec c = Q.power(Q.basis_elt(j), Q.K().p());
    for (u32 i = 0; i < qd; ++i) pm.set(i, j, c[i]);
  }
  Matrix fixed = kernel_basis(pm - Matrix::identity(Q.field(), qd));
  out.simple_factors = fixed.cols();
  out.local = (out.simple_factors == 1);
  if (out.local) out.residue_degree = qd;
  return out;
}

// Exhaustive radical for small algebras: an element is radical iff the
// two-sided ideal it generates is nilpotent.  Cross-check oracle.
inline Matrix brute_force_radical_basis(const FdAlgebra& A, u64 budget = 1 << 20) {
  const FqLevel& K = A.K();
  u32 n = A.dim();
  u64 total = 1;
  for (u32 i = 0; i < n; ++i) {
    total *= K.q();
    if (total > budget) throw CapError("brute_force_radical_basis: too many elements");
  }
  auto span_rank_basis = [&](const std::vector<Vec>& vs) {
    Matrix M(A.field(), static_cast<u32>(vs.size()), n);
    for (u32 r = 0; r < vs.size(); ++r)
      for (u32 c = 0; c < n; ++c) M.set(r, c, vs[r][c]);
    Echelon e = rref(M);
    std::vector<Vec> out;
    for (u32 r = 0; r < e.rank; ++r) {
      Vec v(n);
      for (u32 c = 0; c < n; ++c) v[c] = e.R.at(r, c);
      out.push_back(std::move(v));
    }
    return out;
  };
  auto is_nilpotent_ideal = [&](const Vec& x) {
    std::vector<Vec> gens;
    for (u32 i = 0; i < n; ++i)
      for (u32 j = 0; j < n; ++j)
        gens.push_back(A.mul(A.basis_elt(i), A.mul(x, A.basis_elt(j))));
    std::vector<Vec> I = span_rank_basis(gens);
    for (u32 it = 0; it <= n + 1 && !I.empty(); ++it) {
      std::vector<Vec> sq;
      for (const auto& a : I)
        for (const auto& b : I) sq.push_back(A.mul(a, b));
      std::vector<Vec> I2 = span_rank_basis(sq);
      if (I2.empty()) return true;
      if (I2.size() == I.size()) return false;  // stabilized nonzero
      I = std::move(I2);
    }
    return I.empty();
  };
  std::vector<Vec> rad;
  for (u64 idx = 0; idx < total; ++idx) {
    Vec x = A.decode_element(idx);
    if (is_nilpotent_ideal(x)) rad.push_back(std::move(x));
  }
  std::vector<Vec> basis = span_rank_basis(rad);
  Matrix out(A.field(), n, static_cast<u32>(basis.size()));
  for (u32 c = 0; c < basis.size(); ++c)
    for (u32 i = 0; i < n; ++i) out.set(i, c, basis[c][i]);
  return out;
}

// span equality of two column spaces
inline bool same_column_space(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) return false;
  u32 ra = rank(A), rb = rank(B);
  return ra == rb && rank(Matrix::hstack(A, B)) == ra;
}

}  // namespace fqrep
