#pragma once

#include <algorithm>
#include <utility>

#include "fqrep/matrix.hpp"

// Univariate polynomials with coefficients in an FqLevel (any q), plus
// characteristic/minimal polynomials of matrices and full factorization.
// Coefficient vectors are element codes, lowest degree first, trimmed.

namespace fqrep::kpoly {

using Poly = std::vector<u32>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline i64 deg(const Poly& a) { return static_cast<i64>(a.size()) - 1; }
inline bool is_zero(const Poly& a) { return a.empty(); }
inline Poly one() { return Poly{1}; }
inline Poly X() { return Poly{0, 1}; }

inline Poly add(const FqLevel& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    u32 x = i < a.size() ? a[i] : 0;
    u32 y = i < b.size() ? b[i] : 0;
    r[i] = F.add(x, y);
  }
  trim(r);
  return r;
}

inline Poly sub(const FqLevel& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    u32 x = i < a.size() ? a[i] : 0;
    u32 y = i < b.size() ? b[i] : 0;
    r[i] = F.sub(x, y);
  }
  trim(r);
  return r;
}

inline Poly scal(const FqLevel& F, u32 c, const Poly& a) {
  if (c == 0) return {};
  Poly r = a;
  for (auto& v : r) v = F.mul(c, v);
  return r;
}

inline Poly mul(const FqLevel& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j)
      if (b[j]) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

inline Poly shift(const Poly& a, u32 k) {
  if (a.empty()) return {};
  Poly r(a.size() + k, 0);
  std::copy(a.begin(), a.end(), r.begin() + k);
  return r;
}

inline Poly monic(const FqLevel& F, const Poly& a) {
  require(!a.empty(), "monic: zero polynomial");
  return scal(F, F.inv(a.back()), a);
}

struct DivMod {
  Poly q, r;
};

inline DivMod divmod(const FqLevel& F, Poly a, const Poly& b) {
  require(!b.empty(), "divmod: division by zero polynomial");
  DivMod out;
  u32 linv = F.inv(b.back());
  while (a.size() >= b.size()) {
    u32 c = F.mul(a.back(), linv);
    size_t off = a.size() - b.size();
    if (c) {
      if (out.q.size() < off + 1) out.q.resize(off + 1, 0);
      out.q[off] = c;
      for (size_t i = 0; i < b.size(); ++i)
        a[off + i] = F.sub(a[off + i], F.mul(c, b[i]));
    }
    a.pop_back();
    trim(a);
    if (a.size() < b.size()) break;
  }
  trim(out.q);
  out.r = std::move(a);
  trim(out.r);
  return out;
}

inline Poly mod(const FqLevel& F, const Poly& a, const Poly& b) {
  return divmod(F, a, b).r;
}

inline Poly divexact(const FqLevel& F, const Poly& a, const Poly& b) {
  DivMod d = divmod(F, a, b);
  require(d.r.empty(), "divexact: nonzero remainder");
  return d.q;
}

inline Poly gcd(const FqLevel& F, Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.empty()) return a;
  return monic(F, a);
}

struct Xgcd {
  Poly g, u, v;  // u*a + v*b == g, g monic (or zero)
};

inline Xgcd xgcd(const FqLevel& F, Poly a, Poly b) {
  Poly u0 = one(), v0 = {}, u1 = {}, v1 = one();
  while (!b.empty()) {
    DivMod d = divmod(F, a, b);
    a = std::move(b);
    b = std::move(d.r);
    Poly u2 = sub(F, u0, mul(F, d.q, u1));
    Poly v2 = sub(F, v0, mul(F, d.q, v1));
    u0 = std::move(u1);
    v0 = std::move(v1);
    u1 = std::move(u2);
    v1 = std::move(v2);
  }
  Xgcd out;
  if (a.empty()) {
    out.g = {};
    out.u = {};
    out.v = {};
    return out;
  }
  u32 c = F.inv(a.back());
  out.g = scal(F, c, a);
  out.u = scal(F, c, u0);
  out.v = scal(F, c, v0);
  return out;
}

inline Poly powmod(const FqLevel& F, Poly a, u64 e, const Poly& f) {
  Poly r = one();
  a = mod(F, a, f);
  while (e) {
    if (e & 1) r = mod(F, mul(F, r, a), f);
    a = mod(F, mul(F, a, a), f);
    e >>= 1;
  }
  return r;
}

// a^(q^d) mod f without forming the huge exponent
inline Poly pow_q_iterated(const FqLevel& F, Poly a, u32 d, const Poly& f) {
  for (u32 i = 0; i < d; ++i) a = powmod(F, a, F.q(), f);
  return a;
}

inline u32 eval(const FqLevel& F, const Poly& a, u32 x) {
  u32 r = 0;
  for (size_t i = a.size(); i-- > 0;) r = F.add(F.mul(r, x), a[i]);
  return r;
}

inline Matrix eval_matrix(const FqLevel& F, const Poly& a, const Matrix& M) {
  Matrix r(M.field(), M.rows(), M.cols());
  for (size_t i = a.size(); i-- > 0;) {
    r = r * M;
    if (a[i])
      r = r + Matrix::identity(M.field(), M.rows()).scal(a[i]);
  }
  (void)F;
  return r;
}

inline Poly derivative(const FqLevel& F, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1, 0);
  for (size_t i = 1; i < a.size(); ++i) {
    u32 c = 0;
    for (u64 k = 0; k < i % F.p(); ++k) c = F.add(c, a[i]);
    // i*a_i in characteristic p
    r[i - 1] = c;
  }
  trim(r);
  return r;
}

inline bool is_irreducible(const FqLevel& F, const Poly& f) {
  i64 n = deg(f);
  if (n <= 0) return false;
  if (n == 1) return true;
  // x^(q^n) == x mod f, and for each prime r | n the partial power is coprime
  Poly x = X();
  Poly xq = pow_q_iterated(F, x, static_cast<u32>(n), f);
  if (sub(F, xq, mod(F, x, f)) != Poly{}) return false;
  u64 m = static_cast<u64>(n);
  for (u64 r : fpoly::prime_factors(m)) {
    Poly g = pow_q_iterated(F, x, static_cast<u32>(m / r), f);
    if (deg(gcd(F, sub(F, g, mod(F, x, f)), f)) != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Factorization: squarefree split (characteristic p), distinct degree,
// equal degree (norm map for odd q, trace map for even q).
// ---------------------------------------------------------------------------

namespace detail {

inline Poly pth_root(const FqLevel& F, const Poly& f) {
  // f == g(X^p); coefficient-wise p-th root is a^(q/p)
  u32 p = F.p();
  Poly g((f.size() + p - 1) / p, 0);
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0) continue;
    require(i % p == 0, "pth_root: polynomial is not a p-th power");
    g[i / p] = F.pow(f[i], F.q() / p);
  }
  trim(g);
  return g;
}

inline Poly random_poly_below(const FqLevel& F, i64 degree_bound, Rng& rng) {
  Poly h(static_cast<size_t>(degree_bound), 0);
  for (auto& c : h) c = static_cast<u32>(rng.below(F.q()));
  trim(h);
  return h;
}

// split a squarefree product of irreducibles, all of degree d
inline void equal_degree(const FqLevel& F, const Poly& f, u32 d,
                         std::vector<Poly>& out, Rng& rng, u32 budget) {
  if (deg(f) == static_cast<i64>(d)) {
    out.push_back(monic(F, f));
    return;
  }
  for (u32 attempt = 0; attempt < budget; ++attempt) {
    Poly h = random_poly_below(F, deg(f), rng);
    if (deg(h) < 1) continue;
    Poly g;
    if (F.p() == 2) {
      // trace map over F_2: sum of h^(2^i), i < d*log2(q)
      u32 steps = d * F.degree();
      Poly t = mod(F, h, f);
      Poly acc = t;
      for (u32 i = 1; i < steps; ++i) {
        t = mod(F, mul(F, t, t), f);
        acc = add(F, acc, t);
      }
      g = gcd(F, acc, f);
    } else {
      // norm map N(h) = h^(1+q+...+q^(d-1)), then (q-1)/2 power test
      Poly s = mod(F, h, f);
      Poly n = s;
      for (u32 i = 1; i < d; ++i) {
        s = powmod(F, s, F.q(), f);
        n = mod(F, mul(F, n, s), f);
      }
      Poly t = powmod(F, n, (F.q() - 1) / 2, f);
      g = gcd(F, sub(F, t, one()), f);
    }
    if (deg(g) > 0 && deg(g) < deg(f)) {
      equal_degree(F, g, d, out, rng, budget);
      equal_degree(F, divexact(F, f, g), d, out, rng, budget);
      return;
    }
  }
  throw CapError("equal_degree: split attempts exhausted");
}

// f squarefree monic: fully factor via distinct-degree then equal-degree
inline void factor_squarefree(const FqLevel& F, Poly f, std::vector<Poly>& out,
                              Rng& rng, u32 budget) {
  Poly h = mod(F, X(), f);
  u32 d = 0;
  while (deg(f) > 0) {
    ++d;
    if (2 * static_cast<i64>(d) > deg(f)) {
      out.push_back(monic(F, f));
      return;
    }
    h = powmod(F, h, F.q(), f);
    Poly g = gcd(F, sub(F, h, mod(F, X(), f)), f);
    if (deg(g) > 0) {
      equal_degree(F, g, d, out, rng, budget);
      f = divexact(F, f, g);
      h = mod(F, h, f);
    }
  }
}

}  // namespace detail

using Factors = std::vector<std::pair<Poly, u32>>;  // (monic irreducible, multiplicity)

inline void factor_into(const FqLevel& F, Poly f, u32 mult_scale, Factors& out,
                        Rng& rng, u32 budget) {
  require(!f.empty(), "factor: zero polynomial");
  f = monic(F, f);
  if (deg(f) == 0) return;
  Poly fp = derivative(F, f);
  if (fp.empty()) {
    // pure p-th power
    factor_into(F, detail::pth_root(F, f), mult_scale * F.p(), out, rng, budget);
    return;
  }
  Poly c = gcd(F, f, fp);
  Poly w = divexact(F, f, c);
  u32 i = 1;
  while (deg(w) > 0) {
    Poly y = gcd(F, w, c);
    Poly z = divexact(F, w, y);
    if (deg(z) > 0) {
      std::vector<Poly> irr;
      detail::factor_squarefree(F, z, irr, rng, budget);
      for (auto& g : irr) out.emplace_back(std::move(g), i * mult_scale);
    }
    w = std::move(y);
    c = divexact(F, c, w);
    ++i;
  }
  if (deg(c) > 0) factor_into(F, detail::pth_root(F, c), mult_scale * F.p(), out, rng, budget);
}

inline Factors factor(const FqLevel& F, const Poly& f, u64 seed = 12345,
                      const Caps& caps = default_caps()) {
  Factors out;
  Rng rng(seed);
  factor_into(F, f, 1, out, rng, std::min<u32>(caps.search_steps, 4096));
  std::sort(out.begin(), out.end());
  return out;
}

// first monic irreducible of given degree in ascending coefficient-code order
inline Poly first_irreducible(const FqLevel& F, u32 degree) {
  require(degree >= 1, "first_irreducible: degree must be positive");
  u64 q = F.q();
  u64 total = 1;
  for (u32 i = 0; i < degree; ++i) total *= q;
  for (u64 code = 0; code < total; ++code) {
    Poly f(degree + 1, 0);
    u64 c = code;
    for (u32 i = 0; i < degree; ++i) {
      f[i] = static_cast<u32>(c % q);
      c /= q;
    }
    f[degree] = 1;
    if (is_irreducible(F, f)) return f;
  }
  throw Error("first_irreducible: none found");  // unreachable
}

// ---------------------------------------------------------------------------
// Characteristic polynomial (Hessenberg reduction + recurrence) and minimal
// polynomial (Krylov) of a square matrix.
// ---------------------------------------------------------------------------

inline Poly charpoly(const Matrix& M) {
  require(M.rows() == M.cols(), "charpoly: square matrix required");
  const FqLevel& F = M.F();
  u32 n = M.rows();
  if (n == 0) return one();
  std::vector<std::vector<u32>> h(n, std::vector<u32>(n));
  for (u32 i = 0; i < n; ++i)
    for (u32 j = 0; j < n; ++j) h[i][j] = M.at(i, j);
  // similarity reduction to upper Hessenberg
  for (u32 c = 0; c + 2 < n; ++c) {
    u32 pr = c + 1;
    while (pr < n && h[pr][c] == 0) ++pr;
    if (pr == n) continue;
    if (pr != c + 1) {
      std::swap(h[pr], h[c + 1]);
      for (u32 i = 0; i < n; ++i) std::swap(h[i][pr], h[i][c + 1]);
    }
    u32 piv = h[c + 1][c];
    u32 pinv = F.inv(piv);
    for (u32 r2 = c + 2; r2 < n; ++r2) {
      if (h[r2][c] == 0) continue;
      u32 t = F.mul(h[r2][c], pinv);
      for (u32 j = 0; j < n; ++j) h[r2][j] = F.sub(h[r2][j], F.mul(t, h[c + 1][j]));
      for (u32 i = 0; i < n; ++i) h[i][c + 1] = F.add(h[i][c + 1], F.mul(t, h[i][r2]));
    }
  }
  // p[m] = charpoly of leading m-by-m block
  std::vector<Poly> p(n + 1);
  p[0] = one();
  for (u32 m = 1; m <= n; ++m) {
    Poly t = sub(F, shift(p[m - 1], 1), scal(F, h[m - 1][m - 1], p[m - 1]));
    u32 prod = 1;
    for (u32 i = m - 1; i >= 1; --i) {
      prod = F.mul(prod, h[i][i - 1]);
      if (prod == 0) break;
      u32 coef = F.mul(h[i - 1][m - 1], prod);
      if (coef) t = sub(F, t, scal(F, coef, p[i - 1]));
    }
    p[m] = std::move(t);
  }
  return p[n];
}

inline Poly lcm(const FqLevel& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  return monic(F, divexact(F, mul(F, a, b), gcd(F, a, b)));
}

inline Poly min_poly(const Matrix& M) {
  require(M.rows() == M.cols(), "min_poly: square matrix required");
  const FqLevel& F = M.F();
  u32 n = M.rows();
  if (n == 0) return one();
  Poly result = one();
  for (u32 s = 0; s < n; ++s) {
    // minimal polynomial of basis vector e_s under M, via Krylov dependence
    Matrix v(M.field(), n, 1);
    v.set(s, 0, 1);
    Matrix kry = v;
    Poly rel;
    for (u32 k = 1; k <= n; ++k) {
      v = M * v;
      LinSolve sol = solve_linear(kry, v);
      if (sol.consistent) {
        rel = Poly(k + 1, 0);
        rel[k] = 1;
        for (u32 i = 0; i < k; ++i) rel[i] = F.neg(sol.particular.at(i, 0));
        break;
      }
      kry = Matrix::hstack(kry, v);
    }
    require(!rel.empty(), "min_poly: no Krylov relation found");
    result = lcm(F, result, rel);
    if (deg(result) == static_cast<i64>(n)) break;
  }
  return result;
}

}  // namespace fqrep::kpoly
