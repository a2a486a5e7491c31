#pragma once

#include <numeric>
#include <optional>

#include "fqrep/kpoly.hpp"

namespace fqrep::skew {

// Twisted polynomial ring D[x;s] over a finite field D = F_{p^m} with
// s = Frobenius^twist.  Coefficients are written on the left and the
// commutation rule is x*d = s(d)*x.  The ring owns a field tower so the
// fixed field of s (over which the center lives) is always at hand.
struct SkewRing {
  TowerRef tower;
  FqRef D;        // coefficient field F_{p^m}
  FqRef F;        // fixed field of s; the center is F[x^e]
  FqRef Fp;       // prime field, the ground field for matrix realizations
  u32 twist = 0;  // s = Frobenius^twist, stored reduced modulo m
  u32 e = 1;      // order of s, so x^e is central

  u32 s(u32 a) const { return D->frob(a, twist); }

  // s^k and s^-k, with the exponent folded into the Galois group order
  u32 s_iter(u32 a, u32 k) const {
    return D->frob(a, static_cast<u32>((static_cast<u64>(twist) * k) % D->degree()));
  }
  u32 s_inv_iter(u32 a, u32 k) const {
    u32 m = D->degree();
    u32 fwd = static_cast<u32>((static_cast<u64>(twist) * k) % m);
    return D->frob(a, (m - fwd) % m);
  }

  bool commutative() const { return twist == 0; }
};

inline SkewRing make_skew_ring(u32 p, u32 m, u32 twist,
                               const Caps& caps = default_caps()) {
  SkewRing R;
  R.tower = make_tower(p, {m}, caps);
  R.D = R.tower->level(m);
  R.twist = twist % m;
  u32 g = std::gcd(R.twist, m);  // gcd(0, m) = m covers the untwisted case
  R.F = R.tower->level(g);
  R.Fp = R.tower->level(1);
  R.e = m / g;
  return R;
}

// Coefficient lists low degree first, trimmed, sharing the commutative
// representation; only products and divisions need the twist.
using SkewPoly = kpoly::Poly;

inline SkewPoly xpow(u32 k) {
  SkewPoly r(k + 1, 0);
  r[k] = 1;
  return r;
}

inline SkewPoly mul(const SkewRing& R, const SkewPoly& a, const SkewPoly& b) {
  if (kpoly::is_zero(a) || kpoly::is_zero(b)) return {};
  SkewPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (!b[j]) continue;
      u32 t = R.D->mul(a[i], R.s_iter(b[j], static_cast<u32>(i)));
      r[i + j] = R.D->add(r[i + j], t);
    }
  }
  kpoly::trim(r);
  return r;
}

inline SkewPoly pow(const SkewRing& R, const SkewPoly& a, u32 n) {
  SkewPoly r = kpoly::one();
  for (u32 i = 0; i < n; ++i) r = mul(R, r, a);
  return r;
}

// normalize to a monic polynomial by a left unit
inline SkewPoly monic_left(const SkewRing& R, const SkewPoly& a) {
  require(!kpoly::is_zero(a), "monic_left: zero polynomial");
  return kpoly::scal(*R.D, R.D->inv(a.back()), a);
}

struct SkewDivMod {
  SkewPoly q, r;
};

// right division f = q*g + r with deg r < deg g
inline SkewDivMod div_r(const SkewRing& R, SkewPoly f, const SkewPoly& g) {
  require(!kpoly::is_zero(g), "div_r: division by zero");
  SkewDivMod out;
  i64 dg = kpoly::deg(g);
  if (kpoly::deg(f) >= dg) out.q.assign(kpoly::deg(f) - dg + 1, 0);
  while (kpoly::deg(f) >= dg) {
    u32 k = static_cast<u32>(kpoly::deg(f) - dg);
    u32 c = R.D->mul(f.back(), R.D->inv(R.s_iter(g.back(), k)));
    out.q[k] = c;
    for (size_t j = 0; j < g.size(); ++j) {
      if (!g[j]) continue;
      u32 t = R.D->mul(c, R.s_iter(g[j], k));
      f[k + j] = R.D->sub(f[k + j], t);
    }
    kpoly::trim(f);
  }
  kpoly::trim(out.q);
  out.r = f;
  return out;
}

// left division f = g*q + r with deg r < deg g
inline SkewDivMod div_l(const SkewRing& R, SkewPoly f, const SkewPoly& g) {
  require(!kpoly::is_zero(g), "div_l: division by zero");
  SkewDivMod out;
  i64 dg = kpoly::deg(g);
  u32 m = static_cast<u32>(dg);
  if (kpoly::deg(f) >= dg) out.q.assign(kpoly::deg(f) - dg + 1, 0);
  while (kpoly::deg(f) >= dg) {
    u32 k = static_cast<u32>(kpoly::deg(f) - dg);
    u32 c = R.s_inv_iter(R.D->mul(R.D->inv(g.back()), f.back()), m);
    out.q[k] = c;
    for (size_t j = 0; j < g.size(); ++j) {
      if (!g[j]) continue;
      u32 t = R.D->mul(g[j], R.s_iter(c, static_cast<u32>(j)));
      f[j + k] = R.D->sub(f[j + k], t);
    }
    kpoly::trim(f);
  }
  kpoly::trim(out.q);
  out.r = f;
  return out;
}

// g is a right divisor of f, i.e. f = a*g for some a
inline bool is_right_divisor(const SkewRing& R, const SkewPoly& g,
                             const SkewPoly& f) {
  return kpoly::is_zero(div_r(R, f, g).r);
}

// the element commutes with the whole ring: coefficients fixed by s and
// supported on powers of x^e
inline bool is_central(const SkewRing& R, const SkewPoly& f) {
  for (size_t i = 0; i < f.size(); ++i) {
    if (!f[i]) continue;
    if (i % R.e != 0) return false;
    if (R.s(f[i]) != f[i]) return false;
  }
  return true;
}

// Gamma*b = b*Gamma, verified on the ring generators: it suffices that b*x
// and b*w lie back in the left ideal of b, w the coefficient field generator.
inline bool is_two_sided(const SkewRing& R, const SkewPoly& b) {
  require(!kpoly::is_zero(b), "is_two_sided: zero polynomial");
  if (!is_right_divisor(R, b, mul(R, b, xpow(1)))) return false;
  SkewPoly w{R.D->x_class()};
  return is_right_divisor(R, b, mul(R, b, w));
}

// monic polynomial of the given degree whose lower coefficients are the
// base-q digits of `code`; ascending codes enumerate all monic polynomials
inline SkewPoly monic_from_code(const SkewRing& R, u32 degree, u64 code) {
  SkewPoly g(degree + 1, 0);
  for (u32 i = 0; i < degree; ++i) {
    g[i] = static_cast<u32>(code % R.D->q());
    code /= R.D->q();
  }
  g[degree] = 1;
  return g;
}

namespace detail {

// least-degree monic proper right factor, or nothing if f is an atom;
// exhaustive scan in ascending degree, so a hit is automatically irreducible
inline std::optional<SkewPoly> min_right_factor(const SkewRing& R,
                                               const SkewPoly& f,
                                               u64& budget) {
  i64 df = kpoly::deg(f);
  for (u32 d = 1; d < static_cast<u32>(df); ++d) {
    u64 count = 1;
    for (u32 i = 0; i < d; ++i) count *= R.D->q();
    for (u64 code = 0; code < count; ++code) {
      if (budget == 0)
        throw CapError("skew factor search: step budget exhausted");
      --budget;
      SkewPoly g = monic_from_code(R, d, code);
      if (is_right_divisor(R, g, f)) return g;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// irreducibility witnessed by the absence of proper monic right factors
inline bool is_atom(const SkewRing& R, const SkewPoly& f,
                    const Caps& caps = default_caps()) {
  if (kpoly::deg(f) < 1) return false;
  u64 budget = caps.search_steps;
  return !detail::min_right_factor(R, monic_left(R, f), budget).has_value();
}

// a monic irreducible with a cached conjugacy invariant of its simple module
// (filled lazily by the similarity test)
struct Atom {
  SkewPoly poly;
  mutable kpoly::Poly key;
};

// Ordered factorization f = p_1 * ... * p_s into monic atoms, up to the left
// unit made explicit by the leading coefficient of f.  Factors are peeled
// from the right: a minimal-degree right factor is split off and the
// quotient is recursed on, so every returned factor is certified.
inline std::vector<Atom> atom_factor(const SkewRing& R, const SkewPoly& f,
                                     const Caps& caps = default_caps()) {
  require(kpoly::deg(f) >= 1, "atom_factor: input is zero or a unit");
  require(kpoly::deg(f) <= static_cast<i64>(caps.poly_deg),
          "atom_factor: degree over cap");
  u64 budget = caps.search_steps;
  SkewPoly work = monic_left(R, f);
  std::vector<Atom> out;
  while (kpoly::deg(work) >= 1) {
    auto r = detail::min_right_factor(R, work, budget);
    if (!r) {
      out.push_back(Atom{work, {}});
      break;
    }
    out.push_back(Atom{*r, {}});
    work = div_r(R, work, *r).q;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// image in Gamma of a polynomial over the fixed field under y -> x^e
inline SkewPoly central_from(const SkewRing& R, const kpoly::Poly& pi) {
  if (kpoly::is_zero(pi)) return {};
  SkewPoly r(static_cast<size_t>(kpoly::deg(pi)) * R.e + 1, 0);
  for (size_t j = 0; j < pi.size(); ++j)
    r[j * R.e] = R.tower->embed(R.F->degree(), R.D->degree(), pi[j]);
  kpoly::trim(r);
  return r;
}

// The bound of an atom: the largest two-sided ideal contained in Gamma*p is
// generated by a two-sided element b, and its intersection with the center
// Z = F[x^e] is generated by a central z with Z/(z) of finite length.
struct CenterData {
  SkewPoly b;     // monic two-sided generator of the bound, p divides b
  SkewPoly z;     // central generator of the intersection of the bound with Z
  u32 ell = 1;    // length of Z modulo (z)
  u32 z_rank = 1; // rank of Gamma as a module over its center
};

// For p associated to x the bound is generated by x itself; otherwise it is
// generated by pi(x^e) for the least-degree monic irreducible pi over the
// fixed field that p right-divides.  Both generators are found by ascending
// search, throwing a diagnostic if the degree cap is exhausted first.
inline CenterData center_and_bound(const SkewRing& R, const SkewPoly& p,
                                   const Caps& caps = default_caps()) {
  require(kpoly::deg(p) >= 1, "center_and_bound: input is zero or a unit");
  CenterData cd;
  cd.z_rank = R.e * R.e;
  if (p[0] == 0) {
    require(kpoly::deg(p) == 1,
            "center_and_bound: x is a proper right factor, input not an atom");
    cd.b = xpow(1);
    cd.z = xpow(R.e);
    cd.ell = 1;
    return cd;
  }
  u64 budget = caps.search_steps;
  for (u32 k = 1; k * R.e <= caps.poly_deg; ++k) {
    u64 count = 1;
    for (u32 i = 0; i < k; ++i) count *= R.F->q();
    for (u64 code = 0; code < count; ++code) {
      if (budget == 0)
        throw CapError("center_and_bound: step budget exhausted");
      --budget;
      kpoly::Poly pi(k + 1, 0);
      u64 c = code;
      for (u32 i = 0; i < k; ++i) {
        pi[i] = static_cast<u32>(c % R.F->q());
        c /= R.F->q();
      }
      pi[k] = 1;
      if (!kpoly::is_irreducible(*R.F, pi)) continue;
      SkewPoly cand = central_from(R, pi);
      if (is_right_divisor(R, p, cand)) {
        cd.b = cand;
        cd.z = cand;
        cd.ell = 1;
        return cd;
      }
    }
  }
  throw CapError("center_and_bound: degree cap exhausted before a bound was found");
}

}  // namespace fqrep::skew
