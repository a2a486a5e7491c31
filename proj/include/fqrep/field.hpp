#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <utility>

#include "fqrep/common.hpp"

namespace fqrep {

// ---------------------------------------------------------------------------
// Finite fields F_{p^n} with a fixed polynomial basis and compatible towers.
//
// Elements of F_{p^n} are encoded as integers in [0, p^n): the base-p digits
// of the code are the coordinates in the basis 1, x, x^2, ..., x^{n-1}, where
// x is the class of the variable modulo the canonical polynomial of the
// level.  The canonical polynomial of (p, n) is the first monic primitive
// polynomial of degree n -- in ascending base-p coefficient order, constant
// term least significant -- whose roots are norm-compatible with the
// canonical polynomials of all proper divisor degrees.  That compatibility
// makes x |-> x^{(p^b-1)/(p^a-1)} an embedding F_{p^a} -> F_{p^b} for a | b,
// and these embeddings compose exactly along divisor chains.
// ---------------------------------------------------------------------------

namespace fpoly {

// Dense polynomials over F_p: coefficient vectors, low degree first, trimmed.
using Poly = std::vector<u32>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly mul(const Poly& a, const Poly& b, u32 p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + static_cast<u64>(a[i]) * b[j]) % p;
  trim(c);
  return c;
}

inline Poly mod(Poly a, const Poly& f, u32 p) {
  trim(a);
  int df = deg(f);
  require(df >= 0, "fpoly: zero modulus");
  u32 lead_inv = 1;
  // compute inverse of leading coefficient of f mod p
  {
    u32 l = f.back() % p;
    u32 r = 1, b = l, e = p - 2;
    while (e) {
      if (e & 1) r = static_cast<u64>(r) * b % p;
      b = static_cast<u64>(b) * b % p;
      e >>= 1;
    }
    lead_inv = r;
  }
  while (deg(a) >= df) {
    u32 c = static_cast<u64>(a.back()) * lead_inv % p;
    int shift = deg(a) - df;
    for (int i = 0; i <= df; ++i) {
      u64 sub = static_cast<u64>(c) * f[i] % p;
      u32& t = a[i + shift];
      t = (t + p - static_cast<u32>(sub)) % p;
    }
    trim(a);
  }
  return a;
}

inline Poly powmod(Poly base, u64 e, const Poly& f, u32 p) {
  Poly r{1};
  base = mod(std::move(base), f, p);
  while (e) {
    if (e & 1) r = mod(mul(r, base, p), f, p);
    base = mod(mul(base, base, p), f, p);
    e >>= 1;
  }
  return r;
}

inline Poly gcd(Poly a, Poly b, u32 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {  // make monic
    u32 l = a.back(), r = 1, bb = l, e = p - 2;
    while (e) {
      if (e & 1) r = static_cast<u64>(r) * bb % p;
      bb = static_cast<u64>(bb) * bb % p;
      e >>= 1;
    }
    for (auto& c : a) c = static_cast<u64>(c) * r % p;
  }
  return a;
}

inline bool is_irreducible(const Poly& f, u32 p) {
  int n = deg(f);
  if (n <= 0) return false;
  if (n == 1) return true;
  // x^{p^n} == x mod f, and gcd(x^{p^{n/r}} - x, f) == 1 for primes r | n
  Poly x{0, 1};
  u64 pn = 1;
  for (int i = 0; i < n; ++i) pn *= p;
  Poly t = powmod(x, pn, f, p);
  if (t != mod(x, f, p)) return false;
  int m = n;
  for (int r = 2; r * r <= m; ++r) {
    if (m % r) continue;
    while (m % r == 0) m /= r;
    u64 pd = 1;
    for (int i = 0; i < n / r; ++i) pd *= p;
    Poly d = powmod(x, pd, f, p);
    // d - x
    Poly diff = d;
    diff.resize(std::max<size_t>(diff.size(), 2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(diff);
    Poly g = gcd(diff, f, p);
    if (deg(g) > 0) return false;
  }
  if (m > 1) {
    u64 pd = 1;
    for (int i = 0; i < n / m; ++i) pd *= p;
    Poly d = powmod(x, pd, f, p);
    Poly diff = d;
    diff.resize(std::max<size_t>(diff.size(), 2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(diff);
    Poly g = gcd(diff, f, p);
    if (deg(g) > 0) return false;
  }
  return true;
}

inline std::vector<u64> prime_factors(u64 v) {
  std::vector<u64> r;
  for (u64 d = 2; d * d <= v; ++d) {
    if (v % d == 0) {
      r.push_back(d);
      while (v % d == 0) v /= d;
    }
  }
  if (v > 1) r.push_back(v);
  return r;
}

}  // namespace fpoly

class FqLevel {
 public:
  FqLevel(u32 p, u32 n, fpoly::Poly modulus, const Caps& caps = default_caps())
      : p_(p), n_(n), modulus_(std::move(modulus)) {
    require(p >= 2, "FqLevel: p must be >= 2");
    u64 q = 1;
    for (u32 i = 0; i < n; ++i) {
      q *= p;
      if (q > caps.field_q) throw CapError("FqLevel: field size exceeds cap field_q");
    }
    q_ = static_cast<u32>(q);
    require(modulus_.size() == n + 1 && modulus_.back() == 1,
            "FqLevel: modulus must be monic of degree n");
    // reduction rows: x^{n+k} mod f for k = 0..n-2
    red_.assign(n >= 1 ? n - 1 : 0, std::vector<u32>(n, 0));
    if (n >= 2) {
      fpoly::Poly cur(n, 0);  // start with x^n mod f = -(f - x^n)
      for (u32 i = 0; i < n; ++i) cur[i] = (p_ - modulus_[i] % p_) % p_;
      for (u32 k = 0; k + 1 < n; ++k) {
        red_[k] = cur;
        // multiply by x and reduce once more
        fpoly::Poly nxt(n, 0);
        u32 top = cur[n - 1];
        for (u32 i = n - 1; i >= 1; --i) nxt[i] = cur[i - 1];
        nxt[0] = 0;
        if (top) {
          for (u32 i = 0; i < n; ++i) {
            u64 add = static_cast<u64>(top) * ((p_ - modulus_[i] % p_) % p_) % p_;
            nxt[i] = (nxt[i] + static_cast<u32>(add)) % p_;
          }
        }
        cur = std::move(nxt);
      }
    }
    x_class_ = (n_ == 1) ? (p_ - modulus_[0] % p_) % p_ : p_;
    build_tables();
  }

  u32 p() const { return p_; }
  u32 degree() const { return n_; }
  u32 q() const { return q_; }
  const fpoly::Poly& modulus() const { return modulus_; }

  // the class of the variable: a fixed primitive element of the level
  u32 x_class() const { return x_class_; }

  bool prime_field() const { return n_ == 1; }

  std::vector<u32> digits(u32 a) const {
    std::vector<u32> d(n_);
    for (u32 i = 0; i < n_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }

  u32 from_digits(const std::vector<u32>& d) const {
    require(d.size() <= n_, "from_digits: too many coordinates");
    u32 a = 0, w = 1;
    for (u32 i = 0; i < n_; ++i) {
      u32 c = i < d.size() ? d[i] % p_ : 0;
      a += c * w;
      w *= p_;
    }
    return a;
  }

  u32 add(u32 a, u32 b) const {
    if (add_tab_) return (*add_tab_)[static_cast<size_t>(a) * q_ + b];
    return add_slow(a, b);
  }

  u32 neg(u32 a) const {
    if (neg_tab_) return (*neg_tab_)[a];
    return neg_slow(a);
  }

  u32 sub(u32 a, u32 b) const { return add(a, neg(b)); }

  u32 mul(u32 a, u32 b) const {
    if (mul_tab_) return (*mul_tab_)[static_cast<size_t>(a) * q_ + b];
    return mul_slow(a, b);
  }

  u32 pow(u32 a, u64 e) const {
    u32 r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  u32 inv(u32 a) const {
    require(a != 0, "Fq: inverse of zero");
    if (inv_tab_) return (*inv_tab_)[a];
    return pow(a, static_cast<u64>(q_) - 2);
  }

  // a^{p^k} (k-fold arithmetic Frobenius)
  u32 frob(u32 a, u32 k = 1) const {
    k %= n_;
    for (u32 i = 0; i < k; ++i) a = (*frob_tab_)[a];
    return a;
  }

  // n x n matrix over F_p of left multiplication by a, row-major
  std::vector<u32> mult_matrix(u32 a) const {
    std::vector<u32> m(static_cast<size_t>(n_) * n_, 0);
    for (u32 j = 0; j < n_; ++j) {
      auto d = digits(mul(a, from_digits(unit_digit(j))));
      for (u32 i = 0; i < n_; ++i) m[static_cast<size_t>(i) * n_ + j] = d[i];
    }
    return m;
  }

  // n x n matrix over F_p of a |-> a^{p^k}
  std::vector<u32> frob_matrix(u32 k) const {
    std::vector<u32> m(static_cast<size_t>(n_) * n_, 0);
    for (u32 j = 0; j < n_; ++j) {
      u32 col = frob(from_digits(unit_digit(j)), k);
      auto d = digits(col);
      for (u32 i = 0; i < n_; ++i) m[static_cast<size_t>(i) * n_ + j] = d[i];
    }
    return m;
  }

 private:
  std::vector<u32> unit_digit(u32 j) const {
    std::vector<u32> d(n_, 0);
    d[j] = 1;
    return d;
  }

  u32 add_slow(u32 a, u32 b) const {
    u32 r = 0, w = 1;
    for (u32 i = 0; i < n_; ++i) {
      u32 da = a % p_, db = b % p_;
      a /= p_;
      b /= p_;
      r += ((da + db) % p_) * w;
      w *= p_;
    }
    return r;
  }

  u32 neg_slow(u32 a) const {
    u32 r = 0, w = 1;
    for (u32 i = 0; i < n_; ++i) {
      u32 da = a % p_;
      a /= p_;
      r += ((p_ - da) % p_) * w;
      w *= p_;
    }
    return r;
  }

  u32 mul_slow(u32 a, u32 b) const {
    if (a == 0 || b == 0) return 0;
    auto da = digits(a), db = digits(b);
    std::vector<u32> conv(2 * n_ - 1, 0);
    for (u32 i = 0; i < n_; ++i) {
      if (!da[i]) continue;
      for (u32 j = 0; j < n_; ++j)
        conv[i + j] = (conv[i + j] + da[i] * db[j]) % p_;
    }
    for (u32 k = 2 * n_ - 2; k >= n_; --k) {
      u32 c = conv[k];
      if (c) {
        const auto& row = red_[k - n_];
        for (u32 i = 0; i < n_; ++i)
          conv[i] = (conv[i] + c * row[i]) % p_;
      }
      if (k == n_) break;
    }
    std::vector<u32> low(conv.begin(), conv.begin() + n_);
    return from_digits(low);
  }

  void build_tables() {
    frob_tab_ = std::make_unique<std::vector<u32>>(q_);
    for (u32 a = 0; a < q_; ++a) {
      u32 r = a;
      // a^p by square-and-multiply over mul_slow (tables not ready yet)
      u32 acc = 1, base = a, e = p_;
      while (e) {
        if (e & 1) acc = mul_slow(acc, base);
        base = mul_slow(base, base);
        e >>= 1;
      }
      r = acc;
      (*frob_tab_)[a] = r;
    }
    if (q_ <= kTableMax) {
      add_tab_ = std::make_unique<std::vector<u32>>(static_cast<size_t>(q_) * q_);
      mul_tab_ = std::make_unique<std::vector<u32>>(static_cast<size_t>(q_) * q_);
      neg_tab_ = std::make_unique<std::vector<u32>>(q_);
      inv_tab_ = std::make_unique<std::vector<u32>>(q_);
      for (u32 a = 0; a < q_; ++a) {
        (*neg_tab_)[a] = neg_slow(a);
        for (u32 b = 0; b < q_; ++b) {
          (*add_tab_)[static_cast<size_t>(a) * q_ + b] = add_slow(a, b);
          (*mul_tab_)[static_cast<size_t>(a) * q_ + b] = mul_slow(a, b);
        }
      }
      (*inv_tab_)[0] = 0;
      for (u32 a = 1; a < q_; ++a) {
        u32 acc = 1, base = a;
        u64 e = static_cast<u64>(q_) - 2;
        while (e) {
          if (e & 1) acc = (*mul_tab_)[static_cast<size_t>(acc) * q_ + base];
          base = (*mul_tab_)[static_cast<size_t>(base) * q_ + base];
          e >>= 1;
        }
        (*inv_tab_)[a] = acc;
      }
    }
  }

  static constexpr u32 kTableMax = 1024;

  u32 p_, n_, q_;
  fpoly::Poly modulus_;
  std::vector<std::vector<u32>> red_;
  u32 x_class_;
  std::unique_ptr<std::vector<u32>> add_tab_, mul_tab_, neg_tab_, inv_tab_, frob_tab_;
};

using FqRef = std::shared_ptr<const FqLevel>;

// ---------------------------------------------------------------------------
// Canonical polynomial selection (norm-compatible across divisor degrees).
// ---------------------------------------------------------------------------
namespace detail {

inline std::vector<u32> divisors(u32 n) {
  std::vector<u32> d;
  for (u32 i = 1; i <= n; ++i)
    if (n % i == 0) d.push_back(i);
  return d;
}

inline fpoly::Poly canonical_poly(u32 p, u32 n,
                                  std::map<u32, fpoly::Poly>& cache) {
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  for (u32 d : divisors(n))
    if (d != n) canonical_poly(p, d, cache);

  u64 q = 1;
  for (u32 i = 0; i < n; ++i) q *= p;
  auto qm1_primes = fpoly::prime_factors(q - 1);

  u64 count = 1;
  for (u32 i = 0; i < n; ++i) count *= p;  // p^n candidate coefficient blocks
  for (u64 code = 0; code < count; ++code) {
    fpoly::Poly f(n + 1, 0);
    u64 c = code;
    for (u32 i = 0; i < n; ++i) {
      f[i] = static_cast<u32>(c % p);
      c /= p;
    }
    f[n] = 1;
    if (f[0] == 0) continue;  // x would not be a unit, let alone primitive
    if (!fpoly::is_irreducible(f, p)) continue;
    // primitivity: order of x mod f is q - 1
    bool primitive = true;
    fpoly::Poly x{0, 1};
    for (u64 ell : qm1_primes) {
      auto t = fpoly::powmod(x, (q - 1) / ell, f, p);
      if (t == fpoly::Poly{1}) {
        primitive = false;
        break;
      }
    }
    if (!primitive) continue;
    // norm compatibility with every proper divisor degree
    bool compat = true;
    for (u32 d : divisors(n)) {
      if (d == n) continue;
      u64 qd = 1;
      for (u32 i = 0; i < d; ++i) qd *= p;
      auto g = fpoly::powmod(x, (q - 1) / (qd - 1), f, p);
      // evaluate cache[d] at g modulo f
      const auto& fd = cache[d];
      fpoly::Poly acc{};
      for (int i = fpoly::deg(fd); i >= 0; --i) {
        acc = fpoly::mod(fpoly::mul(acc, g, p), f, p);
        if (fd[i]) {
          acc.resize(std::max<size_t>(acc.size(), 1), 0);
          acc[0] = (acc[0] + fd[i]) % p;
          fpoly::trim(acc);
        }
      }
      if (!acc.empty()) {
        compat = false;
        break;
      }
    }
    if (!compat) continue;
    cache[n] = f;
    return f;
  }
  throw Error("canonical_poly: no compatible primitive polynomial found");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FqTower: a family of levels F_{p^d}, closed under divisor degrees, with
// embedding tables for every divisor pair.  Immutable after construction.
// ---------------------------------------------------------------------------
class FqTower {
 public:
  FqTower(u32 p, std::vector<u32> degrees, const Caps& caps = default_caps())
      : p_(p) {
    require(!degrees.empty(), "FqTower: need at least one degree");
    // close the degree set under divisors
    std::vector<u32> all;
    for (u32 d : degrees) {
      require(d >= 1, "FqTower: degrees must be positive");
      for (u32 e : detail::divisors(d)) all.push_back(e);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::map<u32, fpoly::Poly> cache;
    for (u32 d : all) detail::canonical_poly(p_, d, cache);
    for (u32 d : all)
      levels_[d] = std::make_shared<FqLevel>(p_, d, cache[d], caps);

    for (u32 a : all)
      for (u32 b : all)
        if (a < b && b % a == 0) build_embedding(a, b);
  }

  u32 p() const { return p_; }

  bool has_level(u32 deg) const { return levels_.count(deg) != 0; }

  FqRef level(u32 deg) const {
    auto it = levels_.find(deg);
    require(it != levels_.end(), "FqTower: level not present");
    return it->second;
  }

  FqRef prime_level() const { return level(1); }

  // image of an element of F_{p^a} inside F_{p^b}; requires a | b
  u32 embed(u32 from_deg, u32 to_deg, u32 elem) const {
    if (from_deg == to_deg) return elem;
    auto it = embed_.find({from_deg, to_deg});
    require(it != embed_.end(), "FqTower: no embedding for that pair");
    return it->second[elem];
  }

 private:
  void build_embedding(u32 a, u32 b) {
    const auto& A = *levels_[a];
    const auto& B = *levels_[b];
    u64 e = (static_cast<u64>(B.q()) - 1) / (A.q() - 1);
    u32 g = B.pow(B.x_class(), e);
    // sanity: g must be a root of A's modulus inside B
    {
      u32 acc = 0;
      const auto& f = A.modulus();
      for (int i = fpoly::deg(f); i >= 0; --i) {
        acc = B.mul(acc, g);
        acc = B.add(acc, f[i] % B.p());
      }
      require(acc == 0, "FqTower: embedding root check failed");
    }
    std::vector<u32> pow(A.degree());
    u32 cur = 1;
    for (u32 i = 0; i < A.degree(); ++i) {
      pow[i] = cur;
      cur = B.mul(cur, g);
    }
    std::vector<u32>& tab = embed_[{a, b}];
    tab.assign(A.q(), 0);
    for (u32 x = 0; x < A.q(); ++x) {
      auto d = A.digits(x);
      u32 acc = 0;
      for (u32 i = 0; i < A.degree(); ++i)
        if (d[i]) acc = B.add(acc, B.mul(d[i], pow[i]));
      tab[x] = acc;
    }
  }

  u32 p_;
  std::map<u32, FqRef> levels_;
  std::map<std::pair<u32, u32>, std::vector<u32>> embed_;
};

using TowerRef = std::shared_ptr<const FqTower>;

inline TowerRef make_tower(u32 p, std::vector<u32> degrees,
                           const Caps& caps = default_caps()) {
  return std::make_shared<FqTower>(p, std::move(degrees), caps);
}

inline FqRef prime_field(u32 p) { return make_tower(p, {1})->level(1); }

}  // namespace fqrep
