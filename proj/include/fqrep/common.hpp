#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqrep {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// All failures are reported through exceptions; nothing is coerced silently.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A resource cap was hit.  The message names the cap so callers can raise it.
struct CapError : Error {
  explicit CapError(const std::string& msg) : Error(msg) {}
};

// Malformed or inconsistent input data (bad structure constants, mismatched
// fields, non-module action matrices, ...).
struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A precondition of an operation does not hold for the given arguments.
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// The input is valid but falls outside the supported fragment; the message
// names the unimplemented branch.
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// Resource caps.  Defaults are modest on purpose: this library targets exact
// desk-scale computations and fails loudly instead of thrashing.
struct Caps {
  u32 algebra_dim = 64;    // max dimension of a structure-constant algebra
  u32 matrix_dim = 4096;   // max rows/cols of a dense matrix
  u32 poly_deg = 64;       // max degree of a (skew) polynomial operand
  u32 field_q = 1u << 16;  // max field size
  u32 search_steps = 2000000;  // generic cap on enumeration loops
};

inline const Caps& default_caps() {
  static const Caps c{};
  return c;
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

// Deterministic PRNG used by all sampling code.  Every randomized routine
// takes an explicit engine (or seed) so runs are reproducible.
class Rng {
 public:
  explicit Rng(u64 seed) : eng_(seed) {}

  // uniform in [0, n)
  u64 below(u64 n) { return n <= 1 ? 0 : eng_() % n; }
  bool coin() { return (eng_() & 1) != 0; }
  u64 raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace fqrep
