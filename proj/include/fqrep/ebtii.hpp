#pragma once

#include <algorithm>
#include <map>
#include <optional>

#include "fqrep/embed.hpp"

// Witness families: certified collections of pairwise non-isomorphic
// indecomposables sharing one endolength, generated over a skew polynomial
// ring and pushed through an embedding bimodule.  A ladder driver walks a
// strictly increasing sequence of endolengths, re-selecting deeper chain
// levels whenever the measured control constant demands a wider gap.

namespace fqrep {
namespace ebtii {

// Outcome of certifying one family from scratch.  The seed feeds every
// randomized probe, so re-running with another seed is an independent check.
struct CertRecord {
  u64 seed = 0;
  u32 members_checked = 0;
  u32 pairs_checked = 0;
  bool indecomposable = true;
  bool pairwise_non_iso = true;
  bool endolength_uniform = true;
  std::string failure;  // first failure, empty when everything certified

  bool pass() const {
    return indecomposable && pairwise_non_iso && endolength_uniform;
  }
};

struct WitnessFamily {
  u32 endolength = 0;
  u32 level = 0;                  // chain length n of the construction
  std::vector<PidModule> source;  // ring-side members (pushed: bucket preimages)
  std::vector<FdModule> members;  // the certified modules themselves
  CertRecord cert;

  u32 size() const { return static_cast<u32>(members.size()); }
};

namespace detail {

// largest endolength bucket; ties broken toward the smaller endolength
inline u32 pick_bucket(const std::vector<u32>& vals) {
  require(!vals.empty(), "pick_bucket: empty sample");
  std::map<u32, u32> freq;
  for (u32 v : vals) ++freq[v];
  u32 best_val = 0, best_n = 0;
  for (const auto& [v, n] : freq)
    if (n > best_n) {  // strict, so the smaller key survives a tie
      best_val = v;
      best_n = n;
    }
  return best_val;
}

}  // namespace detail

// Recompute the family invariants from scratch: every member indecomposable
// with endolength exactly `expected`, every pair non-isomorphic.  Cheap
// conjugation invariants cut the pair sweep; surviving pairs get a hom-space
// solve, and only pairs with morphisms in both filters reach a full
// decomposition-based isomorphism test.
inline CertRecord certify_members(const std::vector<FdModule>& ms, u32 expected,
                                  u64 seed, const Caps& caps = default_caps()) {
  CertRecord rec;
  rec.seed = seed;
  auto note = [&](const std::string& s) {
    if (rec.failure.empty()) rec.failure = s;
  };
  std::vector<embed::detail::ActSignature> sigs(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    const FdModule& M = ms[i];
    if (M.dim == 0) {
      rec.indecomposable = false;
      note("member " + std::to_string(i) + " is the zero module");
      continue;
    }
    FdAlgebra E = end_algebra(M, caps);
    auto ld = E.local_data();
    if (!ld.local) {
      rec.indecomposable = false;
      note("member " + std::to_string(i) + " decomposes");
      continue;
    }
    u32 dim_p = M.dim * M.K->degree();
    require(dim_p % ld.residue_degree == 0,
            "certify_members: dimension not divisible by the residue degree");
    u32 e = dim_p / ld.residue_degree;
    if (e != expected) {
      rec.endolength_uniform = false;
      note("member " + std::to_string(i) + " has endolength " +
           std::to_string(e) + ", family claims " + std::to_string(expected));
    }
    sigs[i] = embed::detail::act_signature(M);
    ++rec.members_checked;
  }
  for (size_t i = 0; i < ms.size(); ++i) {
    for (size_t j = i + 1; j < ms.size(); ++j) {
      ++rec.pairs_checked;
      if (ms[i].dim != ms[j].dim) continue;
      if (!(sigs[i] == sigs[j])) continue;
      auto H = hom_space(ms[i], ms[j]);
      if (H.empty()) continue;  // no morphism, no isomorphism
      bool iso = embed::detail::invertible_in_span(ms[i].K, ms[i].dim, H,
                                                   seed + 31 * i + j)
                     .has_value() ||
                 iso_modules(ms[i], ms[j], seed, caps);
      if (iso) {
        rec.pairwise_non_iso = false;
        note("members " + std::to_string(i) + " and " + std::to_string(j) +
             " are isomorphic");
      }
    }
  }
  return rec;
}

// Pairwise non-similar atoms listed by ascending (degree, coefficient code).
// The cached similarity key makes the all-pairs sweep cheap.
inline std::vector<skew::Atom> witness_atoms(const skew::SkewRing& R,
                                             u32 max_deg,
                                             const Caps& caps = default_caps()) {
  std::vector<skew::Atom> out;
  for (u32 d = 1; d <= max_deg; ++d) {
    u64 total = 1;
    for (u32 i = 0; i < d; ++i) {
      total *= R.D->q();
      if (total > (u64{1} << 40))
        throw CapError("witness_atoms: atom search space over cap");
    }
    for (u64 code = 0; code < total; ++code) {
      skew::SkewPoly f = skew::monic_from_code(R, d, code);
      if (!skew::is_atom(R, f, caps)) continue;
      skew::Atom cand{f, {}};
      bool fresh = true;
      for (const auto& a : out)
        if (similar(R, a, cand, caps)) {
          fresh = false;
          break;
        }
      if (fresh) out.push_back(std::move(cand));
    }
  }
  return out;
}

// Family of chain modules of length n over `count` pairwise non-similar
// atoms.  Atoms are grouped by the endolength of their simple; the first
// group to reach `count` (scanning by ascending degree) wins, so every member
// of the emitted family has endolength n times that value.
inline WitnessFamily pid_witnesses(const skew::SkewRing& R, u32 n, u32 count,
                                   u32 max_deg = 5, u64 seed = 1,
                                   const Caps& caps = default_caps()) {
  require(n >= 1, "pid_witnesses: level must be positive");
  WitnessFamily fam;
  fam.level = n;
  if (count == 0) {
    fam.cert = certify_members({}, 0, seed, caps);
    return fam;
  }
  std::vector<skew::Atom> pool = witness_atoms(R, max_deg, caps);
  std::vector<u32> keys;  // simple endolengths in first-seen order
  std::vector<std::vector<size_t>> groups;
  std::optional<size_t> chosen;
  for (size_t i = 0; i < pool.size() && !chosen; ++i) {
    PidModule S = indec_module(R, pool[i].poly, 1, caps);
    u32 e1 = pid_endolength(S, seed, caps);
    size_t k = std::find(keys.begin(), keys.end(), e1) - keys.begin();
    if (k == keys.size()) {
      keys.push_back(e1);
      groups.emplace_back();
    }
    groups[k].push_back(i);
    if (groups[k].size() >= count) chosen = k;
  }
  if (!chosen) {
    size_t found = 0;
    for (const auto& g : groups) found = std::max(found, g.size());
    throw CapError("pid_witnesses: insufficient atoms below the degree cap: found " +
                   std::to_string(found) + " of " + std::to_string(count) +
                   " requested");
  }
  for (size_t idx : groups[*chosen]) {
    fam.source.push_back(indec_module(R, pool[idx].poly, n, caps));
    fam.members.push_back(pid_to_fdmodule(fam.source.back()));
  }
  fam.endolength = n * keys[*chosen];
  fam.cert = certify_members(fam.members, fam.endolength, seed, caps);
  require(fam.cert.pass(),
          "pid_witnesses: certification failed: " + fam.cert.failure);
  return fam;
}

// Push a certified ring-side family through an embedding bimodule: verify the
// bimodule on the family, take images, bucket them by measured endolength,
// and certify the largest bucket as a family over the target algebra.
inline WitnessFamily push_witnesses(const embed::EmbeddingBimodule& Z,
                                    const WitnessFamily& fam, u64 seed = 1,
                                    u32 ses_samples = 4,
                                    const Caps& caps = default_caps()) {
  WitnessFamily out;
  out.level = fam.level;
  if (fam.members.empty()) {
    out.cert = certify_members({}, 0, seed, caps);
    return out;
  }
  require(fam.cert.pass(), "push_witnesses: input family is not certified");
  require(fam.source.size() == fam.members.size(),
          "push_witnesses: family carries no ring-side modules to push");
  embed::VerificationReport rep =
      embed::verify_embedding(Z, fam.source, seed, ses_samples, caps);
  if (!rep.pass()) {
    std::string why = !rep.indec_preserved  ? "an image decomposes"
                      : !rep.non_iso_preserved ? "two images collapse"
                                               : "an image sequence fails exactness";
    throw ValidationError(
        "push_witnesses: embedding verification failed on the family (" + why +
        ")");
  }
  std::vector<FdModule> img;
  std::vector<u32> endol;
  img.reserve(fam.source.size());
  for (const PidModule& N : fam.source) {
    img.push_back(embed::apply(Z, N, caps));
    endol.push_back(endolength(img.back(), seed, caps));
  }
  out.endolength = detail::pick_bucket(endol);
  for (size_t i = 0; i < img.size(); ++i) {
    if (endol[i] != out.endolength) continue;
    out.source.push_back(fam.source[i]);
    out.members.push_back(img[i]);
  }
  out.cert = certify_members(out.members, out.endolength, seed, caps);
  require(out.cert.pass(),
          "push_witnesses: image certification failed: " + out.cert.failure);
  return out;
}

struct LadderStep {
  u32 requested = 0;      // the level asked for
  u32 level = 0;          // the level used after gap enforcement
  WitnessFamily source;   // certified family over the ring
  WitnessFamily image;    // certified pushed family
  u32 c = 1;              // control constants measured at this step
  u32 c_prime = 1;
};

struct Ladder {
  std::vector<LadderStep> steps;
  std::string diagnostic;  // nonempty when a cap stopped the climb

  bool complete() const { return diagnostic.empty(); }
};

// Walk the requested levels, pushing a witness family at each rung.  The next
// rung's source endolength must exceed c times the previous rung's pushed
// endolength (c the running maximum of the measured control constants), so
// the driver advances past requested levels that tie.  Since every member
// satisfies d <= c * d', the pushed endolengths then increase strictly.  A
// cap hit ends the climb with the achieved prefix and a diagnostic.
inline Ladder ebtii_ladder(const embed::EmbeddingBimodule& Z,
                           const std::vector<u32>& levels, u32 count,
                           u32 max_deg = 5, u64 seed = 1,
                           const Caps& caps = default_caps()) {
  require(!levels.empty(), "ebtii_ladder: at least one level required");
  for (size_t i = 0; i + 1 < levels.size(); ++i)
    require(levels[i] < levels[i + 1],
            "ebtii_ladder: levels must be strictly increasing");
  require(count >= 1, "ebtii_ladder: count must be positive");
  Ladder lad;
  u32 c_run = 1;        // running max of the measured control constant
  u32 dprime_prev = 0;  // pushed endolength of the previous rung
  u32 n_prev = 0;
  u32 d1 = 0;           // simple endolength of the atom pool, once measured
  for (u32 n_req : levels) {
    try {
      u32 n = std::max(n_req, n_prev + 1);
      u64 bar = static_cast<u64>(c_run) * dprime_prev;
      if (d1 > 0)
        while (static_cast<u64>(n) * d1 <= bar) ++n;
      WitnessFamily fam = pid_witnesses(Z.gamma, n, count, max_deg, seed + n, caps);
      embed::ControlReport ctl = embed::control_constants(Z, fam.source, seed, caps);
      u32 climb = 0;
      while (fam.endolength <=
             static_cast<u64>(std::max(c_run, ctl.c)) * dprime_prev) {
        if (++climb > 32)
          throw CapError("ebtii_ladder: gap not cleared within 32 level advances");
        ++n;
        fam = pid_witnesses(Z.gamma, n, count, max_deg, seed + n, caps);
        ctl = embed::control_constants(Z, fam.source, seed, caps);
      }
      c_run = std::max(c_run, ctl.c);
      d1 = fam.endolength / n;
      WitnessFamily img = push_witnesses(Z, fam, seed + n, 4, caps);
      if (img.size() < count)
        throw CapError(
            "ebtii_ladder: endolength bucket shrank below the requested count "
            "at level " + std::to_string(n));
      require(img.endolength > dprime_prev,
              "ebtii_ladder: pushed endolength did not increase");
      LadderStep step;
      step.requested = n_req;
      step.level = n;
      step.c = ctl.c;
      step.c_prime = ctl.c_prime;
      step.source = std::move(fam);
      step.image = std::move(img);
      dprime_prev = step.image.endolength;
      n_prev = n;
      lad.steps.push_back(std::move(step));
    } catch (const CapError& e) {
      lad.diagnostic = "level " + std::to_string(n_req) + ": " + e.what() +
                       " (ladder achieved " + std::to_string(lad.steps.size()) +
                       " of " + std::to_string(levels.size()) + " levels)";
      break;
    }
  }
  return lad;
}

}  // namespace ebtii
}  // namespace fqrep
