#pragma once

// Twisted conjugation structure: Newton points and Kottwitz invariants,
// reduction to minimal length by cyclic shifts, canonical class keys at the
// plain and Omega-twisted levels, and the enumeration of the classes below a
// dominant cocharacter.

#include "adlvlab/affine.hpp"

#include <deque>
#include <random>

namespace adlvlab {

struct NewtonKottwitz {
  QVec newton;      // dominant Newton point
  QVec newton_raw;  // before dominization
  ZVec kappa0;      // class modulo the coroot lattice
  ZVec kappa;       // class in the Frobenius coinvariants
};

inline int frobenius_order(const Universe& U, const FrobeniusAction& F, int cap = 10000) {
  // smallest k with F^k = id on the group: linear part k-periodic and all
  // affine simple reflections plus Omega coset representatives fixed
  std::vector<AffineElt> gens;
  for (auto& s : U.sref()) gens.push_back(s.elt);
  for (auto& t : U.omega_coset_reps()) gens.push_back(t);
  std::vector<AffineElt> cur = gens;
  ZMat L = F.L;
  for (int k = 1; k <= cap; ++k) {
    for (auto& g : cur) g = U.frobenius_apply(F, g);
    bool lin_id = true;
    ZMat Lk = L;
    // recompute L^k incrementally
    if (k > 1) {
      // (we track by multiplying below)
    }
    // track linear power separately
    static thread_local ZMat scratch;  // unused; clarity over cleverness
    (void)scratch;
    // compute L^k directly
    ZMat pw = mat_identity(U.rank());
    for (int i = 0; i < k; ++i) pw = mat_mul(pw, F.L);
    for (size_t i = 0; i < pw.size() && lin_id; ++i)
      for (size_t j = 0; j < pw.size() && lin_id; ++j)
        if (pw[i][j] != (i == j ? 1 : 0)) lin_id = false;
    if (!lin_id) continue;
    bool all_fixed = true;
    for (size_t i = 0; i < gens.size() && all_fixed; ++i)
      if (!(cur[i] == gens[i])) all_fixed = false;
    if (all_fixed) return k;
    (void)Lk;
  }
  throw Error(ErrorKind::SearchBudgetExceeded, "Frobenius order exceeds cap");
}

inline NewtonKottwitz newton_kottwitz(const Universe& U, const FrobeniusAction& F,
                                      const AffineElt& w) {
  int m = frobenius_order(U, F);
  AffineElt p = w, fw = w;
  for (int i = 1; i < m; ++i) {
    fw = U.frobenius_apply(F, fw);
    p = U.mult(p, fw);
  }
  // p = w sigma(w) ... sigma^{m-1}(w); now raise to the order of its finite part
  int k = 1;
  {
    int uu = p.u;
    while (uu != U.W().identity()) {
      uu = U.W().mul(uu, p.u);
      ++k;
      if (k > (int)U.W().size())
        throw Error(ErrorKind::InconsistentCartan, "finite part order overflow");
    }
  }
  QVec lam(U.rank(), Rat(0));
  ZVec acc(U.rank(), 0);
  ZVec cur = p.lam;
  int upow = U.W().identity();
  for (int j = 0; j < k; ++j) {
    ZVec term = U.W().apply(upow, p.lam);
    acc = zvec_add(acc, term);
    upow = U.W().mul(upow, p.u);
  }
  (void)cur;
  long long n = (long long)m * k;
  for (size_t i = 0; i < U.rank(); ++i) lam[i] = Rat(acc[i], n);
  NewtonKottwitz nk;
  nk.newton_raw = lam;
  auto [dom, u] = U.dominant_rep(lam);
  (void)u;
  nk.newton = dom;
  nk.kappa0 = U.kappa0(w);
  nk.kappa = U.kappa(F, w);
  // the dominant Newton point is an invariant of the twisted class
  auto img = mat_apply_q(F.L, nk.newton);
  if (U.dominant_rep(img).first != nk.newton)
    throw Error(ErrorKind::CrossCheckMismatch, "Newton point not Frobenius-stable");
  return nk;
}

inline bool is_straight(const Universe& U, const FrobeniusAction& F, const AffineElt& w) {
  auto nk = newton_kottwitz(U, F, w);
  return Rat(U.length(w)) == U.two_rho_pairing(nk.newton);
}

struct ReductionStep {
  int s;
  bool length_dropping;
};

struct ShiftSearchResult {
  bool minimal = false;
  AffineElt at;                    // element admitting a length-dropping shift
  int s = -1;                      // the dropping reflection
  std::vector<ReductionStep> path; // length-preserving shifts from the start to `at`
};

// Breadth-first search over length-preserving cyclic shifts looking for a
// length-dropping one. `order(x, out)` fills the reflection visit order;
// the default is ascending, randomized strategies permute it.
inline ShiftSearchResult find_shift_to_drop(
    const Universe& U, const FrobeniusAction& F, const AffineElt& start, Budget& budget,
    const std::function<void(const AffineElt&, std::vector<int>&)>& order = {}) {
  long long L = U.length(start);
  struct Node {
    AffineElt elt;
    int parent;
    int via;
  };
  std::vector<Node> nodes;
  std::unordered_map<AffineElt, int, AffineEltHash> seen;
  std::deque<int> q;
  nodes.push_back({start, -1, -1});
  seen[start] = 0;
  q.push_back(0);
  std::vector<int> ord(U.nsref());
  while (!q.empty()) {
    int cur = q.front();
    q.pop_front();
    budget.tick();
    for (size_t i = 0; i < ord.size(); ++i) ord[i] = (int)i;
    if (order) order(nodes[cur].elt, ord);
    for (int s : ord) {
      AffineElt fs = U.frobenius_apply(F, U.sref_elt(s));
      AffineElt y = U.mult(U.mult(U.sref_elt(s), nodes[cur].elt), fs);
      long long ly = U.length(y);
      if (ly < L) {
        ShiftSearchResult r;
        r.at = nodes[cur].elt;
        r.s = s;
        int p = cur;
        std::vector<ReductionStep> rev;
        while (nodes[p].parent >= 0) {
          rev.push_back({nodes[p].via, false});
          p = nodes[p].parent;
        }
        r.path.assign(rev.rbegin(), rev.rend());
        return r;
      }
      if (ly == L && !seen.count(y)) {
        seen[y] = (int)nodes.size();
        nodes.push_back({y, cur, s});
        q.push_back((int)nodes.size() - 1);
      }
    }
  }
  ShiftSearchResult r;
  r.minimal = true;
  return r;
}

inline std::pair<AffineElt, std::vector<ReductionStep>> reduce_to_minimal(
    const Universe& U, const FrobeniusAction& F, const AffineElt& w, Budget& budget,
    const std::function<void(const AffineElt&, std::vector<int>&)>& order = {}) {
  AffineElt cur = w;
  std::vector<ReductionStep> path;
  while (true) {
    auto r = find_shift_to_drop(U, F, cur, budget, order);
    if (r.minimal) return {cur, path};
    for (auto& st : r.path) path.push_back(st);
    path.push_back({r.s, true});
    AffineElt fs = U.frobenius_apply(F, U.sref_elt(r.s));
    cur = U.mult(U.mult(U.sref_elt(r.s), r.at), fs);
  }
}

enum class ClassLevel { conjclass, tilde_class };

// Closure of a minimal-length element under length-preserving shifts; at the
// tilde level also under Omega-twisted conjugation, with translation parts
// canonicalized modulo the central coboundary sublattice.
inline std::vector<AffineElt> minimal_closure(const Universe& U, const FrobeniusAction& F,
                                              const AffineElt& wmin, ClassLevel level,
                                              Budget& budget) {
  bool with_omega = level == ClassLevel::tilde_class;
  auto reduce = [&](const AffineElt& x) {
    if (!with_omega) return x;
    return AffineElt{hnf_residue_small(F.tilde_reduction, x.lam), x.u};
  };
  long long L = U.length(wmin);
  std::vector<AffineElt> out;
  std::unordered_map<AffineElt, char, AffineEltHash> seen;
  std::deque<AffineElt> q;
  AffineElt start = reduce(wmin);
  seen[start] = 1;
  q.push_back(start);
  while (!q.empty()) {
    AffineElt cur = q.front();
    q.pop_front();
    budget.tick();
    out.push_back(cur);
    for (size_t s = 0; s < U.nsref(); ++s) {
      AffineElt fs = U.frobenius_apply(F, U.sref_elt((int)s));
      AffineElt y = U.mult(U.mult(U.sref_elt((int)s), cur), fs);
      if (U.length(y) != L) continue;
      y = reduce(y);
      if (!seen.count(y)) {
        seen[y] = 1;
        q.push_back(y);
      }
    }
    if (with_omega) {
      for (auto& t : U.omega_coset_reps()) {
        AffineElt y = U.mult(U.mult(t, cur), U.inv(U.frobenius_apply(F, t)));
        if (U.length(y) != L)
          throw Error(ErrorKind::CrossCheckMismatch, "Omega twist changed the length");
        y = reduce(y);
        if (!seen.count(y)) {
          seen[y] = 1;
          q.push_back(y);
        }
      }
    }
  }
  return out;
}

struct SigmaClassKey {
  AffineElt rep;
  ClassLevel level;
  std::string str;
  bool operator==(const SigmaClassKey& o) const { return str == o.str && level == o.level; }
};

inline SigmaClassKey class_key(const Universe& U, const FrobeniusAction& F, const AffineElt& w,
                               ClassLevel level, Budget& budget) {
  auto [wmin, path] = reduce_to_minimal(U, F, w, budget);
  (void)path;
  auto closure = minimal_closure(U, F, wmin, level, budget);
  AffineElt best = closure.front();
  for (auto& x : closure)
    if (U.canonical_less(x, best)) best = x;
  SigmaClassKey k;
  k.rep = best;
  k.level = level;
  k.str = (level == ClassLevel::conjclass ? "B:" : "C:") + U.print(best);
  return k;
}

// ---------------------------------------------------------------------------
// classes of the group below a dominant cocharacter

struct BClassInfo {
  AffineElt rep;   // straight representative with dominant Newton point
  QVec newton;     // dominant Newton point
  ZVec kappa;      // Frobenius-coinvariant Kottwitz class
  bool basic = false;
  std::string key; // "B:" + canonical representative text
};

inline bool is_central(const Universe& U, const QVec& v) {
  for (size_t i = 0; i < U.roots().nsimple(); ++i)
    if (qdot(U.roots().simple_fun[i], v) != 0) return false;
  return true;
}

// sigma-orbit average of a dominant element, computed in the dominant chamber
inline QVec mu_diamond(const Universe& U, const FrobeniusAction& F, const ZVec& mu) {
  QVec cur = qvec_of(mu);
  std::vector<QVec> orbit;
  // iterate x -> dominant representative of L x until it cycles
  for (int i = 0; i < 1000; ++i) {
    orbit.push_back(cur);
    cur = U.dominant_rep(mat_apply_q(F.L, cur)).first;
    if (cur == orbit.front()) break;
  }
  QVec avg(U.rank(), Rat(0));
  for (auto& x : orbit) avg = qvec_add(avg, x);
  return qvec_scale(Rat(1, (long long)orbit.size()), avg);
}

inline ZVec mu_natural(const Universe& U, const FrobeniusAction& F, const ZVec& mu) {
  return U.kappa(F, U.translation(mu));
}

inline std::vector<BClassInfo> enumerate_b_g_mu(const Universe& U, const FrobeniusAction& F,
                                                const ZVec& mu, Budget& budget) {
  if (!U.is_dominant_z(mu))
    throw Error(ErrorKind::MalformedDocument, "mu must be dominant");
  long long L = U.length(U.translation(mu));
  QVec diamond = mu_diamond(U, F, mu);
  ZVec natural = mu_natural(U, F, mu);

  struct Group {
    std::vector<AffineElt> members;
  };
  std::map<std::pair<std::vector<std::string>, ZVec>, Group> groups;

  for (auto& w : U.elements_up_to_length(L, &budget)) {
    auto nk = newton_kottwitz(U, F, w);
    if (Rat(U.length(w)) != U.two_rho_pairing(nk.newton)) continue;  // straight only
    if (nk.kappa != natural) continue;
    if (!U.dominance_leq(nk.newton, diamond)) continue;
    std::vector<std::string> nkey;
    for (auto& c : nk.newton) nkey.push_back(rat_string(c));
    groups[{nkey, nk.kappa}].members.push_back(w);
  }

  std::vector<BClassInfo> out;
  for (auto& [gk, g] : groups) {
    BClassInfo b;
    bool have = false;
    for (auto& w : g.members) {
      auto nk = newton_kottwitz(U, F, w);
      if (nk.newton_raw != nk.newton) continue;  // want a dominant-Newton representative
      if (!have || U.canonical_less(w, b.rep)) {
        b.rep = w;
        have = true;
      }
    }
    if (!have) {
      // fall back to the canonically least straight element
      for (auto& w : g.members)
        if (!have || U.canonical_less(w, b.rep)) {
          b.rep = w;
          have = true;
        }
    }
    auto nk = newton_kottwitz(U, F, b.rep);
    b.newton = nk.newton;
    b.kappa = nk.kappa;
    b.basic = is_central(U, nk.newton);
    b.key = "B:" + U.print(b.rep);
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [&](const BClassInfo& a, const BClassInfo& b) {
    Rat sa = U.two_rho_pairing(a.newton), sb = U.two_rho_pairing(b.newton);
    if (sa != sb) return sa > sb;
    return a.key < b.key;
  });
  int basics = 0;
  for (auto& b : out) basics += b.basic ? 1 : 0;
  if (!out.empty() && basics != 1)
    throw Error(ErrorKind::CrossCheckMismatch, "expected exactly one basic class");
  return out;
}

}  // namespace adlvlab
