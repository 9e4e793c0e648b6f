#pragma once

// Arithmetic of the extended affine Weyl group: canonical forms, the
// Iwahori-Matsumoto length, affine simple reflections, the length-zero
// subgroup, Frobenius actions, element text encoding, and the x t^mu y
// decomposition. A Universe bundles one root system with its lattice; Levi
// subgroups are universes of their own sharing the lattice coordinates.

#include "adlvlab/weyl.hpp"

#include <functional>
#include <memory>
#include <queue>
#include <set>

namespace adlvlab {

struct AffineElt {
  ZVec lam;  // translation part, lattice coordinates
  int u = 0; // finite part, id in the universe's Weyl table

  bool operator==(const AffineElt& o) const { return u == o.u && lam == o.lam; }
  bool operator!=(const AffineElt& o) const { return !(*this == o); }
};

struct AffineEltHash {
  size_t operator()(const AffineElt& w) const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix((uint64_t)w.u);
    for (auto c : w.lam) mix((uint64_t)c);
    return (size_t)h;
  }
};

struct FrobeniusAction {
  ZMat P;                 // lattice automorphism permuting the simple roots
  AffineElt tau;          // length-zero twist
  ZMat L;                 // linear part of the induced affine action: lin(tau) . P
  ZMat Pinv;
  std::vector<int> sperm; // induced permutation of the affine simple reflections
  Hnf kappa_lattice;      // Q^vee + (1-L)Lambda, for the coinvariant classes
  Hnf tilde_reduction;    // (1-L) of the central sublattice
  std::string key;        // serialization for cache hashing
};

class Universe {
 public:
  // --- construction -------------------------------------------------------

  static std::shared_ptr<Universe> ambient(GroupDatum datum) {
    auto u = std::shared_ptr<Universe>(new Universe());
    u->datum_ = std::move(datum);
    u->n_ = u->datum_.rank;
    u->rs_ = u->datum_.rs;
    u->init_core();
    u->init_ambient_frobenius();
    return u;
  }

  // Levi sub-universe generated by a subset of this universe's simple roots.
  std::shared_ptr<Universe> levi(const std::vector<int>& simple_subset) const {
    auto m = std::shared_ptr<Universe>(new Universe());
    m->n_ = n_;
    std::vector<ZVec> sf, sc;
    for (int i : simple_subset) {
      sf.push_back(rs_.simple_fun[i]);
      sc.push_back(rs_.simple_covec[i]);
    }
    m->rs_ = RootSystem::generate(n_, sf, sc);
    m->init_core();
    return m;
  }

  size_t rank() const { return n_; }
  const RootSystem& roots() const { return rs_; }
  const FiniteWeylTable& W() const { return W_; }
  const GroupDatum& datum() const { return datum_; }
  const FrobeniusAction& ambient_frobenius() const {
    if (!ambient_frob_) throw Error(ErrorKind::Unsupported, "universe has no ambient Frobenius");
    return *ambient_frob_;
  }
  FrobeniusAction split_frobenius() const { return make_frobenius(mat_identity(n_), identity()); }

  // --- basic group arithmetic ---------------------------------------------

  AffineElt identity() const { return AffineElt{ZVec(n_, 0), W_.identity()}; }

  AffineElt translation(const ZVec& lam) const { return AffineElt{lam, W_.identity()}; }

  AffineElt finite_elt(int u) const { return AffineElt{ZVec(n_, 0), u}; }

  AffineElt mult(const AffineElt& a, const AffineElt& b) const {
    return AffineElt{zvec_add(a.lam, W_.apply(a.u, b.lam)), W_.mul(a.u, b.u)};
  }

  AffineElt inv(const AffineElt& a) const {
    int ui = W_.inv(a.u);
    return AffineElt{zvec_neg(W_.apply(ui, a.lam)), ui};
  }

  // Iwahori-Matsumoto length
  long long length(const AffineElt& w) const {
    long long total = 0;
    int uinv = W_.inv(w.u);
    for (int r : rs_.positive_idx) {
      long long pairing = zdot(w.lam, rs_.roots[r].fun);
      int pre = W_.root_image(uinv, r);
      if (rs_.roots[pre].positive)
        total += pairing >= 0 ? pairing : -pairing;
      else
        total += pairing >= 1 ? pairing - 1 : 1 - pairing;
    }
    return total;
  }

  // --- canonical order -----------------------------------------------------
  // (length, translation coordinates, finite image table); translation
  // coordinates compare descending so dominant-looking representatives win.

  bool canonical_less(const AffineElt& a, const AffineElt& b) const {
    long long la = length(a), lb = length(b);
    if (la != lb) return la < lb;
    if (a.lam != b.lam) {
      for (size_t i = 0; i < a.lam.size(); ++i)
        if (a.lam[i] != b.lam[i]) return a.lam[i] > b.lam[i];
    }
    if (a.u != b.u) {
      const ZMat& ma = W_.mat(a.u);
      const ZMat& mb = W_.mat(b.u);
      for (size_t i = 0; i < ma.size(); ++i)
        for (size_t j = 0; j < ma[i].size(); ++j)
          if (ma[i][j] != mb[i][j]) return ma[i][j] < mb[i][j];
    }
    return false;
  }

  // --- affine simple reflections and diagram blocks ------------------------

  struct AffSimple {
    AffineElt elt;
    int comp;          // irreducible component of the root system
    bool affine_node;  // true for the t^{theta^vee} s_theta node
    int finite_index;  // index into rs_.simple_* for finite nodes, else -1
  };

  const std::vector<AffSimple>& sref() const { return sref_; }
  size_t nsref() const { return sref_.size(); }
  int sref_of_finite(int simple_idx) const { return sref_of_finite_[simple_idx]; }
  int ncomponents() const { return ncomp_; }
  const std::vector<std::vector<int>>& component_srefs() const { return comp_srefs_; }
  int component_of_simple(int simple_idx) const { return comp_of_simple_[simple_idx]; }

  AffineElt sref_elt(int i) const { return sref_[i].elt; }

  // --- dominance and rho ----------------------------------------------------

  bool is_dominant(const QVec& lam) const {
    for (size_t i = 0; i < rs_.nsimple(); ++i)
      if (qdot(rs_.simple_fun[i], lam) < 0) return false;
    return true;
  }
  bool is_dominant_z(const ZVec& lam) const {
    for (size_t i = 0; i < rs_.nsimple(); ++i)
      if (zdot(rs_.simple_fun[i], lam) < 0) return false;
    return true;
  }

  Rat two_rho_pairing(const QVec& lam) const {
    Rat s = 0;
    for (int r : rs_.positive_idx) s += qdot(rs_.roots[r].fun, lam);
    return s;
  }
  long long two_rho_pairing_z(const ZVec& lam) const {
    long long s = 0;
    for (int r : rs_.positive_idx) s += zdot(lam, rs_.roots[r].fun);
    return s;
  }
  Rat rho_pairing(const QVec& lam) const { return two_rho_pairing(lam) / 2; }

  // minimal-length u with u(lam) dominant, by the chamber walk
  std::pair<QVec, int> dominant_rep(const QVec& lam) const {
    QVec cur = lam;
    int u = W_.identity();
    bool moved = true;
    while (moved) {
      moved = false;
      for (size_t i = 0; i < rs_.nsimple(); ++i) {
        Rat p = qdot(rs_.simple_fun[i], cur);
        if (p < 0) {
          // apply s_i
          for (size_t t = 0; t < n_; ++t) cur[t] -= p * Rat(rs_.simple_covec[i][t]);
          u = W_.mul(W_.gen(i), u);
          moved = true;
          break;
        }
      }
    }
    return {cur, u};
  }

  // lam2 - lam a nonnegative rational combination of the simple coroots
  bool dominance_leq(const QVec& lam, const QVec& lam2) const {
    QVec d = qvec_sub(lam2, lam);
    size_t k = rs_.nsimple();
    if (k == 0) return qvec_is_zero(d);
    std::vector<std::vector<Rat>> A(n_, std::vector<Rat>(k));
    for (size_t r = 0; r < n_; ++r)
      for (size_t c = 0; c < k; ++c) A[r][c] = Rat(rs_.simple_covec[c][r]);
    auto x = qmat_solve(A, d);
    if (!x) return false;
    for (auto& c : *x)
      if (c < 0) return false;
    return true;
  }

  // --- Omega: length-zero elements ------------------------------------------

  const std::vector<ZVec>& central_basis() const { return central_; }
  const Hnf& coroot_lattice() const { return coroot_hnf_; }
  bool omega_finite() const { return central_.empty(); }

  // canonical residue of the translation class modulo the coroot lattice
  ZVec kappa0(const AffineElt& w) const { return hnf_residue_small(coroot_hnf_, w.lam); }

  // coset representatives of Omega over its central translation subgroup,
  // indexed by achievable finite parts; finite Omega is enumerated fully.
  const std::vector<AffineElt>& omega_coset_reps() const { return omega_reps_; }

  const std::vector<AffineElt>& omega_elements() const {
    if (!omega_finite())
      throw Error(ErrorKind::Unsupported, "Omega is infinite; full enumeration unavailable");
    return omega_reps_;
  }

  int omega_index(const AffineElt& t) const {
    for (size_t i = 0; i < omega_reps_.size(); ++i)
      if (omega_reps_[i] == t) return (int)i;
    return -1;
  }

  // length-zero element in the same W_a-coset as w (left descent reduction)
  AffineElt omega_part(const AffineElt& w) const {
    AffineElt cur = w;
    long long l = length(cur);
    while (l > 0) {
      bool moved = false;
      for (size_t i = 0; i < sref_.size(); ++i) {
        AffineElt nxt = mult(sref_[i].elt, cur);
        long long ln = length(nxt);
        if (ln < l) {
          cur = nxt;
          l = ln;
          moved = true;
          break;
        }
      }
      if (!moved) throw Error(ErrorKind::InconsistentCartan, "no descent at positive length");
    }
    return cur;
  }

  // --- Frobenius actions ----------------------------------------------------

  FrobeniusAction make_frobenius(ZMat P, AffineElt tau) const {
    FrobeniusAction F;
    F.P = std::move(P);
    auto pinv = mat_inverse(F.P);
    if (!pinv) throw Error(ErrorKind::FrobeniusNotBasePreserving, "linear part not invertible");
    F.Pinv = *pinv;
    // must permute the simple roots
    for (size_t i = 0; i < rs_.nsimple(); ++i) {
      ZVec img(n_, 0);
      for (size_t c = 0; c < n_; ++c)
        for (size_t t = 0; t < n_; ++t) img[c] += rs_.simple_fun[i][t] * F.Pinv[t][c];
      int idx = rs_.find(img);
      bool ok = idx >= 0;
      if (ok) {
        ok = false;
        for (size_t j = 0; j < rs_.nsimple(); ++j)
          if (rs_.roots[idx].fun == rs_.simple_fun[j]) ok = true;
      }
      if (!ok)
        throw Error(ErrorKind::FrobeniusNotBasePreserving, "linear part does not permute the base");
    }
    if (length(tau) != 0)
      throw Error(ErrorKind::FrobeniusNotBasePreserving, "twist is not length-zero");
    F.tau = tau;
    F.L = mat_mul(W_.mat(tau.u), F.P);
    // induced permutation of the affine simple reflections
    F.sperm.assign(sref_.size(), -1);
    for (size_t i = 0; i < sref_.size(); ++i) {
      AffineElt img = frob_apply_raw(F, sref_[i].elt);
      int found = -1;
      for (size_t j = 0; j < sref_.size(); ++j)
        if (sref_[j].elt == img) found = (int)j;
      if (found < 0)
        throw Error(ErrorKind::FrobeniusNotBasePreserving,
                    "action does not permute the affine simple reflections");
      F.sperm[i] = found;
    }
    // kappa lattice: Q^vee + (1 - L) Lambda
    std::vector<ZVec> gens;
    for (size_t i = 0; i < rs_.nsimple(); ++i) gens.push_back(rs_.simple_covec[i]);
    ZMat oneminus = mat_sub(mat_identity(n_), F.L);
    for (size_t c = 0; c < n_; ++c) {
      ZVec col(n_);
      for (size_t r = 0; r < n_; ++r) col[r] = oneminus[r][c];
      gens.push_back(col);
    }
    F.kappa_lattice = hnf_from_generators(n_, gens);
    // tilde reduction: (1 - L) of the central sublattice
    std::vector<ZVec> cgens;
    for (auto& z : central_) cgens.push_back(mat_apply(oneminus, z));
    F.tilde_reduction = hnf_from_generators(n_, cgens);
    // serialization key
    std::string k = "P=";
    for (auto& row : F.P)
      for (auto v : row) k += std::to_string(v) + ",";
    k += ";tau=" + print(tau);
    F.key = k;
    return F;
  }

  FrobeniusAction make_twisted(const FrobeniusAction& base, const AffineElt& extra_tau) const {
    // Ad(extra_tau) o base
    AffineElt t = mult(extra_tau, base.tau);
    return make_frobenius(base.P, t);
  }

  AffineElt frobenius_apply(const FrobeniusAction& F, const AffineElt& w) const {
    return frob_apply_raw(F, w);
  }

  // kappa in the coinvariants pi_1(...)_Gamma for the action F
  ZVec kappa(const FrobeniusAction& F, const AffineElt& w) const {
    return hnf_residue_small(F.kappa_lattice, w.lam);
  }

  // --- element text encoding ------------------------------------------------

  std::string print(const AffineElt& w) const {
    std::string s = "t[";
    for (size_t i = 0; i < w.lam.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(w.lam[i]);
    }
    s += "] * w[";
    const auto& wd = W_.word(w.u);
    for (size_t i = 0; i < wd.size(); ++i) {
      if (i) s += " ";
      s += std::to_string(rs_index_to_simple_label(wd[i]));
    }
    s += "]";
    return s;
  }

  AffineElt parse(const std::string& text) const {
    std::string s;
    for (char c : text)
      if (!isspace((unsigned char)c) || true) s += c;  // keep spaces, trim ends below
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error(ErrorKind::MalformedDocument, "empty element text");
    s = s.substr(b, e - b + 1);
    if (s == "1" || s == "e") return identity();
    if (s.find("t[") == 0 || s.find("t[") != std::string::npos) {
      size_t tb = s.find("t["), te = s.find(']', tb);
      size_t wb = s.find("w[", te), we = s.find(']', wb);
      if (tb == std::string::npos || te == std::string::npos || wb == std::string::npos ||
          we == std::string::npos)
        throw Error(ErrorKind::MalformedDocument, "bad element text: " + text);
      ZVec lam;
      std::string body = s.substr(tb + 2, te - tb - 2);
      if (!body.empty()) {
        std::stringstream ss(body);
        std::string tok;
        while (std::getline(ss, tok, ',')) lam.push_back(std::stoll(tok));
      }
      if (lam.size() != n_) throw Error(ErrorKind::MalformedDocument, "wrong coordinate count");
      AffineElt w = translation(lam);
      std::stringstream ws(s.substr(wb + 2, we - wb - 2));
      std::string tok;
      while (ws >> tok) {
        int label = std::stoi(tok);
        w = mult(w, finite_simple_by_label(label));
      }
      return w;
    }
    // word form: optional tau:<k> prefix then s<i> tokens
    std::stringstream ss(s);
    std::string tok;
    AffineElt w = identity();
    bool first = true;
    while (ss >> tok) {
      if (first && tok.rfind("tau:", 0) == 0) {
        int k = std::stoi(tok.substr(4));
        const auto& om = omega_elements();
        if (k < 0 || (size_t)k >= om.size())
          throw Error(ErrorKind::MalformedDocument, "tau index out of range");
        w = mult(w, om[k]);
        first = false;
        continue;
      }
      first = false;
      if (tok.size() < 2 || tok[0] != 's')
        throw Error(ErrorKind::MalformedDocument, "bad token in element text: " + tok);
      int idx = std::stoi(tok.substr(1));
      if (idx < 0 || (size_t)idx >= sref_.size())
        throw Error(ErrorKind::MalformedDocument, "reflection index out of range: " + tok);
      w = mult(w, sref_[idx].elt);
    }
    return w;
  }

  // --- x t^mu y decomposition ----------------------------------------------

  struct ImDecomposition {
    AffineElt x;   // finite
    ZVec mu;       // dominant
    AffineElt y;   // finite
  };

  ImDecomposition im_decompose(const AffineElt& w) const {
    // minimal-length element of the coset W_0 w, by finite left descents
    AffineElt m = w;
    long long lm = length(m);
    bool moved = true;
    while (moved) {
      moved = false;
      for (size_t i = 0; i < rs_.nsimple(); ++i) {
        AffineElt cand = mult(finite_elt(W_.gen(i)), m);
        long long lc = length(cand);
        if (lc < lm) {
          m = cand;
          lm = lc;
          moved = true;
          break;
        }
      }
    }
    if (!is_dominant_z(m.lam))
      throw Error(ErrorKind::CrossCheckMismatch, "coset-minimal element has non-dominant translation");
    ImDecomposition d;
    d.mu = m.lam;
    d.y = finite_elt(m.u);
    AffineElt x = mult(w, inv(m));
    for (auto c : x.lam)
      if (c != 0) throw Error(ErrorKind::CrossCheckMismatch, "x part is not finite");
    d.x = x;
    long long lt = length(translation(d.mu));
    if (length(w) != (long long)W_.len(d.x.u) + lt - (long long)W_.len(d.y.u))
      throw Error(ErrorKind::CrossCheckMismatch, "length identity fails in decomposition");
    return d;
  }

  // --- enumeration -----------------------------------------------------------

  std::vector<AffineElt> elements_up_to_length(long long L, Budget* budget = nullptr) const {
    std::vector<AffineElt> wa;
    std::unordered_map<AffineElt, char, AffineEltHash> seen;
    std::queue<AffineElt> q;
    AffineElt e = identity();
    q.push(e);
    seen[e] = 1;
    while (!q.empty()) {
      AffineElt cur = q.front();
      q.pop();
      wa.push_back(cur);
      if (budget) budget->tick();
      long long lc = length(cur);
      for (auto& s : sref_) {
        AffineElt nxt = mult(cur, s.elt);
        if (length(nxt) > L) continue;
        if (seen.count(nxt)) continue;
        seen[nxt] = 1;
        q.push(nxt);
      }
      (void)lc;
    }
    std::vector<AffineElt> out;
    for (auto& om : omega_elements())
      for (auto& x : wa) out.push_back(mult(x, om));
    return out;
  }

  // finite subgroup generated by a subset of affine simple reflections
  std::vector<AffineElt> subgroup_elements(const std::vector<int>& K, size_t cap = 200000) const {
    std::vector<AffineElt> elems;
    std::unordered_map<AffineElt, char, AffineEltHash> seen;
    std::queue<AffineElt> q;
    AffineElt e = identity();
    q.push(e);
    seen[e] = 1;
    while (!q.empty()) {
      AffineElt cur = q.front();
      q.pop();
      elems.push_back(cur);
      if (elems.size() > cap) throw Error(ErrorKind::InfiniteType, "subgroup closure exceeds cap");
      for (int i : K) {
        AffineElt nxt = mult(cur, sref_[i].elt);
        if (!seen.count(nxt)) {
          seen[nxt] = 1;
          q.push(nxt);
        }
      }
    }
    return elems;
  }

  // K spans a finite subgroup iff it misses at least one node of each affine
  // component of the diagram
  bool finite_type(const std::vector<int>& K) const {
    std::vector<char> in(sref_.size(), 0);
    for (int i : K) in[i] = 1;
    for (int c = 0; c < ncomp_; ++c) {
      bool full = true;
      for (int i : comp_srefs_[c])
        if (!in[i]) full = false;
      if (full && !comp_srefs_[c].empty()) return false;
    }
    return true;
  }

  int finite_w0() const { return W_.w0(); }

  // label shown in words: global index of the affine simple reflection
  int rs_index_to_simple_label(int simple_idx) const { return sref_of_finite_[simple_idx]; }

  AffineElt finite_simple_by_label(int label) const {
    if (label < 0 || (size_t)label >= sref_.size())
      throw Error(ErrorKind::MalformedDocument, "bad reflection label");
    if (sref_[label].affine_node)
      throw Error(ErrorKind::MalformedDocument, "w[...] accepts finite reflections only");
    return sref_[label].elt;
  }

 private:
  Universe() = default;

  AffineElt frob_apply_raw(const FrobeniusAction& F, const AffineElt& w) const {
    // delta(t^a u) = t^{Pa} (P u P^{-1}), then conjugate by tau
    ZVec a = mat_apply(F.P, w.lam);
    ZMat m = mat_mul(mat_mul(F.P, W_.mat(w.u)), F.Pinv);
    auto id = W_.lookup(m);
    if (!id)
      throw Error(ErrorKind::FrobeniusNotBasePreserving, "conjugated element leaves the Weyl group");
    AffineElt d{std::move(a), *id};
    return mult(mult(F.tau, d), inv(F.tau));
  }

  void init_core() {
    W_ = FiniteWeylTable(rs_);
    // components of the root system via simple-root adjacency
    size_t k = rs_.nsimple();
    comp_of_simple_.assign(k, -1);
    ncomp_ = 0;
    for (size_t i = 0; i < k; ++i) {
      if (comp_of_simple_[i] >= 0) continue;
      std::queue<size_t> q;
      q.push(i);
      comp_of_simple_[i] = ncomp_;
      while (!q.empty()) {
        size_t cur = q.front();
        q.pop();
        for (size_t j = 0; j < k; ++j) {
          if (comp_of_simple_[j] >= 0) continue;
          if (zdot(rs_.simple_covec[cur], rs_.simple_fun[j]) != 0) {
            comp_of_simple_[j] = ncomp_;
            q.push(j);
          }
        }
      }
      ++ncomp_;
    }
    // affine simple reflections: per component the affine node first
    sref_.clear();
    sref_of_finite_.assign(k, -1);
    comp_srefs_.assign(ncomp_, {});
    for (int c = 0; c < ncomp_; ++c) {
      // highest root of the component: maximal expr among roots supported there
      int theta = -1;
      for (size_t r = 0; r < rs_.roots.size(); ++r) {
        if (!rs_.roots[r].positive) continue;
        bool in_comp = false, outside = false;
        for (size_t j = 0; j < k; ++j) {
          if (rs_.roots[r].expr[j] == 0) continue;
          if (comp_of_simple_[j] == c)
            in_comp = true;
          else
            outside = true;
        }
        if (!in_comp || outside) continue;
        if (theta < 0) {
          theta = (int)r;
          continue;
        }
        bool geq = true;
        for (size_t j = 0; j < k; ++j)
          if (rs_.roots[r].expr[j] < rs_.roots[theta].expr[j]) geq = false;
        if (geq) theta = (int)r;
      }
      if (theta < 0) throw Error(ErrorKind::InconsistentCartan, "component has no highest root");
      // s_theta matrix
      ZMat m = mat_identity(n_);
      for (size_t r = 0; r < n_; ++r)
        for (size_t cc = 0; cc < n_; ++cc)
          m[r][cc] -= rs_.roots[theta].covec[r] * rs_.roots[theta].fun[cc];
      auto sid = W_.lookup(m);
      if (!sid) throw Error(ErrorKind::InconsistentCartan, "missing highest-root reflection");
      AffSimple s0;
      s0.elt = AffineElt{rs_.roots[theta].covec, *sid};
      s0.comp = c;
      s0.affine_node = true;
      s0.finite_index = -1;
      comp_srefs_[c].push_back((int)sref_.size());
      sref_.push_back(s0);
      for (size_t j = 0; j < k; ++j) {
        if (comp_of_simple_[j] != c) continue;
        AffSimple s;
        s.elt = AffineElt{ZVec(n_, 0), W_.gen(j)};
        s.comp = c;
        s.affine_node = false;
        s.finite_index = (int)j;
        sref_of_finite_[j] = (int)sref_.size();
        comp_srefs_[c].push_back((int)sref_.size());
        sref_.push_back(s);
      }
    }
    for (auto& s : sref_)
      if (length(s.elt) != 1)
        throw Error(ErrorKind::InconsistentCartan, "affine simple reflection of length != 1");

    // coroot lattice HNF
    std::vector<ZVec> cg;
    for (size_t i = 0; i < k; ++i) cg.push_back(rs_.simple_covec[i]);
    coroot_hnf_ = hnf_from_generators(n_, cg);

    // central sublattice: integer kernel of the simple-root pairing matrix
    std::vector<ZVec> rows;
    for (size_t i = 0; i < k; ++i) rows.push_back(rs_.simple_fun[i]);
    central_ = integer_kernel(rows, n_);
    central_hnf_ = hnf_from_generators(n_, central_);

    // Omega coset representatives: for each finite part solve for length 0
    omega_reps_.clear();
    for (size_t u = 0; u < W_.size(); ++u) {
      std::vector<ZVec> A;
      ZVec b;
      int uinv = W_.inv((int)u);
      for (size_t i = 0; i < k; ++i) {
        A.push_back(rs_.simple_fun[i]);
        int si = -1;
        for (size_t r = 0; r < rs_.roots.size(); ++r)
          if (rs_.roots[r].fun == rs_.simple_fun[i]) si = (int)r;
        int pre = W_.root_image(uinv, si);
        b.push_back(rs_.roots[pre].positive ? 0 : 1);
      }
      auto sol = integer_solve(A, b, n_);
      if (!sol) continue;
      AffineElt t{hnf_residue_small(central_hnf_, *sol), (int)u};
      // candidate must genuinely stabilize the alcove: the residue shift is a
      // central translation, which never changes the length
      if (length(AffineElt{*sol, (int)u}) != 0) continue;
      omega_reps_.push_back(t);
    }
    if (omega_finite()) {
      // enumerate all of Omega: coset reps modulo nothing; sanity-check count
      std::sort(omega_reps_.begin(), omega_reps_.end(), [&](const AffineElt& a, const AffineElt& b) {
        return kappa0(a) < kappa0(b);
      });
      std::set<ZVec> kap;
      for (auto& t : omega_reps_) kap.insert(kappa0(t));
      if (kap.size() != omega_reps_.size())
        throw Error(ErrorKind::InconsistentCartan, "Omega enumeration has duplicate classes");
    } else {
      std::sort(omega_reps_.begin(), omega_reps_.end(), [&](const AffineElt& a, const AffineElt& b) {
        return canonical_less(a, b);
      });
    }
  }

  void init_ambient_frobenius() {
    const auto& spec = datum_.frob;
    size_t k = rs_.nsimple();
    std::vector<int> perm = spec.diagram_perm;
    if (perm.empty()) {
      perm.resize(sref_.size());
      for (size_t i = 0; i < perm.size(); ++i) perm[i] = (int)i;
    }
    if (perm.size() != sref_.size())
      throw Error(ErrorKind::FrobeniusNotBasePreserving, "diagram_perm has wrong size");
    // finite -> finite
    ZMat C(n_, ZVec(k, 0)), Cp(n_, ZVec(k, 0));
    for (size_t i = 0; i < k; ++i) {
      int src = sref_of_finite_[(int)i];
      int dst = perm[src];
      if (dst < 0 || (size_t)dst >= sref_.size() || sref_[dst].affine_node)
        throw Error(ErrorKind::FrobeniusNotBasePreserving,
                    "diagram_perm must map finite reflections to finite reflections");
      int j = sref_[dst].finite_index;
      for (size_t r = 0; r < n_; ++r) {
        C[r][i] = rs_.simple_covec[i][r];
        Cp[r][i] = rs_.simple_covec[j][r];
      }
    }
    // P . C = Cp; semisimple lattice => C has full column rank = n
    if (k != n_)
      throw Error(ErrorKind::Unsupported, "ambient group datum must be semisimple");
    auto Cinv = qmat_inverse(C);
    if (!Cinv) throw Error(ErrorKind::SingularBasis, "coroots do not span the lattice");
    ZMat P(n_, ZVec(n_, 0));
    for (size_t r = 0; r < n_; ++r)
      for (size_t c = 0; c < n_; ++c) {
        Rat s = 0;
        for (size_t t = 0; t < n_; ++t) s += Rat(Cp[r][t]) * (*Cinv)[t][c];
        if (boost::multiprecision::denominator(s) != 1)
          throw Error(ErrorKind::FrobeniusNotBasePreserving,
                      "diagram permutation does not preserve the lattice");
        P[r][c] = (long long)boost::multiprecision::numerator(s);
      }
    AffineElt tau = identity();
    if (spec.omega_twist) {
      const auto& om = omega_elements();
      int t = *spec.omega_twist;
      if (t < 0 || (size_t)t >= om.size())
        throw Error(ErrorKind::MalformedDocument, "omega_twist index out of range");
      tau = om[t];
    }
    auto F = make_frobenius(P, tau);
    // declared permutation must match the induced one
    for (size_t i = 0; i < sref_.size(); ++i)
      if (F.sperm[i] != perm[i])
        throw Error(ErrorKind::FrobeniusNotBasePreserving,
                    "diagram_perm does not match the induced action");
    ambient_frob_ = std::move(F);
  }

  GroupDatum datum_;
  size_t n_ = 0;
  RootSystem rs_;
  FiniteWeylTable W_;
  std::vector<AffSimple> sref_;
  std::vector<int> sref_of_finite_;
  std::vector<int> comp_of_simple_;
  std::vector<std::vector<int>> comp_srefs_;
  int ncomp_ = 0;
  Hnf coroot_hnf_;
  std::vector<ZVec> central_;
  Hnf central_hnf_;
  std::vector<AffineElt> omega_reps_;
  std::optional<FrobeniusAction> ambient_frob_;
};

}  // namespace adlvlab
