#pragma once

// Parahoric combinatorics for a Frobenius-twisted pair: the relative local
// Dynkin diagram, the d-invariants, special and very special vertices,
// volumes and log-volumes, and the maximal-volume equivalence checker.

#include "adlvlab/classpoly.hpp"

#include <set>

namespace adlvlab {

struct RelativeVertex {
  std::vector<int> orbit;  // affine simple reflection indices, sorted
  AffineElt s_v;           // longest element of the finite subgroup of the orbit
  long long d = 0;         // its length
  int comp = -1;           // connected component of the relative diagram
};

struct RelativeDiagram {
  std::vector<RelativeVertex> vertices;
  std::vector<std::vector<char>> adjacent;
  int ncomp = 0;
};

inline RelativeDiagram relative_diagram(const Universe& U, const FrobeniusAction& F) {
  RelativeDiagram D;
  std::vector<char> seen(U.nsref(), 0);
  for (size_t i = 0; i < U.nsref(); ++i) {
    if (seen[i]) continue;
    std::vector<int> orbit;
    int cur = (int)i;
    do {
      orbit.push_back(cur);
      seen[cur] = 1;
      cur = F.sperm[cur];
    } while (cur != (int)i);
    std::sort(orbit.begin(), orbit.end());
    if (!U.finite_type(orbit)) continue;  // vertex exists only when the subgroup is finite
    auto elems = U.subgroup_elements(orbit);
    RelativeVertex v;
    v.orbit = orbit;
    long long best = -1;
    int nbest = 0;
    for (auto& e : elems) {
      long long l = U.length(e);
      if (l > best) {
        best = l;
        v.s_v = e;
        nbest = 1;
      } else if (l == best) {
        ++nbest;
      }
    }
    if (nbest != 1)
      throw Error(ErrorKind::InconsistentCartan, "longest element of orbit subgroup not unique");
    v.d = best;
    D.vertices.push_back(std::move(v));
  }
  std::sort(D.vertices.begin(), D.vertices.end(),
            [](const RelativeVertex& a, const RelativeVertex& b) { return a.orbit < b.orbit; });
  size_t n = D.vertices.size();
  D.adjacent.assign(n, std::vector<char>(n, 0));
  for (size_t a = 0; a < n; ++a)
    for (size_t b = a + 1; b < n; ++b) {
      AffineElt ab = U.mult(D.vertices[a].s_v, D.vertices[b].s_v);
      AffineElt ba = U.mult(D.vertices[b].s_v, D.vertices[a].s_v);
      if (!(ab == ba)) D.adjacent[a][b] = D.adjacent[b][a] = 1;
    }
  // connected components
  for (auto& v : D.vertices) v.comp = -1;
  for (size_t a = 0; a < n; ++a) {
    if (D.vertices[a].comp >= 0) continue;
    std::vector<size_t> stack{a};
    D.vertices[a].comp = D.ncomp;
    while (!stack.empty()) {
      size_t cur = stack.back();
      stack.pop_back();
      for (size_t b = 0; b < n; ++b)
        if (D.adjacent[cur][b] && D.vertices[b].comp < 0) {
          D.vertices[b].comp = D.ncomp;
          stack.push_back(b);
        }
    }
    ++D.ncomp;
  }
  return D;
}

struct VertexFlags {
  bool special = false;
  bool very_special = false;
};

inline std::vector<VertexFlags> vertex_flags(const Universe& U, const RelativeDiagram& D) {
  size_t n = D.vertices.size();
  // order of the matrix group generated by the linear parts of a vertex set
  auto group_order = [&](const std::vector<int>& verts) {
    std::set<std::vector<long long>> elems;
    auto flat = [&](const ZMat& m) {
      std::vector<long long> f;
      for (auto& r : m) f.insert(f.end(), r.begin(), r.end());
      return f;
    };
    std::vector<ZMat> gens;
    for (int v : verts) gens.push_back(U.W().mat(D.vertices[v].s_v.u));
    std::vector<ZMat> frontier{mat_identity(U.rank())};
    elems.insert(flat(frontier[0]));
    while (!frontier.empty()) {
      ZMat cur = frontier.back();
      frontier.pop_back();
      for (auto& g : gens) {
        ZMat nxt = mat_mul(cur, g);
        if (elems.insert(flat(nxt)).second) frontier.push_back(nxt);
        if (elems.size() > 100000)
          throw Error(ErrorKind::InfiniteType, "relative Weyl closure exceeds cap");
      }
    }
    return elems.size();
  };

  std::vector<VertexFlags> flags(n);
  for (int c = 0;; ++c) {
    std::vector<int> comp;
    for (size_t v = 0; v < n; ++v)
      if (D.vertices[v].comp == c) comp.push_back((int)v);
    if (comp.empty()) break;
    size_t full = group_order(comp);
    for (int v : comp) {
      std::vector<int> others;
      for (int w : comp)
        if (w != v) others.push_back(w);
      flags[v].special = group_order(others) == full;
    }
    long long dmin = -1;
    for (int v : comp)
      if (flags[v].special && (dmin < 0 || D.vertices[v].d < dmin)) dmin = D.vertices[v].d;
    for (int v : comp) flags[v].very_special = flags[v].special && D.vertices[v].d == dmin;
  }
  return flags;
}

struct VolumeData {
  std::vector<Int> vol_coeffs;  // vol = sum of q^l over fixed elements; coeffs by l
  long long logvol = 0;         // length of the longest element of the full subgroup

  Int eval(const Int& q) const {
    Int pw = 1, s = 0;
    for (auto& c : vol_coeffs) {
      s += c * pw;
      pw *= q;
    }
    return s;
  }
};

inline VolumeData volume_and_logvolume(const Universe& U, const FrobeniusAction& Fb,
                                       const std::vector<int>& K) {
  if (!U.finite_type(K)) throw Error(ErrorKind::InfiniteType, "parahoric subset not finite type");
  for (int i : K)
    if (std::find(K.begin(), K.end(), Fb.sperm[i]) == K.end())
      throw Error(ErrorKind::InfiniteType, "parahoric subset not Frobenius-stable");
  auto elems = U.subgroup_elements(K);
  VolumeData out;
  for (auto& e : elems) {
    long long l = U.length(e);
    out.logvol = std::max(out.logvol, l);
    if (U.frobenius_apply(Fb, e) == e) {
      if ((long long)out.vol_coeffs.size() <= l) out.vol_coeffs.resize(l + 1, Int(0));
      out.vol_coeffs[l] += 1;
    }
  }
  return out;
}

// The adopted reading of the very-special condition: after removing the
// vertices contained in K, exactly one vertex remains per diagram component
// and it is very special.
inline bool is_very_special_parahoric(const Universe& U, const FrobeniusAction& Fb,
                                      const std::vector<int>& K) {
  if (!U.finite_type(K)) return false;
  std::vector<char> in(U.nsref(), 0);
  for (int i : K) {
    if (i < 0 || (size_t)i >= U.nsref()) return false;
    in[i] = 1;
  }
  for (int i : K)
    if (!in[Fb.sperm[i]]) return false;  // not stable
  RelativeDiagram D = relative_diagram(U, Fb);
  auto flags = vertex_flags(U, D);
  // K must be a union of vertex orbits
  std::vector<char> covered(U.nsref(), 0);
  std::vector<char> vertex_in_K(D.vertices.size(), 0);
  for (size_t v = 0; v < D.vertices.size(); ++v) {
    bool all = true, any = false;
    for (int i : D.vertices[v].orbit) {
      if (in[i]) any = true; else all = false;
      covered[i] = 1;
    }
    if (any && !all) return false;
    vertex_in_K[v] = all && any ? 1 : (all && D.vertices[v].orbit.empty() ? 1 : (all ? 1 : 0));
    vertex_in_K[v] = (char)(any && all);
  }
  for (size_t i = 0; i < U.nsref(); ++i)
    if (in[i] && !covered[i]) return false;  // touches an infinite orbit
  for (int c = 0; c < D.ncomp; ++c) {
    int remaining = 0;
    bool vs = false;
    for (size_t v = 0; v < D.vertices.size(); ++v) {
      if (D.vertices[v].comp != c) continue;
      if (!vertex_in_K[v]) {
        ++remaining;
        vs = flags[v].very_special;
      }
    }
    if (remaining != 1 || !vs) return false;
  }
  return true;
}

struct Prop36Row {
  std::vector<int> K;
  VolumeData vol;
  bool very_special = false;
  std::vector<char> argmax_at_q;  // one flag per tested q
  bool argmax_logvol = false;
};

struct Prop36Report {
  std::vector<Int> q_values;
  std::vector<Prop36Row> rows;
  bool equivalence_holds = false;
};

// Enumerates the Frobenius-stable orbit-union finite-type subsets and checks
// {very special} = argmax vol(q) = argmax logvol.
inline Prop36Report verify_prop36(const Universe& U, const FrobeniusAction& Fb,
                                  const std::vector<Int>& q_values) {
  RelativeDiagram D = relative_diagram(U, Fb);
  size_t nv = D.vertices.size();
  if (nv > 20) throw Error(ErrorKind::SearchBudgetExceeded, "relative diagram too large");
  Prop36Report rep;
  rep.q_values = q_values;
  for (size_t mask = 0; mask < (size_t(1) << nv); ++mask) {
    std::vector<int> K;
    for (size_t v = 0; v < nv; ++v)
      if (mask & (size_t(1) << v))
        K.insert(K.end(), D.vertices[v].orbit.begin(), D.vertices[v].orbit.end());
    std::sort(K.begin(), K.end());
    if (!U.finite_type(K)) continue;
    Prop36Row row;
    row.K = K;
    row.vol = volume_and_logvolume(U, Fb, K);
    row.very_special = is_very_special_parahoric(U, Fb, K);
    rep.rows.push_back(std::move(row));
  }
  // argmax sets
  for (size_t qi = 0; qi < q_values.size(); ++qi) {
    Int best = -1;
    for (auto& r : rep.rows) best = std::max(best, r.vol.eval(q_values[qi]));
    for (auto& r : rep.rows) {
      r.argmax_at_q.resize(q_values.size(), 0);
      r.argmax_at_q[qi] = r.vol.eval(q_values[qi]) == best;
    }
  }
  long long best_log = -1;
  for (auto& r : rep.rows) best_log = std::max(best_log, r.vol.logvol);
  for (auto& r : rep.rows) r.argmax_logvol = r.vol.logvol == best_log;
  rep.equivalence_holds = true;
  for (auto& r : rep.rows) {
    for (size_t qi = 0; qi < q_values.size(); ++qi)
      if ((bool)r.argmax_at_q[qi] != r.very_special) rep.equivalence_holds = false;
    if (r.argmax_logvol != r.very_special) rep.equivalence_holds = false;
  }
  return rep;
}

}  // namespace adlvlab
