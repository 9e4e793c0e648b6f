#pragma once

// Root-datum foundation: based reduced root systems, the coweight lattice in
// a fixed Z-basis, dominance order, rho-pairings, and ingestion of
// group-datum files. Roots are stored as integer functionals on the lattice
// (rows), coroots as integer vectors (columns); one fixed basis everywhere.

#include "adlvlab/numeric.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace adlvlab {

using Json = nlohmann::ordered_json;

struct CartanType {
  char letter;  // A,B,C,D,E,F,G
  int rank;
};

inline CartanType parse_cartan_type(const std::string& s) {
  if (s.size() < 2) throw Error(ErrorKind::MalformedDocument, "bad type label: " + s);
  char L = s[0];
  int n = std::stoi(s.substr(1));
  auto bad = [&] { throw Error(ErrorKind::MalformedDocument, "unsupported type label: " + s); };
  switch (L) {
    case 'A': if (n < 1) bad(); break;
    case 'B': if (n < 2) bad(); break;
    case 'C': if (n < 2) bad(); break;
    case 'D': if (n < 3) bad(); break;
    case 'E': if (n < 6 || n > 8) bad(); break;
    case 'F': if (n != 4) bad(); break;
    case 'G': if (n != 2) bad(); break;
    default: bad();
  }
  return {L, n};
}

// Cartan matrix A with A[i][j] = <alpha_i^vee, alpha_j>, Bourbaki numbering.
inline ZMat cartan_matrix(const CartanType& t) {
  int n = t.rank;
  ZMat A(n, ZVec(n, 0));
  for (int i = 0; i < n; ++i) A[i][i] = 2;
  auto link = [&](int i, int j, long long aij, long long aji) {
    A[i][j] = aij;
    A[j][i] = aji;
  };
  auto chain = [&](int i, int j) { link(i, j, -1, -1); };
  switch (t.letter) {
    case 'A':
      for (int i = 0; i + 1 < n; ++i) chain(i, i + 1);
      break;
    case 'B':  // alpha_n short: <alpha_{n-1}^vee, alpha_n> = -1, <alpha_n^vee, alpha_{n-1}> = -2
      for (int i = 0; i + 1 < n; ++i) chain(i, i + 1);
      link(n - 2, n - 1, -1, -2);
      break;
    case 'C':  // alpha_n long
      for (int i = 0; i + 1 < n; ++i) chain(i, i + 1);
      link(n - 2, n - 1, -2, -1);
      break;
    case 'D':
      for (int i = 0; i + 2 < n; ++i) chain(i, i + 1);
      chain(n - 3, n - 1);
      break;
    case 'E':
      // Bourbaki: node 2 hangs off node 4 (1-indexed); 0-indexed: 1 off 3
      chain(0, 2);
      chain(2, 3);
      chain(1, 3);
      for (int i = 3; i + 1 < n; ++i) chain(i, i + 1);
      break;
    case 'F':
      chain(0, 1);
      link(1, 2, -2, -1);
      chain(2, 3);
      break;
    case 'G':
      link(0, 1, -1, -3);
      break;
  }
  return A;
}

struct Root {
  ZVec fun;    // functional row: <lambda, alpha> = zdot(lambda coords... ) via fun
  ZVec covec;  // coroot vector in lattice coordinates
  ZVec expr;   // expression of the root in the simple roots
  bool positive = false;
};

// Closure of a based root system given the simple roots (functionals) and
// simple coroots (vectors), all in the fixed lattice basis.
struct RootSystem {
  size_t dim = 0;                   // lattice rank
  std::vector<ZVec> simple_fun;     // simple root functionals
  std::vector<ZVec> simple_covec;   // simple coroot vectors
  std::vector<Root> roots;          // all roots, deduped
  std::vector<int> positive_idx;    // indices of positive roots
  std::map<ZVec, int> index_of_fun;

  size_t nsimple() const { return simple_fun.size(); }

  int find(const ZVec& fun) const {
    auto it = index_of_fun.find(fun);
    return it == index_of_fun.end() ? -1 : it->second;
  }

  static RootSystem generate(size_t dim, std::vector<ZVec> sfun, std::vector<ZVec> scovec) {
    RootSystem rs;
    rs.dim = dim;
    rs.simple_fun = std::move(sfun);
    rs.simple_covec = std::move(scovec);
    size_t k = rs.simple_fun.size();
    std::vector<Root> frontier;
    for (size_t i = 0; i < k; ++i) {
      Root r;
      r.fun = rs.simple_fun[i];
      r.covec = rs.simple_covec[i];
      r.expr = ZVec(k, 0);
      r.expr[i] = 1;
      frontier.push_back(r);
    }
    for (auto& r : frontier) {
      rs.index_of_fun[r.fun] = (int)rs.roots.size();
      rs.roots.push_back(r);
    }
    size_t head = 0;
    while (head < rs.roots.size()) {
      Root cur = rs.roots[head++];
      for (size_t i = 0; i < k; ++i) {
        long long c = zdot(rs.simple_covec[i], cur.fun);  // <alpha_i^vee, beta>
        if (c == 0 && cur.fun == rs.simple_fun[i]) continue;
        Root img;
        img.fun = cur.fun;
        img.expr = cur.expr;
        for (size_t t = 0; t < rs.dim; ++t) img.fun[t] -= c * rs.simple_fun[i][t];
        img.expr[i] -= c;
        long long cc = zdot(cur.covec, rs.simple_fun[i]);  // <beta^vee, alpha_i>
        img.covec = cur.covec;
        for (size_t t = 0; t < rs.dim; ++t) img.covec[t] -= cc * rs.simple_covec[i][t];
        if (rs.index_of_fun.count(img.fun)) continue;
        rs.index_of_fun[img.fun] = (int)rs.roots.size();
        rs.roots.push_back(img);
        if (rs.roots.size() > 5000)
          throw Error(ErrorKind::InconsistentCartan, "root closure does not terminate");
      }
    }
    for (size_t idx = 0; idx < rs.roots.size(); ++idx) {
      auto& r = rs.roots[idx];
      bool pos = true, neg = true;
      for (auto e : r.expr) {
        if (e > 0) neg = false;
        if (e < 0) pos = false;
      }
      if (pos == neg) throw Error(ErrorKind::InconsistentCartan, "mixed-sign root");
      r.positive = pos;
      if (pos) rs.positive_idx.push_back((int)idx);
    }
    return rs;
  }
};

struct FrobeniusSpec {
  std::vector<int> diagram_perm;  // permutation of affine simple-reflection indices
  std::optional<int> omega_twist; // index into the canonical enumeration of Omega
};

struct ComponentSpec {
  CartanType type;
  std::string lattice;  // "adjoint" | "simply_connected" | "explicit"
  ZMat basis;           // for explicit: columns = basis of the lattice in the coweight frame
};

// A validated group datum: product root system, lattice, Frobenius spec.
struct GroupDatum {
  std::string name;
  std::vector<ComponentSpec> components;
  size_t rank = 0;  // lattice rank
  RootSystem rs;
  // per component: [first_simple, last_simple) in global simple numbering,
  // plus the coordinate block [coord_begin, coord_end)
  struct Block {
    size_t simple_begin, simple_end;
    size_t coord_begin, coord_end;
  };
  std::vector<Block> blocks;
  FrobeniusSpec frob;
  std::string content_fingerprint;  // bytes the datum was loaded from

  size_t nsimple() const { return rs.nsimple(); }

  int component_of_simple(size_t i) const {
    for (size_t c = 0; c < blocks.size(); ++c)
      if (i >= blocks[c].simple_begin && i < blocks[c].simple_end) return (int)c;
    return -1;
  }
};

namespace detail {

// assemble one component in its own coordinate block (coweight frame),
// returning root functionals / coroot vectors in the component lattice basis
struct ComponentData {
  size_t dim;
  std::vector<ZVec> sfun, scovec;
};

inline ComponentData build_component(const ComponentSpec& cs) {
  ZMat A = cartan_matrix(cs.type);
  size_t n = A.size();
  // coweight frame: root_j = e_j functional, coroot_i = row i of A
  std::vector<ZVec> sfun_cw(n, ZVec(n, 0)), scovec_cw(n, ZVec(n, 0));
  for (size_t j = 0; j < n; ++j) sfun_cw[j][j] = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) scovec_cw[i][j] = A[i][j];

  ZMat B;
  if (cs.lattice == "adjoint") {
    B = mat_identity(n);
  } else if (cs.lattice == "simply_connected") {
    // basis = simple coroots (columns)
    B = ZMat(n, ZVec(n, 0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) B[i][j] = scovec_cw[j][i];
  } else if (cs.lattice == "explicit") {
    B = cs.basis;
    if (B.size() != n) throw Error(ErrorKind::MalformedDocument, "explicit basis has wrong size");
  } else {
    throw Error(ErrorKind::MalformedDocument, "unknown lattice tag: " + cs.lattice);
  }
  ComponentData out;
  out.dim = n;
  out.sfun.resize(n);
  out.scovec.resize(n);
  for (size_t j = 0; j < n; ++j) {
    // functional in new frame: row . B
    ZVec f(n, 0);
    for (size_t c = 0; c < n; ++c)
      for (size_t r = 0; r < n; ++r) f[c] += sfun_cw[j][r] * B[r][c];
    out.sfun[j] = f;
  }
  for (size_t i = 0; i < n; ++i) {
    // coroot vector in new frame: solve B x = covec, must be integral
    std::vector<std::vector<Rat>> Bq(n, std::vector<Rat>(n));
    for (size_t r = 0; r < n; ++r)
      for (size_t c = 0; c < n; ++c) Bq[r][c] = Rat(B[r][c]);
    std::vector<Rat> rhs(n);
    for (size_t r = 0; r < n; ++r) rhs[r] = Rat(scovec_cw[i][r]);
    auto x = qmat_solve(Bq, rhs);
    if (!x) throw Error(ErrorKind::LatticeNotBetweenQandP, "coroot lattice not contained in lattice");
    ZVec v(n);
    for (size_t r = 0; r < n; ++r) {
      if (boost::multiprecision::denominator((*x)[r]) != 1)
        throw Error(ErrorKind::LatticeNotBetweenQandP, "coroot lattice not contained in lattice");
      v[r] = (long long)boost::multiprecision::numerator((*x)[r]);
    }
    out.scovec[i] = v;
  }
  return out;
}

}  // namespace detail

// Build the GroupDatum from parsed component specs + frobenius, validating
// the Cartan pairings.
inline GroupDatum assemble_group(std::string name, std::vector<ComponentSpec> comps,
                                 FrobeniusSpec frob, std::string fingerprint) {
  if (comps.empty()) throw Error(ErrorKind::MalformedDocument, "no components");
  GroupDatum g;
  g.name = std::move(name);
  g.components = std::move(comps);
  g.frob = std::move(frob);
  g.content_fingerprint = std::move(fingerprint);

  std::vector<detail::ComponentData> data;
  size_t total = 0, nsimple = 0;
  for (auto& c : g.components) {
    data.push_back(detail::build_component(c));
    total += data.back().dim;
    nsimple += data.back().dim;
  }
  g.rank = total;
  std::vector<ZVec> sfun(nsimple, ZVec(total, 0)), scovec(nsimple, ZVec(total, 0));
  size_t coff = 0, soff = 0;
  for (size_t c = 0; c < data.size(); ++c) {
    auto& d = data[c];
    GroupDatum::Block b;
    b.simple_begin = soff;
    b.simple_end = soff + d.dim;
    b.coord_begin = coff;
    b.coord_end = coff + d.dim;
    g.blocks.push_back(b);
    for (size_t j = 0; j < d.dim; ++j)
      for (size_t t = 0; t < d.dim; ++t) {
        sfun[soff + j][coff + t] = d.sfun[j][t];
        scovec[soff + j][coff + t] = d.scovec[j][t];
      }
    coff += d.dim;
    soff += d.dim;
  }
  // validate Cartan pairings
  for (size_t i = 0; i < nsimple; ++i)
    for (size_t j = 0; j < nsimple; ++j) {
      long long expect;
      int ci = -1, cj = -1;
      size_t li = 0, lj = 0;
      for (size_t c = 0, s = 0; c < g.components.size(); ++c) {
        size_t d = data[c].dim;
        if (i >= s && i < s + d) { ci = (int)c; li = i - s; }
        if (j >= s && j < s + d) { cj = (int)c; lj = j - s; }
        s += d;
      }
      if (ci != cj)
        expect = 0;
      else
        expect = cartan_matrix(g.components[ci].type)[li][lj];
      if (zdot(scovec[i], sfun[j]) != expect)
        throw Error(ErrorKind::InconsistentCartan, "pairing table does not match the Cartan matrix");
    }
  g.rs = RootSystem::generate(total, sfun, scovec);
  return g;
}

inline GroupDatum load_group_json(const Json& j, const std::string& raw) {
  if (!j.is_object() || !j.contains("components"))
    throw Error(ErrorKind::MalformedDocument, "group datum must be an object with components");
  std::string name = j.value("name", std::string("unnamed"));
  std::vector<ComponentSpec> comps;
  for (auto& cj : j.at("components")) {
    ComponentSpec cs;
    cs.type = parse_cartan_type(cj.at("type").get<std::string>());
    const auto& lat = cj.at("lattice");
    if (lat.is_string()) {
      cs.lattice = lat.get<std::string>();
    } else if (lat.is_object() && lat.contains("basis")) {
      cs.lattice = "explicit";
      for (auto& row : lat.at("basis")) cs.basis.push_back(row.get<ZVec>());
    } else {
      throw Error(ErrorKind::MalformedDocument, "bad lattice field");
    }
    comps.push_back(std::move(cs));
  }
  FrobeniusSpec fs;
  if (j.contains("frobenius") && !j.at("frobenius").is_null()) {
    const auto& fj = j.at("frobenius");
    if (fj.contains("diagram_perm") && !fj.at("diagram_perm").is_null())
      fs.diagram_perm = fj.at("diagram_perm").get<std::vector<int>>();
    if (fj.contains("omega_twist") && !fj.at("omega_twist").is_null())
      fs.omega_twist = fj.at("omega_twist").get<int>();
  }
  return assemble_group(name, std::move(comps), std::move(fs), raw);
}

inline GroupDatum load_group_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedDocument, "cannot open group file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string raw = ss.str();
  Json j;
  try {
    j = Json::parse(raw);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::MalformedDocument, std::string("group file is not valid JSON: ") + e.what());
  }
  return load_group_json(j, raw);
}

}  // namespace adlvlab
