#pragma once

// Dual-side representation arithmetic: weight multiplicities by the
// Freudenthal recursion, branching to Levi subgroups by the alternating Weyl
// sum, the weight attached to a class, and the component count it predicts.
//
// On the dual side the roots are the coroot vectors of the universe and the
// weights live in the lattice itself, so dominance and the Weyl action are
// shared with the ambient machinery.

#include "adlvlab/sigmaconj.hpp"

#include <map>

namespace adlvlab {

struct WeightTable {
  ZVec highest;
  std::map<ZVec, Int> mult;        // every weight of the representation
  std::map<ZVec, Int> dominant;    // dominant weights only

  Int dim() const {
    Int s = 0;
    for (auto& [w, m] : mult) s += m;
    return s;
  }
};

class RepCalculator {
 public:
  explicit RepCalculator(std::shared_ptr<const Universe> U) : U_(std::move(U)) {
    const auto& rs = U_->roots();
    rho_hat_.assign(U_->rank(), Rat(0));
    for (int r : rs.positive_idx)
      for (size_t i = 0; i < U_->rank(); ++i) rho_hat_[i] += Rat(rs.roots[r].covec[i], 2);
  }

  const Universe& universe() const { return *U_; }
  const QVec& rho_hat() const { return rho_hat_; }

  // invariant form from the root functionals
  Rat form(const QVec& x, const QVec& y) const {
    const auto& rs = U_->roots();
    Rat s = 0;
    for (int r : rs.positive_idx) s += qdot(rs.roots[r].fun, x) * qdot(rs.roots[r].fun, y);
    return s;
  }

  const WeightTable& table(const ZVec& mu) {
    auto it = tables_.find(mu);
    if (it != tables_.end()) return it->second;
    return tables_.emplace(mu, build_table(mu)).first->second;
  }

  Int weight_multiplicity(const ZVec& mu, const ZVec& lam) {
    const auto& t = table(mu);
    auto it = t.mult.find(lam);
    return it == t.mult.end() ? Int(0) : it->second;
  }

  // Weyl dimension formula, used as an exact cross-check
  Int weyl_dimension(const ZVec& mu) const {
    const auto& rs = U_->roots();
    Rat num = 1, den = 1;
    QVec m = qvec_of(mu);
    for (int r : rs.positive_idx) {
      num *= qdot(rs.roots[r].fun, qvec_add(m, rho_hat_));
      den *= qdot(rs.roots[r].fun, rho_hat_);
    }
    Rat d = num / den;
    if (boost::multiprecision::denominator(d) != 1)
      throw Error(ErrorKind::CrossCheckMismatch, "Weyl dimension not integral");
    return boost::multiprecision::numerator(d);
  }

  // multiplicity of the Levi highest weight lam in the restriction of V_mu
  Int branching_multiplicity(const ZVec& mu, const ZVec& lam, const std::vector<int>& levi) {
    auto MU = levi_universe(levi);
    QVec rhoJ(U_->rank(), Rat(0));
    for (int r : MU->roots().positive_idx)
      for (size_t i = 0; i < U_->rank(); ++i) rhoJ[i] += Rat(MU->roots().roots[r].covec[i], 2);
    Int total = 0;
    QVec target = qvec_add(qvec_of(lam), rhoJ);
    for (size_t v = 0; v < MU->W().size(); ++v) {
      QVec img = qvec_sub(MU->W().apply_q((int)v, target), rhoJ);
      ZVec z(U_->rank());
      bool integral = true;
      for (size_t i = 0; i < U_->rank(); ++i) {
        if (boost::multiprecision::denominator(img[i]) != 1) {
          integral = false;
          break;
        }
        z[i] = (long long)boost::multiprecision::numerator(img[i]);
      }
      if (!integral) continue;
      Int m = weight_multiplicity(mu, z);
      if (MU->W().len((int)v) % 2 == 0)
        total += m;
      else
        total -= m;
    }
    if (total < 0)
      throw Error(ErrorKind::CrossCheckMismatch, "negative branching multiplicity");
    return total;
  }

  // --- the weight attached to a class, behind its calibration gate ----------

  struct LambdaB {
    ZVec residue;                 // canonical residue in the torsion-free quotient
    std::vector<ZVec> minimizers; // integral approximations of the Newton point
  };

  // Galois average: the rational realization of the torsion-free quotient
  QVec gamma_average(const FrobeniusAction& F, const QVec& x) const {
    QVec cur = x, acc = x;
    ZMat pw = F.L;
    int m = 1;
    while (pw != mat_identity(U_->rank())) {
      cur = mat_apply_q(F.L, cur);
      acc = qvec_add(acc, cur);
      pw = mat_mul(pw, F.L);
      ++m;
      if (m > 64) throw Error(ErrorKind::FrobeniusNotBasePreserving, "linear part of infinite order");
    }
    return qvec_scale(Rat(1, m), acc);
  }

  LambdaB lambda_b(const FrobeniusAction& F, const BClassInfo& b) {
    // Newton-centralizer Levi
    std::vector<int> levi;
    for (size_t i = 0; i < U_->roots().nsimple(); ++i)
      if (qdot(U_->roots().simple_fun[i], b.newton) == 0) levi.push_back((int)i);
    // the representative must normalize the Levi frame
    auto nk = newton_kottwitz(*U_, F, b.rep);
    if (nk.newton_raw != nk.newton)
      throw Error(ErrorKind::ConventionUnverified,
                  "class representative does not have a dominant Newton point");
    // The approximation is measured in the torsion-free quotient, realized
    // rationally by the Galois average. Build the averaged coset lattice.
    size_t n = U_->rank();
    long long m = 1;
    {
      ZMat pw = F.L;
      while (pw != mat_identity(n)) {
        pw = mat_mul(pw, F.L);
        ++m;
      }
    }
    std::vector<ZVec> gens;  // m * average of the Levi coroots
    for (int i : levi) {
      QVec a = gamma_average(F, qvec_of(U_->roots().simple_covec[i]));
      ZVec g(n);
      for (size_t t = 0; t < n; ++t) {
        Rat v = Rat(m) * a[t];
        if (boost::multiprecision::denominator(v) != 1)
          throw Error(ErrorKind::ConventionUnverified, "averaged coroot not in the expected lattice");
        g[t] = (long long)boost::multiprecision::numerator(v);
      }
      gens.push_back(g);
    }
    Hnf lat = hnf_from_generators(n, gens);  // independent basis of the averaged lattice (times m)
    QVec base_av = gamma_average(F, qvec_of(b.rep.lam));
    QVec target = qvec_sub(b.newton, base_av);

    std::vector<QVec> best_av;
    Rat best_norm;
    long long R = 2;
    size_t k = lat.cols.size();
    for (;; ++R) {
      best_av.clear();
      std::vector<std::vector<long long>> best_c;
      std::vector<long long> c(k, -R);
      while (true) {
        QVec x(n, Rat(0));
        for (size_t i = 0; i < k; ++i)
          for (size_t t = 0; t < n; ++t) x[t] += Rat(c[i]) * Rat(lat.cols[i][t], m);
        QVec diff = qvec_sub(x, target);
        Rat nn = form(diff, diff);
        if (best_av.empty() || nn < best_norm) {
          best_norm = nn;
          best_av.clear();
          best_c.clear();
        }
        if (nn == best_norm) {
          best_av.push_back(qvec_add(base_av, x));
          best_c.push_back(c);
        }
        size_t j = 0;
        while (j < c.size() && c[j] == R) c[j++] = -R;
        if (j == c.size()) break;
        ++c[j];
      }
      bool boundary_hit = false;
      for (auto& bc : best_c)
        for (auto ci : bc)
          if (ci == -R || ci == R) boundary_hit = true;
      if (k == 0 || !boundary_hit) break;
      if (R > 40)
        throw Error(ErrorKind::ConventionUnverified, "integral approximation search diverges");
    }

    // recover a lattice lift in the kappa_M coset for each minimizing average
    LambdaB out;
    std::vector<ZVec> avmat;  // rows: equations m * sum d_i av(coroot_i) = m * (x - base_av)
    for (size_t t = 0; t < n; ++t) {
      ZVec row(levi.size());
      for (size_t i = 0; i < levi.size(); ++i) row[i] = gens[i][t];
      avmat.push_back(row);
    }
    for (auto& x : best_av) {
      ZVec rhs(n);
      for (size_t t = 0; t < n; ++t) {
        Rat v = Rat(m) * (x[t] - base_av[t]);
        if (boost::multiprecision::denominator(v) != 1)
          throw Error(ErrorKind::ConventionUnverified, "non-integral average displacement");
        rhs[t] = (long long)boost::multiprecision::numerator(v);
      }
      auto d = integer_solve(avmat, rhs, levi.size());
      if (!d)
        throw Error(ErrorKind::ConventionUnverified, "average not realized by a lattice lift");
      ZVec lam = b.rep.lam;
      for (size_t i = 0; i < levi.size(); ++i)
        for (size_t t = 0; t < n; ++t) lam[t] += (*d)[i] * U_->roots().simple_covec[levi[i]][t];
      out.minimizers.push_back(lam);
    }
    out.residue = project_torsion_free(F, out.minimizers.front());
    for (auto& mm : out.minimizers) out.residue = std::min(out.residue, project_torsion_free(F, mm));
    return out;
  }

  // projection of the lattice onto the maximal torsion-free quotient of the
  // Frobenius coinvariants, as a canonical residue
  ZVec project_torsion_free(const FrobeniusAction& F, const ZVec& lam) {
    ensure_projection(F);
    return hnf_residue_small(proj_hnf_, lam);
  }

  Int chen_zhu_count(const FrobeniusAction& F, const ZVec& mu, const BClassInfo& b) {
    auto lb = lambda_b(F, b);
    const auto& t = table(mu);
    // counts must agree across all minimizer projections
    std::set<ZVec> residues;
    for (auto& m : lb.minimizers) residues.insert(project_torsion_free(F, m));
    Int count = -1;
    for (auto& r : residues) {
      Int c = 0;
      for (auto& [w, m] : t.mult)
        if (project_torsion_free(F, w) == r) c += m;
      if (count < 0)
        count = c;
      else if (count != c)
        throw Error(ErrorKind::ConventionUnverified,
                    "integral approximations of the Newton point give different counts");
    }
    if (count < 0) count = 0;
    return count;
  }

  std::shared_ptr<const Universe> levi_universe(const std::vector<int>& levi) {
    auto it = levis_.find(levi);
    if (it != levis_.end()) return it->second;
    auto MU = U_->levi(levi);
    levis_[levi] = MU;
    return MU;
  }

 private:
  WeightTable build_table(const ZVec& mu) {
    if (!U_->is_dominant_z(mu))
      throw Error(ErrorKind::MalformedDocument, "highest weight must be dominant");
    const auto& rs = U_->roots();
    // all mu - (nonneg combination of simple coroots), graded by height
    std::map<ZVec, char> cone;
    std::vector<ZVec> frontier{mu};
    cone[mu] = 1;
    while (!frontier.empty()) {
      ZVec cur = frontier.back();
      frontier.pop_back();
      for (size_t i = 0; i < rs.nsimple(); ++i) {
        ZVec nxt = zvec_sub(cur, rs.simple_covec[i]);
        // stay in the cone of weights below mu: the dominant conjugate must
        // still satisfy <dom(nxt), 2 rho-hat-dual> <= <mu, ...>; prune by the
        // exact criterion "dominant conjugate <= mu" lazily via norm bound
        QVec q = qvec_of(nxt);
        if (form(q, q) > form(qvec_of(mu), qvec_of(mu))) continue;  // W-invariant norm bound
        if (cone.count(nxt)) continue;
        cone[nxt] = 1;
        frontier.push_back(nxt);
      }
    }
    // dominant weights of V_mu among the cone, Freudenthal top-down
    std::vector<ZVec> dominants;
    for (auto& [w, _] : cone)
      if (U_->is_dominant_z(w)) dominants.push_back(w);
    std::sort(dominants.begin(), dominants.end(), [&](const ZVec& a, const ZVec& b) {
      long long ha = U_->two_rho_pairing_z(a), hb = U_->two_rho_pairing_z(b);
      if (ha != hb) return ha > hb;
      return a < b;
    });
    WeightTable t;
    t.highest = mu;
    QVec muq = qvec_of(mu);
    Rat c_mu = form(qvec_add(muq, rho_hat_), qvec_add(muq, rho_hat_));
    std::map<ZVec, Int> dom_mult;
    auto mult_of = [&](const ZVec& w) -> Int {
      auto [dom, u] = U_->dominant_rep(qvec_of(w));
      (void)u;
      ZVec dz(U_->rank());
      for (size_t i = 0; i < U_->rank(); ++i) dz[i] = (long long)boost::multiprecision::numerator(dom[i]);
      auto it = dom_mult.find(dz);
      return it == dom_mult.end() ? Int(0) : it->second;
    };
    for (auto& lam : dominants) {
      if (lam == mu) {
        dom_mult[lam] = 1;
        continue;
      }
      if (!U_->dominance_leq(qvec_of(lam), muq)) continue;  // not a weight of V_mu
      QVec lamq = qvec_of(lam);
      Rat denom = c_mu - form(qvec_add(lamq, rho_hat_), qvec_add(lamq, rho_hat_));
      if (denom == 0) continue;
      Rat num = 0;
      for (int r : rs.positive_idx) {
        QVec alpha = qvec_of(rs.roots[r].covec);
        for (long long k = 1;; ++k) {
          ZVec up = lam;
          for (size_t i = 0; i < U_->rank(); ++i) up[i] += k * rs.roots[r].covec[i];
          Int m = mult_of(up);
          if (m == 0) {
            // beyond the representation once outside the cone
            QVec upq = qvec_of(up);
            if (form(upq, upq) > form(muq, muq)) break;
            continue;
          }
          num += Rat(2) * Rat(m) * form(qvec_add(lamq, qvec_scale(Rat(k), alpha)), alpha);
        }
      }
      Rat m = num / denom;
      if (boost::multiprecision::denominator(m) != 1 || m < 0)
        throw Error(ErrorKind::CrossCheckMismatch, "Freudenthal multiplicity not a nonneg integer");
      Int mi = boost::multiprecision::numerator(m);
      if (mi > 0) dom_mult[lam] = mi;
    }
    t.dominant = dom_mult;
    // expand the Weyl orbits
    for (auto& [lam, m] : dom_mult) {
      for (size_t u = 0; u < U_->W().size(); ++u) {
        ZVec img = U_->W().apply((int)u, lam);
        t.mult[img] = m;
      }
    }
    // exact dimension cross-check
    if (t.dim() != weyl_dimension(mu))
      throw Error(ErrorKind::CrossCheckMismatch, "weight table fails the dimension formula");
    return t;
  }

  void ensure_projection(const FrobeniusAction& F) {
    if (proj_ready_ && proj_key_ == F.key) return;
    size_t n = U_->rank();
    ZMat oneminus = mat_sub(mat_identity(n), F.P);
    // annihilator of the column span, then its integer kernel = saturation
    ZMat T(n, ZVec(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) T[i][j] = oneminus[j][i];
    auto ann = integer_kernel(T, n);
    auto sat = integer_kernel(ann, n);
    proj_hnf_ = hnf_from_generators(n, sat);
    proj_ready_ = true;
    proj_key_ = F.key;
  }

  std::shared_ptr<const Universe> U_;
  QVec rho_hat_;
  std::map<ZVec, WeightTable> tables_;
  std::map<std::vector<int>, std::shared_ptr<const Universe>> levis_;
  bool proj_ready_ = false;
  std::string proj_key_;
  Hnf proj_hnf_;
};

}  // namespace adlvlab
