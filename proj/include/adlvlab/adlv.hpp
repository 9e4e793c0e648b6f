#pragma once

// Invariants of the varieties attached to (mu, b) and the theorem checkers:
// nonemptiness, dimension, defect, top-component orbits and stabilizers via
// the Iwahori-level pipeline and Levi reduction, the very-special check over
// all stabilizers, and the volume identity for basic classes.

#include "adlvlab/parahoric.hpp"
#include "adlvlab/repcalc.hpp"

namespace adlvlab {

struct StabilizerReport {
  std::vector<int> levi;   // ambient simple roots cutting the frame; empty = ambient
  std::vector<int> K;      // affine simple reflections of the frame universe
  std::string frame_twist; // tau with sigma_b = Ad(tau) o sigma, frame coordinates
  bool very_special = false;
  long long logvol = 0;
};

struct QCheckReport {
  bool applicable = false;
  std::vector<Int> q_values;
  std::vector<Rat> Q;
  std::vector<Int> vol_max;
  bool identity_holds = false;
};

struct AdlvReport {
  ZVec mu;
  std::string b_key;
  QVec b_newton;
  ZVec b_kappa;
  bool b_basic = false;
  bool nonempty = false;
  std::optional<long long> dim;
  long long orbit_count = 0;
  Int chen_zhu = 0;
  std::vector<StabilizerReport> stabilizers;
  bool all_very_special = false;
  QCheckReport q_check;
};

struct LeviDatum {
  std::vector<int> levi_simple_roots;
  ZVec lambda;
  Int branching_mult;
};

struct LeviTargets {
  bool basic_input = false;
  std::vector<LeviDatum> targets;
};

class AdlvPipeline {
 public:
  AdlvPipeline(std::shared_ptr<const Universe> U, FrobeniusAction F, Strategy strat = {},
               std::string cache_dir = {}, long long budget_cap = 2'000'000)
      : U_(std::move(U)),
        F_(std::move(F)),
        rep_(U_),
        engine_(U_, F_, strat, cache_dir, budget_cap),
        strat_(strat),
        cache_dir_(std::move(cache_dir)),
        budget_cap_(budget_cap) {}

  const Universe& universe() const { return *U_; }
  const FrobeniusAction& frobenius() const { return F_; }
  ClassPolyEngine& engine() { return engine_; }
  RepCalculator& repcalc() { return rep_; }

  std::vector<BClassInfo> classes_below(const ZVec& mu) {
    Budget budget{budget_cap_};
    return enumerate_b_g_mu(*U_, F_, mu, budget);
  }

  std::optional<BClassInfo> find_class(const ZVec& mu, const QVec& newton, const ZVec& kappa) {
    for (auto& b : classes_below(mu))
      if (b.newton == newton && b.kappa == kappa) return b;
    return std::nullopt;
  }

  // def = rank drop between the fixed spaces of the plain and twisted actions
  long long defect(const BClassInfo& b) const {
    auto fixdim = [&](const ZMat& m) {
      size_t n = U_->rank();
      std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n));
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a[i][j] = Rat(m[i][j]) - Rat(i == j ? 1 : 0);
      return (long long)n - (long long)qmat_rank(a);
    };
    ZMat twisted = mat_mul(U_->W().mat(b.rep.u), F_.L);
    return fixdim(F_.L) - fixdim(twisted);
  }

  std::pair<bool, std::optional<long long>> nonempty_and_dimension(const ZVec& mu,
                                                                   const BClassInfo& b) {
    auto found = find_class(mu, b.newton, b.kappa);
    if (!found) return {false, std::nullopt};
    return {true, closed_dimension(mu, b)};
  }

  long long closed_dimension(const ZVec& mu, const BClassInfo& b) const {
    Rat val = U_->rho_pairing(qvec_sub(qvec_of(mu), b.newton)) - Rat(defect(b), 2);
    if (boost::multiprecision::denominator(val) != 1 || val < 0)
      throw Error(ErrorKind::ParityViolation, "dimension formula not a nonnegative integer");
    return (long long)boost::multiprecision::numerator(val);
  }

  LeviTargets levi_targets(const ZVec& mu, const BClassInfo& b) {
    LeviTargets out;
    if (is_central(*U_, b.newton)) {
      out.basic_input = true;
      return out;
    }
    std::vector<int> levi = newton_levi(b);
    auto MU = rep_.levi_universe(levi);
    FrobeniusAction FM = levi_frobenius(*MU);
    AffineElt tauM = levi_basic_rep(*MU, FM, b);
    ZVec kappaM = MU->kappa(FM, tauM);
    const auto& table = rep_.table(mu);
    for (auto& [lam, m] : table.mult) {
      (void)m;
      if (!MU->is_dominant_z(lam)) continue;
      if (MU->kappa(FM, MU->translation(lam)) != kappaM) continue;
      Int a = rep_.branching_multiplicity(mu, lam, levi);
      if (a == 0) continue;
      if (!MU->dominance_leq(b.newton, mu_diamond(*MU, FM, lam))) continue;  // empty in the Levi
      out.targets.push_back(LeviDatum{levi, lam, a});
    }
    std::sort(out.targets.begin(), out.targets.end(),
              [](const LeviDatum& a, const LeviDatum& b) { return a.lambda < b.lambda; });
    return out;
  }

  AdlvReport top_components(const ZVec& mu, const BClassInfo& b) {
    AdlvReport rep;
    rep.mu = mu;
    rep.b_key = b.key;
    rep.b_newton = b.newton;
    rep.b_kappa = b.kappa;
    rep.b_basic = b.basic;
    auto [nonempty, dim] = nonempty_and_dimension(mu, b);
    rep.nonempty = nonempty;
    if (!nonempty) return rep;
    rep.dim = dim;
    rep.chen_zhu = rep_.chen_zhu_count(F_, mu, b);

    if (b.basic) {
      run_basic(rep, mu, b);
    } else {
      run_levi(rep, mu, b);
    }
    rep.all_very_special = !rep.stabilizers.empty();
    for (auto& s : rep.stabilizers)
      if (!s.very_special) rep.all_very_special = false;
    return rep;
  }

  std::vector<AdlvReport> verify_theorem_a(const ZVec& mu) {
    std::vector<AdlvReport> out;
    for (auto& b : classes_below(mu)) out.push_back(top_components(mu, b));
    return out;
  }

  QCheckReport q_invariant(const ZVec& mu, const BClassInfo& b, const std::vector<Int>& qs) {
    if (!b.basic) throw Error(ErrorKind::Unsupported, "the volume identity applies to basic classes");
    AdlvReport rep;
    rep.mu = mu;
    auto [nonempty, dim] = nonempty_and_dimension(mu, b);
    if (!nonempty) throw Error(ErrorKind::Unsupported, "class not below mu");
    rep.dim = dim;
    run_basic(rep, mu, b);
    return rep.q_check.applicable ? rep.q_check : throw Error(ErrorKind::IdentityViolation, "no q data");
  }

  void flush_cache() {
    engine_.flush_cache();
    for (auto& [k, l] : levis_) l.engine->flush_cache();
  }

  std::vector<Int> default_qs() const { return {Int(2), Int(3), Int(5)}; }

 private:
  struct LeviCtx {
    std::shared_ptr<const Universe> MU;
    FrobeniusAction FM;
    std::unique_ptr<ClassPolyEngine> engine;
    std::unique_ptr<RepCalculator> rep;
  };

  std::vector<int> newton_levi(const BClassInfo& b) const {
    std::vector<int> levi;
    for (size_t i = 0; i < U_->roots().nsimple(); ++i)
      if (qdot(U_->roots().simple_fun[i], b.newton) == 0) levi.push_back((int)i);
    return levi;
  }

  FrobeniusAction levi_frobenius(const Universe& MU) const {
    if (!(F_.tau == U_->identity()))
      throw Error(ErrorKind::Unsupported, "Levi reduction requires an untwisted ambient Frobenius");
    return MU.make_frobenius(F_.P, MU.identity());
  }

  LeviCtx& levi_ctx(const std::vector<int>& levi) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = levis_.find(levi);
    if (it != levis_.end()) return it->second;
    LeviCtx ctx;
    ctx.MU = rep_.levi_universe(levi);
    ctx.FM = levi_frobenius(*ctx.MU);
    ctx.engine = std::make_unique<ClassPolyEngine>(ctx.MU, ctx.FM, strat_, cache_dir_, budget_cap_);
    ctx.rep = std::make_unique<RepCalculator>(ctx.MU);
    return levis_.emplace(levi, std::move(ctx)).first->second;
  }

  // the basic representative of b inside its Newton-centralizer Levi
  AffineElt levi_basic_rep(const Universe& MU, const FrobeniusAction& FM, const BClassInfo& b) const {
    auto uid = MU.W().lookup(U_->W().mat(b.rep.u));
    if (!uid)
      throw Error(ErrorKind::CrossCheckMismatch,
                  "class representative does not lie in the Newton-centralizer Levi");
    AffineElt wM{b.rep.lam, *uid};
    AffineElt tauM = MU.omega_part(wM);
    auto nk = newton_kottwitz(MU, FM, tauM);
    if (nk.newton != b.newton)
      throw Error(ErrorKind::CrossCheckMismatch, "Levi transfer changed the Newton point");
    return tauM;
  }

  void run_basic(AdlvReport& rep, const ZVec& mu, const BClassInfo& b) {
    AffineElt w = U_->mult(U_->finite_elt(U_->finite_w0()), U_->translation(mu));
    TICElement tic = engine_.sigma_top(w, b.newton, b.kappa);
    if (!tic.present)
      throw Error(ErrorKind::CrossCheckMismatch, "pipeline found no components for a class below mu");
    long long lw0 = U_->W().len(U_->finite_w0());
    long long dim_pipeline = tic.dim - lw0;
    if (dim_pipeline != *rep.dim)
      throw Error(ErrorKind::CrossCheckMismatch,
                  "pipeline dimension disagrees with the closed formula");
    rep.orbit_count = tic.orbit_count();
    // stabilizers and the volume identity
    rep.q_check.applicable = true;
    rep.q_check.q_values = default_qs();
    std::vector<VolumeData> vols;
    for (auto& orb : tic.orbits) {
      if (!orb.stabilizer)
        throw Error(ErrorKind::CrossCheckMismatch, "basic class produced a deferred stabilizer");
      FrobeniusAction Fb = U_->make_twisted(F_, orb.stabilizer->frame_twist);
      StabilizerReport s;
      s.K = orb.stabilizer->K;
      s.frame_twist = U_->print(orb.stabilizer->frame_twist);
      s.very_special = is_very_special_parahoric(*U_, Fb, s.K);
      VolumeData v = volume_and_logvolume(*U_, Fb, s.K);
      s.logvol = v.logvol;
      vols.push_back(v);
      rep.stabilizers.push_back(std::move(s));
    }
    // vol_max per frame must agree across frames; compute via the equivalence
    for (auto& q : rep.q_check.q_values) {
      Rat Q = 0;
      for (auto& v : vols) Q += Rat(1) / Rat(v.eval(q));
      Q /= Rat((long long)vols.size());
      rep.q_check.Q.push_back(Q);
      Int vmax = -1;
      bool first_frame = true;
      for (auto& orb : tic.orbits) {
        FrobeniusAction Fb = U_->make_twisted(F_, orb.stabilizer->frame_twist);
        Int cand = max_parahoric_volume(*U_, Fb, q);
        if (first_frame) {
          vmax = cand;
          first_frame = false;
        } else if (cand != vmax) {
          throw Error(ErrorKind::CrossCheckMismatch, "frames disagree on the maximal volume");
        }
      }
      rep.q_check.vol_max.push_back(vmax);
    }
    rep.q_check.identity_holds = true;
    for (size_t i = 0; i < rep.q_check.q_values.size(); ++i)
      if (rep.q_check.Q[i] * Rat(rep.q_check.vol_max[i]) != 1) rep.q_check.identity_holds = false;
  }

  void run_levi(AdlvReport& rep, const ZVec& mu, const BClassInfo& b) {
    LeviTargets lt = levi_targets(mu, b);
    if (lt.targets.empty())
      throw Error(ErrorKind::CrossCheckMismatch, "nonempty variety but no Levi targets");
    const std::vector<int>& levi = lt.targets.front().levi_simple_roots;
    LeviCtx& ctx = levi_ctx(levi);
    AffineElt tauM = levi_basic_rep(*ctx.MU, ctx.FM, b);
    auto nk = newton_kottwitz(*ctx.MU, ctx.FM, tauM);
    BClassInfo bM;
    bM.rep = tauM;
    bM.newton = nk.newton;
    bM.kappa = nk.kappa;
    bM.basic = true;
    bM.key = "B:" + ctx.MU->print(tauM);

    AdlvPipeline sub(ctx.MU, ctx.FM, strat_, cache_dir_, budget_cap_);
    long long total = 0;
    for (auto& t : lt.targets) {
      AdlvReport subrep = sub.top_components(t.lambda, bM);
      if (!subrep.nonempty)
        throw Error(ErrorKind::CrossCheckMismatch, "Levi target with vanishing variety");
      // dimension bookkeeping through the parabolic fibration
      Rat lhs = Rat(*subrep.dim) + U_->rho_pairing(qvec_add(qvec_of(mu), qvec_of(t.lambda))) -
                2 * ctx.MU->rho_pairing(qvec_of(t.lambda)) -
                2 * (U_->rho_pairing(b.newton) - ctx.MU->rho_pairing(b.newton));
      if (lhs != Rat(*rep.dim))
        throw Error(ErrorKind::CrossCheckMismatch, "Levi dimension bookkeeping fails");
      long long copies = (long long)t.branching_mult;
      total += copies * subrep.orbit_count;
      for (long long c = 0; c < copies; ++c)
        for (auto& s : subrep.stabilizers) {
          StabilizerReport sr = s;
          sr.levi = levi;  // one recursion level: the inner frame is the Levi itself
          rep.stabilizers.push_back(std::move(sr));
        }
    }
    if (Int(total) != rep.chen_zhu)
      throw Error(ErrorKind::CrossCheckMismatch,
                  "Levi orbit count disagrees with the dual-side count");
    rep.orbit_count = total;
  }

 public:
  // maximal parahoric volume of the twisted frame at a given q
  static Int max_parahoric_volume(const Universe& U, const FrobeniusAction& Fb, const Int& q) {
    RelativeDiagram D = relative_diagram(U, Fb);
    size_t nv = D.vertices.size();
    Int best = -1;
    for (size_t mask = 0; mask < (size_t(1) << nv); ++mask) {
      std::vector<int> K;
      for (size_t v = 0; v < nv; ++v)
        if (mask & (size_t(1) << v))
          K.insert(K.end(), D.vertices[v].orbit.begin(), D.vertices[v].orbit.end());
      std::sort(K.begin(), K.end());
      if (!U.finite_type(K)) continue;
      best = std::max(best, volume_and_logvolumes_eval(U, Fb, K, q));
    }
    return best;
  }

 private:
  static Int volume_and_logvolumes_eval(const Universe& U, const FrobeniusAction& Fb,
                                        const std::vector<int>& K, const Int& q) {
    return volume_and_logvolume(U, Fb, K).eval(q);
  }

  std::shared_ptr<const Universe> U_;
  FrobeniusAction F_;
  RepCalculator rep_;
  ClassPolyEngine engine_;
  Strategy strat_;
  std::string cache_dir_;
  long long budget_cap_;
  std::mutex mu_;
  std::map<std::vector<int>, LeviCtx> levis_;
};

inline std::pair<QVec, ZVec> mu_invariants(const Universe& U, const FrobeniusAction& F,
                                           const ZVec& mu) {
  return {mu_diamond(U, F, mu), mu_natural(U, F, mu)};
}

}  // namespace adlvlab
