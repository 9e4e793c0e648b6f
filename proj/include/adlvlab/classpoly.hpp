#pragma once

// Refined class polynomials in the (q-1) basis via the Deligne-Lusztig
// reduction recursion, the top-components monoid, and the reduction of
// Iwahori-level invariants to minimal-class data.

#include "adlvlab/sigmaconj.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <variant>

namespace adlvlab {

// Polynomial with nonnegative integer coefficients in the basis (q-1)^k.
struct QMinusOnePoly {
  std::vector<Int> coeffs;  // coeffs[k] multiplies (q-1)^k

  QMinusOnePoly() = default;
  explicit QMinusOnePoly(Int c0) {
    if (c0 != 0) coeffs.push_back(std::move(c0));
    check();
  }

  static QMinusOnePoly zero() { return QMinusOnePoly(); }
  static QMinusOnePoly one() { return QMinusOnePoly(Int(1)); }

  bool is_zero() const { return coeffs.empty(); }
  int degree() const { return (int)coeffs.size() - 1; }
  const Int& lead() const { return coeffs.back(); }

  void trim() {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  }
  void check() const {
    for (auto& c : coeffs)
      if (c < 0) throw Error(ErrorKind::CrossCheckMismatch, "negative (q-1) coefficient");
  }

  QMinusOnePoly& operator+=(const QMinusOnePoly& o) {
    if (o.coeffs.size() > coeffs.size()) coeffs.resize(o.coeffs.size(), Int(0));
    for (size_t i = 0; i < o.coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    trim();
    check();
    return *this;
  }

  // multiplication by (q-1): shift
  QMinusOnePoly times_qminus1() const {
    if (is_zero()) return *this;
    QMinusOnePoly r;
    r.coeffs.assign(coeffs.size() + 1, Int(0));
    for (size_t i = 0; i < coeffs.size(); ++i) r.coeffs[i + 1] = coeffs[i];
    return r;
  }

  // multiplication by q = 1 + (q-1)
  QMinusOnePoly times_q() const {
    QMinusOnePoly r = times_qminus1();
    r += *this;
    return r;
  }

  Int eval_q(const Int& q) const {
    Int t = q - 1, pw = 1, s = 0;
    for (auto& c : coeffs) {
      s += c * pw;
      pw *= t;
    }
    return s;
  }

  bool operator==(const QMinusOnePoly& o) const { return coeffs == o.coeffs; }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    for (size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i] == 0) continue;
      if (!s.empty()) s += " + ";
      s += coeffs[i].str();
      if (i == 1) s += "*(q-1)";
      if (i > 1) s += "*(q-1)^" + std::to_string(i);
    }
    return s;
  }
};

struct ParahoricDescriptor {
  std::vector<int> K;  // affine simple reflection indices, sorted
  AffineElt frame_twist;  // tau with sigma_b = Ad(tau) o sigma in the frame universe

  bool operator==(const ParahoricDescriptor& o) const {
    return K == o.K && frame_twist == o.frame_twist;
  }
};

struct OrbitDescriptor {
  std::string host_class;  // tilde-class key the orbit came from
  std::optional<ParahoricDescriptor> stabilizer;  // nullopt = deferred (non-basic)
};

// Pair (orbit multiset, dimension) with the max-dimension addition law.
struct TICElement {
  bool present = false;  // the vanished element is the additive unit
  long long dim = 0;
  std::vector<OrbitDescriptor> orbits;  // sorted by host_class

  static TICElement vanished() { return TICElement{}; }

  long long orbit_count() const { return (long long)orbits.size(); }

  void sort_orbits() {
    std::sort(orbits.begin(), orbits.end(),
              [](const OrbitDescriptor& a, const OrbitDescriptor& b) {
                return a.host_class < b.host_class;
              });
  }

  TICElement& operator+=(const TICElement& o) {
    if (!o.present) return *this;
    if (!present) {
      *this = o;
      return *this;
    }
    if (o.dim > dim) {
      *this = o;
    } else if (o.dim == dim) {
      orbits.insert(orbits.end(), o.orbits.begin(), o.orbits.end());
      sort_orbits();
    }
    return *this;
  }

  TICElement shifted(long long k) const {
    TICElement r = *this;
    if (r.present) r.dim += k;
    return r;
  }
};

// minimal-class invariants: dimension and the single orbit with its stabilizer
struct MinimalClassData {
  long long dim = 0;
  bool basic = false;
  OrbitDescriptor orbit;
  AffineElt tau;  // Omega part of the representative (basic case)
};

struct DlMinimal {};
struct DlShift {
  AffineElt to;
  int s;
};
struct DlSplit {
  int s;
  AffineElt at;       // splittable element reached by shifts
  AffineElt sw;       // s . at
  AffineElt sws;      // s . at . sigma(s)
};
using DlStep = std::variant<DlMinimal, DlShift, DlSplit>;

using PolyMap = std::map<std::string, QMinusOnePoly>;

// Reduction strategy: permutes the per-node reflection visit order. Seed 0 is
// the deterministic smallest-index-first strategy.
struct Strategy {
  uint64_t seed = 0;
  void order(const AffineElt& at, std::vector<int>& ord) const {
    if (seed == 0) return;
    AffineEltHash h;
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (uint64_t)h(at)));
    std::shuffle(ord.begin(), ord.end(), rng);
  }
  std::function<void(const AffineElt&, std::vector<int>&)> fn() const {
    if (seed == 0) return {};
    return [*this](const AffineElt& at, std::vector<int>& ord) { order(at, ord); };
  }
};

class ClassPolyEngine {
 public:
  ClassPolyEngine(std::shared_ptr<const Universe> U, FrobeniusAction F, Strategy strat = {},
                  std::string cache_dir = {}, long long budget_cap = 2'000'000)
      : U_(std::move(U)), F_(std::move(F)), strat_(strat), cache_dir_(std::move(cache_dir)) {
    budget_cap_ = budget_cap;
    if (!cache_dir_.empty()) load_cache();
  }

  const Universe& universe() const { return *U_; }
  const FrobeniusAction& frobenius() const { return F_; }

  // One reduction step, reported in spec form.
  DlStep dl_reduction_step(const AffineElt& w) {
    Budget budget{budget_cap_};
    auto r = find_shift_to_drop(*U_, F_, w, budget, strat_.fn());
    if (r.minimal) return DlMinimal{};
    if (!(r.at == w) || !r.path.empty()) {
      // first edge of the deterministic path toward the splittable element
      int s = r.path.front().s;
      AffineElt fs = U_->frobenius_apply(F_, U_->sref_elt(s));
      return DlShift{U_->mult(U_->mult(U_->sref_elt(s), w), fs), s};
    }
    AffineElt fs = U_->frobenius_apply(F_, U_->sref_elt(r.s));
    AffineElt sw = U_->mult(U_->sref_elt(r.s), r.at);
    AffineElt sws = U_->mult(sw, fs);
    return DlSplit{r.s, r.at, sw, sws};
  }

  const PolyMap& class_polynomials(const AffineElt& w) {
    std::string key = U_->print(w);
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    Budget budget{budget_cap_};
    PolyMap result = compute(w, budget);
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, fresh] = memo_.emplace(key, std::move(result));
    if (fresh) dirty_.push_back(key);
    return it->second;
  }

  const AffineElt& class_rep(const std::string& tilde_key) const {
    auto it = reps_.find(tilde_key);
    if (it == reps_.end())
      throw Error(ErrorKind::CrossCheckMismatch, "unknown class key: " + tilde_key);
    return it->second;
  }

  // dim X_C(b) and the stabilizer orbit attached to a minimal class
  MinimalClassData minimal_class_data(const AffineElt& wmin) {
    auto nk = newton_kottwitz(*U_, F_, wmin);
    Rat slope = U_->two_rho_pairing(nk.newton);
    Rat dim = Rat(U_->length(wmin)) - slope;
    if (boost::multiprecision::denominator(dim) != 1 || dim < 0)
      throw Error(ErrorKind::CrossCheckMismatch, "minimal class dimension not a nonneg integer");
    MinimalClassData out;
    out.dim = (long long)boost::multiprecision::numerator(dim);
    out.basic = is_central(*U_, nk.newton);
    Budget budget{budget_cap_};
    std::string key = class_key(*U_, F_, wmin, ClassLevel::tilde_class, budget).str;
    if (!out.basic) {
      out.orbit = OrbitDescriptor{key, std::nullopt};
      return out;
    }
    AffineElt tau = U_->omega_part(wmin);
    AffineElt u = U_->mult(wmin, U_->inv(tau));
    for (auto c : U_->kappa0(u))
      if (c != 0) throw Error(ErrorKind::CrossCheckMismatch, "finite part not in the affine Weyl group");
    out.tau = tau;
    FrobeniusAction Fb = U_->make_twisted(F_, tau);
    // support of u, closed under the twisted diagram action
    std::vector<char> in(U_->nsref(), 0);
    AffineElt cur = u;
    long long l = U_->length(cur);
    while (l > 0) {
      bool moved = false;
      for (size_t i = 0; i < U_->nsref(); ++i) {
        AffineElt nxt = U_->mult(cur, U_->sref_elt((int)i));
        long long ln = U_->length(nxt);
        if (ln < l) {
          in[i] = 1;
          cur = nxt;
          l = ln;
          moved = true;
          break;
        }
      }
      if (!moved) throw Error(ErrorKind::InconsistentCartan, "descent-free positive-length element");
    }
    bool grew = true;
    while (grew) {
      grew = false;
      for (size_t i = 0; i < in.size(); ++i)
        if (in[i] && !in[Fb.sperm[i]]) {
          in[Fb.sperm[i]] = 1;
          grew = true;
        }
    }
    std::vector<int> K;
    for (size_t i = 0; i < in.size(); ++i)
      if (in[i]) K.push_back((int)i);
    if (!U_->finite_type(K))
      throw Error(ErrorKind::InfiniteSupport, "support is not of finite type");
    out.orbit = OrbitDescriptor{key, ParahoricDescriptor{K, tau}};
    return out;
  }

  // TIC image of the Iwahori-level invariants attached to (w, [b]).
  TICElement sigma_top(const AffineElt& w, const QVec& b_newton, const ZVec& b_kappa) {
    const PolyMap& polys = class_polynomials(w);
    TICElement total = TICElement::vanished();
    for (auto& [key, poly] : polys) {
      if (poly.is_zero()) continue;
      const AffineElt& rep = class_rep(key);
      auto nk = newton_kottwitz(*U_, F_, rep);
      if (nk.newton != b_newton || nk.kappa != b_kappa) continue;
      MinimalClassData mcd = minimal_class_data(rep);
      // a (q-1)-polynomial acts through T = L - 1: the leading term wins
      TICElement term;
      term.present = true;
      term.dim = mcd.dim + poly.degree();
      Int copies = poly.lead();
      if (copies > 1000000)
        throw Error(ErrorKind::SearchBudgetExceeded, "orbit multiplicity beyond desk scale");
      for (Int i = 0; i < copies; ++i) term.orbits.push_back(mcd.orbit);
      term.sort_orbits();
      total += term;
    }
    return total;
  }

  void flush_cache() {
    if (cache_dir_.empty()) return;
    std::lock_guard<std::mutex> lk(mu_);
    if (dirty_.empty()) return;
    std::filesystem::create_directories(cache_dir_);
    std::ofstream out(cache_path(), std::ios::app);
    for (auto& key : dirty_) {
      nlohmann::ordered_json rec;
      rec["elt"] = key;
      auto& pm = memo_.at(key);
      nlohmann::ordered_json cls = nlohmann::ordered_json::array();
      for (auto& [ck, poly] : pm) {
        nlohmann::ordered_json e;
        e["key"] = ck;
        std::vector<std::string> cs;
        for (auto& c : poly.coeffs) cs.push_back(c.str());
        e["coeffs"] = cs;
        cls.push_back(e);
      }
      rec["classes"] = cls;
      out << rec.dump() << "\n";
    }
    dirty_.clear();
  }

  std::string cache_path() const {
    std::string content = "v1|" + U_->datum().content_fingerprint + "|" + F_.key;
    return cache_dir_ + "/" + hex16(fnv1a64(content)) + ".jsonl";
  }

  long long budget_cap() const { return budget_cap_; }

 private:
  PolyMap compute(const AffineElt& w, Budget& budget) {
    // fetch-or-compute with memoization on exact canonical forms
    std::string key = U_->print(w);
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    auto r = find_shift_to_drop(*U_, F_, w, budget, strat_.fn());
    PolyMap result;
    if (r.minimal) {
      Budget b2{budget_cap_};
      auto ck = class_key(*U_, F_, w, ClassLevel::tilde_class, b2);
      result[ck.str] = QMinusOnePoly::one();
      std::lock_guard<std::mutex> lk(mu_);
      reps_.emplace(ck.str, ck.rep);
    } else {
      AffineElt fs = U_->frobenius_apply(F_, U_->sref_elt(r.s));
      AffineElt sw = U_->mult(U_->sref_elt(r.s), r.at);
      AffineElt sws = U_->mult(sw, fs);
      if (U_->length(sws) != U_->length(r.at) - 2 || U_->length(sw) != U_->length(r.at) - 1)
        throw Error(ErrorKind::CrossCheckMismatch, "split lengths inconsistent");
      PolyMap a = compute(sw, budget);
      PolyMap b = compute(sws, budget);
      for (auto& [k, p] : a) {
        auto q = p.times_qminus1();
        if (!q.is_zero()) result[k] += q;
      }
      for (auto& [k, p] : b) {
        auto q = p.times_q();
        if (!q.is_zero()) result[k] += q;
      }
      for (auto it = result.begin(); it != result.end();)
        it = it->second.is_zero() ? result.erase(it) : std::next(it);
    }
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, fresh] = memo_.emplace(key, std::move(result));
    if (fresh) dirty_.push_back(key);
    return it->second;
  }

  void load_cache() {
    std::ifstream in(cache_path());
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::ordered_json rec;
      try {
        rec = nlohmann::ordered_json::parse(line);
      } catch (...) {
        continue;
      }
      PolyMap pm;
      for (auto& e : rec.at("classes")) {
        QMinusOnePoly p;
        for (auto& c : e.at("coeffs")) p.coeffs.push_back(Int(c.get<std::string>()));
        p.trim();
        p.check();
        std::string ck = e.at("key").get<std::string>();
        pm[ck] = std::move(p);
        if (!reps_.count(ck)) reps_.emplace(ck, U_->parse(ck.substr(2)));
      }
      memo_[rec.at("elt").get<std::string>()] = std::move(pm);
    }
  }

  std::shared_ptr<const Universe> U_;
  FrobeniusAction F_;
  Strategy strat_;
  std::string cache_dir_;
  long long budget_cap_;
  std::mutex mu_;
  std::unordered_map<std::string, PolyMap> memo_;
  std::unordered_map<std::string, AffineElt> reps_;
  std::vector<std::string> dirty_;
};

}  // namespace adlvlab
