#pragma once

// Finite Weyl group of a (possibly reducible) root system, enumerated once
// per universe. Elements are identified by their integral action on the
// lattice; lengths, inversions, reduced words and the full multiplication
// table are precomputed.

#include "adlvlab/rootdata.hpp"

#include <map>
#include <queue>

namespace adlvlab {

class FiniteWeylTable {
 public:
  static constexpr size_t kMaxSize = 8192;

  FiniteWeylTable() = default;

  explicit FiniteWeylTable(const RootSystem& rs) : rs_(&rs), n_(rs.dim) {
    size_t k = rs.nsimple();
    std::vector<ZMat> gens(k);
    for (size_t i = 0; i < k; ++i) {
      ZMat m = mat_identity(n_);
      for (size_t r = 0; r < n_; ++r)
        for (size_t c = 0; c < n_; ++c) m[r][c] -= rs.simple_covec[i][r] * rs.simple_fun[i][c];
      gens[i] = std::move(m);
    }
    push(mat_identity(n_));
    for (size_t head = 0; head < mats_.size(); ++head) {
      for (size_t i = 0; i < k; ++i) {
        ZMat m = mat_mul(mats_[head], gens[i]);
        if (!index_.count(flat(m))) push(std::move(m));
        if (mats_.size() > kMaxSize)
          throw Error(ErrorKind::InconsistentCartan, "finite Weyl group too large");
      }
    }
    size_t N = mats_.size();
    gen_ids_.resize(k);
    for (size_t i = 0; i < k; ++i) gen_ids_[i] = index_.at(flat(gens[i]));

    // root images and lengths
    size_t nroots = rs.roots.size();
    root_perm_.assign(N, std::vector<int>(nroots, -1));
    len_.assign(N, 0);
    for (size_t w = 0; w < N; ++w) {
      auto inv = mat_inverse(mats_[w]);
      if (!inv) throw Error(ErrorKind::SingularBasis, "non-invertible Weyl matrix");
      int neg = 0;
      for (size_t r = 0; r < nroots; ++r) {
        // image of root functional: row . M^{-1}
        ZVec f(n_, 0);
        for (size_t c = 0; c < n_; ++c)
          for (size_t t = 0; t < n_; ++t) f[c] += rs.roots[r].fun[t] * (*inv)[t][c];
        int idx = rs.find(f);
        if (idx < 0) throw Error(ErrorKind::InconsistentCartan, "Weyl image is not a root");
        root_perm_[w][r] = idx;
        if (rs.roots[r].positive && !rs.roots[idx].positive) ++neg;
      }
      len_[w] = neg;
    }

    // multiplication and inverses
    mul_.assign(N, std::vector<int>(N, -1));
    inv_.assign(N, -1);
    for (size_t a = 0; a < N; ++a)
      for (size_t b = 0; b < N; ++b) {
        int p = index_.at(flat(mat_mul(mats_[a], mats_[b])));
        mul_[a][b] = p;
        if (p == 0) inv_[a] = (int)b;
      }

    // canonical reduced words via right descents, smallest index first
    words_.assign(N, {});
    for (size_t w = 0; w < N; ++w) {
      int cur = (int)w;
      std::vector<int> rev;
      while (len_[cur] > 0) {
        bool found = false;
        for (size_t i = 0; i < k; ++i) {
          int nxt = mul_[cur][gen_ids_[i]];
          if (len_[nxt] < len_[cur]) {
            rev.push_back((int)i);
            cur = nxt;
            found = true;
            break;
          }
        }
        if (!found) throw Error(ErrorKind::InconsistentCartan, "descent-free non-identity element");
      }
      words_[w].assign(rev.rbegin(), rev.rend());
    }

    w0_ = 0;
    for (size_t w = 0; w < N; ++w)
      if (len_[w] > len_[w0_]) w0_ = (int)w;
  }

  size_t size() const { return mats_.size(); }
  size_t nsimple() const { return gen_ids_.size(); }
  int identity() const { return 0; }
  int gen(size_t i) const { return gen_ids_[i]; }
  int mul(int a, int b) const { return mul_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  int len(int a) const { return len_[a]; }
  int w0() const { return w0_; }
  const ZMat& mat(int a) const { return mats_[a]; }
  const std::vector<int>& word(int a) const { return words_[a]; }
  int root_image(int a, int root_idx) const { return root_perm_[a][root_idx]; }

  ZVec apply(int a, const ZVec& v) const { return mat_apply(mats_[a], v); }
  QVec apply_q(int a, const QVec& v) const { return mat_apply_q(mats_[a], v); }

  std::optional<int> lookup(const ZMat& m) const {
    auto it = index_.find(flat(m));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const RootSystem& roots() const { return *rs_; }

 private:
  static std::vector<long long> flatten(const ZMat& m) {
    std::vector<long long> f;
    for (auto& r : m) f.insert(f.end(), r.begin(), r.end());
    return f;
  }
  std::vector<long long> flat(const ZMat& m) const { return flatten(m); }
  void push(ZMat m) {
    index_[flat(m)] = (int)mats_.size();
    mats_.push_back(std::move(m));
  }

  const RootSystem* rs_ = nullptr;
  size_t n_ = 0;
  std::vector<ZMat> mats_;
  std::map<std::vector<long long>, int> index_;
  std::vector<int> gen_ids_;
  std::vector<std::vector<int>> mul_;
  std::vector<int> inv_;
  std::vector<int> len_;
  std::vector<std::vector<int>> words_;
  std::vector<std::vector<int>> root_perm_;
  int w0_ = 0;
};

}  // namespace adlvlab
