#pragma once

// Exact arithmetic and small integer linear algebra used throughout the
// engine: arbitrary-precision integers/rationals, Hermite normal forms for
// sublattice membership and canonical coset residues, and rational
// rank/kernel computations.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adlvlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using ZVec = std::vector<long long>;   // lattice coordinates
using QVec = std::vector<Rat>;         // rational coweights
using ZMat = std::vector<ZVec>;        // row-major, acts on column vectors

enum class ErrorKind {
  MalformedDocument,
  InconsistentCartan,
  LatticeNotBetweenQandP,
  FrobeniusNotBasePreserving,
  SingularBasis,
  SearchBudgetExceeded,
  InfiniteSupport,
  InfiniteType,
  ParityViolation,
  CrossCheckMismatch,
  IdentityViolation,
  ConventionUnverified,
  Unsupported,
};

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::InconsistentCartan: return "InconsistentCartan";
    case ErrorKind::LatticeNotBetweenQandP: return "LatticeNotBetweenQandP";
    case ErrorKind::FrobeniusNotBasePreserving: return "FrobeniusNotBasePreserving";
    case ErrorKind::SingularBasis: return "SingularBasis";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorKind::InfiniteSupport: return "InfiniteSupport";
    case ErrorKind::InfiniteType: return "InfiniteType";
    case ErrorKind::ParityViolation: return "ParityViolation";
    case ErrorKind::CrossCheckMismatch: return "CrossCheckMismatch";
    case ErrorKind::IdentityViolation: return "IdentityViolation";
    case ErrorKind::ConventionUnverified: return "ConventionUnverified";
    case ErrorKind::Unsupported: return "Unsupported";
  }
  return "Error";
}

// Node budget for the twisted-conjugation searches. Exceeding it is a hard
// error, never a silent truncation.
struct Budget {
  long long cap = 2'000'000;
  long long used = 0;
  void tick(long long n = 1) {
    used += n;
    if (used > cap) throw Error(ErrorKind::SearchBudgetExceeded, "search budget exceeded");
  }
};

// ---------------------------------------------------------------------------
// small vector helpers

inline ZVec zvec_add(const ZVec& a, const ZVec& b) {
  ZVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline ZVec zvec_sub(const ZVec& a, const ZVec& b) {
  ZVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline ZVec zvec_neg(const ZVec& a) {
  ZVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline long long zdot(const ZVec& a, const ZVec& b) {
  long long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rat qdot(const ZVec& a, const QVec& b) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += Rat(a[i]) * b[i];
  return s;
}

inline QVec qvec_of(const ZVec& a) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = Rat(a[i]);
  return r;
}

inline QVec qvec_add(const QVec& a, const QVec& b) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline QVec qvec_sub(const QVec& a, const QVec& b) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline QVec qvec_scale(const Rat& c, const QVec& a) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline bool qvec_is_zero(const QVec& a) {
  for (auto& x : a)
    if (x != 0) return false;
  return true;
}

// matrix acting on column vectors
inline ZVec mat_apply(const ZMat& m, const ZVec& v) {
  ZVec r(m.size(), 0);
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += m[i][j] * v[j];
  return r;
}

inline QVec mat_apply_q(const ZMat& m, const QVec& v) {
  QVec r(m.size(), Rat(0));
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += Rat(m[i][j]) * v[j];
  return r;
}

inline ZMat mat_mul(const ZMat& a, const ZMat& b) {
  size_t n = a.size(), m = b[0].size(), k = b.size();
  ZMat r(n, ZVec(m, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      long long ail = a[i][l];
      if (ail == 0) continue;
      for (size_t j = 0; j < m; ++j) r[i][j] += ail * b[l][j];
    }
  return r;
}

inline ZMat mat_identity(size_t n) {
  ZMat r(n, ZVec(n, 0));
  for (size_t i = 0; i < n; ++i) r[i][i] = 1;
  return r;
}

inline ZMat mat_sub(const ZMat& a, const ZMat& b) {
  ZMat r = a;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) r[i][j] -= b[i][j];
  return r;
}

// Inverse of a unimodular-ish integer matrix; entries must come out integral.
inline std::optional<ZMat> mat_inverse(const ZMat& m) {
  size_t n = m.size();
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(2 * n, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) a[i][j] = Rat(m[i][j]);
    a[i][n + i] = 1;
  }
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    Rat d = a[c][c];
    for (size_t j = 0; j < 2 * n; ++j) a[c][j] /= d;
    for (size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  ZMat inv(n, ZVec(n, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      const Rat& x = a[i][n + j];
      if (boost::multiprecision::denominator(x) != 1) return std::nullopt;
      inv[i][j] = (long long)boost::multiprecision::numerator(x);
    }
  return inv;
}

inline std::optional<std::vector<std::vector<Rat>>> qmat_inverse(const ZMat& m) {
  size_t n = m.size();
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(2 * n, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) a[i][j] = Rat(m[i][j]);
    a[i][n + i] = 1;
  }
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    Rat d = a[c][c];
    for (size_t j = 0; j < 2 * n; ++j) a[c][j] /= d;
    for (size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
  return inv;
}

// ---------------------------------------------------------------------------
// rational Gaussian elimination: rank, solve, kernel

inline size_t qmat_rank(std::vector<std::vector<Rat>> a) {
  size_t rows = a.size();
  if (rows == 0) return 0;
  size_t cols = a[0].size(), r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c] / a[r][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

// Solve A x = b over the rationals; requires the solution to be unique on
// the column span (full column rank). Returns nullopt if inconsistent.
inline std::optional<std::vector<Rat>> qmat_solve(const std::vector<std::vector<Rat>>& A,
                                                  const std::vector<Rat>& b) {
  size_t rows = A.size();
  size_t cols = rows == 0 ? 0 : A[0].size();
  std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols + 1));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) a[i][j] = A[i][j];
    a[i][cols] = b[i];
  }
  std::vector<int> pivot_of_col(cols, -1);
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Rat d = a[r][c];
    for (size_t j = c; j <= cols; ++j) a[r][j] /= d;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (size_t j = c; j <= cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_of_col[c] = (int)r;
    ++r;
  }
  for (size_t i = r; i < rows; ++i)
    if (a[i][cols] != 0) return std::nullopt;
  std::vector<Rat> x(cols, Rat(0));
  for (size_t c = 0; c < cols; ++c)
    if (pivot_of_col[c] >= 0) x[c] = a[pivot_of_col[c]][cols];
  // verify (guards free columns / inconsistent under-determined data)
  for (size_t i = 0; i < rows; ++i) {
    Rat s = 0;
    for (size_t j = 0; j < cols; ++j) s += A[i][j] * x[j];
    if (s != b[i]) return std::nullopt;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Hermite normal form over Z (column style), with canonical residues.
//
// A sublattice L of Z^n is stored as an HNF basis: a list of columns, each
// with a pivot row; pivot rows strictly increase, pivot entries are positive,
// and entries of later columns in earlier pivot rows are reduced to
// [0, pivot). Canonical coset representatives are obtained by successive
// floor division along pivot rows.

struct Hnf {
  size_t n = 0;                         // ambient dimension
  std::vector<std::vector<Int>> cols;   // basis columns
  std::vector<size_t> pivots;           // pivot row per column
};

inline Hnf hnf_from_generators(size_t n, const std::vector<ZVec>& gens) {
  std::vector<std::vector<Int>> work;
  for (auto& g : gens) {
    std::vector<Int> c(n);
    for (size_t i = 0; i < n; ++i) c[i] = g[i];
    work.push_back(std::move(c));
  }
  Hnf h;
  h.n = n;
  size_t done = 0;  // columns of h fixed so far
  for (size_t row = 0; row < n && !work.empty(); ++row) {
    // gcd-reduce column entries in this row across the working set
    while (true) {
      size_t best = work.size();
      for (size_t j = 0; j < work.size(); ++j) {
        if (work[j][row] == 0) continue;
        if (best == work.size() ||
            boost::multiprecision::abs(work[j][row]) < boost::multiprecision::abs(work[best][row]))
          best = j;
      }
      if (best == work.size()) break;  // all zero in this row
      bool others = false;
      for (size_t j = 0; j < work.size(); ++j) {
        if (j == best || work[j][row] == 0) continue;
        others = true;
        Int q = work[j][row] / work[best][row];
        for (size_t i = 0; i < n; ++i) work[j][i] -= q * work[best][i];
      }
      if (!others) {
        // best is the pivot column for this row
        if (work[best][row] < 0)
          for (size_t i = 0; i < n; ++i) work[best][i] = -work[best][i];
        h.cols.push_back(work[best]);
        h.pivots.push_back(row);
        work.erase(work.begin() + best);
        ++done;
        break;
      }
    }
  }
  (void)done;
  // reduce earlier pivot rows of later columns
  for (size_t j = 0; j < h.cols.size(); ++j)
    for (size_t i = 0; i < j; ++i) {
      Int p = h.cols[i][h.pivots[i]];
      Int v = h.cols[j][h.pivots[i]];
      Int q = v >= 0 ? Int(v / p) : Int(-((-v + p - 1) / p));
      if (q != 0)
        for (size_t k = 0; k < n; ++k) h.cols[j][k] -= q * h.cols[i][k];
    }
  return h;
}

// canonical representative of v + L
inline std::vector<Int> hnf_residue(const Hnf& h, const std::vector<Int>& v) {
  std::vector<Int> r = v;
  for (size_t j = 0; j < h.cols.size(); ++j) {
    size_t row = h.pivots[j];
    Int p = h.cols[j][row];
    Int q = r[row] >= 0 ? Int(r[row] / p) : Int(-((-r[row] + p - 1) / p));
    if (q != 0)
      for (size_t k = 0; k < h.n; ++k) r[k] -= q * h.cols[j][k];
  }
  return r;
}

inline std::vector<Int> hnf_residue_z(const Hnf& h, const ZVec& v) {
  std::vector<Int> vi(v.size());
  for (size_t i = 0; i < v.size(); ++i) vi[i] = v[i];
  return hnf_residue(h, vi);
}

inline ZVec hnf_residue_small(const Hnf& h, const ZVec& v) {
  auto r = hnf_residue_z(h, v);
  ZVec out(r.size());
  for (size_t i = 0; i < r.size(); ++i) out[i] = (long long)r[i];
  return out;
}

inline bool hnf_contains(const Hnf& h, const ZVec& v) {
  auto r = hnf_residue_z(h, v);
  for (auto& x : r)
    if (x != 0) return false;
  return true;
}

// Integer kernel of an integer matrix A (rows x n): basis of {x : A x = 0}.
// Computed by column-reducing A while tracking the unimodular column ops.
inline std::vector<ZVec> integer_kernel(const std::vector<ZVec>& A, size_t n) {
  size_t rows = A.size();
  std::vector<std::vector<Int>> M(rows, std::vector<Int>(n));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < n; ++j) M[i][j] = A[i][j];
  std::vector<std::vector<Int>> U(n, std::vector<Int>(n, 0));
  for (size_t i = 0; i < n; ++i) U[i][i] = 1;
  size_t fixed = 0;
  for (size_t row = 0; row < rows && fixed < n; ++row) {
    while (true) {
      size_t best = n;
      for (size_t j = fixed; j < n; ++j) {
        if (M[row][j] == 0) continue;
        if (best == n || boost::multiprecision::abs(M[row][j]) < boost::multiprecision::abs(M[row][best]))
          best = j;
      }
      if (best == n) break;
      bool others = false;
      for (size_t j = fixed; j < n; ++j) {
        if (j == best || M[row][j] == 0) continue;
        others = true;
        Int q = M[row][j] / M[row][best];
        for (size_t i = 0; i < rows; ++i) M[i][j] -= q * M[i][best];
        for (size_t i = 0; i < n; ++i) U[i][j] -= q * U[i][best];
      }
      if (!others) {
        for (size_t i = 0; i < rows; ++i) std::swap(M[i][fixed], M[i][best]);
        for (size_t i = 0; i < n; ++i) std::swap(U[i][fixed], U[i][best]);
        ++fixed;
        break;
      }
    }
  }
  std::vector<ZVec> ker;
  for (size_t j = fixed; j < n; ++j) {
    bool zero = true;
    for (size_t i = 0; i < rows; ++i)
      if (M[i][j] != 0) zero = false;
    if (!zero) continue;
    ZVec v(n);
    for (size_t i = 0; i < n; ++i) v[i] = (long long)U[i][j];
    ker.push_back(std::move(v));
  }
  return ker;
}

// One integer solution of A x = b, if any.
inline std::optional<ZVec> integer_solve(const std::vector<ZVec>& A, const ZVec& b, size_t n) {
  size_t rows = A.size();
  std::vector<std::vector<Int>> M(rows, std::vector<Int>(n));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < n; ++j) M[i][j] = A[i][j];
  std::vector<std::vector<Int>> U(n, std::vector<Int>(n, 0));
  for (size_t i = 0; i < n; ++i) U[i][i] = 1;
  std::vector<Int> rhs(rows);
  for (size_t i = 0; i < rows; ++i) rhs[i] = b[i];

  std::vector<Int> x(n, 0);
  size_t fixed = 0;
  for (size_t row = 0; row < rows; ++row) {
    // eliminate row using columns >= fixed
    while (true) {
      size_t best = n;
      for (size_t j = fixed; j < n; ++j) {
        if (M[row][j] == 0) continue;
        if (best == n || boost::multiprecision::abs(M[row][j]) < boost::multiprecision::abs(M[row][best]))
          best = j;
      }
      if (best == n) break;
      bool others = false;
      for (size_t j = fixed; j < n; ++j) {
        if (j == best || M[row][j] == 0) continue;
        others = true;
        Int q = M[row][j] / M[row][best];
        for (size_t i = 0; i < rows; ++i) M[i][j] -= q * M[i][best];
        for (size_t i = 0; i < n; ++i) U[i][j] -= q * U[i][best];
      }
      if (!others) {
        for (size_t i = 0; i < rows; ++i) std::swap(M[i][fixed], M[i][best]);
        for (size_t i = 0; i < n; ++i) std::swap(U[i][fixed], U[i][best]);
        break;
      }
    }
    // residual after previously fixed pivots
    Int res = rhs[row];
    for (size_t j = 0; j < fixed; ++j) res -= M[row][j] * x[j];
    if (fixed < n && M[row][fixed] != 0) {
      if (res % M[row][fixed] != 0) return std::nullopt;
      x[fixed] = res / M[row][fixed];
      ++fixed;
    } else {
      if (res != 0) return std::nullopt;
    }
  }
  ZVec out(n, 0);
  for (size_t i = 0; i < n; ++i) {
    Int s = 0;
    for (size_t j = 0; j < n; ++j) s += U[i][j] * x[j];
    out[i] = (long long)s;
  }
  return out;
}

// ---------------------------------------------------------------------------

inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex16(uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = d[v & 0xf];
    v >>= 4;
  }
  return s;
}

inline std::string rat_string(const Rat& r) {
  return r.str();
}

inline Rat rat_floor(const Rat& r) {
  Int n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
  Int q = n >= 0 ? Int(n / d) : Int(-((-n + d - 1) / d));
  return Rat(q);
}

}  // namespace adlvlab
