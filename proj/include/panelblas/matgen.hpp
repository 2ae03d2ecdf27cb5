#pragma once

// Deterministic test-matrix generators. Everything is seeded explicitly so
// verification failures reproduce from the reported seed alone.

#include <cmath>
#include <cstdint>
#include <random>

#include "panelblas/mat_view.hpp"

namespace panelblas {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(eng_);
  }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline void fill_uniform(MatView a, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (int j = 0; j < a.n; ++j)
    for (int i = 0; i < a.m; ++i) a(i, j) = rng.uniform(lo, hi);
}

// Integer-valued entries: double arithmetic on these is exact while
// magnitudes stay far below 2^53, which the small-dimension tests exploit.
inline void fill_int(MatView a, Rng& rng, int lo = -4, int hi = 4) {
  for (int j = 0; j < a.n; ++j)
    for (int i = 0; i < a.m; ++i) a(i, j) = rng.uniform_int(lo, hi);
}

// Symmetric positive definite with comfortable conditioning: G G^T shifted
// by a diagonal of order n.
inline Matrix make_spd(int n, Rng& rng) {
  Matrix g(n, n);
  fill_uniform(g.view(), rng);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) s += g(i, l) * g(j, l);
      a(i, j) = s;
      a(j, i) = s;
    }
  for (int i = 0; i < n; ++i) a(i, i) += n;
  return a;
}

// Triangular factor whose solves stay well conditioned: off-diagonal noise
// in [-1, 1], diagonal dominating the absolute row/column sums. The Unit
// flavor keeps off-diagonals small instead. Entries outside the triangle
// are filled with noise to catch routines that read the wrong half.
inline Matrix make_tri(Uplo uplo, DiagKind diag, int n, Rng& rng) {
  Matrix a(n, n);
  fill_uniform(a.view(), rng);
  if (diag == DiagKind::Unit) {
    for (int j = 0; j < n; ++j) {
      a(j, j) = 1.0;
      for (int i = 0; i < n; ++i) {
        bool in_tri = uplo == Uplo::Lower ? i > j : i < j;
        if (in_tri) a(i, j) *= 0.5 / n;
      }
    }
    return a;
  }
  for (int j = 0; j < n; ++j) {
    double rowsum = 0.0;
    for (int i = 0; i < n; ++i) {
      bool in_tri = uplo == Uplo::Lower ? i > j : i < j;
      if (in_tri) rowsum += std::abs(a(i, j));
    }
    double colsum = 0.0;
    for (int i = 0; i < n; ++i) {
      bool in_tri = uplo == Uplo::Lower ? j > i : j < i;
      if (in_tri) colsum += std::abs(a(j, i));
    }
    double d = 2.0 * (rowsum > colsum ? rowsum : colsum) + 1.0;
    a(j, j) = rng.uniform(0.0, 1.0) < 0.5 ? -d : d;
  }
  return a;
}

inline double max_abs_diff(ConstMatView a, ConstMatView b) {
  double worst = 0.0;
  for (int j = 0; j < a.n; ++j)
    for (int i = 0; i < a.m; ++i) {
      double d = std::abs(a(i, j) - b(i, j));
      if (d > worst) worst = d;
    }
  return worst;
}

inline double frob_norm(ConstMatView a) {
  double s = 0.0;
  for (int j = 0; j < a.n; ++j)
    for (int i = 0; i < a.m; ++i) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace panelblas
