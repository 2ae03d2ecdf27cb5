#pragma once

// Naive reference implementations used to verify the packed fast path.
// Everything here is written against plain column-major views with textbook
// loop nests and shares no code with the optimized routines. These are the
// comparison oracles for tests and for the bench CLI's verify subcommand;
// they are not part of the performance API.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "panelblas/mat_view.hpp"

namespace panelblas::ref {

inline double op_at(ConstMatView a, TransOp t, int i, int j) {
  return t == TransOp::NoTrans ? a(i, j) : a(j, i);
}

// C <- alpha*op(A)*op(B) + beta*C, canonical (i, j, l) loop order with the
// l accumulation ascending.
inline void naive_gemm(TransOp transa, TransOp transb, int m, int n, int k,
                       double alpha, ConstMatView a, ConstMatView b,
                       double beta, MatView c) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += op_at(a, transa, i, l) * op_at(b, transb, l, j);
      c(i, j) = alpha * s + (beta == 0.0 ? 0.0 : beta * c(i, j));
    }
  }
}

// C <- alpha*op(A)*op(A)^T + beta*C restricted to the uplo triangle.
inline void naive_syrk(Uplo uplo, TransOp trans, int n, int k, double alpha,
                       ConstMatView a, double beta, MatView c) {
  for (int i = 0; i < n; ++i) {
    int j0 = uplo == Uplo::Lower ? 0 : i;
    int j1 = uplo == Uplo::Lower ? i + 1 : n;
    for (int j = j0; j < j1; ++j) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += op_at(a, trans, i, l) * op_at(a, trans, j, l);
      c(i, j) = alpha * s + (beta == 0.0 ? 0.0 : beta * c(i, j));
    }
  }
}

namespace detail {
// Structural element of the triangular factor op(A): zero outside the
// effective triangle, one on the diagonal for Unit.
inline double tri_at(ConstMatView a, Uplo uplo, TransOp trans, DiagKind diag,
                     int i, int j) {
  int si = trans == TransOp::NoTrans ? i : j;
  int sj = trans == TransOp::NoTrans ? j : i;
  if (uplo == Uplo::Lower ? si < sj : si > sj) return 0.0;
  if (si == sj && diag == DiagKind::Unit) return 1.0;
  return a(si, sj);
}
}  // namespace detail

// B <- alpha*op(A)*B (Left) or alpha*B*op(A) (Right), A triangular.
inline void naive_trmm(Side side, Uplo uplo, TransOp transa, DiagKind diag,
                       int m, int n, double alpha, ConstMatView a, MatView b) {
  std::vector<double> tmp(static_cast<std::size_t>(m) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      if (side == Side::Left) {
        for (int l = 0; l < m; ++l) s += detail::tri_at(a, uplo, transa, diag, i, l) * b(l, j);
      } else {
        for (int l = 0; l < n; ++l) s += b(i, l) * detail::tri_at(a, uplo, transa, diag, l, j);
      }
      tmp[i + static_cast<std::size_t>(j) * m] = alpha * s;
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) b(i, j) = tmp[i + static_cast<std::size_t>(j) * m];
}

// Solves op(A)*X = alpha*B (Left) or X*op(A) = alpha*B (Right) by
// substitution; X overwrites B. Returns +p if diagonal element p is exactly
// zero with NonUnit.
inline Status naive_trsm(Side side, Uplo uplo, TransOp transa, DiagKind diag,
                         int m, int n, double alpha, ConstMatView a, MatView b) {
  int t = side == Side::Left ? m : n;
  if (diag == DiagKind::NonUnit) {
    for (int p = 0; p < t; ++p)
      if (a(p, p) == 0.0) return Status::failure(p + 1, "singular triangular factor");
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) b(i, j) *= alpha;
  // Effective shape of op(A) decides the substitution direction.
  bool eff_lower = (uplo == Uplo::Lower) == (transa == TransOp::NoTrans);
  if (side == Side::Left) {
    // op(A)*X = B: forward for lower, backward for upper.
    for (int j = 0; j < n; ++j) {
      if (eff_lower) {
        for (int i = 0; i < m; ++i) {
          double s = b(i, j);
          for (int l = 0; l < i; ++l) s -= detail::tri_at(a, uplo, transa, diag, i, l) * b(l, j);
          if (diag == DiagKind::NonUnit) s /= detail::tri_at(a, uplo, transa, diag, i, i);
          b(i, j) = s;
        }
      } else {
        for (int i = m - 1; i >= 0; --i) {
          double s = b(i, j);
          for (int l = i + 1; l < m; ++l) s -= detail::tri_at(a, uplo, transa, diag, i, l) * b(l, j);
          if (diag == DiagKind::NonUnit) s /= detail::tri_at(a, uplo, transa, diag, i, i);
          b(i, j) = s;
        }
      }
    }
  } else {
    // X*op(A) = B: columns resolve backward for lower, forward for upper.
    for (int i = 0; i < m; ++i) {
      if (eff_lower) {
        for (int j = n - 1; j >= 0; --j) {
          double s = b(i, j);
          for (int l = j + 1; l < n; ++l) s -= b(i, l) * detail::tri_at(a, uplo, transa, diag, l, j);
          if (diag == DiagKind::NonUnit) s /= detail::tri_at(a, uplo, transa, diag, j, j);
          b(i, j) = s;
        }
      } else {
        for (int j = 0; j < n; ++j) {
          double s = b(i, j);
          for (int l = 0; l < j; ++l) s -= b(i, l) * detail::tri_at(a, uplo, transa, diag, l, j);
          if (diag == DiagKind::NonUnit) s /= detail::tri_at(a, uplo, transa, diag, j, j);
          b(i, j) = s;
        }
      }
    }
  }
  return Status::success();
}

// Unblocked Cholesky of the uplo triangle; info=+p on a nonpositive pivot,
// leaving columns before p validly factorized.
inline Status naive_potrf(Uplo uplo, int n, MatView a) {
  if (uplo == Uplo::Lower) {
    for (int j = 0; j < n; ++j) {
      double d = a(j, j);
      for (int l = 0; l < j; ++l) d -= a(j, l) * a(j, l);
      if (d <= 0.0) return Status::failure(j + 1, "nonpositive pivot");
      d = std::sqrt(d);
      a(j, j) = d;
      for (int i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (int l = 0; l < j; ++l) s -= a(i, l) * a(j, l);
        a(i, j) = s / d;
      }
    }
  } else {
    for (int j = 0; j < n; ++j) {
      double d = a(j, j);
      for (int l = 0; l < j; ++l) d -= a(l, j) * a(l, j);
      if (d <= 0.0) return Status::failure(j + 1, "nonpositive pivot");
      d = std::sqrt(d);
      a(j, j) = d;
      for (int i = j + 1; i < n; ++i) {
        double s = a(j, i);
        for (int l = 0; l < j; ++l) s -= a(l, j) * a(l, i);
        a(j, i) = s / d;
      }
    }
  }
  return Status::success();
}

// Unblocked LU with partial pivoting. Pivot rule: maximum absolute value,
// ties resolved to the lowest row index. ipiv is 1-based, length min(m, n).
// info=+p marks the first exactly-zero pivot; factorization continues.
inline Status naive_getrf(int m, int n, MatView a, std::vector<int>& ipiv) {
  int minmn = m < n ? m : n;
  ipiv.assign(static_cast<std::size_t>(minmn), 0);
  Status st = Status::success();
  for (int j = 0; j < minmn; ++j) {
    int p = j;
    double best = std::abs(a(j, j));
    for (int i = j + 1; i < m; ++i) {
      double v = std::abs(a(i, j));
      if (v > best) { best = v; p = i; }
    }
    ipiv[j] = p + 1;
    if (a(p, j) != 0.0) {
      if (p != j)
        for (int c = 0; c < n; ++c) { double t = a(j, c); a(j, c) = a(p, c); a(p, c) = t; }
      double inv = 1.0 / a(j, j);
      for (int i = j + 1; i < m; ++i) a(i, j) *= inv;
    } else if (st.ok()) {
      st = Status::failure(j + 1, "exactly singular");
    }
    for (int c = j + 1; c < n; ++c) {
      double f = a(j, c);
      if (f != 0.0)
        for (int i = j + 1; i < m; ++i) a(i, c) -= a(i, j) * f;
    }
  }
  return st;
}

}  // namespace panelblas::ref
