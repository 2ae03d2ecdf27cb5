#pragma once

// Netlib-shaped adapters: the standard dgemm/dsyrk/dtrmm/dtrsm/dpotrf/dgetrf
// argument lists (character flags, raw column-major pointers, leading
// dimensions, in-place updates) validated in Fortran argument order and
// delegated to the engine routines. The first offending argument is reported
// by its 1-based position exactly as the reference xerbla would receive it;
// by default the report comes back in the result, and abort_on_error turns
// it into a thrown ArgError instead.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "factor.hpp"

namespace panelblas {

struct BlasConfig {
  EngineConfig engine{};
  // Mimic reference xerbla: throw ArgError instead of returning the report.
  bool abort_on_error = false;
};

// Outcome of a netlib-shaped call. info is 0 on success. For the BLAS
// routines an invalid argument sets info to its positive 1-based position
// (the value xerbla receives); for the LAPACK routines info is negative for
// an invalid argument and positive for a numerical failure, per convention.
// error carries the routine/argument report for invalid calls only.
struct BlasResult {
  int info = 0;
  std::optional<BlasCallError> error;
  PackStats stats;
  std::int64_t flops = 0;
  GemmVariant variant = GemmVariant::D;

  bool ok() const { return info == 0; }
};

namespace detail {

inline BlasResult blas_fail(const BlasConfig& cfg, const char* routine,
                            int index, int info, const char* msg) {
  if (cfg.abort_on_error)
    throw ArgError(index, std::string(routine) + ": " + msg);
  BlasResult r;
  r.info = info;
  r.error = BlasCallError{routine, index, msg};
  return r;
}

inline BlasResult from_call(const CallResult& cr) {
  BlasResult r;
  r.info = cr.status.info;
  r.stats = cr.stats;
  r.flops = cr.flops;
  r.variant = cr.variant;
  return r;
}

inline BlasResult from_factor(const FactorResult& fr) {
  BlasResult r;
  r.info = fr.status.info;
  r.stats = fr.stats;
  r.flops = fr.flops;
  return r;
}

}  // namespace detail

inline BlasResult dgemm(const BlasConfig& cfg, char transa, char transb, int m,
                        int n, int k, double alpha, const double* a, int lda,
                        const double* b, int ldb, double beta, double* c,
                        int ldc) {
  auto fail = [&](int index, const char* msg) {
    return detail::blas_fail(cfg, "dgemm", index, index, msg);
  };
  auto ta = parse_trans(transa);
  if (!ta) return fail(1, "transa is not one of n, t, c");
  auto tb = parse_trans(transb);
  if (!tb) return fail(2, "transb is not one of n, t, c");
  if (m < 0) return fail(3, "m is negative");
  if (n < 0) return fail(4, "n is negative");
  if (k < 0) return fail(5, "k is negative");
  int nrowa = *ta == TransOp::NoTrans ? m : k;
  int nrowb = *tb == TransOp::NoTrans ? k : n;
  if (lda < std::max(1, nrowa)) return fail(8, "lda is smaller than the rows of op(a)");
  if (ldb < std::max(1, nrowb)) return fail(10, "ldb is smaller than the rows of op(b)");
  if (ldc < std::max(1, m)) return fail(13, "ldc is smaller than m");

  BlasResult r;
  if (m == 0 || n == 0) return r;
  if ((alpha == 0.0 || k == 0) && beta == 1.0) return r;

  ConstMatView av{a, *ta == TransOp::NoTrans ? m : k, *ta == TransOp::NoTrans ? k : m, lda};
  ConstMatView bv{b, *tb == TransOp::NoTrans ? k : n, *tb == TransOp::NoTrans ? n : k, ldb};
  ConstMatView cv{c, m, n, ldc};
  MatView dv{c, m, n, ldc};
  return detail::from_call(gemm(cfg.engine, *ta, *tb, m, n, k, alpha, av, bv, beta, cv, dv));
}

inline BlasResult dsyrk(const BlasConfig& cfg, char uplo, char trans, int n,
                        int k, double alpha, const double* a, int lda,
                        double beta, double* c, int ldc) {
  auto fail = [&](int index, const char* msg) {
    return detail::blas_fail(cfg, "dsyrk", index, index, msg);
  };
  auto ul = parse_uplo(uplo);
  if (!ul) return fail(1, "uplo is not one of u, l");
  auto tr = parse_trans(trans);
  if (!tr) return fail(2, "trans is not one of n, t, c");
  if (n < 0) return fail(3, "n is negative");
  if (k < 0) return fail(4, "k is negative");
  int nrowa = *tr == TransOp::NoTrans ? n : k;
  if (lda < std::max(1, nrowa)) return fail(7, "lda is smaller than the rows of op(a)");
  if (ldc < std::max(1, n)) return fail(10, "ldc is smaller than n");

  BlasResult r;
  if (n == 0) return r;
  if ((alpha == 0.0 || k == 0) && beta == 1.0) return r;

  ConstMatView av{a, *tr == TransOp::NoTrans ? n : k, *tr == TransOp::NoTrans ? k : n, lda};
  ConstMatView cv{c, n, n, ldc};
  MatView dv{c, n, n, ldc};
  return detail::from_call(syrk(cfg.engine, *ul, *tr, n, k, alpha, av, beta, cv, dv));
}

namespace detail {

// dtrmm and dtrsm share their argument list and validation order.
template <typename Engine>
inline BlasResult trimul_adapter(const BlasConfig& cfg, const char* routine,
                                 Engine&& engine, char side, char uplo,
                                 char transa, char diag, int m, int n,
                                 double alpha, const double* a, int lda,
                                 double* b, int ldb) {
  auto fail = [&](int index, const char* msg) {
    return blas_fail(cfg, routine, index, index, msg);
  };
  auto sd = parse_side(side);
  if (!sd) return fail(1, "side is not one of l, r");
  auto ul = parse_uplo(uplo);
  if (!ul) return fail(2, "uplo is not one of u, l");
  auto tr = parse_trans(transa);
  if (!tr) return fail(3, "transa is not one of n, t, c");
  auto dg = parse_diag(diag);
  if (!dg) return fail(4, "diag is not one of u, n");
  if (m < 0) return fail(5, "m is negative");
  if (n < 0) return fail(6, "n is negative");
  int nrowa = *sd == Side::Left ? m : n;
  if (lda < std::max(1, nrowa)) return fail(9, "lda is smaller than the triangle order");
  if (ldb < std::max(1, m)) return fail(11, "ldb is smaller than m");

  BlasResult r;
  if (m == 0 || n == 0) return r;

  ConstMatView av{a, nrowa, nrowa, lda};
  MatView bv{b, m, n, ldb};
  return from_call(engine(cfg.engine, *sd, *ul, *tr, *dg, m, n, alpha, av, bv));
}

}  // namespace detail

inline BlasResult dtrmm(const BlasConfig& cfg, char side, char uplo,
                        char transa, char diag, int m, int n, double alpha,
                        const double* a, int lda, double* b, int ldb) {
  auto engine = [](const EngineConfig& ecfg, Side sd, Uplo ul, TransOp tr,
                   DiagKind dg, int mm, int nn, double al, ConstMatView av,
                   MatView bv) {
    return trmm(ecfg, sd, ul, tr, dg, mm, nn, al, av, bv);
  };
  return detail::trimul_adapter(cfg, "dtrmm", engine, side, uplo, transa, diag,
                                m, n, alpha, a, lda, b, ldb);
}

inline BlasResult dtrsm(const BlasConfig& cfg, char side, char uplo,
                        char transa, char diag, int m, int n, double alpha,
                        const double* a, int lda, double* b, int ldb) {
  auto engine = [](const EngineConfig& ecfg, Side sd, Uplo ul, TransOp tr,
                   DiagKind dg, int mm, int nn, double al, ConstMatView av,
                   MatView bv) {
    return trsm(ecfg, sd, ul, tr, dg, mm, nn, al, av, bv);
  };
  return detail::trimul_adapter(cfg, "dtrsm", engine, side, uplo, transa, diag,
                                m, n, alpha, a, lda, b, ldb);
}

inline BlasResult dpotrf(const BlasConfig& cfg, char uplo, int n, double* a,
                         int lda) {
  auto fail = [&](int index, const char* msg) {
    return detail::blas_fail(cfg, "dpotrf", index, -index, msg);
  };
  auto ul = parse_uplo(uplo);
  if (!ul) return fail(1, "uplo is not one of u, l");
  if (n < 0) return fail(2, "n is negative");
  if (lda < std::max(1, n)) return fail(4, "lda is smaller than n");

  MatView av{a, n, n, lda};
  return detail::from_factor(potrf(cfg.engine, *ul, n, av));
}

inline BlasResult dgetrf(const BlasConfig& cfg, int m, int n, double* a,
                         int lda, std::vector<int>& ipiv) {
  auto fail = [&](int index, const char* msg) {
    return detail::blas_fail(cfg, "dgetrf", index, -index, msg);
  };
  if (m < 0) return fail(1, "m is negative");
  if (n < 0) return fail(2, "n is negative");
  if (lda < std::max(1, m)) return fail(4, "lda is smaller than m");

  MatView av{a, m, n, lda};
  return detail::from_factor(getrf(cfg.engine, m, n, av, ipiv));
}

}  // namespace panelblas
