#pragma once

// Factorizations on column-major views.
//
// potrf is left-looking over mr-high row bands: every tile subtracts the
// product of already-factored columns, solves or factors its edge, stores to
// the destination window, and echoes into an internal panel image of the
// factor. The echo is the only operand later tiles read, so the caller's
// matrix is read exactly once per element and d may alias a.
//
// getrf is right-looking, blocked by the tile width nr. Each panel is packed
// transposed, so a column of the transposed image is one contiguous row of
// the panel: pivot searches stride by ps, row swaps are short contiguous
// copies, and the rank-1 update walks unit stride. The factored panel then
// drives a unit-triangular solve for U12 (echoed transposed into a panel, the
// layout the trailing update consumes) and an nt update of the trailing
// matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "level3.hpp"

namespace panelblas {

// Outcome of a factorization: status (LAPACK info convention), packing and
// scratch accounting, and the conventional flop model for the shape.
struct FactorResult {
  Status status = Status::success();
  PackStats stats;
  std::int64_t flops = 0;

  bool ok() const { return status.ok(); }
};

namespace detail {

// Lower Cholesky core; with twin the caller's upper triangle is read and
// written through transposed windows, which runs the identical tile schedule
// on the mirrored storage.
inline FactorResult potrf_core(const EngineConfig& cfg, int n, ConstMatView a,
                               MatView d, bool twin) {
  const KernelConfig& kc = cfg.kernel;
  FactorResult r;
  BandPack lp(n, n, kc);
  r.stats.scratch_bytes_dynamic += static_cast<std::int64_t>(lp.mat.bytes());
  PSrc ls = psrc(lp.ref);
  PDst lpd = pdst(lp.ref);
  for (int i0 = 0; i0 < n; i0 += kc.mr) {
    int ma = std::min(kc.mr, n - i0);
    const double* lband = pband(ls, i0);
    for (int j0 = 0; j0 < i0 + ma; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      CWin asrc = twin ? cwin_trans(a, i0, j0) : cwin(a, i0, j0);
      Win adst = twin ? win_trans(d, i0, j0) : win(d, i0, j0);
      if (j0 + na <= i0) {
        CWin e = panel_diag_win(lp.ref.data, kc.ps, lp.ref.cn, j0);
        kernel_potrf_sub(kc, j0, lband, lp.ref.cn, pchunk(ls, j0), asrc, e,
                         adst, lpd, i0, j0, ma, na);
      } else {
        int p = kernel_potrf_diag(kc, j0, lband, lp.ref.cn, pchunk(ls, j0),
                                  asrc, adst, lpd, i0, j0, j0 - i0, ma, na);
        if (p != 0) {
          r.status = Status::failure(j0 + p, "matrix is not positive definite");
          return r;
        }
      }
    }
  }
  return r;
}

}  // namespace detail

// Cholesky factorization of the uplo triangle of a into d (Lower: a = L*L^T,
// Upper: a = U^T*U). The opposite triangle of d is never touched; tiles
// crossing the diagonal read a few opposite-triangle positions of a into dead
// accumulator lanes, but those values never influence any stored result. d
// may alias a exactly. info follows LAPACK: +p marks the first nonpositive
// pivot, with columns before p validly factored in d.
inline FactorResult potrf(const EngineConfig& cfg, Uplo uplo, int n,
                          ConstMatView a, MatView d) {
  FactorResult r;
  if (n < 0) { r.status = Status::failure(-2, "n < 0"); return r; }
  if (a.m != n || a.n != n) { r.status = Status::failure(-4, "a shape mismatch"); return r; }
  if (d.m != n || d.n != n) { r.status = Status::failure(-4, "d shape mismatch"); return r; }
  if (n == 0) return r;
  r = detail::potrf_core(cfg, n, a, d, uplo == Uplo::Upper);
  r.flops = static_cast<std::int64_t>(n) * n * n / 3;
  return r;
}

inline FactorResult potrf(const EngineConfig& cfg, Uplo uplo, int n, MatView a) {
  return potrf(cfg, uplo, n, a, a);
}

// LU factorization with partial pivoting: d <- L\U of a with unit L, row
// pivots in ipiv (1-based, length min(m, n), netlib order). d may alias a
// exactly. A zero pivot records the first failing column in info and the
// factorization continues, like the reference routine.
inline FactorResult getrf(const EngineConfig& cfg, int m, int n, ConstMatView a,
                          MatView d, std::vector<int>& ipiv) {
  const KernelConfig& kc = cfg.kernel;
  FactorResult r;
  if (m < 0) { r.status = Status::failure(-1, "m < 0"); return r; }
  if (n < 0) { r.status = Status::failure(-2, "n < 0"); return r; }
  if (a.m != m || a.n != n) { r.status = Status::failure(-4, "a shape mismatch"); return r; }
  if (d.m != m || d.n != n) { r.status = Status::failure(-4, "d shape mismatch"); return r; }
  int minmn = std::min(m, n);
  ipiv.assign(static_cast<std::size_t>(minmn), 0);
  if (minmn == 0) return r;
  if (d.data != a.data || d.ld != a.ld) {
    for (int j = 0; j < n; ++j) {
      const double* s = a.col(j);
      double* t = d.col(j);
      for (int i = 0; i < m; ++i) t[i] = s[i];
    }
  }

  ScratchArena arena;
  // tp: the current panel, transposed, ld = ps. upk: U12 transposed, packed
  // in ps panels of width jb. l21: one mr row block of the factored panel.
  double* tp = arena.alloc_doubles(static_cast<std::size_t>(kc.ps) * m);
  double* upk = arena.alloc_doubles(static_cast<std::size_t>(round_up(n, kc.ps)) * kc.nr);
  double* l21 = arena.alloc_doubles(static_cast<std::size_t>(kc.mr) * kc.nr);
  int first_zero = 0;

  for (int j0 = 0; j0 < minmn; j0 += kc.nr) {
    int jb = std::min(kc.nr, minmn - j0);
    int mm = m - j0;
    ConstMatView panel{d.data + j0 + static_cast<std::ptrdiff_t>(j0) * d.ld, mm, jb, d.ld};
    pack_row_block(panel, TransOp::Trans, 0, jb, kc.ps, tp, &r.stats);

    // Pivoted elimination on the transposed image: column i of tp is row
    // j0+i of the panel, so a row swap is a contiguous jb-element exchange
    // and the update runs along each such column.
    for (int c = 0; c < jb; ++c) {
      int piv = c;
      double best = std::abs(tp[static_cast<std::ptrdiff_t>(c) * kc.ps + c]);
      for (int i = c + 1; i < mm; ++i) {
        double v = std::abs(tp[static_cast<std::ptrdiff_t>(i) * kc.ps + c]);
        if (v > best) { best = v; piv = i; }
      }
      ipiv[j0 + c] = j0 + piv + 1;
      double* colc = tp + static_cast<std::ptrdiff_t>(c) * kc.ps;
      double* colp = tp + static_cast<std::ptrdiff_t>(piv) * kc.ps;
      if (colp[c] != 0.0) {
        if (piv != c)
          for (int l = 0; l < jb; ++l) std::swap(colc[l], colp[l]);
        double inv = 1.0 / colc[c];
        for (int i = c + 1; i < mm; ++i)
          tp[static_cast<std::ptrdiff_t>(i) * kc.ps + c] *= inv;
      } else if (first_zero == 0) {
        first_zero = j0 + c + 1;
      }
      for (int i = c + 1; i < mm; ++i) {
        double* coli = tp + static_cast<std::ptrdiff_t>(i) * kc.ps;
        double f = coli[c];
        if (f != 0.0)
          for (int c2 = c + 1; c2 < jb; ++c2) coli[c2] -= f * colc[c2];
      }
    }

    for (int c = 0; c < jb; ++c) {
      double* t = d.data + j0 + static_cast<std::ptrdiff_t>(j0 + c) * d.ld;
      for (int i = 0; i < mm; ++i) t[i] = tp[static_cast<std::ptrdiff_t>(i) * kc.ps + c];
    }
    r.stats.elements_packed += static_cast<std::int64_t>(jb) * mm;

    // Row swaps outside the panel, in pivot order.
    for (int c = 0; c < jb; ++c) {
      int p = ipiv[j0 + c] - 1;
      int row = j0 + c;
      if (p == row) continue;
      for (int l = 0; l < j0; ++l)
        std::swap(d(row, l), d(p, l));
      for (int l = j0 + jb; l < n; ++l)
        std::swap(d(row, l), d(p, l));
    }

    int nw = n - j0 - jb;
    if (nw == 0) continue;

    // U12 = L11^{-1} * A12, solved as the transposed right-side problem
    // against L11^T, which sits as the upper triangle of the tp image. Every
    // band stores into d and echoes U12^T into upk for the trailing update.
    CWin e{tp, 1, kc.ps};
    PDst uecho{upk, kc.ps, jb};
    for (int i0 = 0; i0 < nw; i0 += kc.mr) {
      int ma = std::min(kc.mr, nw - i0);
      kernel_trsm_right(kc, InnerKind::NN, 0, nullptr, 1, nullptr, 1, 1.0,
                        cwin_trans(d, j0 + jb + i0, j0), e, Uplo::Upper,
                        TransOp::NoTrans, DiagKind::Unit,
                        win_trans(d, j0 + jb + i0, j0), uecho, i0, 0, ma, jb);
    }

    int m2 = m - j0 - jb;
    if (m2 == 0) continue;
    ConstMatView l21view{d.data + (j0 + jb) + static_cast<std::ptrdiff_t>(j0) * d.ld, m2, jb, d.ld};
    ConstMatView a22c{d.data + (j0 + jb) + static_cast<std::ptrdiff_t>(j0 + jb) * d.ld, m2, nw, d.ld};
    MatView a22{d.data + (j0 + jb) + static_cast<std::ptrdiff_t>(j0 + jb) * d.ld, m2, nw, d.ld};
    PSrc us{upk, kc.ps, jb};
    for (int i0 = 0; i0 < m2; i0 += kc.mr) {
      int ma = std::min(kc.mr, m2 - i0);
      pack_row_block(l21view, TransOp::NoTrans, i0, ma, kc.ps, l21, &r.stats);
      if (ma < kc.mr) detail::zero_pad_rows(l21, kc.ps, jb, ma, kc.mr);
      for (int j0a = 0; j0a < nw; j0a += kc.nr) {
        int na = std::min(kc.nr, nw - j0a);
        kernel_gemm_nt_ppc(kc, jb, l21, jb, pchunk(us, j0a), -1.0, 1.0,
                           cwin(a22c, i0, j0a), win(a22, i0, j0a), ma, na);
      }
    }
  }

  arena.charge(r.stats);
  if (first_zero != 0)
    r.status = Status::failure(first_zero, "factor has an exactly zero pivot");
  r.flops = static_cast<std::int64_t>(n) * n * m -
            static_cast<std::int64_t>(n) * n * n / 3;
  return r;
}

inline FactorResult getrf(const EngineConfig& cfg, int m, int n, MatView a,
                          std::vector<int>& ipiv) {
  return getrf(cfg, m, n, a, a, ipiv);
}

}  // namespace panelblas
