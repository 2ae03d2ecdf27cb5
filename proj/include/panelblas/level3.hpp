#pragma once

// Triangular and symmetric level-3 drivers on column-major views, plus the
// non-destructive native entry points on panel-major operands.
//
// syrk mirrors the gemm engine's two outer paths: a heap pack of op(A) whose
// single panel image serves both sides of the rank-k product, or a bounded
// row-block path that streams the second side from column-major storage.
// trmm and trsm have one right-side core each; Left cases run the same core
// on the transposed problem through transposed windows. trmm packs the row
// band of B it is about to overwrite, which makes the update alias-safe in
// place; trsm keeps a row band of already-solved values as its only state.
//
// The native routines read and write panel storage directly, pack nothing,
// and allow C to alias D exactly. They cover the flag subsets the solver
// path needs; everything else belongs to the column-major drivers.

#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "gemm.hpp"

namespace panelblas {

namespace detail {

inline TransOp flip(TransOp t) {
  return t == TransOp::NoTrans ? TransOp::Trans : TransOp::NoTrans;
}

// Triangle-only d <- beta*c, still through the kernel layer.
inline void scale_tri(const EngineConfig& cfg, Uplo uplo, int n, double beta,
                      ConstMatView c, MatView d) {
  const KernelConfig& kc = cfg.kernel;
  bool up = uplo == Uplo::Upper;
  double stub = 0.0;
  for (int i0 = 0; i0 < n; i0 += kc.mr) {
    int ma = std::min(kc.mr, n - i0);
    for (int j0 = 0; j0 < i0 + ma; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      bool cross = j0 + na > i0;
      CWin cw = up ? cwin_trans(c, i0, j0) : cwin(c, i0, j0);
      Win dw = up ? win_trans(d, i0, j0) : win(d, i0, j0);
      kernel_gemm_ccc(kc, InnerKind::NN, 0, &stub, 1, &stub, 1, 0.0, beta, cw,
                      dw, ma, na, cross ? StoreShape::Lower : StoreShape::Full,
                      cross ? j0 - i0 : 0);
    }
  }
}

// Path choice for syrk: the bounded row-block path whenever one block fits
// the scratch cap and the shape is small enough, the shared heap pack
// otherwise. Only B and C are meaningful here; other forced variants fall
// back to the automatic rule.
inline GemmVariant select_syrk_path(const EngineConfig& cfg, int n, int k) {
  if (cfg.force_variant == GemmVariant::B) return GemmVariant::B;
  if (cfg.force_variant == GemmVariant::C) return GemmVariant::C;
  std::int64_t block_bytes = static_cast<std::int64_t>(cfg.kernel.mr) * k * 8;
  std::int64_t cap = cfg.bounded_scratch_cap;
  if (cap > static_cast<std::int64_t>(kBoundedArenaBytes))
    cap = static_cast<std::int64_t>(kBoundedArenaBytes);
  int maxd = n > k ? n : k;
  return block_bytes <= cap && maxd <= cfg.switch_dim ? GemmVariant::C
                                                      : GemmVariant::B;
}

// Shared-pack syrk: op(A) is packed once and read back as both the row band
// and the nt chunk of every tile, so the whole product costs one n*k pack.
inline CallResult syrk_path_b(const EngineConfig& cfg, Uplo uplo, TransOp trans,
                              int n, int k, double alpha, ConstMatView a,
                              double beta, ConstMatView c, MatView d) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  r.variant = GemmVariant::B;
  BandPack ap(n, k, kc);
  pack_from_colmajor(a, ap.ref, trans, &r.stats);
  PSrc as = psrc(ap.ref);
  bool up = uplo == Uplo::Upper;
  for (int i0 = 0; i0 < n; i0 += kc.mr) {
    int ma = std::min(kc.mr, n - i0);
    const double* aband = pband(as, i0);
    for (int j0 = 0; j0 < i0 + ma; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      bool cross = j0 + na > i0;
      CWin cw = up ? cwin_trans(c, i0, j0) : cwin(c, i0, j0);
      Win dw = up ? win_trans(d, i0, j0) : win(d, i0, j0);
      r.flops += kernel_gemm_nt_ppc(kc, k, aband, ap.ref.cn, pchunk(as, j0),
                                    alpha, beta, cw, dw, ma, na,
                                    cross ? StoreShape::Lower : StoreShape::Full,
                                    cross ? j0 - i0 : 0);
    }
  }
  r.stats.scratch_bytes_dynamic += static_cast<std::int64_t>(ap.mat.bytes());
  return r;
}

// Bounded syrk: pack one mr row block of op(A) per band and stream the
// second side natively, like gemm's variant C with both operands equal.
inline CallResult syrk_path_c(const EngineConfig& cfg, Uplo uplo, TransOp trans,
                              int n, int k, double alpha, ConstMatView a,
                              double beta, ConstMatView c, MatView d) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  r.variant = GemmVariant::C;
  InnerKind kind = trans == TransOp::NoTrans ? InnerKind::NT : InnerKind::NN;
  bool up = uplo == Uplo::Upper;
  ScratchArena arena;
  double* ablock = arena.alloc_doubles(static_cast<std::size_t>(kc.mr) * k);
  for (int i0 = 0; i0 < n; i0 += kc.mr) {
    int ma = std::min(kc.mr, n - i0);
    pack_row_block(a, trans, i0, ma, kc.ps, ablock, &r.stats);
    if (ma < kc.mr) zero_pad_rows(ablock, kc.ps, k, ma, kc.mr);
    for (int j0 = 0; j0 < i0 + ma; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      bool cross = j0 + na > i0;
      const double* bwin = kind == InnerKind::NN
                               ? a.data + static_cast<std::ptrdiff_t>(j0) * a.ld
                               : a.data + j0;
      CWin cw = up ? cwin_trans(c, i0, j0) : cwin(c, i0, j0);
      Win dw = up ? win_trans(d, i0, j0) : win(d, i0, j0);
      r.flops += kernel_gemm_pcc(kc, kind, k, ablock, k, bwin, a.ld, alpha,
                                 beta, cw, dw, ma, na,
                                 cross ? StoreShape::Lower : StoreShape::Full,
                                 cross ? j0 - i0 : 0);
    }
  }
  arena.charge(r.stats);
  return r;
}

// Right-side trmm core. mm x nn is the effective problem (already swapped
// for Left); with twin the source rows are columns of b and tiles land in d
// through transposed windows. The band of b is packed before the band's
// stores begin, so b and d may be the same matrix.
inline CallResult trmm_right_core(const EngineConfig& cfg, Uplo uplo,
                                  TransOp trans, DiagKind diag, int mm, int nn,
                                  double alpha, ConstMatView a, ConstMatView b,
                                  MatView d, bool twin) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  ScratchArena arena;
  double* xband = arena.alloc_doubles(static_cast<std::size_t>(kc.mr) * nn);
  r.variant = arena.dynamic_bytes() == 0 ? GemmVariant::C : GemmVariant::B;
  bool eff_lower = (uplo == Uplo::Lower) == (trans == TransOp::NoTrans);
  InnerKind kind = trans == TransOp::NoTrans ? InnerKind::NN : InnerKind::NT;
  for (int i0 = 0; i0 < mm; i0 += kc.mr) {
    int ma = std::min(kc.mr, mm - i0);
    pack_row_block(b, twin ? TransOp::Trans : TransOp::NoTrans, i0, ma, kc.ps,
                   xband, &r.stats);
    if (ma < kc.mr) zero_pad_rows(xband, kc.ps, nn, ma, kc.mr);
    for (int j0 = 0; j0 < nn; j0 += kc.nr) {
      int na = std::min(kc.nr, nn - j0);
      int l0 = eff_lower ? j0 + na : 0;
      int kmax = eff_lower ? nn - l0 : j0;
      const double* awin = trans == TransOp::NoTrans
                               ? a.data + l0 + static_cast<std::ptrdiff_t>(j0) * a.ld
                               : a.data + j0 + static_cast<std::ptrdiff_t>(l0) * a.ld;
      CWin e{a.data + j0 + static_cast<std::ptrdiff_t>(j0) * a.ld, 1, a.ld};
      Win dw = twin ? win_trans(d, i0, j0) : win(d, i0, j0);
      kernel_trmm_right(kc, kind, kmax, xband + static_cast<std::ptrdiff_t>(l0) * kc.ps,
                        nn, awin, a.ld, xband, j0, e, uplo, trans, diag, alpha,
                        dw, ma, na);
    }
  }
  arena.charge(r.stats);
  return r;
}

// Right-side trsm core. Column tiles are solved in dependency order
// (descending when the effective triangle is lower) and every solved tile is
// echoed into a row-band pack, the only operand later tiles read, so b and d
// may be the same matrix.
inline CallResult trsm_right_core(const EngineConfig& cfg, Uplo uplo,
                                  TransOp trans, DiagKind diag, int mm, int nn,
                                  double alpha, ConstMatView a, ConstMatView b,
                                  MatView d, bool twin) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  ScratchArena arena;
  double* xblk = arena.alloc_doubles(static_cast<std::size_t>(kc.mr) * nn);
  std::fill_n(xblk, static_cast<std::size_t>(kc.mr) * nn, 0.0);
  r.variant = arena.dynamic_bytes() == 0 ? GemmVariant::C : GemmVariant::B;
  bool eff_lower = (uplo == Uplo::Lower) == (trans == TransOp::NoTrans);
  InnerKind kind = trans == TransOp::NoTrans ? InnerKind::NN : InnerKind::NT;
  int ntiles = (nn + kc.nr - 1) / kc.nr;
  PDst echo{xblk, kc.ps, nn};
  for (int i0 = 0; i0 < mm; i0 += kc.mr) {
    int ma = std::min(kc.mr, mm - i0);
    for (int ti = 0; ti < ntiles; ++ti) {
      int j0 = (eff_lower ? ntiles - 1 - ti : ti) * kc.nr;
      int na = std::min(kc.nr, nn - j0);
      int l0 = eff_lower ? j0 + na : 0;
      int kmax = eff_lower ? nn - l0 : j0;
      const double* awin = trans == TransOp::NoTrans
                               ? a.data + l0 + static_cast<std::ptrdiff_t>(j0) * a.ld
                               : a.data + j0 + static_cast<std::ptrdiff_t>(l0) * a.ld;
      CWin e{a.data + j0 + static_cast<std::ptrdiff_t>(j0) * a.ld, 1, a.ld};
      CWin bs = twin ? cwin_trans(b, i0, j0) : cwin(b, i0, j0);
      Win dw = twin ? win_trans(d, i0, j0) : win(d, i0, j0);
      int p = kernel_trsm_right(kc, kind, kmax,
                                xblk + static_cast<std::ptrdiff_t>(l0) * kc.ps,
                                nn, awin, a.ld, alpha, bs, e, uplo, trans, diag,
                                dw, echo, 0, j0, ma, na);
      if (p != 0) {
        r.status = Status::failure(j0 + p, "triangular factor has an exactly zero diagonal");
        arena.charge(r.stats);
        return r;
      }
    }
  }
  arena.charge(r.stats);
  return r;
}

}  // namespace detail

// d <- alpha*op(a)*op(a)^T + beta*c on the uplo triangle; the other triangle
// of d is never touched (and never read from c). d may alias c exactly.
inline CallResult syrk(const EngineConfig& cfg, Uplo uplo, TransOp trans, int n,
                       int k, double alpha, ConstMatView a, double beta,
                       ConstMatView c, MatView d) {
  CallResult r;
  if (n < 0) { r.status = Status::failure(-3, "n < 0"); return r; }
  if (k < 0) { r.status = Status::failure(-4, "k < 0"); return r; }
  int am = trans == TransOp::NoTrans ? n : k;
  int an = trans == TransOp::NoTrans ? k : n;
  if (a.m != am || a.n != an) { r.status = Status::failure(-7, "a shape mismatch"); return r; }
  if (c.m != n || c.n != n) { r.status = Status::failure(-10, "c shape mismatch"); return r; }
  if (d.m != n || d.n != n) { r.status = Status::failure(-10, "d shape mismatch"); return r; }
  if (n == 0) return r;
  if (alpha == 0.0 || k == 0) {
    detail::scale_tri(cfg, uplo, n, beta, c, d);
    return r;
  }
  return detail::select_syrk_path(cfg, n, k) == GemmVariant::B
             ? detail::syrk_path_b(cfg, uplo, trans, n, k, alpha, a, beta, c, d)
             : detail::syrk_path_c(cfg, uplo, trans, n, k, alpha, a, beta, c, d);
}

// In-place form: c is both source and destination.
inline CallResult syrk(const EngineConfig& cfg, Uplo uplo, TransOp trans, int n,
                       int k, double alpha, ConstMatView a, double beta,
                       MatView c) {
  return syrk(cfg, uplo, trans, n, k, alpha, a, beta, c, c);
}

// d <- alpha*op(a)*b (Left) or alpha*b*op(a) (Right) with a triangular.
// d may alias b exactly; it may not overlap a.
inline CallResult trmm(const EngineConfig& cfg, Side side, Uplo uplo,
                       TransOp transa, DiagKind diag, int m, int n, double alpha,
                       ConstMatView a, ConstMatView b, MatView d) {
  CallResult r;
  int t = side == Side::Left ? m : n;
  if (m < 0) { r.status = Status::failure(-5, "m < 0"); return r; }
  if (n < 0) { r.status = Status::failure(-6, "n < 0"); return r; }
  if (a.m != t || a.n != t) { r.status = Status::failure(-9, "a shape mismatch"); return r; }
  if (b.m != m || b.n != n) { r.status = Status::failure(-11, "b shape mismatch"); return r; }
  if (d.m != m || d.n != n) { r.status = Status::failure(-11, "d shape mismatch"); return r; }
  if (m == 0 || n == 0) return r;
  if (alpha == 0.0) return detail::scale_only(cfg, m, n, 0.0, b, d);
  r = side == Side::Right
          ? detail::trmm_right_core(cfg, uplo, transa, diag, m, n, alpha, a, b, d, false)
          : detail::trmm_right_core(cfg, uplo, detail::flip(transa), diag, n, m,
                                    alpha, a, b, d, true);
  r.flops = side == Side::Left ? static_cast<std::int64_t>(n) * m * m
                               : static_cast<std::int64_t>(m) * n * n;
  return r;
}

inline CallResult trmm(const EngineConfig& cfg, Side side, Uplo uplo,
                       TransOp transa, DiagKind diag, int m, int n, double alpha,
                       ConstMatView a, MatView b) {
  return trmm(cfg, side, uplo, transa, diag, m, n, alpha, a, b, b);
}

// Solve op(a)*X = alpha*b (Left) or X*op(a) = alpha*b (Right) into d, with a
// triangular. d may alias b exactly. An exactly zero NonUnit diagonal fails
// with its 1-based index before anything is written.
inline CallResult trsm(const EngineConfig& cfg, Side side, Uplo uplo,
                       TransOp transa, DiagKind diag, int m, int n, double alpha,
                       ConstMatView a, ConstMatView b, MatView d) {
  CallResult r;
  int t = side == Side::Left ? m : n;
  if (m < 0) { r.status = Status::failure(-5, "m < 0"); return r; }
  if (n < 0) { r.status = Status::failure(-6, "n < 0"); return r; }
  if (a.m != t || a.n != t) { r.status = Status::failure(-9, "a shape mismatch"); return r; }
  if (b.m != m || b.n != n) { r.status = Status::failure(-11, "b shape mismatch"); return r; }
  if (d.m != m || d.n != n) { r.status = Status::failure(-11, "d shape mismatch"); return r; }
  if (m == 0 || n == 0) return r;
  if (alpha == 0.0) return detail::scale_only(cfg, m, n, 0.0, b, d);
  if (diag == DiagKind::NonUnit) {
    for (int i = 0; i < t; ++i) {
      if (a(i, i) == 0.0) {
        r.status = Status::failure(i + 1, "triangular factor has an exactly zero diagonal");
        return r;
      }
    }
  }
  r = side == Side::Right
          ? detail::trsm_right_core(cfg, uplo, transa, diag, m, n, alpha, a, b, d, false)
          : detail::trsm_right_core(cfg, uplo, detail::flip(transa), diag, n, m,
                                    alpha, a, b, d, true);
  if (r.ok())
    r.flops = side == Side::Left ? static_cast<std::int64_t>(n) * m * m
                                 : static_cast<std::int64_t>(m) * n * n;
  return r;
}

inline CallResult trsm(const EngineConfig& cfg, Side side, Uplo uplo,
                       TransOp transa, DiagKind diag, int m, int n, double alpha,
                       ConstMatView a, MatView b) {
  return trsm(cfg, side, uplo, transa, diag, m, n, alpha, a, b, b);
}

// Outcome of a native panel-operand call: these routines pack nothing and
// use no scratch, so status and the inner-product flop count are the story.
struct NdResult {
  Status status = Status::success();
  std::int64_t flops = 0;

  bool ok() const { return status.ok(); }
};

namespace detail {

inline bool panel_arg_ok(ConstPanelRef r, int ps, int m, int n) {
  return r.data != nullptr && r.ps == ps && r.m == m && r.n == n;
}

inline bool panel_arg_ok(const PanelRef& r, int ps, int m, int n) {
  return r.data != nullptr && r.ps == ps && r.m == m && r.n == n;
}

// Strided window over a diagonal block of a panel matrix. A block of width
// <= nr starting at a tile column never crosses a panel boundary, so rows
// are contiguous and columns are ps apart.
inline CWin panel_diag_win(const double* data, int ps, int cn, int j0) {
  return {data + panel_offset(j0, j0, ps, cn), 1, ps};
}

inline void scale_tiles_nd(const KernelConfig& kc, int m, int n, double beta,
                           PSrc c, PDst d) {
  for (int i0 = 0; i0 < m; i0 += kc.mr) {
    KernelConfig kb = clamp_band(kc, m - i0);
    int ma = std::min(kc.mr, m - i0);
    for (int j0 = 0; j0 < n; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      kernel_gemm_nt_ppp(kb, 0, d.data, 1, d.data, 0.0, beta, c, i0, j0, d, i0,
                         j0, ma, na);
    }
  }
}

}  // namespace detail

// d <- alpha*a*op(b) + beta*c, all operands panel-major with the configured
// panel height. a must be untransposed (there is no native TN/TT pairing);
// c may alias d exactly.
inline NdResult gemm_nd(const EngineConfig& cfg, TransOp transa, TransOp transb,
                        int m, int n, int k, double alpha, ConstPanelRef a,
                        ConstPanelRef b, double beta, ConstPanelRef c,
                        PanelRef d) {
  const KernelConfig& kc = cfg.kernel;
  NdResult r;
  if (transa != TransOp::NoTrans) {
    r.status = Status::failure(kInfoUnsupported, "native gemm requires untransposed a");
    return r;
  }
  if (m < 0) { r.status = Status::failure(-4, "m < 0"); return r; }
  if (n < 0) { r.status = Status::failure(-5, "n < 0"); return r; }
  if (k < 0) { r.status = Status::failure(-6, "k < 0"); return r; }
  int bm = transb == TransOp::NoTrans ? k : n;
  int bn = transb == TransOp::NoTrans ? n : k;
  if (!detail::panel_arg_ok(a, kc.ps, m, k)) { r.status = Status::failure(-8, "a panel mismatch"); return r; }
  if (!detail::panel_arg_ok(b, kc.ps, bm, bn)) { r.status = Status::failure(-9, "b panel mismatch"); return r; }
  if (!detail::panel_arg_ok(c, kc.ps, m, n)) { r.status = Status::failure(-11, "c panel mismatch"); return r; }
  if (!detail::panel_arg_ok(d, kc.ps, m, n)) { r.status = Status::failure(-12, "d panel mismatch"); return r; }
  if (m == 0 || n == 0) return r;
  PSrc cs = psrc(c);
  PDst dd = pdst(d);
  if (alpha == 0.0 || k == 0) {
    detail::scale_tiles_nd(kc, m, n, beta, cs, dd);
    return r;
  }
  PSrc as = psrc(a);
  PSrc bs = psrc(b);
  for (int i0 = 0; i0 < m; i0 += kc.mr) {
    KernelConfig kb = clamp_band(kc, m - i0);
    int ma = std::min(kc.mr, m - i0);
    const double* aband = pband(as, i0);
    for (int j0 = 0; j0 < n; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      r.flops += transb == TransOp::NoTrans
                     ? kernel_gemm_nn_ppp(kb, k, aband, a.cn, bs, 0, j0, alpha,
                                          beta, cs, i0, j0, dd, i0, j0, ma, na)
                     : kernel_gemm_nt_ppp(kb, k, aband, a.cn, pchunk(bs, j0),
                                          alpha, beta, cs, i0, j0, dd, i0, j0,
                                          ma, na);
    }
  }
  return r;
}

// Lower triangle of d <- alpha*a*a^T + beta*c, panel operands. Entries
// strictly above the diagonal of d are not touched. c may alias d exactly.
inline NdResult syrk_nd(const EngineConfig& cfg, int n, int k, double alpha,
                        ConstPanelRef a, double beta, ConstPanelRef c,
                        PanelRef d) {
  const KernelConfig& kc = cfg.kernel;
  NdResult r;
  if (n < 0) { r.status = Status::failure(-2, "n < 0"); return r; }
  if (k < 0) { r.status = Status::failure(-3, "k < 0"); return r; }
  if (!detail::panel_arg_ok(a, kc.ps, n, k)) { r.status = Status::failure(-5, "a panel mismatch"); return r; }
  if (!detail::panel_arg_ok(c, kc.ps, n, n)) { r.status = Status::failure(-7, "c panel mismatch"); return r; }
  if (!detail::panel_arg_ok(d, kc.ps, n, n)) { r.status = Status::failure(-8, "d panel mismatch"); return r; }
  if (n == 0) return r;
  PSrc as = psrc(a);
  PSrc cs = psrc(c);
  PDst dd = pdst(d);
  bool scale_pass = alpha == 0.0 || k == 0;
  for (int i0 = 0; i0 < n; i0 += kc.mr) {
    KernelConfig kb = clamp_band(kc, n - i0);
    int ma = std::min(kc.mr, n - i0);
    const double* aband = pband(as, i0);
    for (int j0 = 0; j0 < i0 + ma; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      bool cross = j0 + na > i0;
      StoreShape shape = cross ? StoreShape::Lower : StoreShape::Full;
      int ds = cross ? j0 - i0 : 0;
      if (scale_pass)
        kernel_gemm_nt_ppp(kb, 0, dd.data, 1, dd.data, 0.0, beta, cs, i0, j0,
                           dd, i0, j0, ma, na, shape, ds);
      else
        r.flops += kernel_gemm_nt_ppp(kb, k, aband, a.cn, pchunk(as, j0), alpha,
                                      beta, cs, i0, j0, dd, i0, j0, ma, na,
                                      shape, ds);
    }
  }
  return r;
}

// d <- alpha*b*a with a lower-triangular, not unit, untransposed; panel
// operands. b may alias d exactly: each tile reads band columns at or past
// its own and the sweep stores strictly behind them.
inline NdResult trmm_rlnn_nd(const EngineConfig& cfg, int m, int n, double alpha,
                             ConstPanelRef a, ConstPanelRef b, PanelRef d) {
  const KernelConfig& kc = cfg.kernel;
  NdResult r;
  if (m < 0) { r.status = Status::failure(-2, "m < 0"); return r; }
  if (n < 0) { r.status = Status::failure(-3, "n < 0"); return r; }
  if (!detail::panel_arg_ok(a, kc.ps, n, n)) { r.status = Status::failure(-5, "a panel mismatch"); return r; }
  if (!detail::panel_arg_ok(b, kc.ps, m, n)) { r.status = Status::failure(-6, "b panel mismatch"); return r; }
  if (!detail::panel_arg_ok(d, kc.ps, m, n)) { r.status = Status::failure(-7, "d panel mismatch"); return r; }
  if (m == 0 || n == 0) return r;
  PSrc bs = psrc(b);
  PDst dd = pdst(d);
  if (alpha == 0.0) {
    detail::scale_tiles_nd(kc, m, n, 0.0, bs, dd);
    return r;
  }
  PSrc as = psrc(a);
  for (int i0 = 0; i0 < m; i0 += kc.mr) {
    KernelConfig kb = clamp_band(kc, m - i0);
    int ma = std::min(kc.mr, m - i0);
    const double* xband = pband(bs, i0);
    for (int j0 = 0; j0 < n; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      int l0 = j0 + na;
      CWin e = detail::panel_diag_win(a.data, kc.ps, a.cn, j0);
      kernel_trmm_right_p(kb, n - l0, xband + static_cast<std::ptrdiff_t>(l0) * kc.ps,
                          b.cn, as, l0, j0, xband, j0, e, Uplo::Lower,
                          TransOp::NoTrans, DiagKind::NonUnit, alpha, dd, i0,
                          j0, ma, na);
    }
  }
  r.flops = static_cast<std::int64_t>(m) * n * n;
  return r;
}

// d <- alpha*b*a^{-T} with a lower-triangular, not unit: solves
// X*a^T = alpha*b column tile by column tile, reading already-solved
// columns from d itself. b may alias d exactly.
inline NdResult trsm_rltn_nd(const EngineConfig& cfg, int m, int n, double alpha,
                             ConstPanelRef a, ConstPanelRef b, PanelRef d) {
  const KernelConfig& kc = cfg.kernel;
  NdResult r;
  if (m < 0) { r.status = Status::failure(-2, "m < 0"); return r; }
  if (n < 0) { r.status = Status::failure(-3, "n < 0"); return r; }
  if (!detail::panel_arg_ok(a, kc.ps, n, n)) { r.status = Status::failure(-5, "a panel mismatch"); return r; }
  if (!detail::panel_arg_ok(b, kc.ps, m, n)) { r.status = Status::failure(-6, "b panel mismatch"); return r; }
  if (!detail::panel_arg_ok(d, kc.ps, m, n)) { r.status = Status::failure(-7, "d panel mismatch"); return r; }
  if (m == 0 || n == 0) return r;
  for (int i = 0; i < n; ++i) {
    if (a.data[panel_offset(i, i, kc.ps, a.cn)] == 0.0) {
      r.status = Status::failure(i + 1, "triangular factor has an exactly zero diagonal");
      return r;
    }
  }
  PSrc bs = psrc(b);
  PDst dd = pdst(d);
  if (alpha == 0.0) {
    detail::scale_tiles_nd(kc, m, n, 0.0, bs, dd);
    return r;
  }
  PSrc as = psrc(a);
  PSrc dsolved{d.data, d.ps, d.cn};
  for (int i0 = 0; i0 < m; i0 += kc.mr) {
    KernelConfig kb = clamp_band(kc, m - i0);
    int ma = std::min(kc.mr, m - i0);
    const double* solved = pband(dsolved, i0);
    for (int j0 = 0; j0 < n; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      CWin e = detail::panel_diag_win(a.data, kc.ps, a.cn, j0);
      int p = kernel_trsm_right_ppp(kb, j0, solved, d.cn, pchunk(as, j0), alpha,
                                    bs, i0, j0, e, Uplo::Lower, TransOp::Trans,
                                    DiagKind::NonUnit, dd, i0, j0, ma, na);
      if (p != 0) {
        r.status = Status::failure(j0 + p, "triangular factor has an exactly zero diagonal");
        return r;
      }
    }
  }
  r.flops = static_cast<std::int64_t>(m) * n * n;
  return r;
}

// Fused update-and-factor: lower triangle of d <- cholesky(c + a*b^T),
// left-looking, panel operands. Tiles strictly above the diagonal of d are
// untouched; crossing tiles are zero-filled above the diagonal so the
// factor's panels read back cleanly. c may alias d exactly. Fails with the
// 1-based column index when the updated matrix is not positive definite.
inline NdResult syrk_potrf_nd(const EngineConfig& cfg, int n, int k,
                              ConstPanelRef a, ConstPanelRef b, ConstPanelRef c,
                              PanelRef d) {
  const KernelConfig& kc = cfg.kernel;
  NdResult r;
  if (n < 0) { r.status = Status::failure(-2, "n < 0"); return r; }
  if (k < 0) { r.status = Status::failure(-3, "k < 0"); return r; }
  if (!detail::panel_arg_ok(a, kc.ps, n, k)) { r.status = Status::failure(-4, "a panel mismatch"); return r; }
  if (!detail::panel_arg_ok(b, kc.ps, n, k)) { r.status = Status::failure(-5, "b panel mismatch"); return r; }
  if (!detail::panel_arg_ok(c, kc.ps, n, n)) { r.status = Status::failure(-6, "c panel mismatch"); return r; }
  if (!detail::panel_arg_ok(d, kc.ps, n, n)) { r.status = Status::failure(-7, "d panel mismatch"); return r; }
  if (n == 0) return r;
  PSrc as = psrc(a);
  PSrc bs = psrc(b);
  PSrc cs = psrc(c);
  PDst dd = pdst(d);
  PSrc dsolved{d.data, d.ps, d.cn};
  for (int i0 = 0; i0 < n; i0 += kc.mr) {
    KernelConfig kb = clamp_band(kc, n - i0);
    int ma = std::min(kc.mr, n - i0);
    const double* dband = pband(dsolved, i0);
    const double* aband = pband(as, i0);
    for (int j0 = 0; j0 < i0 + ma; j0 += kc.nr) {
      int na = std::min(kc.nr, n - j0);
      if (j0 + na <= i0) {
        CWin e = detail::panel_diag_win(d.data, kc.ps, d.cn, j0);
        kernel_syrk_potrf_sub(kb, j0, dband, d.cn, pchunk(dsolved, j0), cs, k,
                              aband, a.cn, pchunk(bs, j0), e, dd, i0, j0, ma, na);
      } else {
        int p = kernel_syrk_potrf_diag(kb, j0, dband, d.cn, pchunk(dsolved, j0),
                                       cs, k, aband, a.cn, pchunk(bs, j0), dd,
                                       i0, j0, j0 - i0, ma, na);
        if (p != 0) {
          r.status = Status::failure(j0 + p, "updated matrix is not positive definite");
          return r;
        }
      }
    }
  }
  r.flops = static_cast<std::int64_t>(n) * n * n / 3 +
            static_cast<std::int64_t>(n) * n * k;
  return r;
}

}  // namespace panelblas
