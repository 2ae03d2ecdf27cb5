#pragma once

// Micro-kernel layer. A kernel never contains numerical code of its own: it
// is a strict chain of sub-operations over one mr x nr accumulation tile,
//
//   tile_zero -> inner_gemm_* -> scale -> (edge op) -> masked store
//
// so every routine in the library differs only in which sub-operations it
// chains and where operands live (panel-major or column-major). Inner
// products accumulate with a fixed order: l outermost, then column-major
// over the tile. All inner_gemm variants therefore produce identical
// rounding for the same logical operands regardless of operand layout.

#include <cmath>
#include <cstdint>

#include "panelblas/panel_mat.hpp"

namespace panelblas {

// Tile geometry. mr must be a multiple of ps and at most 3*ps; nr must
// divide ps (panel row chunks of nr rows never straddle a panel boundary)
// and not exceed mr. mutation_epsilon is a fault-injection hook for
// negative-control tests: when nonzero every kernel perturbs its tile after
// the scale step, which the differential verification suite must detect.
struct KernelConfig {
  int ps = 4;
  int mr = 8;
  int nr = 4;
  double mutation_epsilon = 0.0;

  int panels() const { return mr / ps; }
};

inline bool kernel_config_valid(const KernelConfig& kc) {
  if (kc.ps != 4 && kc.ps != 8) return false;
  if (kc.mr != kc.ps && kc.mr != 2 * kc.ps && kc.mr != 3 * kc.ps) return false;
  if (kc.ps == 4 && kc.nr != 4) return false;
  if (kc.ps == 8 && kc.nr != 4 && kc.nr != 8) return false;
  return kc.mr >= kc.nr;
}

// Shrink mr for a trailing row band so full-height band reads stay inside a
// ps-rounded allocation.  Packs produced internally are padded to mr rows and
// never need this; panels handed in by callers are only padded to ps.
inline KernelConfig clamp_band(const KernelConfig& kc, int rows_left) {
  if (rows_left >= kc.mr) return kc;
  KernelConfig out = kc;
  out.mr = ((rows_left + kc.ps - 1) / kc.ps) * kc.ps;
  return out;
}

inline constexpr int kTileLd = 24;   // 3 * max panel height
inline constexpr int kTileMaxNr = 8;

// Explicitly sized accumulation tile; lives in the kernel's frame.
struct AccTile {
  double v[kTileLd * kTileMaxNr];
  double& at(int i, int j) { return v[i + j * kTileLd]; }
  double at(int i, int j) const { return v[i + j * kTileLd]; }
};

enum class LayoutTag { Panel, Col };
enum class InnerKind { NN, NT };
enum class StoreShape { Full, Lower, Upper, LowerZero };

// Strided read-only window; rs/cs are element strides. A column-major
// window is {p, 1, ld}; the transposed view of the same storage is
// {p, ld, 1}, which is how transposed destinations reuse every sub-op.
struct CWin {
  const double* p = nullptr;
  std::ptrdiff_t rs = 1, cs = 1;
  double at(int r, int c) const { return p[r * rs + c * cs]; }
};

struct Win {
  double* p = nullptr;
  std::ptrdiff_t rs = 1, cs = 1;
  double& at(int r, int c) const { return p[r * rs + c * cs]; }
  operator CWin() const { return {p, rs, cs}; }
};

inline CWin cwin(ConstMatView v, int i0, int j0) {
  return {v.data + i0 + static_cast<std::ptrdiff_t>(j0) * v.ld, 1, v.ld};
}
inline Win win(MatView v, int i0, int j0) {
  return {v.data + i0 + static_cast<std::ptrdiff_t>(j0) * v.ld, 1, v.ld};
}
// Window onto v^T starting at element (i0, j0) of the transposed matrix.
inline CWin cwin_trans(ConstMatView v, int i0, int j0) {
  return {v.data + j0 + static_cast<std::ptrdiff_t>(i0) * v.ld, v.ld, 1};
}
inline Win win_trans(MatView v, int i0, int j0) {
  return {v.data + j0 + static_cast<std::ptrdiff_t>(i0) * v.ld, v.ld, 1};
}

// Panel storage origin descriptors used by kernels. cn is the panel width
// in elements (padded for whole matrices, the raw column count for packed
// row blocks).
struct PSrc {
  const double* data = nullptr;
  int ps = 4;
  int cn = 0;
};
struct PDst {
  double* data = nullptr;
  int ps = 4;
  int cn = 0;
};

inline PSrc psrc(ConstPanelRef r) { return {r.data, r.ps, r.cn}; }
inline PSrc psrc(const PanelRef& r) { return {r.data, r.ps, r.cn}; }
inline PDst pdst(const PanelRef& r) { return {r.data, r.ps, r.cn}; }

// Start of the ps-aligned row band holding row i0.
inline const double* pband(PSrc s, int i0) {
  return s.data + static_cast<std::ptrdiff_t>(i0 / s.ps) * s.ps * s.cn;
}
// nr-row chunk starting at row j0 inside one panel: element (j, l) of the
// chunk sits at chunk[l*ps + j]. Requires j0 % nr == 0 and nr | ps.
inline const double* pchunk(PSrc s, int j0) {
  return s.data + static_cast<std::ptrdiff_t>(j0 / s.ps) * s.ps * s.cn + j0 % s.ps;
}

inline void tile_zero(const KernelConfig& kc, AccTile& t) {
  for (int j = 0; j < kc.nr; ++j)
    for (int i = 0; i < kc.mr; ++i) t.at(i, j) = 0.0;
}

namespace detail {

template <int PS, int NR>
std::int64_t nt_pp_impl(int kmax, const double* a, int cn_a, const double* b,
                        double* t, int mr) {
  const int npan = mr / PS;
  for (int l = 0; l < kmax; ++l) {
    const double* al = a + static_cast<std::ptrdiff_t>(l) * PS;
    const double* bl = b + static_cast<std::ptrdiff_t>(l) * PS;
    for (int j = 0; j < NR; ++j) {
      const double bj = bl[j];
      double* tc = t + j * kTileLd;
      for (int p = 0; p < npan; ++p) {
        const double* ap = al + static_cast<std::ptrdiff_t>(p) * PS * cn_a;
        double* tp = tc + p * PS;
        for (int ii = 0; ii < PS; ++ii) tp[ii] += ap[ii] * bj;
      }
    }
  }
  return 2LL * mr * NR * kmax;
}

template <int PS, int NR>
std::int64_t nn_pp_impl(int kmax, const double* a, int cn_a, const double* bdata,
                        int cn_b, int l0, int j0, double* t, int mr) {
  const int npan = mr / PS;
  for (int l = 0; l < kmax; ++l) {
    const int lb = l0 + l;
    const double* al = a + static_cast<std::ptrdiff_t>(l) * PS;
    const double* bl = bdata + static_cast<std::ptrdiff_t>(lb / PS) * PS * cn_b + lb % PS;
    for (int j = 0; j < NR; ++j) {
      const double bj = bl[static_cast<std::ptrdiff_t>(j0 + j) * PS];
      double* tc = t + j * kTileLd;
      for (int p = 0; p < npan; ++p) {
        const double* ap = al + static_cast<std::ptrdiff_t>(p) * PS * cn_a;
        double* tp = tc + p * PS;
        for (int ii = 0; ii < PS; ++ii) tp[ii] += ap[ii] * bj;
      }
    }
  }
  return 2LL * mr * NR * kmax;
}

template <int PS>
std::int64_t pc_impl(int kmax, const double* a, int cn_a, const double* b, int ldb,
                     bool b_trans, double* t, int mr, int n_act) {
  const int npan = mr / PS;
  for (int l = 0; l < kmax; ++l) {
    const double* al = a + static_cast<std::ptrdiff_t>(l) * PS;
    for (int j = 0; j < n_act; ++j) {
      const double bj = b_trans ? b[j + static_cast<std::ptrdiff_t>(l) * ldb]
                                : b[l + static_cast<std::ptrdiff_t>(j) * ldb];
      double* tc = t + j * kTileLd;
      for (int p = 0; p < npan; ++p) {
        const double* ap = al + static_cast<std::ptrdiff_t>(p) * PS * cn_a;
        double* tp = tc + p * PS;
        for (int ii = 0; ii < PS; ++ii) tp[ii] += ap[ii] * bj;
      }
    }
  }
  return 2LL * mr * n_act * kmax;
}

}  // namespace detail

// tile += A_band * B_chunk^T; A is an mr-row panel band, B an nr-row chunk.
inline std::int64_t inner_gemm_nt_pp(const KernelConfig& kc, int kmax,
                                     const double* a, int cn_a, const double* b,
                                     AccTile& t) {
  if (kc.ps == 4) return detail::nt_pp_impl<4, 4>(kmax, a, cn_a, b, t.v, kc.mr);
  if (kc.nr == 4) return detail::nt_pp_impl<8, 4>(kmax, a, cn_a, b, t.v, kc.mr);
  return detail::nt_pp_impl<8, 8>(kmax, a, cn_a, b, t.v, kc.mr);
}

// tile += A_band * B(l0:l0+kmax, j0:j0+nr); B read natively in panel storage.
inline std::int64_t inner_gemm_nn_pp(const KernelConfig& kc, int kmax,
                                     const double* a, int cn_a, PSrc b, int l0,
                                     int j0, AccTile& t) {
  if (kc.ps == 4) return detail::nn_pp_impl<4, 4>(kmax, a, cn_a, b.data, b.cn, l0, j0, t.v, kc.mr);
  if (kc.nr == 4) return detail::nn_pp_impl<8, 4>(kmax, a, cn_a, b.data, b.cn, l0, j0, t.v, kc.mr);
  return detail::nn_pp_impl<8, 8>(kmax, a, cn_a, b.data, b.cn, l0, j0, t.v, kc.mr);
}

// tile += A_band * B where B is a kmax x n_act column-major window.
inline std::int64_t inner_gemm_nn_pc(const KernelConfig& kc, int kmax,
                                     const double* a, int cn_a, const double* b,
                                     int ldb, AccTile& t, int n_act) {
  if (kc.ps == 4) return detail::pc_impl<4>(kmax, a, cn_a, b, ldb, false, t.v, kc.mr, n_act);
  return detail::pc_impl<8>(kmax, a, cn_a, b, ldb, false, t.v, kc.mr, n_act);
}

// tile += A_band * B^T where B is an n_act x kmax column-major window.
inline std::int64_t inner_gemm_nt_pc(const KernelConfig& kc, int kmax,
                                     const double* a, int cn_a, const double* b,
                                     int ldb, AccTile& t, int n_act) {
  if (kc.ps == 4) return detail::pc_impl<4>(kmax, a, cn_a, b, ldb, true, t.v, kc.mr, n_act);
  return detail::pc_impl<8>(kmax, a, cn_a, b, ldb, true, t.v, kc.mr, n_act);
}

// tile += A * B, both column-major windows, masked to m_act x n_act.
inline std::int64_t inner_gemm_nn_cc(const KernelConfig& kc, int kmax,
                                     const double* a, int lda, const double* b,
                                     int ldb, AccTile& t, int m_act, int n_act) {
  (void)kc;
  for (int l = 0; l < kmax; ++l) {
    const double* al = a + static_cast<std::ptrdiff_t>(l) * lda;
    for (int j = 0; j < n_act; ++j) {
      const double bj = b[l + static_cast<std::ptrdiff_t>(j) * ldb];
      double* tc = t.v + j * kTileLd;
      for (int i = 0; i < m_act; ++i) tc[i] += al[i] * bj;
    }
  }
  return 2LL * m_act * n_act * kmax;
}

// tile += A * B^T, both column-major windows, masked to m_act x n_act.
inline std::int64_t inner_gemm_nt_cc(const KernelConfig& kc, int kmax,
                                     const double* a, int lda, const double* b,
                                     int ldb, AccTile& t, int m_act, int n_act) {
  (void)kc;
  for (int l = 0; l < kmax; ++l) {
    const double* al = a + static_cast<std::ptrdiff_t>(l) * lda;
    for (int j = 0; j < n_act; ++j) {
      const double bj = b[j + static_cast<std::ptrdiff_t>(l) * ldb];
      double* tc = t.v + j * kTileLd;
      for (int i = 0; i < m_act; ++i) tc[i] += al[i] * bj;
    }
  }
  return 2LL * m_act * n_act * kmax;
}

// tile <- alpha*tile + beta*csrc. beta == 0 never reads csrc, so C may hold
// anything (including NaN) when it is not part of the result.
inline void scale_ab(const KernelConfig& kc, double alpha, double beta, CWin c,
                     AccTile& t, int m_act, int n_act) {
  (void)kc;
  if (beta == 0.0) {
    for (int j = 0; j < n_act; ++j)
      for (int i = 0; i < m_act; ++i) t.at(i, j) *= alpha;
  } else {
    for (int j = 0; j < n_act; ++j)
      for (int i = 0; i < m_act; ++i) t.at(i, j) = alpha * t.at(i, j) + beta * c.at(i, j);
  }
}

inline void scale_ab_p(const KernelConfig& kc, double alpha, double beta, PSrc c,
                       int i0, int j0, AccTile& t, int m_act, int n_act) {
  (void)kc;
  if (beta == 0.0) {
    for (int j = 0; j < n_act; ++j)
      for (int i = 0; i < m_act; ++i) t.at(i, j) *= alpha;
  } else {
    for (int j = 0; j < n_act; ++j)
      for (int i = 0; i < m_act; ++i)
        t.at(i, j) = alpha * t.at(i, j) + beta * c.data[panel_offset(i0 + i, j0 + j, c.ps, c.cn)];
  }
}

// tile <- csrc - tile (the factorization update form).
inline void scale_m11(const KernelConfig& kc, CWin c, AccTile& t, int m_act, int n_act) {
  (void)kc;
  for (int j = 0; j < n_act; ++j)
    for (int i = 0; i < m_act; ++i) t.at(i, j) = c.at(i, j) - t.at(i, j);
}

inline void scale_m11_p(const KernelConfig& kc, PSrc c, int i0, int j0, AccTile& t,
                        int m_act, int n_act) {
  (void)kc;
  for (int j = 0; j < n_act; ++j)
    for (int i = 0; i < m_act; ++i)
      t.at(i, j) = c.data[panel_offset(i0 + i, j0 + j, c.ps, c.cn)] - t.at(i, j);
}

// Lower Cholesky of the tile's diagonal block. The block diagonal runs
// through tile elements (d + c, c); columns factorize in order and every
// tile row below the block diagonal is forward-substituted against the
// produced factor. Returns 0 on success or the 1-based index of the first
// nonpositive pivot. Exact zero counts as failure; denormal positives are
// accepted as ordinary pivots.
inline int edge_potrf(const KernelConfig& kc, AccTile& t, int d, int m_act, int n_act) {
  (void)kc;
  for (int c = 0; c < n_act; ++c) {
    int pr = d + c;
    double piv = t.at(pr, c);
    if (piv <= 0.0) return c + 1;
    double s = std::sqrt(piv);
    t.at(pr, c) = s;
    double inv = 1.0 / s;
    for (int r = pr + 1; r < m_act; ++r) t.at(r, c) *= inv;
    for (int c2 = c + 1; c2 < n_act; ++c2) {
      double f = t.at(d + c2, c);
      for (int r = d + c2; r < m_act; ++r) t.at(r, c2) -= t.at(r, c) * f;
    }
  }
  return 0;
}

// tile <- tile * op(E)^{-1} where E is an n_act x n_act triangular block in
// a strided window (storage orientation; op applied through trans). Returns
// 0 or the 1-based index of an exactly zero NonUnit diagonal element.
inline int edge_trsm_right(const KernelConfig& kc, AccTile& t, CWin e, Uplo uplo,
                           TransOp trans, DiagKind diag, int m_act, int n_act) {
  (void)kc;
  auto opE = [&](int l, int c) { return trans == TransOp::NoTrans ? e.at(l, c) : e.at(c, l); };
  bool eff_lower = (uplo == Uplo::Lower) == (trans == TransOp::NoTrans);
  for (int step = 0; step < n_act; ++step) {
    int c = eff_lower ? n_act - 1 - step : step;
    if (eff_lower) {
      for (int l = c + 1; l < n_act; ++l) {
        double f = opE(l, c);
        for (int i = 0; i < m_act; ++i) t.at(i, c) -= t.at(i, l) * f;
      }
    } else {
      for (int l = 0; l < c; ++l) {
        double f = opE(l, c);
        for (int i = 0; i < m_act; ++i) t.at(i, c) -= t.at(i, l) * f;
      }
    }
    if (diag == DiagKind::NonUnit) {
      double dv = opE(c, c);
      if (dv == 0.0) return c + 1;
      double inv = 1.0 / dv;
      for (int i = 0; i < m_act; ++i) t.at(i, c) *= inv;
    }
  }
  return 0;
}

// tile += X_cols * op(E) for the triangular n_act x n_act edge of a
// right-side trmm. X is the packed row block; column c of the block sits at
// x[(i/ps)*ps*cn_x + (c0+c)*ps + i%ps]. Unit diagonals are never read.
inline void edge_trmm_right(const KernelConfig& kc, AccTile& t, const double* x,
                            int cn_x, int c0, CWin e, Uplo uplo, TransOp trans,
                            DiagKind diag, int m_act, int n_act) {
  auto opE = [&](int l, int c) { return trans == TransOp::NoTrans ? e.at(l, c) : e.at(c, l); };
  bool eff_lower = (uplo == Uplo::Lower) == (trans == TransOp::NoTrans);
  int ps = kc.ps;
  for (int c = 0; c < n_act; ++c) {
    int l_lo = eff_lower ? c : 0;
    int l_hi = eff_lower ? n_act : c + 1;
    for (int l = l_lo; l < l_hi; ++l) {
      double f = (l == c && diag == DiagKind::Unit) ? 1.0 : opE(l, c);
      const double* xc = x + static_cast<std::ptrdiff_t>(c0 + l) * ps;
      for (int i = 0; i < m_act; ++i)
        t.at(i, c) += xc[(i / ps) * static_cast<std::ptrdiff_t>(ps) * cn_x + i % ps] * f;
    }
  }
}

namespace detail {
inline bool shape_keeps(StoreShape s, int r, int c, int dshift) {
  switch (s) {
    case StoreShape::Full: return true;
    case StoreShape::Lower: return r - c >= dshift;
    case StoreShape::Upper: return r - c <= dshift;
    case StoreShape::LowerZero: return true;
  }
  return true;
}
}  // namespace detail

// Masked store to a strided destination. Lower/Upper write only their
// triangle relative to the shifted diagonal r - c == dshift; LowerZero
// writes the whole rectangle with zeros above that diagonal (used when the
// destination must end up fully defined).
inline void store(const KernelConfig& kc, const AccTile& t, Win d, int m_act,
                  int n_act, StoreShape shape = StoreShape::Full, int dshift = 0) {
  (void)kc;
  for (int c = 0; c < n_act; ++c)
    for (int r = 0; r < m_act; ++r) {
      if (shape == StoreShape::LowerZero) {
        d.at(r, c) = r - c >= dshift ? t.at(r, c) : 0.0;
      } else if (detail::shape_keeps(shape, r, c, dshift)) {
        d.at(r, c) = t.at(r, c);
      }
    }
}

inline void store_p(const KernelConfig& kc, const AccTile& t, PDst d, int i0,
                    int j0, int m_act, int n_act, StoreShape shape = StoreShape::Full,
                    int dshift = 0) {
  (void)kc;
  for (int c = 0; c < n_act; ++c)
    for (int r = 0; r < m_act; ++r) {
      std::ptrdiff_t off = panel_offset(i0 + r, j0 + c, d.ps, d.cn);
      if (shape == StoreShape::LowerZero) {
        d.data[off] = r - c >= dshift ? t.at(r, c) : 0.0;
      } else if (detail::shape_keeps(shape, r, c, dshift)) {
        d.data[off] = t.at(r, c);
      }
    }
}

namespace detail {
inline void apply_mutation(const KernelConfig& kc, AccTile& t) {
  if (kc.mutation_epsilon != 0.0) t.at(0, 0) += kc.mutation_epsilon;
}
}  // namespace detail

// ---- Kernels: fixed chains of the sub-operations above. ----

// ppp gemm kernel (all operands packed): D <- alpha*A*op + beta*C in panel
// storage. NT reads B as an nr-row chunk, NN reads it natively by columns.
inline std::int64_t kernel_gemm_nt_ppp(const KernelConfig& kc, int kmax,
                                       const double* aband, int cn_a,
                                       const double* bchunk, double alpha,
                                       double beta, PSrc c, int ci, int cj,
                                       PDst d, int di, int dj, int m_act,
                                       int n_act, StoreShape shape = StoreShape::Full,
                                       int dshift = 0) {
  AccTile t;
  tile_zero(kc, t);
  std::int64_t fl = inner_gemm_nt_pp(kc, kmax, aband, cn_a, bchunk, t);
  scale_ab_p(kc, alpha, beta, c, ci, cj, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  store_p(kc, t, d, di, dj, m_act, n_act, shape, dshift);
  return fl;
}

inline std::int64_t kernel_gemm_nn_ppp(const KernelConfig& kc, int kmax,
                                       const double* aband, int cn_a, PSrc b,
                                       int l0, int j0, double alpha, double beta,
                                       PSrc c, int ci, int cj, PDst d, int di,
                                       int dj, int m_act, int n_act,
                                       StoreShape shape = StoreShape::Full,
                                       int dshift = 0) {
  AccTile t;
  tile_zero(kc, t);
  std::int64_t fl = inner_gemm_nn_pp(kc, kmax, aband, cn_a, b, l0, j0, t);
  scale_ab_p(kc, alpha, beta, c, ci, cj, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  store_p(kc, t, d, di, dj, m_act, n_act, shape, dshift);
  return fl;
}

// ppc gemm kernel: packed A and B, column-major C/D windows.
inline std::int64_t kernel_gemm_nt_ppc(const KernelConfig& kc, int kmax,
                                       const double* aband, int cn_a,
                                       const double* bchunk, double alpha,
                                       double beta, CWin c, Win d, int m_act,
                                       int n_act, StoreShape shape = StoreShape::Full,
                                       int dshift = 0) {
  AccTile t;
  tile_zero(kc, t);
  std::int64_t fl = inner_gemm_nt_pp(kc, kmax, aband, cn_a, bchunk, t);
  scale_ab(kc, alpha, beta, c, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  store(kc, t, d, m_act, n_act, shape, dshift);
  return fl;
}

// pcc gemm kernel: packed A, native B, column-major C/D windows.
inline std::int64_t kernel_gemm_pcc(const KernelConfig& kc, InnerKind kind,
                                    int kmax, const double* aband, int cn_a,
                                    const double* bwin, int ldb, double alpha,
                                    double beta, CWin c, Win d, int m_act,
                                    int n_act, StoreShape shape = StoreShape::Full,
                                    int dshift = 0) {
  AccTile t;
  tile_zero(kc, t);
  std::int64_t fl = kind == InnerKind::NN
                        ? inner_gemm_nn_pc(kc, kmax, aband, cn_a, bwin, ldb, t, n_act)
                        : inner_gemm_nt_pc(kc, kmax, aband, cn_a, bwin, ldb, t, n_act);
  scale_ab(kc, alpha, beta, c, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  store(kc, t, d, m_act, n_act, shape, dshift);
  return fl;
}

// ccc gemm kernel: everything native, zero packing.
inline std::int64_t kernel_gemm_ccc(const KernelConfig& kc, InnerKind kind,
                                    int kmax, const double* awin, int lda,
                                    const double* bwin, int ldb, double alpha,
                                    double beta, CWin c, Win d, int m_act,
                                    int n_act, StoreShape shape = StoreShape::Full,
                                    int dshift = 0) {
  AccTile t;
  tile_zero(kc, t);
  std::int64_t fl = kind == InnerKind::NN
                        ? inner_gemm_nn_cc(kc, kmax, awin, lda, bwin, ldb, t, m_act, n_act)
                        : inner_gemm_nt_cc(kc, kmax, awin, lda, bwin, ldb, t, m_act, n_act);
  scale_ab(kc, alpha, beta, c, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  store(kc, t, d, m_act, n_act, shape, dshift);
  return fl;
}

// Right-side trsm kernel: subtracts the already-solved columns (a gemm over
// xband, the packed result block), scales against the right-hand side,
// solves the triangular edge, and stores to the destination window plus an
// echo into the packed block so later column tiles can reuse it.
// Returns 0 or the 1-based local index of a zero NonUnit diagonal.
inline int kernel_trsm_right(const KernelConfig& kc, InnerKind kind, int kmax,
                             const double* xband_solved, int cn_x,
                             const double* awin, int lda, double alpha, CWin bsrc,
                             CWin e, Uplo uplo, TransOp trans, DiagKind diag,
                             Win bdst, PDst xecho, int echo_i, int echo_j,
                             int m_act, int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kmax > 0) {
    if (kind == InnerKind::NN)
      inner_gemm_nn_pc(kc, kmax, xband_solved, cn_x, awin, lda, t, n_act);
    else
      inner_gemm_nt_pc(kc, kmax, xband_solved, cn_x, awin, lda, t, n_act);
  }
  scale_ab(kc, -1.0, alpha, bsrc, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  int p = edge_trsm_right(kc, t, e, uplo, trans, diag, m_act, n_act);
  if (p != 0) return p;
  store(kc, t, bdst, m_act, n_act);
  store_p(kc, t, xecho, echo_i, echo_j, m_act, n_act);
  return 0;
}

// All-panel right-side trsm kernel: already-solved columns live in the
// destination band itself, the triangle's strictly-off-diagonal rows are
// read as an nt chunk of the triangle panel, and B comes from a panel too.
// No echo store: the panel store IS the progressive solve state.
inline int kernel_trsm_right_ppp(const KernelConfig& kc, int kmax,
                                 const double* xband_solved, int cn_x,
                                 const double* bchunk, double alpha, PSrc bsrc,
                                 int bi, int bj, CWin e, Uplo uplo,
                                 TransOp trans, DiagKind diag, PDst d, int di,
                                 int dj, int m_act, int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kmax > 0) inner_gemm_nt_pp(kc, kmax, xband_solved, cn_x, bchunk, t);
  scale_ab_p(kc, -1.0, alpha, bsrc, bi, bj, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  int p = edge_trsm_right(kc, t, e, uplo, trans, diag, m_act, n_act);
  if (p != 0) return p;
  store_p(kc, t, d, di, dj, m_act, n_act);
  return 0;
}

// Right-side trmm kernel: rectangular part as a pcc gemm over the packed
// row block, triangular part via edge_trmm_right, then alpha scaling.
inline void kernel_trmm_right(const KernelConfig& kc, InnerKind kind, int kmax,
                              const double* xband_rect, int cn_x,
                              const double* awin, int lda, const double* xband,
                              int c0, CWin e, Uplo uplo, TransOp trans,
                              DiagKind diag, double alpha, Win d, int m_act,
                              int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kmax > 0) {
    if (kind == InnerKind::NN)
      inner_gemm_nn_pc(kc, kmax, xband_rect, cn_x, awin, lda, t, n_act);
    else
      inner_gemm_nt_pc(kc, kmax, xband_rect, cn_x, awin, lda, t, n_act);
  }
  edge_trmm_right(kc, t, xband, cn_x, c0, e, uplo, trans, diag, m_act, n_act);
  scale_ab(kc, alpha, 0.0, CWin{}, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  store(kc, t, d, m_act, n_act);
}

// Panel-destination variant of the trmm kernel (native path).
inline void kernel_trmm_right_p(const KernelConfig& kc, int kmax,
                                const double* aband, int cn_a, PSrc b, int l0,
                                int j0, const double* xband, int c0, CWin e,
                                Uplo uplo, TransOp trans, DiagKind diag,
                                double alpha, PDst d, int di, int dj, int m_act,
                                int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kmax > 0) inner_gemm_nn_pp(kc, kmax, aband, cn_a, b, l0, j0, t);
  edge_trmm_right(kc, t, xband, cn_a, c0, e, uplo, trans, diag, m_act, n_act);
  scale_ab(kc, alpha, 0.0, CWin{}, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  store_p(kc, t, d, di, dj, m_act, n_act);
}

// Cholesky sub-diagonal kernel: update against the packed factor, subtract
// from the source, solve against the transposed diagonal block, store to the
// destination window and echo into the packed factor.
inline void kernel_potrf_sub(const KernelConfig& kc, int kmax, const double* lband,
                             int cn_l, const double* lchunk, CWin asrc, CWin e,
                             Win adst, PDst lp, int i0, int j0, int m_act,
                             int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kmax > 0) inner_gemm_nt_pp(kc, kmax, lband, cn_l, lchunk, t);
  scale_m11(kc, asrc, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  edge_trsm_right(kc, t, e, Uplo::Lower, TransOp::Trans, DiagKind::NonUnit, m_act, n_act);
  store(kc, t, adst, m_act, n_act);
  store_p(kc, t, lp, i0, j0, m_act, n_act);
}

// Cholesky diagonal kernel; d is the block-diagonal shift inside the tile.
// Returns 0 or the 1-based local index of the failing column.
inline int kernel_potrf_diag(const KernelConfig& kc, int kmax, const double* lband,
                             int cn_l, const double* lchunk, CWin asrc, Win adst,
                             PDst lp, int i0, int j0, int d, int m_act, int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kmax > 0) inner_gemm_nt_pp(kc, kmax, lband, cn_l, lchunk, t);
  scale_m11(kc, asrc, t, m_act, n_act);
  detail::apply_mutation(kc, t);
  int p = edge_potrf(kc, t, d, m_act, n_act);
  if (p != 0) return p;
  store(kc, t, adst, m_act, n_act, StoreShape::Lower, d);
  store_p(kc, t, lp, i0, j0, m_act, n_act, StoreShape::LowerZero, d);
  return 0;
}

// Fused syrk+potrf kernels over panel operands: the tile accumulates
// C - D*D^T + A*B^T before the factorization edge. Sub-diagonal flavor.
inline void kernel_syrk_potrf_sub(const KernelConfig& kc, int kfac,
                                  const double* dband, int cn_d,
                                  const double* dchunk, PSrc c, int kab,
                                  const double* aband, int cn_a,
                                  const double* bchunk, CWin e, PDst dd, int i0,
                                  int j0, int m_act, int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kfac > 0) inner_gemm_nt_pp(kc, kfac, dband, cn_d, dchunk, t);
  scale_m11_p(kc, c, i0, j0, t, m_act, n_act);
  if (kab > 0) inner_gemm_nt_pp(kc, kab, aband, cn_a, bchunk, t);
  detail::apply_mutation(kc, t);
  edge_trsm_right(kc, t, e, Uplo::Lower, TransOp::Trans, DiagKind::NonUnit, m_act, n_act);
  store_p(kc, t, dd, i0, j0, m_act, n_act);
}

// Fused syrk+potrf diagonal kernel. Returns 0 or the failing local column.
inline int kernel_syrk_potrf_diag(const KernelConfig& kc, int kfac,
                                  const double* dband, int cn_d,
                                  const double* dchunk, PSrc c, int kab,
                                  const double* aband, int cn_a,
                                  const double* bchunk, PDst dd, int i0, int j0,
                                  int d, int m_act, int n_act) {
  AccTile t;
  tile_zero(kc, t);
  if (kfac > 0) inner_gemm_nt_pp(kc, kfac, dband, cn_d, dchunk, t);
  scale_m11_p(kc, c, i0, j0, t, m_act, n_act);
  if (kab > 0) inner_gemm_nt_pp(kc, kab, aband, cn_a, bchunk, t);
  detail::apply_mutation(kc, t);
  int p = edge_potrf(kc, t, d, m_act, n_act);
  if (p != 0) return p;
  store_p(kc, t, dd, i0, j0, m_act, n_act, StoreShape::LowerZero, d);
  return 0;
}

}  // namespace panelblas
