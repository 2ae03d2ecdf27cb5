#pragma once

// gemm built as five packing variants over the same micro-kernels. The
// variants differ only in which operands get packed into panel storage and
// where scratch lives:
//
//   A  ppp  pack A, B and C, compute in panels, unpack   heap, mk+nk+2mn
//   B  ppc  pack A and B whole                           heap, mk+nk
//   C  pcc  pack A one mr row block at a time            bounded, mk
//   Ct cpc  variant C run on the transposed problem      bounded, nk
//   D  ccc  nothing packed                               none, 0
//
// Element counts include variant A's unpack of the result. The dispatcher
// picks D for tiny problems, C or Ct for cache-resident sizes (packing the
// smaller side), and B otherwise; A runs only when forced.

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "panelblas/mat_view.hpp"
#include "panelblas/micro_kernel.hpp"
#include "panelblas/panel_mat.hpp"

namespace panelblas {

enum class GemmVariant { A, B, C, Ct, D };

inline const char* variant_name(GemmVariant v) {
  switch (v) {
    case GemmVariant::A: return "A";
    case GemmVariant::B: return "B";
    case GemmVariant::C: return "C";
    case GemmVariant::Ct: return "Ct";
    case GemmVariant::D: return "D";
  }
  return "?";
}

inline std::optional<GemmVariant> parse_variant(const std::string& s) {
  if (s == "A" || s == "a") return GemmVariant::A;
  if (s == "B" || s == "b") return GemmVariant::B;
  if (s == "C" || s == "c") return GemmVariant::C;
  if (s == "Ct" || s == "ct" || s == "CT") return GemmVariant::Ct;
  if (s == "D" || s == "d") return GemmVariant::D;
  return std::nullopt;
}

enum class ScratchClass { None, Bounded, Heap };

inline ScratchClass variant_scratch_class(GemmVariant v) {
  switch (v) {
    case GemmVariant::A:
    case GemmVariant::B: return ScratchClass::Heap;
    case GemmVariant::C:
    case GemmVariant::Ct: return ScratchClass::Bounded;
    case GemmVariant::D: return ScratchClass::None;
  }
  return ScratchClass::None;
}

// Elements a variant moves through pack/unpack for an m x n x k product.
inline std::int64_t variant_planned_packing(GemmVariant v, int m, int n, int k) {
  std::int64_t mm = m, nn = n, kk = k;
  switch (v) {
    case GemmVariant::A: return mm * kk + nn * kk + 2 * mm * nn;
    case GemmVariant::B: return mm * kk + nn * kk;
    case GemmVariant::C: return mm * kk;
    case GemmVariant::Ct: return nn * kk;
    case GemmVariant::D: return 0;
  }
  return 0;
}

// Engine tuning. Negative tiny thresholds mean "derive from the kernel
// shape" (tiny_m -> mr, tiny_n -> 2*nr). bounded_scratch_cap limits the
// per-call row-block buffer the bounded variants may use.
struct EngineConfig {
  KernelConfig kernel;
  int switch_dim = 256;
  int tiny_m = -1;
  int tiny_n = -1;
  std::int64_t bounded_scratch_cap = 65536;
  std::optional<GemmVariant> force_variant;

  int tiny_m_eff() const { return tiny_m < 0 ? kernel.mr : tiny_m; }
  int tiny_n_eff() const { return tiny_n < 0 ? 2 * kernel.nr : tiny_n; }
};

namespace detail {
inline bool env_int(const char* name, int& out) {
  const char* s = std::getenv(name);
  if (s == nullptr || *s == '\0') return false;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0') return false;
  out = static_cast<int>(v);
  return true;
}
inline bool env_double(const char* name, double& out) {
  const char* s = std::getenv(name);
  if (s == nullptr || *s == '\0') return false;
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') return false;
  out = v;
  return true;
}
}  // namespace detail

// Environment overrides; unparsable or invalid values are ignored.
inline EngineConfig config_from_env() {
  EngineConfig cfg;
  int v = 0;
  if (detail::env_int("PANELBLAS_PS", v)) cfg.kernel.ps = v;
  if (detail::env_int("PANELBLAS_MR", v)) cfg.kernel.mr = v;
  if (detail::env_int("PANELBLAS_NR", v)) cfg.kernel.nr = v;
  if (!kernel_config_valid(cfg.kernel)) cfg.kernel = KernelConfig{};
  if (detail::env_int("PANELBLAS_SWITCH_DIM", v) && v > 0) cfg.switch_dim = v;
  if (detail::env_int("PANELBLAS_TINY_M", v) && v >= 0) cfg.tiny_m = v;
  if (detail::env_int("PANELBLAS_TINY_N", v) && v >= 0) cfg.tiny_n = v;
  if (detail::env_int("PANELBLAS_SCRATCH_CAP", v) && v > 0) cfg.bounded_scratch_cap = v;
  double e = 0.0;
  if (detail::env_double("PANELBLAS_MUTATE", e)) cfg.kernel.mutation_epsilon = e;
  return cfg;
}

inline const EngineConfig& default_config() {
  static const EngineConfig cfg = config_from_env();
  return cfg;
}

// Fixed-size stack arena with heap fallback, so bounded variants normally
// allocate nothing. Chunks are handed out 64-byte aligned; bookkeeping
// feeds PackStats.
inline constexpr std::size_t kBoundedArenaBytes = 65536;

class ScratchArena {
 public:
  double* alloc_doubles(std::size_t count) {
    std::size_t bytes = count * sizeof(double);
    std::size_t at = (used_ + 63) & ~std::size_t{63};
    if (at + bytes <= sizeof(buf_)) {
      used_ = at + bytes;
      bounded_ += static_cast<std::int64_t>(bytes);
      return reinterpret_cast<double*>(buf_ + at);
    }
    dynamic_ += static_cast<std::int64_t>(bytes);
    heap_.push_back(std::make_unique<double[]>(count));
    return heap_.back().get();
  }

  std::int64_t bounded_bytes() const { return bounded_; }
  std::int64_t dynamic_bytes() const { return dynamic_; }

  void charge(PackStats& st) const {
    st.scratch_bytes_bounded += bounded_;
    st.scratch_bytes_dynamic += dynamic_;
  }

 private:
  alignas(64) std::byte buf_[kBoundedArenaBytes];
  std::size_t used_ = 0;
  std::int64_t bounded_ = 0;
  std::int64_t dynamic_ = 0;
  std::vector<std::unique_ptr<double[]>> heap_;
};

// Outcome of one engine call: status, the variant that ran, pack traffic
// and scratch usage, and the flop count summed from the inner products.
struct CallResult {
  Status status = Status::success();
  GemmVariant variant = GemmVariant::D;
  PackStats stats;
  std::int64_t flops = 0;

  bool ok() const { return status.ok(); }
};

inline constexpr int kInfoUnsupported = -1000;

// Variant choice for one call shape. Tiny problems (all operands a few
// tiles) go to D except TN, which has no native kernel pairing. Otherwise
// prefer the bounded variant that packs the smaller of A (C) and B (Ct)
// while the row block fits the scratch cap and no dimension exceeds
// switch_dim; everything else pays the full pack of variant B.
inline GemmVariant select_variant(const EngineConfig& cfg, TransOp transa,
                                  TransOp transb, int m, int n, int k) {
  if (cfg.force_variant) return *cfg.force_variant;
  bool tn = transa == TransOp::Trans && transb == TransOp::NoTrans;
  if (m <= cfg.tiny_m_eff() && n <= cfg.tiny_n_eff() && !tn) return GemmVariant::D;
  std::int64_t block_bytes = static_cast<std::int64_t>(cfg.kernel.mr) * k * 8;
  std::int64_t cap = cfg.bounded_scratch_cap;
  if (cap > static_cast<std::int64_t>(kBoundedArenaBytes))
    cap = static_cast<std::int64_t>(kBoundedArenaBytes);
  int maxd = m > n ? m : n;
  if (k > maxd) maxd = k;
  if (block_bytes <= cap && maxd <= cfg.switch_dim)
    return m < n ? GemmVariant::C : GemmVariant::Ct;
  return GemmVariant::B;
}

namespace detail {

inline void zero_pad_rows(double* data, int ps, int cn, int rows, int alloc_rows) {
  for (int r = rows; r < alloc_rows; ++r) {
    double* lane = data + static_cast<std::ptrdiff_t>(r / ps) * ps * cn + r % ps;
    for (int l = 0; l < cn; ++l) lane[static_cast<std::ptrdiff_t>(l) * ps] = 0.0;
  }
}

// Heap pack whose row count is rounded up to a whole number of mr bands,
// with defined (zero) padding rows, so inner products may read full bands.
struct BandPack {
  PanelMat mat;
  PanelRef ref;

  BandPack(int rows, int cols, const KernelConfig& kc)
      : mat(round_up(rows, kc.mr), cols, kc.ps),
        ref{mat.ref().data, kc.ps, rows, cols, round_up(rows, kc.mr),
            mat.ref().cn} {
    zero_pad_rows(ref.data, kc.ps, ref.cn, rows, round_up(rows, kc.mr));
  }
};

inline std::int64_t run_ppp(const KernelConfig& kc, int m, int n, int k,
                            double alpha, const PanelRef& ap, const PanelRef& bp,
                            double beta, const PanelRef& cp) {
  std::int64_t fl = 0;
  PSrc cs = psrc(cp);
  PDst cd = pdst(cp);
  PSrc as = psrc(ap);
  PSrc bs = psrc(bp);
  for (int i0 = 0; i0 < m; i0 += kc.mr) {
    int ma = m - i0 < kc.mr ? m - i0 : kc.mr;
    const double* aband = pband(as, i0);
    for (int j0 = 0; j0 < n; j0 += kc.nr) {
      int na = n - j0 < kc.nr ? n - j0 : kc.nr;
      fl += kernel_gemm_nt_ppp(kc, k, aband, ap.cn, pchunk(bs, j0), alpha, beta,
                               cs, i0, j0, cd, i0, j0, ma, na);
    }
  }
  return fl;
}

inline CallResult variant_a(const EngineConfig& cfg, TransOp transa,
                            TransOp transb, int m, int n, int k, double alpha,
                            ConstMatView a, ConstMatView b, double beta,
                            ConstMatView c, MatView d) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  r.variant = GemmVariant::A;
  BandPack ap(m, k, kc);
  pack_from_colmajor(a, ap.ref, transa, &r.stats);
  BandPack bp(n, k, kc);
  pack_from_colmajor(b, bp.ref, transb == TransOp::NoTrans ? TransOp::Trans : TransOp::NoTrans,
                     &r.stats);
  // The result panel doubles as the packed C operand; the unpack below is
  // part of the variant's advertised element traffic.
  BandPack cp(m, n, kc);
  if (beta != 0.0) {
    pack_from_colmajor(c, cp.ref, TransOp::NoTrans, &r.stats);
  } else {
    r.stats.elements_packed += static_cast<std::int64_t>(m) * n;
  }
  r.flops = run_ppp(kc, m, n, k, alpha, ap.ref, bp.ref, beta, cp.ref);
  unpack_to_colmajor(cp.ref, d, &r.stats);
  r.stats.scratch_bytes_dynamic += static_cast<std::int64_t>(ap.mat.bytes()) +
                                   static_cast<std::int64_t>(bp.mat.bytes()) +
                                   static_cast<std::int64_t>(cp.mat.bytes());
  return r;
}

inline CallResult variant_b(const EngineConfig& cfg, TransOp transa,
                            TransOp transb, int m, int n, int k, double alpha,
                            ConstMatView a, ConstMatView b, double beta,
                            ConstMatView c, MatView d) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  r.variant = GemmVariant::B;
  BandPack bp(n, k, kc);
  pack_from_colmajor(b, bp.ref, transb == TransOp::NoTrans ? TransOp::Trans : TransOp::NoTrans,
                     &r.stats);
  PSrc bs = psrc(bp.ref);
  ScratchArena arena;
  double* ablock = arena.alloc_doubles(static_cast<std::size_t>(kc.mr) * k);
  for (int i0 = 0; i0 < m; i0 += kc.mr) {
    int ma = m - i0 < kc.mr ? m - i0 : kc.mr;
    pack_row_block(a, transa, i0, ma, kc.ps, ablock, &r.stats);
    if (ma < kc.mr) zero_pad_rows(ablock, kc.ps, k, ma, kc.mr);
    for (int j0 = 0; j0 < n; j0 += kc.nr) {
      int na = n - j0 < kc.nr ? n - j0 : kc.nr;
      r.flops += kernel_gemm_nt_ppc(kc, k, ablock, k, pchunk(bs, j0), alpha, beta,
                                    cwin(c, i0, j0), win(d, i0, j0), ma, na);
    }
  }
  arena.charge(r.stats);
  r.stats.scratch_bytes_dynamic += static_cast<std::int64_t>(bp.mat.bytes());
  return r;
}

// Shared core of the bounded variants: pack one mr row block of `src`
// (rows of the effective left operand), stream the other operand natively.
// With transposed_store the tile coordinates live on the transposed
// problem and land in d through transposed windows.
inline CallResult variant_c_core(const EngineConfig& cfg, GemmVariant tag,
                                 InnerKind kind, int mm, int nn, int k,
                                 double alpha, ConstMatView pack_src,
                                 TransOp pack_trans, const double* nat,
                                 int nat_ld, double beta, ConstMatView c,
                                 MatView d, bool transposed_store) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  r.variant = tag;
  ScratchArena arena;
  double* ablock = arena.alloc_doubles(static_cast<std::size_t>(kc.mr) * k);
  for (int i0 = 0; i0 < mm; i0 += kc.mr) {
    int ma = mm - i0 < kc.mr ? mm - i0 : kc.mr;
    pack_row_block(pack_src, pack_trans, i0, ma, kc.ps, ablock, &r.stats);
    if (ma < kc.mr) zero_pad_rows(ablock, kc.ps, k, ma, kc.mr);
    for (int j0 = 0; j0 < nn; j0 += kc.nr) {
      int na = nn - j0 < kc.nr ? nn - j0 : kc.nr;
      const double* bwin = kind == InnerKind::NN
                               ? nat + static_cast<std::ptrdiff_t>(j0) * nat_ld
                               : nat + j0;
      CWin cw = transposed_store ? cwin_trans(c, i0, j0) : cwin(c, i0, j0);
      Win dw = transposed_store ? win_trans(d, i0, j0) : win(d, i0, j0);
      r.flops += kernel_gemm_pcc(kc, kind, k, ablock, k, bwin, nat_ld, alpha,
                                 beta, cw, dw, ma, na);
    }
  }
  arena.charge(r.stats);
  return r;
}

inline CallResult variant_c(const EngineConfig& cfg, TransOp transa,
                            TransOp transb, int m, int n, int k, double alpha,
                            ConstMatView a, ConstMatView b, double beta,
                            ConstMatView c, MatView d) {
  InnerKind kind = transb == TransOp::NoTrans ? InnerKind::NN : InnerKind::NT;
  return variant_c_core(cfg, GemmVariant::C, kind, m, n, k, alpha, a, transa,
                        b.data, b.ld, beta, c, d, false);
}

inline CallResult variant_ct(const EngineConfig& cfg, TransOp transa,
                             TransOp transb, int m, int n, int k, double alpha,
                             ConstMatView a, ConstMatView b, double beta,
                             ConstMatView c, MatView d) {
  // Transposed problem d^T = op(B)^T op(A)^T: pack op(B)^T row blocks, read
  // op(A)^T natively, store through transposed windows.
  InnerKind kind = transa == TransOp::NoTrans ? InnerKind::NT : InnerKind::NN;
  TransOp pack_trans = transb == TransOp::NoTrans ? TransOp::Trans : TransOp::NoTrans;
  return variant_c_core(cfg, GemmVariant::Ct, kind, n, m, k, alpha, b,
                        pack_trans, a.data, a.ld, beta, c, d, true);
}

inline CallResult variant_d(const EngineConfig& cfg, TransOp transa,
                            TransOp transb, int m, int n, int k, double alpha,
                            ConstMatView a, ConstMatView b, double beta,
                            ConstMatView c, MatView d) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  r.variant = GemmVariant::D;
  if (transa == TransOp::Trans && transb == TransOp::NoTrans) {
    r.status = Status::failure(kInfoUnsupported,
                               "variant D has no native kernel for the TN case");
    return r;
  }
  if (transa == TransOp::NoTrans) {
    InnerKind kind = transb == TransOp::NoTrans ? InnerKind::NN : InnerKind::NT;
    for (int i0 = 0; i0 < m; i0 += kc.mr) {
      int ma = m - i0 < kc.mr ? m - i0 : kc.mr;
      for (int j0 = 0; j0 < n; j0 += kc.nr) {
        int na = n - j0 < kc.nr ? n - j0 : kc.nr;
        const double* bwin = kind == InnerKind::NN
                                 ? b.data + static_cast<std::ptrdiff_t>(j0) * b.ld
                                 : b.data + j0;
        r.flops += kernel_gemm_ccc(kc, kind, k, a.data + i0, a.ld, bwin, b.ld,
                                   alpha, beta, cwin(c, i0, j0), win(d, i0, j0),
                                   ma, na);
      }
    }
    return r;
  }
  // TT: run the NN machinery on the transposed problem d^T = B A.
  for (int i0 = 0; i0 < n; i0 += kc.mr) {
    int ma = n - i0 < kc.mr ? n - i0 : kc.mr;
    for (int j0 = 0; j0 < m; j0 += kc.nr) {
      int na = m - j0 < kc.nr ? m - j0 : kc.nr;
      r.flops += kernel_gemm_ccc(kc, InnerKind::NN, k, b.data + i0, b.ld,
                                 a.data + static_cast<std::ptrdiff_t>(j0) * a.ld,
                                 a.ld, alpha, beta, cwin_trans(c, i0, j0),
                                 win_trans(d, i0, j0), ma, na);
    }
  }
  return r;
}

// Result scaling d <- beta*c for the quick-return paths, still through the
// kernel layer (ccc with an empty accumulation), so it packs nothing.
inline CallResult scale_only(const EngineConfig& cfg, int m, int n, double beta,
                             ConstMatView c, MatView d) {
  const KernelConfig& kc = cfg.kernel;
  CallResult r;
  r.variant = GemmVariant::D;
  double stub = 0.0;
  for (int i0 = 0; i0 < m; i0 += kc.mr) {
    int ma = m - i0 < kc.mr ? m - i0 : kc.mr;
    for (int j0 = 0; j0 < n; j0 += kc.nr) {
      int na = n - j0 < kc.nr ? n - j0 : kc.nr;
      kernel_gemm_ccc(kc, InnerKind::NN, 0, &stub, 1, &stub, 1, 0.0, beta,
                      cwin(c, i0, j0), win(d, i0, j0), ma, na);
    }
  }
  return r;
}

}  // namespace detail

// d <- alpha*op(a)*op(b) + beta*c with op(a) m x k, op(b) k x n. c and d
// must have the result shape; d may alias c exactly. Views are trusted to
// the extent of their declared shapes; shape mismatches fail with the
// netlib-style argument positions of the corresponding leading dimension.
inline CallResult gemm(const EngineConfig& cfg, TransOp transa, TransOp transb,
                       int m, int n, int k, double alpha, ConstMatView a,
                       ConstMatView b, double beta, ConstMatView c, MatView d) {
  CallResult r;
  if (m < 0) { r.status = Status::failure(-3, "m < 0"); return r; }
  if (n < 0) { r.status = Status::failure(-4, "n < 0"); return r; }
  if (k < 0) { r.status = Status::failure(-5, "k < 0"); return r; }
  int am = transa == TransOp::NoTrans ? m : k;
  int an = transa == TransOp::NoTrans ? k : m;
  int bm = transb == TransOp::NoTrans ? k : n;
  int bn = transb == TransOp::NoTrans ? n : k;
  if (a.m != am || a.n != an) { r.status = Status::failure(-8, "a shape mismatch"); return r; }
  if (b.m != bm || b.n != bn) { r.status = Status::failure(-10, "b shape mismatch"); return r; }
  if (c.m != m || c.n != n) { r.status = Status::failure(-13, "c shape mismatch"); return r; }
  if (d.m != m || d.n != n) { r.status = Status::failure(-13, "d shape mismatch"); return r; }
  if (m == 0 || n == 0) return r;
  if (alpha == 0.0 || k == 0) return detail::scale_only(cfg, m, n, beta, c, d);

  switch (select_variant(cfg, transa, transb, m, n, k)) {
    case GemmVariant::A:
      return detail::variant_a(cfg, transa, transb, m, n, k, alpha, a, b, beta, c, d);
    case GemmVariant::B:
      return detail::variant_b(cfg, transa, transb, m, n, k, alpha, a, b, beta, c, d);
    case GemmVariant::C:
      return detail::variant_c(cfg, transa, transb, m, n, k, alpha, a, b, beta, c, d);
    case GemmVariant::Ct:
      return detail::variant_ct(cfg, transa, transb, m, n, k, alpha, a, b, beta, c, d);
    case GemmVariant::D:
      return detail::variant_d(cfg, transa, transb, m, n, k, alpha, a, b, beta, c, d);
  }
  r.status = Status::failure(kInfoUnsupported, "unreachable variant");
  return r;
}

// In-place convenience: c is both source and destination.
inline CallResult gemm(const EngineConfig& cfg, TransOp transa, TransOp transb,
                       int m, int n, int k, double alpha, ConstMatView a,
                       ConstMatView b, double beta, MatView c) {
  return gemm(cfg, transa, transb, m, n, k, alpha, a, b, beta, ConstMatView(c), c);
}

}  // namespace panelblas
