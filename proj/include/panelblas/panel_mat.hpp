#pragma once

// Panel-major packed storage. A matrix is stored as horizontal panels of
// fixed height ps; inside a panel, elements are column-interleaved so a
// panel column is contiguous. Element (i, j) lives at flat offset
//
//     (i / ps)*ps*cn + j*ps + (i % ps)
//
// with pm = ceil(m/ps)*ps and cn = ceil(n/ps)*ps. cn is padded to a multiple
// of ps so one buffer can serve as left, right, or result operand. Padding
// content is unspecified and never zeroed; kernels must never let a padding
// element influence a stored result. Buffers request 64-byte alignment but
// correctness never depends on it.

#include <cstddef>
#include <cstdint>
#include <new>

#include "panelblas/mat_view.hpp"

namespace panelblas {

// Per-call packing and scratch accounting. Carried through call contexts,
// never stored globally, so concurrent calls do not share counters.
struct PackStats {
  std::int64_t elements_packed = 0;       // elements moved between column-major and panel storage
  std::int64_t scratch_bytes_bounded = 0; // bytes served by fixed-capacity per-call scratch
  std::int64_t scratch_bytes_dynamic = 0; // bytes served by heap scratch

  void add(const PackStats& o) {
    elements_packed += o.elements_packed;
    scratch_bytes_bounded += o.scratch_bytes_bounded;
    scratch_bytes_dynamic += o.scratch_bytes_dynamic;
  }
};

inline int round_up(int v, int q) { return (v + q - 1) / q * q; }

inline std::ptrdiff_t panel_offset(int i, int j, int ps, int cn) {
  return static_cast<std::ptrdiff_t>(i / ps) * ps * cn +
         static_cast<std::ptrdiff_t>(j) * ps + i % ps;
}

// Bytes needed to hold an m x n matrix packed with panel height ps.
inline std::size_t memsize(int m, int n, int ps) {
  if (m <= 0 || n <= 0) return 0;
  return static_cast<std::size_t>(round_up(m, ps)) * round_up(n, ps) * sizeof(double);
}

// Non-owning descriptor of a packed matrix in caller storage.
struct PanelRef {
  double* data = nullptr;
  int ps = 4;
  int m = 0, n = 0;
  int pm = 0, cn = 0;

  static PanelRef over(double* buf, int m, int n, int ps) {
    return {buf, ps, m, n, round_up(m, ps), round_up(n, ps)};
  }
  double& at(int i, int j) const { return data[panel_offset(i, j, ps, cn)]; }
  // Start of the panel row band containing matrix row i0 (i0 must be a
  // multiple of ps).
  double* row_band(int i0) const { return data + static_cast<std::ptrdiff_t>(i0 / ps) * ps * cn; }
};

struct ConstPanelRef {
  const double* data = nullptr;
  int ps = 4;
  int m = 0, n = 0;
  int pm = 0, cn = 0;

  ConstPanelRef() = default;
  ConstPanelRef(const PanelRef& r) : data(r.data), ps(r.ps), m(r.m), n(r.n), pm(r.pm), cn(r.cn) {}
  static ConstPanelRef over(const double* buf, int m, int n, int ps) {
    return {buf, ps, m, n, round_up(m, ps), round_up(n, ps)};
  }
  ConstPanelRef(const double* d, int ps_, int m_, int n_, int pm_, int cn_)
      : data(d), ps(ps_), m(m_), n(n_), pm(pm_), cn(cn_) {}
  double at(int i, int j) const { return data[panel_offset(i, j, ps, cn)]; }
  const double* row_band(int i0) const { return data + static_cast<std::ptrdiff_t>(i0 / ps) * ps * cn; }
};

// Owning packed matrix with 64-byte-aligned storage.
class PanelMat {
 public:
  PanelMat() = default;
  PanelMat(int m, int n, int ps = 4) : ps_(ps), m_(m), n_(n) {
    if (ps != 4 && ps != 8) throw ArgError(3, "panel height must be 4 or 8");
    if (m < 0) throw ArgError(1, "row count must be nonnegative");
    if (n < 0) throw ArgError(2, "column count must be nonnegative");
    pm_ = round_up(m, ps);
    cn_ = round_up(n, ps);
    std::size_t count = static_cast<std::size_t>(pm_) * cn_;
    if (count > 0) data_ = static_cast<double*>(::operator new(count * sizeof(double), std::align_val_t(64)));
  }
  PanelMat(PanelMat&& o) noexcept { swap(o); }
  PanelMat& operator=(PanelMat&& o) noexcept {
    if (this != &o) { release(); swap(o); }
    return *this;
  }
  PanelMat(const PanelMat&) = delete;
  PanelMat& operator=(const PanelMat&) = delete;
  ~PanelMat() { release(); }

  int ps() const { return ps_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int pm() const { return pm_; }
  int cn() const { return cn_; }
  double* data() { return data_; }
  const double* data() const { return data_; }
  std::size_t bytes() const { return static_cast<std::size_t>(pm_) * cn_ * sizeof(double); }

  double& at(int i, int j) { return data_[panel_offset(i, j, ps_, cn_)]; }
  double at(int i, int j) const { return data_[panel_offset(i, j, ps_, cn_)]; }

  PanelRef ref() { return {data_, ps_, m_, n_, pm_, cn_}; }
  ConstPanelRef ref() const { return ConstPanelRef(PanelRef{data_, ps_, m_, n_, pm_, cn_}); }

  void fill_zero() {
    std::size_t count = static_cast<std::size_t>(pm_) * cn_;
    for (std::size_t i = 0; i < count; ++i) data_[i] = 0.0;
  }

 private:
  void release() {
    if (data_) ::operator delete(data_, std::align_val_t(64));
    data_ = nullptr;
  }
  void swap(PanelMat& o) noexcept {
    std::swap(ps_, o.ps_); std::swap(m_, o.m_); std::swap(n_, o.n_);
    std::swap(pm_, o.pm_); std::swap(cn_, o.cn_); std::swap(data_, o.data_);
  }

  int ps_ = 4, m_ = 0, n_ = 0, pm_ = 0, cn_ = 0;
  double* data_ = nullptr;
};

// dst <- packed op(src). op(src) extents must equal (dst.m, dst.n);
// padding lanes are left untouched. Counts dst.m*dst.n packed elements.
inline void pack_from_colmajor(ConstMatView src, PanelRef dst,
                               TransOp trans = TransOp::NoTrans,
                               PackStats* stats = nullptr) {
  int sm = trans == TransOp::NoTrans ? src.m : src.n;
  int sn = trans == TransOp::NoTrans ? src.n : src.m;
  if (sm != dst.m || sn != dst.n) throw ArgError(1, "source extents do not match packed destination");
  int ps = dst.ps;
  if (trans == TransOp::NoTrans) {
    for (int j = 0; j < dst.n; ++j) {
      const double* s = src.col(j);
      for (int i = 0; i < dst.m; ++i)
        dst.data[panel_offset(i, j, ps, dst.cn)] = s[i];
    }
  } else {
    for (int j = 0; j < dst.n; ++j)
      for (int i = 0; i < dst.m; ++i)
        dst.data[panel_offset(i, j, ps, dst.cn)] = src(j, i);
  }
  if (stats) stats->elements_packed += static_cast<std::int64_t>(dst.m) * dst.n;
}

// dst <- unpacked src. Extents must match; only the m x n interior is read.
// Counts m*n elements moved out of packed storage.
inline void unpack_to_colmajor(ConstPanelRef src, MatView dst, PackStats* stats = nullptr) {
  if (src.m != dst.m || src.n != dst.n) throw ArgError(2, "unpack destination extents do not match");
  for (int j = 0; j < src.n; ++j) {
    double* d = dst.col(j);
    for (int i = 0; i < src.m; ++i) d[i] = src.data[panel_offset(i, j, src.ps, src.cn)];
  }
  if (stats) stats->elements_packed += static_cast<std::int64_t>(src.m) * src.n;
}

// Packs rows [i0, i0+rows) of op(src) into consecutive ps-high panels laid
// out back to back with unpadded panel width equal to the operand's column
// count: element (r, l) of the block lands at (r/ps)*ps*k + l*ps + (r%ps).
// rows may be at most 3*ps (the tile height bound). Partial last panels
// leave their padding lanes untouched.
inline void pack_row_block(ConstMatView src, TransOp trans, int i0, int rows,
                           int ps, double* dst, PackStats* stats = nullptr) {
  int sm = trans == TransOp::NoTrans ? src.m : src.n;
  int k = trans == TransOp::NoTrans ? src.n : src.m;
  if (rows < 0 || rows > 3 * ps) throw ArgError(4, "row block height exceeds tile bound");
  if (i0 < 0 || i0 + rows > sm) throw ArgError(3, "row block out of range");
  for (int r = 0; r < rows; ++r) {
    int pan = r / ps;
    double* d = dst + static_cast<std::ptrdiff_t>(pan) * ps * k + r % ps;
    int i = i0 + r;
    if (trans == TransOp::NoTrans) {
      for (int l = 0; l < k; ++l) d[static_cast<std::ptrdiff_t>(l) * ps] = src(i, l);
    } else {
      const double* s = src.col(i);
      for (int l = 0; l < k; ++l) d[static_cast<std::ptrdiff_t>(l) * ps] = s[l];
    }
  }
  if (stats) stats->elements_packed += static_cast<std::int64_t>(rows) * k;
}

}  // namespace panelblas
