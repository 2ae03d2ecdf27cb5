#pragma once

// Column-major matrix views and the shared vocabulary types (operation flags,
// error reporting) used by every routine in the library.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace panelblas {

using Scalar = double;

enum class TransOp { NoTrans, Trans };
enum class Side { Left, Right };
enum class Uplo { Upper, Lower };
enum class DiagKind { NonUnit, Unit };

// Case-insensitive flag parsing, netlib character conventions.
// 'C' is accepted as Trans: for real matrices the conjugate transpose is the
// transpose, matching the reference BLAS.
inline std::optional<TransOp> parse_trans(char c) {
  switch (c) {
    case 'n': case 'N': return TransOp::NoTrans;
    case 't': case 'T': case 'c': case 'C': return TransOp::Trans;
    default: return std::nullopt;
  }
}

inline std::optional<Side> parse_side(char c) {
  switch (c) {
    case 'l': case 'L': return Side::Left;
    case 'r': case 'R': return Side::Right;
    default: return std::nullopt;
  }
}

inline std::optional<Uplo> parse_uplo(char c) {
  switch (c) {
    case 'u': case 'U': return Uplo::Upper;
    case 'l': case 'L': return Uplo::Lower;
    default: return std::nullopt;
  }
}

inline std::optional<DiagKind> parse_diag(char c) {
  switch (c) {
    case 'n': case 'N': return DiagKind::NonUnit;
    case 'u': case 'U': return DiagKind::Unit;
    default: return std::nullopt;
  }
}

// Thrown when a view or packing constructor is handed inconsistent arguments.
// index is the 1-based position of the offending parameter.
class ArgError : public std::invalid_argument {
 public:
  ArgError(int index, const std::string& message)
      : std::invalid_argument(message), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

// Invalid-call report produced by the netlib-style interface layer.
// index is the 1-based Fortran-order argument position.
struct BlasCallError {
  std::string routine;
  int index = 0;
  std::string message;
};

// Outcome of a numerical routine. info follows the LAPACK convention:
//   0   success
//   -j  argument j invalid (1-based)
//   +p  numerical failure at 1-based position p (pivot, singular diagonal)
struct Status {
  int info = 0;
  std::string message{};
  bool ok() const noexcept { return info == 0; }
  static Status success() { return {}; }
  static Status failure(int info, std::string msg) {
    return {info, std::move(msg)};
  }
};

// Non-owning column-major view: element (i, j) lives at data[i + j*ld].
// Dimensions are value state; views are cheap to copy and never allocate.
struct ConstMatView {
  const double* data = nullptr;
  int m = 0;
  int n = 0;
  int ld = 1;

  double operator()(int i, int j) const { return data[i + static_cast<std::ptrdiff_t>(j) * ld]; }
  const double* col(int j) const { return data + static_cast<std::ptrdiff_t>(j) * ld; }
};

struct MatView {
  double* data = nullptr;
  int m = 0;
  int n = 0;
  int ld = 1;

  double& operator()(int i, int j) const { return data[i + static_cast<std::ptrdiff_t>(j) * ld]; }
  double* col(int j) const { return data + static_cast<std::ptrdiff_t>(j) * ld; }
  operator ConstMatView() const { return {data, m, n, ld}; }
};

namespace detail {
inline void check_view_args(std::size_t len, int m, int n, int ld) {
  if (m < 0) throw ArgError(2, "row count must be nonnegative");
  if (n < 0) throw ArgError(3, "column count must be nonnegative");
  if (ld < (m > 0 ? m : 1)) throw ArgError(4, "leading dimension smaller than row count");
  if (n > 0 && m > 0) {
    std::size_t need = static_cast<std::size_t>(ld) * (n - 1) + m;
    if (need > len) throw ArgError(1, "buffer too small for view extents");
  }
}
}  // namespace detail

// Builds a bounds-checked view over caller storage. The buffer must cover
// ld*(n-1)+m elements; violations report the 1-based offending parameter.
inline MatView make_view(std::span<double> buf, int m, int n, int ld) {
  detail::check_view_args(buf.size(), m, n, ld);
  return {buf.data(), m, n, ld};
}

inline ConstMatView make_view(std::span<const double> buf, int m, int n, int ld) {
  detail::check_view_args(buf.size(), m, n, ld);
  return {buf.data(), m, n, ld};
}

// dst <- src^T. dst extents must be (src.n, src.m); no aliasing.
inline void transpose_copy(ConstMatView src, MatView dst) {
  if (dst.m != src.n || dst.n != src.m) throw ArgError(2, "transpose destination extents must be swapped source extents");
  for (int j = 0; j < src.n; ++j)
    for (int i = 0; i < src.m; ++i) dst(j, i) = src(i, j);
}

// Owning column-major matrix. Thin wrapper: storage plus view access.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int m, int n, double fill = 0.0)
      : m_(m), n_(n), ld_(m > 0 ? m : 1), buf_(static_cast<std::size_t>(ld_) * n, fill) {}
  Matrix(int m, int n, int ld, double fill)
      : m_(m), n_(n), ld_(ld), buf_(static_cast<std::size_t>(ld_) * n, fill) {}

  int m() const { return m_; }
  int n() const { return n_; }
  int ld() const { return ld_; }
  double* data() { return buf_.data(); }
  const double* data() const { return buf_.data(); }
  double& operator()(int i, int j) { return buf_[i + static_cast<std::size_t>(j) * ld_]; }
  double operator()(int i, int j) const { return buf_[i + static_cast<std::size_t>(j) * ld_]; }

  MatView view() { return {buf_.data(), m_, n_, ld_}; }
  ConstMatView view() const { return {buf_.data(), m_, n_, ld_}; }
  MatView sub(int i0, int j0, int mm, int nn) {
    return {buf_.data() + i0 + static_cast<std::size_t>(j0) * ld_, mm, nn, ld_};
  }
  ConstMatView sub(int i0, int j0, int mm, int nn) const {
    return {buf_.data() + i0 + static_cast<std::size_t>(j0) * ld_, mm, nn, ld_};
  }

 private:
  int m_ = 0, n_ = 0, ld_ = 1;
  std::vector<double> buf_;
};

}  // namespace panelblas
