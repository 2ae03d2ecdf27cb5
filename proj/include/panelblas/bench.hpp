#pragma once

// Measurement and verification harness behind the bench CLI: seeded size
// sweeps over every routine with per-record medians, model-flop Gflops and
// packing counters, plus the differential fast-vs-oracle suite. All timing
// uses the monotonic steady clock and reports the median over repetitions,
// never the mean, so stray outliers cannot tilt a record. CSV emission
// prints numbers through std::to_chars: locale-independent and round-trip
// exact, so a consumer can recompute Gflops = flops_model / median_s and
// reproduce the emitted value bit for bit.

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "panelblas/factor.hpp"
#include "panelblas/gemm.hpp"
#include "panelblas/level3.hpp"
#include "panelblas/mat_view.hpp"
#include "panelblas/matgen.hpp"
#include "panelblas/panel_mat.hpp"
#include "panelblas/reference.hpp"

namespace panelblas {

enum class BenchRoutine { Gemm, Syrk, Trmm, Trsm, Potrf, Getrf };

inline const char* routine_name(BenchRoutine r) {
  switch (r) {
    case BenchRoutine::Gemm: return "dgemm";
    case BenchRoutine::Syrk: return "dsyrk";
    case BenchRoutine::Trmm: return "dtrmm";
    case BenchRoutine::Trsm: return "dtrsm";
    case BenchRoutine::Potrf: return "dpotrf";
    case BenchRoutine::Getrf: return "dgetrf";
  }
  return "?";
}

inline std::optional<BenchRoutine> parse_routine(std::string_view s) {
  if (s == "dgemm" || s == "gemm") return BenchRoutine::Gemm;
  if (s == "dsyrk" || s == "syrk") return BenchRoutine::Syrk;
  if (s == "dtrmm" || s == "trmm") return BenchRoutine::Trmm;
  if (s == "dtrsm" || s == "trsm") return BenchRoutine::Trsm;
  if (s == "dpotrf" || s == "potrf") return BenchRoutine::Potrf;
  if (s == "dgetrf" || s == "getrf") return BenchRoutine::Getrf;
  return std::nullopt;
}

// Flag characters each routine expects, netlib order:
//   dgemm "nt.."  transa transb     dsyrk "ln"  uplo trans
//   dtrmm/dtrsm "rlnn"  side uplo transa diag
//   dpotrf "l"  uplo                dgetrf ""   none
inline int flag_count(BenchRoutine r) {
  switch (r) {
    case BenchRoutine::Gemm: return 2;
    case BenchRoutine::Syrk: return 2;
    case BenchRoutine::Trmm: return 4;
    case BenchRoutine::Trsm: return 4;
    case BenchRoutine::Potrf: return 1;
    case BenchRoutine::Getrf: return 0;
  }
  return 0;
}

enum class ShapeRule { Square, MFixed4, NFixed4, Custom };

struct Triple {
  int m = 0, n = 0, k = 0;
};

struct SweepSpec {
  BenchRoutine routine = BenchRoutine::Gemm;
  std::string flags = "nn";
  ShapeRule shape = ShapeRule::Square;
  int size_min = 4;
  int size_max = 32;
  int size_step = 4;
  int reps = 5;
  std::optional<GemmVariant> force_variant;
  bool warm_cache = true;  // one untimed call per record before the reps
  std::uint64_t seed = 42;
  std::vector<Triple> custom;  // consumed when shape == ShapeRule::Custom
};

// One sweep record. m, n, k are the operand extents the call actually used;
// a dimension the routine does not have is recorded as 0. variant is empty
// for the factorizations, which have no gemm variant to report.
struct BenchRecord {
  std::string routine;
  std::string flags;
  int m = 0, n = 0, k = 0;
  std::optional<GemmVariant> variant;
  int reps = 0;
  std::int64_t flops_model = 0;
  double median_seconds = 0.0;
  double gflops = 0.0;
  std::int64_t elements_packed = 0;
};

struct SweepOutcome {
  Status status;
  std::vector<BenchRecord> records;
  bool ok() const { return status.ok(); }
};

// Textbook operation counts, not the engine's kernel counters: gemm 2mnk,
// syrk n^2 k, trmm/trsm m^2 n on the left and m n^2 on the right, potrf
// n^3/3, getrf p^2 max(m,n) - p^3/3 with p = min(m,n) (2n^3/3 when square).
inline std::int64_t bench_flops_model(BenchRoutine r, std::string_view flags,
                                      int m, int n, int k) {
  std::int64_t mm = m, nn = n, kk = k;
  switch (r) {
    case BenchRoutine::Gemm: return 2 * mm * nn * kk;
    case BenchRoutine::Syrk: return nn * nn * kk;
    case BenchRoutine::Trmm:
    case BenchRoutine::Trsm:
      return !flags.empty() && (flags[0] == 'l' || flags[0] == 'L')
                 ? nn * mm * mm
                 : mm * nn * nn;
    case BenchRoutine::Potrf: return nn * nn * nn / 3;
    case BenchRoutine::Getrf: {
      std::int64_t p = mm < nn ? mm : nn;
      std::int64_t q = mm < nn ? nn : mm;
      return p * p * q - p * p * p / 3;
    }
  }
  return 0;
}

namespace detail {

// Shape rule -> raw triple; the routine then keeps the dimensions it has.
inline Triple apply_shape(ShapeRule rule, int s, const Triple& custom) {
  switch (rule) {
    case ShapeRule::Square: return {s, s, s};
    case ShapeRule::MFixed4: return {4, s, s};
    case ShapeRule::NFixed4: return {s, 4, s};
    case ShapeRule::Custom: return custom;
  }
  return {s, s, s};
}

inline double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Times one prepared call closure: optional warmup, reps timed runs, median.
template <typename Call>
inline Status time_reps(const SweepSpec& spec, Call&& call, double& median,
                        std::optional<GemmVariant>& variant,
                        std::int64_t& packed) {
  using clock = std::chrono::steady_clock;
  if (spec.warm_cache) {
    Status st = call(variant, packed);
    if (!st.ok()) return st;
  }
  std::vector<double> laps;
  laps.reserve(static_cast<std::size_t>(spec.reps));
  for (int rep = 0; rep < spec.reps; ++rep) {
    auto t0 = clock::now();
    Status st = call(variant, packed);
    auto t1 = clock::now();
    if (!st.ok()) return st;
    laps.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  median = median_of(laps);
  return Status::success();
}

}  // namespace detail

// Runs the sweep serially: per record the operands are generated once from
// spec.seed, then the same call repeats reps times on unchanged inputs
// (beta = 0 for the multiplies, out-of-place factorizations), so every
// repetition does identical work on cache-warm data. variant and
// elements_packed describe one call, not the sum over repetitions.
inline SweepOutcome run_sweep(const SweepSpec& spec,
                              const EngineConfig& base = default_config()) {
  SweepOutcome out;
  auto usage = [&out](const char* msg) -> SweepOutcome& {
    out.status = Status::failure(-1, msg);
    return out;
  };
  if (spec.reps < 1) return usage("repetitions must be at least 1");
  if (spec.shape != ShapeRule::Custom) {
    if (spec.size_min < 1 || spec.size_max < spec.size_min)
      return usage("size range must satisfy 1 <= min <= max");
    if (spec.size_step < 1) return usage("size step must be at least 1");
  } else if (spec.custom.empty()) {
    return usage("custom shape rule needs at least one (m, n, k) triple");
  }
  int want = flag_count(spec.routine);
  if (static_cast<int>(spec.flags.size()) != want)
    return usage("flag string length does not match the routine");

  TransOp transa = TransOp::NoTrans, transb = TransOp::NoTrans;
  Side side = Side::Right;
  Uplo uplo = Uplo::Lower;
  DiagKind diag = DiagKind::NonUnit;
  switch (spec.routine) {
    case BenchRoutine::Gemm: {
      auto ta = parse_trans(spec.flags[0]), tb = parse_trans(spec.flags[1]);
      if (!ta || !tb) return usage("dgemm flags must be two of n/t");
      transa = *ta;
      transb = *tb;
      break;
    }
    case BenchRoutine::Syrk: {
      auto ul = parse_uplo(spec.flags[0]);
      auto tr = parse_trans(spec.flags[1]);
      if (!ul || !tr) return usage("dsyrk flags must be uplo then trans");
      uplo = *ul;
      transa = *tr;
      break;
    }
    case BenchRoutine::Trmm:
    case BenchRoutine::Trsm: {
      auto sd = parse_side(spec.flags[0]);
      auto ul = parse_uplo(spec.flags[1]);
      auto tr = parse_trans(spec.flags[2]);
      auto dg = parse_diag(spec.flags[3]);
      if (!sd || !ul || !tr || !dg)
        return usage("triangular flags must be side, uplo, trans, diag");
      side = *sd;
      uplo = *ul;
      transa = *tr;
      diag = *dg;
      break;
    }
    case BenchRoutine::Potrf: {
      auto ul = parse_uplo(spec.flags[0]);
      if (!ul) return usage("dpotrf flag must be l or u");
      uplo = *ul;
      break;
    }
    case BenchRoutine::Getrf: break;
  }

  EngineConfig cfg = base;
  if (spec.force_variant) cfg.force_variant = spec.force_variant;
  Rng rng(spec.seed);

  std::vector<Triple> shapes;
  if (spec.shape == ShapeRule::Custom) {
    shapes = spec.custom;
  } else {
    for (int s = spec.size_min; s <= spec.size_max; s += spec.size_step)
      shapes.push_back(detail::apply_shape(spec.shape, s, {}));
  }
  for (const Triple& t : shapes)
    if (t.m < 1 || t.n < 1 || (spec.routine == BenchRoutine::Gemm && t.k < 1) ||
        (spec.routine == BenchRoutine::Syrk && t.k < 1))
      return usage("sweep sizes must be at least 1");

  for (const Triple& t : shapes) {
    BenchRecord rec;
    rec.routine = routine_name(spec.routine);
    rec.flags = spec.flags;
    rec.reps = spec.reps;
    double median = 0.0;
    std::optional<GemmVariant> variant;
    std::int64_t packed = 0;
    Status st;

    switch (spec.routine) {
      case BenchRoutine::Gemm: {
        rec.m = t.m;
        rec.n = t.n;
        rec.k = t.k;
        Matrix a(transa == TransOp::NoTrans ? t.m : t.k,
                 transa == TransOp::NoTrans ? t.k : t.m);
        Matrix b(transb == TransOp::NoTrans ? t.k : t.n,
                 transb == TransOp::NoTrans ? t.n : t.k);
        fill_uniform(a.view(), rng);
        fill_uniform(b.view(), rng);
        Matrix d(t.m, t.n);
        st = detail::time_reps(
            spec,
            [&](std::optional<GemmVariant>& v, std::int64_t& p) {
              CallResult r = gemm(cfg, transa, transb, t.m, t.n, t.k, 1.0,
                                  a.view(), b.view(), 0.0, d.view(), d.view());
              v = r.variant;
              p = r.stats.elements_packed;
              return r.status;
            },
            median, variant, packed);
        break;
      }
      case BenchRoutine::Syrk: {
        rec.m = t.n;
        rec.n = t.n;
        rec.k = t.k;
        Matrix a(transa == TransOp::NoTrans ? t.n : t.k,
                 transa == TransOp::NoTrans ? t.k : t.n);
        fill_uniform(a.view(), rng);
        Matrix d(t.n, t.n);
        st = detail::time_reps(
            spec,
            [&](std::optional<GemmVariant>& v, std::int64_t& p) {
              CallResult r = syrk(cfg, uplo, transa, t.n, t.k, 1.0, a.view(),
                                  0.0, d.view(), d.view());
              v = r.variant;
              p = r.stats.elements_packed;
              return r.status;
            },
            median, variant, packed);
        break;
      }
      case BenchRoutine::Trmm:
      case BenchRoutine::Trsm: {
        rec.m = t.m;
        rec.n = t.n;
        int tri = side == Side::Left ? t.m : t.n;
        Matrix a = make_tri(uplo, diag, tri, rng);
        Matrix b(t.m, t.n);
        fill_uniform(b.view(), rng);
        Matrix d(t.m, t.n);
        bool solve = spec.routine == BenchRoutine::Trsm;
        st = detail::time_reps(
            spec,
            [&](std::optional<GemmVariant>& v, std::int64_t& p) {
              CallResult r =
                  solve ? trsm(cfg, side, uplo, transa, diag, t.m, t.n, 1.0,
                               a.view(), b.view(), d.view())
                        : trmm(cfg, side, uplo, transa, diag, t.m, t.n, 1.0,
                               a.view(), b.view(), d.view());
              v = r.variant;
              p = r.stats.elements_packed;
              return r.status;
            },
            median, variant, packed);
        break;
      }
      case BenchRoutine::Potrf: {
        rec.m = t.n;
        rec.n = t.n;
        Matrix a = make_spd(t.n, rng);
        Matrix d(t.n, t.n);
        st = detail::time_reps(
            spec,
            [&](std::optional<GemmVariant>&, std::int64_t& p) {
              FactorResult r = potrf(cfg, uplo, t.n, a.view(), d.view());
              p = r.stats.elements_packed;
              return r.status;
            },
            median, variant, packed);
        break;
      }
      case BenchRoutine::Getrf: {
        rec.m = t.m;
        rec.n = t.n;
        Matrix a(t.m, t.n);
        fill_uniform(a.view(), rng);
        Matrix d(t.m, t.n);
        std::vector<int> ipiv;
        st = detail::time_reps(
            spec,
            [&](std::optional<GemmVariant>&, std::int64_t& p) {
              FactorResult r = getrf(cfg, t.m, t.n, a.view(), d.view(), ipiv);
              p = r.stats.elements_packed;
              return r.status;
            },
            median, variant, packed);
        break;
      }
    }
    if (!st.ok()) {
      out.status = st;
      return out;
    }
    rec.flops_model =
        bench_flops_model(spec.routine, spec.flags, rec.m, rec.n, rec.k);
    rec.median_seconds = median;
    rec.gflops =
        median > 0.0 ? static_cast<double>(rec.flops_model) / median / 1e9 : 0.0;
    rec.variant = variant;
    rec.elements_packed = packed;
    out.records.push_back(std::move(rec));
  }
  return out;
}

// Shortest round-trip decimal form, independent of any locale.
inline std::string format_double(double v) {
  std::array<char, 32> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

template <typename Int>
inline std::string format_int(Int v) {
  static_assert(std::is_integral_v<Int>);
  std::array<char, 24> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

inline constexpr std::string_view kCsvHeader =
    "routine,flags,m,n,k,variant,reps,flops_model,median_s,gflops,"
    "elements_packed";

// Stable schema: one metadata comment naming the generator seed and panel
// height, the fixed header, one line per record in sweep order. Every number
// goes through to_chars, so an imbued or global locale cannot regroup digits
// or swap the decimal separator.
inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& records,
                      std::uint64_t seed, int ps) {
  os << "# panelblas sweep seed=" << format_int(seed) << " ps="
     << format_int(ps) << "\n";
  os << kCsvHeader << "\n";
  for (const BenchRecord& r : records) {
    os << r.routine << ',' << r.flags << ',' << format_int(r.m) << ','
       << format_int(r.n) << ',' << format_int(r.k) << ','
       << (r.variant ? variant_name(*r.variant) : "-") << ','
       << format_int(r.reps) << ',' << format_int(r.flops_model) << ','
       << format_double(r.median_seconds) << ',' << format_double(r.gflops)
       << ',' << format_int(r.elements_packed) << "\n";
  }
}

// One differential check: engine result against the naive oracle.
struct VerifyCase {
  std::string routine;
  std::string flags;
  int m = 0, n = 0, k = 0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  int cases_run = 0;
  int failures = 0;
  std::vector<VerifyCase> failed;  // only the failing cases, for the report
  bool pass() const { return failures == 0; }
};

namespace detail {

inline double normwise_dev(ConstMatView got, ConstMatView want) {
  double scale = frob_norm(want);
  if (scale < 1.0) scale = 1.0;
  return max_abs_diff(got, want) / scale;
}

inline char trans_char(TransOp t) { return t == TransOp::NoTrans ? 'n' : 't'; }
inline char uplo_char(Uplo u) { return u == Uplo::Lower ? 'l' : 'u'; }
inline char side_char(Side s) { return s == Side::Left ? 'l' : 'r'; }
inline char diag_char(DiagKind d) { return d == DiagKind::NonUnit ? 'n' : 'u'; }

inline void record_case(VerifyReport& report, VerifyCase c) {
  ++report.cases_run;
  if (!c.pass) {
    ++report.failures;
    report.failed.push_back(std::move(c));
  }
}

inline bool filter_hits(std::string_view filter, std::string_view routine) {
  if (filter.empty() || filter == "all") return true;
  return routine.find(filter) != std::string_view::npos;
}

}  // namespace detail

// Differential suite behind the CLI verify subcommand: `count` random cases
// per routine/flag family with dimensions in [1, 96], engine against the
// naive oracle at 1e-13 normwise (multiplies, solves, factor entries), plus
// reconstruction at 1e-12 * |input|_F for the factorizations. filter
// selects routines by substring ("" or "all" runs everything); count = 0
// runs nothing and passes vacuously. Results are a pure function of
// (filter, seed, count, cfg).
inline VerifyReport verify_suite(std::string_view filter, std::uint64_t seed,
                                 int count,
                                 const EngineConfig& cfg = default_config()) {
  VerifyReport report;
  Rng rng(seed);
  auto dim = [&rng]() { return rng.uniform_int(1, 96); };

  if (detail::filter_hits(filter, "dgemm")) {
    constexpr TransOp ops[2] = {TransOp::NoTrans, TransOp::Trans};
    for (int c = 0; c < count; ++c) {
      TransOp ta = ops[c % 2], tb = ops[(c / 2) % 2];
      int m = dim(), n = dim(), k = dim();
      Matrix a(ta == TransOp::NoTrans ? m : k, ta == TransOp::NoTrans ? k : m);
      Matrix b(tb == TransOp::NoTrans ? k : n, tb == TransOp::NoTrans ? n : k);
      Matrix cm(m, n);
      fill_uniform(a.view(), rng);
      fill_uniform(b.view(), rng);
      fill_uniform(cm.view(), rng);
      double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
      Matrix got(m, n), want = cm;
      CallResult r = gemm(cfg, ta, tb, m, n, k, alpha, a.view(), b.view(), beta,
                          cm.view(), got.view());
      ref::naive_gemm(ta, tb, m, n, k, alpha, a.view(), b.view(), beta,
                      want.view());
      VerifyCase vc{"dgemm",
                    {detail::trans_char(ta), detail::trans_char(tb)},
                    m,
                    n,
                    k,
                    detail::normwise_dev(got.view(), want.view()),
                    1e-13,
                    false};
      vc.pass = r.ok() && vc.deviation <= vc.tolerance;
      detail::record_case(report, std::move(vc));
    }
  }

  if (detail::filter_hits(filter, "dsyrk")) {
    constexpr Uplo uplos[2] = {Uplo::Lower, Uplo::Upper};
    constexpr TransOp ops[2] = {TransOp::NoTrans, TransOp::Trans};
    for (int c = 0; c < count; ++c) {
      Uplo ul = uplos[c % 2];
      TransOp tr = ops[(c / 2) % 2];
      int n = dim(), k = dim();
      Matrix a(tr == TransOp::NoTrans ? n : k, tr == TransOp::NoTrans ? k : n);
      Matrix cm(n, n);
      fill_uniform(a.view(), rng);
      fill_uniform(cm.view(), rng);
      double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
      Matrix got = cm, want = cm;
      CallResult r = syrk(cfg, ul, tr, n, k, alpha, a.view(), beta, got.view());
      ref::naive_syrk(ul, tr, n, k, alpha, a.view(), beta, want.view());
      VerifyCase vc{"dsyrk",
                    {detail::uplo_char(ul), detail::trans_char(tr)},
                    n,
                    n,
                    k,
                    detail::normwise_dev(got.view(), want.view()),
                    1e-13,
                    false};
      vc.pass = r.ok() && vc.deviation <= vc.tolerance;
      detail::record_case(report, std::move(vc));
    }
  }

  for (bool solve : {false, true}) {
    const char* name = solve ? "dtrsm" : "dtrmm";
    if (!detail::filter_hits(filter, name)) continue;
    constexpr Side sides[2] = {Side::Left, Side::Right};
    constexpr Uplo uplos[2] = {Uplo::Lower, Uplo::Upper};
    constexpr TransOp ops[2] = {TransOp::NoTrans, TransOp::Trans};
    constexpr DiagKind diags[2] = {DiagKind::NonUnit, DiagKind::Unit};
    for (int c = 0; c < count; ++c) {
      Side sd = sides[c % 2];
      Uplo ul = uplos[(c / 2) % 2];
      TransOp tr = ops[(c / 4) % 2];
      DiagKind dg = diags[(c / 8) % 2];
      int m = dim(), n = dim();
      int tri = sd == Side::Left ? m : n;
      Matrix a = make_tri(ul, dg, tri, rng);
      Matrix b(m, n);
      fill_uniform(b.view(), rng);
      double alpha = rng.uniform(-2.0, 2.0);
      Matrix got = b, want = b;
      CallResult r = solve ? trsm(cfg, sd, ul, tr, dg, m, n, alpha, a.view(),
                                  got.view())
                           : trmm(cfg, sd, ul, tr, dg, m, n, alpha, a.view(),
                                  got.view());
      Status os = solve ? ref::naive_trsm(sd, ul, tr, dg, m, n, alpha, a.view(),
                                          want.view())
                        : (ref::naive_trmm(sd, ul, tr, dg, m, n, alpha,
                                           a.view(), want.view()),
                           Status::success());
      VerifyCase vc{name,
                    {detail::side_char(sd), detail::uplo_char(ul),
                     detail::trans_char(tr), detail::diag_char(dg)},
                    m,
                    n,
                    0,
                    detail::normwise_dev(got.view(), want.view()),
                    1e-13,
                    false};
      vc.pass = r.ok() && os.ok() && vc.deviation <= vc.tolerance;
      detail::record_case(report, std::move(vc));
    }
  }

  if (detail::filter_hits(filter, "dpotrf")) {
    constexpr Uplo uplos[2] = {Uplo::Lower, Uplo::Upper};
    for (int c = 0; c < count; ++c) {
      Uplo ul = uplos[c % 2];
      int n = dim();
      Matrix a = make_spd(n, rng);
      Matrix got = a, want = a;
      FactorResult r = potrf(cfg, ul, n, got.view());
      Status os = ref::naive_potrf(ul, n, want.view());
      // Both the factor match and the reconstruction must hold.
      double dev = detail::normwise_dev(got.view(), want.view());
      double recon = 0.0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          int lim = i < j ? i : j;
          for (int l = 0; l <= lim; ++l)
            s += ul == Uplo::Lower ? got(i, l) * got(j, l)
                                   : got(l, i) * got(l, j);
          double d0 = std::abs(s - a(i, j));
          if (d0 > recon) recon = d0;
        }
      double anorm = frob_norm(a.view());
      if (anorm < 1.0) anorm = 1.0;
      VerifyCase vc{"dpotrf",
                    {detail::uplo_char(ul)},
                    n,
                    n,
                    0,
                    std::max(dev, recon / anorm),
                    1e-12,
                    false};
      vc.pass = r.ok() && os.ok() && dev <= 1e-13 && recon <= 1e-12 * anorm;
      detail::record_case(report, std::move(vc));
    }
  }

  if (detail::filter_hits(filter, "dgetrf")) {
    for (int c = 0; c < count; ++c) {
      int m = dim(), n = dim();
      Matrix a(m, n);
      fill_uniform(a.view(), rng);
      Matrix got = a, want = a;
      std::vector<int> gp, wp;
      FactorResult r = getrf(cfg, m, n, got.view(), gp);
      Status os = ref::naive_getrf(m, n, want.view(), wp);
      double dev = detail::normwise_dev(got.view(), want.view());
      VerifyCase vc{"dgetrf", "", m, n, 0, dev, 1e-13, false};
      vc.pass = r.status.info == os.info && gp == wp && dev <= vc.tolerance;
      detail::record_case(report, std::move(vc));
    }
  }

  return report;
}

}  // namespace panelblas
