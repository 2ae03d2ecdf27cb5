#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <vector>

#include "panelblas/gemm.hpp"
#include "panelblas/matgen.hpp"
#include "panelblas/reference.hpp"

using namespace panelblas;

namespace {

struct Shape {
  int m, n, k;
};

const std::vector<Shape> kShapes = {
    {1, 1, 1},  {3, 5, 7},   {8, 8, 8},   {11, 4, 9},  {5, 23, 6},
    {16, 16, 16}, {24, 8, 37}, {7, 64, 5}, {64, 7, 5},  {33, 29, 31},
};

Matrix make_operand(TransOp t, int rows, int cols, Rng& rng) {
  Matrix a(t == TransOp::NoTrans ? rows : cols, t == TransOp::NoTrans ? cols : rows);
  fill_uniform(a.view(), rng);
  return a;
}

void require_close(ConstMatView got, ConstMatView want, double tol) {
  double scale = frob_norm(want);
  if (scale < 1.0) scale = 1.0;
  for (int j = 0; j < want.n; ++j)
    for (int i = 0; i < want.m; ++i)
      REQUIRE(std::abs(got(i, j) - want(i, j)) <= tol * scale);
}

}  // namespace

TEST_CASE("all variants agree with the reference and with each other") {
  Rng rng(301);
  EngineConfig base;
  for (const Shape& s : kShapes) {
    for (TransOp ta : {TransOp::NoTrans, TransOp::Trans}) {
      for (TransOp tb : {TransOp::NoTrans, TransOp::Trans}) {
        Matrix a = make_operand(ta, s.m, s.k, rng);
        Matrix b = make_operand(tb, s.k, s.n, rng);
        Matrix c(s.m, s.n);
        fill_uniform(c.view(), rng);

        Matrix want = c;
        ref::naive_gemm(ta, tb, s.m, s.n, s.k, 1.3, a.view(), b.view(), 0.7, want.view());

        bool tn = ta == TransOp::Trans && tb == TransOp::NoTrans;
        Matrix first;
        bool have_first = false;
        for (GemmVariant v : {GemmVariant::A, GemmVariant::B, GemmVariant::C,
                              GemmVariant::Ct, GemmVariant::D}) {
          EngineConfig cfg = base;
          cfg.force_variant = v;
          Matrix d(s.m, s.n, 0.0);
          CallResult r = gemm(cfg, ta, tb, s.m, s.n, s.k, 1.3, a.view(), b.view(), 0.7,
                              c.view(), d.view());
          if (v == GemmVariant::D && tn) {
            REQUIRE_FALSE(r.ok());
            REQUIRE(r.status.info == kInfoUnsupported);
            continue;
          }
          REQUIRE(r.ok());
          REQUIRE(r.variant == v);
          require_close(d.view(), want.view(), 1e-13);
          // Identical accumulation order across variants: results match to
          // the last bit, not merely to tolerance.
          if (!have_first) {
            first = d;
            have_first = true;
          } else {
            REQUIRE(std::memcmp(d.data(), first.data(),
                                sizeof(double) * s.m * s.n) == 0);
          }
        }
      }
    }
  }
}

TEST_CASE("gemm is deterministic and supports exact in-place updates") {
  Rng rng(302);
  EngineConfig cfg;
  Matrix a(17, 9), b(9, 13), c(17, 13);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  fill_uniform(c.view(), rng);

  Matrix d1(17, 13, 0.0), d2(17, 13, 0.0);
  REQUIRE(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 17, 13, 9, 0.9, a.view(),
               b.view(), -0.4, c.view(), d1.view()).ok());
  REQUIRE(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 17, 13, 9, 0.9, a.view(),
               b.view(), -0.4, c.view(), d2.view()).ok());
  REQUIRE(std::memcmp(d1.data(), d2.data(), sizeof(double) * 17 * 13) == 0);

  Matrix cc = c;
  REQUIRE(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 17, 13, 9, 0.9, a.view(),
               b.view(), -0.4, cc.view()).ok());
  REQUIRE(std::memcmp(cc.data(), d1.data(), sizeof(double) * 17 * 13) == 0);
}

TEST_CASE("variant selection follows the documented regimes") {
  EngineConfig cfg;  // defaults: mr 8, nr 4, switch_dim 256, cap 64 KiB

  // Tiny stays tiny regardless of depth.
  CHECK(select_variant(cfg, TransOp::NoTrans, TransOp::NoTrans, 4, 4, 300) == GemmVariant::D);
  CHECK(select_variant(cfg, TransOp::NoTrans, TransOp::Trans, 8, 8, 1) == GemmVariant::D);
  CHECK(select_variant(cfg, TransOp::Trans, TransOp::Trans, 2, 2, 2) == GemmVariant::D);

  // TN has no native tiny kernel.
  GemmVariant tn = select_variant(cfg, TransOp::Trans, TransOp::NoTrans, 4, 4, 8);
  CHECK(tn != GemmVariant::D);
  CHECK(tn != GemmVariant::A);

  // Bounded regime packs the smaller operand.
  CHECK(select_variant(cfg, TransOp::NoTrans, TransOp::NoTrans, 100, 200, 50) == GemmVariant::C);
  CHECK(select_variant(cfg, TransOp::NoTrans, TransOp::NoTrans, 200, 100, 50) == GemmVariant::Ct);
  CHECK(select_variant(cfg, TransOp::NoTrans, TransOp::NoTrans, 100, 100, 100) == GemmVariant::Ct);

  // Large problems fall back to the full pack.
  CHECK(select_variant(cfg, TransOp::NoTrans, TransOp::NoTrans, 300, 100, 50) == GemmVariant::B);
  CHECK(select_variant(cfg, TransOp::NoTrans, TransOp::NoTrans, 100, 100, 300) == GemmVariant::B);

  // Scratch cap disqualifies the bounded variants.
  EngineConfig tight = cfg;
  tight.bounded_scratch_cap = 1024;
  CHECK(select_variant(tight, TransOp::NoTrans, TransOp::NoTrans, 100, 200, 50) == GemmVariant::B);

  // Threshold overrides.
  EngineConfig no_tiny = cfg;
  no_tiny.tiny_m = 0;
  CHECK(select_variant(no_tiny, TransOp::NoTrans, TransOp::NoTrans, 4, 4, 4) != GemmVariant::D);

  EngineConfig forced = cfg;
  forced.force_variant = GemmVariant::A;
  CHECK(select_variant(forced, TransOp::NoTrans, TransOp::NoTrans, 100, 100, 100) == GemmVariant::A);
}

TEST_CASE("variant choice is monotone in problem size") {
  EngineConfig cfg;
  auto rank = [](GemmVariant v) {
    switch (v) {
      case GemmVariant::D: return 0;
      case GemmVariant::C:
      case GemmVariant::Ct: return 1;
      default: return 2;
    }
  };
  int last = 0;
  for (int s = 1; s <= 300; ++s) {
    int r = rank(select_variant(cfg, TransOp::NoTrans, TransOp::NoTrans, s, s, s));
    REQUIRE(r >= last);
    last = r;
  }
  CHECK(last == 2);
}

TEST_CASE("packed element counts equal the advertised formulas") {
  Rng rng(303);
  const int m = 13, n = 9, k = 11;
  Matrix a(m, k), b(k, n), c(m, n);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  fill_uniform(c.view(), rng);

  for (GemmVariant v : {GemmVariant::A, GemmVariant::B, GemmVariant::C,
                        GemmVariant::Ct, GemmVariant::D}) {
    EngineConfig cfg;
    cfg.force_variant = v;
    Matrix d(m, n, 0.0);
    CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, m, n, k, 1.0, a.view(),
                        b.view(), 0.5, c.view(), d.view());
    REQUIRE(r.ok());
    CHECK(r.stats.elements_packed == variant_planned_packing(v, m, n, k));
  }
  CHECK(variant_planned_packing(GemmVariant::A, m, n, k) == 476);
  CHECK(variant_planned_packing(GemmVariant::B, m, n, k) == 242);
  CHECK(variant_planned_packing(GemmVariant::C, m, n, k) == 143);
  CHECK(variant_planned_packing(GemmVariant::Ct, m, n, k) == 99);
  CHECK(variant_planned_packing(GemmVariant::D, m, n, k) == 0);
}

TEST_CASE("scratch usage matches each variant's class") {
  Rng rng(304);
  const int m = 13, n = 9, k = 11;
  Matrix a(m, k), b(k, n), c(m, n);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  fill_uniform(c.view(), rng);

  auto run = [&](GemmVariant v) {
    EngineConfig cfg;
    cfg.force_variant = v;
    Matrix d(m, n, 0.0);
    CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, m, n, k, 1.0, a.view(),
                        b.view(), 0.5, c.view(), d.view());
    REQUIRE(r.ok());
    return r.stats;
  };

  PackStats sa = run(GemmVariant::A);
  CHECK(sa.scratch_bytes_dynamic > 0);
  PackStats sb = run(GemmVariant::B);
  CHECK(sb.scratch_bytes_dynamic > 0);
  CHECK(sb.scratch_bytes_bounded > 0);

  PackStats sc = run(GemmVariant::C);
  CHECK(sc.scratch_bytes_dynamic == 0);
  CHECK(sc.scratch_bytes_bounded == 8LL * k * 8);
  CHECK(sc.scratch_bytes_bounded <= static_cast<std::int64_t>(kBoundedArenaBytes));

  PackStats st = run(GemmVariant::Ct);
  CHECK(st.scratch_bytes_dynamic == 0);

  PackStats sd = run(GemmVariant::D);
  CHECK(sd.scratch_bytes_bounded == 0);
  CHECK(sd.scratch_bytes_dynamic == 0);
  CHECK(sd.elements_packed == 0);

  CHECK(variant_scratch_class(GemmVariant::A) == ScratchClass::Heap);
  CHECK(variant_scratch_class(GemmVariant::C) == ScratchClass::Bounded);
  CHECK(variant_scratch_class(GemmVariant::D) == ScratchClass::None);
}

TEST_CASE("flop counters sum to the textbook count") {
  Rng rng(305);
  // Dimensions divide the tile exactly, so even panel variants count 2mnk.
  const int m = 16, n = 8, k = 4;
  Matrix a(m, k), b(k, n), c(m, n);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  fill_uniform(c.view(), rng);
  for (GemmVariant v : {GemmVariant::A, GemmVariant::B, GemmVariant::C,
                        GemmVariant::Ct, GemmVariant::D}) {
    EngineConfig cfg;
    cfg.force_variant = v;
    Matrix d(m, n, 0.0);
    CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, m, n, k, 1.0, a.view(),
                        b.view(), 0.0, c.view(), d.view());
    REQUIRE(r.ok());
    CHECK(r.flops == 2LL * m * n * k);
  }

  // Ragged shapes still count exactly under variant D's element masks.
  Matrix a2(5, 7), b2(7, 3), c2(5, 3), d2(5, 3, 0.0);
  fill_uniform(a2.view(), rng);
  fill_uniform(b2.view(), rng);
  fill_uniform(c2.view(), rng);
  EngineConfig cfg;
  cfg.force_variant = GemmVariant::D;
  CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 5, 3, 7, 1.0, a2.view(),
                      b2.view(), 0.0, c2.view(), d2.view());
  CHECK(r.flops == 2LL * 5 * 3 * 7);
}

TEST_CASE("beta zero never reads C through any variant") {
  Rng rng(306);
  const int m = 9, n = 7, k = 5;
  Matrix a(m, k), b(k, n);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  Matrix c(m, n, std::numeric_limits<double>::quiet_NaN());

  Matrix want(m, n, 0.0);
  ref::naive_gemm(TransOp::NoTrans, TransOp::NoTrans, m, n, k, 1.0, a.view(), b.view(),
                  0.0, want.view());

  for (GemmVariant v : {GemmVariant::A, GemmVariant::B, GemmVariant::C,
                        GemmVariant::Ct, GemmVariant::D}) {
    EngineConfig cfg;
    cfg.force_variant = v;
    Matrix d(m, n, std::numeric_limits<double>::quiet_NaN());
    CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, m, n, k, 1.0, a.view(),
                        b.view(), 0.0, c.view(), d.view());
    REQUIRE(r.ok());
    require_close(d.view(), want.view(), 1e-13);
  }
}

TEST_CASE("quick returns scale the result without packing") {
  Rng rng(307);
  const int m = 10, n = 6;
  Matrix a(m, 4), b(4, n), c(m, n);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  fill_uniform(c.view(), rng);
  EngineConfig cfg;

  SECTION("alpha zero") {
    Matrix d(m, n, 0.0);
    CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, m, n, 4, 0.0, a.view(),
                        b.view(), 2.0, c.view(), d.view());
    REQUIRE(r.ok());
    CHECK(r.stats.elements_packed == 0);
    CHECK(r.flops == 0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) REQUIRE(d(i, j) == 2.0 * c(i, j));
  }
  SECTION("k zero with beta zero wipes D without reading anything") {
    Matrix az(m, 0), bz(0, n);
    Matrix d(m, n, std::numeric_limits<double>::quiet_NaN());
    Matrix cnan(m, n, std::numeric_limits<double>::quiet_NaN());
    CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, m, n, 0, 1.0, az.view(),
                        bz.view(), 0.0, cnan.view(), d.view());
    REQUIRE(r.ok());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) REQUIRE(d(i, j) == 0.0);
  }
  SECTION("empty result dimensions return immediately") {
    Matrix a0(0, 4), c0(0, n), d0(0, n);
    CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 0, n, 4, 1.0, a0.view(),
                        b.view(), 1.0, c0.view(), d0.view());
    REQUIRE(r.ok());
    CHECK(r.stats.elements_packed == 0);
  }
}

TEST_CASE("gemm rejects malformed calls with netlib argument positions") {
  Matrix a(3, 2), b(2, 3), c(3, 3), d(3, 3);
  EngineConfig cfg;
  CHECK(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, -1, 3, 2, 1.0, a.view(), b.view(),
             0.0, c.view(), d.view()).status.info == -3);
  CHECK(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 3, -1, 2, 1.0, a.view(), b.view(),
             0.0, c.view(), d.view()).status.info == -4);
  CHECK(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 3, 3, -1, 1.0, a.view(), b.view(),
             0.0, c.view(), d.view()).status.info == -5);
  CHECK(gemm(cfg, TransOp::Trans, TransOp::NoTrans, 3, 3, 2, 1.0, a.view(), b.view(),
             0.0, c.view(), d.view()).status.info == -8);
  Matrix bbad(3, 3);
  CHECK(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 3, 3, 2, 1.0, a.view(), bbad.view(),
             0.0, c.view(), d.view()).status.info == -10);
  Matrix cbad(2, 3);
  CHECK(gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, 3, 3, 2, 1.0, a.view(), b.view(),
             0.0, cbad.view(), d.view()).status.info == -13);
}

TEST_CASE("engine configuration reads the documented environment variables") {
  setenv("PANELBLAS_PS", "8", 1);
  setenv("PANELBLAS_MR", "16", 1);
  setenv("PANELBLAS_NR", "8", 1);
  setenv("PANELBLAS_SWITCH_DIM", "123", 1);
  setenv("PANELBLAS_TINY_M", "5", 1);
  setenv("PANELBLAS_TINY_N", "6", 1);
  setenv("PANELBLAS_SCRATCH_CAP", "4096", 1);
  setenv("PANELBLAS_MUTATE", "0.125", 1);
  EngineConfig cfg = config_from_env();
  CHECK(cfg.kernel.ps == 8);
  CHECK(cfg.kernel.mr == 16);
  CHECK(cfg.kernel.nr == 8);
  CHECK(cfg.switch_dim == 123);
  CHECK(cfg.tiny_m == 5);
  CHECK(cfg.tiny_n == 6);
  CHECK(cfg.bounded_scratch_cap == 4096);
  CHECK(cfg.kernel.mutation_epsilon == 0.125);

  // Invalid kernel combinations fall back to the defaults.
  setenv("PANELBLAS_MR", "6", 1);
  EngineConfig bad = config_from_env();
  CHECK(bad.kernel.ps == 4);
  CHECK(bad.kernel.mr == 8);

  // Garbage numbers are ignored.
  setenv("PANELBLAS_SWITCH_DIM", "not-a-number", 1);
  EngineConfig junk = config_from_env();
  CHECK(junk.switch_dim == 256);

  for (const char* name : {"PANELBLAS_PS", "PANELBLAS_MR", "PANELBLAS_NR",
                           "PANELBLAS_SWITCH_DIM", "PANELBLAS_TINY_M", "PANELBLAS_TINY_N",
                           "PANELBLAS_SCRATCH_CAP", "PANELBLAS_MUTATE"})
    unsetenv(name);
}

TEST_CASE("alternate kernel geometries produce the same results") {
  Rng rng(308);
  const int m = 19, n = 14, k = 12;
  Matrix a(m, k), b(k, n), c(m, n);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  fill_uniform(c.view(), rng);
  Matrix want = c;
  ref::naive_gemm(TransOp::NoTrans, TransOp::NoTrans, m, n, k, 1.1, a.view(), b.view(),
                  -0.3, want.view());

  for (int ps : {4, 8}) {
    for (int mult : {1, 2, 3}) {
      for (int nr : {4, 8}) {
        KernelConfig kc{ps, mult * ps, nr, 0.0};
        if (!kernel_config_valid(kc)) continue;
        for (GemmVariant v : {GemmVariant::A, GemmVariant::B, GemmVariant::C}) {
          EngineConfig cfg;
          cfg.kernel = kc;
          cfg.force_variant = v;
          Matrix d(m, n, 0.0);
          CallResult r = gemm(cfg, TransOp::NoTrans, TransOp::NoTrans, m, n, k, 1.1,
                              a.view(), b.view(), -0.3, c.view(), d.view());
          REQUIRE(r.ok());
          require_close(d.view(), want.view(), 1e-13);
        }
      }
    }
  }
}
