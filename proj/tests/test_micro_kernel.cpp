#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "panelblas/matgen.hpp"
#include "panelblas/micro_kernel.hpp"
#include "panelblas/reference.hpp"

using namespace panelblas;

namespace {

PanelMat pack_panel(ConstMatView blk, int ps) {
  PanelMat p(blk.m, blk.n, ps);
  pack_from_colmajor(blk, p.ref());
  return p;
}

double rel_diff(double a, double b) {
  double scale = std::abs(b) > 1.0 ? std::abs(b) : 1.0;
  return std::abs(a - b) / scale;
}

std::vector<KernelConfig> all_kernel_configs() {
  std::vector<KernelConfig> v;
  for (int ps : {4, 8})
    for (int mult : {1, 2, 3})
      for (int nr : {4, 8}) {
        KernelConfig kc{ps, mult * ps, nr, 0.0};
        if (kernel_config_valid(kc)) v.push_back(kc);
      }
  return v;
}

}  // namespace

TEST_CASE("kernel_config_valid enforces the tile grammar") {
  CHECK(kernel_config_valid(KernelConfig{4, 8, 4, 0.0}));
  CHECK(kernel_config_valid(KernelConfig{4, 4, 4, 0.0}));
  CHECK(kernel_config_valid(KernelConfig{4, 12, 4, 0.0}));
  CHECK(kernel_config_valid(KernelConfig{8, 24, 8, 0.0}));
  CHECK(kernel_config_valid(KernelConfig{8, 8, 4, 0.0}));
  CHECK_FALSE(kernel_config_valid(KernelConfig{4, 8, 8, 0.0}));   // nr > ps at ps 4
  CHECK_FALSE(kernel_config_valid(KernelConfig{4, 6, 4, 0.0}));   // mr not multiple
  CHECK_FALSE(kernel_config_valid(KernelConfig{4, 16, 4, 0.0}));  // > 3 panels
  CHECK_FALSE(kernel_config_valid(KernelConfig{2, 4, 2, 0.0}));   // bad ps
  CHECK_FALSE(kernel_config_valid(KernelConfig{8, 8, 16, 0.0}));  // nr > mr
}

TEST_CASE("strided windows address plain and transposed storage") {
  Matrix a(5, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 5; ++i) a(i, j) = 10 * i + j;

  CWin w = cwin(a.view(), 1, 2);
  CHECK(w.at(0, 0) == a(1, 2));
  CHECK(w.at(2, 1) == a(3, 3));

  CWin t = cwin_trans(a.view(), 1, 2);  // element (r, c) of A^T offset (1, 2)
  CHECK(t.at(0, 0) == a(2, 1));
  CHECK(t.at(1, 2) == a(4, 2));

  Win mw = win(a.view(), 0, 0);
  mw.at(4, 3) = -1.0;
  CHECK(a(4, 3) == -1.0);
  Win mt = win_trans(a.view(), 0, 0);
  mt.at(3, 4) = -2.0;
  CHECK(a(4, 3) == -2.0);
}

TEST_CASE("every inner_gemm layout produces the same tile") {
  Rng rng(201);
  for (const KernelConfig& kc : all_kernel_configs()) {
    const int k = 9;
    Matrix ablk(kc.mr, k), bblk(kc.nr, k);
    fill_uniform(ablk.view(), rng);
    fill_uniform(bblk.view(), rng);
    Matrix bt(k, kc.nr);
    transpose_copy(bblk.view(), bt.view());

    // Reference product of the logical blocks.
    Matrix want(kc.mr, kc.nr, 0.0);
    ref::naive_gemm(TransOp::NoTrans, TransOp::Trans, kc.mr, kc.nr, k, 1.0,
                    ablk.view(), bblk.view(), 0.0, want.view());

    PanelMat ap = pack_panel(ablk.view(), kc.ps);
    PanelMat bp = pack_panel(bblk.view(), kc.ps);   // nr x k chunk source
    PanelMat bn = pack_panel(bt.view(), kc.ps);     // k x nr native panel

    AccTile t1;
    tile_zero(kc, t1);
    std::int64_t fl = inner_gemm_nt_pp(kc, k, pband(psrc(ap.ref()), 0), ap.cn(),
                                       pchunk(psrc(bp.ref()), 0), t1);
    CHECK(fl == 2LL * kc.mr * kc.nr * k);
    for (int j = 0; j < kc.nr; ++j)
      for (int i = 0; i < kc.mr; ++i) REQUIRE(rel_diff(t1.at(i, j), want(i, j)) <= 1e-15);

    AccTile t2;
    tile_zero(kc, t2);
    inner_gemm_nn_pp(kc, k, pband(psrc(ap.ref()), 0), ap.cn(), psrc(bn.ref()), 0, 0, t2);
    AccTile t3;
    tile_zero(kc, t3);
    inner_gemm_nn_pc(kc, k, pband(psrc(ap.ref()), 0), ap.cn(), bt.data(), bt.ld(), t3, kc.nr);
    AccTile t4;
    tile_zero(kc, t4);
    inner_gemm_nt_pc(kc, k, pband(psrc(ap.ref()), 0), ap.cn(), bblk.data(), bblk.ld(), t4, kc.nr);
    AccTile t5;
    tile_zero(kc, t5);
    std::int64_t fl5 = inner_gemm_nn_cc(kc, k, ablk.data(), ablk.ld(), bt.data(), bt.ld(),
                                        t5, kc.mr, kc.nr);
    CHECK(fl5 == 2LL * kc.mr * kc.nr * k);
    AccTile t6;
    tile_zero(kc, t6);
    inner_gemm_nt_cc(kc, k, ablk.data(), ablk.ld(), bblk.data(), bblk.ld(), t6, kc.mr, kc.nr);

    for (int j = 0; j < kc.nr; ++j)
      for (int i = 0; i < kc.mr; ++i) {
        double r = t1.at(i, j);
        REQUIRE(rel_diff(t2.at(i, j), r) <= 1e-15);
        REQUIRE(rel_diff(t3.at(i, j), r) <= 1e-15);
        REQUIRE(rel_diff(t4.at(i, j), r) <= 1e-15);
        REQUIRE(rel_diff(t5.at(i, j), r) <= 1e-15);
        REQUIRE(rel_diff(t6.at(i, j), r) <= 1e-15);
      }
  }
}

TEST_CASE("inner products accumulate into prior tile contents") {
  KernelConfig kc{4, 8, 4, 0.0};
  Rng rng(202);
  Matrix ablk(8, 3), bblk(4, 3);
  fill_int(ablk.view(), rng);
  fill_int(bblk.view(), rng);
  PanelMat ap = pack_panel(ablk.view(), 4);
  PanelMat bp = pack_panel(bblk.view(), 4);

  AccTile t;
  tile_zero(kc, t);
  t.at(2, 1) = 100.0;
  inner_gemm_nt_pp(kc, 3, pband(psrc(ap.ref()), 0), ap.cn(), pchunk(psrc(bp.ref()), 0), t);
  double s = 0.0;
  for (int l = 0; l < 3; ++l) s += ablk(2, l) * bblk(1, l);
  CHECK(t.at(2, 1) == 100.0 + s);
}

TEST_CASE("chunk addressing reads nr rows inside a panel") {
  // At ps 8 / nr 4 a chunk may start halfway down a panel.
  KernelConfig kc{8, 8, 4, 0.0};
  Rng rng(203);
  Matrix bblk(12, 5);
  fill_uniform(bblk.view(), rng);
  PanelMat bp = pack_panel(bblk.view(), 8);

  const double* chunk = pchunk(psrc(bp.ref()), 4);
  for (int l = 0; l < 5; ++l)
    for (int j = 0; j < 4; ++j) REQUIRE(chunk[l * 8 + j] == bblk(4 + j, l));
}

TEST_CASE("scale_ab applies alpha and beta with a NaN-safe zero beta") {
  KernelConfig kc{4, 8, 4, 0.0};
  AccTile t;
  tile_zero(kc, t);
  t.at(0, 0) = 2.0;
  t.at(7, 3) = -4.0;

  Matrix c(8, 4, std::numeric_limits<double>::quiet_NaN());
  scale_ab(kc, 0.5, 0.0, cwin(c.view(), 0, 0), t, 8, 4);
  CHECK(t.at(0, 0) == 1.0);
  CHECK(t.at(7, 3) == -2.0);
  CHECK(t.at(3, 2) == 0.0);

  Matrix c2(8, 4, 10.0);
  scale_ab(kc, 2.0, 3.0, cwin(c2.view(), 0, 0), t, 8, 4);
  CHECK(t.at(0, 0) == 32.0);
  CHECK(t.at(7, 3) == 26.0);

  // Panel-source flavor agrees.
  AccTile u;
  tile_zero(kc, u);
  u.at(1, 1) = 5.0;
  PanelMat cp(8, 4, 4);
  cp.fill_zero();
  cp.at(1, 1) = 7.0;
  scale_ab_p(kc, 2.0, -1.0, psrc(cp.ref()), 0, 0, u, 8, 4);
  CHECK(u.at(1, 1) == 3.0);
}

TEST_CASE("scale_m11 forms the factorization update C minus tile") {
  KernelConfig kc{4, 4, 4, 0.0};
  AccTile t;
  tile_zero(kc, t);
  t.at(0, 0) = 3.0;
  Matrix c(4, 4, 10.0);
  scale_m11(kc, cwin(c.view(), 0, 0), t, 4, 4);
  CHECK(t.at(0, 0) == 7.0);
  CHECK(t.at(1, 1) == 10.0);

  PanelMat cp(4, 4, 4);
  cp.fill_zero();
  cp.at(2, 2) = 1.0;
  AccTile u;
  tile_zero(kc, u);
  u.at(2, 2) = 0.25;
  scale_m11_p(kc, psrc(cp.ref()), 0, 0, u, 4, 4);
  CHECK(u.at(2, 2) == 0.75);
}

TEST_CASE("masked stores honor shape and diagonal shift") {
  KernelConfig kc{4, 8, 4, 0.0};
  AccTile t;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 8; ++i) t.at(i, j) = 100 + 10 * i + j;

  auto fresh = [] { return Matrix(8, 4, -1.0); };

  Matrix full = fresh();
  store(kc, t, win(full.view(), 0, 0), 8, 4, StoreShape::Full);
  CHECK(full(0, 3) == t.at(0, 3));
  CHECK(full(7, 0) == t.at(7, 0));

  Matrix lower = fresh();
  store(kc, t, win(lower.view(), 0, 0), 8, 4, StoreShape::Lower, 0);
  CHECK(lower(2, 2) == t.at(2, 2));
  CHECK(lower(1, 3) == -1.0);

  Matrix shifted = fresh();
  store(kc, t, win(shifted.view(), 0, 0), 8, 4, StoreShape::Lower, 4);
  CHECK(shifted(3, 0) == -1.0);
  CHECK(shifted(4, 0) == t.at(4, 0));
  CHECK(shifted(7, 3) == t.at(7, 3));

  Matrix upper = fresh();
  store(kc, t, win(upper.view(), 0, 0), 8, 4, StoreShape::Upper, 2);
  CHECK(upper(2, 0) == t.at(2, 0));
  CHECK(upper(3, 0) == -1.0);

  Matrix lz = fresh();
  store(kc, t, win(lz.view(), 0, 0), 8, 4, StoreShape::LowerZero, 1);
  CHECK(lz(0, 0) == 0.0);
  CHECK(lz(1, 0) == t.at(1, 0));
  CHECK(lz(0, 3) == 0.0);
  CHECK(lz(7, 3) == t.at(7, 3));

  // Panel-destination stores agree with strided ones.
  PanelMat pd(8, 4, 4);
  pd.fill_zero();
  store_p(kc, t, pdst(pd.ref()), 0, 0, 8, 4, StoreShape::Lower, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 8; ++i) CHECK(pd.at(i, j) == (i - j >= 4 ? t.at(i, j) : 0.0));

  // Masked region outside (m_act, n_act) is never written.
  Matrix partial = fresh();
  store(kc, t, win(partial.view(), 0, 0), 3, 2, StoreShape::Full);
  CHECK(partial(2, 1) == t.at(2, 1));
  CHECK(partial(3, 1) == -1.0);
  CHECK(partial(0, 2) == -1.0);
}

TEST_CASE("edge_potrf factors a shifted diagonal block exactly") {
  Rng rng(204);
  KernelConfig kc{4, 8, 4, 0.0};
  for (int d : {0, 4}) {
    int ma = 8, na = 4;
    // Construct [L0; X] with dyadic diagonal, then the symmetric source.
    Matrix g(ma - d, na, 0.0);
    for (int j = 0; j < na; ++j) {
      g(j, j) = 1 << rng.uniform_int(0, 2);
      for (int i = j + 1; i < ma - d; ++i) g(i, j) = rng.uniform_int(-2, 2);
    }
    AccTile t;
    tile_zero(kc, t);
    for (int j = 0; j < na; ++j)
      for (int i = 0; i < ma - d; ++i) {
        double s = 0.0;
        for (int l = 0; l < na; ++l) s += g(i, l) * g(j, l);
        t.at(d + i, j) = s;
      }
    REQUIRE(edge_potrf(kc, t, d, ma, na) == 0);
    for (int j = 0; j < na; ++j)
      for (int i = j; i < ma - d; ++i) REQUIRE(t.at(d + i, j) == g(i, j));
  }
}

TEST_CASE("edge_potrf reports the first bad pivot") {
  KernelConfig kc{4, 4, 4, 0.0};
  AccTile t;
  tile_zero(kc, t);
  t.at(0, 0) = 0.0;
  CHECK(edge_potrf(kc, t, 0, 4, 4) == 1);

  tile_zero(kc, t);
  t.at(0, 0) = 1.0;
  t.at(1, 0) = 2.0;
  t.at(1, 1) = 4.0;  // 4 - 2*2 = 0, not positive
  CHECK(edge_potrf(kc, t, 0, 4, 2) == 2);
}

TEST_CASE("edge_trsm_right solves against all four effective orientations") {
  Rng rng(205);
  KernelConfig kc{4, 8, 4, 0.0};
  const int ma = 8, na = 4;
  for (Uplo uplo : {Uplo::Lower, Uplo::Upper}) {
    for (TransOp trans : {TransOp::NoTrans, TransOp::Trans}) {
      for (DiagKind diag : {DiagKind::NonUnit, DiagKind::Unit}) {
        Matrix e(na, na);
        fill_int(e.view(), rng, -2, 2);
        for (int i = 0; i < na; ++i) {
          int mag = 1 << rng.uniform_int(0, 2);
          e(i, i) = rng.uniform_int(0, 1) ? mag : -mag;
        }
        Matrix x0(ma, na);
        fill_int(x0.view(), rng, -3, 3);
        Matrix b = x0;
        ref::naive_trmm(Side::Right, uplo, trans, diag, ma, na, 1.0, e.view(), b.view());

        AccTile t;
        tile_zero(kc, t);
        for (int j = 0; j < na; ++j)
          for (int i = 0; i < ma; ++i) t.at(i, j) = b(i, j);
        REQUIRE(edge_trsm_right(kc, t, cwin(e.view(), 0, 0), uplo, trans, diag, ma, na) == 0);
        for (int j = 0; j < na; ++j)
          for (int i = 0; i < ma; ++i) REQUIRE(t.at(i, j) == x0(i, j));
      }
    }
  }
}

TEST_CASE("edge_trsm_right flags an exactly zero NonUnit diagonal") {
  KernelConfig kc{4, 4, 4, 0.0};
  Matrix e(4, 4, 0.0);
  e(0, 0) = 1; e(1, 1) = 2; e(2, 2) = 0; e(3, 3) = 1;
  AccTile t;
  tile_zero(kc, t);
  CHECK(edge_trsm_right(kc, t, cwin(e.view(), 0, 0), Uplo::Lower, TransOp::NoTrans,
                        DiagKind::NonUnit, 4, 4) == 3);
}

TEST_CASE("edge_trmm_right accumulates the triangular column block") {
  Rng rng(206);
  KernelConfig kc{4, 8, 4, 0.0};
  const int ma = 8, na = 4, kw = 10, c0 = 6;
  for (Uplo uplo : {Uplo::Lower, Uplo::Upper}) {
    for (TransOp trans : {TransOp::NoTrans, TransOp::Trans}) {
      for (DiagKind diag : {DiagKind::NonUnit, DiagKind::Unit}) {
        Matrix x(ma, kw);
        fill_int(x.view(), rng, -3, 3);
        Matrix e(na, na);
        fill_int(e.view(), rng, -2, 2);

        // Pack rows of X as the kernels see them.
        std::vector<double> band(static_cast<std::size_t>(kc.mr) * kw);
        pack_row_block(x.view(), TransOp::NoTrans, 0, ma, kc.ps, band.data());

        AccTile t;
        tile_zero(kc, t);
        edge_trmm_right(kc, t, band.data(), kw, c0, cwin(e.view(), 0, 0), uplo, trans,
                        diag, ma, na);

        bool eff_lower = (uplo == Uplo::Lower) == (trans == TransOp::NoTrans);
        for (int c = 0; c < na; ++c)
          for (int i = 0; i < ma; ++i) {
            double s = 0.0;
            for (int l = 0; l < na; ++l) {
              bool in = eff_lower ? l >= c : l <= c;
              if (!in) continue;
              double ev = l == c && diag == DiagKind::Unit
                              ? 1.0
                              : (trans == TransOp::NoTrans ? e(l, c) : e(c, l));
              s += x(i, c0 + l) * ev;
            }
            REQUIRE(t.at(i, c) == s);
          }
      }
    }
  }
}

TEST_CASE("kernels are exactly their sub-operation chains") {
  Rng rng(207);
  KernelConfig kc{4, 8, 4, 0.0};
  const int k = 7;
  Matrix ablk(8, k), bblk(4, k), c(8, 4), d(8, 4, 0.0);
  fill_uniform(ablk.view(), rng);
  fill_uniform(bblk.view(), rng);
  fill_uniform(c.view(), rng);
  PanelMat ap = pack_panel(ablk.view(), 4);
  PanelMat bp = pack_panel(bblk.view(), 4);

  kernel_gemm_nt_ppc(kc, k, pband(psrc(ap.ref()), 0), ap.cn(), pchunk(psrc(bp.ref()), 0),
                     1.25, -0.5, cwin(c.view(), 0, 0), win(d.view(), 0, 0), 8, 4);

  AccTile t;
  tile_zero(kc, t);
  inner_gemm_nt_pp(kc, k, pband(psrc(ap.ref()), 0), ap.cn(), pchunk(psrc(bp.ref()), 0), t);
  scale_ab(kc, 1.25, -0.5, cwin(c.view(), 0, 0), t, 8, 4);
  Matrix d2(8, 4, 0.0);
  store(kc, t, win(d2.view(), 0, 0), 8, 4);

  REQUIRE(std::memcmp(d.data(), d2.data(), sizeof(double) * 32) == 0);
}

TEST_CASE("the mutation hook perturbs every kernel result") {
  Rng rng(208);
  KernelConfig clean{4, 8, 4, 0.0};
  KernelConfig dirty{4, 8, 4, 1e-3};
  const int k = 5;
  Matrix ablk(8, k), bblk(4, k), c(8, 4);
  fill_uniform(ablk.view(), rng);
  fill_uniform(bblk.view(), rng);
  fill_uniform(c.view(), rng);
  PanelMat ap = pack_panel(ablk.view(), 4);
  PanelMat bp = pack_panel(bblk.view(), 4);

  Matrix d1(8, 4, 0.0), d2(8, 4, 0.0);
  kernel_gemm_nt_ppc(clean, k, pband(psrc(ap.ref()), 0), ap.cn(), pchunk(psrc(bp.ref()), 0),
                     1.0, 0.0, cwin(c.view(), 0, 0), win(d1.view(), 0, 0), 8, 4);
  kernel_gemm_nt_ppc(dirty, k, pband(psrc(ap.ref()), 0), ap.cn(), pchunk(psrc(bp.ref()), 0),
                     1.0, 0.0, cwin(c.view(), 0, 0), win(d2.view(), 0, 0), 8, 4);
  CHECK(d2(0, 0) == d1(0, 0) + 1e-3);
  CHECK(d2(1, 0) == d1(1, 0));
  CHECK(d2(0, 1) == d1(0, 1));
}

TEST_CASE("kernel_gemm_ccc handles edge masks like the reference") {
  Rng rng(209);
  KernelConfig kc{4, 8, 4, 0.0};
  // Deliberately awkward sizes: 5 x 3 with k 6.
  Matrix a(5, 6), b(6, 3), c(5, 3), d(5, 3, 0.0);
  fill_uniform(a.view(), rng);
  fill_uniform(b.view(), rng);
  fill_uniform(c.view(), rng);

  Matrix want = c;
  ref::naive_gemm(TransOp::NoTrans, TransOp::NoTrans, 5, 3, 6, 2.0, a.view(), b.view(),
                  -1.0, want.view());

  std::int64_t fl = kernel_gemm_ccc(kc, InnerKind::NN, 6, a.data(), a.ld(), b.data(),
                                    b.ld(), 2.0, -1.0, cwin(c.view(), 0, 0),
                                    win(d.view(), 0, 0), 5, 3);
  CHECK(fl == 2LL * 5 * 3 * 6);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 5; ++i) REQUIRE(rel_diff(d(i, j), want(i, j)) <= 1e-15);
}
