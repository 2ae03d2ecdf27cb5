#pragma once

// Factorized backward Riccati recursion for the LQR stage problem
//
//   x+ = A x + B u,   stage cost with blocks Q (nx x nx), R (nu x nu),
//   S (nu x nx),      A nx x nx, B nx x nu.
//
// One backward step takes the lower Cholesky factor calL' of P' and
// factorizes the bordered stage matrix
//
//   [[R, S], [S^T, Q]] + (G calL') (G calL')^T,   G = [B^T; A^T]
//
// into [[Lambda, 0], [L, calL]]. The trailing block reproduces the classic
// recursion
//
//   P = calL calL^T
//     = Q + A^T P' A - (S^T + A^T P' B)(R + B^T P' B)^{-1}(S + B^T P' A)
//
// without ever forming an inverse. Two engine-backed paths build the factor:
// a column-major pipeline through dtrmm/dsyrk/dpotrf, and a packed pipeline
// that packs the stage-constant blocks once and then runs only panel-native
// kernels (trmm_rlnn_nd + syrk_potrf_nd), so steady-state steps move zero
// elements between layouts. A dense textbook recursion over the formula
// above, composed from the naive reference routines, serves as the oracle
// for step-level comparison and whole-horizon residuals.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "panelblas/blas.hpp"
#include "panelblas/factor.hpp"
#include "panelblas/gemm.hpp"
#include "panelblas/level3.hpp"
#include "panelblas/mat_view.hpp"
#include "panelblas/matgen.hpp"
#include "panelblas/panel_mat.hpp"
#include "panelblas/reference.hpp"

namespace panelblas {

// Problem sizes for one linear-quadratic control instance.
struct OcpDims {
  int nx = 0;  // states
  int nu = 0;  // controls
  int N = 0;   // horizon length
};

inline bool ocp_dims_valid(const OcpDims& d) {
  return d.nx >= 1 && d.nu >= 0 && d.N >= 1;
}

// Stage-constant problem data. q and r are held fully symmetric.
struct OcpData {
  int nx = 0;
  int nu = 0;
  Matrix a;  // nx x nx
  Matrix b;  // nx x nu
  Matrix q;  // nx x nx, symmetric positive definite
  Matrix r;  // nu x nu, symmetric positive definite
  Matrix s;  // nu x nx
};

// Random stage data whose bordered matrix [[R,S],[S^T,Q]] is provably
// positive definite: Q = M^T M + nx*I and R = K^T K + nu*I push the
// diagonal blocks' smallest eigenvalues to at least nx and nu, while the
// coupling S stays small enough (entries in [-0.1, 0.1]) that the Schur
// complement Q - S^T R^{-1} S keeps a margin of at least 0.99*nx. A and B
// are scaled by 1/sqrt(nx+nu) so the closed recursion neither blows up nor
// collapses over a desk-scale horizon.
inline OcpData make_ocp_data(int nx, int nu, std::uint64_t seed) {
  OcpData d;
  d.nx = nx;
  d.nu = nu;
  d.a = Matrix(nx, nx);
  d.b = Matrix(nx, nu);
  d.q = Matrix(nx, nx);
  d.r = Matrix(nu, nu);
  d.s = Matrix(nu, nx);
  Rng rng(seed);
  double gain = 1.0 / std::sqrt(static_cast<double>(nx + nu));
  fill_uniform(d.a.view(), rng, -gain, gain);
  fill_uniform(d.b.view(), rng, -gain, gain);
  fill_uniform(d.s.view(), rng, -0.1, 0.1);
  Matrix mq(nx, nx);
  fill_uniform(mq.view(), rng);
  ref::naive_syrk(Uplo::Lower, TransOp::Trans, nx, nx, 1.0, mq.view(), 0.0, d.q.view());
  for (int j = 0; j < nx; ++j) {
    d.q(j, j) += nx;
    for (int i = j + 1; i < nx; ++i) d.q(j, i) = d.q(i, j);
  }
  Matrix kr(nu, nu);
  fill_uniform(kr.view(), rng);
  ref::naive_syrk(Uplo::Lower, TransOp::Trans, nu, nu, 1.0, kr.view(), 0.0, d.r.view());
  for (int j = 0; j < nu; ++j) {
    d.r(j, j) += nu;
    for (int i = j + 1; i < nu; ++i) d.r(j, i) = d.r(i, j);
  }
  return d;
}

// Outcome of one backward step.
struct RiccatiStepResult {
  Status status;
  PackStats stats;
  std::int64_t flops = 0;
  bool ok() const { return status.ok(); }
};

// Lower-triangle copy with explicit zeros above: gives value semantics to a
// factor block view whose upper half is unspecified.
inline Matrix copy_lower(ConstMatView src) {
  Matrix out(src.m, src.n);
  for (int j = 0; j < src.n && j < src.m; ++j)
    for (int i = j; i < src.m; ++i) out(i, j) = src(i, j);
  return out;
}

// Frobenius-relative deviation of the reconstruction L L^T from p. Only the
// lower triangle of lfac is read, so unspecified upper halves are harmless.
inline double chol_residual(ConstMatView lfac, ConstMatView p) {
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < p.n; ++j)
    for (int i = 0; i < p.m; ++i) {
      double s = 0.0;
      int lmax = i < j ? i : j;
      for (int l = 0; l <= lmax; ++l) s += lfac(i, l) * lfac(j, l);
      double want = p(i, j);
      double diff = s - want;
      num += diff * diff;
      den += want * want;
    }
  num = std::sqrt(num);
  den = std::sqrt(den);
  return den > 0.0 ? num / den : num;
}

// One dense textbook step composed from the naive reference routines:
// p <- Q + A^T P' A - K^T W^{-1} K with W = R + B^T P' B, K = S + B^T P' A,
// the inverse applied through W's Cholesky factor. p is written fully
// symmetric. A pivot failure reports the 1-based index within W, which
// matches the bordered-matrix index of the factorized paths.
inline Status riccati_oracle_step(const OcpData& d, ConstMatView pnext, MatView p) {
  int nx = d.nx;
  int nu = d.nu;
  Matrix pa(nx, nx);  // P'A
  ref::naive_gemm(TransOp::NoTrans, TransOp::NoTrans, nx, nx, nx, 1.0, pnext,
                  d.a.view(), 0.0, pa.view());
  Matrix pb(nx, nu);  // P'B
  ref::naive_gemm(TransOp::NoTrans, TransOp::NoTrans, nx, nu, nx, 1.0, pnext,
                  d.b.view(), 0.0, pb.view());
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) p(i, j) = d.q(i, j);
  ref::naive_gemm(TransOp::Trans, TransOp::NoTrans, nx, nx, nx, 1.0, d.a.view(),
                  pa.view(), 1.0, p);
  Matrix w(nu, nu);  // R + B^T P' B
  for (int j = 0; j < nu; ++j)
    for (int i = 0; i < nu; ++i) w(i, j) = d.r(i, j);
  ref::naive_gemm(TransOp::Trans, TransOp::NoTrans, nu, nu, nx, 1.0, d.b.view(),
                  pb.view(), 1.0, w.view());
  Matrix k(nu, nx);  // S + B^T P' A
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nu; ++i) k(i, j) = d.s(i, j);
  ref::naive_gemm(TransOp::Trans, TransOp::NoTrans, nu, nx, nx, 1.0, d.b.view(),
                  pa.view(), 1.0, k.view());
  Status st = ref::naive_potrf(Uplo::Lower, nu, w.view());
  if (!st.ok()) return st;
  st = ref::naive_trsm(Side::Left, Uplo::Lower, TransOp::NoTrans,
                       DiagKind::NonUnit, nu, nx, 1.0, w.view(), k.view());
  if (!st.ok()) return st;
  ref::naive_syrk(Uplo::Lower, TransOp::Trans, nx, nu, -1.0, k.view(), 1.0, p);
  // Mirroring the updated lower half keeps the trajectory exactly symmetric.
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < j; ++i) p(i, j) = p(j, i);
  return Status::success();
}

// Column-major step workspace: C <- G*calL' by dtrmm(Right, Lower, NoTrans,
// NonUnit), the bordered matrix plus C*C^T by dsyrk(Lower, NoTrans), factor
// by dpotrf(Lower). The factor stays in the workspace; lambda()/l()/call()
// are views into its lower triangle and stay valid until the next step.
class RiccatiBlasWork {
 public:
  RiccatiBlasWork(const OcpData& d, const BlasConfig& cfg)
      : data_(&d),
        cfg_(&cfg),
        nx_(d.nx),
        nu_(d.nu),
        nt_(d.nx + d.nu),
        f_(nt_, nt_),
        c_(nt_, d.nx),
        g_(nt_, d.nx) {
    // G = [B^T; A^T] never changes across steps.
    transpose_copy(d.b.view(), g_.sub(0, 0, nu_, nx_));
    transpose_copy(d.a.view(), g_.sub(nu_, 0, nx_, nx_));
  }

  // One backward step from the lower factor of P'. Only the lower triangle
  // of call_next is read; it may alias this workspace's own call() view
  // because it is consumed before the factor storage is rebuilt.
  RiccatiStepResult step(ConstMatView call_next) {
    RiccatiStepResult res;
    const OcpData& d = *data_;
    if (call_next.m != nx_ || call_next.n != nx_) {
      res.status = Status::failure(-1, "previous factor must be nx x nx");
      return res;
    }
    for (int j = 0; j < nx_; ++j)
      for (int i = 0; i < nt_; ++i) c_(i, j) = g_(i, j);
    BlasResult t = dtrmm(*cfg_, 'r', 'l', 'n', 'n', nt_, nx_, 1.0,
                         call_next.data, call_next.ld, c_.data(), c_.ld());
    if (!absorb(res, t, "triangular multiply rejected")) return res;
    // Lower triangle of the bordered stage matrix, rebuilt every step.
    for (int j = 0; j < nu_; ++j)
      for (int i = j; i < nu_; ++i) f_(i, j) = d.r(i, j);
    for (int j = 0; j < nu_; ++j)
      for (int i = 0; i < nx_; ++i) f_(nu_ + i, j) = d.s(j, i);
    for (int j = 0; j < nx_; ++j)
      for (int i = j; i < nx_; ++i) f_(nu_ + i, nu_ + j) = d.q(i, j);
    BlasResult y = dsyrk(*cfg_, 'l', 'n', nt_, nx_, 1.0, c_.data(), c_.ld(),
                         1.0, f_.data(), f_.ld());
    if (!absorb(res, y, "rank-k update rejected")) return res;
    BlasResult f = dpotrf(*cfg_, 'l', nt_, f_.data(), f_.ld());
    if (!absorb(res, f, "bordered stage matrix is not positive definite"))
      return res;
    return res;
  }

  ConstMatView lambda() const { return f_.sub(0, 0, nu_, nu_); }
  ConstMatView l() const { return f_.sub(nu_, 0, nx_, nu_); }
  ConstMatView call() const { return f_.sub(nu_, nu_, nx_, nx_); }

 private:
  bool absorb(RiccatiStepResult& res, const BlasResult& b, const char* what) {
    res.flops += b.flops;
    res.stats.add(b.stats);
    if (b.info == 0) return true;
    res.status = Status::failure(b.info, b.error ? b.error->message : what);
    return false;
  }

  const OcpData* data_;
  const BlasConfig* cfg_;
  int nx_, nu_, nt_;
  Matrix f_;  // bordered matrix, then its factor
  Matrix c_;  // G, then G*calL'
  Matrix g_;  // [B^T; A^T]
};

// Packed step workspace. The bordered stage matrix, G, and Q are packed
// once at construction (counted in setup_stats()); every step after that
// runs only panel-native kernels, so per-step elements_packed is zero.
class RiccatiFusedWork {
 public:
  RiccatiFusedWork(const OcpData& d, const EngineConfig& cfg)
      : data_(&d),
        cfg_(&cfg),
        nx_(d.nx),
        nu_(d.nu),
        nt_(d.nx + d.nu),
        m0_(nt_, nt_, cfg.kernel.ps),
        q_(d.nx, d.nx, cfg.kernel.ps),
        g_(nt_, d.nx, cfg.kernel.ps),
        c_(nt_, d.nx, cfg.kernel.ps),
        f_(nt_, nt_, cfg.kernel.ps),
        call_(d.nx, d.nx, cfg.kernel.ps) {
    m0_.fill_zero();
    q_.fill_zero();
    g_.fill_zero();
    c_.fill_zero();
    f_.fill_zero();
    call_.fill_zero();
    // The fused factor reads whole tiles inside the band, so the bordered
    // matrix is packed fully symmetric rather than triangle-only.
    Matrix m0(nt_, nt_);
    for (int j = 0; j < nu_; ++j)
      for (int i = 0; i < nu_; ++i) m0(i, j) = d.r(i, j);
    for (int j = 0; j < nx_; ++j)
      for (int i = 0; i < nu_; ++i) {
        m0(i, nu_ + j) = d.s(i, j);
        m0(nu_ + j, i) = d.s(i, j);
      }
    for (int j = 0; j < nx_; ++j)
      for (int i = 0; i < nx_; ++i) m0(nu_ + i, nu_ + j) = d.q(i, j);
    pack_from_colmajor(m0.view(), m0_.ref(), TransOp::NoTrans, &setup_stats_);
    pack_from_colmajor(d.q.view(), q_.ref(), TransOp::NoTrans, &setup_stats_);
    Matrix g(nt_, d.nx);
    transpose_copy(d.b.view(), g.sub(0, 0, nu_, nx_));
    transpose_copy(d.a.view(), g.sub(nu_, 0, nx_, nx_));
    pack_from_colmajor(g.view(), g_.ref(), TransOp::NoTrans, &setup_stats_);
  }

  // calL_N <- chol(Q): the fused kernel with an empty update is the packed
  // Cholesky, so even the terminal factor never leaves panel storage.
  Status init_terminal() {
    ConstPanelRef none = ConstPanelRef::over(q_.data(), nx_, 0, cfg_->kernel.ps);
    NdResult r = syrk_potrf_nd(*cfg_, nx_, 0, none, none, q_.ref(), call_.ref());
    return r.status;
  }

  // Load an arbitrary previous-stage factor; only src's lower triangle is
  // read and zeros are written above so the packed triangle reads back clean.
  void set_call(ConstMatView src) {
    for (int j = 0; j < nx_; ++j) {
      for (int i = 0; i < j; ++i) call_.at(i, j) = 0.0;
      for (int i = j; i < nx_; ++i) call_.at(i, j) = src(i, j);
    }
  }

  // One backward step from the workspace's own current factor.
  RiccatiStepResult step() { return step(call_.ref()); }

  RiccatiStepResult step(ConstPanelRef call_next) {
    RiccatiStepResult res;
    NdResult t = trmm_rlnn_nd(*cfg_, nt_, nx_, 1.0, call_next, g_.ref(), c_.ref());
    res.flops += t.flops;
    if (!t.status.ok()) {
      res.status = t.status;
      return res;
    }
    NdResult f = syrk_potrf_nd(*cfg_, nt_, nx_, c_.ref(), c_.ref(), m0_.ref(), f_.ref());
    res.flops += f.flops;
    if (!f.status.ok()) {
      res.status = f.status;
      return res;
    }
    // The trailing block becomes the next calL; its strictly-upper half
    // stays zero from construction.
    for (int j = 0; j < nx_; ++j)
      for (int i = j; i < nx_; ++i) call_.at(i, j) = f_.at(nu_ + i, nu_ + j);
    return res;
  }

  ConstPanelRef call_panel() const { return call_.ref(); }
  const PackStats& setup_stats() const { return setup_stats_; }

  Matrix lambda_cm() const {
    Matrix out(nu_, nu_);
    for (int j = 0; j < nu_; ++j)
      for (int i = j; i < nu_; ++i) out(i, j) = f_.at(i, j);
    return out;
  }
  // The L block sits strictly below the bordered diagonal, so the fused
  // factor holds every one of its entries.
  Matrix l_cm() const {
    Matrix out(nx_, nu_);
    for (int j = 0; j < nu_; ++j)
      for (int i = 0; i < nx_; ++i) out(i, j) = f_.at(nu_ + i, j);
    return out;
  }
  Matrix call_cm() const {
    Matrix out(nx_, nx_);
    for (int j = 0; j < nx_; ++j)
      for (int i = j; i < nx_; ++i) out(i, j) = call_.at(i, j);
    return out;
  }

 private:
  const OcpData* data_;
  const EngineConfig* cfg_;
  int nx_, nu_, nt_;
  PanelMat m0_;    // bordered stage matrix, packed fully symmetric
  PanelMat q_;     // Q alone, for the terminal factor
  PanelMat g_;     // [B^T; A^T]
  PanelMat c_;     // G*calL'
  PanelMat f_;     // bordered factor
  PanelMat call_;  // current calL, strictly-upper kept zero
  PackStats setup_stats_;
};

enum class RiccatiImpl { BlasPath, FusedNative, Oracle };

inline const char* riccati_impl_name(RiccatiImpl impl) {
  switch (impl) {
    case RiccatiImpl::BlasPath: return "blas";
    case RiccatiImpl::FusedNative: return "fused";
    case RiccatiImpl::Oracle: return "oracle";
  }
  return "?";
}

struct RiccatiRunResult {
  Status status;
  double seconds = 0.0;   // wall time of the N backward steps, monotonic clock
  double residual = 0.0;  // max over stages of the factor's relative deviation
  std::int64_t flops = 0;
  PackStats stats;
  bool ok() const { return status.ok(); }
};

inline constexpr std::uint64_t kRiccatiSeed = 0x9e3779b97f4a7c15ull;

// Runs N backward steps from the terminal factor chol(Q) on data drawn from
// the seed, timing only the step calls with a monotonic clock. The residual
// compares every produced factor against an independently computed dense
// trajectory: max over stages of |calL calL^T - P|_F / |P|_F. For the
// engine paths stats covers setup packing plus all steps.
inline RiccatiRunResult riccati_run(const OcpDims& dims, RiccatiImpl impl,
                                    std::uint64_t seed = kRiccatiSeed,
                                    const EngineConfig& cfg = default_config()) {
  using clock = std::chrono::steady_clock;
  RiccatiRunResult res;
  if (!ocp_dims_valid(dims)) {
    res.status = Status::failure(-1, "dims must satisfy nx >= 1, nu >= 0, N >= 1");
    return res;
  }
  int nx = dims.nx;
  int horizon = dims.N;
  OcpData data = make_ocp_data(dims.nx, dims.nu, seed);

  // Dense reference trajectory P_N .. P_0.
  std::vector<Matrix> pref(static_cast<std::size_t>(horizon) + 1);
  pref[horizon] = data.q;
  for (int n = horizon - 1; n >= 0; --n) {
    pref[n] = Matrix(nx, nx);
    Status st = riccati_oracle_step(data, pref[n + 1].view(), pref[n].view());
    if (!st.ok()) {
      res.status = Status::failure(st.info, "oracle stage " + std::to_string(n) +
                                                ": " + st.message);
      return res;
    }
  }

  auto stage_fail = [&res](int n, const Status& st) {
    res.status = Status::failure(st.info,
                                 "stage " + std::to_string(n) + ": " + st.message);
  };

  std::vector<Matrix> fac(static_cast<std::size_t>(horizon));
  double elapsed = 0.0;
  switch (impl) {
    case RiccatiImpl::BlasPath: {
      BlasConfig bcfg;
      bcfg.engine = cfg;
      Matrix calln = data.q;
      BlasResult p0 = dpotrf(bcfg, 'l', nx, calln.data(), calln.ld());
      res.stats.add(p0.stats);
      if (p0.info != 0) {
        stage_fail(horizon, Status::failure(p0.info, "terminal factor failed"));
        return res;
      }
      RiccatiBlasWork work(data, bcfg);
      ConstMatView prev = calln.view();
      for (int n = horizon - 1; n >= 0; --n) {
        auto t0 = clock::now();
        RiccatiStepResult st = work.step(prev);
        elapsed += std::chrono::duration<double>(clock::now() - t0).count();
        res.flops += st.flops;
        res.stats.add(st.stats);
        if (!st.ok()) {
          stage_fail(n, st.status);
          return res;
        }
        fac[n] = copy_lower(work.call());
        prev = fac[n].view();
      }
      break;
    }
    case RiccatiImpl::FusedNative: {
      RiccatiFusedWork work(data, cfg);
      res.stats.add(work.setup_stats());
      Status st0 = work.init_terminal();
      if (!st0.ok()) {
        stage_fail(horizon, st0);
        return res;
      }
      for (int n = horizon - 1; n >= 0; --n) {
        auto t0 = clock::now();
        RiccatiStepResult st = work.step();
        elapsed += std::chrono::duration<double>(clock::now() - t0).count();
        res.flops += st.flops;
        res.stats.add(st.stats);
        if (!st.ok()) {
          stage_fail(n, st.status);
          return res;
        }
        fac[n] = work.call_cm();
      }
      break;
    }
    case RiccatiImpl::Oracle: {
      Matrix pcur = data.q;
      for (int n = horizon - 1; n >= 0; --n) {
        auto t0 = clock::now();
        Matrix pn(nx, nx);
        Status st = riccati_oracle_step(data, pcur.view(), pn.view());
        if (st.ok()) {
          fac[n] = pn;
          st = ref::naive_potrf(Uplo::Lower, nx, fac[n].view());
        }
        elapsed += std::chrono::duration<double>(clock::now() - t0).count();
        if (!st.ok()) {
          stage_fail(n, st);
          return res;
        }
        pcur = std::move(pn);
      }
      break;
    }
  }

  res.seconds = elapsed;
  for (int n = 0; n < horizon; ++n) {
    double dev = chol_residual(fac[n].view(), pref[n].view());
    if (dev > res.residual) res.residual = dev;
  }
  return res;
}

}  // namespace panelblas
