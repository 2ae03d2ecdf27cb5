// Instrumented benchmark and verification driver for the panel engine.
//
//   sweep    timed size sweeps over one routine, CSV out
//   riccati  backward Riccati recursion benchmark with residual checks
//   verify   differential check of the engine against the naive oracle
//   info     effective engine configuration
//
// Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "panelblas/panelblas.hpp"

namespace {

using namespace panelblas;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

int fail_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kExitUsage;
}

const char* default_flags(BenchRoutine r) {
  switch (r) {
    case BenchRoutine::Gemm: return "nn";
    case BenchRoutine::Syrk: return "ln";
    case BenchRoutine::Trmm:
    case BenchRoutine::Trsm: return "rlnn";
    case BenchRoutine::Potrf: return "l";
    case BenchRoutine::Getrf: return "";
  }
  return "";
}

struct SweepArgs {
  std::string routine = "dgemm";
  std::string flags;  // empty -> routine default
  std::string shape = "square";
  int size_min = 4;
  int size_max = 64;
  int size_step = 4;
  int reps = 5;
  std::string variant;
  std::uint64_t seed = 42;
  std::string output = "-";
  bool cold = false;
  std::vector<int> triples;
};

int cmd_sweep(const SweepArgs& args, const EngineConfig& cfg) {
  SweepSpec spec;
  auto routine = parse_routine(args.routine);
  if (!routine) return fail_usage("unknown routine '" + args.routine + "'");
  spec.routine = *routine;
  spec.flags = args.flags.empty() ? default_flags(*routine) : args.flags;

  if (args.shape == "square") spec.shape = ShapeRule::Square;
  else if (args.shape == "m4" || args.shape == "m=4") spec.shape = ShapeRule::MFixed4;
  else if (args.shape == "n4" || args.shape == "n=4") spec.shape = ShapeRule::NFixed4;
  else if (args.shape == "custom") spec.shape = ShapeRule::Custom;
  else return fail_usage("unknown shape rule '" + args.shape + "'");

  if (spec.shape == ShapeRule::Custom) {
    if (args.triples.empty() || args.triples.size() % 3 != 0)
      return fail_usage("custom shape needs --triple m,n,k (repeatable)");
    for (std::size_t i = 0; i < args.triples.size(); i += 3)
      spec.custom.push_back(
          {args.triples[i], args.triples[i + 1], args.triples[i + 2]});
  } else if (!args.triples.empty()) {
    return fail_usage("--triple requires --shape custom");
  }

  spec.size_min = args.size_min;
  spec.size_max = args.size_max;
  spec.size_step = args.size_step;
  spec.reps = args.reps;
  spec.seed = args.seed;
  spec.warm_cache = !args.cold;
  if (!args.variant.empty()) {
    auto v = parse_variant(args.variant);
    if (!v) return fail_usage("unknown variant '" + args.variant + "'");
    spec.force_variant = v;
  }

  SweepOutcome out = run_sweep(spec, cfg);
  if (!out.ok()) {
    if (out.status.info == -1) return fail_usage(out.status.message);
    std::cerr << "error: sweep failed: " << out.status.message << "\n";
    return kExitFail;
  }

  if (args.output == "-") {
    write_csv(std::cout, out.records, spec.seed, cfg.kernel.ps);
  } else {
    std::ofstream file(args.output);
    if (!file) {
      std::cerr << "error: cannot open '" << args.output << "' for writing\n";
      return kExitFail;
    }
    write_csv(file, out.records, spec.seed, cfg.kernel.ps);
  }
  return kExitOk;
}

struct RiccatiArgs {
  int nx = -1;
  int nu = -1;
  int horizon = -1;
  std::string impl = "all";
  int reps = 3;
  std::uint64_t seed = kRiccatiSeed;
};

int cmd_riccati(const RiccatiArgs& args, const EngineConfig& cfg) {
  std::vector<OcpDims> table;
  if (args.nx < 0 && args.nu < 0 && args.horizon < 0) {
    table = {{8, 4, 10}, {24, 12, 10}, {40, 20, 10}, {64, 32, 10}};
  } else {
    if (args.nx < 1) return fail_usage("--nx is required (and must be >= 1)");
    OcpDims d;
    d.nx = args.nx;
    d.nu = args.nu < 0 ? args.nx / 2 : args.nu;
    d.N = args.horizon < 0 ? 10 : args.horizon;
    if (!ocp_dims_valid(d))
      return fail_usage("dims must satisfy nx >= 1, nu >= 0, N >= 1");
    table.push_back(d);
  }
  if (args.reps < 1) return fail_usage("--reps must be at least 1");

  std::vector<RiccatiImpl> impls;
  if (args.impl == "all")
    impls = {RiccatiImpl::BlasPath, RiccatiImpl::FusedNative,
             RiccatiImpl::Oracle};
  else if (args.impl == "blas") impls = {RiccatiImpl::BlasPath};
  else if (args.impl == "fused") impls = {RiccatiImpl::FusedNative};
  else if (args.impl == "oracle") impls = {RiccatiImpl::Oracle};
  else return fail_usage("unknown impl '" + args.impl + "'");

  std::printf("%4s %4s %4s  %-7s %12s %12s %14s\n", "nx", "nu", "N", "impl",
              "median_s", "residual", "packed");
  for (const OcpDims& dims : table) {
    for (RiccatiImpl impl : impls) {
      std::vector<double> laps;
      RiccatiRunResult first;
      for (int rep = 0; rep < args.reps; ++rep) {
        RiccatiRunResult r = riccati_run(dims, impl, args.seed, cfg);
        if (!r.ok()) {
          std::cerr << "error: riccati " << riccati_impl_name(impl) << " nx="
                    << dims.nx << " nu=" << dims.nu << " N=" << dims.N
                    << " failed: " << r.status.message << "\n";
          return kExitFail;
        }
        if (rep == 0) first = r;
        laps.push_back(r.seconds);
      }
      double med = detail::median_of(laps);
      std::printf("%4d %4d %4d  %-7s %12.3e %12.3e %14lld\n", dims.nx, dims.nu,
                  dims.N, riccati_impl_name(impl), med, first.residual,
                  static_cast<long long>(first.stats.elements_packed));
    }
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string filter = "all";
  std::uint64_t seed = 42;
  int count = 25;
};

int cmd_verify(const VerifyArgs& args, const EngineConfig& cfg) {
  if (args.count < 0) return fail_usage("--count must be >= 0");
  VerifyReport report = verify_suite(args.filter, args.seed, args.count, cfg);
  for (const VerifyCase& c : report.failed)
    std::printf("FAIL %s %s m=%d n=%d k=%d deviation=%.3e tolerance=%.0e\n",
                c.routine.c_str(), c.flags.c_str(), c.m, c.n, c.k, c.deviation,
                c.tolerance);
  std::printf("verify: filter=%s seed=%llu count=%d cases=%d failures=%d %s\n",
              args.filter.c_str(),
              static_cast<unsigned long long>(args.seed), args.count,
              report.cases_run, report.failures,
              report.pass() ? "PASS" : "FAIL");
  return report.pass() ? kExitOk : kExitFail;
}

int cmd_info(const EngineConfig& cfg) {
  std::printf("panel engine configuration\n");
  std::printf("  panel height ps        %d\n", cfg.kernel.ps);
  std::printf("  kernel tile mr x nr    %d x %d\n", cfg.kernel.mr,
              cfg.kernel.nr);
  std::printf("  switch_dim             %d\n", cfg.switch_dim);
  std::printf("  tiny_m / tiny_n        %d / %d\n", cfg.tiny_m_eff(),
              cfg.tiny_n_eff());
  std::printf("  bounded_scratch_cap    %lld bytes (arena %zu)\n",
              static_cast<long long>(cfg.bounded_scratch_cap),
              kBoundedArenaBytes);
  std::printf("  mutation_epsilon       %g\n", cfg.kernel.mutation_epsilon);
  std::printf("  force_variant          %s\n",
              cfg.force_variant ? variant_name(*cfg.force_variant) : "auto");
  std::printf(
      "environment overrides: PANELBLAS_PS PANELBLAS_MR PANELBLAS_NR "
      "PANELBLAS_SWITCH_DIM PANELBLAS_TINY_M PANELBLAS_TINY_N "
      "PANELBLAS_SCRATCH_CAP PANELBLAS_MUTATE\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panel-major dense linear algebra benchmark driver"};
  app.require_subcommand(1);
  double mutate = 0.0;
  app.add_option("--mutate", mutate,
                 "inject a kernel perturbation of this size (negative control "
                 "for verify)");

  SweepArgs sa;
  CLI::App* sweep = app.add_subcommand("sweep", "timed size sweep, CSV out");
  sweep->add_option("-r,--routine", sa.routine,
                    "dgemm|dsyrk|dtrmm|dtrsm|dpotrf|dgetrf");
  sweep->add_option("-f,--flags", sa.flags,
                    "routine flag characters (e.g. nt, llnn)");
  sweep->add_option("--shape", sa.shape, "square|m4|n4|custom");
  sweep->add_option("--min", sa.size_min, "smallest size");
  sweep->add_option("--max", sa.size_max, "largest size");
  sweep->add_option("--step", sa.size_step, "size increment");
  sweep->add_option("--reps", sa.reps, "timed repetitions per record");
  sweep->add_option("--variant", sa.variant, "force gemm variant A|B|C|Ct|D");
  sweep->add_option("--seed", sa.seed, "data generator seed");
  sweep->add_option("-o,--output", sa.output, "CSV path, - for stdout");
  sweep->add_flag("--cold", sa.cold, "skip the cache-warming call");
  sweep->add_option("--triple", sa.triples,
                    "custom m,n,k triple (repeatable)")
      ->delimiter(',');

  RiccatiArgs ra;
  CLI::App* ric =
      app.add_subcommand("riccati", "backward Riccati recursion benchmark");
  ric->add_option("--nx", ra.nx, "state count (default: built-in dims table)");
  ric->add_option("--nu", ra.nu, "control count (default nx/2)");
  ric->add_option("--horizon", ra.horizon, "stage count N (default 10)");
  ric->add_option("--impl", ra.impl, "blas|fused|oracle|all");
  ric->add_option("--reps", ra.reps, "repetitions, median reported");
  ric->add_option("--seed", ra.seed, "problem data seed");

  VerifyArgs va;
  CLI::App* ver =
      app.add_subcommand("verify", "differential check against the oracle");
  ver->add_option("--filter", va.filter, "routine substring filter, or all");
  ver->add_option("--seed", va.seed, "case generator seed");
  ver->add_option("--count", va.count, "cases per routine family");

  CLI::App* info = app.add_subcommand("info", "print engine configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  EngineConfig cfg = config_from_env();
  if (mutate != 0.0) cfg.kernel.mutation_epsilon = mutate;

  if (sweep->parsed()) return cmd_sweep(sa, cfg);
  if (ric->parsed()) return cmd_riccati(ra, cfg);
  if (ver->parsed()) return cmd_verify(va, cfg);
  if (info->parsed()) return cmd_info(cfg);
  return kExitUsage;
}
