#include "cascade/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cascade/csv.h"
#include "cascade/filter.h"
#include "cascade/manifest.h"
#include "cascade/model.h"
#include "cascade/montecarlo.h"
#include "cascade/optimize.h"
#include "cascade/quadrature.h"
#include "cascade/rng.h"
#include "cascade/simulate.h"
#include "cascade/statistics.h"

#ifndef CASCADE_VERSION
#define CASCADE_VERSION "unknown"
#endif

namespace cascade {

namespace {

constexpr std::uint64_t kDefaultSeed = 20160601;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnvVar);
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(env, &used, 0);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw UsageError(std::string("invalid ") + kSeedEnvVar + " value '" + env + "'");
  }
}

// Shared state of one invocation.
struct Run {
  std::vector<std::string> canonical_args;
  std::string command;
  CLI::App* sub = nullptr;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::chrono::steady_clock::time_point start;
};

// Writes through `writer` to `path`, or to stdout when the path is empty.
void emit(Run& run, const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty() || path == "-") {
    writer(*run.out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file '" + path + "'");
  writer(file);
  file.close();
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
  run.outputs.push_back(path);
}

void write_manifests(const Run& run) {
  if (run.outputs.empty()) return;
  RunManifest manifest;
  manifest.command = run.command;
  manifest.argv = run.canonical_args;
  for (const CLI::Option* opt : run.sub->get_options()) {
    if (opt == run.sub->get_help_ptr()) continue;
    const std::string name = opt->get_name(false, true);
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    manifest.parameters.emplace_back(name, value);
  }
  manifest.seeds = run.seeds;
  manifest.version = CASCADE_VERSION;
  manifest.outputs = run.outputs;
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
  for (const std::string& path : run.outputs) write_manifest(manifest_path_for(path), manifest);
}

CascadeModel build_model(std::size_t n, double snr, const std::string& mode, double ratio) {
  if (!(snr > 0.0) || !std::isfinite(snr)) throw UsageError("--snr must be positive");
  if (mode == "symmetric") return CascadeModel::symmetric(n, snr);
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw UsageError("--ratio must be positive");
  std::vector<double> ratios(n + 1, 1.0);
  ratios[0] = ratio;
  return asymmetric_model(n, snr, ratios, parse_asymmetry_mode(mode));
}

std::string describe(const McResult& r) {
  std::ostringstream msg;
  msg << "eps=" << r.rates.eps_avg << " +- " << r.rates.std_error << " (" << r.elapsed_seconds << " s)";
  return msg.str();
}

// Replaces the value following `name` or appends the pair.
void override_option(std::vector<std::string>& args, const std::string& name, const std::string& value) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == name && i + 1 < args.size()) {
      args[i + 1] = value;
      return;
    }
    if (args[i].rfind(name + "=", 0) == 0) {
      args[i] = name + "=" + value;
      return;
    }
  }
  args.push_back(name);
  args.push_back(value);
}

bool has_option(const std::vector<std::string>& args, const std::string& name) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == name || a.rfind(name + "=", 0) == 0;
  });
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_checked(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const QuadratureError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const TrialError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-shot readout error rates for cascaded qubit relaxation", "cascade-readout"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", CASCADE_VERSION);

  Run run;
  run.out = &out;
  run.err = &err;
  run.start = std::chrono::steady_clock::now();

  // analytic
  std::size_t a_n = 0;
  double a_snr = 20.0;
  std::optional<double> a_rho;
  double a_nu = 0.5;
  bool a_optimize = false;
  std::string a_route = "derivative";
  std::string a_out;
  CLI::App* analytic = app.add_subcommand("analytic", "Analytic error rates of the time-averaged readout");
  analytic->add_option("--n", a_n, "Number of intermediate states N")->required();
  analytic->add_option("--snr", a_snr, "Signal-to-noise ratio S")->required();
  analytic->add_option("--rho", a_rho, "Dimensionless readout time r t");
  analytic->add_option("--nu", a_nu, "Dimensionless threshold (I_th - I-)/dI");
  analytic->add_flag("--optimize", a_optimize, "Minimize the average error over (rho, nu)");
  analytic->add_option("--route", a_route, "derivative or quadrature")
      ->check(CLI::IsMember({"derivative", "quadrature"}));
  analytic->add_option("--out", a_out, "Output CSV (default stdout)");

  // fig3
  std::vector<double> f3_grid;
  std::size_t f3_nmax = 4;
  int f3_threads = 0;
  std::string f3_out;
  CLI::App* fig3 = app.add_subcommand("fig3", "Optimal analytic error versus SNR for N = 0..n-max");
  fig3->add_option("--snr-grid", f3_grid, "Comma-separated SNR values (default 10^(k/4), k=0..12)")
      ->delimiter(',');
  fig3->add_option("--n-max", f3_nmax, "Largest N");
  fig3->add_option("--threads", f3_threads, "Worker threads (0 = all cores)");
  fig3->add_option("--out", f3_out, "Output CSV (default stdout)");

  // fig5
  Fig5Config f5;
  std::optional<std::uint64_t> f5_seed;
  std::string f5_out;
  CLI::App* fig5 = app.add_subcommand("fig5", "Threshold versus optimal-filter Monte Carlo");
  fig5->add_option("--snr", f5.snr, "Signal-to-noise ratio S");
  fig5->add_option("--n-max", f5.n_max, "Largest N");
  fig5->add_option("--trials", f5.trials_per_state, "Trials per initial state");
  fig5->add_option("--filter-time", f5.filter_time, "Filter readout time in units of 1/Gamma");
  fig5->add_option("--seed", f5_seed, "Base seed");
  fig5->add_option("--threads", f5.threads, "Worker threads (0 = all cores)");
  fig5->add_option("--out", f5_out, "Output CSV (default stdout)");

  // fig6
  Fig6Config f6;
  std::vector<std::string> f6_modes{"contrast", "rates"};
  std::optional<std::uint64_t> f6_seed;
  bool f6_no_refs = false;
  std::string f6_out;
  f6.mc.trials_per_state = 10000;
  CLI::App* fig6 = app.add_subcommand("fig6", "Error versus cascade asymmetry (optimal filter)");
  fig6->add_option("--n", f6.n_intermediate, "Number of intermediate states N");
  fig6->add_option("--snr", f6.snr, "Total signal-to-noise ratio S");
  fig6->add_option("--ratios", f6.ratios, "Comma-separated asymmetry ratios S0/S1")->delimiter(',');
  fig6->add_option("--modes", f6_modes, "Comma-separated modes: contrast, rates")->delimiter(',');
  fig6->add_option("--trials", f6.mc.trials_per_state, "Trials per state for each ratio");
  fig6->add_option("--reference-trials", f6.reference_trials, "Trials per state for reference rows");
  fig6->add_flag("--no-references", f6_no_refs, "Skip the symmetric and fully asymmetric rows");
  fig6->add_option("--t", f6.mc.readout_time, "Readout time in units of 1/Gamma");
  fig6->add_option("--seed", f6_seed, "Base seed");
  fig6->add_option("--threads", f6.mc.threads, "Worker threads (0 = all cores)");
  fig6->add_option("--out", f6_out, "Output CSV (default stdout)");

  // sample-tau
  std::size_t st_n = 0;
  double st_gamma = 1.0;
  long long st_draws = 10000;
  std::optional<std::uint64_t> st_seed;
  std::string st_out;
  CLI::App* sample_tau = app.add_subcommand("sample-tau", "Sample cascade jump times");
  sample_tau->add_option("--n", st_n, "Number of intermediate states N");
  sample_tau->add_option("--gamma", st_gamma, "Total relaxation rate Gamma");
  sample_tau->add_option("--draws", st_draws, "Number of samples");
  sample_tau->add_option("--seed", st_seed, "Seed");
  sample_tau->add_option("--out", st_out, "CSV of samples (summary always goes to stdout)");

  // simulate
  std::size_t sim_n = 0;
  double sim_snr = 20.0;
  std::string sim_mode = "symmetric";
  double sim_ratio = 1.0;
  std::string sim_state = "plus";
  double sim_t = 5.0;
  double sim_dt = 0.0;
  std::optional<std::uint64_t> sim_seed;
  std::uint64_t sim_index = 0;
  std::string sim_out;
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one detector record");
  simulate->add_option("--n", sim_n, "Number of intermediate states N");
  simulate->add_option("--snr", sim_snr, "Signal-to-noise ratio S");
  simulate->add_option("--mode", sim_mode, "symmetric, contrast or rates")
      ->check(CLI::IsMember({"symmetric", "contrast", "rates"}));
  simulate->add_option("--ratio", sim_ratio, "Asymmetry ratio S0/S1 (asymmetric modes)");
  simulate->add_option("--state", sim_state, "Initial state: plus or minus")
      ->check(CLI::IsMember({"plus", "minus"}));
  simulate->add_option("--t", sim_t, "Readout time in units of 1/Gamma");
  simulate->add_option("--dt", sim_dt, "Bin width (0 = default)");
  simulate->add_option("--seed", sim_seed, "Seed");
  simulate->add_option("--index", sim_index, "Stream index");
  simulate->add_option("--out", sim_out, "Output CSV (default stdout)");

  // filter-one
  std::size_t fo_n = 0;
  double fo_snr = 20.0;
  std::string fo_mode = "symmetric";
  double fo_ratio = 1.0;
  std::string fo_in;
  std::string fo_trace;
  std::size_t fo_substeps = 0;
  std::string fo_out;
  CLI::App* filter_one = app.add_subcommand("filter-one", "Run the optimal filter on one record");
  filter_one->add_option("--n", fo_n, "Number of intermediate states N");
  filter_one->add_option("--snr", fo_snr, "Signal-to-noise ratio S");
  filter_one->add_option("--mode", fo_mode, "symmetric, contrast or rates")
      ->check(CLI::IsMember({"symmetric", "contrast", "rates"}));
  filter_one->add_option("--ratio", fo_ratio, "Asymmetry ratio S0/S1 (asymmetric modes)");
  filter_one->add_option("--in", fo_in, "Trajectory CSV")->required();
  filter_one->add_option("--trace", fo_trace, "Write the per-bin log-likelihood trace here");
  filter_one->add_option("--substeps", fo_substeps, "RK4 steps per bin (0 = automatic)");
  filter_one->add_option("--out", fo_out, "Output CSV (default stdout)");

  // replay
  std::string rp_manifest;
  std::optional<int> rp_threads;
  std::optional<std::string> rp_out;
  CLI::App* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("--manifest", rp_manifest, "Manifest JSON")->required();
  replay->add_option("--threads", rp_threads, "Override the worker thread count");
  replay->add_option("--out", rp_out, "Override the output path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  run.canonical_args = args;
  auto resolve_seed = [&](const std::optional<std::uint64_t>& given) {
    const std::uint64_t seed = given ? *given : default_seed();
    if (!given) {
      run.canonical_args.push_back("--seed");
      run.canonical_args.push_back(std::to_string(seed));
    }
    run.seeds.push_back(seed);
    return seed;
  };

  int status = kExitOk;
  if (*analytic) {
    run.command = "analytic";
    run.sub = analytic;
    if (!(a_snr > 0.0) || !std::isfinite(a_snr)) throw UsageError("--snr must be positive");
    if (!std::isfinite(a_nu)) throw UsageError("--nu must be finite");
    double rho = 0.0;
    double nu = a_nu;
    if (a_optimize) {
      const OptimizationResult opt = minimize_error(a_n, a_snr);
      if (!opt.converged) err << "warning: optimizer stopped before converging\n";
      rho = opt.rho_opt;
      nu = opt.nu_opt;
    } else {
      if (!a_rho) throw UsageError("--rho is required unless --optimize is given");
      rho = *a_rho;
      if (!(rho >= 0.0) || !std::isfinite(rho)) throw UsageError("--rho must be non-negative");
    }
    const DimensionlessPoint point{rho, nu, a_snr, a_n};
    ErrorRates rates = (a_route == "quadrature" && rho > 0.0) ? error_rates_quadrature(point)
                                                               : error_rates_derivative(point);
    CsvDocument doc;
    doc.set_meta("kind", "analytic");
    doc.set_meta("route", a_route);
    doc.header = {"N", "S", "rho", "nu", "eps_plus", "eps_minus", "eps"};
    doc.rows.push_back({std::to_string(a_n), format_double(a_snr), format_double(rho),
                        format_double(nu), format_double(rates.eps_plus),
                        format_double(rates.eps_minus), format_double(rates.eps_avg)});
    emit(run, a_out, [&](std::ostream& os) { write_csv(os, doc); });
  } else if (*fig3) {
    run.command = "fig3";
    run.sub = fig3;
    if (f3_grid.empty()) f3_grid = default_fig3_snr_grid();
    for (double s : f3_grid) {
      if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("SNR grid values must be positive");
    }
    std::vector<std::size_t> ns;
    for (std::size_t n = 0; n <= f3_nmax; ++n) ns.push_back(n);
    const Fig3Table table = sweep_fig3(f3_grid, ns, f3_threads);
    for (const std::string& v : table.violations) err << "warning: " << v << '\n';
    emit(run, f3_out, [&](std::ostream& os) { write_fig3_csv(os, table); });
  } else if (*fig5) {
    run.command = "fig5";
    run.sub = fig5;
    if (f5.trials_per_state == 0) throw UsageError("--trials must be >= 1");
    if (!(f5.snr > 0.0)) throw UsageError("--snr must be positive");
    f5.base_seed = resolve_seed(f5_seed);
    f5.progress = [&](const McRow& row) {
      err << "fig5: N=" << row.n_intermediate << " " << row.decision << " " << describe(row.result)
          << '\n';
    };
    const std::vector<McRow> rows = sweep_fig5(f5);
    for (const McRow& row : rows) {
      if (row.seed != 0) run.seeds.push_back(row.seed);
    }
    emit(run, f5_out, [&](std::ostream& os) { write_mc_csv(os, rows); });
  } else if (*fig6) {
    run.command = "fig6";
    run.sub = fig6;
    if (f6.mc.trials_per_state == 0 || f6.reference_trials == 0) {
      throw UsageError("trial counts must be >= 1");
    }
    f6.modes.clear();
    for (const std::string& m : f6_modes) f6.modes.push_back(parse_asymmetry_mode(m));
    f6.include_references = !f6_no_refs;
    f6.mc.base_seed = resolve_seed(f6_seed);
    f6.progress = [&](const Fig6Row& row) {
      err << "fig6: " << row.mode << " ratio=" << row.ratio << " " << describe(row.result) << '\n';
    };
    const std::vector<Fig6Row> rows = sweep_fig6(f6);
    for (const Fig6Row& row : rows) run.seeds.push_back(row.seed);
    emit(run, f6_out, [&](std::ostream& os) { write_fig6_csv(os, rows); });
  } else if (*sample_tau) {
    run.command = "sample-tau";
    run.sub = sample_tau;
    if (st_draws < 1) throw UsageError("--draws must be >= 1");
    if (!(st_gamma > 0.0) || !std::isfinite(st_gamma)) throw UsageError("--gamma must be positive");
    const std::uint64_t seed = resolve_seed(st_seed);
    const CascadeModel model = CascadeModel::symmetric(st_n, st_gamma, 1.0, 0.0, 1.0);
    PhiloxEngine engine(seed, 0);
    std::vector<double> taus(static_cast<std::size_t>(st_draws));
    for (double& tau : taus) tau = sample_jump_times(model, engine).back();

    double mean = 0.0;
    for (double tau : taus) mean += tau;
    mean /= static_cast<double>(taus.size());
    double var = 0.0;
    for (double tau : taus) var += (tau - mean) * (tau - mean);
    var /= std::max<double>(1.0, static_cast<double>(taus.size()) - 1.0);
    const JumpTimeDistribution dist{st_n, static_cast<double>(st_n + 1) * st_gamma};
    const double d = ks_statistic(taus, [&](double x) { return dist.cdf(x); });

    if (!st_out.empty()) {
      emit(run, st_out, [&](std::ostream& os) {
        CsvDocument doc;
        doc.set_meta("kind", "jump_times");
        doc.set_meta("N", std::to_string(st_n));
        doc.set_meta("gamma", format_double(st_gamma));
        doc.set_meta("seed", std::to_string(seed));
        doc.header = {"tau"};
        doc.rows.reserve(taus.size());
        for (double tau : taus) doc.rows.push_back({format_double(tau)});
        write_csv(os, doc);
      });
    }
    CsvDocument summary;
    summary.set_meta("kind", "jump_time_summary");
    summary.header = {"N", "gamma", "draws", "mean", "mean_stderr", "expected_mean",
                      "variance", "expected_variance", "ks_d", "ks_p"};
    summary.rows.push_back({std::to_string(st_n), format_double(st_gamma), std::to_string(st_draws),
                            format_double(mean),
                            format_double(std::sqrt(var / static_cast<double>(taus.size()))),
                            format_double(dist.mean()), format_double(var),
                            format_double(dist.variance()), format_double(d),
                            format_double(kolmogorov_pvalue(d, taus.size()))});
    write_csv(out, summary);
  } else if (*simulate) {
    run.command = "simulate";
    run.sub = simulate;
    const CascadeModel model = build_model(sim_n, sim_snr, sim_mode, sim_ratio);
    const std::uint64_t seed = resolve_seed(sim_seed);
    const double dt = sim_dt > 0.0 ? sim_dt : std::min(default_bin_width(model), sim_t);
    const QubitState state = sim_state == "plus" ? QubitState::kPlus : QubitState::kMinus;
    const Trajectory traj = simulate_trajectory(model, state, sim_t, dt, RngStream{seed, sim_index});
    emit(run, sim_out, [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  } else if (*filter_one) {
    run.command = "filter-one";
    run.sub = filter_one;
    const CascadeModel model = build_model(fo_n, fo_snr, fo_mode, fo_ratio);
    std::ifstream in(fo_in);
    if (!in) throw UsageError("cannot open trajectory '" + fo_in + "'");
    const Trajectory traj = read_trajectory_csv(in);
    if (!traj.samples.empty() && traj.dt > max_bin_width(model) * (1.0 + 1e-12)) {
      throw UsageError("trajectory bin width is too coarse for this model");
    }
    FilterOptions options;
    options.rk4_substeps = fo_substeps;
    const auto trace = run_filter_trace(model, traj, options);
    const double log_lambda = trace.empty() ? 0.0 : trace.back().log_likelihood_ratio;
    if (!fo_trace.empty()) {
      emit(run, fo_trace, [&](std::ostream& os) { write_filter_trace_csv(os, trace); });
    }
    CsvDocument doc;
    doc.set_meta("kind", "filter_result");
    doc.header = {"logLambda", "decision"};
    doc.rows.push_back({format_double(log_lambda), to_string(decide(log_lambda))});
    emit(run, fo_out, [&](std::ostream& os) { write_csv(os, doc); });
  } else if (*replay) {
    const RunManifest manifest = read_manifest(rp_manifest);
    std::vector<std::string> replay_args = manifest.argv;
    if (replay_args.empty() || replay_args.front() == "replay") {
      throw UsageError("manifest does not describe a replayable command");
    }
    if (rp_threads) {
      if (!has_option(replay_args, "--threads") && manifest.command != "fig3" &&
          manifest.command != "fig5" && manifest.command != "fig6") {
        err << "note: " << manifest.command << " is single-threaded; --threads ignored\n";
      } else {
        override_option(replay_args, "--threads", std::to_string(*rp_threads));
      }
    }
    if (rp_out) override_option(replay_args, "--out", *rp_out);
    return run_checked(replay_args, out, err);
  }

  write_manifests(run);
  return status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_checked(args, out, err);
}

}  // namespace cascade
