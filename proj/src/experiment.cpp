#include "swl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "swl/greens.hpp"
#include "swl/hypcheck.hpp"
#include "swl/stats.hpp"

namespace swl {

namespace fs = std::filesystem;
using io::number;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Moments: return "moments";
    case ExperimentKind::Holder: return "holder";
    case ExperimentKind::Blowup: return "blowup";
    case ExperimentKind::Hypcheck: return "hypcheck";
    case ExperimentKind::GreensCheck: return "greens-check";
    case ExperimentKind::KernelTable: return "kernel-table";
  }
  return "unknown";
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds = {
      ExperimentKind::Simulate, ExperimentKind::Moments,     ExperimentKind::Holder,     ExperimentKind::Blowup,
      ExperimentKind::Hypcheck, ExperimentKind::GreensCheck, ExperimentKind::KernelTable};
  return kinds;
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : all_experiment_kinds())
    if (to_string(k) == s) return k;
  throw std::invalid_argument(fmt::format("unknown experiment kind '{}'", s));
}

std::vector<KernelSpec> kernel_table_catalog() {
  std::vector<KernelSpec> out{KernelSpec::white_noise()};
  for (int d : {2, 3})
    for (double beta : {0.5, 1.0, 1.5}) out.push_back(KernelSpec::riesz(d, beta));
  for (int d : {2, 3}) out.push_back(KernelSpec::bessel(d, static_cast<double>(d)));
  out.push_back(KernelSpec::fractional({0.8, 0.9}));
  out.push_back(KernelSpec::fractional({0.9, 0.9, 0.9}));
  return out;
}

namespace {

struct Context {
  cfg::SimConfig config;
  fs::path dir;
  io::Manifest manifest;
  std::ostream& log;

  void check(std::string name, bool pass, bool hard, std::string message) {
    log << fmt::format("[{}{}] {}: {}\n", pass ? "PASS" : "FAIL", hard ? "" : ", advisory", name, message);
    manifest.checks.push_back({std::move(name), pass, hard, std::move(message)});
  }
  void write(const std::string& name, std::string_view content) { io::write_output(dir, name, content, manifest); }
};

bool same_kernel(const KernelSpec& a, const KernelSpec& b) {
  return a.family == b.family && a.dim == b.dim && a.beta == b.beta && a.kappa == b.kappa && a.hurst == b.hurst;
}

double ball_sup(const std::vector<double>& u, const std::vector<std::size_t>& ball) {
  double m = 0.0;
  for (auto j : ball) m = std::max(m, std::abs(u[j]));
  return m;
}

double ball_mean(const std::vector<double>& u, const std::vector<std::size_t>& ball) {
  double s = 0.0;
  for (auto j : ball) s += u[j];
  return ball.empty() ? 0.0 : s / static_cast<double>(ball.size());
}

double box_sup(const std::vector<double>& u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

std::string coordinates(const GridSpec& g, std::size_t index) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(g.dim));
  for (int a = g.dim - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = index % g.n;
    index /= g.n;
  }
  std::string out;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (a) out += ' ';
    out += number(g.coordinate(idx[a]));
  }
  return out;
}

void run_simulate(Context& ctx) {
  const auto& c = ctx.config;
  auto setup = cfg::make_setup(c);
  const auto ball = ball_indices(c.grid, c.observation.radius);
  io::CsvTable summary({"path", "t", "ball_sup", "ball_mean", "box_sup"});
  io::CsvTable tau({"path", "level", "tau", "hit"});
  std::size_t non_finite = 0;
  run_paths(setup, c.mc.seed, 0, static_cast<std::uint32_t>(c.mc.replicas), c.mc.threads, [&](PathResult&& r) {
    for (const auto& s : r.snapshots)
      summary.row({fmt::format("{}", r.path), number(s.t), number(ball_sup(s.u, ball)), number(ball_mean(s.u, ball)),
                   number(box_sup(s.u))});
    for (std::size_t k = 0; k < r.monitor.levels.size(); ++k)
      tau.row({fmt::format("{}", r.path), number(r.monitor.levels[k]), number(r.monitor.tau[k]),
               r.monitor.hit[k] ? "1" : "0"});
    if (r.non_finite) ++non_finite;
    if (r.path == 0) {
      for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
        std::ostringstream os;
        SnapshotHeader h{c.grid.dim, c.grid.n, c.grid.L, c.grid.dt, r.snapshots[i].t, c.mc.seed, 0};
        write_snapshot(os, h, r.snapshots[i]);
        ctx.write(fmt::format("snapshots/path0_t{:03d}.bin", i), os.str());
      }
    }
  });
  ctx.write("simulate_paths.csv", summary.str());
  ctx.write("simulate_tau.csv", tau.str());
  ctx.check("paths finite", non_finite == 0, false,
            fmt::format("{} of {} paths left the finite range", non_finite, c.mc.replicas));
}

void run_moments(Context& ctx) {
  const auto& c = ctx.config;
  auto setup = cfg::make_setup(c);
  setup.keep_velocity = false;
  const auto ball = ball_indices(c.grid, c.observation.radius);
  std::vector<stats::MomentAccumulator> accs;
  for (double p : c.moments.orders) accs.emplace_back(p, setup.output_times, ball.size());
  std::size_t non_finite = 0;
  run_paths(setup, c.mc.seed, 0, static_cast<std::uint32_t>(c.mc.replicas), c.mc.threads, [&](PathResult&& r) {
    if (r.non_finite || r.snapshots.size() != setup.output_times.size()) {
      ++non_finite;
      return;
    }
    for (auto& a : accs) a.add(r, ball);
  });
  if (non_finite)
    ctx.check("paths finite", false, false, fmt::format("{} paths left the finite range and were excluded", non_finite));

  std::optional<stats::GrowthInput> growth;
  if (setup.coeff.lip_drift && setup.coeff.lip_diffusion) {
    stats::GrowthInput in;
    in.dim = c.grid.dim;
    if (c.grid.dim >= 2) in.c_mu = compute_analytics(setup.kernel).c_mu;
    in.lip_drift = *setup.coeff.lip_drift;
    in.lip_diffusion = *setup.coeff.lip_diffusion;
    in.c_drift = std::abs(setup.coeff.drift(0.0));
    in.c_diffusion = std::abs(setup.coeff.diffusion(0.0));
    in.margin = c.moments.margin;
    growth = in;
  }

  io::CsvTable summary({"p", "paths", "n_alpha_p", "n_alpha_p_lo", "n_alpha_p_hi", "slope", "slope_error", "limit",
                        "verdict"});
  for (auto& acc : accs) {
    const double p = acc.p();
    auto report = stats::estimate_moments(acc, c.moments.alpha, {c.moments.resamples, 0.95, c.mc.seed});
    io::CsvTable table({"t", "sup_moment", "std_error", "ci_lo", "ci_hi", "argmax"});
    for (std::size_t i = 0; i < report.times.size(); ++i) {
      const auto& e = report.sup_moment[i];
      table.row({number(report.times[i]), number(e.value), number(e.std_error), number(e.ci_lo), number(e.ci_hi),
                 coordinates(c.grid, ball[report.argmax[i]])});
    }
    ctx.write(fmt::format("moments_p{}.csv", number(p)), table.str());

    std::string slope = "", slope_error = "", limit = "", verdict = "not applicable";
    if (growth) {
      stats::GrowthVerdict v;
      try {
        v = stats::check_growth_envelope(report, *growth);
      } catch (const std::invalid_argument& e) {
        v.refused = true;
        v.message = fmt::format("not evaluable: {}", e.what());
      }
      if (v.refused) {
        verdict = "refused";
        ctx.check(fmt::format("growth envelope p={}", number(p)), false, false, v.message);
      } else {
        slope = number(v.slope);
        slope_error = number(v.slope_error);
        limit = number(v.limit);
        verdict = v.pass ? "pass" : "fail";
        ctx.check(fmt::format("growth envelope p={}", number(p)), v.pass, false, v.message);
      }
    }
    summary.row({number(p), fmt::format("{}", report.paths), number(report.n_alpha_p.value),
                 number(report.n_alpha_p.ci_lo), number(report.n_alpha_p.ci_hi), slope, slope_error, limit, verdict});
  }
  ctx.write("moments_summary.csv", summary.str());
}

std::string holder_csv(const stats::HolderReport& r) {
  io::CsvTable t({"lag", "structure", "std_error", "used"});
  for (std::size_t i = 0; i < r.lags.size(); ++i)
    t.row({number(r.lags[i]), number(r.structure[i]), number(r.structure_error[i]), r.used[i] ? "1" : "0"});
  return t.str();
}

void run_holder(Context& ctx) {
  auto& c = ctx.config;
  cfg::check_holder_lags(c);
  auto setup = cfg::make_setup(c);
  setup.keep_velocity = false;
  const auto& g = c.grid;
  const std::size_t max_step = c.holder.time_lags.back();
  const std::size_t base_step = g.steps() - max_step;
  std::vector<double> times{static_cast<double>(base_step) * g.dt};
  for (auto k : c.holder.time_lags) times.push_back(static_cast<double>(base_step + k) * g.dt);
  setup.output_times = times;

  stats::StructureAccumulator space(c.holder.space_lags.size()), time(c.holder.time_lags.size());
  std::size_t skipped = 0;
  run_paths(setup, c.mc.seed, 0, static_cast<std::uint32_t>(c.mc.replicas), c.mc.threads, [&](PathResult&& r) {
    if (r.non_finite || r.snapshots.size() != times.size()) {
      ++skipped;
      return;
    }
    space.add(r.path, stats::spatial_structure(g, r.snapshots.back().u, c.holder.space_lags, c.holder.order,
                                               c.holder.window));
    std::vector<std::span<const double>> shifted;
    for (std::size_t k = 1; k < r.snapshots.size(); ++k) shifted.emplace_back(r.snapshots[k].u);
    time.add(r.path, stats::temporal_structure(g, r.snapshots.front().u, shifted, c.holder.order, c.holder.window));
  });
  if (skipped) ctx.check("paths finite", false, false, fmt::format("{} paths excluded", skipped));

  const auto init = make_initial_data(c.init, g.dim, g.L, g.n);
  double target = 0.0;
  if (g.dim == 1 && setup.kernel.family == KernelFamily::WhiteNoise) {
    target = std::min(init.gamma1, 0.5);
  } else {
    target = hyp::critical_exponent_table(setup.kernel, init.gamma1, init.gamma2).conclusion;
  }
  stats::HolderOptions opts;
  opts.p = c.holder.order;
  opts.target = target;
  opts.margin = c.holder.margin;
  opts.min_paths = std::min<std::size_t>(opts.min_paths, c.mc.replicas);
  if (c.mc.replicas < 100)
    ctx.check("path count", false, false, fmt::format("{} paths; exponent intervals need about 100", c.mc.replicas));

  std::vector<double> space_lags, time_lags;
  for (auto k : c.holder.space_lags) space_lags.push_back(static_cast<double>(k) * g.dx());
  for (auto k : c.holder.time_lags) time_lags.push_back(static_cast<double>(k) * g.dt);
  const auto rs = stats::estimate_holder(space, space_lags, stats::Direction::Space, opts);
  const auto rt = stats::estimate_holder(time, time_lags, stats::Direction::Time, opts);
  const auto rj = stats::joint_exponent(rs, rt);
  ctx.write("holder_space.csv", holder_csv(rs));
  ctx.write("holder_time.csv", holder_csv(rt));
  io::CsvTable summary({"direction", "exponent", "ci_lo", "ci_hi", "target", "margin", "paths", "pass"});
  auto add = [&](const char* name, const stats::HolderReport& r) {
    summary.row({name, number(r.exponent), number(r.ci_lo), number(r.ci_hi), number(r.target), number(r.margin),
                 fmt::format("{}", r.paths), r.pass ? "1" : "0"});
    ctx.check(fmt::format("holder exponent ({})", name), r.pass, false,
              fmt::format("fitted {:.4f} [{:.4f}, {:.4f}] vs target {:.4f} +- {}", r.exponent, r.ci_lo, r.ci_hi,
                          r.target, r.margin));
  };
  add("space", rs);
  add("time", rt);
  add("joint", rj);
  ctx.write("holder_summary.csv", summary.str());
}

void run_blowup(Context& ctx) {
  const auto& c = ctx.config;
  auto setup = cfg::make_setup(c);
  setup.keep_velocity = false;
  const auto table = blowup_experiment(setup, c.blowup.levels, c.mc.replicas, c.mc.seed, c.mc.threads,
                                       c.blowup.confidence);
  io::CsvTable ladder({"level", "hits", "replicas", "p_hat", "ci_lo", "ci_hi"});
  for (const auto& r : table.rows)
    ladder.row({number(r.level), fmt::format("{}", r.hits), fmt::format("{}", r.replicas), number(r.p_hat),
                number(r.ci_lo), number(r.ci_hi)});
  io::CsvTable tau({"path", "level", "tau", "hit"});
  for (std::size_t p = 0; p < table.tau.size(); ++p)
    for (std::size_t k = 0; k < table.tau[p].size(); ++k)
      tau.row({fmt::format("{}", p), number(c.blowup.levels[k]), number(table.tau[p][k]), table.hit[p][k] ? "1" : "0"});
  ctx.write("blowup.csv", ladder.str());
  ctx.write("blowup_tau.csv", tau.str());
  ctx.check("tau_N nondecreasing in N on every path", table.per_path_monotone, true,
            table.per_path_monotone ? "monotone on all shared-seed paths" : "some path violates monotonicity");
  bool decreasing = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    if (!(table.rows[k].p_hat < table.rows[k - 1].p_hat)) decreasing = false;
  std::string ladder_text;
  for (const auto& r : table.rows) ladder_text += fmt::format(" N={}:{:.3f}", r.level, r.p_hat);
  ctx.check("P(tau_N < T) strictly decreasing", decreasing, false, "hit fractions" + ladder_text);
}

nlohmann::ordered_json rate_json(const hyp::RateFit& r) {
  return {{"fitted", r.fitted}, {"ci_lo", r.ci_lo},   {"ci_hi", r.ci_hi},
          {"theory", r.theory}, {"verdict", hyp::to_string(r.verdict)}, {"message", r.message}};
}

// NaN is not representable in JSON; emit null.
nlohmann::ordered_json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nullptr; }

void run_hypcheck(Context& ctx) {
  const auto& c = ctx.config;
  const auto spec = cfg::kernel_spec(c);
  hyp::IncrementOptions opts;
  opts.samples = c.hypcheck.samples;
  opts.seed = c.mc.seed;
  const bool with_h4 = c.hypcheck.h4 && spec.dim >= 2;
  const auto r = hyp::check_hypotheses(spec, with_h4, opts);
  const auto an = compute_analytics(spec, c.kernel.gamma);

  nlohmann::ordered_json j;
  j["kernel"] = {{"family", to_string(spec.family)}, {"dim", spec.dim}, {"params", spec.params_string()}};
  j["c_mu"] = r.c_mu;
  j["c_mu_diverges"] = r.c_mu_diverges;
  j["gamma_max"] = an.gamma_max;
  j["detected_gamma_max"] = r.detected_gamma_max;
  j["h3"] = rate_json(r.h3);
  if (r.has_h4) j["h4"] = {{"b", rate_json(r.h4.b)}, {"bbar", rate_json(r.h4.bbar)}};
  j["exponents"] = {{"gamma", r.table.gamma},           {"nu", r.table.nu},
                    {"b", finite_or_null(r.table.b)},   {"bbar", finite_or_null(r.table.bbar)},
                    {"alpha_tilde", r.table.alpha_tilde}, {"nu1", r.table.nu1},
                    {"nu2", r.table.nu2},               {"conclusion", r.table.conclusion}};
  ctx.write("hypcheck_report.json", j.dump(2) + "\n");

  io::CsvTable h3({"t", "energy"});
  for (std::size_t i = 0; i < r.h3.xs.size(); ++i) h3.row({number(r.h3.xs[i]), number(r.h3.values[i])});
  ctx.write("hypcheck_h3.csv", h3.str());
  io::CsvTable gammas({"gamma", "value", "diverges"});
  for (const auto& p : r.gamma_scan) gammas.row({number(p.gamma), number(p.value), p.diverges ? "1" : "0"});
  ctx.write("hypcheck_gamma.csv", gammas.str());
  if (r.has_h4) {
    io::CsvTable h4({"h", "first", "first_error", "second", "second_error"});
    for (std::size_t i = 0; i < r.h4.b.xs.size(); ++i)
      h4.row({number(r.h4.b.xs[i]), number(r.h4.b.values[i]), number(r.h4.b.errors[i]), number(r.h4.bbar.values[i]),
              number(r.h4.bbar.errors[i])});
    ctx.write("hypcheck_h4.csv", h4.str());
  }

  ctx.check("C_mu finite", !r.c_mu_diverges && std::isfinite(r.c_mu) && r.c_mu > 0.0, true,
            fmt::format("C_mu = {}", r.c_mu));
  ctx.check("small-time energy rate", r.h3.verdict == hyp::Verdict::Pass, false, r.h3.message);
  if (r.has_h4) {
    ctx.check("increment exponent b", r.h4.b.verdict == hyp::Verdict::Pass, false, r.h4.b.message);
    ctx.check("increment exponent bbar", r.h4.bbar.verdict == hyp::Verdict::Pass, false, r.h4.bbar.message);
  }
}

void run_greens_check(Context& ctx) {
  const auto battery = greens::invariant_battery(ctx.config.greens.pairings);
  io::CsvTable t({"name", "value", "expected", "error", "tolerance", "pass"});
  for (const auto& c : battery) {
    t.row({c.name, number(c.value), number(c.expected), number(c.error), number(c.tolerance), c.pass ? "1" : "0"});
    ctx.check(c.name, c.pass, true, fmt::format("error {:.3g} (tolerance {:.3g})", c.error, c.tolerance));
  }
  ctx.write("greens_checks.csv", t.str());
}

void run_kernel_table(Context& ctx) {
  auto kernels = kernel_table_catalog();
  const auto configured = cfg::kernel_spec(ctx.config);
  if (std::none_of(kernels.begin(), kernels.end(), [&](const KernelSpec& k) { return same_kernel(k, configured); }))
    kernels.push_back(configured);
  io::CsvTable t({"family", "dim", "params", "c_mu", "c_mu_gamma", "gamma_max", "nu", "b", "bbar"});
  for (const auto& k : kernels) {
    const auto a = compute_analytics(k, ctx.config.kernel.gamma);
    t.row({to_string(k.family), fmt::format("{}", k.dim), k.params_string(), number(a.c_mu), number(a.c_mu_gamma),
           number(a.gamma_max), number(a.nu.value), number(a.b.value), number(a.bbar.value)});
  }
  ctx.write("kernel_table.csv", t.str());
}

}  // namespace

RunResult run_experiment(ExperimentKind kind, const cfg::SimConfig& config, const RunOptions& opts,
                         std::ostream& log) {
  cfg::SimConfig raw = config;
  if (opts.paths) raw.mc.replicas = *opts.paths;
  if (opts.threads) raw.mc.threads = *opts.threads;
  if (opts.seed) raw.mc.seed = *opts.seed;
  auto validation = cfg::validate(raw);

  Context ctx{validation.config, opts.out_dir, {}, log};
  const auto& c = ctx.config;
  fs::create_directories(ctx.dir);
  const std::string ini = cfg::to_ini(c);
  ctx.manifest.version = kToolVersion;
  ctx.manifest.kind = to_string(kind);
  ctx.manifest.config_sha256 = io::sha256_hex(ini);
  ctx.manifest.seed = c.mc.seed;
  ctx.manifest.paths = c.mc.replicas;
  ctx.manifest.threads = c.mc.threads;
  ctx.manifest.advisories = validation.advisories;
  for (const auto& a : validation.advisories) log << "advisory: " << a << "\n";
  ctx.write("config.ini", ini);

  switch (kind) {
    case ExperimentKind::Simulate: run_simulate(ctx); break;
    case ExperimentKind::Moments: run_moments(ctx); break;
    case ExperimentKind::Holder: run_holder(ctx); break;
    case ExperimentKind::Blowup: run_blowup(ctx); break;
    case ExperimentKind::Hypcheck: run_hypcheck(ctx); break;
    case ExperimentKind::GreensCheck: run_greens_check(ctx); break;
    case ExperimentKind::KernelTable: run_kernel_table(ctx); break;
  }

  const bool hard_fail = std::any_of(ctx.manifest.checks.begin(), ctx.manifest.checks.end(),
                                     [](const io::ManifestCheck& ch) { return ch.hard && !ch.pass; });
  ctx.manifest.exit_status = hard_fail ? 2 : 0;
  const std::string manifest = ctx.manifest.to_json();
  {
    io::Manifest scratch;
    io::write_output(ctx.dir, "manifest.json", manifest, scratch);
  }
  return {ctx.manifest.exit_status, ctx.manifest};
}

}  // namespace swl
