#include "swl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "swl/hypcheck.hpp"

namespace swl::cfg {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string show(double x) { return fmt::format("{}", x); }

double to_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument(fmt::format("'{}' is not a number", s));
  return v;
}

template <class Int>
Int to_integer(const std::string& s) {
  const std::string t = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument(fmt::format("'{}' is not a non-negative integer", s));
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument(fmt::format("'{}' is not a boolean", s));
}

// Comma-separated list, optionally bracketed.
std::vector<std::string> split_list(const std::string& s) {
  std::string t = trim(s);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw std::invalid_argument(fmt::format("unbalanced list '{}'", s));
    t = t.substr(1, t.size() - 2);
  }
  std::vector<std::string> out;
  if (trim(t).empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& x : split_list(s)) out.push_back(to_double(x));
  return out;
}

std::vector<std::size_t> to_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& x : split_list(s)) out.push_back(to_integer<std::size_t>(x));
  return out;
}

template <class T>
std::string show_list(const std::vector<T>& v) {
  std::vector<std::string> parts;
  for (const auto& x : v) parts.push_back(fmt::format("{}", x));
  return fmt::format("{}", fmt::join(parts, ", "));
}

std::string show_optional(const std::optional<double>& v) { return v ? show(*v) : std::string{}; }

std::optional<double> to_optional(const std::string& s) {
  if (trim(s).empty()) return std::nullopt;
  return to_double(s);
}

struct Field {
  const char* section;
  const char* key;
  const char* doc;
  std::function<std::string(const SimConfig&)> get;
  std::function<void(SimConfig&, const std::string&)> set;
};

#define SWL_DOUBLE(sec, name, member, doc)                                    \
  Field {                                                                      \
    sec, name, doc, [](const SimConfig& c) { return show(c.member); },         \
        [](SimConfig& c, const std::string& s) { c.member = to_double(s); }    \
  }

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = {
      {"grid", "dim", "spatial dimension d in {1, 2, 3}", [](const SimConfig& c) { return fmt::format("{}", c.grid.dim); },
       [](SimConfig& c, const std::string& s) { c.grid.dim = to_integer<int>(s); }},
      SWL_DOUBLE("grid", "L", grid.L, "side of the periodic box [-L/2, L/2)^d; must be >= 2(R + T)"),
      {"grid", "n", "points per axis (power of two)", [](const SimConfig& c) { return fmt::format("{}", c.grid.n); },
       [](SimConfig& c, const std::string& s) { c.grid.n = to_integer<std::size_t>(s); }},
      SWL_DOUBLE("grid", "dt", grid.dt, "time step"),
      SWL_DOUBLE("grid", "T", grid.T, "horizon, a whole number of steps"),

      {"kernel", "family", "white (d = 1) | riesz | bessel | fractional", [](const SimConfig& c) { return c.kernel.family; },
       [](SimConfig& c, const std::string& s) { c.kernel.family = trim(s); }},
      SWL_DOUBLE("kernel", "beta", kernel.beta, "Riesz exponent in (0, min(d, 2))"),
      SWL_DOUBLE("kernel", "kappa", kernel.kappa, "Bessel order, > d - 2"),
      {"kernel", "hurst", "fractional Hurst indices, one per axis, each in (1/2, 1)",
       [](const SimConfig& c) { return show_list(c.kernel.hurst); },
       [](SimConfig& c, const std::string& s) { c.kernel.hurst = to_doubles(s); }},
      SWL_DOUBLE("kernel", "gamma", kernel.gamma, "gamma for the C_mu^(gamma) column; negative selects gamma_max / 2"),

      {"coeff", "family", "linear | superlinear | tabulated",
       [](const SimConfig& c) { return to_string(c.coeff.family); },
       [](SimConfig& c, const std::string& s) { c.coeff.family = coefficient_family_from_string(trim(s)); }},
      SWL_DOUBLE("coeff", "b0", coeff.b0, "linear: b(z) = b0 + lambda z"),
      SWL_DOUBLE("coeff", "lambda", coeff.lambda, "linear drift slope"),
      SWL_DOUBLE("coeff", "s0", coeff.s0, "linear: sigma(z) = s0 + eta z"),
      SWL_DOUBLE("coeff", "eta", coeff.eta, "linear diffusion slope"),
      SWL_DOUBLE("coeff", "theta1", coeff.theta1, "superlinear: b(z) = theta1 + theta2 z ln+(|z|)^delta"),
      SWL_DOUBLE("coeff", "theta2", coeff.theta2, "superlinear drift scale"),
      SWL_DOUBLE("coeff", "delta", coeff.delta, "superlinear drift log power"),
      SWL_DOUBLE("coeff", "sigma1", coeff.sigma1, "superlinear: sigma(z) = sigma1 + sigma2 z ln+(|z|)^a"),
      SWL_DOUBLE("coeff", "sigma2", coeff.sigma2, "superlinear diffusion scale"),
      SWL_DOUBLE("coeff", "a", coeff.a, "superlinear diffusion log power"),
      {"coeff", "table", "tabulated: CSV file with rows z,b,sigma",
       [](const SimConfig& c) { return c.coeff.table_path; },
       [](SimConfig& c, const std::string& s) { c.coeff.table_path = trim(s); }},
      {"coeff", "lip_drift", "declared Lipschitz constant of b (empty: derived or unknown)",
       [](const SimConfig& c) { return show_optional(c.coeff.lip_drift); },
       [](SimConfig& c, const std::string& s) { c.coeff.lip_drift = to_optional(s); }},
      {"coeff", "lip_diffusion", "declared Lipschitz constant of sigma",
       [](const SimConfig& c) { return show_optional(c.coeff.lip_diffusion); },
       [](SimConfig& c, const std::string& s) { c.coeff.lip_diffusion = to_optional(s); }},

      {"init", "family", "zero | trig | bump | weierstrass",
       [](const SimConfig& c) { return to_string(c.init.family); },
       [](SimConfig& c, const std::string& s) { c.init.family = initial_family_from_string(trim(s)); }},
      SWL_DOUBLE("init", "amplitude", init.amplitude, "scale of u0"),
      SWL_DOUBLE("init", "velocity", init.velocity, "scale of v0"),
      SWL_DOUBLE("init", "rho", init.rho, "bump support radius"),
      {"init", "mode", "trig wave number (periods per box)", [](const SimConfig& c) { return fmt::format("{}", c.init.mode); },
       [](SimConfig& c, const std::string& s) { c.init.mode = to_integer<int>(s); }},
      SWL_DOUBLE("init", "holder", init.holder, "Weierstrass Holder exponent of u0"),

      {"mc", "replicas", "number of Monte Carlo paths", [](const SimConfig& c) { return fmt::format("{}", c.mc.replicas); },
       [](SimConfig& c, const std::string& s) { c.mc.replicas = to_integer<std::size_t>(s); }},
      {"mc", "seed", "master seed; every stream is a keyed counter off it",
       [](const SimConfig& c) { return fmt::format("{}", c.mc.seed); },
       [](SimConfig& c, const std::string& s) { c.mc.seed = to_integer<std::uint64_t>(s); }},
      {"mc", "threads", "worker threads (outputs do not depend on it)",
       [](const SimConfig& c) { return fmt::format("{}", c.mc.threads); },
       [](SimConfig& c, const std::string& s) { c.mc.threads = to_integer<unsigned>(s); }},

      SWL_DOUBLE("observation", "radius", observation.radius, "observation ball radius R"),
      {"observation", "output_times", "snapshot times, multiples of dt in [0, T] (empty: T)",
       [](const SimConfig& c) { return show_list(c.observation.output_times); },
       [](SimConfig& c, const std::string& s) { c.observation.output_times = to_doubles(s); }},

      {"blowup", "levels", "truncation ladder N, ascending", [](const SimConfig& c) { return show_list(c.blowup.levels); },
       [](SimConfig& c, const std::string& s) { c.blowup.levels = to_doubles(s); }},
      SWL_DOUBLE("blowup", "confidence", blowup.confidence, "Clopper-Pearson confidence"),

      {"moments", "orders", "moment orders p >= 2", [](const SimConfig& c) { return show_list(c.moments.orders); },
       [](SimConfig& c, const std::string& s) { c.moments.orders = to_doubles(s); }},
      SWL_DOUBLE("moments", "alpha", moments.alpha, "weight exponent in max_t e^(-alpha t) moment^(1/p)"),
      SWL_DOUBLE("moments", "margin", moments.margin, "relative slack on the growth rate 2 p sqrt(L(b))"),
      {"moments", "resamples", "bootstrap resamples", [](const SimConfig& c) { return fmt::format("{}", c.moments.resamples); },
       [](SimConfig& c, const std::string& s) { c.moments.resamples = to_integer<std::size_t>(s); }},

      {"holder", "space_lags", "spatial lags in grid cells (ascending)",
       [](const SimConfig& c) { return show_list(c.holder.space_lags); },
       [](SimConfig& c, const std::string& s) { c.holder.space_lags = to_sizes(s); }},
      {"holder", "time_lags", "temporal lags in time steps (ascending)",
       [](const SimConfig& c) { return show_list(c.holder.time_lags); },
       [](SimConfig& c, const std::string& s) { c.holder.time_lags = to_sizes(s); }},
      SWL_DOUBLE("holder", "order", holder.order, "structure-function order p"),
      SWL_DOUBLE("holder", "margin", holder.margin, "tolerance on the fitted exponent"),
      SWL_DOUBLE("holder", "window", holder.window, "base points restricted to |x| <= window (negative: R)"),

      {"hypcheck", "h4", "evaluate the increment-integral exponents (d >= 2)",
       [](const SimConfig& c) { return c.hypcheck.h4 ? std::string("true") : std::string("false"); },
       [](SimConfig& c, const std::string& s) { c.hypcheck.h4 = to_bool(s); }},
      {"hypcheck", "samples", "Monte Carlo samples per increment integral",
       [](const SimConfig& c) { return fmt::format("{}", c.hypcheck.samples); },
       [](SimConfig& c, const std::string& s) { c.hypcheck.samples = to_integer<std::size_t>(s); }},

      {"greens", "pairings", "include the real-space/spectral pairing checks",
       [](const SimConfig& c) { return c.greens.pairings ? std::string("true") : std::string("false"); },
       [](SimConfig& c, const std::string& s) { c.greens.pairings = to_bool(s); }},
  };
  return fields;
}

#undef SWL_DOUBLE

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : registry())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

bool known_section(const std::string& s) {
  return std::any_of(registry().begin(), registry().end(), [&](const Field& f) { return s == f.section; });
}

std::string write_ini(const SimConfig& c, bool with_docs) {
  std::string out;
  std::string section;
  for (const auto& f : registry()) {
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += fmt::format("[{}]\n", section);
    }
    if (with_docs) out += fmt::format("; {}\n", f.doc);
    out += fmt::format("{} = {}\n", f.key, f.get(c));
  }
  return out;
}

bool is_step_multiple(double t, double dt) {
  const double k = t / dt;
  return std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, k);
}

template <class T>
bool strictly_ascending(const std::vector<T>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) return false;
  return true;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

SimConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({fmt::format("line {}: {}", e.line(), e.message())});
  }
  SimConfig c;
  std::vector<std::string> problems;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      problems.push_back(fmt::format("{}: key outside any section", section));
      continue;
    }
    if (!known_section(section)) {
      problems.push_back(fmt::format("[{}]: unknown section", section));
      continue;
    }
    for (const auto& [key, value] : body) {
      const Field* f = find_field(section, key);
      if (!f) {
        problems.push_back(fmt::format("{}.{}: unknown key", section, key));
        continue;
      }
      try {
        f->set(c, value.data());
      } catch (const std::exception& e) {
        problems.push_back(fmt::format("{}.{}: {}", section, key, e.what()));
      }
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("cannot open config file '{}'", path)});
  return parse_config(in);
}

std::string to_ini(const SimConfig& config) { return write_ini(config, false); }

std::string reference_config() {
  return "; Reference configuration: every key with its default value.\n\n" + write_ini(SimConfig{}, true);
}

KernelSpec kernel_spec(const SimConfig& config) {
  switch (kernel_family_from_string(config.kernel.family)) {
    case KernelFamily::WhiteNoise: return KernelSpec::white_noise();
    case KernelFamily::Riesz: return KernelSpec::riesz(config.grid.dim, config.kernel.beta);
    case KernelFamily::Bessel: return KernelSpec::bessel(config.grid.dim, config.kernel.kappa);
    case KernelFamily::Fractional: return KernelSpec::fractional(config.kernel.hurst);
  }
  throw std::logic_error("kernel_spec: unreachable");
}

Validation validate(const SimConfig& input) {
  Validation out{input, {}};
  SimConfig& c = out.config;
  std::vector<std::string> errors;
  auto& adv = out.advisories;
  auto guard = [&](const char* where, const std::function<void()>& fn) {
    try {
      fn();
      return true;
    } catch (const std::exception& e) {
      errors.push_back(fmt::format("{}: {}", where, e.what()));
      return false;
    }
  };

  const bool grid_ok = guard("grid", [&] { c.grid.validate(); });

  KernelSpec spec;
  bool kernel_ok = guard("kernel", [&] {
    spec = kernel_spec(c);
    c.kernel.family = to_string(spec.family);
  });
  if (kernel_ok && spec.dim != c.grid.dim) {
    errors.push_back(fmt::format("kernel: {} kernel has dimension {} but grid.dim = {}", c.kernel.family, spec.dim,
                                 c.grid.dim));
    kernel_ok = false;
  }

  CoefficientPair pair;
  const bool coeff_ok = guard("coeff", [&] { pair = make_coefficients(c.coeff); });

  InitialData init;
  const bool init_ok =
      grid_ok && guard("init", [&] { init = make_initial_data(c.init, c.grid.dim, c.grid.L, c.grid.n); });

  // Observation geometry.
  if (!(c.observation.radius > 0.0)) errors.push_back("observation.radius: must be positive");
  if (grid_ok) {
    auto& times = c.observation.output_times;
    if (times.empty()) times.push_back(c.grid.T);
    for (double& t : times) {
      if (!(t >= 0.0 && t <= c.grid.T * (1.0 + 1e-12)) || !is_step_multiple(t, c.grid.dt)) {
        errors.push_back(fmt::format("observation.output_times: {} is not a multiple of dt in [0, T]", t));
      } else {
        t = std::round(t / c.grid.dt) * c.grid.dt;
      }
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    const double reach = c.observation.radius + c.grid.T;
    if (c.grid.L < 2.0 * reach) {
      errors.push_back(fmt::format("grid.L: L = {} is below 2(R + T) = {}; the light cone of the observation ball "
                                   "would wrap around the periodic box",
                                   c.grid.L, 2.0 * reach));
    } else if (c.grid.L < 4.0 * reach) {
      adv.push_back(fmt::format("grid.L = {} is below 4(R + T) = {}: data outside the ball can reach it through the "
                                "periodic images",
                                c.grid.L, 4.0 * reach));
    }
  }

  if (c.mc.replicas < 1) errors.push_back("mc.replicas: must be at least 1");
  if (c.mc.threads < 1) errors.push_back("mc.threads: must be at least 1");

  auto& levels = c.blowup.levels;
  std::sort(levels.begin(), levels.end());
  if (levels.empty()) errors.push_back("blowup.levels: ladder is empty");
  if (!levels.empty() && !(levels.front() > 0.0)) errors.push_back("blowup.levels: levels must be positive");
  if (!strictly_ascending(levels)) errors.push_back("blowup.levels: duplicate levels");
  if (!(c.blowup.confidence > 0.0 && c.blowup.confidence < 1.0))
    errors.push_back("blowup.confidence: must lie in (0, 1)");

  auto& orders = c.moments.orders;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  if (orders.empty()) errors.push_back("moments.orders: list is empty");
  for (double p : orders)
    if (!(p >= 2.0)) errors.push_back(fmt::format("moments.orders: p = {} is below 2", p));
  if (!(c.moments.alpha >= 0.0)) errors.push_back("moments.alpha: must be non-negative");
  if (!(c.moments.margin >= 0.0)) errors.push_back("moments.margin: must be non-negative");
  if (c.moments.resamples < 10) errors.push_back("moments.resamples: need at least 10");

  auto check_lags = [&](std::vector<std::size_t>& lags, const char* name) {
    std::sort(lags.begin(), lags.end());
    lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
    if (lags.size() < 5) errors.push_back(fmt::format("holder.{}: need at least 5 distinct lags", name));
    if (!lags.empty() && lags.front() == 0) errors.push_back(fmt::format("holder.{}: lags must be positive", name));
  };
  check_lags(c.holder.space_lags, "space_lags");
  check_lags(c.holder.time_lags, "time_lags");
  if (!(c.holder.order > 0.0)) errors.push_back("holder.order: must be positive");
  if (!(c.holder.margin > 0.0)) errors.push_back("holder.margin: must be positive");
  if (c.holder.window < 0.0) c.holder.window = c.observation.radius;

  if (c.hypcheck.samples < 1000) errors.push_back("hypcheck.samples: need at least 1000");

  // Advisory report on which existence results cover the coefficients.
  if (coeff_ok && kernel_ok && init_ok) {
    switch (pair.family) {
      case CoefficientFamily::Linear:
        adv.push_back(fmt::format("coefficients are globally Lipschitz (L(b) = {}, L(sigma) = {}): global existence "
                                  "without truncation; the moment growth envelope applies",
                                  std::abs(c.coeff.lambda), std::abs(c.coeff.eta)));
        break;
      case CoefficientFamily::Tabulated:
        if (!pair.lip_drift || !pair.lip_diffusion)
          adv.push_back("tabulated coefficients without declared Lipschitz constants: growth envelope unavailable");
        break;
      case CoefficientFamily::Superlinear: {
        guard("coeff", [&] {
          DominationInput in;
          in.dim = c.grid.dim;
          in.gamma = std::min(init.gamma1, 0.5);
          in.levels = levels;
          if (c.grid.dim >= 2) {
            in.c_mu = compute_analytics(spec).c_mu;
            const auto table = hyp::critical_exponent_table(spec, init.gamma1, init.gamma2);
            in.nu1 = table.nu1;
            in.nu2 = table.nu2;
          }
          const auto r = check_domination(pair, in);
          adv.push_back(r.message);
          adv.push_back(r.theorem_message);
          for (const auto& iv : r.intervals)
            if (iv.empty()) adv.push_back(fmt::format("level N = {}: no admissible moment order", iv.level));
        });
        break;
      }
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return out;
}

void check_holder_lags(const SimConfig& c) {
  std::vector<std::string> errors;
  if (!c.holder.space_lags.empty() && c.holder.space_lags.back() > c.grid.n / 2)
    errors.push_back(fmt::format("holder.space_lags: largest lag {} exceeds n / 2 = {} cells",
                                 c.holder.space_lags.back(), c.grid.n / 2));
  if (!c.holder.time_lags.empty() && c.holder.time_lags.back() > c.grid.steps())
    errors.push_back(fmt::format("holder.time_lags: largest lag {} exceeds T / dt = {} steps",
                                 c.holder.time_lags.back(), c.grid.steps()));
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

SolverSetup make_setup(const SimConfig& config) {
  SolverSetup s;
  s.grid = config.grid;
  s.kernel = kernel_spec(config);
  s.coeff = make_coefficients(config.coeff);
  s.init = make_initial_data(config.init, config.grid.dim, config.grid.L, config.grid.n);
  s.radius = config.observation.radius;
  s.output_times = config.observation.output_times;
  if (s.output_times.empty()) s.output_times = {config.grid.T};
  s.levels = config.blowup.levels;
  return s;
}

}  // namespace swl::cfg
