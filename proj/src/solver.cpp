#include "swl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <gsl/gsl_cdf.h>

#include "swl/fft.hpp"

namespace swl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t output_step(const GridSpec& g, double t) {
  const double r = t / g.dt;
  const auto k = static_cast<long long>(std::llround(r));
  if (k < 0 || std::abs(r - static_cast<double>(k)) > 1e-9 * std::max(1.0, r) ||
      static_cast<std::size_t>(k) > g.steps())
    throw std::invalid_argument(fmt::format("solver: output time {} is not a step time in [0, T]", t));
  return static_cast<std::size_t>(k);
}

double sup_over(std::span<const double> u, const std::vector<std::size_t>& idx) {
  double m = 0.0;
  for (std::size_t i : idx) m = std::max(m, std::abs(u[i]));
  return m;
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot: truncated stream");
  return v;
}

constexpr char kSnapMagic[8] = {'S', 'W', 'L', 'S', 'N', 'A', 'P', '1'};

}  // namespace

BlowupSignal::BlowupSignal(std::size_t s, double time)
    : std::runtime_error(fmt::format("non-finite state at step {} (t={})", s, time)), step(s), t(time) {}

BlowupMonitor::BlowupMonitor(std::vector<double> lv, double r, double horizon_)
    : levels(std::move(lv)), radius(r), horizon(horizon_), tau(levels.size(), horizon_), hit(levels.size(), 0) {
  if (!std::is_sorted(levels.begin(), levels.end())) throw std::invalid_argument("monitor: levels must ascend");
}

void BlowupMonitor::observe(double t, double sup_abs) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (hit[i]) continue;
    if (sup_abs >= levels[i]) {
      hit[i] = 1;
      tau[i] = t;
    } else {
      break;  // higher levels cannot be reached either
    }
  }
}

void BlowupMonitor::mark_all(double t) {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (!hit[i]) {
      hit[i] = 1;
      tau[i] = t;
    }
}

bool BlowupMonitor::all_hit() const {
  return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
}

std::vector<double> sample_field(const GridSpec& grid, const FieldFn& f) {
  const std::size_t N = grid.points();
  std::vector<double> out(N);
  double x[3];
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t r = i;
    for (int a = grid.dim - 1; a >= 0; --a) {
      x[a] = grid.coordinate(r % grid.n);
      r /= grid.n;
    }
    out[i] = f(std::span<const double>(x, grid.dim));
  }
  return out;
}

std::vector<std::size_t> ball_indices(const GridSpec& grid, double radius) {
  std::vector<std::size_t> idx;
  const std::size_t N = grid.points();
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t r = i;
    double s = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const double x = grid.coordinate(r % grid.n);
      s += x * x;
      r /= grid.n;
    }
    if (s <= radius * radius * (1.0 + 1e-12)) idx.push_back(i);
  }
  return idx;
}

// ---------------------------------------------------------------- Stepper

Stepper::Stepper(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  fft_ = std::make_unique<RealFft>(grid.dim, grid.n);
  const std::size_t ns = fft_->spectral_size();
  uh_.assign(ns, 0.0);
  vh_.assign(ns, 0.0);
  cos_.resize(ns);
  sinc_.resize(ns);
  wsin_.resize(ns);
  omega_.resize(ns);
  weight_.resize(ns);
  const double h = grid.dt;
  const std::size_t last = grid.n / 2 + 1;
  for (std::size_t i = 0; i < ns; ++i) {
    int k[3] = {0, 0, 0};
    fft_->wavenumbers(i, k);
    double w2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const double z = kTwoPi * k[a] / grid.L;
      w2 += z * z;
    }
    const double w = std::sqrt(w2);
    omega_[i] = w;
    cos_[i] = std::cos(h * w);
    sinc_[i] = w == 0.0 ? h : std::sin(h * w) / w;
    wsin_[i] = w * std::sin(h * w);
    const std::size_t kl = i % last;
    weight_[i] = (kl == 0 || kl == grid.n / 2) ? 1.0 : 2.0;
  }
  u_.assign(grid.points(), 0.0);
}

Stepper::~Stepper() = default;

void Stepper::set_state(std::span<const double> u, std::span<const double> v, double t) {
  const std::size_t N = grid_.points();
  if (u.size() != N || v.size() != N) throw std::invalid_argument("stepper: state size mismatch");
  auto re = fft_->real();
  auto sp = fft_->spectrum();
  std::copy(u.begin(), u.end(), re.begin());
  fft_->forward();
  std::copy(sp.begin(), sp.end(), uh_.begin());
  std::copy(v.begin(), v.end(), re.begin());
  fft_->forward();
  std::copy(sp.begin(), sp.end(), vh_.begin());
  std::copy(u.begin(), u.end(), u_.begin());
  t_ = start_ = t;
  steps_ = 0;
}

void Stepper::refresh_u() {
  auto sp = fft_->spectrum();
  std::copy(uh_.begin(), uh_.end(), sp.begin());
  fft_->backward();
  const double inv = 1.0 / static_cast<double>(grid_.points());
  auto re = fft_->real();
  bool finite = true;
  for (std::size_t i = 0; i < u_.size(); ++i) {
    u_[i] = re[i] * inv;
    finite = finite && std::isfinite(u_[i]);
  }
  if (!finite) throw BlowupSignal(steps_, t_);
}

void Stepper::step(const CoefficientPair& coeff, std::span<const double> noise) {
  const std::size_t N = grid_.points();
  if (noise.size() != N) throw std::invalid_argument("stepper: noise size mismatch");
  const double h = grid_.dt;
  auto re = fft_->real();
  for (std::size_t i = 0; i < N; ++i) re[i] = coeff.drift(u_[i]) * h + coeff.diffusion(u_[i]) * noise[i];
  fft_->forward();
  auto F = fft_->spectrum();
  for (std::size_t k = 0; k < uh_.size(); ++k) {
    const auto u = uh_[k], v = vh_[k];
    uh_[k] = cos_[k] * u + sinc_[k] * (v + F[k]);
    vh_[k] = -wsin_[k] * u + cos_[k] * (v + F[k]);
  }
  ++steps_;
  t_ = start_ + static_cast<double>(steps_) * h;
  refresh_u();
}

std::vector<double> Stepper::velocity() {
  auto sp = fft_->spectrum();
  std::copy(vh_.begin(), vh_.end(), sp.begin());
  fft_->backward();
  const double inv = 1.0 / static_cast<double>(grid_.points());
  auto re = fft_->real();
  std::vector<double> v(re.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = re[i] * inv;
  return v;
}

double Stepper::energy() const {
  double e = 0.0;
  for (std::size_t k = 0; k < uh_.size(); ++k)
    e += weight_[k] * (std::norm(vh_[k]) + omega_[k] * omega_[k] * std::norm(uh_[k]));
  const double N = static_cast<double>(grid_.points());
  return 0.5 * e * std::pow(grid_.dx(), grid_.dim) / N;
}

StateSnapshot step(const StateSnapshot& state, const CoefficientPair& coeff, const NoiseIncrement& noise) {
  Stepper s(noise.grid);
  std::vector<double> v = state.v.empty() ? std::vector<double>(state.u.size(), 0.0) : state.v;
  s.set_state(state.u, v, state.t);
  s.step(coeff, noise.values);
  StateSnapshot out;
  out.t = state.t + noise.grid.dt;
  out.u.assign(s.u().begin(), s.u().end());
  out.v = s.velocity();
  return out;
}

// ---------------------------------------------------------------- paths

PathResult run_path(const SolverSetup& setup, std::uint64_t seed, std::uint32_t path, const NoiseProvider& provider) {
  const GridSpec& g = setup.grid;
  g.validate();
  const std::size_t nsteps = g.steps();
  std::vector<std::size_t> out_steps;
  for (double t : setup.output_times) out_steps.push_back(output_step(g, t));

  PathResult res;
  res.seed = seed;
  res.path = path;
  res.monitor = BlowupMonitor(setup.levels, setup.radius, g.T);
  const auto ball = ball_indices(g, setup.radius);

  Stepper stepper(g);
  stepper.set_state(sample_field(g, setup.init.u0), sample_field(g, setup.init.v0));
  std::unique_ptr<NoiseSampler> sampler;
  if (!provider) sampler = std::make_unique<NoiseSampler>(g, setup.kernel);
  std::vector<double> noise(g.points());

  auto record = [&](std::size_t k) {
    for (std::size_t j = 0; j < out_steps.size(); ++j) {
      if (out_steps[j] != k) continue;
      StateSnapshot s;
      s.t = static_cast<double>(k) * g.dt;
      s.u.assign(stepper.u().begin(), stepper.u().end());
      if (setup.keep_velocity) s.v = stepper.velocity();
      res.snapshots.push_back(std::move(s));
    }
  };

  double sup = sup_over(stepper.u(), ball);
  res.max_abs = sup;
  res.monitor.observe(0.0, sup);
  record(0);
  for (std::size_t k = 0; k < nsteps; ++k) {
    if (setup.stop_when_all_hit && !setup.levels.empty() && res.monitor.all_hit()) break;
    if (provider)
      provider(k, noise);
    else
      sampler->sample({seed, path, static_cast<std::uint32_t>(k), Stream::SpaceTimeNoise}, noise);
    try {
      stepper.step(setup.coeff, noise);
    } catch (const BlowupSignal& b) {
      res.non_finite = true;
      res.steps_taken = k + 1;
      res.max_abs = std::numeric_limits<double>::infinity();
      res.monitor.mark_all(static_cast<double>(k + 1) * g.dt);
      return res;
    }
    res.steps_taken = k + 1;
    const double t = static_cast<double>(k + 1) * g.dt;
    sup = sup_over(stepper.u(), ball);
    res.max_abs = std::max(res.max_abs, sup);
    res.monitor.observe(t, sup);
    record(k + 1);
  }
  return res;
}

void run_paths(const SolverSetup& setup, std::uint64_t seed, std::uint32_t first, std::uint32_t count,
               unsigned threads, const std::function<void(PathResult&&)>& consume) {
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::uint32_t p = first; p < first + count; ++p) consume(run_path(setup, seed, p));
    return;
  }
  std::vector<PathResult> batch(threads);
  for (std::uint32_t base = first; base < first + count; base += threads) {
    const std::uint32_t m = std::min<std::uint32_t>(threads, first + count - base);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(m);
    for (std::uint32_t i = 0; i < m; ++i)
      pool.emplace_back([&, i] {
        try {
          batch[i] = run_path(setup, seed, base + i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (std::uint32_t i = 0; i < m; ++i) consume(std::move(batch[i]));
  }
}

// ---------------------------------------------------------------- Picard

namespace {

// Integral over [a, b] of the periodic piecewise-constant function whose cell
// j is [x_j - dx/2, x_j + dx/2); prefix[j] is the integral over cells < j.
struct CellIntegral {
  const double* values;
  const double* prefix;
  std::size_t n;
  double dx, origin, total;

  double primitive(double y) const {
    const double p = (y - origin) / dx;
    const double c = std::floor(p);
    const auto ci = static_cast<long long>(c);
    const long long nn = static_cast<long long>(n);
    long long wraps = ci >= 0 ? ci / nn : -((-ci + nn - 1) / nn);
    const auto j = static_cast<std::size_t>(ci - wraps * nn);
    return static_cast<double>(wraps) * total + prefix[j] + (p - c) * dx * values[j];
  }
  double operator()(double a, double b) const { return primitive(b) - primitive(a); }
};

}  // namespace

PicardResult picard_solve(const SolverSetup& setup, std::uint64_t seed, std::size_t iterations,
                          const NoiseProvider& provider) {
  const GridSpec& g = setup.grid;
  g.validate();
  if (g.dim != 1) throw std::invalid_argument("picard_solve: d = 1 only");
  const std::size_t n = g.n, steps = g.steps();
  if (n > kPicardMaxPoints || steps > kPicardMaxSteps)
    throw std::invalid_argument(fmt::format("picard_solve: grid {}x{} exceeds the {}x{} cap", n, steps,
                                            kPicardMaxPoints, kPicardMaxSteps));
  const double h = g.dt, dx = g.dx();

  std::vector<double> noise(steps * n);
  {
    std::unique_ptr<NoiseSampler> sampler;
    if (!provider) sampler = std::make_unique<NoiseSampler>(g, setup.kernel);
    for (std::size_t m = 0; m < steps; ++m) {
      std::span<double> out(noise.data() + m * n, n);
      if (provider)
        provider(m, out);
      else
        sampler->sample({seed, 0, static_cast<std::uint32_t>(m), Stream::SpaceTimeNoise}, out);
    }
  }

  std::vector<double> base((steps + 1) * n);
  for (std::size_t k = 0; k <= steps; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const double x[1] = {g.coordinate(j)};
      base[k * n + j] = initial_term(setup.init, 1, static_cast<double>(k) * h, x);
    }

  PicardResult res;
  res.n = n;
  res.steps = steps;
  res.iterates.push_back(base);
  std::vector<double> f(n), prefix(n + 1);
  std::vector<double> forcing(steps * n), prefixes(steps * (n + 1)), totals(steps);
  for (std::size_t it = 0; it < iterations; ++it) {
    const auto& prev = res.iterates.back();
    for (std::size_t m = 0; m < steps; ++m) {
      // Trapezoid weights in s: the endpoint s = t_k carries G(0) = 0.
      const double w = m == 0 ? 0.5 * h : h;
      double* fm = forcing.data() + m * n;
      double* pm = prefixes.data() + m * (n + 1);
      pm[0] = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double u = prev[m * n + j];
        fm[j] = w * setup.coeff.drift(u) + setup.coeff.diffusion(u) * noise[m * n + j];
        pm[j + 1] = pm[j] + fm[j] * dx;
      }
      totals[m] = pm[n];
    }
    std::vector<double> next(base);
    for (std::size_t k = 1; k <= steps; ++k) {
      for (std::size_t m = 0; m < k; ++m) {
        const CellIntegral I{forcing.data() + m * n, prefixes.data() + m * (n + 1), n, dx,
                             g.coordinate(0) - 0.5 * dx, totals[m]};
        const double tau = static_cast<double>(k - m) * h;
        for (std::size_t j = 0; j < n; ++j) {
          const double x = g.coordinate(j);
          next[k * n + j] += 0.5 * I(x - tau, x + tau);
        }
      }
    }
    double inc = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) inc = std::max(inc, std::abs(next[i] - prev[i]));
    res.increments.push_back(inc);
    res.iterates.push_back(std::move(next));
  }
  return res;
}

// ---------------------------------------------------------------- blow-up ladder

std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) return {0.0, 1.0};
  const double alpha = 1.0 - confidence;
  const double kk = static_cast<double>(k), nn = static_cast<double>(n);
  const double lo = k == 0 ? 0.0 : gsl_cdf_beta_Pinv(0.5 * alpha, kk, nn - kk + 1.0);
  const double hi = k == n ? 1.0 : gsl_cdf_beta_Pinv(1.0 - 0.5 * alpha, kk + 1.0, nn - kk);
  return {lo, hi};
}

BlowupTable blowup_experiment(const SolverSetup& setup, const std::vector<double>& levels, std::size_t replicas,
                              std::uint64_t seed, unsigned threads, double confidence) {
  if (levels.empty() || !std::is_sorted(levels.begin(), levels.end()))
    throw std::invalid_argument("blowup_experiment: levels must be a nonempty ascending list");
  BlowupTable table;
  table.tau.assign(replicas, std::vector<double>(levels.size(), setup.grid.T));
  table.hit.assign(replicas, std::vector<char>(levels.size(), 0));
  for (std::size_t li = 0; li < levels.size(); ++li) {
    SolverSetup s = setup;
    s.coeff = truncate(setup.coeff, levels[li]);
    s.levels = {levels[li]};
    s.stop_when_all_hit = true;
    s.output_times.clear();
    run_paths(s, seed, 0, static_cast<std::uint32_t>(replicas), threads, [&](PathResult&& r) {
      table.tau[r.path][li] = r.monitor.tau[0];
      table.hit[r.path][li] = r.monitor.hit[0];
    });
    BlowupRow row;
    row.level = levels[li];
    row.replicas = replicas;
    for (std::size_t p = 0; p < replicas; ++p) row.hits += table.hit[p][li] ? 1 : 0;
    row.p_hat = replicas ? static_cast<double>(row.hits) / static_cast<double>(replicas) : 0.0;
    std::tie(row.ci_lo, row.ci_hi) = clopper_pearson(row.hits, replicas, confidence);
    table.rows.push_back(row);
  }
  for (std::size_t p = 0; p < replicas; ++p)
    for (std::size_t li = 1; li < levels.size(); ++li)
      if (table.tau[p][li] < table.tau[p][li - 1]) table.per_path_monotone = false;
  return table;
}

// ---------------------------------------------------------------- snapshots

void write_snapshot(std::ostream& os, const SnapshotHeader& h, const StateSnapshot& s) {
  os.write(kSnapMagic, sizeof kSnapMagic);
  put<std::int32_t>(os, h.dim);
  put<std::uint64_t>(os, h.n);
  put<double>(os, h.L);
  put<double>(os, h.dt);
  put<double>(os, s.t);
  put<std::uint64_t>(os, h.seed);
  put<std::uint32_t>(os, h.path);
  put<std::uint8_t>(os, s.v.empty() ? 0 : 1);
  put<std::uint64_t>(os, s.u.size());
  os.write(reinterpret_cast<const char*>(s.u.data()), static_cast<std::streamsize>(s.u.size() * sizeof(double)));
  if (!s.v.empty())
    os.write(reinterpret_cast<const char*>(s.v.data()), static_cast<std::streamsize>(s.v.size() * sizeof(double)));
}

StateSnapshot read_snapshot(std::istream& is, SnapshotHeader& h) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kSnapMagic, sizeof magic) != 0) throw std::runtime_error("snapshot: bad magic");
  h.dim = get<std::int32_t>(is);
  h.n = get<std::uint64_t>(is);
  h.L = get<double>(is);
  h.dt = get<double>(is);
  StateSnapshot s;
  s.t = get<double>(is);
  h.t = s.t;
  h.seed = get<std::uint64_t>(is);
  h.path = get<std::uint32_t>(is);
  const bool has_v = get<std::uint8_t>(is) != 0;
  const auto count = get<std::uint64_t>(is);
  s.u.resize(count);
  is.read(reinterpret_cast<char*>(s.u.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (has_v) {
    s.v.resize(count);
    is.read(reinterpret_cast<char*>(s.v.data()), static_cast<std::streamsize>(count * sizeof(double)));
  }
  if (!is) throw std::runtime_error("snapshot: truncated payload");
  return s;
}

}  // namespace swl
