#include "swl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <gsl/gsl_cdf.h>
#include <gsl/gsl_fft_complex.h>

#include "swl/rng.hpp"

namespace swl::stats {
namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double w = pos - static_cast<double>(i);
  return i + 1 < v.size() ? (1.0 - w) * v[i] + w * v[i + 1] : v[i];
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// sup over points of the mean per time, and the point attaining it.
void sup_of_means(const std::vector<double>& sums, std::size_t times, std::size_t points, double count,
                  std::vector<double>& sup, std::vector<std::size_t>* arg) {
  sup.assign(times, 0.0);
  if (arg) arg->assign(times, 0);
  for (std::size_t i = 0; i < times; ++i)
    for (std::size_t j = 0; j < points; ++j) {
      const double m = sums[i * points + j] / count;
      if (m > sup[i] || j == 0) {
        sup[i] = m;
        if (arg) (*arg)[i] = j;
      }
    }
}

double seminorm(const std::vector<double>& sup, const std::vector<double>& times, double alpha, double p) {
  double n = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) n = std::max(n, std::exp(-alpha * times[i]) * std::pow(sup[i], 1.0 / p));
  return n;
}

}  // namespace

// ---------------------------------------------------------------- moments

MomentAccumulator::MomentAccumulator(double p, std::vector<double> times, std::size_t points)
    : p_(p), times_(std::move(times)), points_(points) {
  if (!(p >= 1.0)) throw std::invalid_argument("moments: p must be >= 1");
}

void MomentAccumulator::add(std::uint32_t path, std::span<const double> values) {
  if (values.size() != times_.size() * points_) throw std::invalid_argument("moments: row size mismatch");
  if (!rows_.emplace(path, std::vector<double>(values.begin(), values.end())).second)
    throw std::invalid_argument(fmt::format("moments: path {} added twice", path));
}

void MomentAccumulator::add(const PathResult& r, const std::vector<std::size_t>& points) {
  if (r.snapshots.size() != times_.size()) throw std::invalid_argument("moments: snapshot count mismatch");
  if (points.size() != points_) throw std::invalid_argument("moments: point count mismatch");
  std::vector<double> row(times_.size() * points_);
  for (std::size_t i = 0; i < times_.size(); ++i)
    for (std::size_t j = 0; j < points_; ++j) row[i * points_ + j] = std::pow(std::abs(r.snapshots[i].u[points[j]]), p_);
  add(r.path, row);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.p_ != p_ || other.times_ != times_ || other.points_ != points_)
    throw std::invalid_argument("moments: merging incompatible accumulators");
  for (const auto& [path, row] : other.rows_) add(path, row);
}

MomentReport estimate_moments(const MomentAccumulator& acc, double alpha, const BootstrapOptions& opts) {
  if (acc.paths() < kMinMomentPaths)
    throw std::invalid_argument(fmt::format("moments: {} paths, need at least {}", acc.paths(), kMinMomentPaths));
  if (!(acc.p() >= 2.0)) throw std::invalid_argument("moments: p must be >= 2");
  const std::size_t nt = acc.times().size(), np = acc.points(), P = acc.paths();
  std::vector<const std::vector<double>*> rows;
  for (const auto& kv : acc.rows()) rows.push_back(&kv.second);

  MomentReport rep;
  rep.p = acc.p();
  rep.alpha = alpha;
  rep.paths = P;
  rep.times = acc.times();

  std::vector<double> sums(nt * np, 0.0);
  for (const auto* r : rows)
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += (*r)[i];
  std::vector<double> sup;
  sup_of_means(sums, nt, np, static_cast<double>(P), sup, &rep.argmax);
  const double nap = seminorm(sup, rep.times, alpha, rep.p);

  std::vector<std::vector<double>> boot_sup(nt);
  std::vector<double> boot_n;
  CounterRng rng({opts.seed, 0, 0, Stream::Bootstrap});
  std::vector<double> bs(nt * np), bsup;
  for (std::size_t b = 0; b < opts.resamples; ++b) {
    std::fill(bs.begin(), bs.end(), 0.0);
    for (std::size_t k = 0; k < P; ++k) {
      const auto pick = std::min<std::size_t>(P - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(P)));
      const auto& r = *rows[pick];
      for (std::size_t i = 0; i < bs.size(); ++i) bs[i] += r[i];
    }
    sup_of_means(bs, nt, np, static_cast<double>(P), bsup, nullptr);
    for (std::size_t i = 0; i < nt; ++i) boot_sup[i].push_back(bsup[i]);
    boot_n.push_back(seminorm(bsup, rep.times, alpha, rep.p));
  }
  const double lo = 0.5 * (1.0 - opts.confidence), hi = 1.0 - lo;
  for (std::size_t i = 0; i < nt; ++i)
    rep.sup_moment.push_back({sup[i], stddev(boot_sup[i]), quantile(boot_sup[i], lo), quantile(boot_sup[i], hi)});
  rep.n_alpha_p = {nap, stddev(boot_n), quantile(boot_n, lo), quantile(boot_n, hi)};
  return rep;
}

GrowthVerdict check_growth_envelope(MomentReport& report, const GrowthInput& in) {
  GrowthVerdict v;
  const double p = report.p;
  v.rate = 2.0 * p * std::sqrt(in.lip_drift);
  v.limit = v.rate * (1.0 + in.margin);
  report.envelope = {in.c_drift, in.c_diffusion, in.lip_drift, in.lip_diffusion, v.rate};

  const double s2 = in.lip_diffusion * in.lip_diffusion;
  const double need = in.dim == 1 ? 8.0 * s2
                                  : std::max(4096.0 * 9.0 * in.c_mu * in.c_mu * s2 * s2, 0.25);
  if (in.lip_drift < need) {
    v.refused = true;
    v.message = fmt::format("L(b)={} below the required {} for the moment bound", in.lip_drift, need);
    return v;
  }
  v.admissible = moment_interval(in.dim, in.lip_drift, in.lip_diffusion, in.c_mu);
  if (p < v.admissible.lo || p > v.admissible.hi) {
    v.refused = true;
    v.message = fmt::format("p={} outside the admissible interval [{}, {}]", p, v.admissible.lo, v.admissible.hi);
    return v;
  }
  const double T = report.times.empty() ? 0.0 : *std::max_element(report.times.begin(), report.times.end());
  std::vector<double> x, y;
  bool all_zero = true;
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    const double t = report.times[i], m = report.sup_moment[i].value;
    if (t < 0.25 * T - 1e-12) continue;
    if (m > 0.0) {
      all_zero = false;
      x.push_back(t);
      y.push_back(std::log(m));
    }
  }
  if (all_zero) {
    v.slope = 0.0;
  } else {
    if (x.size() < 2) throw std::invalid_argument("growth envelope: need at least two output times in [T/4, T]");
    const auto f = fit_line(x, y);
    v.slope = f.slope;
    v.slope_error = f.slope_error;
  }
  v.pass = v.slope <= v.limit;
  v.message = fmt::format("slope {:.4g} vs envelope 2p sqrt(L(b)) = {:.4g} (limit {:.4g}): {}", v.slope, v.rate,
                          v.limit, v.pass ? "PASS" : "FAIL");
  return v;
}

// ---------------------------------------------------------------- structure functions

std::string to_string(Direction d) { return d == Direction::Space ? "space" : "time"; }

namespace {

std::vector<char> window_mask(const GridSpec& g, double window) {
  const std::size_t N = g.points();
  std::vector<char> mask(N, 1);
  if (window <= 0.0) return mask;
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t r = i;
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double x = g.coordinate(r % g.n);
      s += x * x;
      r /= g.n;
    }
    mask[i] = s <= window * window;
  }
  return mask;
}

}  // namespace

std::vector<double> spatial_structure(const GridSpec& g, std::span<const double> u, const std::vector<std::size_t>& lags,
                                      double p, double window) {
  const std::size_t N = g.points(), n = g.n;
  if (u.size() != N) throw std::invalid_argument("structure: field size mismatch");
  const auto mask = window_mask(g, window);
  std::vector<double> out;
  for (std::size_t h : lags) {
    if (h == 0 || h >= n) throw std::invalid_argument("structure: lag out of range");
    double s = 0.0;
    std::size_t count = 0;
    std::size_t stride = 1;
    for (int a = g.dim - 1; a >= 0; --a, stride *= n) {
      for (std::size_t i = 0; i < N; ++i) {
        if (!mask[i]) continue;
        const std::size_t coord = (i / stride) % n;
        const std::size_t j = i - coord * stride + ((coord + h) % n) * stride;
        s += std::pow(std::abs(u[j] - u[i]), p);
        ++count;
      }
    }
    out.push_back(count ? s / static_cast<double>(count) : 0.0);
  }
  return out;
}

std::vector<double> temporal_structure(const GridSpec& g, std::span<const double> base,
                                       const std::vector<std::span<const double>>& shifted, double p, double window) {
  const auto mask = window_mask(g, window);
  std::vector<double> out;
  for (const auto& s : shifted) {
    if (s.size() != base.size()) throw std::invalid_argument("structure: field size mismatch");
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (!mask[i]) continue;
      acc += std::pow(std::abs(s[i] - base[i]), p);
      ++count;
    }
    out.push_back(count ? acc / static_cast<double>(count) : 0.0);
  }
  return out;
}

void StructureAccumulator::add(std::uint32_t path, std::vector<double> values) {
  if (values.size() != lags_) throw std::invalid_argument("structure: lag count mismatch");
  if (!rows_.emplace(path, std::move(values)).second)
    throw std::invalid_argument(fmt::format("structure: path {} added twice", path));
}

void StructureAccumulator::merge(const StructureAccumulator& other) {
  if (other.lags_ != lags_) throw std::invalid_argument("structure: merging incompatible accumulators");
  for (const auto& [path, row] : other.rows_) add(path, row);
}

std::vector<double> StructureAccumulator::mean() const {
  std::vector<double> m(lags_, 0.0);
  for (const auto& kv : rows_)
    for (std::size_t i = 0; i < lags_; ++i) m[i] += kv.second[i];
  for (double& v : m) v /= static_cast<double>(std::max<std::size_t>(1, rows_.size()));
  return m;
}

std::vector<double> StructureAccumulator::std_error() const {
  const auto m = mean();
  std::vector<double> s(lags_, 0.0);
  const double P = static_cast<double>(rows_.size());
  if (rows_.size() < 2) return s;
  for (const auto& kv : rows_)
    for (std::size_t i = 0; i < lags_; ++i) s[i] += (kv.second[i] - m[i]) * (kv.second[i] - m[i]);
  for (double& v : s) v = std::sqrt(v / (P - 1.0) / P);
  return s;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, double confidence) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_error = std::sqrt(rss / (n - 2.0) / sxx);
    const double q = gsl_cdf_tdist_Pinv(0.5 + 0.5 * confidence, n - 2.0);
    f.ci_lo = f.slope - q * f.slope_error;
    f.ci_hi = f.slope + q * f.slope_error;
  } else {
    f.slope_error = std::numeric_limits<double>::infinity();
    f.ci_lo = -f.slope_error;
    f.ci_hi = f.slope_error;
  }
  return f;
}

HolderReport estimate_holder(const StructureAccumulator& acc, const std::vector<double>& lags, Direction direction,
                             const HolderOptions& opts) {
  if (acc.paths() < opts.min_paths)
    throw std::invalid_argument(fmt::format("holder: {} paths, need at least {}", acc.paths(), opts.min_paths));
  if (lags.size() != acc.lags()) throw std::invalid_argument("holder: lag count mismatch");
  if (!std::is_sorted(lags.begin(), lags.end())) throw std::invalid_argument("holder: lags must ascend");
  HolderReport rep;
  rep.direction = direction;
  rep.lags = lags;
  rep.structure = acc.mean();
  rep.structure_error = acc.std_error();
  rep.target = opts.target;
  rep.margin = opts.margin;
  rep.paths = acc.paths();
  rep.used.assign(lags.size(), 1);
  if (opts.drop_smallest && !lags.empty()) rep.used[0] = 0;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!rep.used[i]) continue;
    if (!(rep.structure[i] > 0.0)) throw std::invalid_argument("holder: vanishing structure function");
    x.push_back(std::log(lags[i]));
    y.push_back(std::log(rep.structure[i]));
  }
  if (x.size() < 4 || x.back() - x.front() < std::log(4.0) - 1e-12)
    throw std::invalid_argument("holder: lag range too narrow (need >= 4 lags over >= 2 octaves)");
  const auto f = fit_line(x, y, opts.confidence);
  rep.exponent = f.slope / opts.p;
  rep.ci_lo = f.ci_lo / opts.p;
  rep.ci_hi = f.ci_hi / opts.p;
  rep.pass = opts.one_sided ? rep.exponent >= opts.target - opts.margin
                            : std::abs(rep.exponent - opts.target) <= opts.margin;
  return rep;
}

HolderReport joint_exponent(const HolderReport& space, const HolderReport& time) {
  HolderReport r = space.exponent <= time.exponent ? space : time;
  r.pass = space.pass && time.pass;
  return r;
}

std::vector<double> fractional_brownian_motion(double hurst, std::size_t n, std::uint64_t seed, std::uint32_t path) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("fbm: Hurst index must be in (0, 1)");
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("fbm: n must be a power of two");
  const std::size_t m = 2 * n;
  auto gamma = [hurst](double k) {
    const double e = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(k + 1.0), e) - 2.0 * std::pow(std::abs(k), e) + std::pow(std::abs(k - 1.0), e));
  };
  // Eigenvalues of the circulant embedding of the increment covariance.
  std::vector<double> c(2 * m, 0.0);
  for (std::size_t k = 0; k < m; ++k) c[2 * k] = gamma(static_cast<double>(k <= n ? k : m - k));
  gsl_fft_complex_radix2_forward(c.data(), 1, m);
  std::vector<double> z(2 * m, 0.0);
  CounterRng rng({seed, path, 0, Stream::Synthetic});
  const double md = static_cast<double>(m);
  for (std::size_t k = 0; k <= n; ++k) {
    const double lam = std::max(0.0, c[2 * k]);
    if (k == 0 || k == n) {
      z[2 * k] = std::sqrt(lam / md) * rng.normal();
    } else {
      const double s = std::sqrt(lam / (2.0 * md));
      const double re = s * rng.normal(), im = s * rng.normal();
      z[2 * k] = re;
      z[2 * k + 1] = im;
      z[2 * (m - k)] = re;
      z[2 * (m - k) + 1] = -im;
    }
  }
  gsl_fft_complex_radix2_forward(z.data(), 1, m);
  std::vector<double> b(n + 1, 0.0);
  const double scale = std::pow(static_cast<double>(n), -hurst);
  for (std::size_t j = 0; j < n; ++j) b[j + 1] = b[j] + scale * z[2 * j];
  return b;
}

}  // namespace swl::stats
