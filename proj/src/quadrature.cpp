#include "swl/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

namespace swl::quad {
namespace {

void disable_gsl_abort() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

double trampoline(double x, void* params) {
  const auto& f = *static_cast<const Fn*>(params);
  return f(x);
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

Workspace make_workspace(std::size_t limit) {
  return Workspace(gsl_integration_workspace_alloc(limit));
}

// GSL reports roundoff or subdivision exhaustion even when the estimate is
// usable; only reject when the residual is far above the request.
Result accept(int status, double value, double err, const Tolerance& tol, const char* where) {
  if (!std::isfinite(value)) {
    throw QuadratureError(fmt::format("{}: non-finite integral", where), value, err);
  }
  if (status != GSL_SUCCESS) {
    const double target = std::max(tol.abs, tol.rel * std::abs(value));
    if (!(err <= 100.0 * target)) {
      throw QuadratureError(
          fmt::format("{}: {} (value {:.6g}, residual {:.3g})", where, gsl_strerror(status), value, err),
          value, err);
    }
  }
  return {value, err};
}

}  // namespace

Result finite(const Fn& f, double a, double b, const Tolerance& tol) {
  disable_gsl_abort();
  if (a == b) return {0.0, 0.0};
  auto ws = make_workspace(tol.limit);
  gsl_function gf{&trampoline, const_cast<Fn*>(&f)};
  double value = 0.0, err = 0.0;
  int status = gsl_integration_qags(&gf, a, b, tol.abs, tol.rel, tol.limit, ws.get(), &value, &err);
  return accept(status, value, err, tol, "qags");
}

Result with_breaks(const Fn& f, double a, double b, std::vector<double> breaks,
                   const Tolerance& tol) {
  disable_gsl_abort();
  if (a == b) return {0.0, 0.0};
  std::vector<double> pts{a};
  for (double p : breaks) {
    if (p > pts.back() && p < b) pts.push_back(p);
  }
  pts.push_back(b);
  if (pts.size() == 2) return finite(f, a, b, tol);
  auto ws = make_workspace(tol.limit);
  gsl_function gf{&trampoline, const_cast<Fn*>(&f)};
  double value = 0.0, err = 0.0;
  int status = gsl_integration_qagp(&gf, pts.data(), pts.size(), tol.abs, tol.rel, tol.limit,
                                    ws.get(), &value, &err);
  return accept(status, value, err, tol, "qagp");
}

Result upper_tail(const Fn& f, double a, const Tolerance& tol) {
  disable_gsl_abort();
  auto ws = make_workspace(tol.limit);
  gsl_function gf{&trampoline, const_cast<Fn*>(&f)};
  double value = 0.0, err = 0.0;
  int status = gsl_integration_qagiu(&gf, a, tol.abs, tol.rel, tol.limit, ws.get(), &value, &err);
  return accept(status, value, err, tol, "qagiu");
}

Result half_line(const Fn& f, double split, const Tolerance& tol) {
  Result lo = finite(f, 0.0, split, tol);
  Result hi = upper_tail(f, split, tol);
  return {lo.value + hi.value, lo.abs_error + hi.abs_error};
}

Result fourier_tail(const Fn& f, double a, double omega, bool sine, double abs_tol) {
  disable_gsl_abort();
  constexpr std::size_t limit = 1000;
  auto ws = make_workspace(limit);
  auto cycle = make_workspace(limit);
  std::unique_ptr<gsl_integration_qawo_table, decltype(&gsl_integration_qawo_table_free)> table(
      gsl_integration_qawo_table_alloc(omega, 1.0, sine ? GSL_INTEG_SINE : GSL_INTEG_COSINE, 50),
      &gsl_integration_qawo_table_free);
  gsl_function gf{&trampoline, const_cast<Fn*>(&f)};
  double value = 0.0, err = 0.0;
  int status = gsl_integration_qawf(&gf, a, abs_tol, limit, ws.get(), cycle.get(), table.get(),
                                    &value, &err);
  Tolerance tol{abs_tol, 0.0, limit};
  return accept(status, value, err, tol, "qawf");
}

Rule gauss_legendre(std::size_t n, double a, double b) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(a, b, i, &rule.nodes[i], &rule.weights[i], table.get());
  }
  return rule;
}

SphereRule sphere_rule(std::size_t n_polar, std::size_t n_azimuth) {
  const Rule mu = gauss_legendre(n_polar, -1.0, 1.0);
  SphereRule s;
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(n_azimuth);
  for (std::size_t i = 0; i < n_polar; ++i) {
    const double ct = mu.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (std::size_t j = 0; j < n_azimuth; ++j) {
      const double phi = (static_cast<double>(j) + 0.5) * dphi;
      s.x.push_back(st * std::cos(phi));
      s.y.push_back(st * std::sin(phi));
      s.z.push_back(ct);
      s.w.push_back(mu.weights[i] * dphi);
    }
  }
  return s;
}

}  // namespace swl::quad
