#include "radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swl/quadrature.hpp"

namespace swl::detail {

double oscillatory_half_line(const std::function<double(double)>& head,
                             const std::function<double(double)>& tail_weight,
                             const std::vector<TrigTerm>& terms_in, double min_head,
                             double rel_tol) {
  const double pi = std::numbers::pi;
  // Frequencies that cancel up to rounding are treated as exactly zero.
  double scale_omega = 0.0;
  for (const auto& t : terms_in) scale_omega = std::max(scale_omega, std::abs(t.omega));
  std::vector<TrigTerm> tail_terms = terms_in;
  for (auto& t : tail_terms)
    if (std::abs(t.omega) <= 1e-12 * scale_omega) t.omega = 0.0;
  double omega_max = 0.0, omega_min = 0.0;
  for (const auto& t : tail_terms) {
    const double w = std::abs(t.omega);
    if (w > 0.0) {
      omega_max = std::max(omega_max, w);
      omega_min = omega_min == 0.0 ? w : std::min(omega_min, w);
    }
  }
  double head_end = std::max(1.0, min_head);
  if (omega_min > 0.0) head_end = std::max(head_end, 16.0 * pi / omega_min);

  std::vector<double> breaks;
  if (omega_max > 0.0) {
    const double step = pi / omega_max;
    const auto count = static_cast<std::size_t>(head_end / step);
    const std::size_t stride = std::max<std::size_t>(1, count / 400);
    for (std::size_t i = stride; static_cast<double>(i) * step < head_end; i += stride)
      breaks.push_back(static_cast<double>(i) * step);
  }
  const quad::Tolerance tol{1e-15, rel_tol, 4000};
  double total = quad::with_breaks(head, 0.0, head_end, breaks, tol).value;

  const double scale = std::max(std::abs(total), 1e-300);
  for (const auto& t : tail_terms) {
    if (t.coeff == 0.0) continue;
    if (t.omega == 0.0) {
      if (!t.sine) total += t.coeff * quad::upper_tail(tail_weight, head_end, tol).value;
      continue;
    }
    const double sign = (t.sine && t.omega < 0.0) ? -1.0 : 1.0;
    const double v = quad::fourier_tail(tail_weight, head_end, std::abs(t.omega), t.sine,
                                        std::max(1e-300, 1e-3 * rel_tol * scale))
                         .value;
    total += sign * t.coeff * v;
  }
  return total;
}

}  // namespace swl::detail
