#pragma once
// Half-line integrals int_0^inf h(r) dr where, beyond some point, h(r) is a
// slowly varying weight times a sum of cosines and sines. The head [0, A] is
// integrated directly (break points every half period); the tail term by term,
// QAWF for oscillating terms and QAGIU for zero frequency.

#include <functional>
#include <vector>

namespace swl::detail {

struct TrigTerm {
  double coeff;
  double omega;
  bool sine;
};

double oscillatory_half_line(const std::function<double(double)>& head,
                             const std::function<double(double)>& tail_weight,
                             const std::vector<TrigTerm>& tail_terms, double min_head = 1.0,
                             double rel_tol = 1e-9);

}  // namespace swl::detail
