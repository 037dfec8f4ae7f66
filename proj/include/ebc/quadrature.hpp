#ifndef EBC_QUADRATURE_HPP
#define EBC_QUADRATURE_HPP

#include <functional>
#include <stdexcept>

namespace ebc {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod (G7, K15) on [a, b].  Throws QuadratureError with
// the achieved tolerance if the error estimate cannot be driven below
// max(abs_tol, rel_tol * |integral|) within the subdivision budget.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14);

}  // namespace ebc

#endif  // EBC_QUADRATURE_HPP
