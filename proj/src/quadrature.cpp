#include "ebc/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace ebc {

namespace {

// Kronrod-15 nodes on [0,1] of |x| and weights; Gauss-7 weights sit on the
// odd Kronrod nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = kKronrodWeights[7] * f(c);
  double resg = kGaussWeights[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double x = h * kKronrodNodes[i];
    const double fv = f(c - x) + f(c + x);
    resk += kKronrodWeights[i] * fv;
    if (i % 2 == 1) {
      resg += kGaussWeights[i / 2] * fv;
    }
  }
  return {a, b, resk * h, std::abs((resk - resg) * h)};
}

struct WorseError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
  if (a == b) {
    return 0.0;
  }
  constexpr int kMaxPanels = 4000;
  std::priority_queue<Panel, std::vector<Panel>, WorseError> queue;
  queue.push(gk15(f, a, b));
  double total = queue.top().value;
  double err = queue.top().error;
  int panels = 1;
  while (panels < kMaxPanels) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (err <= tol) {
      break;
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval no longer splittable in double precision
      queue.push({worst.a, worst.b, worst.value, 0.0});
      continue;
    }
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  const double tol = std::max(abs_tol, rel_tol * std::abs(total));
  if (err > 8.0 * tol) {
    throw QuadratureError("quadrature failed: achieved error " + std::to_string(err) +
                          " exceeds tolerance " + std::to_string(tol));
  }
  return total;
}

}  // namespace ebc
