#include "ebc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace ebc {

SampleSet SampleSet::univariate(std::vector<double> v, std::map<std::string, std::string> meta) {
  SampleSet s;
  s.dim = 1;
  s.values = std::move(v);
  s.meta = std::move(meta);
  return s;
}

TestReport TestReport::make(std::string test, double statistic, double threshold,
                            std::string orientation, std::map<std::string, std::string> meta) {
  TestReport r;
  r.test = std::move(test);
  r.statistic = statistic;
  r.threshold = threshold;
  r.orientation = std::move(orientation);
  r.pass = (r.orientation == "<=") ? (statistic <= threshold) : (statistic >= threshold);
  r.meta = std::move(meta);
  return r;
}

std::string TestReport::to_json() const {
  nlohmann::json j;
  j["test"] = test;
  j["statistic"] = statistic;
  j["threshold"] = threshold;
  j["orientation"] = orientation;
  j["pass"] = pass;
  j["meta"] = meta;
  return j.dump();
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) {
    throw std::domain_error("gamma_q requires a > 0, x >= 0");
  }
  if (x == 0.0) {
    return 1.0;
  }
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // Lower series: P(a,x) = x^a e^{-x} / Gamma(a) * sum x^n / (a)_{n+1}.
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) {
        break;
      }
    }
    return 1.0 - std::exp(log_prefix) * sum;
  }
  // Upper continued fraction (Lentz).
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) {
      d = 1e-300;
    }
    c = b + an / c;
    if (std::abs(c) < 1e-300) {
      c = 1e-300;
    }
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      break;
    }
  }
  return std::exp(log_prefix) * h;
}

double chi_squared_quantile(double dof, double tail_prob) {
  if (!(tail_prob > 0.0) || !(tail_prob < 1.0) || !(dof > 0.0)) {
    throw std::domain_error("chi_squared_quantile requires dof > 0, tail in (0,1)");
  }
  // Bisect Q(dof/2, x/2) = tail_prob.
  double lo = 0.0;
  double hi = dof + 10.0;
  while (gamma_q(dof / 2.0, hi / 2.0) > tail_prob) {
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_q(dof / 2.0, mid / 2.0) > tail_prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TestReport ks_two_sample(const SampleSet& a, const SampleSet& b, double significance) {
  if (a.dim != 1 || b.dim != 1) {
    throw std::invalid_argument("ks_two_sample requires univariate samples");
  }
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n < 50 || m < 50) {
    throw std::invalid_argument("ks_two_sample requires sizes >= 50");
  }
  std::vector<double> x = a.values;
  std::vector<double> y = b.values;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    const double v = std::min(x[i], y[j]);
    while (i < n && x[i] <= v) {
      ++i;
    }
    while (j < m && y[j] <= v) {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double c = std::sqrt(-0.5 * std::log(significance / 2.0));
  const double threshold =
      c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
  return TestReport::make("ks_two_sample", d, threshold, "<=",
                          {{"n", std::to_string(n)},
                           {"m", std::to_string(m)},
                           {"significance", std::to_string(significance)}});
}

std::vector<std::complex<double>> ecf(const SampleSet& sample,
                                      const std::vector<std::vector<double>>& thetas) {
  std::vector<std::complex<double>> out;
  out.reserve(thetas.size());
  const std::size_t rows = sample.size();
  for (const auto& theta : thetas) {
    if (theta.size() != sample.dim) {
      throw std::invalid_argument("theta dimension does not match the sample");
    }
    double re = 0.0;
    double im = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < sample.dim; ++c) {
        dot += theta[c] * sample.at(r, c);
      }
      re += std::cos(dot);
      im += std::sin(dot);
    }
    out.emplace_back(re / static_cast<double>(rows), im / static_cast<double>(rows));
  }
  return out;
}

std::vector<std::complex<double>> ecf(const SampleSet& sample, const std::vector<double>& thetas) {
  std::vector<std::vector<double>> grid;
  grid.reserve(thetas.size());
  for (double t : thetas) {
    grid.push_back({t});
  }
  return ecf(sample, grid);
}

TestReport ecf_distance(const SampleSet& sample,
                        const std::function<std::complex<double>(const std::vector<double>&)>& cf,
                        const std::vector<std::vector<double>>& thetas, double model_tol,
                        double threshold_override) {
  const std::vector<std::complex<double>> emp = ecf(sample, thetas);
  double dist = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    dist = std::max(dist, std::abs(emp[i] - cf(thetas[i])));
  }
  const double threshold =
      threshold_override >= 0.0
          ? threshold_override
          : 3.0 * std::sqrt(2.0 / static_cast<double>(sample.size())) + model_tol;
  return TestReport::make("ecf_distance", dist, threshold, "<=",
                          {{"N", std::to_string(sample.size())},
                           {"grid_size", std::to_string(thetas.size())}});
}

TestReport ecf_distance(const SampleSet& sample,
                        const std::function<std::complex<double>(double)>& cf,
                        const std::vector<double>& thetas, double model_tol,
                        double threshold_override) {
  std::vector<std::vector<double>> grid;
  grid.reserve(thetas.size());
  for (double t : thetas) {
    grid.push_back({t});
  }
  return ecf_distance(
      sample, [&](const std::vector<double>& th) { return cf(th[0]); }, grid, model_tol,
      threshold_override);
}

TestReport chi_squared_gof(const std::vector<std::int64_t>& observed,
                           const std::vector<double>& expected_probs, double significance) {
  if (observed.size() != expected_probs.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_squared_gof requires matching bins (>= 2)");
  }
  std::int64_t total = 0;
  for (const std::int64_t o : observed) {
    total += o;
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = expected_probs[i] * static_cast<double>(total);
    if (expected <= 0.0) {
      throw std::invalid_argument("expected probability must be positive in every bin");
    }
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  const double dof = static_cast<double>(observed.size()) - 1.0;
  const double threshold = chi_squared_quantile(dof, significance);
  return TestReport::make("chi_squared_gof", stat, threshold, "<=",
                          {{"dof", std::to_string(static_cast<std::int64_t>(dof))},
                           {"total", std::to_string(total)},
                           {"significance", std::to_string(significance)}});
}

TestReport trend_report(const std::vector<double>& ladder_ns,
                        const std::vector<double>& statistics, double slack) {
  if (statistics.size() < 2 || ladder_ns.size() != statistics.size()) {
    throw std::invalid_argument("trend_report requires >= 2 matched rungs");
  }
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < statistics.size(); ++i) {
    if (statistics[i] <= 0.0) {
      throw std::invalid_argument("trend statistics must be positive");
    }
    worst_ratio = std::max(worst_ratio, statistics[i + 1] / statistics[i]);
  }
  std::map<std::string, std::string> meta;
  for (std::size_t i = 0; i < ladder_ns.size(); ++i) {
    meta["n" + std::to_string(i)] = std::to_string(ladder_ns[i]);
    meta["stat" + std::to_string(i)] = std::to_string(statistics[i]);
  }
  return TestReport::make("trend_report", worst_ratio, slack, "<=", std::move(meta));
}

}  // namespace ebc
