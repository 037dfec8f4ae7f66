#ifndef EBC_VERIFY_HPP
#define EBC_VERIFY_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ebc {

// A batch of Monte Carlo output plus the provenance needed to re-run it.
struct SampleSet {
  std::size_t dim = 1;
  std::vector<double> values;  // row-major when dim > 1
  std::map<std::string, std::string> meta;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  double at(std::size_t row, std::size_t col = 0) const { return values[row * dim + col]; }

  static SampleSet univariate(std::vector<double> v,
                              std::map<std::string, std::string> meta = {});
};

// Outcome of one statistical check.  pass reflects the recorded orientation:
// "<=" passes when statistic <= threshold, ">=" the other way.
struct TestReport {
  std::string test;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string orientation = "<=";
  bool pass = false;
  std::map<std::string, std::string> meta;

  std::string to_json() const;

  static TestReport make(std::string test, double statistic, double threshold,
                         std::string orientation = "<=",
                         std::map<std::string, std::string> meta = {});
};

// Regularized upper incomplete gamma Q(a, x); series/continued-fraction
// evaluation in the usual split.
double gamma_q(double a, double x);

// Upper-tail chi-squared quantile: x with P(Chi2_k > x) = tail_prob.
double chi_squared_quantile(double dof, double tail_prob);

// Two-sample Kolmogorov-Smirnov with the asymptotic threshold
// c(sig) sqrt((n+m)/(nm)), c(sig) = sqrt(-ln(sig/2)/2).
TestReport ks_two_sample(const SampleSet& a, const SampleSet& b, double significance = 1e-3);

// Empirical characteristic function over a grid of theta vectors (each of
// the sample's dimension).
std::vector<std::complex<double>> ecf(const SampleSet& sample,
                                      const std::vector<std::vector<double>>& thetas);
std::vector<std::complex<double>> ecf(const SampleSet& sample, const std::vector<double>& thetas);

// max_theta |ecf - cf|; the default threshold is 3 sqrt(2/N) plus the model
// tolerance.
TestReport ecf_distance(const SampleSet& sample,
                        const std::function<std::complex<double>(const std::vector<double>&)>& cf,
                        const std::vector<std::vector<double>>& thetas, double model_tol = 0.0,
                        double threshold_override = -1.0);
TestReport ecf_distance(const SampleSet& sample,
                        const std::function<std::complex<double>(double)>& cf,
                        const std::vector<double>& thetas, double model_tol = 0.0,
                        double threshold_override = -1.0);

// Pearson chi-squared goodness of fit of observed counts against expected
// probabilities.
TestReport chi_squared_gof(const std::vector<std::int64_t>& observed,
                           const std::vector<double>& expected_probs,
                           double significance = 1e-3);

// Pass iff the statistic ladder is nonincreasing up to the slack factor:
// v[i+1] <= slack * v[i] for every rung.
TestReport trend_report(const std::vector<double>& ladder_ns,
                        const std::vector<double>& statistics, double slack = 1.2);

}  // namespace ebc

#endif  // EBC_VERIFY_HPP
