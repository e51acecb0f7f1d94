#include "psectd/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psectd {

StateWeighting StateWeighting::uniform_over(const std::vector<int>& states,
                                            int n_states) {
  if (states.empty()) throw std::invalid_argument("StateWeighting: empty support");
  StateWeighting w;
  w.weights.assign(n_states, 0.0);
  const double mass = 1.0 / static_cast<double>(states.size());
  for (int s : states) w.weights[s] = mass;
  return w;
}

StateWeighting StateWeighting::uniform_nonterminal(const TabularMDP& model) {
  std::vector<int> states;
  for (int s = 0; s < model.n_states; ++s) {
    if (!model.is_terminal(s)) states.push_back(s);
  }
  return uniform_over(states, model.n_states);
}

double msve_values(const std::vector<double>& values, const std::vector<double>& truth,
                   const StateWeighting& weighting) {
  double out = 0.0;
  for (std::size_t s = 0; s < weighting.weights.size(); ++s) {
    const double d = weighting.weights[s];
    if (d <= 0.0) continue;
    if (s >= truth.size() || !std::isfinite(truth[s]) || s >= values.size()) {
      std::ostringstream os;
      os << "msve: weighting puts mass on state " << s
         << " where truth or estimate is undefined";
      throw std::invalid_argument(os.str());
    }
    const double gap = truth[s] - values[s];
    out += d * gap * gap;
  }
  return out;
}

double msve(const ValueEstimate& estimate, const std::vector<double>& truth,
            const StateWeighting& weighting) {
  std::vector<double> values(weighting.weights.size(), 0.0);
  for (std::size_t s = 0; s < weighting.weights.size(); ++s) {
    if (weighting.weights[s] <= 0.0) continue;
    if (static_cast<int>(s) >= estimate.features.n_states) {
      std::ostringstream os;
      os << "msve: weighting puts mass on state " << s
         << " outside the estimate's feature map";
      throw std::invalid_argument(os.str());
    }
    values[s] = estimate.value(static_cast<int>(s));
  }
  return msve_values(values, truth, weighting);
}

namespace {

// Regularized incomplete beta by Lentz's continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  const double x = dof / (dof + t * t);
  const double p = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, x);
  return t > 0.0 ? 1.0 - p : p;
}

}  // namespace

double student_t_quantile(double p, long dof) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("student_t_quantile: p outside (0, 1)");
  if (dof < 1) throw std::invalid_argument("student_t_quantile: dof < 1");
  if (p == 0.5) return 0.0;
  const double v = static_cast<double>(dof);
  // Bisection on the CDF; symmetric, so solve for the upper tail.
  const bool upper = p > 0.5;
  const double target = upper ? p : 1.0 - p;
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_cdf(hi, v) < target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, v) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double q = 0.5 * (lo + hi);
  return upper ? q : -q;
}

TrialAggregate aggregate_trials(const std::vector<double>& values, double confidence) {
  if (values.size() < 2) {
    throw std::invalid_argument("aggregate_trials: need at least two values");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("aggregate_trials: confidence outside (0, 1)");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double t = student_t_quantile(0.5 + confidence / 2.0,
                                      static_cast<long>(values.size()) - 1);
  const double half_width = t * sd / std::sqrt(n);
  return {mean, mean - half_width, mean + half_width};
}

}  // namespace psectd
