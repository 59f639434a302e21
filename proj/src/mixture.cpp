#include "sonclust/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sonclust {

void MixtureModel::validate() const {
  if (k() < 1 || dim() < 1) throw std::invalid_argument("mixture: need K >= 1 components in d >= 1");
  if (sigmas.size() != k() || weights.size() != k()) {
    throw std::invalid_argument("mixture: sigmas/weights size mismatch");
  }
  if (!means.allFinite()) throw std::invalid_argument("mixture: non-finite mean");
  if ((sigmas.array() <= 0).any()) throw std::invalid_argument("mixture: sigmas must be positive");
  if ((weights.array() <= 0).any()) throw std::invalid_argument("mixture: weights must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture: weights must sum to 1");
  }
}

std::uint64_t SampleRng::next_bits() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SampleRng::uniform() {
  return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

double SampleRng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

MixtureSample sample_mixture(const MixtureModel& model, int n, std::uint64_t seed) {
  model.validate();
  if (n < 0) throw std::invalid_argument("sample_mixture: n must be nonnegative");
  SampleRng rng(seed);
  MixtureSample sample;
  sample.dataset.points.resize(n, model.dim());
  sample.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = rng.uniform();
    int m = 0;
    double acc = model.weights[0];
    while (m + 1 < model.k() && r >= acc) acc += model.weights[++m];
    sample.labels[i] = m;
    for (Eigen::Index c = 0; c < model.dim(); ++c) {
      sample.dataset.points(i, c) = model.means(m, c) + model.sigmas[m] * rng.gaussian();
    }
  }
  return sample;
}

namespace {

// Regularized lower incomplete gamma P(a, x), series branch (x < a + 1).
double gammp_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction branch (modified Lentz), returns Q(a, x).
double gammq_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi2_cdf(double theta, int d) {
  if (theta < 0) throw std::invalid_argument("chi2_cdf: theta must be nonnegative");
  if (d < 1) throw std::invalid_argument("chi2_cdf: d must be >= 1");
  const double a = 0.5 * d;
  const double x = 0.5 * theta * theta;
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gammp_series(a, x);
  return 1.0 - gammq_cf(a, x);
}

double lambda_lower_bound(const MixtureModel& model, int m, double theta, double epsilon,
                          int n) {
  model.validate();
  if (m < 0 || m >= model.k()) throw std::invalid_argument("lambda_lower_bound: bad component");
  if (theta <= 0 || epsilon <= 0 || n < 1) {
    throw std::invalid_argument("lambda_lower_bound: need theta > 0, epsilon > 0, n >= 1");
  }
  const double f = chi2_cdf(theta, static_cast<int>(model.dim()));
  const double denom = f * model.weights[m] - epsilon;
  if (denom <= 0) {
    throw std::invalid_argument("lambda_lower_bound: epsilon >= F(theta,d) * w_m");
  }
  return 2.0 * theta * model.sigmas[m] / (denom * static_cast<double>(n));
}

double lambda_upper_bound(const MixtureModel& model, int n) {
  model.validate();
  if (model.k() < 2) throw std::invalid_argument("lambda_upper_bound: need K >= 2");
  if (n < 2) throw std::invalid_argument("lambda_upper_bound: need n >= 2");
  double min_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < model.k(); ++a) {
    for (Eigen::Index b = a + 1; b < model.k(); ++b) {
      min_dist = std::min(min_dist, (model.means.row(a) - model.means.row(b)).norm());
    }
  }
  return min_dist / (2.0 * static_cast<double>(n - 1));
}

double separation_bound(const MixtureModel& model) {
  model.validate();
  const int d = static_cast<int>(model.dim());
  const double c_d = chi2_cdf(2.0 * d, d);
  const double sigma_max = model.sigmas.maxCoeff();
  const double w_min = model.weights.minCoeff();
  return 16.0 * d * sigma_max / (c_d * w_min);
}

std::vector<RecoveryReport> run_recovery_experiment(
    const MixtureModel& model, int n, double theta, double epsilon,
    const LambdaPolicy& policy, int trials, std::uint64_t seed,
    const SolverConfig& solver_config) {
  model.validate();
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  const int K = static_cast<int>(model.k());

  std::vector<double> lbs(K);
  for (int m = 0; m < K; ++m) lbs[m] = lambda_lower_bound(model, m, theta, epsilon, n);
  const double max_lb = *std::max_element(lbs.begin(), lbs.end());
  const double ub = K >= 2 ? lambda_upper_bound(model, n) : std::numeric_limits<double>::infinity();

  double lambda = 0.0;
  bool feasible_window = true;
  if (policy.kind == LambdaPolicy::Kind::Explicit) {
    lambda = policy.explicit_lambda;
  } else if (max_lb >= ub) {
    feasible_window = false;
  } else {
    lambda = std::sqrt(max_lb * ub);
  }

  std::vector<RecoveryReport> reports;
  reports.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    RecoveryReport rep;
    rep.trial_seed = seed + static_cast<std::uint64_t>(t);
    rep.lambda_lb = lbs;
    rep.lambda_ub = ub;
    rep.feasible_window = feasible_window;
    rep.lambda_used = lambda;
    if (!feasible_window) {
      reports.push_back(std::move(rep));
      continue;
    }

    const MixtureSample sample = sample_mixture(model, n, rep.trial_seed);
    std::vector<std::vector<int>> v(K);
    for (int i = 0; i < n; ++i) {
      for (int m = 0; m < K; ++m) {
        if ((sample.dataset.points.row(i) - model.means.row(m)).norm() <=
            theta * model.sigmas[m]) {
          v[m].push_back(i);
        }
      }
    }

    SolverConfig cfg = solver_config;
    cfg.lambda = lambda;
    const SonSolution sol = solve(sample.dataset, cfg);

    rep.v_sizes.resize(K);
    rep.coherent.resize(K);
    std::vector<std::vector<int>> ids(K);
    for (int m = 0; m < K; ++m) {
      rep.v_sizes[m] = static_cast<int>(v[m].size());
      bool coh = true;  // vacuously coherent when V_m is empty
      for (int i : v[m]) {
        ids[m].push_back(sol.partition.assignment[i]);
        if (sol.partition.assignment[i] != sol.partition.assignment[v[m].front()]) coh = false;
      }
      rep.coherent[m] = coh;
    }
    rep.distinct.assign(K, std::vector<bool>(K, false));
    bool all_distinct = true;
    for (int m = 0; m < K; ++m) {
      for (int mp = m + 1; mp < K; ++mp) {
        bool disjoint = true;
        for (int a : ids[m]) {
          for (int b : ids[mp]) {
            if (a == b) disjoint = false;
          }
        }
        rep.distinct[m][mp] = rep.distinct[mp][m] = disjoint;
        if (!disjoint) all_distinct = false;
      }
    }
    rep.recovered = all_distinct &&
                    std::all_of(rep.coherent.begin(), rep.coherent.end(), [](bool b) { return b; });
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace sonclust
