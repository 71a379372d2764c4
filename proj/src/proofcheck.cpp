#include "binsense/proofcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "binsense/kernels.hpp"

namespace binsense::proofs {

namespace {

std::size_t wrap(std::ptrdiff_t v, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = v % nn;
  if (r < 0) r += nn;
  return static_cast<std::size_t>(r);
}

void check_frame(std::size_t n, const std::vector<std::size_t>& theta,
                 const std::vector<std::size_t>& support) {
  if (n == 0) throw std::invalid_argument("analysis frame: n must be positive");
  for (const std::size_t t : theta)
    if (t >= n) throw std::invalid_argument("analysis frame: theta index out of range");
  for (const std::size_t k : support)
    if (k >= n) throw std::invalid_argument("analysis frame: support index out of range");
}

const std::vector<std::size_t>& circulant_frame(const ops::Operator& op) {
  if (op.kind() != ops::Operator::Kind::circulant)
    throw std::invalid_argument("analysis helpers expect a circulant operator");
  return op.theta();
}

} // namespace

XTerms x_terms(std::size_t n, const std::vector<std::size_t>& theta,
               const std::vector<std::size_t>& support, std::size_t i, const Vec& b) {
  check_frame(n, theta, support);
  if (i >= n) throw std::invalid_argument("x_terms: index out of range");
  if (b.size() != n) throw std::invalid_argument("x_terms: generator has wrong length");
  XTerms out;
  for (const std::size_t l : theta)
    out.x1 += b[wrap(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(l), n)];
  for (const std::size_t k : support) {
    for (const std::size_t j : theta) {
      out.x2 += b[wrap(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(j), n)] *
                b[wrap(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j), n)];
    }
  }
  // x3 factorizes over the two independent theta sums.
  double g = 0.0;
  for (const std::size_t k : support)
    for (const std::size_t m : theta)
      g += b[wrap(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(m), n)];
  out.x3 = g * out.x1;
  return out;
}

XTerms x_terms(const ops::Operator& op, const std::vector<std::size_t>& support, std::size_t i,
               const Vec& b) {
  return x_terms(op.n(), circulant_frame(op), support, i, b);
}

Mat representer_x2(std::size_t n, const std::vector<std::size_t>& theta,
                   const std::vector<std::size_t>& support, std::size_t i) {
  check_frame(n, theta, support);
  Mat l(n, n);
  for (const std::size_t th : theta) {
    const std::size_t row = wrap(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(th), n);
    for (const std::size_t k : support) {
      const std::size_t col = wrap(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(th), n);
      l.at(row, col) = 1.0;
    }
  }
  return l;
}

X3Representer representer_x3(std::size_t n, const std::vector<std::size_t>& theta,
                             const std::vector<std::size_t>& support, std::size_t i) {
  check_frame(n, theta, support);
  X3Representer out;
  out.k1 = Mat(n, n);
  out.k2 = Mat(n, n);
  for (const std::size_t th : theta) {
    const std::size_t row = wrap(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(th), n);
    for (const std::size_t q : theta) out.k1.at(row, q) = 1.0;
  }
  for (const std::size_t q : theta) {
    for (const std::size_t k : support) {
      const std::size_t col = wrap(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(q), n);
      out.k2.at(q, col) = 1.0;
    }
  }
  out.l3 = matmul(out.k1, out.k2);
  return out;
}

Mat gram_representer(std::size_t n, const std::vector<std::size_t>& theta,
                     const std::vector<std::size_t>& support) {
  check_frame(n, theta, support);
  Mat l(n, n);
  for (const std::size_t i : theta) {
    for (const std::size_t k : support) {
      const std::size_t col = wrap(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(i), n);
      l.at(i, col) = 1.0;
    }
  }
  return matmul(transpose(l), l);
}

NormAudit norm_audit(const Mat& a) {
  NormAudit out;
  out.hs_norm = std::sqrt(kernels::nrm2sq(a.data.data(), a.data.size()));
  for (std::size_t i = 0; i < a.rows; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) row_sum += std::fabs(a.at(i, j));
    out.gershgorin_bound = std::max(out.gershgorin_bound, row_sum);
  }
  if (a.rows == 0 || a.cols == 0 || out.hs_norm == 0.0) return out;

  // Power iteration on A^T A, converged to 1e-8 relative change.
  Vec v(a.cols);
  for (std::size_t i = 0; i < a.cols; ++i)
    v[i] = 1.0 + 0.1 * (static_cast<double>(i % 7) - 3.0);
  double lambda = 0.0;
  for (std::size_t it = 0; it < 20000; ++it) {
    const double nrm = std::sqrt(kernels::nrm2sq(v.data(), v.size()));
    if (nrm == 0.0) break;
    kernels::scale(1.0 / nrm, v.data(), v.size());
    const Vec w = matvec(a, v);
    const Vec z = matvec_transpose(a, w);
    const double next = kernels::dot(v.data(), z.data(), v.size());
    const bool settled = std::fabs(next - lambda) <= 1e-8 * std::max(1.0, next);
    lambda = next;
    v = z;
    if (settled && it > 2) break;
  }
  out.op_norm = std::sqrt(std::max(lambda, 0.0));
  return out;
}

double expected_x2(std::size_t m, double sigma, bool in_support) {
  return in_support ? static_cast<double>(m) * sigma * sigma : 0.0;
}

double expected_x2(const ops::Operator& op, const std::vector<std::size_t>& support,
                   std::size_t i) {
  circulant_frame(op);
  bool on = false;
  for (const std::size_t k : support) on = on || k == i;
  return expected_x2(op.m(), op.sigma(), on);
}

double pair_expectation(std::size_t n, const std::vector<std::size_t>& theta, std::size_t k,
                        std::size_t i, double sigma) {
  check_frame(n, theta, {});
  if (k >= n || i >= n) throw std::invalid_argument("pair_expectation: index out of range");
  // |theta cap ((k-i) + theta)| sigma^2.
  std::vector<char> in_theta(n, 0);
  for (const std::size_t t : theta) in_theta[t] = 1;
  const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(i);
  std::size_t count = 0;
  for (const std::size_t t : theta)
    count += in_theta[wrap(static_cast<std::ptrdiff_t>(t) + shift, n)];
  return static_cast<double>(count) * sigma * sigma;
}

double expected_x3(std::size_t n, const std::vector<std::size_t>& theta,
                   const std::vector<std::size_t>& support, std::size_t i, double sigma) {
  check_frame(n, theta, support);
  double total = 0.0;
  bool on = false;
  for (const std::size_t k : support) {
    total += pair_expectation(n, theta, k, i, sigma);
    on = on || k == i;
  }
  // Bracketing: at most s*M pairs overlap; on-support at least the k=i term.
  const double cap = static_cast<double>(support.size()) * static_cast<double>(theta.size()) *
                     sigma * sigma;
  const double floor_on = static_cast<double>(theta.size()) * sigma * sigma;
  if (total < -1e-9 || total > cap + 1e-9 || (on && total < floor_on - 1e-9))
    throw std::logic_error("expected_x3: bracketing violated");
  return total;
}

double expected_x3(const ops::Operator& op, const std::vector<std::size_t>& support,
                   std::size_t i) {
  return expected_x3(op.n(), circulant_frame(op), support, i, op.sigma());
}

double expected_gram(std::size_t m, std::size_t s, double sigma) {
  return static_cast<double>(m) * static_cast<double>(s) * sigma * sigma;
}

std::vector<ExpectationReport> concentration_sweep(const SweepConfig& config,
                                                   std::size_t trials) {
  check_frame(config.n, config.theta, config.support);
  if (trials < 2) throw std::invalid_argument("concentration_sweep: needs at least 2 trials");
  for (const std::size_t i : config.indices)
    if (i >= config.n) throw std::invalid_argument("concentration_sweep: index out of range");

  const std::size_t ni = config.indices.size();
  std::vector<Vec> samples(3 * ni, Vec(trials, 0.0));

  for (std::size_t t = 0; t < trials; ++t) {
    rng::Stream stream(rng::derive_key(config.base_seed, "sweep-generator", {t}));
    const Vec b = rng::sample_generator(config.ensemble, config.n, stream);
    for (std::size_t a = 0; a < ni; ++a) {
      const XTerms xt = x_terms(config.n, config.theta, config.support, config.indices[a], b);
      samples[3 * a + 0][t] = xt.x1;
      samples[3 * a + 1][t] = xt.x2;
      samples[3 * a + 2][t] = xt.x3;
    }
  }

  const double sigma = config.ensemble.sigma();
  std::vector<ExpectationReport> reports;
  reports.reserve(3 * ni);
  static const char* const names[3] = {"x1", "x2", "x3"};
  for (std::size_t a = 0; a < ni; ++a) {
    const std::size_t idx = config.indices[a];
    bool on = false;
    for (const std::size_t k : config.support) on = on || k == idx;
    double formulas[3];
    formulas[0] = 0.0;
    formulas[1] = expected_x2(config.theta.size(), sigma, on);
    formulas[2] = expected_x3(config.n, config.theta, config.support, idx, sigma);
    for (int term = 0; term < 3; ++term) {
      const Vec& xs = samples[3 * a + term];
      ExpectationReport rep;
      rep.term = names[term];
      rep.index = idx;
      rep.formula = formulas[term];
      rep.trials = trials;
      const double mean = kernels::sum(xs.data(), trials) / static_cast<double>(trials);
      double var = 0.0;
      for (const double v : xs) var += (v - mean) * (v - mean);
      var /= static_cast<double>(trials - 1);
      const double sd = std::sqrt(var);
      rep.empirical_mean = mean;
      rep.std_error = sd / std::sqrt(static_cast<double>(trials));
      const double scale = std::fabs(mean) + std::fabs(rep.formula) + 1.0;
      rep.degenerate = sd <= 1e-12 * scale;
      rep.z_score = rep.degenerate ? 0.0 : (mean - rep.formula) / rep.std_error;
      if (!rep.degenerate) {
        std::size_t beyond2 = 0, beyond3 = 0;
        for (const double v : xs) {
          const double d = std::fabs(v - mean);
          if (d > 2.0 * sd) ++beyond2;
          if (d > 3.0 * sd) ++beyond3;
        }
        rep.tail2_freq = static_cast<double>(beyond2) / static_cast<double>(trials);
        rep.tail3_freq = static_cast<double>(beyond3) / static_cast<double>(trials);
      }
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

} // namespace binsense::proofs
