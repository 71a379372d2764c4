#include "binsense/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "binsense/kernels.hpp"

namespace binsense::certs {

SymmetrizedSignal symmetrize(const rng::BinarySignal& x0) {
  SymmetrizedSignal out;
  if (2 * x0.sparsity() <= x0.n) {
    out.beta0 = x0;
    out.flipped = false;
  } else {
    out.beta0 = x0.complement();
    out.flipped = true;
  }
  return out;
}

MarginReport verify_certificate(const ops::Operator& op, const Vec& nu,
                                const std::vector<std::size_t>& support) {
  const Vec margins = op.apply_adjoint(nu);
  MarginReport rep;
  std::vector<char> on(op.n(), 0);
  for (const std::size_t i : support) {
    if (i >= op.n()) throw std::invalid_argument("verify_certificate: support index out of range");
    on[i] = 1;
  }
  double worst_on = -std::numeric_limits<double>::infinity();
  double worst_off = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < op.n(); ++i) {
    if (on[i]) {
      worst_on = std::max(worst_on, margins[i]);
    } else {
      worst_off = std::min(worst_off, margins[i]);
    }
  }
  rep.worst_on_support = support.empty() ? 0.0 : worst_on;
  rep.worst_off_support = support.size() == op.n() ? 0.0 : worst_off;
  // Achieved margin: margins must clear -t on S and +t off S.
  double t = std::numeric_limits<double>::infinity();
  if (!support.empty()) t = std::min(t, -rep.worst_on_support);
  if (support.size() != op.n()) t = std::min(t, rep.worst_off_support);
  if (!std::isfinite(t)) t = 0.0;  // empty problem
  rep.t_actual = t;
  rep.verified = t > 0.0;
  return rep;
}

DualCertificate build_certificate(const ops::Operator& op, const rng::BinarySignal& x0) {
  if (x0.n != op.n()) throw std::invalid_argument("build_certificate: signal size mismatch");
  if (!(op.mu() > 0.0)) throw std::invalid_argument("build_certificate: requires mu > 0");
  if (!(op.sigma() > 0.0)) throw std::invalid_argument("build_certificate: requires sigma > 0");

  const SymmetrizedSignal sym = symmetrize(x0);
  const double m = static_cast<double>(op.m());
  const double sigma = op.sigma();
  const double mu = op.mu();
  const double rho = -sigma * sigma / (4.0 * mu);

  DualCertificate cert;
  cert.rho = rho;
  cert.t_target = m * sigma * sigma / 16.0;
  cert.sigma = sigma;
  cert.mu = mu;
  cert.sparsity = sym.beta0.sparsity();
  cert.support = sym.beta0.support;

  Vec w = op.apply_centered(sym.beta0.dense());
  const double mean_w = kernels::sum(w.data(), w.size()) / m;
  cert.nu.resize(op.m());
  // Analytic vector rho + w_k - mean(w); negated so the margins land on the
  // verification side of the separating cone.
  for (std::size_t k = 0; k < op.m(); ++k) cert.nu[k] = -(rho + w[k] - mean_w);

  cert.margins = op.apply_adjoint(cert.nu);
  const MarginReport rep = verify_certificate(op, cert.nu, cert.support);
  cert.verified = rep.verified;
  cert.t_actual = rep.t_actual;
  cert.r = std::sqrt(kernels::nrm2sq(cert.nu.data(), cert.nu.size()));
  return cert;
}

std::optional<CertificateSearch> search_certificate_lp(const ops::Operator& op,
                                                       const std::vector<std::size_t>& support,
                                                       const solvers::SolverOptions& opts,
                                                       double threshold) {
  const std::size_t n = op.n();
  const std::size_t m = op.m();
  std::vector<char> on(n, 0);
  for (const std::size_t i : support) {
    if (i >= n) throw std::invalid_argument("search_certificate_lp: support index out of range");
    on[i] = 1;
  }

  // Variables: nu (m entries, box [-1,1]), t, and one slack per coordinate
  // turning the margin inequalities into equalities:
  //   i in S:      sum_k A_ki nu_k + t + p_i = 0,   p_i >= 0
  //   i not in S:  sum_k A_ki nu_k - t - q_i = 0,   q_i >= 0
  const Mat a_dense = op.to_dense();
  const std::size_t nvar = m + 1 + n;
  Mat rows(n, nvar);
  Vec rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) rows.at(i, k) = a_dense.at(k, i);
    rows.at(i, m) = on[i] ? 1.0 : -1.0;
    rows.at(i, m + 1 + i) = on[i] ? 1.0 : -1.0;
  }
  Vec c(nvar, 0.0);
  c[m] = -1.0;  // maximize t
  Vec lo(nvar, 0.0);
  Vec up(nvar, std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < m; ++k) {
    lo[k] = -1.0;
    up[k] = 1.0;
  }

  const solvers::SolverOutcome sol = solvers::lp_solve(rows, rhs, c, lo, up, opts);
  if (sol.status != solvers::SolveStatus::optimal) return std::nullopt;
  CertificateSearch found;
  found.t_best = sol.x_star[m];
  if (found.t_best <= threshold) return std::nullopt;
  found.nu.assign(sol.x_star.begin(), sol.x_star.begin() + m);
  return found;
}

double noise_error_bound(std::size_t s, std::size_t n, std::size_t m, double sigma, double mu,
                         double eta) {
  if (m == 0) throw std::invalid_argument("noise_error_bound: m must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("noise_error_bound: sigma must be positive");
  if (!(mu > 0.0)) throw std::invalid_argument("noise_error_bound: mu must be positive");
  const double s_eff = static_cast<double>(std::min(s, n - s));
  const double num = 9.0 * (16.0 * sigma * sigma / (mu * mu) + s_eff);
  return std::sqrt(num / (static_cast<double>(m) * sigma * sigma)) * eta;
}

NoiseRadius certified_noise_radius(const DualCertificate& cert, double eta) {
  if (!cert.verified || !(cert.t_actual > 0.0))
    throw std::invalid_argument("certified_noise_radius: certificate is not verified");
  if (!(eta >= 0.0)) throw std::invalid_argument("certified_noise_radius: eta must be >= 0");
  NoiseRadius out;
  out.r = cert.r;
  out.t_actual = cert.t_actual;
  out.radius = 2.0 * cert.r * eta / cert.t_actual;
  const double m = static_cast<double>(cert.nu.size());
  const double sg = cert.sigma;
  out.apriori_r_sq =
      m * sg * sg * (sg * sg / (16.0 * cert.mu * cert.mu) + 2.0 * static_cast<double>(cert.sparsity));
  return out;
}

} // namespace binsense::certs
