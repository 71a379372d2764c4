#pragma once

#include <optional>

#include "binsense/lp.hpp"
#include "binsense/operators.hpp"
#include "binsense/rng.hpp"

namespace binsense::certs {

// The sparser of x0 and its complement, used as the certificate's seed vector.
struct SymmetrizedSignal {
  rng::BinarySignal beta0;
  bool flipped = false;  // true when beta0 = 1 - x0
};

SymmetrizedSignal symmetrize(const rng::BinarySignal& x0);

struct MarginReport {
  bool verified = false;
  double t_actual = 0.0;        // min over coordinates of the achieved margin
  double worst_on_support = 0.0;   // max of margins over S (wants <= -t)
  double worst_off_support = 0.0;  // min of margins over S^c (wants >= +t)
};

// Dual vector over the selected rows whose back-projection separates the
// support: (A^T nu)_i <= -t on S and >= +t off S for some t > 0. Uniqueness
// of 1_S (and of 1_{S^c}) for the box-constrained program follows whenever
// such a vector exists.
struct DualCertificate {
  Vec nu;             // length M
  double rho = 0.0;   // constant row offset used by the analytic construction
  double t_target = 0.0;  // margin the analytic construction aims for
  Vec margins;        // A^T nu, length N
  bool verified = false;
  double t_actual = 0.0;
  double r = 0.0;     // ||nu||_2
  std::vector<std::size_t> support;  // the S the margins were checked against
  // Instance parameters captured for the noise radius computations.
  double sigma = 0.0;
  double mu = 0.0;
  std::size_t sparsity = 0;  // |supp(beta0)|
};

// Analytic construction: with beta0 the symmetrized signal, rho =
// -sigma^2/(4 mu) and w = G_theta beta0 (centered), the certificate is the
// negation of rho * 1 + w - mean(w) * 1, aiming for t_target = M sigma^2/16.
// Requires op.mu() > 0 and op.sigma() > 0.
DualCertificate build_certificate(const ops::Operator& op, const rng::BinarySignal& x0);

// Margin audit of an arbitrary candidate nu against support S.
MarginReport verify_certificate(const ops::Operator& op, const Vec& nu,
                                const std::vector<std::size_t>& support);

struct CertificateSearch {
  Vec nu;
  double t_best = 0.0;
};

// LP search for the best-margin certificate with ||nu||_inf <= 1:
//   max t  s.t.  (A^T nu)_i <= -t on S, (A^T nu)_i >= t off S.
// The program is always feasible (t = 0); returns nullopt when the optimum
// does not clear threshold (no separating certificate of useful margin).
std::optional<CertificateSearch> search_certificate_lp(const ops::Operator& op,
                                                       const std::vector<std::size_t>& support,
                                                       const solvers::SolverOptions& opts = {},
                                                       double threshold = 1e-6);

// A-priori recovery error bound sqrt(9 (16 sigma^2/mu^2 + min(s, N-s)) /
// (M sigma^2)) * eta for noise level eta. Requires m > 0, sigma > 0, mu > 0.
double noise_error_bound(std::size_t s, std::size_t n, std::size_t m, double sigma, double mu,
                         double eta);

struct NoiseRadius {
  double radius = 0.0;        // 2 r eta / t_actual
  double r = 0.0;             // ||nu||_2
  double t_actual = 0.0;
  double apriori_r_sq = 0.0;  // M sigma^2 (sigma^2/(16 mu^2) + 2 s)
};

// Error radius certified by a verified certificate at noise level eta.
// Throws if the certificate is unverified or has no positive margin.
NoiseRadius certified_noise_radius(const DualCertificate& cert, double eta);

} // namespace binsense::certs
