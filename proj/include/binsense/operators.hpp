#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "binsense/fft.hpp"
#include "binsense/mat.hpp"

namespace binsense::ops {

inline constexpr double kDefaultDenseBudgetMb = 256.0;

// Biased partial convolution-structured measurement operator
//
//   A = mu * ones(M, N) + G_theta
//
// where G is either an N x N circulant matrix built from a length-N
// generator b (G[k][j] = b[(j-k) mod N]) or an N x N Toeplitz matrix built
// from a length 2N-1 generator c (G[k][j] = c[j-k], diagonals stored with
// c_d at index d+N-1), and theta selects M of its rows. The bias is never
// materialized by the fast paths.
//
// Every matvec exists in two independent routes: a definitional dense route
// and a fast route that evaluates the full cyclic correlation/convolution
// by FFT (a Toeplitz matrix is handled as the top-left block of the
// (2N-1)-dimensional circulant that embeds it). apply()/apply_adjoint()
// pick whichever route is faster at the instance size.
//
// Instances are immutable after construction and safe to share across
// threads.
class Operator {
 public:
  enum class Kind { circulant, toeplitz };

  Operator(Kind kind, std::size_t n, Vec generator, std::vector<std::size_t> theta, double mu,
           double sigma = 0.0, double subgauss = 0.0, std::uint64_t seed = 0);

  Kind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return theta_.size(); }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double subgauss_norm() const { return subgauss_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::size_t>& theta() const { return theta_; }
  // Stored generator: length N (circulant) or 2N-1 (toeplitz).
  const Vec& generator() const { return gen_; }
  // Dimension of the circulant the fast path runs in: N or 2N-1.
  std::size_t ambient_dim() const { return ambient_; }

  // Generator entry for column-minus-row offset d (wraps for circulant).
  double gen_at(std::ptrdiff_t d) const;

  // y = mu * sum(x) * ones(M) + G_theta x
  Vec apply(const Vec& x) const;
  Vec apply_conv(const Vec& x) const;
  Vec apply_dense(const Vec& x) const;
  // G_theta x without the bias term.
  Vec apply_centered(const Vec& x) const;

  // x = mu * sum(v) * ones(N) + G_theta^T v
  Vec apply_adjoint(const Vec& v) const;
  Vec apply_adjoint_conv(const Vec& v) const;
  Vec apply_adjoint_dense(const Vec& v) const;
  Vec apply_adjoint_centered(const Vec& v) const;

  // Dense M x N matrix including the bias. Throws if the materialization
  // would exceed budget_mb megabytes.
  Mat to_dense(double budget_mb = kDefaultDenseBudgetMb) const;

  std::string manifest() const;
  static Operator parse_manifest(std::string_view text);

 private:
  Vec apply_rows(const Vec& x, bool biased) const;
  Vec apply_adjoint_rows(const Vec& v, bool biased) const;
  Vec apply_conv_impl(const Vec& x, bool biased) const;
  Vec apply_adjoint_conv_impl(const Vec& v, bool biased) const;
  void ambient_correlate(const double* x, double* out) const;
  void ambient_convolve(const double* x, double* out) const;

  Kind kind_;
  std::size_t n_;
  Vec gen_;
  std::vector<std::size_t> theta_;
  double mu_;
  double sigma_;
  double subgauss_;
  std::uint64_t seed_;

  std::size_t ambient_;
  Vec ambient_gen_;
  std::shared_ptr<fft::Radix2Fft> plan_;
  Vec spec_re_, spec_im_;  // FFT of the zero-padded ambient generator

  bool dense_route_;
  Mat rows_;  // centered row cache for the small-instance route, built eagerly
};

Operator make_circulant(Vec b, std::vector<std::size_t> theta, double mu, double sigma = 0.0,
                        double subgauss = 0.0, std::uint64_t seed = 0);
Operator make_toeplitz(Vec c, std::vector<std::size_t> theta, double mu, double sigma = 0.0,
                       double subgauss = 0.0, std::uint64_t seed = 0);

// Length 2N-1 circulant generator whose circulant has the Toeplitz matrix of
// c (length 2N-1, diagonal d at index d+N-1) as its top-left N x N block.
Vec embed_toeplitz_in_circulant(const Vec& c, std::size_t n);

} // namespace binsense::ops
