#pragma once

#include <string>

#include "binsense/mat.hpp"
#include "binsense/operators.hpp"
#include "binsense/rng.hpp"

// Numerical audit of the analysis behind the certificate construction: the
// three scalar terms a margin decomposes into, their representer matrices,
// norm bounds, exact expectations, and concentration behaviour under fresh
// generator draws on a fixed (theta, S) frame. Everything here is dense and
// intended for moderate dimensions.
namespace binsense::proofs {

struct XTerms {
  double x1 = 0.0;  // sum_{l in theta} b[(i-l) mod n]
  double x2 = 0.0;  // sum_{k in S} sum_{j in theta} b[(k-j) mod n] b[(i-j) mod n]
  double x3 = 0.0;  // sum_{k in S} sum_{m,l in theta} b[(k-m) mod n] b[(i-l) mod n]
};

XTerms x_terms(std::size_t n, const std::vector<std::size_t>& theta,
               const std::vector<std::size_t>& support, std::size_t i, const Vec& b);
// Same over a centered circulant operator's frame; b is a generator draw.
XTerms x_terms(const ops::Operator& op, const std::vector<std::size_t>& support, std::size_t i,
               const Vec& b);

// 0/1 matrix L with <b, L b> = x2(i): rows supported on i - theta, row j
// carrying the indicator of j - i + S.
Mat representer_x2(std::size_t n, const std::vector<std::size_t>& theta,
                   const std::vector<std::size_t>& support, std::size_t i);

struct X3Representer {
  Mat k1;  // indicator of (i - theta) x theta
  Mat k2;  // rows on theta, row q carrying the indicator of S - q
  Mat l3;  // k1 * k2; <b, l3 b> = x3(i)
};

X3Representer representer_x3(std::size_t n, const std::vector<std::size_t>& theta,
                             const std::vector<std::size_t>& support, std::size_t i);

// K = L^T L for the selection-gram: K[p][q] = |theta cap (S-p) cap (S-q)|,
// <b, K b> = ||G_theta 1_S||_2^2 for circulant G built from b.
Mat gram_representer(std::size_t n, const std::vector<std::size_t>& theta,
                     const std::vector<std::size_t>& support);

struct NormAudit {
  double hs_norm = 0.0;         // Frobenius
  double op_norm = 0.0;         // largest singular value via power iteration
  double gershgorin_bound = 0.0;  // max absolute row sum
};

NormAudit norm_audit(const Mat& a);

double expected_x2(std::size_t m, double sigma, bool in_support);
double expected_x2(const ops::Operator& op, const std::vector<std::size_t>& support,
                   std::size_t i);

// E[b_{k-.} b_{i-.}] pair contribution: |theta cap ((k-i)+theta)| sigma^2.
double pair_expectation(std::size_t n, const std::vector<std::size_t>& theta, std::size_t k,
                        std::size_t i, double sigma);
double expected_x3(std::size_t n, const std::vector<std::size_t>& theta,
                   const std::vector<std::size_t>& support, std::size_t i, double sigma);
double expected_x3(const ops::Operator& op, const std::vector<std::size_t>& support,
                   std::size_t i);

// E ||G_theta 1_S||_2^2 = M s sigma^2.
double expected_gram(std::size_t m, std::size_t s, double sigma);

struct SweepConfig {
  std::size_t n = 0;
  std::vector<std::size_t> theta;
  std::vector<std::size_t> support;
  std::vector<std::size_t> indices;  // audited coordinates
  rng::EnsembleSpec ensemble;
  std::uint64_t base_seed = 0;
};

struct ExpectationReport {
  std::string term;  // "x1", "x2", "x3"
  std::size_t index = 0;
  double formula = 0.0;
  double empirical_mean = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  double tail2_freq = 0.0;  // fraction of draws beyond 2 sample std devs
  double tail3_freq = 0.0;
  bool degenerate = false;  // sample variance at machine zero
  std::size_t trials = 0;
};

std::vector<ExpectationReport> concentration_sweep(const SweepConfig& config, std::size_t trials);

} // namespace binsense::proofs
