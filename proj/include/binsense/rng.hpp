#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "binsense/mat.hpp"

namespace binsense::rng {

// Counter-based stream: output k is a strong 64-bit mix of (key, k), so a
// stream is fully determined by its key and cheap to fork. Keys are derived
// by hashing a base seed together with a purpose label and numeric labels;
// distinct label tuples give statistically independent streams.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  // Uniform on [0,1) with 53 random bits.
  double next_unit();
  // Standard normal via Box-Muller (pairs cached).
  double next_gaussian();
  // Uniform on {0,...,bound-1}, unbiased (rejection). bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

std::uint64_t derive_key(std::uint64_t base, std::string_view purpose,
                         std::initializer_list<std::uint64_t> labels = {});

// Generator entry distribution. All ensembles are stored as a centered
// (mean-zero) law plus a separately reported additive bias:
//   gaussian(p):    N(0, p^2), bias 0
//   rademacher(p):  +-p equiprobable, bias 0
//   bernoulli01:    +-1/2 equiprobable, bias 1/2 (bias + draw is 0 or 1)
struct EnsembleSpec {
  enum class Dist { gaussian, rademacher, bernoulli01 };

  Dist dist = Dist::gaussian;
  double param = 1.0;  // sigma for gaussian, amplitude for rademacher; unused otherwise

  static EnsembleSpec gaussian(double sigma);
  static EnsembleSpec rademacher(double amplitude);
  static EnsembleSpec bernoulli01();
  static EnsembleSpec parse(std::string_view name);

  std::string name() const;
  // Mean of the full (uncentered) law; equals bias().
  double mean() const;
  double bias() const;
  // Standard deviation of the centered part.
  double sigma() const;
  // Subgaussian norm of the centered part: sup_p p^{-1/2} (E|X|^p)^{1/p}.
  double subgauss_norm() const;
};

// Draws `length` centered entries.
Vec sample_generator(const EnsembleSpec& spec, std::size_t length, Stream& stream);

// m distinct indices from {0,...,n-1}, uniformly over m-subsets, returned sorted.
std::vector<std::size_t> sample_selection(std::size_t n, std::size_t m, Stream& stream);

// 0/1 vector with support bookkeeping.
struct BinarySignal {
  std::size_t n = 0;
  std::vector<std::size_t> support;  // sorted

  std::size_t sparsity() const { return support.size(); }
  Vec dense() const;
  BinarySignal complement() const;
};

BinarySignal sample_binary_signal(std::size_t n, std::size_t s, Stream& stream);

// Gaussian direction rescaled so its Euclidean norm is exactly eta.
Vec sample_noise(std::size_t m, double eta, Stream& stream);

} // namespace binsense::rng
