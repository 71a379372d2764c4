#pragma once

#include <cstddef>
#include <vector>

namespace binsense::fft {

// Smallest power of two >= x (x >= 1).
std::size_t next_pow2(std::size_t x);

// Iterative radix-2 transform on split real/imaginary arrays of fixed
// power-of-two length. Twiddles and the bit-reversal permutation are
// precomputed at construction so a plan can be reused across calls.
class Radix2Fft {
 public:
  explicit Radix2Fft(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(double* re, double* im) const;
  void inverse(double* re, double* im) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<double> wr_;  // cos(-2*pi*k/n), k < n/2
  std::vector<double> wi_;  // sin(-2*pi*k/n)
};

} // namespace binsense::fft
