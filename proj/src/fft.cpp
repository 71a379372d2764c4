#include "binsense/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "binsense/kernels.hpp"

namespace binsense::fft {

std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

Radix2Fft::Radix2Fft(std::size_t n) : n_(n) {
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
  rev_.resize(n);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    rev_[i] = r;
  }
  const std::size_t half = n / 2;
  wr_.resize(half ? half : 1);
  wi_.resize(half ? half : 1);
  for (std::size_t k = 0; k < half; ++k) {
    const double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    wr_[k] = std::cos(ang);
    wi_[k] = std::sin(ang);
  }
}

void Radix2Fft::forward(double* re, double* im) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = rev_[i];
    if (j > i) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const double cw = wr_[j * step];
        const double sw = wi_[j * step];
        const std::size_t a = start + j;
        const std::size_t b = a + half;
        const double tr = re[b] * cw - im[b] * sw;
        const double ti = re[b] * sw + im[b] * cw;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
      }
    }
  }
}

void Radix2Fft::inverse(double* re, double* im) const {
  const std::size_t n = n_;
  kernels::scale(-1.0, im, n);
  forward(re, im);
  kernels::scale(-1.0, im, n);
  const double s = 1.0 / static_cast<double>(n);
  kernels::scale(s, re, n);
  kernels::scale(s, im, n);
}

} // namespace binsense::fft
