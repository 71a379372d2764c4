#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace binsense {

using Vec = std::vector<double>;

// Minimal dense row-major matrix.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

Vec matvec(const Mat& a, const Vec& x);
// x = A^T v
Vec matvec_transpose(const Mat& a, const Vec& v);
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);

} // namespace binsense
