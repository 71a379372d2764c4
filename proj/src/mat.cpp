#include "binsense/mat.hpp"

#include "binsense/kernels.hpp"

namespace binsense {

Vec matvec(const Mat& a, const Vec& x) {
  if (x.size() != a.cols) throw std::invalid_argument("matvec: size mismatch");
  Vec y(a.rows, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) y[r] = kernels::dot(a.row(r), x.data(), a.cols);
  return y;
}

Vec matvec_transpose(const Mat& a, const Vec& v) {
  if (v.size() != a.rows) throw std::invalid_argument("matvec_transpose: size mismatch");
  Vec y(a.cols, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) kernels::axpy(v[r], a.row(r), y.data(), a.cols);
  return y;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: size mismatch");
  Mat c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double f = a.at(i, k);
      if (f != 0.0) kernels::axpy(f, b.row(k), c.row(i), b.cols);
    }
  }
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

} // namespace binsense
