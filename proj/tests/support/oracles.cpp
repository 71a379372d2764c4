#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace testsupport {

std::vector<double> jacobi_eigenvalues(Mat a) {
  if (a.rows != a.cols) throw std::invalid_argument("jacobi: matrix must be square");
  const std::size_t n = a.rows;
  for (std::size_t sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    if (off <= 1e-26 * (1.0 + std::fabs(a.at(0, 0)))) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a.at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double spectral_norm(const Mat& a) {
  Mat g(a.cols, a.cols);
  for (std::size_t i = 0; i < a.cols; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.rows; ++k) acc += a.at(k, i) * a.at(k, j);
      g.at(i, j) = acc;
    }
  }
  const std::vector<double> eig = jacobi_eigenvalues(g);
  return eig.empty() ? 0.0 : std::sqrt(std::max(0.0, eig.back()));
}

void naive_dft(const Vec& re, const Vec& im, Vec& out_re, Vec& out_im) {
  const std::size_t n = re.size();
  out_re.assign(n, 0.0);
  out_im.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(j) /
                         static_cast<double>(n);
      const double c = std::cos(ang);
      const double s = std::sin(ang);
      out_re[k] += re[j] * c - im[j] * s;
      out_im[k] += re[j] * s + im[j] * c;
    }
  }
}

bool solve_linear(Mat a, Vec b, Vec& out) {
  if (a.rows != a.cols || b.size() != a.rows) throw std::invalid_argument("solve_linear: shape");
  const std::size_t n = a.rows;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a.at(r, col)) > std::fabs(a.at(piv, col))) piv = r;
    if (std::fabs(a.at(piv, col)) < 1e-12) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(piv, j), a.at(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a.at(r, col) / a.at(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a.at(r, j) -= f * a.at(col, j);
      b[r] -= f * b[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a.at(i, j) * out[j];
    out[i] = acc / a.at(i, i);
  }
  return true;
}

EnumLpResult enumerate_lp(const Mat& a, const Vec& b, const Vec& c, const Vec& lo, const Vec& up,
                          double feas_tol) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  for (std::size_t j = 0; j < n; ++j)
    if (!std::isfinite(lo[j]) || !std::isfinite(up[j]))
      throw std::invalid_argument("enumerate_lp: bounds must be finite");
  if (m > n) throw std::invalid_argument("enumerate_lp: more rows than columns");

  EnumLpResult best;
  std::vector<std::size_t> basis(m);
  Vec x(n);

  // All m-subsets of columns in lexicographic order.
  for (std::size_t i = 0; i < m; ++i) basis[i] = i;
  for (;;) {
    const std::size_t free_count = n - m;
    std::vector<std::size_t> nonbasis;
    nonbasis.reserve(free_count);
    {
      std::size_t bi = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (bi < m && basis[bi] == j) {
          ++bi;
        } else {
          nonbasis.push_back(j);
        }
      }
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_count); ++mask) {
      Vec rhs = b;
      for (std::size_t t = 0; t < free_count; ++t) {
        const std::size_t j = nonbasis[t];
        const double v = (mask >> t) & 1 ? up[j] : lo[j];
        x[j] = v;
        for (std::size_t r = 0; r < m; ++r) rhs[r] -= a.at(r, j) * v;
      }
      Mat ab(m, m);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t i = 0; i < m; ++i) ab.at(r, i) = a.at(r, basis[i]);
      Vec xb;
      if (!solve_linear(ab, rhs, xb)) continue;
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i)
        ok = xb[i] >= lo[basis[i]] - feas_tol && xb[i] <= up[basis[i]] + feas_tol;
      if (!ok) continue;
      for (std::size_t i = 0; i < m; ++i) x[basis[i]] = xb[i];
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += c[j] * x[j];
      if (!best.feasible || obj < best.objective) {
        best.feasible = true;
        best.objective = obj;
        best.x = x;
      }
    }
    // Next subset.
    bool advanced = false;
    for (std::size_t i = m; i-- > 0;) {
      if (basis[i] != i + n - m) {
        ++basis[i];
        for (std::size_t j = i + 1; j < m; ++j) basis[j] = basis[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return best;
  }
}

} // namespace testsupport
