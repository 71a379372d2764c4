#include "binsense/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "binsense/kernels.hpp"

namespace binsense::ops {

namespace {

// Instances at or below this column count use the cached dense-row route for
// apply()/apply_adjoint(); above it the FFT route wins.
constexpr std::size_t kDenseRouteMaxCols = 512;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_finite(const Vec& v, const char* what) {
  for (const double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " has non-finite entry");
  }
}

} // namespace

Vec embed_toeplitz_in_circulant(const Vec& c, std::size_t n) {
  if (n == 0) throw std::invalid_argument("embed_toeplitz_in_circulant: n must be positive");
  if (c.size() != 2 * n - 1)
    throw std::invalid_argument("embed_toeplitz_in_circulant: generator must have length 2N-1");
  // g[m] = c_m for 0 <= m <= N-1 and g[m] = c_{m-(2N-1)} for N <= m <= 2N-2,
  // with diagonal d stored at c[d+N-1].
  Vec g(2 * n - 1);
  for (std::size_t m = 0; m + 1 <= n; ++m) g[m] = c[m + n - 1];
  for (std::size_t m = n; m + 2 <= 2 * n; ++m) g[m] = c[m - n];
  return g;
}

Operator::Operator(Kind kind, std::size_t n, Vec generator, std::vector<std::size_t> theta,
                   double mu, double sigma, double subgauss, std::uint64_t seed)
    : kind_(kind),
      n_(n),
      gen_(std::move(generator)),
      theta_(std::move(theta)),
      mu_(mu),
      sigma_(sigma),
      subgauss_(subgauss),
      seed_(seed) {
  if (n_ == 0) throw std::invalid_argument("operator: n must be positive");
  const std::size_t want = kind_ == Kind::circulant ? n_ : 2 * n_ - 1;
  if (gen_.size() != want) throw std::invalid_argument("operator: generator has wrong length");
  if (theta_.empty()) throw std::invalid_argument("operator: row selection is empty");
  if (!std::isfinite(mu_)) throw std::invalid_argument("operator: mu is not finite");
  check_finite(gen_, "operator generator");
  std::sort(theta_.begin(), theta_.end());
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    if (theta_[i] >= n_) throw std::invalid_argument("operator: row index out of range");
    if (i > 0 && theta_[i] == theta_[i - 1])
      throw std::invalid_argument("operator: duplicate row index");
  }

  ambient_ = kind_ == Kind::circulant ? n_ : 2 * n_ - 1;
  ambient_gen_ = kind_ == Kind::circulant ? gen_ : embed_toeplitz_in_circulant(gen_, n_);

  const std::size_t p = fft::next_pow2(2 * ambient_ - 1);
  plan_ = std::make_shared<fft::Radix2Fft>(p);
  spec_re_.assign(p, 0.0);
  spec_im_.assign(p, 0.0);
  std::copy(ambient_gen_.begin(), ambient_gen_.end(), spec_re_.begin());
  plan_->forward(spec_re_.data(), spec_im_.data());

  dense_route_ = n_ <= kDenseRouteMaxCols;
  if (dense_route_) {
    rows_ = Mat(theta_.size(), n_);
    for (std::size_t r = 0; r < theta_.size(); ++r) {
      const auto k = static_cast<std::ptrdiff_t>(theta_[r]);
      for (std::size_t j = 0; j < n_; ++j)
        rows_.at(r, j) = gen_at(static_cast<std::ptrdiff_t>(j) - k);
    }
  }
}

double Operator::gen_at(std::ptrdiff_t d) const {
  if (kind_ == Kind::circulant) {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    std::ptrdiff_t r = d % n;
    if (r < 0) r += n;
    return gen_[static_cast<std::size_t>(r)];
  }
  const auto n = static_cast<std::ptrdiff_t>(n_);
  if (d <= -n || d >= n) throw std::out_of_range("toeplitz generator offset out of range");
  return gen_[static_cast<std::size_t>(d + n - 1)];
}

void Operator::ambient_correlate(const double* x, double* out) const {
  const std::size_t p = plan_->size();
  const std::size_t nn = ambient_;
  static thread_local Vec re, im;
  re.assign(p, 0.0);
  im.assign(p, 0.0);
  std::copy(x, x + nn, re.begin());
  plan_->forward(re.data(), im.data());
  kernels::cmul_conj(re.data(), im.data(), spec_re_.data(), spec_im_.data(), p);
  plan_->inverse(re.data(), im.data());
  // Fold the linear correlation (lags -(nn-1)..nn-1, negative lags wrapped to
  // the top of the length-p buffer) into the length-nn cyclic correlation.
  out[0] = re[0];
  for (std::size_t k = 1; k < nn; ++k) out[k] = re[k] + re[p - nn + k];
}

void Operator::ambient_convolve(const double* x, double* out) const {
  const std::size_t p = plan_->size();
  const std::size_t nn = ambient_;
  static thread_local Vec re, im;
  re.assign(p, 0.0);
  im.assign(p, 0.0);
  std::copy(x, x + nn, re.begin());
  plan_->forward(re.data(), im.data());
  kernels::cmul(re.data(), im.data(), spec_re_.data(), spec_im_.data(), p);
  plan_->inverse(re.data(), im.data());
  // Linear convolution occupies 0..2nn-2; wrap the tail.
  for (std::size_t j = 0; j < nn; ++j) {
    double v = re[j];
    if (j + nn <= 2 * nn - 2) v += re[j + nn];
    out[j] = v;
  }
}

Vec Operator::apply_conv_impl(const Vec& x, bool biased) const {
  if (x.size() != n_) throw std::invalid_argument("apply: x has wrong length");
  static thread_local Vec amb, full;
  amb.assign(ambient_, 0.0);
  std::copy(x.begin(), x.end(), amb.begin());
  full.resize(ambient_);
  ambient_correlate(amb.data(), full.data());
  const double bias = biased ? mu_ * kernels::sum(x.data(), x.size()) : 0.0;
  Vec y(theta_.size());
  for (std::size_t r = 0; r < theta_.size(); ++r) y[r] = full[theta_[r]] + bias;
  return y;
}

Vec Operator::apply_adjoint_conv_impl(const Vec& v, bool biased) const {
  if (v.size() != theta_.size()) throw std::invalid_argument("apply_adjoint: v has wrong length");
  static thread_local Vec amb, full;
  amb.assign(ambient_, 0.0);
  for (std::size_t r = 0; r < theta_.size(); ++r) amb[theta_[r]] = v[r];
  full.resize(ambient_);
  ambient_convolve(amb.data(), full.data());
  const double bias = biased ? mu_ * kernels::sum(v.data(), v.size()) : 0.0;
  Vec out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = full[j] + bias;
  return out;
}

Vec Operator::apply_rows(const Vec& x, bool biased) const {
  if (x.size() != n_) throw std::invalid_argument("apply: x has wrong length");
  const double bias = biased ? mu_ * kernels::sum(x.data(), x.size()) : 0.0;
  Vec y(theta_.size());
  for (std::size_t r = 0; r < theta_.size(); ++r)
    y[r] = kernels::dot(rows_.row(r), x.data(), n_) + bias;
  return y;
}

Vec Operator::apply_adjoint_rows(const Vec& v, bool biased) const {
  if (v.size() != theta_.size()) throw std::invalid_argument("apply_adjoint: v has wrong length");
  Vec out(n_, 0.0);
  for (std::size_t r = 0; r < theta_.size(); ++r)
    if (v[r] != 0.0) kernels::axpy(v[r], rows_.row(r), out.data(), n_);
  if (biased) {
    const double bias = mu_ * kernels::sum(v.data(), v.size());
    kernels::add_scalar(bias, out.data(), n_);
  }
  return out;
}

Vec Operator::apply(const Vec& x) const {
  return dense_route_ ? apply_rows(x, true) : apply_conv_impl(x, true);
}

Vec Operator::apply_conv(const Vec& x) const { return apply_conv_impl(x, true); }

Vec Operator::apply_centered(const Vec& x) const {
  return dense_route_ ? apply_rows(x, false) : apply_conv_impl(x, false);
}

Vec Operator::apply_dense(const Vec& x) const {
  if (x.size() != n_) throw std::invalid_argument("apply: x has wrong length");
  const double bias = mu_ * kernels::ref::sum(x.data(), x.size());
  Vec y(theta_.size(), 0.0);
  for (std::size_t r = 0; r < theta_.size(); ++r) {
    const auto k = static_cast<std::ptrdiff_t>(theta_[r]);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      acc += gen_at(static_cast<std::ptrdiff_t>(j) - k) * x[j];
    y[r] = acc + bias;
  }
  return y;
}

Vec Operator::apply_adjoint(const Vec& v) const {
  return dense_route_ ? apply_adjoint_rows(v, true) : apply_adjoint_conv_impl(v, true);
}

Vec Operator::apply_adjoint_conv(const Vec& v) const { return apply_adjoint_conv_impl(v, true); }

Vec Operator::apply_adjoint_centered(const Vec& v) const {
  return dense_route_ ? apply_adjoint_rows(v, false) : apply_adjoint_conv_impl(v, false);
}

Vec Operator::apply_adjoint_dense(const Vec& v) const {
  if (v.size() != theta_.size()) throw std::invalid_argument("apply_adjoint: v has wrong length");
  const double bias = mu_ * kernels::ref::sum(v.data(), v.size());
  Vec out(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    double acc = 0.0;
    for (std::size_t r = 0; r < theta_.size(); ++r)
      acc += gen_at(jj - static_cast<std::ptrdiff_t>(theta_[r])) * v[r];
    out[j] = acc + bias;
  }
  return out;
}

Mat Operator::to_dense(double budget_mb) const {
  const double bytes =
      static_cast<double>(theta_.size()) * static_cast<double>(n_) * sizeof(double);
  if (bytes > budget_mb * 1048576.0)
    throw std::runtime_error("to_dense: materialization exceeds the memory budget of " +
                             format_double(budget_mb) + " MB");
  Mat a(theta_.size(), n_);
  for (std::size_t r = 0; r < theta_.size(); ++r) {
    const auto k = static_cast<std::ptrdiff_t>(theta_[r]);
    for (std::size_t j = 0; j < n_; ++j)
      a.at(r, j) = mu_ + gen_at(static_cast<std::ptrdiff_t>(j) - k);
  }
  return a;
}

std::string Operator::manifest() const {
  std::ostringstream out;
  out << (kind_ == Kind::circulant ? "circulant" : "toeplitz") << ' ' << n_ << ' '
      << theta_.size() << ' ' << format_double(mu_) << ' ' << format_double(sigma_) << ' '
      << format_double(subgauss_) << ' ' << seed_ << '\n';
  for (std::size_t i = 0; i < gen_.size(); ++i) {
    if (i) out << ' ';
    out << format_double(gen_[i]);
  }
  out << '\n';
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    if (i) out << ' ';
    out << theta_[i];
  }
  out << '\n';
  return out.str();
}

Operator Operator::parse_manifest(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind_word;
  std::size_t n = 0, m = 0;
  double mu = 0.0, sigma = 0.0, subgauss = 0.0;
  std::uint64_t seed = 0;
  if (!(in >> kind_word >> n >> m >> mu >> sigma >> subgauss >> seed))
    throw std::invalid_argument("operator manifest: bad header");
  Kind kind;
  if (kind_word == "circulant") {
    kind = Kind::circulant;
  } else if (kind_word == "toeplitz") {
    kind = Kind::toeplitz;
  } else {
    throw std::invalid_argument("operator manifest: unknown kind '" + kind_word + "'");
  }
  if (n == 0) throw std::invalid_argument("operator manifest: N must be positive");
  const std::size_t gen_len = kind == Kind::circulant ? n : 2 * n - 1;
  Vec gen(gen_len);
  for (auto& v : gen) {
    if (!(in >> v)) throw std::invalid_argument("operator manifest: truncated generator");
  }
  std::vector<std::size_t> theta(m);
  for (auto& t : theta) {
    if (!(in >> t)) throw std::invalid_argument("operator manifest: truncated row selection");
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("operator manifest: trailing tokens");
  return Operator(kind, n, std::move(gen), std::move(theta), mu, sigma, subgauss, seed);
}

Operator make_circulant(Vec b, std::vector<std::size_t> theta, double mu, double sigma,
                        double subgauss, std::uint64_t seed) {
  const std::size_t n = b.size();
  return Operator(Operator::Kind::circulant, n, std::move(b), std::move(theta), mu, sigma,
                  subgauss, seed);
}

Operator make_toeplitz(Vec c, std::vector<std::size_t> theta, double mu, double sigma,
                       double subgauss, std::uint64_t seed) {
  if (c.empty() || c.size() % 2 == 0)
    throw std::invalid_argument("make_toeplitz: generator must have odd length 2N-1");
  const std::size_t n = (c.size() + 1) / 2;
  return Operator(Operator::Kind::toeplitz, n, std::move(c), std::move(theta), mu, sigma,
                  subgauss, seed);
}

} // namespace binsense::ops
