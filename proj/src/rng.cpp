#include "binsense/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "binsense/kernels.hpp"

namespace binsense::rng {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + kGamma + (h << 6) + (h >> 2)));
}

} // namespace

std::uint64_t Stream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Stream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  // u1 in (0,1] keeps the log finite.
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(a);
  have_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t Stream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  if (bound == 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % bound;
  }
}

std::uint64_t derive_key(std::uint64_t base, std::string_view purpose,
                         std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = mix64(base + kGamma);
  h = combine(h, fnv1a(purpose));
  for (const std::uint64_t v : labels) h = combine(h, v);
  return h;
}

EnsembleSpec EnsembleSpec::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian ensemble needs sigma > 0");
  return {Dist::gaussian, sigma};
}

EnsembleSpec EnsembleSpec::rademacher(double amplitude) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("rademacher ensemble needs amplitude > 0");
  return {Dist::rademacher, amplitude};
}

EnsembleSpec EnsembleSpec::bernoulli01() { return {Dist::bernoulli01, 0.5}; }

EnsembleSpec EnsembleSpec::parse(std::string_view name) {
  if (name == "gaussian") return gaussian(1.0);
  if (name == "rademacher") return rademacher(1.0);
  if (name == "bernoulli01") return bernoulli01();
  throw std::invalid_argument("unknown ensemble: " + std::string(name));
}

std::string EnsembleSpec::name() const {
  switch (dist) {
    case Dist::gaussian: return "gaussian";
    case Dist::rademacher: return "rademacher";
    case Dist::bernoulli01: return "bernoulli01";
  }
  return "?";
}

double EnsembleSpec::mean() const { return bias(); }

double EnsembleSpec::bias() const { return dist == Dist::bernoulli01 ? 0.5 : 0.0; }

double EnsembleSpec::sigma() const {
  switch (dist) {
    case Dist::gaussian: return param;
    case Dist::rademacher: return param;
    case Dist::bernoulli01: return 0.5;
  }
  return 0.0;
}

double EnsembleSpec::subgauss_norm() const {
  switch (dist) {
    // p^{-1/2} (E|g|^p)^{1/p} decreases in p for a centered normal, so the
    // supremum over p >= 1 sits at p = 1: E|g| = sigma * sqrt(2/pi).
    case Dist::gaussian: return param * std::sqrt(2.0 / std::numbers::pi);
    case Dist::rademacher: return param;
    case Dist::bernoulli01: return 0.5;
  }
  return 0.0;
}

Vec sample_generator(const EnsembleSpec& spec, std::size_t length, Stream& stream) {
  Vec out(length);
  switch (spec.dist) {
    case EnsembleSpec::Dist::gaussian:
      for (auto& v : out) v = spec.param * stream.next_gaussian();
      break;
    case EnsembleSpec::Dist::rademacher:
      for (auto& v : out) v = (stream.next_u64() & 1u) ? spec.param : -spec.param;
      break;
    case EnsembleSpec::Dist::bernoulli01:
      for (auto& v : out) v = (stream.next_u64() & 1u) ? 0.5 : -0.5;
      break;
  }
  return out;
}

std::vector<std::size_t> sample_selection(std::size_t n, std::size_t m, Stream& stream) {
  if (m > n) throw std::invalid_argument("sample_selection: m > n");
  // Partial Fisher-Yates over an index pool; first m slots are the sample.
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(stream.next_below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Vec BinarySignal::dense() const {
  Vec x(n, 0.0);
  for (const std::size_t i : support) x[i] = 1.0;
  return x;
}

BinarySignal BinarySignal::complement() const {
  BinarySignal c;
  c.n = n;
  c.support.reserve(n - support.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pos < support.size() && support[pos] == i) {
      ++pos;
    } else {
      c.support.push_back(i);
    }
  }
  return c;
}

BinarySignal sample_binary_signal(std::size_t n, std::size_t s, Stream& stream) {
  BinarySignal out;
  out.n = n;
  out.support = sample_selection(n, s, stream);
  return out;
}

Vec sample_noise(std::size_t m, double eta, Stream& stream) {
  if (!(eta >= 0.0)) throw std::invalid_argument("sample_noise: eta must be >= 0");
  Vec w(m, 0.0);
  if (m == 0 || eta == 0.0) return w;
  double norm2 = 0.0;
  while (norm2 == 0.0) {
    for (auto& v : w) v = stream.next_gaussian();
    norm2 = kernels::nrm2sq(w.data(), m);
  }
  kernels::scale(eta / std::sqrt(norm2), w.data(), m);
  return w;
}

} // namespace binsense::rng
