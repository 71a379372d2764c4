#include "binsense/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace binsense::kernels {

namespace ref {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double nrm2sq(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double diff_nrm2sq(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void add_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += alpha;
}

void clip(double lo, double hi, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::min(hi, std::max(lo, x[i]));
}

void cmul(double* ar, double* ai, const double* br, const double* bi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = ar[i] * br[i] - ai[i] * bi[i];
    const double im = ar[i] * bi[i] + ai[i] * br[i];
    ar[i] = re;
    ai[i] = im;
  }
}

void cmul_conj(double* ar, double* ai, const double* br, const double* bi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = ar[i] * br[i] + ai[i] * bi[i];
    const double im = ai[i] * br[i] - ar[i] * bi[i];
    ar[i] = re;
    ai[i] = im;
  }
}

} // namespace ref

#if defined(BINSENSE_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double nrm2sq(const double* a, std::size_t n);
double diff_nrm2sq(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void add_scalar(double alpha, double* x, std::size_t n);
void clip(double lo, double hi, double* x, std::size_t n);
void cmul(double* ar, double* ai, const double* br, const double* bi, std::size_t n);
void cmul_conj(double* ar, double* ai, const double* br, const double* bi, std::size_t n);
} // namespace avx2
#endif

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  double (*diff_nrm2sq)(const double*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*add_scalar)(double, double*, std::size_t);
  void (*clip)(double, double, double*, std::size_t);
  void (*cmul)(double*, double*, const double*, const double*, std::size_t);
  void (*cmul_conj)(double*, double*, const double*, const double*, std::size_t);
};

constexpr Table kScalarTable = {
    ref::dot,  ref::sum,        ref::nrm2sq, ref::diff_nrm2sq, ref::max_abs, ref::axpy,
    ref::scale, ref::add_scalar, ref::clip,   ref::cmul,        ref::cmul_conj,
};

#if defined(BINSENSE_HAVE_AVX2)
constexpr Table kAvx2Table = {
    avx2::dot,  avx2::sum,        avx2::nrm2sq, avx2::diff_nrm2sq, avx2::max_abs, avx2::axpy,
    avx2::scale, avx2::add_scalar, avx2::clip,   avx2::cmul,        avx2::cmul_conj,
};
#endif

bool avx2_available() {
#if defined(BINSENSE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect_isa() {
  if (const char* env = std::getenv("BINSENSE_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Isa::avx2;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

struct State {
  Isa isa;
  const Table* table;
};

State& state() {
  static State s = [] {
    State init;
    init.isa = detect_isa();
#if defined(BINSENSE_HAVE_AVX2)
    init.table = (init.isa == Isa::avx2) ? &kAvx2Table : &kScalarTable;
#else
    init.table = &kScalarTable;
#endif
    return init;
  }();
  return s;
}

} // namespace

Isa active_isa() { return state().isa; }

bool select_isa(Isa isa) {
  if (isa == Isa::avx2) {
    if (!avx2_available()) return false;
#if defined(BINSENSE_HAVE_AVX2)
    state().isa = Isa::avx2;
    state().table = &kAvx2Table;
    return true;
#else
    return false;
#endif
  }
  state().isa = Isa::scalar;
  state().table = &kScalarTable;
  return true;
}

void reset_isa() {
  const Isa isa = detect_isa();
  select_isa(isa);
}

double dot(const double* a, const double* b, std::size_t n) { return state().table->dot(a, b, n); }
double sum(const double* a, std::size_t n) { return state().table->sum(a, n); }
double nrm2sq(const double* a, std::size_t n) { return state().table->nrm2sq(a, n); }
double diff_nrm2sq(const double* a, const double* b, std::size_t n) {
  return state().table->diff_nrm2sq(a, b, n);
}
double max_abs(const double* a, std::size_t n) { return state().table->max_abs(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  state().table->axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) { state().table->scale(alpha, x, n); }
void add_scalar(double alpha, double* x, std::size_t n) { state().table->add_scalar(alpha, x, n); }
void clip(double lo, double hi, double* x, std::size_t n) { state().table->clip(lo, hi, x, n); }
void cmul(double* ar, double* ai, const double* br, const double* bi, std::size_t n) {
  state().table->cmul(ar, ai, br, bi, n);
}
void cmul_conj(double* ar, double* ai, const double* br, const double* bi, std::size_t n) {
  state().table->cmul_conj(ar, ai, br, bi, n);
}

} // namespace binsense::kernels
