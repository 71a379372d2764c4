#pragma once

#include <cstddef>

// Dense vector kernels used by the operator, solver and FFT layers.
// Every kernel has a portable scalar reference implementation (kernels::ref)
// and may have an AVX2 variant; the top-level entry points dispatch at runtime.
namespace binsense::kernels {

enum class Isa { scalar, avx2 };

// Currently dispatched instruction set.
Isa active_isa();

// Force a specific variant (used by tests and the BINSENSE_SIMD env override).
// Returns false if the requested variant is unavailable on this machine.
bool select_isa(Isa isa);

// Restore auto-detection.
void reset_isa();

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double nrm2sq(const double* a, std::size_t n);
double diff_nrm2sq(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void add_scalar(double alpha, double* x, std::size_t n);
void clip(double lo, double hi, double* x, std::size_t n);

// Split-complex pointwise products: (ar,ai) *= (br,bi), optionally conjugating b.
void cmul(double* ar, double* ai, const double* br, const double* bi, std::size_t n);
void cmul_conj(double* ar, double* ai, const double* br, const double* bi, std::size_t n);

namespace ref {
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
} // namespace ref

} // namespace binsense::kernels
