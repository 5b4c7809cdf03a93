#pragma once

#include <cstddef>

namespace btv::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void abs_axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double abs_sum_scalar(const double* a, std::size_t n);
double max_abs_scalar(const double* a, std::size_t n);

#if defined(BTV_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void abs_axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double abs_sum_avx2(const double* a, std::size_t n);
double max_abs_avx2(const double* a, std::size_t n);
#endif

}  // namespace btv::kernels::detail
