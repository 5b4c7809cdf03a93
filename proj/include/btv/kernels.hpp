#pragma once

// Data-parallel inner loops used by the solvers, simulators and set
// operations. Every kernel has a scalar reference implementation; an AVX2
// variant is compiled on x86-64 and chosen at runtime when the CPU supports
// it. Setting BTV_FORCE_SCALAR=1 in the environment pins the scalar path.

#include <cstddef>
#include <span>

#include "btv/types.hpp"

namespace btv::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += alpha * |x|
  void (*abs_axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*abs_sum)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);
Isa active_isa();
// Throws btv::Error if the requested variant is unavailable on this machine.
void set_active_isa(Isa isa);
const char* isa_name(Isa isa);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void abs_axpy(double alpha, std::span<const double> x,
                     std::span<double> y) {
  active().abs_axpy(alpha, x.data(), y.data(), x.size());
}
inline double abs_sum(std::span<const double> a) {
  return active().abs_sum(a.data(), a.size());
}
inline double max_abs(std::span<const double> a) {
  return active().max_abs(a.data(), a.size());
}

// Column-major helpers built on the table above.

/// y = M * x for a column-major M.
void gemv(const Matrix& m, const double* x, double* y);
/// y = M * x + N * u
void gemv2(const Matrix& m, const double* x, const Matrix& n, const double* u,
           double* y);
/// out = |M| * w (w componentwise non-negative).
void abs_gemv(const Matrix& m, const double* w, double* out);

}  // namespace btv::kernels
