#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

#include "btv/kernels.hpp"
#include "kernel_impl.hpp"

namespace btv::kernels {
namespace {

const KernelTable kScalar{detail::dot_scalar, detail::axpy_scalar,
                          detail::abs_axpy_scalar, detail::abs_sum_scalar,
                          detail::max_abs_scalar};

#if defined(BTV_HAVE_AVX2)
const KernelTable kAvx2{detail::dot_avx2, detail::axpy_avx2,
                        detail::abs_axpy_avx2, detail::abs_sum_avx2,
                        detail::max_abs_avx2};
#endif

Isa initial_isa() {
  const char* force = std::getenv("BTV_FORCE_SCALAR");
  if (force != nullptr && std::strcmp(force, "0") != 0 && force[0] != '\0')
    return Isa::kScalar;
  return cpu_supports(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(BTV_HAVE_AVX2)
  return &kAvx2;
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(BTV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!cpu_supports(isa))
    throw Error(std::string("kernel variant not available: ") + isa_name(isa));
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

const KernelTable& active() {
#if defined(BTV_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return kAvx2;
#endif
  return kScalar;
}

void gemv(const Matrix& m, const double* x, double* y) {
  const auto rows = static_cast<std::size_t>(m.rows());
  std::fill(y, y + rows, 0.0);
  const KernelTable& k = active();
  for (Index j = 0; j < m.cols(); ++j) {
    if (x[j] != 0.0) k.axpy(x[j], m.col(j).data(), y, rows);
  }
}

void gemv2(const Matrix& m, const double* x, const Matrix& n, const double* u,
           double* y) {
  gemv(m, x, y);
  const auto rows = static_cast<std::size_t>(n.rows());
  const KernelTable& k = active();
  for (Index j = 0; j < n.cols(); ++j) {
    if (u[j] != 0.0) k.axpy(u[j], n.col(j).data(), y, rows);
  }
}

void abs_gemv(const Matrix& m, const double* w, double* out) {
  const auto rows = static_cast<std::size_t>(m.rows());
  std::fill(out, out + rows, 0.0);
  const KernelTable& k = active();
  for (Index j = 0; j < m.cols(); ++j) {
    if (w[j] != 0.0) k.abs_axpy(w[j], m.col(j).data(), out, rows);
  }
}

}  // namespace btv::kernels
