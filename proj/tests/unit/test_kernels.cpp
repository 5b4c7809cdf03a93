#include <random>

#include <gtest/gtest.h>

#include "btv/kernels.hpp"

using namespace btv;
namespace k = btv::kernels;

namespace {

std::vector<double> gaussian_data(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

const k::KernelTable* avx2_or_skip() {
  const k::KernelTable* t = k::avx2_table();
  if (!t || !k::cpu_supports(k::Isa::kAvx2)) return nullptr;
  return t;
}

}  // namespace

TEST(Kernels, ScalarTableIsComplete) {
  const auto& s = k::scalar_table();
  EXPECT_NE(s.dot, nullptr);
  EXPECT_NE(s.axpy, nullptr);
  EXPECT_NE(s.abs_axpy, nullptr);
  EXPECT_NE(s.abs_sum, nullptr);
  EXPECT_NE(s.max_abs, nullptr);
}

TEST(Kernels, ScalarMatchesHandValues) {
  const double a[] = {1, -2, 3}, b[] = {4, 5, -6};
  const auto& s = k::scalar_table();
  EXPECT_DOUBLE_EQ(s.dot(a, b, 3), 4 - 10 - 18);
  EXPECT_DOUBLE_EQ(s.abs_sum(a, 3), 6);
  EXPECT_DOUBLE_EQ(s.max_abs(b, 3), 6);
  double y[] = {1, 1, 1};
  s.abs_axpy(2.0, a, y, 3);
  EXPECT_DOUBLE_EQ(y[1], 5);
  EXPECT_DOUBLE_EQ(s.dot(a, b, 0), 0.0);
  EXPECT_DOUBLE_EQ(s.max_abs(a, 0), 0.0);
}

TEST(Kernels, Avx2MatchesScalar) {
  const k::KernelTable* v = avx2_or_skip();
  if (!v) GTEST_SKIP() << "AVX2 variant unavailable on this machine";
  const auto& s = k::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n <= 67; ++n) {
    for (std::size_t offset : {0u, 1u, 3u}) {
      auto a = gaussian_data(rng, n + offset), b = gaussian_data(rng, n + offset);
      const double* pa = a.data() + offset;
      const double* pb = b.data() + offset;
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(pa[i] * pb[i]);
      EXPECT_NEAR(v->dot(pa, pb, n), s.dot(pa, pb, n), 1e-14 * (scale + 1.0)) << n;
      EXPECT_NEAR(v->abs_sum(pa, n), s.abs_sum(pa, n), 1e-14 * (s.abs_sum(pa, n) + 1.0));
      EXPECT_EQ(v->max_abs(pa, n), s.max_abs(pa, n));

      auto y1 = gaussian_data(rng, n + offset);
      auto y2 = y1;
      v->axpy(0.75, pa, y1.data() + offset, n);
      s.axpy(0.75, pa, y2.data() + offset, n);
      for (std::size_t i = 0; i < n + offset; ++i)
        EXPECT_NEAR(y1[i], y2[i], 1e-14 * (std::abs(y2[i]) + 1.0));
      v->abs_axpy(-1.5, pb, y1.data() + offset, n);
      s.abs_axpy(-1.5, pb, y2.data() + offset, n);
      for (std::size_t i = 0; i < n + offset; ++i)
        EXPECT_NEAR(y1[i], y2[i], 1e-14 * (std::abs(y2[i]) + 1.0));
    }
  }
}

TEST(Kernels, GemvAgreesAcrossIsas) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Matrix m(13, 9), n(13, 4);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  for (Index i = 0; i < n.size(); ++i) n.data()[i] = g(rng);
  Vector x(9), u(4), w(9);
  for (Index i = 0; i < 9; ++i) {
    x[i] = g(rng);
    w[i] = std::abs(g(rng));
  }
  for (Index i = 0; i < 4; ++i) u[i] = g(rng);

  const k::Isa before = k::active_isa();
  std::vector<k::Isa> isas{k::Isa::kScalar};
  if (avx2_or_skip()) isas.push_back(k::Isa::kAvx2);
  for (k::Isa isa : isas) {
    k::set_active_isa(isa);
    Vector y(13), y2(13), ya(13);
    k::gemv(m, x.data(), y.data());
    k::gemv2(m, x.data(), n, u.data(), y2.data());
    k::abs_gemv(m, w.data(), ya.data());
    EXPECT_LT((y - m * x).norm(), 1e-12) << k::isa_name(isa);
    EXPECT_LT((y2 - m * x - n * u).norm(), 1e-12) << k::isa_name(isa);
    EXPECT_LT((ya - m.cwiseAbs() * w).norm(), 1e-12) << k::isa_name(isa);
  }
  k::set_active_isa(before);
}

TEST(Kernels, ForcingScalarIsHonoured) {
  const k::Isa before = k::active_isa();
  k::set_active_isa(k::Isa::kScalar);
  EXPECT_EQ(k::active_isa(), k::Isa::kScalar);
  EXPECT_EQ(k::active().dot, k::scalar_table().dot);
  k::set_active_isa(before);
}
