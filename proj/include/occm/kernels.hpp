#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference
// implementation and, on x86-64, an AVX2/FMA variant. The variant is chosen
// once at startup from CPUID; setting OCCM_SIMD=scalar in the environment
// forces the reference path. Results of the two paths agree to rounding
// (summation order differs), which tests/test_kernels.cpp pins down.

#include <cstddef>
#include <span>
#include <string_view>

namespace occm::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Coordinates of n points stored as one array per axis (structure of arrays).
struct PointsSoA {
  int dim = 0;
  const double* axis[3] = {nullptr, nullptr, nullptr};
  std::size_t n = 0;
};

struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_j w_j / sqrt(eps2 + |p - q_j|^2); w == nullptr means unit weights.
  double (*coulomb_row)(const double* p, const PointsSoA& q, const double* w, double eps2);
};

/// The table for a specific ISA. Requesting avx2 on a build or CPU without it
/// returns the scalar table.
const KernelTable& table(Isa isa);

/// ISA selected for this process.
Isa active_isa();

bool isa_available(Isa isa);

inline const KernelTable& active() { return table(active_isa()); }

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double coulomb_row(const double* p, const PointsSoA& q, const double* w, double eps2) {
  return active().coulomb_row(p, q, w, eps2);
}

namespace detail {
const KernelTable& scalar_table();
#if defined(OCCM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace occm::kernels
