#pragma once
// Data-parallel inner loops behind the sampler and decision engine.
//
// Each kernel has a scalar reference implementation and, on x86-64 builds, an
// AVX2/FMA variant selected at runtime. The variants are equivalence-tested
// against each other; within one process the selected backend is fixed, so
// runs stay reproducible for a given backend choice.

#include <cstddef>
#include <string>

#include "crtsim/quadrature.hpp"
#include "crtsim/types.hpp"

namespace crtsim::kernels {

enum class Backend { Scalar = 0, Avx2 = 1 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);
Backend best_available();
Backend active();
// Returns false (and leaves the selection unchanged) if unsupported.
bool set_backend(Backend b);
// Accepts "scalar", "avx2" or "auto"; returns false on unknown/unsupported.
bool select_backend_by_name(const std::string& name);

// sum_i exp(a * logx[i])  (power sums of observation times).
double power_sum(const double* logx, std::size_t n, double a);

// Five-outcome probabilities under each parameter draw for all four arms.
// out is row-major [n][4 arms][5 outcomes]; outcomes are DP-early, NC-early,
// DP-late, NC-late, event-free.
void arm_event_probs(const ModelParams* draws, std::size_t n,
                     const QuadGrid& grid, double* out);

// Function-pointer table an implementation fills in.
struct KernelTable {
  double (*power_sum)(const double*, std::size_t, double);
  void (*arm_event_probs)(const ModelParams*, std::size_t, const QuadGrid&, double*);
};

const KernelTable& scalar_table();
#if defined(CRTSIM_BUILD_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace crtsim::kernels
