#include "crtsim/kernels.hpp"

#include <atomic>

namespace crtsim::kernels {

namespace {

std::atomic<int> g_backend{-1};  // -1 = not yet chosen

const KernelTable& table_for(Backend b) {
#if defined(CRTSIM_BUILD_AVX2)
  if (b == Backend::Avx2) return avx2_table();
#endif
  (void)b;
  return scalar_table();
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "?";
}

bool backend_supported(Backend b) {
  if (b == Backend::Scalar) return true;
#if defined(CRTSIM_BUILD_AVX2)
  if (b == Backend::Avx2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#endif
  return false;
}

Backend best_available() {
  return backend_supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

Backend active() {
  int b = g_backend.load(std::memory_order_relaxed);
  if (b < 0) {
    Backend best = best_available();
    g_backend.store(static_cast<int>(best), std::memory_order_relaxed);
    return best;
  }
  return static_cast<Backend>(b);
}

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  g_backend.store(static_cast<int>(b), std::memory_order_relaxed);
  return true;
}

bool select_backend_by_name(const std::string& name) {
  if (name == "auto") return set_backend(best_available());
  if (name == "scalar") return set_backend(Backend::Scalar);
  if (name == "avx2") return set_backend(Backend::Avx2);
  return false;
}

double power_sum(const double* logx, std::size_t n, double a) {
  return table_for(active()).power_sum(logx, n, a);
}

void arm_event_probs(const ModelParams* draws, std::size_t n,
                     const QuadGrid& grid, double* out) {
  table_for(active()).arm_event_probs(draws, n, grid, out);
}

}  // namespace crtsim::kernels
