#include <immintrin.h>

#include <cmath>

#include "crtsim/kernels.hpp"

// AVX2/FMA kernel variant. Compiled with -mavx2 -mfma and entered only after
// a cpuid check, so the rest of the binary stays generic x86-64.

namespace crtsim::kernels {

namespace {

// Vectorized exp for 4 doubles: 2^n * P(r) with x = n*ln2 + r, |r| <= ln2/2,
// P the degree-13 Taylor polynomial (max error ~2 ulp on the reduced range).
// Inputs below -708 flush to 0, above 709 to +inf.
inline __m256d vexp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d underflow = _mm256_set1_pd(-708.0);
  const __m256d overflow = _mm256_set1_pd(709.0);

  const __m256d too_small = _mm256_cmp_pd(x, underflow, _CMP_LT_OQ);
  const __m256d too_big = _mm256_cmp_pd(x, overflow, _CMP_GT_OQ);
  __m256d xc = _mm256_max_pd(_mm256_min_pd(x, overflow), underflow);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  // Horner over 1/k!.
  __m256d p = _mm256_set1_pd(1.6059043836821614599e-10);   // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.0876756987868098979e-9));  // 1/12!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.5052108385441718775e-8));  // 1/11!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985890653e-7));  // 1/10!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985892511e-6));  // 1/9!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587301566e-5));  // 1/8!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841253e-4));  // 1/7!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889419e-3));  // 1/6!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332177e-3));  // 1/5!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664354e-2));  // 1/4!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666665741e-1));  // 1/3!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-1));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // Scale by 2^n through the exponent field; n is within int32 range here.
  __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i bits = _mm256_add_epi64(_mm256_castpd_si256(p), _mm256_slli_epi64(n64, 52));
  __m256d result = _mm256_castsi256_pd(bits);

  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), too_small);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(HUGE_VAL), too_big);
  return result;
}

inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

double power_sum_avx2(const double* logx, std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d lx = _mm256_loadu_pd(logx + i);
    acc = _mm256_add_pd(acc, vexp4(_mm256_mul_pd(va, lx)));
  }
  double s = hsum4(acc);
  for (; i < n; ++i) s += std::exp(a * logx[i]);
  return s;
}

inline double arm_hr(const ModelParams& p, int k, int arm) {
  switch (arm) {
    case 0: return p.gamma[k][1];
    case 1: return p.gamma[k][2];
    case 2: return 0.0;
    default: return p.gamma[k][0];
  }
}

void arm_event_probs_avx2(const ModelParams* draws, std::size_t n,
                          const QuadGrid& grid, double* out) {
  const std::size_t m = grid.size();
  const std::size_t half = static_cast<std::size_t>(grid.n_half);
  std::vector<double> pow1(m), pow2(m);
  for (std::size_t t = 0; t < n; ++t) {
    const ModelParams& p = draws[t];
    const __m256d a1 = _mm256_set1_pd(p.alpha[0]);
    const __m256d a2 = _mm256_set1_pd(p.alpha[1]);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      __m256d lx = _mm256_loadu_pd(grid.logx.data() + j);
      _mm256_storeu_pd(pow1.data() + j, vexp4(_mm256_mul_pd(a1, lx)));
      _mm256_storeu_pd(pow2.data() + j, vexp4(_mm256_mul_pd(a2, lx)));
    }
    for (; j < m; ++j) {
      pow1[j] = std::exp(p.alpha[0] * grid.logx[j]);
      pow2[j] = std::exp(p.alpha[1] * grid.logx[j]);
    }
    const double nu_pow1 = std::pow(grid.nu, p.alpha[0]);
    const double nu_pow2 = std::pow(grid.nu, p.alpha[1]);

    for (int arm = 0; arm < kNumArms; ++arm) {
      const double r1s = p.beta[0] * std::exp(arm_hr(p, 0, arm));
      const double r2s = p.beta[1] * std::exp(arm_hr(p, 1, arm));
      const __m256d r1 = _mm256_set1_pd(r1s);
      const __m256d r2 = _mm256_set1_pd(r2s);
      const __m256d va1r1 = _mm256_set1_pd(p.alpha[0] * r1s);
      const __m256d va2r2 = _mm256_set1_pd(p.alpha[1] * r2s);
      double e[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
      // The half boundary is handled per segment so accumulators never mix
      // early and late mass.
      for (int seg = 0; seg < 2; ++seg) {
        const std::size_t lo = seg == 0 ? 0 : half;
        const std::size_t hi = seg == 0 ? half : m;
        __m256d acc1 = _mm256_setzero_pd();
        __m256d acc2 = _mm256_setzero_pd();
        std::size_t jj = lo;
        for (; jj + 4 <= hi; jj += 4) {
          __m256d p1 = _mm256_loadu_pd(pow1.data() + jj);
          __m256d p2 = _mm256_loadu_pd(pow2.data() + jj);
          __m256d hz = _mm256_fmadd_pd(r2, p2, _mm256_mul_pd(r1, p1));
          __m256d surv = vexp4(_mm256_sub_pd(_mm256_setzero_pd(), hz));
          __m256d xinv = _mm256_div_pd(_mm256_loadu_pd(grid.wgt.data() + jj),
                                       _mm256_loadu_pd(grid.x.data() + jj));
          __m256d wsx = _mm256_mul_pd(surv, xinv);
          acc1 = _mm256_fmadd_pd(_mm256_mul_pd(va1r1, p1), wsx, acc1);
          acc2 = _mm256_fmadd_pd(_mm256_mul_pd(va2r2, p2), wsx, acc2);
        }
        double s1 = hsum4(acc1), s2 = hsum4(acc2);
        for (; jj < hi; ++jj) {
          const double surv = std::exp(-(r1s * pow1[jj] + r2s * pow2[jj]));
          const double wsx = grid.wgt[jj] * surv / grid.x[jj];
          s1 += p.alpha[0] * r1s * pow1[jj] * wsx;
          s2 += p.alpha[1] * r2s * pow2[jj] * wsx;
        }
        e[2 * seg + 0] = s1;
        e[2 * seg + 1] = s2;
      }
      e[4] = std::exp(-(r1s * nu_pow1 + r2s * nu_pow2));
      double* o = out + (t * kNumArms + arm) * 5;
      for (int s = 0; s < 5; ++s) o[s] = e[s];
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{power_sum_avx2, arm_event_probs_avx2};
  return table;
}

}  // namespace crtsim::kernels
