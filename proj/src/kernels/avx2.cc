// Copyright 2026 The kgrag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built with -mavx2 -mfma. Only raw-pointer code belongs here; see
// kernel_table.h.

#include <immintrin.h>

#include <cmath>

#include "kgrag/kernel_table.h"

namespace kgrag::kernels {
namespace {

inline double HorizontalSum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double DotAvx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double sum = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

inline __m256d TranslationResidual(const double* h, const double* r,
                                   const double* t) {
  return _mm256_sub_pd(
      _mm256_add_pd(_mm256_loadu_pd(h), _mm256_loadu_pd(r)),
      _mm256_loadu_pd(t));
}

double TranslationL2SqAvx2(const double* h, const double* r, const double* t,
                           std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = TranslationResidual(h + i, r + i, t + i);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double sum = HorizontalSum(acc);
  for (; i < n; ++i) {
    double d = h[i] + r[i] - t[i];
    sum += d * d;
  }
  return sum;
}

double TranslationL1Avx2(const double* h, const double* r, const double* t,
                         std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = TranslationResidual(h + i, r + i, t + i);
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, d));
  }
  double sum = HorizontalSum(acc);
  for (; i < n; ++i) sum += std::fabs(h[i] + r[i] - t[i]);
  return sum;
}

void AxpyAvx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kAvx2 = {
    Isa::kAvx2,        "avx2",   DotAvx2, TranslationL2SqAvx2,
    TranslationL1Avx2, AxpyAvx2,
};

}  // namespace

const KernelTable* Avx2Table() { return &kAvx2; }

}  // namespace kgrag::kernels
