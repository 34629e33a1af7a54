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

#include <arm_neon.h>

#include <cmath>

#include "kgrag/kernel_table.h"

namespace kgrag::kernels {
namespace {

double DotNeon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double TranslationL2SqNeon(const double* h, const double* r, const double* t,
                           std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d =
        vsubq_f64(vaddq_f64(vld1q_f64(h + i), vld1q_f64(r + i)), vld1q_f64(t + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double sum = vaddvq_f64(acc);
  for (; i < n; ++i) {
    double d = h[i] + r[i] - t[i];
    sum += d * d;
  }
  return sum;
}

double TranslationL1Neon(const double* h, const double* r, const double* t,
                         std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d =
        vsubq_f64(vaddq_f64(vld1q_f64(h + i), vld1q_f64(r + i)), vld1q_f64(t + i));
    acc = vaddq_f64(acc, vabsq_f64(d));
  }
  double sum = vaddvq_f64(acc);
  for (; i < n; ++i) sum += std::fabs(h[i] + r[i] - t[i]);
  return sum;
}

void AxpyNeon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), a, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kNeon = {
    Isa::kNeon,        "neon",   DotNeon, TranslationL2SqNeon,
    TranslationL1Neon, AxpyNeon,
};

}  // namespace

const KernelTable* NeonTable() { return &kNeon; }

}  // namespace kgrag::kernels
