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

#include <cmath>

#include "kgrag/kernels.h"

namespace kgrag::kernels {
namespace {

double DotScalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double TranslationL2SqScalar(const double* h, const double* r, const double* t,
                             std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = h[i] + r[i] - t[i];
    sum += d * d;
  }
  return sum;
}

double TranslationL1Scalar(const double* h, const double* r, const double* t,
                           std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::fabs(h[i] + r[i] - t[i]);
  return sum;
}

void AxpyScalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kScalar = {
    Isa::kScalar,          "scalar",   DotScalar, TranslationL2SqScalar,
    TranslationL1Scalar,   AxpyScalar,
};

}  // namespace

const KernelTable& ScalarTable() { return kScalar; }

}  // namespace kgrag::kernels
