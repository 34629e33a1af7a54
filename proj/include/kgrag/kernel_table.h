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

#pragma once

// Kept free of inline code: it is included by translation units compiled
// with ISA-specific flags, which must not emit shared inline definitions.

#include <cstddef>

namespace kgrag::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (h[i] + r[i] - t[i])^2
  double (*translation_l2_sq)(const double* h, const double* r,
                              const double* t, std::size_t n);
  // sum_i |h[i] + r[i] - t[i]|
  double (*translation_l1)(const double* h, const double* r, const double* t,
                           std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

}  // namespace kgrag::kernels
