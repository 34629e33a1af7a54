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

// Data-parallel inner loops shared by training, GCN propagation and
// retrieval scoring. Each kernel has a scalar reference implementation and
// vectorized variants; one table is selected at runtime from the CPU's
// capabilities. Override with KGRAG_KERNELS=scalar|avx2|neon or Select().

#include <cassert>
#include <cstddef>
#include <span>

#include "kgrag/kernel_table.h"

namespace kgrag::kernels {

const KernelTable& ScalarTable();
// nullptr when the variant was not compiled for this target.
const KernelTable* Avx2Table();
const KernelTable* NeonTable();

// True when the variant is compiled in and the running CPU can execute it.
bool Supported(Isa isa);
const KernelTable& Table(Isa isa);

// The table used by the library. Resolved once on first use.
const KernelTable& Active();
// Replaces the active table. Not synchronized with concurrent kernel callers;
// intended for start-up configuration and tests. Throws on unsupported isa.
void Select(Isa isa);
Isa BestAvailable();
const char* IsaName(Isa isa);
Isa ParseIsa(const char* name);

// RAII override for tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(Active().isa) { Select(isa); }
  ~ScopedIsa() { Select(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

inline double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return Active().dot(a.data(), b.data(), a.size());
}

inline double TranslationL2Squared(std::span<const double> h,
                                   std::span<const double> r,
                                   std::span<const double> t) {
  assert(h.size() == r.size() && r.size() == t.size());
  return Active().translation_l2_sq(h.data(), r.data(), t.data(), h.size());
}

inline double TranslationL1(std::span<const double> h,
                            std::span<const double> r,
                            std::span<const double> t) {
  assert(h.size() == r.size() && r.size() == t.size());
  return Active().translation_l1(h.data(), r.data(), t.data(), h.size());
}

inline void Axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  assert(x.size() == y.size());
  Active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace kgrag::kernels
