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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kgrag/error.h"
#include "kgrag/kernels.h"

namespace kgrag::kernels {

#if !KGRAG_HAVE_AVX2
const KernelTable* Avx2Table() { return nullptr; }
#endif
#if !KGRAG_HAVE_NEON
const KernelTable* NeonTable() { return nullptr; }
#endif

namespace {

bool CpuHasAvx2() {
#if KGRAG_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& InitialTable() {
  Isa isa = BestAvailable();
  if (const char* env = std::getenv("KGRAG_KERNELS"); env && *env) {
    Isa requested = ParseIsa(env);
    if (!Supported(requested)) {
      throw Error(ErrorCode::kConfig,
                  std::string("KGRAG_KERNELS=") + env +
                      " is not supported on this CPU");
    }
    isa = requested;
  }
  return Table(isa);
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{&InitialTable()};
  return slot;
}

}  // namespace

bool Supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return Avx2Table() != nullptr && CpuHasAvx2();
    case Isa::kNeon:
      // NEON is mandatory on AArch64, the only target it is built for.
      return NeonTable() != nullptr;
  }
  return false;
}

const KernelTable& Table(Isa isa) {
  if (!Supported(isa)) {
    throw Error(ErrorCode::kConfig,
                std::string("kernel variant not supported: ") + IsaName(isa));
  }
  switch (isa) {
    case Isa::kAvx2:
      return *Avx2Table();
    case Isa::kNeon:
      return *NeonTable();
    case Isa::kScalar:
      break;
  }
  return ScalarTable();
}

Isa BestAvailable() {
  if (Supported(Isa::kAvx2)) return Isa::kAvx2;
  if (Supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelTable& Active() {
  return *ActiveSlot().load(std::memory_order_acquire);
}

void Select(Isa isa) {
  ActiveSlot().store(&Table(isa), std::memory_order_release);
}

const char* IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

Isa ParseIsa(const char* name) {
  std::string_view s(name);
  if (s == "scalar") return Isa::kScalar;
  if (s == "avx2") return Isa::kAvx2;
  if (s == "neon") return Isa::kNeon;
  throw Error(ErrorCode::kConfig,
              "unknown kernel variant '" + std::string(s) +
                  "' (expected scalar, avx2 or neon)");
}

}  // namespace kgrag::kernels
