/*
 * Copyright 2026 The shared_control Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <atomic>
#include <cstdlib>
#include <string>

#include "shared_control/simd/kernels.hpp"

namespace shared_control::simd {

#if defined(SHARED_CONTROL_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(SHARED_CONTROL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* forced = std::getenv("SHARED_CONTROL_SIMD");
  if (forced != nullptr && std::string(forced) == "scalar") {
    return &scalar_kernels();
  }
  if (const KernelTable* avx2 = avx2_kernels()) return avx2;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(SHARED_CONTROL_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *active_slot().load(); }

bool select_backend(Backend backend) {
  const KernelTable* table =
      backend == Backend::kScalar ? &scalar_kernels() : avx2_kernels();
  if (table == nullptr) return false;
  active_slot().store(table);
  return true;
}

std::string_view active_backend_name() { return active_kernels().name; }

}  // namespace shared_control::simd
