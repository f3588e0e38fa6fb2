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

#ifndef SHARED_CONTROL_SIMD_KERNELS_HPP_
#define SHARED_CONTROL_SIMD_KERNELS_HPP_

#include <cstddef>
#include <string_view>

namespace shared_control::simd {

// Dense fp64 inner loops used by the policy network and the LiDAR simulator.
// Every backend fills the same table; the scalar table is the reference the
// vectorized ones are tested against.
//
// Matrices are row-major with `cols` contiguous entries per row.
struct KernelTable {
  const char* name;

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // y[r] += sum_c w[r, c] * x[c]
  void (*gemv)(const double* w, const double* x, double* y, std::size_t rows,
               std::size_t cols);

  // y[c] += sum_r w[r, c] * x[r]
  void (*gemv_t)(const double* w, const double* x, double* y,
                 std::size_t rows, std::size_t cols);

  // w[r, c] += a[r] * b[c]
  void (*ger)(double* w, const double* a, const double* b, std::size_t rows,
              std::size_t cols);

  // Intersects n rays leaving the origin along (dir_x[i], dir_y[i]) with one
  // circle, lowering ranges[i] to the hit distance when closer. A ray whose
  // origin lies inside the circle reports 0.
  void (*ray_circle)(const double* dir_x, const double* dir_y, std::size_t n,
                     double center_x, double center_y, double radius,
                     double* ranges);
};

enum class Backend { kScalar, kAvx2 };

const KernelTable& scalar_kernels();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_kernels();

// The table used by the rest of the library. Picks the widest supported
// backend on first use unless SHARED_CONTROL_SIMD=scalar is set.
const KernelTable& active_kernels();

// Forces a backend; returns false (and changes nothing) if unsupported.
bool select_backend(Backend backend);

std::string_view active_backend_name();

}  // namespace shared_control::simd

#endif  // SHARED_CONTROL_SIMD_KERNELS_HPP_
