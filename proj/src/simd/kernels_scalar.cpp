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

#include <cmath>

#include "shared_control/simd/kernels.hpp"

namespace shared_control::simd {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, const double* x, double* y, std::size_t rows,
          std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot(w + r * cols, x, cols);
}

void gemv_t(const double* w, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], w + r * cols, y, cols);
}

void ger(double* w, const double* a, const double* b, std::size_t rows,
         std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(a[r], b, w + r * cols, cols);
}

void ray_circle(const double* dir_x, const double* dir_y, std::size_t n,
                double cx, double cy, double radius, double* ranges) {
  const double c = cx * cx + cy * cy - radius * radius;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = dir_x[i] * cx + dir_y[i] * cy;
    const double disc = b * b - c;
    double t;
    if (c <= 0.0) {
      t = 0.0;
    } else if (disc < 0.0 || b < 0.0) {
      continue;
    } else {
      t = b - std::sqrt(disc);
    }
    if (t < ranges[i]) ranges[i] = t;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot,    axpy,      gemv,
                                 gemv_t,   ger,    ray_circle};
  return table;
}

}  // namespace shared_control::simd
