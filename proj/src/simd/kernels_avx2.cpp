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

// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "shared_control/simd/kernels.hpp"

namespace shared_control::simd {
namespace {

inline double reduce_add(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double sum = reduce_add(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, const double* x, double* y, std::size_t rows,
          std::size_t cols) {
  std::size_t r = 0;
  // Four rows at a time share the loads of x.
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d xv = _mm256_loadu_pd(x + c);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), xv, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), xv, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), xv, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), xv, a3);
    }
    double s0 = reduce_add(a0);
    double s1 = reduce_add(a1);
    double s2 = reduce_add(a2);
    double s3 = reduce_add(a3);
    for (; c < cols; ++c) {
      s0 += w0[c] * x[c];
      s1 += w1[c] * x[c];
      s2 += w2[c] * x[c];
      s3 += w3[c] * x[c];
    }
    y[r] += s0;
    y[r + 1] += s1;
    y[r + 2] += s2;
    y[r + 3] += s3;
  }
  for (; r < rows; ++r) y[r] += dot(w + r * cols, x, cols);
}

void gemv_t(const double* w, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], w + r * cols, y, cols);
}

void ger(double* w, const double* a, const double* b, std::size_t rows,
         std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(a[r], b, w + r * cols, cols);
}

// Same operation order as the scalar kernel and no fused multiply-add, so
// results are bit-identical.
void ray_circle(const double* dir_x, const double* dir_y, std::size_t n,
                double cx, double cy, double radius, double* ranges) {
  const double c = cx * cx + cy * cy - radius * radius;
  if (c <= 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (0.0 < ranges[i]) ranges[i] = 0.0;
    }
    return;
  }
  const __m256d cxv = _mm256_set1_pd(cx);
  const __m256d cyv = _mm256_set1_pd(cy);
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d b = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(dir_x + i), cxv),
                                    _mm256_mul_pd(_mm256_loadu_pd(dir_y + i), cyv));
    const __m256d disc = _mm256_sub_pd(_mm256_mul_pd(b, b), cv);
    const __m256d hit = _mm256_and_pd(_mm256_cmp_pd(disc, zero, _CMP_GE_OQ),
                                      _mm256_cmp_pd(b, zero, _CMP_GE_OQ));
    const __m256d t =
        _mm256_sub_pd(b, _mm256_sqrt_pd(_mm256_max_pd(disc, zero)));
    const __m256d old = _mm256_loadu_pd(ranges + i);
    const __m256d closer = _mm256_and_pd(hit, _mm256_cmp_pd(t, old, _CMP_LT_OQ));
    _mm256_storeu_pd(ranges + i, _mm256_blendv_pd(old, t, closer));
  }
  for (; i < n; ++i) {
    const double b = dir_x[i] * cx + dir_y[i] * cy;
    const double disc = b * b - c;
    if (disc < 0.0 || b < 0.0) continue;
    const double t = b - std::sqrt(disc);
    if (t < ranges[i]) ranges[i] = t;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot, axpy, gemv, gemv_t, ger,
                                 ray_circle};
  return table;
}

}  // namespace shared_control::simd
