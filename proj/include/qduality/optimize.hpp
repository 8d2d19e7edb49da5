// Copyright 2026 The qduality Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <functional>
#include <vector>

namespace qduality {

struct NelderMeadOptions {
  int max_iterations = 4000;
  double initial_step = 0.5;
  double f_tolerance = 1e-14;
  double x_tolerance = 1e-12;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

/// Derivative-free simplex minimization; deterministic for a given start.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0,
                                    const NelderMeadOptions& opt = {}) {
  const size_t n = x0.size();
  std::vector<std::vector<double>> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (size_t i = 0; i < n; ++i) xs[i + 1][i] += opt.initial_step;
  for (size_t i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  auto order = [&] {
    std::vector<size_t> idx(n + 1);
    for (size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fs[a] < fs[b]; });
    std::vector<std::vector<double>> xs2;
    std::vector<double> fs2;
    for (size_t i : idx) {
      xs2.push_back(xs[i]);
      fs2.push_back(fs[i]);
    }
    xs = std::move(xs2);
    fs = std::move(fs2);
  };

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    order();
    double spread = fs[n] - fs[0];
    double width = 0.0;
    for (size_t i = 0; i < n; ++i)
      width = std::max(width, std::abs(xs[n][i] - xs[0][i]));
    if (spread < opt.f_tolerance && width < opt.x_tolerance) break;

    std::vector<double> centroid(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) centroid[j] += xs[i][j] / double(n);

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (xs[n][j] - centroid[j]);
      return p;
    };

    std::vector<double> reflected = blend(-1.0);
    double fr = f(reflected);
    if (fr < fs[0]) {
      std::vector<double> expanded = blend(-2.0);
      double fe = f(expanded);
      if (fe < fr) {
        xs[n] = expanded;
        fs[n] = fe;
      } else {
        xs[n] = reflected;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = reflected;
      fs[n] = fr;
    } else {
      std::vector<double> contracted = blend(fr < fs[n] ? -0.5 : 0.5);
      double fc = f(contracted);
      if (fc < std::min(fr, fs[n])) {
        xs[n] = contracted;
        fs[n] = fc;
      } else {
        for (size_t i = 1; i <= n; ++i) {
          for (size_t j = 0; j < n; ++j) xs[i][j] = 0.5 * (xs[i][j] + xs[0][j]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  order();
  return {xs[0], fs[0], it};
}

}  // namespace qduality
