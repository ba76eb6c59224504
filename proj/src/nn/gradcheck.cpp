// Copyright 2026 The CRS Authors. All Rights Reserved.
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

#include "crs/gradcheck.hpp"

#include "crs/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

CRS_NN_BEGIN_NAMESPACE

namespace {

double reduce(const Tensor& t) {
  double s = 0.0;
  for (Real v : t.data()) s += static_cast<double>(v);
  return s;
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor()>& f, std::span<Tensor> inputs,
                           const GradCheckOptions& opts) {
  if (!(opts.eps > 0.0)) throw ArgumentError("grad_check: eps must be positive");

  std::vector<bool> had_grad_flag;
  for (auto& t : inputs) {
    had_grad_flag.push_back(t.requires_grad());
    t.set_requires_grad(true);
    t.zero_grad();
  }
  std::vector<std::vector<Real>> analytic;
  {
    GradTape tape;
    Tensor out;
    {
      GradTape::Recording rec(tape);
      out = f();
      out = ops::sum(out);
    }
    tape.backward(out);
  }
  for (auto& t : inputs) {
    auto g = t.grad();
    analytic.emplace_back(g.begin(), g.end());
    if (analytic.back().empty()) analytic.back().assign(static_cast<std::size_t>(t.numel()), Real(0));
    t.zero_grad();
  }

  GradCheckResult result;
  std::mt19937_64 rng(opts.seed);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto data = inputs[k].data();
    std::vector<std::int64_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (opts.max_samples > 0 && static_cast<std::int64_t>(idx.size()) > opts.max_samples) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<std::size_t>(opts.max_samples));
      std::sort(idx.begin(), idx.end());
    }
    for (auto j : idx) {
      const Real orig = data[j];
      data[j] = static_cast<Real>(orig + opts.eps);
      const double plus = reduce(f());
      data[j] = static_cast<Real>(orig - opts.eps);
      const double minus = reduce(f());
      data[j] = orig;
      const double numeric = (plus - minus) / (2.0 * opts.eps);
      const double a = analytic[k][j];
      const double abs_err = std::abs(a - numeric);
      const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), opts.floor});
      ++result.checked;
      result.max_abs_err = std::max(result.max_abs_err, abs_err);
      if (rel > result.max_rel_err || result.worst.empty()) {
        result.max_rel_err = std::max(result.max_rel_err, rel);
        std::ostringstream os;
        os << "input " << k << ", element " << j << ": analytic " << a << " vs numeric "
           << numeric;
        result.worst = os.str();
      }
    }
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) inputs[k].set_requires_grad(had_grad_flag[k]);
  return result;
}

CRS_NN_END_NAMESPACE
