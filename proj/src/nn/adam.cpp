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

#include "crs/adam.hpp"

#include <cmath>
#include <string>

CRS_NN_BEGIN_NAMESPACE

void adam_step(std::span<Tensor> params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(static_cast<std::size_t>(p.numel()), Real(0));
      state.v.emplace_back(static_cast<std::size_t>(p.numel()), Real(0));
    }
  }
  if (state.m.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state holds " + std::to_string(state.m.size()) +
                     " buffers for " + std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (static_cast<std::int64_t>(state.m[i].size()) != params[i].numel()) {
      throw ShapeError("adam_step: moment buffer " + std::to_string(i) +
                       " does not match parameter shape " + shape_str(params[i].shape()));
    }
    for (Real g : params[i].grad()) {
      if (!std::isfinite(g)) {
        throw NumericError("adam_step: non-finite gradient in parameter " + std::to_string(i) +
                           " of shape " + shape_str(params[i].shape()));
      }
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const Real b1 = static_cast<Real>(cfg.beta1);
  const Real b2 = static_cast<Real>(cfg.beta2);
  const Real c1 = static_cast<Real>(1.0 / (1.0 - std::pow(cfg.beta1, t)));
  const Real c2 = static_cast<Real>(1.0 / (1.0 - std::pow(cfg.beta2, t)));
  const Real lr = static_cast<Real>(cfg.lr);
  const Real eps = static_cast<Real>(cfg.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto value = params[i].data();
    auto grad = params[i].grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const Real g = grad.empty() ? Real(0) : grad[j];
      m[j] = b1 * m[j] + (Real(1) - b1) * g;
      v[j] = b2 * v[j] + (Real(1) - b2) * g * g;
      const Real m_hat = m[j] * c1;
      const Real v_hat = v[j] * c2;
      value[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

CRS_NN_END_NAMESPACE
