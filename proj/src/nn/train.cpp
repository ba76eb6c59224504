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

#include "crs/train.hpp"

#include <cmath>
#include <sstream>

CRS_NN_BEGIN_NAMESPACE

namespace {

void check_batch(std::span<const TrainSample> batch) {
  if (batch.empty()) throw ArgumentError("train: empty batch");
}

}  // namespace

double evaluate_loss(const CrsNet& net, std::span<const TrainSample> batch) {
  check_batch(batch);
  double total = 0.0;
  for (const auto& s : batch) {
    total += ops::l1_loss(net.forward(s.window, s.intra_refs), s.target).item();
  }
  return total / static_cast<double>(batch.size());
}

double train_step(const CrsNet& net, std::span<const TrainSample> batch, AdamState& state,
                  const AdamConfig& cfg) {
  check_batch(batch);
  std::vector<Tensor> params = net.parameters();
  for (auto& p : params) p.zero_grad();
  const Real inv_n = Real(1) / static_cast<Real>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    GradTape tape;
    Tensor loss;
    {
      GradTape::Recording rec(tape);
      loss = ops::scale(ops::l1_loss(net.forward(batch[i].window, batch[i].intra_refs),
                                     batch[i].target),
                        inv_n);
    }
    const double v = loss.item();
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "train_step: non-finite loss " << v << " on sample " << i << " at step "
         << state.step;
      throw NumericError(os.str());
    }
    total += v;
    tape.backward(loss);
  }
  adam_step(params, state, cfg);
  return total;
}

CRS_NN_END_NAMESPACE
