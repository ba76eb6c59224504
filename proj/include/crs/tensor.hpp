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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "crs/config.hpp"
#include "crs/error.hpp"

CRS_NN_BEGIN_NAMESPACE

using Shape = std::vector<std::int64_t>;

std::int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {
struct TensorImpl {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until a gradient reaches this tensor
  bool requires_grad = false;

  std::vector<Real>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), Real(0));
    return grad;
  }
};
}  // namespace detail

// Dense N-d array of reals in row-major order. Feature maps use the C x H x W
// layout. Copies are shallow handles onto the same storage, which is what lets
// the gradient tape and the optimizer refer to parameters; use clone() for a
// deep copy.
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape, Real fill = Real(0));
  Tensor(Shape shape, std::vector<Real> values);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor scalar(Real v) { return Tensor(Shape{1}, v); }

  const Shape& shape() const { return impl_->shape; }
  int rank() const { return static_cast<int>(impl_->shape.size()); }
  std::int64_t dim(int axis) const;
  std::int64_t numel() const { return static_cast<std::int64_t>(impl_->value.size()); }
  bool empty() const { return impl_->value.empty(); }

  std::span<Real> data() { return impl_->value; }
  std::span<const Real> data() const { return impl_->value; }
  Real* ptr() { return impl_->value.data(); }
  const Real* ptr() const { return impl_->value.data(); }
  Real item() const;

  // C x H x W accessors.
  Real& at(std::int64_t c, std::int64_t y, std::int64_t x);
  Real at(std::int64_t c, std::int64_t y, std::int64_t x) const;

  bool requires_grad() const { return impl_->requires_grad; }
  Tensor& set_requires_grad(bool on);
  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const Real> grad() const { return impl_->grad; }
  void zero_grad() { impl_->grad.clear(); }
  void set_grad(std::vector<Real> g);

  Tensor clone() const;   // deep copy, no gradient state
  Tensor detach() const { return clone(); }
  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

  const std::shared_ptr<detail::TensorImpl>& impl() const { return impl_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<detail::TensorImpl> impl_;
};

// Records the backward closures of differentiable ops while a Recording scope
// is active on the current thread. One training step owns one tape.
class GradTape {
 public:
  using Backward = std::function<void()>;

  GradTape() = default;
  GradTape(const GradTape&) = delete;
  GradTape& operator=(const GradTape&) = delete;

  // Seeds d(root)/d(root) = 1 and runs every recorded node once, newest first.
  void backward(const Tensor& root);
  void record(Backward fn) { nodes_.push_back(std::move(fn)); }
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  static GradTape* current();

  class Recording {
   public:
    explicit Recording(GradTape& tape);
    ~Recording();
    Recording(const Recording&) = delete;
    Recording& operator=(const Recording&) = delete;

   private:
    GradTape* previous_;
  };

 private:
  std::vector<Backward> nodes_;
};

// True when an op with these inputs must be recorded.
bool needs_grad(std::initializer_list<const Tensor*> inputs);
bool needs_grad(std::span<const Tensor> inputs);

// Marks `out` as differentiable and records `fn` on the current tape.
void record_op(Tensor& out, GradTape::Backward fn);

CRS_NN_END_NAMESPACE
