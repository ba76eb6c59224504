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

#include "crs/tensor.hpp"

#include <sstream>

CRS_NN_BEGIN_NAMESPACE

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw ShapeError("negative extent in shape " + shape_str(shape));
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor() : impl_(std::make_shared<detail::TensorImpl>()) {}

Tensor::Tensor(Shape shape, Real fill) : impl_(std::make_shared<detail::TensorImpl>()) {
  const auto n = shape_numel(shape);
  impl_->shape = std::move(shape);
  impl_->value.assign(static_cast<std::size_t>(n), fill);
}

Tensor::Tensor(Shape shape, std::vector<Real> values)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  const auto n = shape_numel(shape);
  if (static_cast<std::int64_t>(values.size()) != n) {
    throw ShapeError("tensor data length " + std::to_string(values.size()) +
                     " does not match shape " + shape_str(shape));
  }
  impl_->shape = std::move(shape);
  impl_->value = std::move(values);
}

std::int64_t Tensor::dim(int axis) const {
  if (axis < 0) axis += rank();
  if (axis < 0 || axis >= rank()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                     shape_str(shape()));
  }
  return impl_->shape[static_cast<std::size_t>(axis)];
}

Real Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape()));
  return impl_->value[0];
}

Real& Tensor::at(std::int64_t c, std::int64_t y, std::int64_t x) {
  const auto& s = impl_->shape;
  return impl_->value[static_cast<std::size_t>((c * s[1] + y) * s[2] + x)];
}

Real Tensor::at(std::int64_t c, std::int64_t y, std::int64_t x) const {
  const auto& s = impl_->shape;
  return impl_->value[static_cast<std::size_t>((c * s[1] + y) * s[2] + x)];
}

Tensor& Tensor::set_requires_grad(bool on) {
  impl_->requires_grad = on;
  return *this;
}

void Tensor::set_grad(std::vector<Real> g) {
  if (static_cast<std::int64_t>(g.size()) != numel()) {
    throw ShapeError("gradient length " + std::to_string(g.size()) + " does not match shape " +
                     shape_str(shape()));
  }
  impl_->grad = std::move(g);
}

Tensor Tensor::clone() const {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = impl_->shape;
  impl->value = impl_->value;
  return Tensor(std::move(impl));
}

namespace {
thread_local GradTape* g_current_tape = nullptr;
}

GradTape* GradTape::current() { return g_current_tape; }

GradTape::Recording::Recording(GradTape& tape) : previous_(g_current_tape) {
  g_current_tape = &tape;
}

GradTape::Recording::~Recording() { g_current_tape = previous_; }

void GradTape::backward(const Tensor& root) {
  if (root.numel() != 1) {
    throw ShapeError("backward() needs a scalar root, got " + shape_str(root.shape()));
  }
  if (!root.requires_grad()) return;
  root.impl()->ensure_grad()[0] += Real(1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

bool needs_grad(std::initializer_list<const Tensor*> inputs) {
  if (GradTape::current() == nullptr) return false;
  for (const Tensor* t : inputs) {
    if (t != nullptr && t->requires_grad()) return true;
  }
  return false;
}

bool needs_grad(std::span<const Tensor> inputs) {
  if (GradTape::current() == nullptr) return false;
  for (const Tensor& t : inputs) {
    if (t.requires_grad()) return true;
  }
  return false;
}

void record_op(Tensor& out, GradTape::Backward fn) {
  out.set_requires_grad(true);
  GradTape::current()->record(std::move(fn));
}

CRS_NN_END_NAMESPACE
