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

// Numeric profile of the tensor engine. The default build uses 32-bit reals;
// the self-check library is compiled with CRS_REAL_F64 so finite-difference
// gradient checks can run without single-precision cancellation noise. Both
// builds can be linked into one binary because the network code lives in a
// precision-specific inline namespace.

#if defined(CRS_REAL_F64) && CRS_REAL_F64
#define CRS_NN_BEGIN_NAMESPACE \
  namespace crs {              \
  inline namespace f64 {
#else
#define CRS_NN_BEGIN_NAMESPACE \
  namespace crs {              \
  inline namespace f32 {
#endif
#define CRS_NN_END_NAMESPACE \
  }                          \
  }

CRS_NN_BEGIN_NAMESPACE
#if defined(CRS_REAL_F64) && CRS_REAL_F64
using Real = double;
#else
using Real = float;
#endif
CRS_NN_END_NAMESPACE
