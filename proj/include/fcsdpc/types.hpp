// Copyright 2026 The fcsdpc Authors
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

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fcsdpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree with the model or problem they are used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A factorization or inverse could not be formed (singular, indefinite or
/// too badly conditioned).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// No input sequence satisfies the alphabet and switching constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Recorded data is too short, rank deficient or otherwise unusable.
class DataQualityError : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-range experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

/// Shape-aware exact equality (Eigen's operator== requires equal shapes).
template <typename A, typename B>
bool same(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace detail

}  // namespace fcsdpc
