//
// Copyright 2026 The dp_linreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dp_linreg {

// Raised when a linear system has no unique solution at working precision.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a Cholesky factorization meets a non positive definite input.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when no hyperparameter choice meets the requested privacy budget.
class InfeasibleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by data loading and preprocessing.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {

struct WarningSinkHolder {
  std::mutex mu;
  std::function<void(std::string_view)> sink;
};

inline WarningSinkHolder& warning_sink_holder() {
  static WarningSinkHolder holder;
  return holder;
}

}  // namespace internal

// Replaces the warning sink. An empty function restores the stderr default.
inline void set_warning_sink(std::function<void(std::string_view)> sink) {
  auto& holder = internal::warning_sink_holder();
  std::lock_guard<std::mutex> lock(holder.mu);
  holder.sink = std::move(sink);
}

inline void warn(std::string_view message) {
  auto& holder = internal::warning_sink_holder();
  std::lock_guard<std::mutex> lock(holder.mu);
  if (holder.sink) {
    holder.sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace dp_linreg
