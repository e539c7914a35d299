// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace shadowsim {

/// Invalid argument or configuration value (CLI exit code 2).
struct parameter_error : std::invalid_argument {
  explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Unusable input data or data inconsistent with the model (CLI exit code 3).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric routine could not reach its accuracy target (CLI exit code 4).
struct accuracy_error : std::runtime_error {
  explicit accuracy_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shadowsim
