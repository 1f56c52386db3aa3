#pragma once

#include <stdexcept>
#include <string>

namespace dax {

struct InvalidInputError : std::runtime_error {
  explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

struct NotSpdError : std::runtime_error {
  explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dax
