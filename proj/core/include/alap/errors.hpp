#pragma once

#include <stdexcept>
#include <string>

namespace alap {

/// A theorem hypothesis does not hold for the supplied parameters.
class hypothesis_error : public std::runtime_error {
 public:
  explicit hypothesis_error(const std::string& what) : std::runtime_error(what) {}
};

/// A distribution lacks the data (moments, zero-bias form, ...) an operation needs.
class capability_error : public std::runtime_error {
 public:
  explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed to reach its tolerance or met a non-finite value.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace alap
