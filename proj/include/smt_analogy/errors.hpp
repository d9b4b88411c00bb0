#pragma once

#include <stdexcept>

namespace smt_analogy {

/// Malformed or inconsistent input data (files, graphs, instances).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An instance exceeds the configured search limits.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace smt_analogy
