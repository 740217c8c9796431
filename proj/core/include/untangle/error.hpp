#pragma once

#include <stdexcept>
#include <string>

namespace untangle {

/// Malformed input text (a log line, a config entry, a checkpoint header).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that parses but violates a data invariant (parent after child, index gaps).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or schema disagreement between tensors, feature vectors or partitions.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during training (non-finite or diverging loss).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace untangle
