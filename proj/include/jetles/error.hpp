#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace jetles {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-positive Jacobian at a non-axis node.
class DegenerateCell : public Error {
 public:
  DegenerateCell(std::array<int, 3> global_index, double volume)
      : Error("degenerate cell at (" + std::to_string(global_index[0]) + "," +
              std::to_string(global_index[1]) + "," + std::to_string(global_index[2]) +
              "), volume " + std::to_string(volume)),
        index(global_index) {}
  std::array<int, 3> index;
};

// Negative density or pressure found while evaluating the right-hand side.
class InvalidState : public Error {
 public:
  InvalidState(const std::string& what, std::array<int, 3> global_index, int stage = -1)
      : Error(what + " at (" + std::to_string(global_index[0]) + "," +
              std::to_string(global_index[1]) + "," + std::to_string(global_index[2]) + ")" +
              (stage >= 0 ? " in RK stage " + std::to_string(stage) : std::string{})),
        index(global_index),
        stage(stage) {}
  std::array<int, 3> index;
  int stage;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

// Transport or protocol failure: timeout, aborted peer, fringe read before wait.
class ExchangeFault : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  enum class Kind { open, magic_mismatch, version, truncated, dimension_mismatch, rank_mismatch, format };

  IoError(Kind kind, const std::string& what) : Error(what), kind(kind) {}
  Kind kind;
};

}  // namespace jetles
