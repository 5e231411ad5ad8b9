#pragma once

#include <stdexcept>
#include <string>

namespace skyde {

/// Byte buffer cannot be parsed as a SoM datagram.
class MalformedMessageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Timestamps fed to a streaming component went backwards.
class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic was requested over an empty population.
class UndefinedStatisticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two chunks with the same sequence number disagree on content.
class IntegrityConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A config or trace file failed schema validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skyde
