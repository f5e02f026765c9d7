#pragma once

#include <stdexcept>
#include <string>

namespace dramenc {

/// Invalid knob combination or out-of-range parameter.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A received frame violates its wire contract (e.g. a one-hot payload
/// without exactly one set bit).
class MalformedFrame : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Receiver state no longer mirrors the sender. Always a harness bug.
class DesyncError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Unreadable or malformed input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dramenc
