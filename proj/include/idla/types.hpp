// types.hpp: vertex aliases and the error hierarchy shared by every module.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace idla {

using Vertex = std::uint32_t;
using Steps = std::uint64_t;

/// Base class for all library errors. Subclasses name the failure category so
/// callers (and the CLI) can map them to messages and exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid generator or configuration parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (u == v, empty set).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds an exhaustive-computation cap.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Graph is disconnected where connectivity is required.
class ConnectivityError : public Error {
 public:
  using Error::Error;
};

/// Block does not satisfy the validity predicate an algorithm requires.
class ValidityError : public Error {
 public:
  using Error::Error;
};

/// Block breaks propA so a cut & paste has no target row.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (order sequence, edge list, JSON).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace idla
