#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linetrust {

enum class ErrorKind {
  Identity,             // explanation and graph describe different functions
  MalformedExplanation,
  UnsupportedConstruct,
  Parse,
  Import,
  DiffMismatch,
  UndefinedInput,
  InsufficientData,
  DegenerateTraining,
  Precondition,
  Adapter,
  UnknownEdge,
  Contract,
  UndefinedGroundTruth,
  Calibration,
  Schema,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Raised when an external classifier misbehaves; keeps whatever it sent back.
class AdapterError : public Error {
public:
  AdapterError(const std::string& message, std::string raw_response)
      : Error(ErrorKind::Adapter, message), raw_(std::move(raw_response)) {}

  const std::string& raw_response() const noexcept { return raw_; }

private:
  std::string raw_;
};

}  // namespace linetrust
