#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uqlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not chain or do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the domain of a function (e.g. non-positive variance).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: bad hyperparameters, unknown keys, malformed values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (files, datasets).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Binary parse failure, carrying the byte offset where it was detected.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : DataError(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Training produced a non-finite loss.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t epoch)
      : Error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// The request exceeds what the method can do, e.g. quadrature over too many weights.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace uqlab
