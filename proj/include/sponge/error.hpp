#pragma once

#include <stdexcept>
#include <string>

namespace sponge {

// Base of every exception the library throws. The CLI maps Error subclasses
// tagged as configuration problems to exit code 1 and everything else to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class VocabularyError : public Error {
 public:
  VocabularyError(const std::string& what, char32_t offending)
      : Error(what), offending_(offending) {}
  char32_t offending() const { return offending_; }

 private:
  char32_t offending_;
};

// Malformed weight files, homoglyph tables, configs or outcome records.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class AttackError : public Error {
 public:
  using Error::Error;
};

// Aggregates over empty or degenerate outcome sets.
class MetricError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sponge
