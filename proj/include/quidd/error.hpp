#pragma once

#include <stdexcept>
#include <string>

namespace quidd {

// Base of every error raised by the library. Lower layers throw, the CLI
// catches at the top and turns the message into a diagnostic line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidAmplitude : public Error {
 public:
  explicit InvalidAmplitude(const std::string& what) : Error("invalid amplitude: " + what) {}
};

class VariableOrderError : public Error {
 public:
  explicit VariableOrderError(const std::string& what) : Error("variable order: " + what) {}
};

class SpaceMismatch : public Error {
 public:
  explicit SpaceMismatch(const std::string& what) : Error("space mismatch: " + what) {}
};

class SizeCapExceeded : public Error {
 public:
  explicit SizeCapExceeded(const std::string& what) : Error("size cap exceeded: " + what) {}
};

class InvalidSize : public Error {
 public:
  explicit InvalidSize(const std::string& what) : Error("invalid size: " + what) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& what) : Error("index out of range: " + what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format error: " + what) {}
};

class NoSolution : public Error {
 public:
  explicit NoSolution(const std::string& what) : Error("no solution: " + what) {}
};

}  // namespace quidd
