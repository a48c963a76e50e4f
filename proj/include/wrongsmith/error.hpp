#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wrongsmith {

// Base for every error the library reports to callers. The CLI maps these to
// exit code 2; anything else escaping a command is an internal failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error("empty input: " + what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("I/O error: " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ShapeError : public Error {
 public:
  ShapeError(std::size_t index, const std::string& what)
      : Error("shape mismatch at sentence " + std::to_string(index) + ": " + what), index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class KeyError : public Error {
 public:
  explicit KeyError(const std::string& key) : Error("unknown key: " + key), key_(key) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Violated internal invariant (NaN weights, broken alignment). Exit code 3.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace wrongsmith
