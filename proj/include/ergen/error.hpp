#pragma once

#include <stdexcept>
#include <string>

namespace ergen {

// Every failure surfaced by the library derives from Error so callers can
// map categories onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input code that must parse (an original snippet, a corpus entry) did not.
class InputError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

// The concrete-syntax parser rejected the text.
class ParseFailure : public Error {
 public:
  ParseFailure(const std::string& message, int line, int column)
      : Error(message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

// No numeric literal found where a score was expected.
class ScoreParseError : public Error {
 public:
  using Error::Error;
};

class JudgeParseError : public Error {
 public:
  using Error::Error;
};

class SummaryError : public Error {
 public:
  using Error::Error;
};

// Client-side failures: network, authentication, replay lookups.
class ClientError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public ClientError {
 public:
  using ClientError::ClientError;
};

class AuthError : public ClientError {
 public:
  using ClientError::ClientError;
};

class TransportError : public ClientError {
 public:
  TransportError(const std::string& message, bool transient)
      : ClientError(message), transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

class ReplayMiss : public ClientError {
 public:
  explicit ReplayMiss(std::string fingerprint)
      : ClientError("no cassette entry for request fingerprint " + fingerprint),
        fingerprint_(std::move(fingerprint)) {}
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string fingerprint_;
};

}  // namespace ergen
