#pragma once

#include <stdexcept>
#include <string>

namespace stride {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidState : public Error
{
public:
  using Error::Error;
};

class OutOfWorkspace : public Error
{
public:
  using Error::Error;
};

class WindowClosed : public Error
{
public:
  using Error::Error;
};

class MotionTooLong : public Error
{
public:
  using Error::Error;
};

class NonMonotonicTime : public Error
{
public:
  using Error::Error;
};

class InsufficientData : public Error
{
public:
  using Error::Error;
};

class ProtocolViolation : public Error
{
public:
  using Error::Error;
};

/// Configuration problem; `path()` is the dotted key that caused it.
class ConfigError : public Error
{
public:
  ConfigError(std::string path, std::string message)
    : Error(path.empty() ? message : path + ": " + message)
    , path_(std::move(path))
    , message_(std::move(message))
  {
  }

  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::string path_;
  std::string message_;
};

} // namespace stride
