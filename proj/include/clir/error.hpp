#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clir {

/// Base of every error raised by the library. The CLI maps these to exit
/// status 2 ("data error").
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the file name and 1-based line number.
class ParseError : public Error {
  public:
    ParseError(std::string file, std::size_t line, const std::string& message)
        : Error(file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)),
          line_(line)
    {}

    [[nodiscard]] const std::string& file() const noexcept { return file_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

/// Input that parses but violates a contract (dangling ids, degenerate data).
class DataError : public Error {
  public:
    using Error::Error;
};

}  // namespace clir
