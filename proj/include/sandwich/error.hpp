#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sandwich {

/// Domain failure carrying a stable error name (e.g. "BadSatelliteTarget").
/// The CLI prints the name verbatim and exits with status 1.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Malformed input text. Line and column are 1-based; column 0 means
/// "whole line".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& detail)
      : std::runtime_error("ParseError at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + detail),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace sandwich
