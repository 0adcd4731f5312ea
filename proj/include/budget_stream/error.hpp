#pragma once

#include <stdexcept>
#include <string>

namespace budget_stream {

/// Input data does not match the expected schema (missing cost, one label...).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cell could not be parsed. Row and column are 1-based, header is row 1.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what + " (row " + std::to_string(row) + ", column " +
                           std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Bad caller-supplied parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Internal precondition broken: an engine bug, never a user error.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace budget_stream
