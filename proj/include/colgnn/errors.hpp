#pragma once

#include <stdexcept>
#include <string>

namespace colgnn {

// An argument violated an operation's precondition (shape mismatch, empty
// input, unknown label, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file violated one of the on-disk formats. Carries a 1-based line number
// when the format is line-oriented (0 means "not line-specific").
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& message, long line = 0)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                    : message),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_ = 0;
};

// A (table_id, column_index) key could not be matched across inputs.
class JoinError : public std::runtime_error {
 public:
  JoinError(const std::string& table_id, int column_index, const std::string& what)
      : std::runtime_error("no match for table '" + table_id + "' column " +
                           std::to_string(column_index) + ": " + what) {}
  explicit JoinError(const std::string& message) : std::runtime_error(message) {}
};

// An internal invariant failed; indicates a bug or numeric blow-up, not bad
// user input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace colgnn
