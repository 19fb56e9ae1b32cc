#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsv {

// Sort discipline violation while building or instantiating a term.
struct SortError : std::runtime_error {
  explicit SortError(const std::string& what) : std::runtime_error(what) {}
};

// Structural problem while applying a transition or replaying a trace.
struct ExecError : std::runtime_error {
  explicit ExecError(const std::string& what) : std::runtime_error(what) {}
};

// A formula consulted a binding that does not exist (never silently 0).
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

struct CorpusError : std::runtime_error {
  explicit CorpusError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

}  // namespace lsv
