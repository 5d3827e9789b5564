#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace labseq {

/// Input text (scenario JSON, GCMS CSV, wire line) could not be parsed.
/// line/column are 1-based; 0 means "not a positional error" (e.g. a
/// semantic check that failed after parsing).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(std::move(message)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A layer of the sequencing graph has no reachable candidate under the
/// edge-feasibility predicate. Reports the first blocked layer.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string message, std::size_t layer_index, std::string label)
        : std::runtime_error(std::move(message)),
          layer_index_(layer_index),
          label_(std::move(label)) {}

    std::size_t layer_index() const { return layer_index_; }
    const std::string& label() const { return label_; }

private:
    std::size_t layer_index_;
    std::string label_;
};

/// Exhaustive enumeration refused: the instance has too many candidate
/// assignments.
class InstanceTooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A procedure step references a task or target the instance does not
/// provide, or its motion constraints cannot be met.
class CompileError : public std::runtime_error {
public:
    CompileError(std::string message, std::string step, std::string label)
        : std::runtime_error(std::move(message)),
          step_(std::move(step)),
          label_(std::move(label)) {}

    const std::string& step() const { return step_; }
    const std::string& label() const { return label_; }

private:
    std::string step_;
    std::string label_;
};

/// A TCP listen endpoint could not be bound.
class BindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A TCP connection could not be established, timed out, or was lost.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace labseq
