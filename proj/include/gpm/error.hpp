#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t lhs, std::size_t rhs)
      : Error(what + ": length " + std::to_string(lhs) + " vs " + std::to_string(rhs)),
        lhs_(lhs), rhs_(rhs) {}
  std::size_t lhs() const { return lhs_; }
  std::size_t rhs() const { return rhs_; }

 private:
  std::size_t lhs_, rhs_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced while evaluating a model, kernel or likelihood.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class DegenerateBasisError : public Error {
 public:
  DegenerateBasisError(std::size_t index, double relative_norm)
      : Error("near-dependent vector at index " + std::to_string(index) +
              " (relative residual " + std::to_string(relative_norm) + ")"),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wraps any failure with the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace gpm
