#pragma once

#include <stdexcept>
#include <string>

namespace graphon_rds {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the unit interval or otherwise outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration refused because estimated work exceeds the budget.
class ComplexityError : public Error {
 public:
  using Error::Error;
};

/// A Markov step or stationary measure was requested at a zero-degree point.
class PositivityError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedKernelError : public Error {
 public:
  using Error::Error;
};

/// Conditioned branching sampler ran out of restarts.
class RestartBudgetError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or text.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphon_rds
