#pragma once

#include <stdexcept>
#include <string>

namespace adcl {

enum class ErrorKind {
  UnsupportedOperator,
  UnboundVariable,
  ModelDoesNotSatisfy,
  SortMismatch,
  NonLinearClause,
  ReservedNameClash,
  UnsupportedFeature,
  SyntaxError,
  NotDeterministic,
  NoClosedForm,
  NotAccelerable,
  DuplicateId,
  UnknownId,
  NotExpandable,
  MalformedWitness,
  BackendCrash,
  Cancelled,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace adcl
