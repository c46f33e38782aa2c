#pragma once

#include <stdexcept>
#include <string>

namespace clh {

// Structured failure kinds. The CLI maps every kind to a machine-readable
// JSON diagnostic; library code throws and never prints.
enum class ErrorKind {
  NotHermitian,
  NotProjection,
  OverflowDim,
  BadShape,
  NotPSD,
  ParseError,
  ValidationError,
  BadEigenvalue,
  UnsupportedGeometry,
  SiteNotInSupport,
  NumericalDegeneracy,
  BothTrivial,
  NotSingleOverlap,
  InvalidCertificate,
  InvalidStep,
  IllegalPattern,
  MissingWitness,
  RankTooHigh,
  DegreeViolation,
  NotFactorized,
  NotCommuting,
  SeparableSitePresent,
  IrregularPair,
  NonPowerOfTwoBlock,
  NonCommutingWords,
  BadEigenvalueSign,
  Budget,
  Internal,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, long index = -1)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind),
        message_(std::move(message)),
        index_(index) {}

  ErrorKind kind() const { return kind_; }
  const std::string& message() const { return message_; }
  // Step index, site id or term id when the kind carries one; -1 otherwise.
  long index() const { return index_; }

 private:
  ErrorKind kind_;
  std::string message_;
  long index_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message, long index = -1) {
  throw Error(kind, std::move(message), index);
}

}  // namespace clh
