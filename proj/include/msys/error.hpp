#pragma once

#include <stdexcept>
#include <string>

namespace msys {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent block shapes, ambient dimensions or parameter counts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (near-singular resolvent, non-finite data,
/// divergent series).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on an input that violates its documented
/// precondition (not conservative, wrong multiplicity, containment broken).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace msys
