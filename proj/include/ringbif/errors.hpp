#pragma once

#include <stdexcept>
#include <string>

namespace ringbif {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. alpha < 1).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Configuration on (or numerically at) the collision set.
class SingularInput : public Error {
public:
  using Error::Error;
};

/// A mode whose leading coefficient vanishes, so a ratio is undefined.
class DegenerateMode : public Error {
public:
  using Error::Error;
};

class NotEquivariant : public Error {
public:
  using Error::Error;
};

class NotSymmetric : public Error {
public:
  using Error::Error;
};

class InvalidDivisor : public Error {
public:
  using Error::Error;
};

/// Sign-change window contains more than one candidate crossing.
class AmbiguousWindow : public Error {
public:
  using Error::Error;
};

/// Kernel of the reduced Jacobian is not one-dimensional, or the crossing has eta = 0.
class DegenerateBifurcation : public Error {
public:
  using Error::Error;
};

/// Newton failed to land on the bifurcating branch.
class NoSwitch : public Error {
public:
  using Error::Error;
};

} // namespace ringbif
