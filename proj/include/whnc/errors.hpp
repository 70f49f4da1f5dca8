#pragma once

#include <stdexcept>
#include <string>

namespace whnc {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A rate condition failed: the output envelope or residual service would be
// unbounded.
class InstabilityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Query outside the domain of a partial map (e.g. a flow that does not cross
// the router being asked about).
class DomainError : public Error {
public:
    using Error::Error;
};

// The burst-propagation dependency graph is not feed-forward.
class CycleError : public Error {
public:
    using Error::Error;
};

} // namespace whnc
