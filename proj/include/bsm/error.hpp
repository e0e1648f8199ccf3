#pragma once

#include <stdexcept>
#include <string>

namespace bsm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed instance, matching or graph text.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a structural invariant (mutuality,
/// injective ranks, unknown or duplicate people).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A preference function still has a hole below its largest value.
class GapError : public Error {
public:
    using Error::Error;
};

class InvalidMatching : public Error {
public:
    using Error::Error;
};

/// Exhaustive search refused because the instance exceeds the configured bound.
class TooLarge : public Error {
public:
    using Error::Error;
};

class NotAClique : public Error {
public:
    using Error::Error;
};

} // namespace bsm
