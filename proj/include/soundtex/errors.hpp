// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_ERRORS_HPP_
#define SOUNDTEX_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace soundtex {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed runtime data (bad samples, mismatched shapes, non-finite values).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Parameters that violate a construction contract (counts, ranges, rates).
class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

// Index outside the valid range of a container-like object.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Requested time span falls outside the available signal.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized bytes (WAV, manifest, feature store, models).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Operating-system level I/O failure (open, read, write, rename).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace soundtex

#endif  // SOUNDTEX_ERRORS_HPP_
