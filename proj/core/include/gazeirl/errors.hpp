// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gazeirl {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (always names the offending line or field).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace gazeirl
