// Copyright 2026 The qtransport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qtransport {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inconsistent model configuration (missing or duplicated reservoir, bad key).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of a closed form does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A closed form hits a vanishing denominator (all couplings switched off).
class DegenerateModelError : public Error {
public:
    using Error::Error;
};

/// The restricted stationary kernel is not one-dimensional.
class AmbiguityError : public Error {
public:
    AmbiguityError(const std::string& what, int kernel_dim)
        : Error(what), kernel_dim_(kernel_dim) {}

    int kernel_dim() const noexcept { return kernel_dim_; }

private:
    int kernel_dim_;
};

/// Time integration lost trace or positivity; retry with a smaller step.
class IntegrationQualityError : public Error {
public:
    using Error::Error;
};

/// Exponential tail fit could not be performed.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace qtransport
