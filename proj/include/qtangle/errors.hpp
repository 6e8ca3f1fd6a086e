// Copyright 2026 The qtangle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qtangle {

enum class ErrorKind {
    invalid_input,
    numerical_failure,
    size_limit,
};

/// Base of every exception thrown by the library. The kind decides the CLI
/// exit status.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {
    }
    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

class InvalidInput : public Error {
   public:
    explicit InvalidInput(const std::string &what) : Error(ErrorKind::invalid_input, what) {
    }
};

class NumericalFailure : public Error {
   public:
    explicit NumericalFailure(const std::string &what) : Error(ErrorKind::numerical_failure, what) {
    }
};

class SizeLimitExceeded : public Error {
   public:
    explicit SizeLimitExceeded(const std::string &what) : Error(ErrorKind::size_limit, what) {
    }
};

inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_input:
            return 2;
        case ErrorKind::numerical_failure:
            return 3;
        case ErrorKind::size_limit:
            return 4;
    }
    return 1;
}

}  // namespace qtangle
