// Copyright 2026 The Recourse Forge Authors
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

#ifndef RECOURSE_ERRORS_HPP
#define RECOURSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace recourse {

/// Base class for every error raised by the toolkit. Callers that only
/// need "did it work" can catch this; the CLI maps it to exit code 2.
class RecourseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class IndexOutOfRangeError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class KindMismatchError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

/// No subset of the available actions can flip the classifier.
class InfeasibleError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class CatalogTooLargeError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class EmptyCandidatesError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class EmptyDatasetError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class CfeTooLargeError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class UntrainedModelError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class EmptyModelError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class LengthMismatchError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class ZeroMeanError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

/// Malformed or wrong-version input file.
class FormatError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

class ConfigError : public RecourseError {
 public:
  using RecourseError::RecourseError;
};

}  // namespace recourse

#endif  // RECOURSE_ERRORS_HPP
