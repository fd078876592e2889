// Copyright 2026 The Authors.
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

namespace ocrslab {

/// Bad user-supplied data: out-of-range index, malformed config, invalid
/// parameter.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested computation exceeds a documented size guard.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A Monte Carlo threshold comparison could not be resolved at the requested
/// confidence, even after sample escalation. Carries the margin so callers
/// can report how close the estimate was to the threshold.
class IndeterminateComparisonError : public std::runtime_error {
 public:
  IndeterminateComparisonError(const std::string& what, double estimate,
                               double half_width, double threshold)
      : std::runtime_error(what),
        estimate(estimate),
        half_width(half_width),
        threshold(threshold) {}

  double estimate;
  double half_width;
  double threshold;
};

/// An internal invariant failed. Indicates a bug, never bad input.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

/// A derived construction (e.g. a marginal-vector certificate) could not be
/// completed from the given inputs.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ocrslab
