// Copyright 2026 The radloc Authors
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

#ifndef RADLOC__ERRORS_HPP_
#define RADLOC__ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radloc
{

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// log_map was asked for a rotation whose angle is within 1e-6 of pi.
class AngleNearPiError : public Error
{
public:
  using Error::Error;
};

/// Karcher iteration hit its cap with a residual update above tolerance.
class NonConvergenceError : public Error
{
public:
  using Error::Error;
};

class OutOfBoundsError : public Error
{
public:
  using Error::Error;
};

class BadCountError : public Error
{
public:
  using Error::Error;
};

class BadSpecError : public Error
{
public:
  using Error::Error;
};

class TooShortError : public Error
{
public:
  using Error::Error;
};

class NonMonotonicTimestampsError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

class ParseError : public Error
{
public:
  ParseError(const std::string & what, std::size_t line)
  : Error(what + " (line " + std::to_string(line) + ")"), line_(line)
  {
  }

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

}  // namespace radloc

#endif  // RADLOC__ERRORS_HPP_
