/*
   Copyright 2026 The bhnoma Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace bhnoma {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario text (bad syntax, unknown key, unparsable number).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A well-formed configuration that violates a model invariant. The message
/// names the violated invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class OddUserCount : public Error {
public:
    using Error::Error;
};

class InactiveBeam : public Error {
public:
    using Error::Error;
};

class NonPositiveLogArgument : public Error {
public:
    using Error::Error;
};

class InfeasibleMatching : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateCurve : public Error {
public:
    using Error::Error;
};

}  // namespace bhnoma
