// SPDX-License-Identifier: Apache-2.0
//
// sfield — measurement of sound fields with moving microphones
// Copyright (C) 2026 The sfield authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SFIELD_ERRORS_HPP
#define SFIELD_ERRORS_HPP

#include <stdexcept>

namespace sfield
{

/// Invalid user input: bad arguments, inconsistent configuration, malformed
/// files. The CLI maps this to exit code 1.
struct validation_error : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: rank-deficient systems, singular blocks, divergent
/// iterations. The CLI maps this to exit code 2.
struct numerical_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace sfield

#endif
