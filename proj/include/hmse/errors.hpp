// SPDX-License-Identifier: Apache-2.0
//
// hmse: hybrid min-SMSE precoding for mmWave multi-user 3D-MIMO
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

#ifndef HMSE_ERRORS_HPP
#define HMSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hmse {

// Base for all numerical failures of the pipeline. Configuration problems use
// ConfigError instead so the CLI can map them to distinct exit codes.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class CodebookExhausted : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

class SingularChannel : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

class SingularCombinerSystem : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

class ZeroPowerPrecoder : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

class SingularCovariance : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace hmse

#endif
