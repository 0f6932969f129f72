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

#ifndef HMSE_HMSE_HPP
#define HMSE_HMSE_HPP

#include "analog.hpp"
#include "channel.hpp"
#include "codebook.hpp"
#include "config.hpp"
#include "digital.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "geometry.hpp"
#include "harness.hpp"
#include "random.hpp"
#include "types.hpp"

#endif
