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

#ifndef HMSE_TESTS_SUPPORT_HPP
#define HMSE_TESTS_SUPPORT_HPP

#include "hmse/hmse.hpp"

#include <vector>

namespace testing {

// Small system matching the two-stream multi-user experiments, with a cheap
// codebook so that hundreds of pipelines stay fast.
inline hmse::SystemConfig small_config()
{
    hmse::SystemConfig c;
    c.bs_geometry = {8, 8, 0.5};
    c.user_geometry = {4, 4, 0.5};
    c.users = 2;
    c.rf_bs = 4;
    c.rf_user = 2;
    c.streams = 2;
    c.rho = 2;
    c.beta = 0.15;
    c.bits_bs = 3;
    c.bits_user = 2;
    return c;
}

struct Pipeline
{
    hmse::ChannelSet channels;
    hmse::AnalogStage analog;
    std::vector<hmse::CMatrix> h_eff;
    hmse::CMatrix h_eff_stacked;
};

inline Pipeline make_pipeline(const hmse::SystemConfig &c, std::uint64_t index, hmse::CodebookCache &cache)
{
    Pipeline p;
    auto rng = hmse::make_stream(c.seed, hmse::Stream::channel, index);
    p.channels = hmse::sample_channel(c, hmse::cluster_spec_from(c), rng);
    const auto &bs = cache.get(c.bs_geometry, c.rho, c.bits_bs);
    const std::vector<hmse::Codebook> users(static_cast<std::size_t>(c.users),
                                            cache.get(c.user_geometry, c.rho, c.bits_user));
    p.analog = hmse::japc(p.channels, bs, users, {c.beta, c.rf_user});
    p.h_eff = hmse::effective_channels(p.channels, p.analog);
    p.h_eff_stacked = hmse::stack_rows(p.h_eff);
    return p;
}

// Unit-Frobenius-norm random direction of the given shape.
inline hmse::CMatrix random_direction(hmse::Rng &rng, Eigen::Index rows, Eigen::Index cols)
{
    hmse::CMatrix d = hmse::complex_normal_matrix(rng, rows, cols);
    return d / d.norm();
}

} // namespace testing

#endif
