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

// One channel draw through the full pipeline, printing the per-stage numbers.

#include "hmse/hmse.hpp"

#include <iostream>

int main()
{
    hmse::SystemConfig config; // 8x8 BS, 4x4 users, K = 2, M_t = 4, M_r = N_s = 2
    config.sigma2 = hmse::SnrGrid::noise_variance(10.0, config.power);

    auto rng = hmse::make_stream(config.seed, hmse::Stream::channel, 0);
    const auto channels = hmse::sample_channel(config, hmse::cluster_spec_from(config), rng);

    const auto bs_book = hmse::build_osc(config.bs_geometry, config.rho, config.bits_bs);
    const auto user_book = hmse::build_osc(config.user_geometry, config.rho, config.bits_user);
    const std::vector<hmse::Codebook> user_books(static_cast<std::size_t>(config.users), user_book);

    const auto analog = hmse::japc(channels, bs_book, user_books, {config.beta, config.rf_user});
    const auto h_eff = hmse::effective_channels(channels, analog);
    const auto v_ini = hmse::InitialCombiner::identity(config.users, config.rf_user, config.streams);
    const auto digital = hmse::design_digital(h_eff, analog, v_ini, config.sigma2, config.power);

    std::cout << "codebook sizes: BS " << bs_book.size() << ", user " << user_book.size() << '\n'
              << "cond(H_eff) = " << hmse::condition_number(hmse::stack_rows(h_eff)) << '\n'
              << "gamma = " << digital.gamma << ", mu = " << digital.mu << '\n'
              << "SMSE (trace) = " << hmse::smse_direct(h_eff, analog, digital) << '\n'
              << "SMSE (approx) = "
              << hmse::smse_analytic(hmse::stack_rows(h_eff), digital.gamma, config.sigma2, config.users,
                                     config.streams, config.power)
              << '\n'
              << "SSE = " << hmse::sse(channels, analog, digital) << " bit/s/Hz\n";
}
