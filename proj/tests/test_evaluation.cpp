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

#include <catch2/catch_amalgamated.hpp>

#include "hmse/hmse.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hmse;
using Catch::Approx;

namespace {

// One user, scalar channel h, all-digital stages.
struct ScalarLink
{
    ChannelSet channels;
    AnalogStage analog;
    DigitalStage digital;
};

ScalarLink awgn_link(double sigma2)
{
    ScalarLink s;
    s.channels.per_user = {CMatrix::Identity(1, 1)};
    s.analog = identity_analog(s.channels);
    s.digital = design_digital({CMatrix::Identity(1, 1)}, s.analog, InitialCombiner::identity(1, 1, 1), sigma2, 1.0);
    return s;
}

// Square, exactly invertible pipeline with orthonormal combiners.
struct OrthoPipeline
{
    ChannelSet channels;
    AnalogStage analog;
    std::vector<CMatrix> h_eff;
};

OrthoPipeline ortho_pipeline(Rng &rng)
{
    OrthoPipeline p;
    p.analog.precoder = random_unitary(rng, 16).leftCols(4);
    for (int k = 0; k < 2; ++k)
    {
        p.channels.per_user.push_back(complex_normal_matrix(rng, 8, 16));
        p.analog.combiners.push_back(random_unitary(rng, 8).leftCols(2));
    }
    p.h_eff = effective_channels(p.channels, p.analog);
    return p;
}

} // namespace

TEST_CASE("qam16: Gray labelling and unit energy", "[evaluation]")
{
    const auto m = qam16();
    REQUIRE(m.constellation.size() == 16);
    cplx mean = 0.0;
    double energy = 0.0;
    for (const auto &c : m.constellation)
    {
        mean += c;
        energy += std::norm(c);
    }
    CHECK(std::abs(mean) < 1e-12);
    CHECK(energy / 16.0 == Approx(1.0).epsilon(1e-12));
    // nearest neighbours differ in one bit
    const double d_min = 2.0 / std::sqrt(10.0);
    for (unsigned a = 0; a < 16; ++a)
        for (unsigned b = a + 1; b < 16; ++b)
            if (std::abs(std::abs(m.constellation[a] - m.constellation[b]) - d_min) < 1e-12)
                CHECK(std::popcount(a ^ b) == 1);
    for (unsigned p = 0; p < 16; ++p)
        CHECK(m.demodulate(m.constellation[p] + cplx(0.05, -0.05)) == p);
    CHECK(m.modulate(0b0000) == cplx(-3.0, -3.0) / std::sqrt(10.0));
    CHECK(m.modulate(0b1101) == cplx(1.0, -1.0) / std::sqrt(10.0));
}

TEST_CASE("transmit_receive: noiseless orthogonal pipeline is transparent", "[evaluation]")
{
    Rng rng(1);
    const auto p = ortho_pipeline(rng);
    const auto d = design_digital(p.h_eff, p.analog, InitialCombiner::identity(2, 2, 2), 0.0, 1.0);
    CHECK(d.mu == 1.0);
    const CVector x = random_symbols(qam16(), 4, rng);
    const auto y = transmit_receive(p.channels, p.analog, d, x, rng);
    CHECK((stack_rows(std::vector<CMatrix>{y[0], y[1]}) - x).norm() < 1e-10);

    auto srng = make_stream(1, Stream::symbols, 0);
    CHECK(smse_empirical(p.channels, p.analog, d, 100, srng).mean < 1e-10);
    CHECK(ber(p.channels, p.analog, d, qam16(), 1600, srng).errors == 0);
}

TEST_CASE("transmit_receive: noiseless output matches the direct product", "[evaluation]")
{
    const auto c = testing::small_config();
    CodebookCache cache;
    const auto p = testing::make_pipeline(c, 3, cache);
    auto d = design_digital(p.h_eff, p.analog, InitialCombiner::identity(2, 2, 2), 0.1, 1.0);
    Rng rng(2);
    const CVector x = random_symbols(qam16(), 4, rng);
    const std::vector<CVector> zero(2, CVector::Zero(16));
    const auto y = transmit_receive(p.channels, p.analog, d, x, zero);
    const CMatrix vhw = block_diagonal(d.combiners).adjoint() * p.h_eff_stacked * d.precoder;
    for (int i = 0; i < 4; ++i)
    {
        cplx acc = 0.0;
        for (int j = 0; j < 4; ++j)
            acc += vhw(i, j) * x(j);
        CHECK(std::abs(y[static_cast<std::size_t>(i / 2)](i % 2) - acc) < 1e-12);
    }
}

TEST_CASE("transmit_receive: affine in x under frozen noise", "[evaluation]")
{
    const auto c = testing::small_config();
    CodebookCache cache;
    const auto p = testing::make_pipeline(c, 4, cache);
    const auto d = design_digital(p.h_eff, p.analog, InitialCombiner::identity(2, 2, 2), 0.1, 1.0);
    Rng rng(3);
    const CVector x = random_symbols(qam16(), 4, rng);
    const std::vector<CVector> noise{complex_normal_vector(rng, 16, 0.1), complex_normal_vector(rng, 16, 0.1)};
    const auto y0 = transmit_receive(p.channels, p.analog, d, CVector::Zero(4), noise);
    const auto y1 = transmit_receive(p.channels, p.analog, d, x, noise);
    const auto y2 = transmit_receive(p.channels, p.analog, d, CVector(2.0 * x), noise);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(((y2[k] - y0[k]) - 2.0 * (y1[k] - y0[k])).norm() < 1e-12);
}

TEST_CASE("smse_empirical agrees with the trace formula", "[evaluation]")
{
    const auto c = testing::small_config();
    CodebookCache cache;
    for (std::uint64_t i = 0; i < 5; ++i)
    {
        const auto p = testing::make_pipeline(c, i, cache);
        const auto d = design_digital(p.h_eff, p.analog, InitialCombiner::identity(2, 2, 2), 0.5, 1.0);
        auto rng = make_stream(11, Stream::symbols, i);
        const auto mc = smse_empirical(p.channels, p.analog, d, 20000, rng);
        const double exact = smse_direct(p.h_eff, p.analog, d);
        CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.stderr_);
        CHECK(mc.count == 20000);
    }
}

TEST_CASE("sse: scalar interference-free oracle", "[evaluation]")
{
    ChannelSet ch;
    ch.per_user = {CMatrix::Constant(1, 1, cplx(0.7, -0.4))};
    AnalogStage a;
    a.precoder = CMatrix::Constant(1, 1, cplx(0.0, 1.0));
    a.combiners = {CMatrix::Constant(1, 1, cplx(0.6, 0.8))};
    DigitalStage d;
    d.precoder = CMatrix::Constant(1, 1, cplx(1.3, 0.2));
    d.combiners = {CMatrix::Constant(1, 1, cplx(-0.5, 0.9))};
    d.gamma = 1.7;
    d.sigma2 = 0.3;
    const cplx h = ch.per_user[0](0, 0) * a.precoder(0, 0);
    const cplx m = a.combiners[0](0, 0), w = d.precoder(0, 0), v = d.combiners[0](0, 0);
    const double expect =
        std::log2(1.0 + d.gamma * d.gamma * std::norm(std::conj(m) * h * w * std::conj(v)) / (0.3 * std::norm(m * v)));
    CHECK(sse(ch, a, d) == Approx(expect).epsilon(1e-12));
}

TEST_CASE("sse: vanishes at high noise and grows with power", "[evaluation]")
{
    const auto c = testing::small_config();
    CodebookCache cache;
    const auto p = testing::make_pipeline(c, 6, cache);
    const auto d = design_digital(p.h_eff, p.analog, InitialCombiner::identity(2, 2, 2), 0.1, 1.0);
    CHECK(sse(p.channels, p.analog, d, 1e12) < 1e-9);
    double last = -1.0;
    for (double pt : {0.1, 1.0, 10.0, 100.0})
    {
        auto scaled = d;
        scaled.gamma = d.gamma * std::sqrt(pt);
        const double s = sse(p.channels, p.analog, scaled, 0.1);
        CHECK(s >= last);
        last = s;
    }
}

TEST_CASE("ber: AWGN identity link matches the closed form", "[evaluation][slow]")
{
    for (double snr_db : {5.0, 10.0})
    {
        const double sigma2 = std::pow(10.0, -snr_db / 10.0);
        const auto s = awgn_link(sigma2);
        auto rng = make_stream(21, Stream::noise, static_cast<std::uint64_t>(snr_db));
        const auto e = ber(s.channels, s.analog, s.digital, qam16(), 400000, rng);
        const double want = oracle::gray_qam16_ber(1.0 / sigma2);
        CHECK(std::abs(e.ber - want) <= 3.0 * e.stderr_);
    }
}

TEST_CASE("ber: random guessing at very low SNR", "[evaluation]")
{
    const auto s = awgn_link(1e8);
    auto rng = make_stream(22, Stream::noise, 0);
    const auto e = ber(s.channels, s.analog, s.digital, qam16(), 200000, rng);
    CHECK(std::abs(e.ber - 0.5) <= 3.0 * e.stderr_);
}

TEST_CASE("ber: bit count must fill whole symbol vectors", "[evaluation]")
{
    const auto s = awgn_link(0.1);
    Rng rng(1);
    CHECK_THROWS_AS(ber(s.channels, s.analog, s.digital, qam16(), 6, rng), std::invalid_argument);
    CHECK_THROWS_AS(ber(s.channels, s.analog, s.digital, qam16(), 0, rng), std::invalid_argument);
    CHECK_NOTHROW(ber(s.channels, s.analog, s.digital, qam16(), 8, rng));
}

TEST_CASE("binomial standard error", "[evaluation]")
{
    const auto e = make_ber_estimate(25, 10000);
    CHECK(e.ber == Approx(0.0025));
    CHECK(e.stderr_ == Approx(std::sqrt(0.0025 * 0.9975 / 10000.0)));
}

TEST_CASE("RunningStats: mean and standard error", "[evaluation]")
{
    RunningStats s;
    for (double x : {1.0, 2.0, 3.0, 4.0})
        s.add(x);
    const auto e = s.estimate();
    CHECK(e.mean == Approx(2.5));
    CHECK(e.stderr_ == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.count == 4);
}
