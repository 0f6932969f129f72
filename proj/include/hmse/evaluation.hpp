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

#ifndef HMSE_EVALUATION_HPP
#define HMSE_EVALUATION_HPP

#include "analog.hpp"
#include "digital.hpp"
#include "errors.hpp"
#include "random.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hmse {

// Gray-mapped square constellation. Symbol index bits are b0 b1 b2 b3 with b0
// the MSB; b0 b1 select the in-phase level, b2 b3 the quadrature level, and
// each pair maps 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 before scaling to
// unit average energy.
struct ModulationSpec
{
    std::string name;
    int bits_per_symbol = 0;
    std::vector<cplx> constellation; // indexed by the bit pattern

    [[nodiscard]] cplx modulate(unsigned pattern) const { return constellation[pattern]; }

    // Minimum-distance decision, returns the bit pattern.
    [[nodiscard]] unsigned demodulate(cplx y) const
    {
        unsigned best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (unsigned i = 0; i < constellation.size(); ++i)
        {
            const double d = std::norm(y - constellation[i]);
            if (d < best_d)
            {
                best_d = d;
                best = i;
            }
        }
        return best;
    }
};

inline ModulationSpec qam16()
{
    constexpr std::array<double, 4> gray_level{-3.0, -1.0, 3.0, 1.0}; // indexed by 2-bit pattern
    const double scale = 1.0 / std::sqrt(10.0);
    ModulationSpec m{"16-QAM", 4, {}};
    m.constellation.resize(16);
    for (unsigned p = 0; p < 16; ++p)
        m.constellation[p] = scale * cplx(gray_level[p >> 2], gray_level[p & 3u]);
    return m;
}

struct Estimate
{
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t count = 0;
};

// Welford accumulator.
class RunningStats
{
  public:
    void add(double x)
    {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    [[nodiscard]] Estimate estimate() const
    {
        Estimate e;
        e.mean = mean_;
        e.count = n_;
        e.stderr_ = n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0;
        return e;
    }

  private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Noiseless end-to-end map and noise filters of the link:
//   x_hat_k = T_k x + R_k n_k,  T_k = V_k^H M_k^H H_k F W,  R_k = V_k^H M_k^H / gamma.
class LinkModel
{
  public:
    LinkModel(const ChannelSet &channels, const AnalogStage &analog, const DigitalStage &digital)
        : sigma2_(digital.sigma2)
    {
        const CMatrix fw = analog.precoder * digital.precoder;
        for (std::size_t k = 0; k < channels.per_user.size(); ++k)
        {
            const CMatrix vm = digital.combiners[k].adjoint() * analog.combiners[k].adjoint();
            transfer_.push_back(vm * (channels.per_user[k] * fw));
            noise_filter_.push_back(vm / digital.gamma);
        }
        total_ = stack_rows(transfer_);
    }

    [[nodiscard]] int users() const { return static_cast<int>(transfer_.size()); }
    [[nodiscard]] Eigen::Index receive_antennas(int k) const { return noise_filter_[static_cast<std::size_t>(k)].cols(); }
    [[nodiscard]] double sigma2() const { return sigma2_; }

    // V^H H_eff W, the stacked noiseless map.
    [[nodiscard]] const CMatrix &transfer() const { return total_; }

    [[nodiscard]] std::vector<CVector> receive(const CVector &x, const std::vector<CVector> &noise) const
    {
        std::vector<CVector> out;
        out.reserve(transfer_.size());
        for (std::size_t k = 0; k < transfer_.size(); ++k)
            out.push_back(transfer_[k] * x + noise_filter_[k] * noise[k]);
        return out;
    }

    [[nodiscard]] std::vector<CVector> draw_noise(Rng &rng) const
    {
        std::vector<CVector> n;
        n.reserve(noise_filter_.size());
        for (const auto &r : noise_filter_)
            n.push_back(sigma2_ > 0.0 ? complex_normal_vector(rng, r.cols(), sigma2_) : CVector::Zero(r.cols()));
        return n;
    }

  private:
    double sigma2_;
    std::vector<CMatrix> transfer_;
    std::vector<CMatrix> noise_filter_;
    CMatrix total_;
};

// Receive with the given per-user noise vectors n_k (length N_r each).
inline std::vector<CVector> transmit_receive(const ChannelSet &channels, const AnalogStage &analog,
                                             const DigitalStage &digital, const CVector &x,
                                             const std::vector<CVector> &noise)
{
    return LinkModel(channels, analog, digital).receive(x, noise);
}

// Receive with fresh CN(0, sigma2) noise at every antenna.
inline std::vector<CVector> transmit_receive(const ChannelSet &channels, const AnalogStage &analog,
                                             const DigitalStage &digital, const CVector &x, Rng &rng)
{
    const LinkModel link(channels, analog, digital);
    return link.receive(x, link.draw_noise(rng));
}

inline CVector random_symbols(const ModulationSpec &mod, Eigen::Index n, Rng &rng)
{
    std::uniform_int_distribution<unsigned> pick(0, static_cast<unsigned>(mod.constellation.size()) - 1);
    CVector x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x(i) = mod.modulate(pick(rng));
    return x;
}

// Monte Carlo estimate of E||x_hat - x||^2 over 16-QAM symbols and noise.
inline Estimate smse_empirical(const ChannelSet &channels, const AnalogStage &analog, const DigitalStage &digital,
                               int n_trials, Rng &rng)
{
    if (n_trials < 1)
        throw std::invalid_argument("smse_empirical: n_trials must be >= 1");
    const LinkModel link(channels, analog, digital);
    const ModulationSpec mod = qam16();
    const auto n_streams = link.transfer().rows();
    RunningStats stats;
    for (int t = 0; t < n_trials; ++t)
    {
        const CVector x = random_symbols(mod, n_streams, rng);
        const auto x_hat = link.receive(x, link.draw_noise(rng));
        double err = 0.0;
        Eigen::Index row = 0;
        for (const auto &xk : x_hat)
        {
            err += (xk - x.segment(row, xk.size())).squaredNorm();
            row += xk.size();
        }
        stats.add(err);
    }
    return stats.estimate();
}

namespace detail {

inline double log2_det_hpd(const CMatrix &a)
{
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("sse: covariance is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum() / std::log(2.0);
}

} // namespace detail

// Sum over users of log2 det(I + Gamma_k^{-1} S_k) with Gaussian signalling,
// S_k the user's own post-combining signal covariance and Gamma_k inter-user
// interference plus filtered noise.
inline double sse(const ChannelSet &channels, const AnalogStage &analog, const DigitalStage &digital, double sigma2)
{
    const double g2 = digital.gamma * digital.gamma;
    const auto ns = digital.streams_per_user();
    double total = 0.0;
    for (std::size_t k = 0; k < channels.per_user.size(); ++k)
    {
        const auto &v = digital.combiners[k];
        const CMatrix vm = v.adjoint() * analog.combiners[k].adjoint();
        const CMatrix vhw = vm * (channels.per_user[k] * (analog.precoder * digital.precoder)); // N_s x K N_s
        const auto own = vhw.middleCols(static_cast<Eigen::Index>(k) * ns, ns);
        const CMatrix signal = g2 * own * own.adjoint();
        CMatrix gamma_k = g2 * (vhw * vhw.adjoint()) - signal;
        gamma_k.noalias() += sigma2 * (vm * vm.adjoint());
        gamma_k = 0.5 * (gamma_k + gamma_k.adjoint()).eval();
        if (!(condition_of(gamma_k) <= max_condition))
            throw SingularCovariance("sse: interference-plus-noise covariance of user " + std::to_string(k) +
                                     " is singular");
        const CMatrix with_signal = gamma_k + signal;
        total += detail::log2_det_hpd(with_signal) - detail::log2_det_hpd(gamma_k);
    }
    return total;
}

inline double sse(const ChannelSet &channels, const AnalogStage &analog, const DigitalStage &digital)
{
    return sse(channels, analog, digital, digital.sigma2);
}

struct BerEstimate
{
    double ber = 0.0;
    double stderr_ = 0.0;
    std::int64_t bits = 0;
    std::int64_t errors = 0;
};

inline BerEstimate make_ber_estimate(std::int64_t errors, std::int64_t bits)
{
    BerEstimate e;
    e.bits = bits;
    e.errors = errors;
    e.ber = bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
    e.stderr_ = bits > 0 ? std::sqrt(e.ber * (1.0 - e.ber) / static_cast<double>(bits)) : 0.0;
    return e;
}

// Uncoded BER. Each stream is divided by its own complex gain (V^H H_eff W)_ii
// to undo the min-SMSE bias before minimum-distance demapping.
inline BerEstimate ber(const ChannelSet &channels, const AnalogStage &analog, const DigitalStage &digital,
                       const ModulationSpec &mod, std::int64_t n_bits, Rng &rng)
{
    const LinkModel link(channels, analog, digital);
    const auto n_streams = link.transfer().rows();
    const std::int64_t bits_per_vector = static_cast<std::int64_t>(mod.bits_per_symbol) * n_streams;
    if (n_bits < 1 || n_bits % bits_per_vector != 0)
        throw std::invalid_argument("ber: n_bits must be a positive multiple of " + std::to_string(bits_per_vector));

    const CVector gains = link.transfer().diagonal();
    const unsigned n_points = static_cast<unsigned>(mod.constellation.size());
    std::uniform_int_distribution<unsigned> pick(0, n_points - 1);
    std::vector<unsigned> sent(static_cast<std::size_t>(n_streams));
    CVector x(n_streams);

    std::int64_t errors = 0;
    const std::int64_t vectors = n_bits / bits_per_vector;
    for (std::int64_t t = 0; t < vectors; ++t)
    {
        for (Eigen::Index i = 0; i < n_streams; ++i)
        {
            sent[static_cast<std::size_t>(i)] = pick(rng);
            x(i) = mod.modulate(sent[static_cast<std::size_t>(i)]);
        }
        const auto x_hat = link.receive(x, link.draw_noise(rng));
        Eigen::Index row = 0;
        for (const auto &xk : x_hat)
        {
            for (Eigen::Index i = 0; i < xk.size(); ++i, ++row)
            {
                const unsigned decided = mod.demodulate(xk(i) / gains(row));
                errors += std::popcount(decided ^ sent[static_cast<std::size_t>(row)]);
            }
        }
    }
    return make_ber_estimate(errors, n_bits);
}

} // namespace hmse

#endif
