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

#ifndef HMSE_RANDOM_HPP
#define HMSE_RANDOM_HPP

#include "types.hpp"

#include <cstdint>
#include <random>

namespace hmse {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for (master seed, purpose, index). Streams of different
// purposes never share state, so the channel of trial t is the same for every
// scheme and SNR point.
enum class Stream : std::uint64_t
{
    channel = 1,
    symbols = 2,
    noise = 3,
    misc = 4,
};

inline Rng make_stream(std::uint64_t master, Stream purpose, std::uint64_t index)
{
    const std::uint64_t s = mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(purpose))) + index);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Rng(seq);
}

// Circularly symmetric complex Gaussian with the given total variance.
inline cplx complex_normal(Rng &rng, double variance = 1.0)
{
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline CVector complex_normal_vector(Rng &rng, Eigen::Index n, double variance = 1.0)
{
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = complex_normal(rng, variance);
    return v;
}

inline CMatrix complex_normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance = 1.0)
{
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = complex_normal(rng, variance);
    return m;
}

// Haar-distributed unitary matrix (QR of a Gaussian matrix with phase fix).
inline CMatrix random_unitary(Rng &rng, Eigen::Index n)
{
    const CMatrix g = complex_normal_matrix(rng, n, n);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0)
            q.col(i) *= r(i, i) / mag;
    }
    return q;
}

} // namespace hmse

#endif
