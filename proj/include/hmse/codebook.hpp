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

#ifndef HMSE_CODEBOOK_HPP
#define HMSE_CODEBOOK_HPP

#include "errors.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace hmse {

// Phase shifter resolution: the allowed phases are 2*pi*i / 2^bits.
struct QuantizerSpec
{
    int bits = 1;

    [[nodiscard]] int levels() const { return 1 << bits; }
    [[nodiscard]] double step() const { return two_pi / levels(); }
    [[nodiscard]] double phase(int level) const { return step() * level; }

    [[nodiscard]] std::vector<double> phases() const
    {
        std::vector<double> out(static_cast<std::size_t>(levels()));
        for (int i = 0; i < levels(); ++i)
            out[static_cast<std::size_t>(i)] = phase(i);
        return out;
    }
};

struct SpatialFrequencyPair
{
    double w_y = 0.0;
    double w_z = 0.0;
};

// Unit-norm constant-modulus beams, one per column of `entries`.
struct Codebook
{
    CMatrix entries;
    int oversampling = 1;
    ArrayGeometry geometry{};
    std::optional<QuantizerSpec> quantizer{};

    [[nodiscard]] Eigen::Index size() const { return entries.cols(); }
    [[nodiscard]] auto entry(Eigen::Index i) const { return entries.col(i); }
};

// (1/sqrt(N)) exp(j (n w_y + m w_z)) in the shared element ordering.
inline CVector generic_array_vector(const ArrayGeometry &g, SpatialFrequencyPair w)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
    CVector a(g.size());
    for (int n = 0; n < g.n_y; ++n)
        for (int m = 0; m < g.n_z; ++m)
            a(g.index(n, m)) = std::polar(scale, n * w.w_y + m * w.w_z);
    return a;
}

namespace detail {

inline double wrap_phase(double phase)
{
    double p = std::fmod(phase, two_pi);
    if (p < 0.0)
        p += two_pi;
    return p >= two_pi ? 0.0 : p;
}

inline double circular_distance(double a, double b)
{
    const double d = std::abs(a - b);
    return std::min(d, two_pi - d);
}

// Nearest allowed phase on the circle. A halfway point goes to the smaller
// phase value; "halfway" tolerates the rounding of std::arg.
inline int nearest_level(double phase, const QuantizerSpec &q)
{
    constexpr double tie_tolerance = 1e-9;
    const int levels = q.levels();
    const double p = wrap_phase(phase);
    const int lo = std::min(static_cast<int>(std::floor(p / q.step())), levels - 1);
    const int hi = (lo + 1) % levels;
    const double d_lo = circular_distance(p, q.phase(lo));
    const double d_hi = circular_distance(p, q.phase(hi));
    if (std::abs(d_lo - d_hi) <= tie_tolerance)
        return std::min(lo, hi);
    return d_lo < d_hi ? lo : hi;
}

inline std::vector<std::uint16_t> quantized_levels(const CVector &v, const QuantizerSpec &q)
{
    std::vector<std::uint16_t> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(nearest_level(std::arg(v(i)), q));
    return out;
}

inline CVector from_levels(const std::vector<std::uint16_t> &levels, const QuantizerSpec &q)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(levels.size()));
    CVector v(static_cast<Eigen::Index>(levels.size()));
    for (std::size_t i = 0; i < levels.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = std::polar(scale, q.phase(levels[i]));
    return v;
}

} // namespace detail

inline CVector quantize_phases(const CVector &v, const QuantizerSpec &q)
{
    return detail::from_levels(detail::quantized_levels(v, q), q);
}

// Over-sampled codebook: all (w_y, w_z) on the rho-times denser DFT grid,
// optionally phase-quantized, then deduplicated keeping the first occurrence.
// Entry order is row-major over (w_y index, w_z index).
inline Codebook build_osc(const ArrayGeometry &g, int rho, std::optional<QuantizerSpec> quantizer = std::nullopt)
{
    if (rho < 1)
        throw std::invalid_argument("build_osc: oversampling factor must be >= 1");

    const int grid_y = rho * g.n_y;
    const int grid_z = rho * g.n_z;
    std::vector<CVector> kept;
    kept.reserve(static_cast<std::size_t>(grid_y) * grid_z);

    std::set<std::vector<std::uint16_t>> seen_levels;
    std::set<std::vector<double>> seen_values;

    for (int iy = 0; iy < grid_y; ++iy)
    {
        for (int iz = 0; iz < grid_z; ++iz)
        {
            const SpatialFrequencyPair w{two_pi * iy / grid_y, two_pi * iz / grid_z};
            CVector v = generic_array_vector(g, w);
            if (quantizer)
            {
                auto levels = detail::quantized_levels(v, *quantizer);
                if (!seen_levels.insert(levels).second)
                    continue;
                v = detail::from_levels(levels, *quantizer);
            }
            else
            {
                std::vector<double> key(static_cast<std::size_t>(2 * v.size()));
                for (Eigen::Index i = 0; i < v.size(); ++i)
                {
                    key[static_cast<std::size_t>(2 * i)] = v(i).real();
                    key[static_cast<std::size_t>(2 * i + 1)] = v(i).imag();
                }
                if (!seen_values.insert(std::move(key)).second)
                    continue;
            }
            kept.push_back(std::move(v));
        }
    }

    Codebook cb;
    cb.oversampling = rho;
    cb.geometry = g;
    cb.quantizer = quantizer;
    cb.entries.resize(g.size(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i)
        cb.entries.col(static_cast<Eigen::Index>(i)) = kept[i];
    return cb;
}

// bits == 0 means infinite resolution.
inline Codebook build_osc(const ArrayGeometry &g, int rho, int bits)
{
    return bits > 0 ? build_osc(g, rho, QuantizerSpec{bits}) : build_osc(g, rho, std::nullopt);
}

template <typename A, typename B>
double correlation(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b)
{
    return std::min(1.0, std::abs(a.dot(b)));
}

// Largest |entry^H v| over the codebook.
inline double best_match(const Codebook &cb, const CVector &v)
{
    if (cb.size() == 0)
        return 0.0;
    return (cb.entries.adjoint() * v).cwiseAbs().maxCoeff();
}

// Cache file: a header row, a metadata row, then one row per entry holding
// interleaved real,imag values. q = 0 marks an unquantized codebook.
//
//   n_y,n_z,rho,q,count
//   8,8,8,3,1234
//   re0,im0,re1,im1,...
inline void write_codebook(std::ostream &out, const Codebook &cb)
{
    out << "n_y,n_z,rho,q,count\n";
    out << cb.geometry.n_y << ',' << cb.geometry.n_z << ',' << cb.oversampling << ','
        << (cb.quantizer ? cb.quantizer->bits : 0) << ',' << cb.size() << '\n';
    out << std::setprecision(17);
    for (Eigen::Index c = 0; c < cb.size(); ++c)
    {
        for (Eigen::Index r = 0; r < cb.entries.rows(); ++r)
        {
            if (r > 0)
                out << ',';
            out << cb.entries(r, c).real() << ',' << cb.entries(r, c).imag();
        }
        out << '\n';
    }
}

inline Codebook read_codebook(std::istream &in)
{
    auto fail = [](const std::string &what) { throw std::runtime_error("codebook file: " + what); };
    std::string line;
    if (!std::getline(in, line) || line != "n_y,n_z,rho,q,count")
        fail("missing header");
    if (!std::getline(in, line))
        fail("missing metadata row");

    std::vector<long long> meta;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            meta.push_back(std::stoll(cell));
    }
    if (meta.size() != 5 || meta[0] < 1 || meta[1] < 1 || meta[2] < 1 || meta[3] < 0 || meta[4] < 0)
        fail("bad metadata row '" + line + "'");

    Codebook cb;
    cb.geometry = ArrayGeometry{static_cast<int>(meta[0]), static_cast<int>(meta[1]), 0.5};
    cb.oversampling = static_cast<int>(meta[2]);
    if (meta[3] > 0)
        cb.quantizer = QuantizerSpec{static_cast<int>(meta[3])};
    const Eigen::Index n = cb.geometry.size();
    cb.entries.resize(n, static_cast<Eigen::Index>(meta[4]));
    for (Eigen::Index c = 0; c < cb.entries.cols(); ++c)
    {
        if (!std::getline(in, line))
            fail("truncated at entry " + std::to_string(c));
        std::stringstream ss(line);
        std::string re, im;
        for (Eigen::Index r = 0; r < n; ++r)
        {
            if (!std::getline(ss, re, ',') || !std::getline(ss, im, ','))
                fail("short row at entry " + std::to_string(c));
            cb.entries(r, c) = cplx(std::stod(re), std::stod(im));
        }
    }
    return cb;
}

} // namespace hmse

#endif
