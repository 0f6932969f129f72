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

#ifndef HMSE_CHANNEL_HPP
#define HMSE_CHANNEL_HPP

#include "config.hpp"
#include "geometry.hpp"
#include "random.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace hmse {

struct AngleRange
{
    double lo = -pi / 2.0;
    double hi = pi / 2.0;
};

// Clustered angular model. Spreads are per-cluster standard deviations.
struct ClusterSpec
{
    int n_clusters = 8;
    int n_paths = 10;
    AngleRange center_azimuth{};
    AngleRange center_elevation{};
    double spread_az_tx = 0.0;
    double spread_el_tx = 0.0;
    double spread_az_rx = 0.0;
    double spread_el_rx = 0.0;

    static ClusterSpec uniform_spread(int clusters, int paths, double spread_rad)
    {
        ClusterSpec s;
        s.n_clusters = clusters;
        s.n_paths = paths;
        s.spread_az_tx = s.spread_el_tx = s.spread_az_rx = s.spread_el_rx = spread_rad;
        return s;
    }
};

struct PathAngles
{
    int cluster = 0;
    double aoa_az = 0.0;
    double aoa_el = 0.0;
    double aod_az = 0.0;
    double aod_el = 0.0;
};

struct PathRealization
{
    cplx gain{};
    double aoa_az = 0.0;
    double aoa_el = 0.0;
    double aod_az = 0.0;
    double aod_el = 0.0;
};

struct ChannelSet
{
    std::vector<CMatrix> per_user;                          // N_r x N_t each
    std::vector<std::vector<PathRealization>> realizations; // per user

    [[nodiscard]] int users() const { return static_cast<int>(per_user.size()); }
};

// Each cluster draws its four centers independently and uniformly from the
// configured ranges; each path then sits uniformly within +-sqrt(3)*sigma of the
// center, which gives the path angles a standard deviation of sigma.
inline std::vector<PathAngles> sample_cluster_angles(const ClusterSpec &spec, Rng &rng)
{
    auto uniform = [&rng](double lo, double hi) {
        return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto around = [&](double center, double sigma) {
        const double half = std::sqrt(3.0) * sigma;
        return uniform(center - half, center + half);
    };

    std::vector<PathAngles> out;
    out.reserve(static_cast<std::size_t>(spec.n_clusters) * spec.n_paths);
    for (int c = 0; c < spec.n_clusters; ++c)
    {
        const double c_aoa_az = uniform(spec.center_azimuth.lo, spec.center_azimuth.hi);
        const double c_aoa_el = uniform(spec.center_elevation.lo, spec.center_elevation.hi);
        const double c_aod_az = uniform(spec.center_azimuth.lo, spec.center_azimuth.hi);
        const double c_aod_el = uniform(spec.center_elevation.lo, spec.center_elevation.hi);
        for (int p = 0; p < spec.n_paths; ++p)
        {
            PathAngles a;
            a.cluster = c;
            a.aoa_az = around(c_aoa_az, spec.spread_az_rx);
            a.aoa_el = around(c_aoa_el, spec.spread_el_rx);
            a.aod_az = around(c_aod_az, spec.spread_az_tx);
            a.aod_el = around(c_aod_el, spec.spread_el_tx);
            out.push_back(a);
        }
    }
    return out;
}

// sqrt(N_t N_r / P) * sum_p gain_p a_r(p) a_t(p)^H over the P listed paths.
inline CMatrix assemble_channel(const ArrayGeometry &bs, const ArrayGeometry &user,
                                const std::vector<PathRealization> &paths)
{
    const auto n_paths = static_cast<Eigen::Index>(paths.size());
    CMatrix a_r(user.size(), n_paths);
    CMatrix a_t(bs.size(), n_paths);
    CVector gains(n_paths);
    for (Eigen::Index p = 0; p < n_paths; ++p)
    {
        const auto &path = paths[static_cast<std::size_t>(p)];
        a_r.col(p) = upa_response(user, path.aoa_az, path.aoa_el);
        a_t.col(p) = upa_response(bs, path.aod_az, path.aod_el);
        gains(p) = path.gain;
    }
    const double scale = std::sqrt(static_cast<double>(bs.size()) * user.size() / static_cast<double>(n_paths));
    return scale * (a_r * gains.asDiagonal() * a_t.adjoint());
}

inline ChannelSet sample_channel(const SystemConfig &config, const ClusterSpec &spec, Rng &rng)
{
    ChannelSet set;
    set.per_user.reserve(static_cast<std::size_t>(config.users));
    set.realizations.reserve(static_cast<std::size_t>(config.users));
    for (int k = 0; k < config.users; ++k)
    {
        const auto angles = sample_cluster_angles(spec, rng);
        std::vector<PathRealization> paths;
        paths.reserve(angles.size());
        for (const auto &a : angles)
            paths.push_back({complex_normal(rng), a.aoa_az, a.aoa_el, a.aod_az, a.aod_el});
        set.per_user.push_back(assemble_channel(config.bs_geometry, config.user_geometry, paths));
        set.realizations.push_back(std::move(paths));
    }
    return set;
}

inline ClusterSpec cluster_spec_from(const SystemConfig &config)
{
    return ClusterSpec::uniform_spread(config.clusters, config.paths, config.spread_deg * pi / 180.0);
}

} // namespace hmse

#endif
