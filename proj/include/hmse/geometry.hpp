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

#ifndef HMSE_GEOMETRY_HPP
#define HMSE_GEOMETRY_HPP

#include "types.hpp"

#include <cmath>

namespace hmse {

// Uniform planar array in the yz-plane.
//
// Element (n, m), with n the y-index and m the z-index, is stored at position
// n * n_z + m of every array vector in this library: the z-index runs fastest,
// so a planar response is kron(y-response, z-response). Channel, codebook and
// analog modules all share this ordering.
struct ArrayGeometry
{
    int n_y = 1;
    int n_z = 1;
    double spacing_over_wavelength = 0.5;

    [[nodiscard]] int size() const { return n_y * n_z; }
    [[nodiscard]] int index(int n, int m) const { return n * n_z + m; }

    friend bool operator==(const ArrayGeometry &, const ArrayGeometry &) = default;
};

// Far-field response toward azimuth theta and elevation phi (radians).
inline CVector upa_response(const ArrayGeometry &g, double azimuth, double elevation)
{
    const int n_total = g.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_total));
    const double k = two_pi * g.spacing_over_wavelength;
    const double u = std::sin(azimuth) * std::cos(elevation);
    const double v = std::sin(elevation);
    CVector a(n_total);
    for (int n = 0; n < g.n_y; ++n)
        for (int m = 0; m < g.n_z; ++m)
            a(g.index(n, m)) = std::polar(scale, k * (n * u + m * v));
    return a;
}

} // namespace hmse

#endif
