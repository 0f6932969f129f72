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

#ifndef HMSE_TYPES_HPP
#define HMSE_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace hmse {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Stacks per-user row blocks vertically.
inline CMatrix stack_rows(const std::vector<CMatrix> &blocks)
{
    Eigen::Index rows = 0;
    const Eigen::Index cols = blocks.empty() ? 0 : blocks.front().cols();
    for (const auto &b : blocks)
        rows += b.rows();
    CMatrix out(rows, cols);
    Eigen::Index r = 0;
    for (const auto &b : blocks)
    {
        out.middleRows(r, b.rows()) = b;
        r += b.rows();
    }
    return out;
}

inline CMatrix block_diagonal(const std::vector<CMatrix> &blocks)
{
    Eigen::Index rows = 0, cols = 0;
    for (const auto &b : blocks)
    {
        rows += b.rows();
        cols += b.cols();
    }
    CMatrix out = CMatrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto &b : blocks)
    {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

// Singular values in descending order.
inline RVector singular_values(const CMatrix &a)
{
    return Eigen::JacobiSVD<CMatrix>(a).singularValues();
}

inline double condition_of(const CMatrix &a)
{
    const RVector s = singular_values(a);
    if (s.size() == 0 || s(s.size() - 1) <= 0.0)
        return std::numeric_limits<double>::infinity();
    return s(0) / s(s.size() - 1);
}

} // namespace hmse

#endif
