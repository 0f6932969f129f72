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

#ifndef HMSE_DIGITAL_HPP
#define HMSE_DIGITAL_HPP

#include "analog.hpp"
#include "errors.hpp"
#include "random.hpp"
#include "types.hpp"

#include <cassert>
#include <cmath>
#include <string>
#include <vector>

namespace hmse {

inline constexpr double max_condition = 1e12;

// Per-user starting combiners, M_r x N_s with orthonormal columns. With
// M_r = N_s every block is unitary.
struct InitialCombiner
{
    std::vector<CMatrix> blocks;

    static InitialCombiner identity(int users, int rf_per_user, int streams)
    {
        InitialCombiner v;
        for (int k = 0; k < users; ++k)
            v.blocks.push_back(CMatrix::Identity(rf_per_user, streams));
        return v;
    }

    static InitialCombiner random(int users, int rf_per_user, int streams, Rng &rng)
    {
        InitialCombiner v;
        for (int k = 0; k < users; ++k)
            v.blocks.push_back(random_unitary(rng, rf_per_user).leftCols(streams));
        return v;
    }

    [[nodiscard]] CMatrix stacked() const { return block_diagonal(blocks); }
};

struct DigitalStage
{
    CMatrix precoder;               // W, M_t x (K N_s)
    std::vector<CMatrix> combiners; // V_k, M_r x N_s
    double gamma = 1.0;
    double mu = 1.0;
    double sigma2 = 0.0;

    [[nodiscard]] Eigen::Index streams_per_user() const
    {
        return combiners.empty() ? 0 : combiners.front().cols();
    }
    [[nodiscard]] auto precoder_block(int k) const
    {
        const auto ns = streams_per_user();
        return precoder.middleCols(k * ns, ns);
    }
};

// W = (H_eff^H H_eff)^{-1} H_eff^H V_ini, solved as a least-squares problem on
// H_eff rather than through the explicit inverse.
inline CMatrix digital_precoder(const CMatrix &h_eff, const InitialCombiner &v_ini)
{
    if (h_eff.rows() < h_eff.cols())
        throw RankDeficient("digital_precoder: H_eff is " + std::to_string(h_eff.rows()) + "x" +
                            std::to_string(h_eff.cols()) + ", needs full column rank");
    const double cond = condition_of(h_eff);
    if (!(cond * cond <= max_condition))
        throw RankDeficient("digital_precoder: Gram matrix condition number exceeds 1e12");
    return h_eff.colPivHouseholderQr().solve(v_ini.stacked());
}

// Minimum-norm variant, pinv(H_eff) V_ini. Equals digital_precoder for full
// column rank H_eff and stays defined for wide all-digital channels.
inline CMatrix digital_precoder_min_norm(const CMatrix &h_eff, const InitialCombiner &v_ini)
{
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(h_eff);
    if (cod.rank() < std::min(h_eff.rows(), h_eff.cols()))
        throw RankDeficient("digital_precoder_min_norm: H_eff is rank deficient");
    return cod.solve(v_ini.stacked());
}

// Returns V_k, where
//   V_k^H = W_k^H H_k^H (H_k W W^H H_k^H + (sigma2/gamma^2) M_k^H M_k)^{-1}
// and H_k is the user's effective channel.
inline CMatrix digital_combiner(const CMatrix &h_eff_k, const CMatrix &w, const CMatrix &w_k, const CMatrix &m_k,
                                double gamma, double sigma2)
{
    const CMatrix hw = h_eff_k * w;
    CMatrix inner = hw * hw.adjoint();
    inner.noalias() += (sigma2 / (gamma * gamma)) * (m_k.adjoint() * m_k);
    if (!(condition_of(inner) <= max_condition))
        throw SingularCombinerSystem("digital_combiner: inner matrix condition number exceeds 1e12");
    return inner.partialPivLu().solve(h_eff_k * w_k);
}

// gamma = sqrt(P_t / tr(F W W^H F^H))
inline double normalization_gamma(const CMatrix &f, const CMatrix &w, double p_t)
{
    const double tr = (f * w).squaredNorm();
    if (!(tr > 1e-300))
        throw ZeroPowerPrecoder("normalization_gamma: tr(F W W^H F^H) is zero");
    return std::sqrt(p_t / tr);
}

// Single decoupling pass: W from V_ini, gamma from the power constraint, then
// each V_k from W.
inline DigitalStage design_digital(const std::vector<CMatrix> &h_eff_blocks, const AnalogStage &analog,
                                   const InitialCombiner &v_ini, double sigma2, double p_t, bool min_norm = false)
{
    const CMatrix h_eff = stack_rows(h_eff_blocks);
    DigitalStage d;
    d.precoder = min_norm ? digital_precoder_min_norm(h_eff, v_ini) : digital_precoder(h_eff, v_ini);
    d.gamma = normalization_gamma(analog.precoder, d.precoder, p_t);
    d.sigma2 = sigma2;
    d.mu = d.gamma * d.gamma / (d.gamma * d.gamma + sigma2);
    const auto ns = v_ini.blocks.front().cols();
    for (std::size_t k = 0; k < h_eff_blocks.size(); ++k)
    {
        const CMatrix w_k = d.precoder.middleCols(static_cast<Eigen::Index>(k) * ns, ns);
        d.combiners.push_back(
            digital_combiner(h_eff_blocks[k], d.precoder, w_k, analog.combiners[k], d.gamma, sigma2));
    }
    return d;
}

// Block identity A_i (A^H A)^{-1} A_j^H = delta(i-j) I for a square invertible
// A split into row blocks of the given heights. Test oracle.
inline bool lemma1_check(const CMatrix &a, const std::vector<int> &block_rows, double tol = 1e-9)
{
    if (a.rows() != a.cols())
        return false;
    int total = 0;
    for (int r : block_rows)
    {
        if (r < 1)
            return false;
        total += r;
    }
    if (total != a.rows())
        return false;

    const CMatrix gram = a.adjoint() * a;
    Eigen::FullPivLU<CMatrix> lu(gram);
    if (!lu.isInvertible())
        return false;
    const CMatrix gram_inv_ah = lu.solve(CMatrix(a.adjoint()));

    int ri = 0;
    for (int bi : block_rows)
    {
        int rj = 0;
        for (int bj : block_rows)
        {
            const CMatrix prod = a.middleRows(ri, bi) * gram_inv_ah.middleCols(rj, bj);
            const CMatrix expect = ri == rj ? CMatrix(CMatrix::Identity(bi, bj)) : CMatrix(CMatrix::Zero(bi, bj));
            if (!((prod - expect).norm() < tol))
                return false;
            rj += bj;
        }
        ri += bi;
    }
    return true;
}

// Exact sum MSE for given W, V_k, gamma (the per-user trace expression):
//   xi_k = tr(V_k^H H_k W W^H H_k^H V_k) + (sigma2/gamma^2) tr(V_k^H M_k^H M_k V_k)
//          - 2 Re tr(V_k^H H_k W_k) + N_s
inline double smse_direct(const std::vector<CMatrix> &h_eff_blocks, const CMatrix &w,
                          const std::vector<CMatrix> &v_blocks, const std::vector<CMatrix> &m_blocks, double gamma,
                          double sigma2)
{
    double xi = 0.0;
    Eigen::Index col = 0;
    for (std::size_t k = 0; k < h_eff_blocks.size(); ++k)
    {
        const auto &v = v_blocks[k];
        const auto ns = v.cols();
        const CMatrix vh_h = v.adjoint() * h_eff_blocks[k];
        const CMatrix vh_hw = vh_h * w;
        const CMatrix mv = m_blocks[k] * v;
        xi += vh_hw.squaredNorm();
        xi += sigma2 / (gamma * gamma) * mv.squaredNorm();
        xi -= 2.0 * vh_hw.middleCols(col, ns).trace().real();
        xi += static_cast<double>(ns);
        col += ns;
    }
    return xi;
}

inline double smse_direct(const std::vector<CMatrix> &h_eff_blocks, const AnalogStage &analog,
                          const DigitalStage &digital)
{
    return smse_direct(h_eff_blocks, digital.precoder, digital.combiners, analog.combiners, digital.gamma,
                       digital.sigma2);
}

// tr((H^H H)^{-1}) through a Cholesky solve and through the singular values.
struct InverseGramTrace
{
    double via_solve = 0.0;
    double via_svd = 0.0;
};

inline InverseGramTrace inverse_gram_trace(const CMatrix &h_eff)
{
    const RVector s = singular_values(h_eff);
    if (s.size() < h_eff.cols() || s(s.size() - 1) <= 0.0 ||
        !(std::pow(s(0) / s(s.size() - 1), 2) <= max_condition))
        throw RankDeficient("inverse_gram_trace: H_eff lacks full column rank");
    InverseGramTrace t;
    const CMatrix gram = h_eff.adjoint() * h_eff;
    t.via_solve = gram.llt().solve(CMatrix::Identity(gram.rows(), gram.cols())).trace().real();
    t.via_svd = s.array().square().inverse().sum();
    return t;
}

// Closed-form SMSE approximation assuming V^H H_eff W ~ mu I:
//   (mu^2 - 2 mu + 1) K N_s + (K N_s mu^2 sigma2 / P_t) tr((H^H H)^{-1})
// or, for high SNR, (K N_s sigma2 / P_t) sum_i sigma_i^{-2}.
inline double smse_analytic(const CMatrix &h_eff, double gamma, double sigma2, int users, int streams, double p_t,
                            bool high_snr = false)
{
    const auto t = inverse_gram_trace(h_eff);
    assert(std::abs(t.via_solve - t.via_svd) <= 1e-8 * std::abs(t.via_svd));
    const double kns = static_cast<double>(users) * streams;
    if (high_snr)
        return kns * sigma2 / p_t * t.via_svd;
    const double mu = gamma * gamma / (gamma * gamma + sigma2);
    return (mu * mu - 2.0 * mu + 1.0) * kns + kns * mu * mu * sigma2 / p_t * t.via_solve;
}

} // namespace hmse

#endif
