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

#ifndef HMSE_ANALOG_HPP
#define HMSE_ANALOG_HPP

#include "channel.hpp"
#include "codebook.hpp"
#include "errors.hpp"

#include <limits>
#include <string>
#include <vector>

namespace hmse {

struct AnalogStage
{
    CMatrix precoder;               // F = [F_1 ... F_K], N_t x (K M_r)
    std::vector<CMatrix> combiners; // M_k, N_r x M_r

    [[nodiscard]] int users() const { return static_cast<int>(combiners.size()); }
    [[nodiscard]] Eigen::Index rf_bs() const { return precoder.cols(); }
};

struct JapcConfig
{
    double beta = 0.15; // maximum correlation factor, (0, 1]
    int rf_per_user = 1;
};

// One greedy pick: user, user-codebook entry, BS-codebook entry, |a_r^H H a_t|^2.
struct JapcSelection
{
    int user = 0;
    Eigen::Index user_entry = 0;
    Eigen::Index bs_entry = 0;
    double objective = 0.0;

    friend bool operator==(const JapcSelection &, const JapcSelection &) = default;
};

struct JapcResult
{
    AnalogStage stage;
    std::vector<JapcSelection> selections; // in iteration order
    int restorations = 0;                  // fallback activations
};

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tracks which entries of one codebook are still selectable.
struct CandidatePool
{
    const Codebook *book = nullptr;
    std::vector<char> active;
    std::vector<char> selected;
    std::vector<Eigen::Index> picks; // columns whose correlation drives restoration

    explicit CandidatePool(const Codebook &cb)
        : book(&cb), active(static_cast<std::size_t>(cb.size()), 1), selected(static_cast<std::size_t>(cb.size()), 0)
    {
    }

    [[nodiscard]] bool empty() const { return std::find(active.begin(), active.end(), 1) == active.end(); }

    // Removes every active entry whose correlation with `winner` reaches beta.
    // The winner itself is always removed; its self-correlation can round to
    // just below 1.
    void prune(Eigen::Index winner, double beta)
    {
        constexpr double slack = 1e-12;
        selected[static_cast<std::size_t>(winner)] = 1;
        active[static_cast<std::size_t>(winner)] = 0;
        picks.push_back(winner);
        const auto w = book->entry(winner);
        for (Eigen::Index i = 0; i < book->size(); ++i)
        {
            if (active[static_cast<std::size_t>(i)] && correlation(w, book->entry(i)) >= beta - slack)
                active[static_cast<std::size_t>(i)] = 0;
        }
    }

    // Brings back the pruned entry least correlated with the picks so far,
    // lowest index among near-ties. Returns false when only already-selected
    // entries remain.
    bool restore_one()
    {
        Eigen::Index best = -1;
        double best_score = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < book->size(); ++i)
        {
            if (active[static_cast<std::size_t>(i)] || selected[static_cast<std::size_t>(i)])
                continue;
            double score = 0.0;
            for (const auto p : picks)
                score = std::max(score, correlation(book->entry(p), book->entry(i)));
            if (score < best_score - 1e-12)
            {
                best_score = score;
                best = i;
            }
        }
        if (best < 0)
            return false;
        active[static_cast<std::size_t>(best)] = 1;
        return true;
    }
};

} // namespace detail

// Greedy joint analog precoder/combiner selection with correlation pruning.
//
// K * M_r iterations. Each picks the (user, receive beam, transmit beam) with
// the largest |a_r^H H_k a_t|^2 over users that still need columns, appends the
// beams to M_k and F_k, and prunes from that user's codebook and from the BS
// codebook every candidate whose correlation with the pick is >= beta. Ties go
// to the lowest (user, user entry, BS entry). When a pool runs dry the least
// correlated pruned candidate is restored; CodebookExhausted is thrown only if
// nothing is left to restore.
inline JapcResult japc_detailed(const ChannelSet &channels, const Codebook &bs_codebook,
                                const std::vector<Codebook> &user_codebooks, const JapcConfig &cfg)
{
    const int users = channels.users();
    const int per_user = cfg.rf_per_user;
    if (!(cfg.beta > 0.0 && cfg.beta <= 1.0))
        throw std::invalid_argument("japc: beta must lie in (0, 1]");
    if (per_user < 1)
        throw std::invalid_argument("japc: rf_per_user must be >= 1");
    if (static_cast<int>(user_codebooks.size()) != users)
        throw std::invalid_argument("japc: need one user codebook per user");
    if (bs_codebook.size() < static_cast<Eigen::Index>(users) * per_user)
        throw CodebookExhausted("japc: BS codebook has " + std::to_string(bs_codebook.size()) +
                                " entries, need " + std::to_string(users * per_user));
    for (int k = 0; k < users; ++k)
        if (user_codebooks[static_cast<std::size_t>(k)].size() < per_user)
            throw CodebookExhausted("japc: codebook of user " + std::to_string(k) + " has fewer than M_r entries");

    // |a_r^H H_k a_t|^2 for every pair; H_k A_t first keeps the product cheap.
    std::vector<detail::RowMatrix> gains;
    gains.reserve(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k)
    {
        const auto &ucb = user_codebooks[static_cast<std::size_t>(k)];
        const CMatrix h_at = channels.per_user[static_cast<std::size_t>(k)] * bs_codebook.entries;
        // The transposed product is laid out exactly like the row-major gains.
        // Blocks of user entries keep each partial product in cache.
        auto &g = gains.emplace_back(ucb.size(), bs_codebook.size());
        Eigen::Map<Eigen::MatrixXd> g_t(g.data(), g.cols(), g.rows());
        constexpr Eigen::Index block = 64;
        CMatrix part;
        for (Eigen::Index c0 = 0; c0 < ucb.size(); c0 += block)
        {
            const auto w = std::min(block, ucb.size() - c0);
            part.noalias() = h_at.adjoint() * ucb.entries.middleCols(c0, w);
            g_t.middleCols(c0, w) = part.cwiseAbs2();
        }
    }

    detail::CandidatePool bs_pool(bs_codebook);
    std::vector<detail::CandidatePool> user_pools;
    user_pools.reserve(static_cast<std::size_t>(users));
    for (const auto &cb : user_codebooks)
        user_pools.emplace_back(cb);

    std::vector<char> remaining(static_cast<std::size_t>(users), 1);
    std::vector<std::vector<Eigen::Index>> rx_picks(static_cast<std::size_t>(users));
    std::vector<std::vector<Eigen::Index>> tx_picks(static_cast<std::size_t>(users));

    // Best active BS entry of every (user, receive beam) row. A row is rescanned
    // only when its cached column was pruned or the BS pool grew back.
    struct RowBest
    {
        double value = -1.0;
        Eigen::Index col = -1;
    };
    std::vector<std::vector<RowBest>> row_best(static_cast<std::size_t>(users));
    std::vector<Eigen::Index> bs_active;
    auto rescan = [&](const detail::RowMatrix &g, Eigen::Index r) {
        RowBest b;
        const double *row = g.data() + r * g.cols();
        for (const auto t : bs_active)
            if (row[t] > b.value)
                b = {row[t], t};
        return b;
    };
    bool bs_restored = true;

    JapcResult result;
    const int iterations = users * per_user;
    for (int iter = 0; iter < iterations; ++iter)
    {
        for (int k = 0; k < users; ++k)
        {
            auto &pool = user_pools[static_cast<std::size_t>(k)];
            if (remaining[static_cast<std::size_t>(k)] && pool.empty())
            {
                if (!pool.restore_one())
                    throw CodebookExhausted("japc: codebook of user " + std::to_string(k) +
                                            " exhausted at iteration " + std::to_string(iter));
                ++result.restorations;
            }
        }
        if (bs_pool.empty())
        {
            if (!bs_pool.restore_one())
                throw CodebookExhausted("japc: BS codebook exhausted at iteration " + std::to_string(iter));
            ++result.restorations;
            bs_restored = true;
        }

        bs_active.clear();
        for (Eigen::Index t = 0; t < bs_codebook.size(); ++t)
            if (bs_pool.active[static_cast<std::size_t>(t)])
                bs_active.push_back(t);

        JapcSelection best{-1, -1, -1, -1.0};
        for (int k = 0; k < users; ++k)
        {
            if (!remaining[static_cast<std::size_t>(k)])
                continue;
            const auto &g = gains[static_cast<std::size_t>(k)];
            const auto &pool = user_pools[static_cast<std::size_t>(k)];
            auto &cache = row_best[static_cast<std::size_t>(k)];
            if (cache.empty())
                cache.resize(static_cast<std::size_t>(g.rows()));
            for (Eigen::Index r = 0; r < g.rows(); ++r)
            {
                if (!pool.active[static_cast<std::size_t>(r)])
                    continue;
                auto &rb = cache[static_cast<std::size_t>(r)];
                if (bs_restored || rb.col < 0 || !bs_pool.active[static_cast<std::size_t>(rb.col)])
                    rb = rescan(g, r);
                if (rb.value > best.objective)
                    best = {k, r, rb.col, rb.value};
            }
        }
        bs_restored = false;

        const auto ku = static_cast<std::size_t>(best.user);
        rx_picks[ku].push_back(best.user_entry);
        tx_picks[ku].push_back(best.bs_entry);
        user_pools[ku].prune(best.user_entry, cfg.beta);
        bs_pool.prune(best.bs_entry, cfg.beta);
        if (static_cast<int>(rx_picks[ku].size()) == per_user)
            remaining[ku] = 0;
        result.selections.push_back(best);
    }

    auto &stage = result.stage;
    stage.precoder.resize(bs_codebook.entries.rows(), iterations);
    Eigen::Index col = 0;
    for (int k = 0; k < users; ++k)
    {
        const auto ku = static_cast<std::size_t>(k);
        const auto &ucb = user_codebooks[ku];
        CMatrix m(ucb.entries.rows(), per_user);
        for (int i = 0; i < per_user; ++i)
        {
            m.col(i) = ucb.entry(rx_picks[ku][static_cast<std::size_t>(i)]);
            stage.precoder.col(col++) = bs_codebook.entry(tx_picks[ku][static_cast<std::size_t>(i)]);
        }
        stage.combiners.push_back(std::move(m));
    }
    return result;
}

inline AnalogStage japc(const ChannelSet &channels, const Codebook &bs_codebook,
                        const std::vector<Codebook> &user_codebooks, const JapcConfig &cfg)
{
    return japc_detailed(channels, bs_codebook, user_codebooks, cfg).stage;
}

// M_k^H H_k F
inline CMatrix effective_channel(const CMatrix &h, const CMatrix &precoder, const CMatrix &combiner)
{
    return combiner.adjoint() * (h * precoder);
}

inline std::vector<CMatrix> effective_channels(const ChannelSet &channels, const AnalogStage &analog)
{
    std::vector<CMatrix> out;
    out.reserve(channels.per_user.size());
    for (std::size_t k = 0; k < channels.per_user.size(); ++k)
        out.push_back(effective_channel(channels.per_user[k], analog.precoder, analog.combiners[k]));
    return out;
}

// sigma_1 / sigma_n with n the number of streams served (K N_s); n <= 0 uses
// the smaller matrix dimension.
inline double condition_number(const CMatrix &h_eff, Eigen::Index streams = 0)
{
    const RVector s = singular_values(h_eff);
    const Eigen::Index n = streams > 0 ? streams : s.size();
    if (n > s.size())
        throw std::invalid_argument("condition_number: more streams than singular values");
    if (s.size() == 0 || s(0) <= 0.0)
        throw SingularChannel("condition_number: zero effective channel");
    const double last = s(n - 1);
    if (last < 1e-12 * s(0))
        throw SingularChannel("condition_number: sigma_" + std::to_string(n) + " below 1e-12 sigma_1");
    return s(0) / last;
}

// Analog stages of an all-digital array: F = I_{N_t}, M_k = I_{N_r}.
inline AnalogStage identity_analog(const ChannelSet &channels)
{
    AnalogStage a;
    const auto &h0 = channels.per_user.front();
    a.precoder = CMatrix::Identity(h0.cols(), h0.cols());
    for (const auto &h : channels.per_user)
        a.combiners.push_back(CMatrix::Identity(h.rows(), h.rows()));
    return a;
}

// Phase-only approximation of each user's dominant singular vectors, quantized
// when bits > 0. A conventional stand-in for plugging a foreign analog design
// into the min-SMSE digital stage.
inline AnalogStage phase_extraction_analog(const ChannelSet &channels, int rf_per_user, int bits_bs, int bits_user)
{
    auto phase_only = [](const CVector &v, int bits) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
        CVector out(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out(i) = std::polar(scale, std::arg(v(i)));
        return bits > 0 ? quantize_phases(out, QuantizerSpec{bits}) : out;
    };

    AnalogStage a;
    const auto n_t = channels.per_user.front().cols();
    a.precoder.resize(n_t, static_cast<Eigen::Index>(channels.users()) * rf_per_user);
    Eigen::Index col = 0;
    for (const auto &h : channels.per_user)
    {
        Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
        CMatrix m(h.rows(), rf_per_user);
        for (int i = 0; i < rf_per_user; ++i)
        {
            m.col(i) = phase_only(svd.matrixU().col(i), bits_user);
            a.precoder.col(col++) = phase_only(svd.matrixV().col(i), bits_bs);
        }
        a.combiners.push_back(std::move(m));
    }
    return a;
}

} // namespace hmse

#endif
