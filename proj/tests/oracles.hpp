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

// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical paths.

#ifndef HMSE_TESTS_ORACLES_HPP
#define HMSE_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
constexpr double pi = std::numbers::pi;

// Columns kron(F_y(:, i), F_z(:, j)) of two unitary DFT matrices, (i, j) row-major.
inline CMatrix dft2_codebook(int n_y, int n_z)
{
    auto dft = [](int n) {
        CMatrix f(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                f(r, c) = std::exp(cplx(0.0, 2.0 * pi * r * c / n)) / std::sqrt(double(n));
        return f;
    };
    const CMatrix fy = dft(n_y), fz = dft(n_z);
    CMatrix out(n_y * n_z, n_y * n_z);
    for (int i = 0; i < n_y; ++i)
        for (int j = 0; j < n_z; ++j)
            for (int a = 0; a < n_y; ++a)
                for (int b = 0; b < n_z; ++b)
                    out(a * n_z + b, i * n_z + j) = fy(a, i) * fz(b, j);
    return out;
}

// Number of distinct 1-bit-quantized vectors among the oversampled ULA beams,
// by direct enumeration of the sign patterns.
inline int ula_quantized_count(int n, int rho, int bits)
{
    const int levels = 1 << bits;
    std::set<std::vector<int>> seen;
    for (int i = 0; i < rho * n; ++i)
    {
        std::vector<int> pattern;
        for (int e = 0; e < n; ++e)
        {
            double ph = std::fmod(2.0 * pi * i * e / (rho * n), 2.0 * pi);
            int best = 0;
            double best_d = 1e300;
            for (int l = 0; l < levels; ++l)
            {
                const double d0 = std::abs(ph - 2.0 * pi * l / levels);
                const double d = std::min(d0, 2.0 * pi - d0);
                if (d < best_d - 1e-9)
                {
                    best_d = d;
                    best = l;
                }
            }
            pattern.push_back(best);
        }
        seen.insert(pattern);
    }
    return static_cast<int>(seen.size());
}

// Singular values from the eigenvalues of A^H A, descending.
inline Eigen::VectorXd singular_values_via_gram(const CMatrix &a)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a.adjoint() * a);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    return ev;
}

// Standard normal tail by composite Simpson integration of the density.
inline double q_function(double x)
{
    const double upper = x + 40.0;
    const int n = 200000;
    const double h = (upper - x) / n;
    auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * pi); };
    double s = pdf(x) + pdf(upper);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * pdf(x + i * h);
    return s * h / 3.0;
}

// Gray 16-QAM bit error probability on AWGN at Es/N0 (linear), unit-energy
// symbols: 4-PAM per dimension with half distance a = 1/sqrt(10) and per
// dimension noise deviation sqrt(N0/2).
inline double gray_qam16_ber(double es_over_n0)
{
    const double a = 1.0 / std::sqrt(10.0);
    const double s = std::sqrt(1.0 / es_over_n0 / 2.0);
    const double x = a / s;
    return (3.0 * q_function(x) + 2.0 * q_function(3.0 * x) - q_function(5.0 * x)) / 4.0;
}

// Exhaustive search over every greedy-consistent selection sequence of the
// joint analog selection, with the same pruning and restoration rules. Among
// all feasible sequences it returns the lexicographically best one: largest
// objective first, then smallest (user, user entry, BS entry).
struct JapcInstance
{
    std::vector<CMatrix> channels;
    std::vector<CVector> bs_book;
    std::vector<std::vector<CVector>> user_books;
    double beta = 1.0;
    int per_user = 1;
};

struct Pick
{
    int user;
    int rx;
    int tx;
    double objective;
};

namespace detail {

inline double naive_gain(const CMatrix &h, const CVector &ar, const CVector &at)
{
    cplx acc = 0.0;
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < h.cols(); ++j)
            acc += std::conj(ar(i)) * h(i, j) * at(j);
    return std::norm(acc);
}

inline double naive_corr(const CVector &a, const CVector &b)
{
    cplx acc = 0.0;
    for (int i = 0; i < a.size(); ++i)
        acc += std::conj(a(i)) * b(i);
    return std::min(1.0, std::abs(acc));
}

struct Pool
{
    std::set<int> active;
    std::set<int> taken;
};

inline void prune(Pool &p, const std::vector<CVector> &book, int winner, double beta)
{
    p.taken.insert(winner);
    p.active.erase(winner);
    for (auto it = p.active.begin(); it != p.active.end();)
        it = naive_corr(book[winner], book[*it]) >= beta - 1e-12 ? p.active.erase(it) : std::next(it);
}

inline bool restore(Pool &p, const std::vector<CVector> &book)
{
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(book.size()); ++i)
    {
        if (p.active.count(i) || p.taken.count(i))
            continue;
        double score = 0.0;
        for (int t : p.taken)
            score = std::max(score, naive_corr(book[t], book[i]));
        if (score < best_score - 1e-12)
        {
            best_score = score;
            best = i;
        }
    }
    if (best < 0)
        return false;
    p.active.insert(best);
    return true;
}

inline bool better(const std::vector<Pick> &a, const std::vector<Pick> &b)
{
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    {
        if (a[i].objective != b[i].objective)
            return a[i].objective > b[i].objective;
        if (a[i].user != b[i].user)
            return a[i].user < b[i].user;
        if (a[i].rx != b[i].rx)
            return a[i].rx < b[i].rx;
        if (a[i].tx != b[i].tx)
            return a[i].tx < b[i].tx;
    }
    return a.size() > b.size();
}

// User pools record picks per user; the BS pool records all picks.
inline void search(const JapcInstance &in, Pool bs, std::vector<Pool> users, std::vector<int> counts,
                   std::vector<Pick> &path, std::vector<Pick> &best, int remaining_iters)
{
    if (remaining_iters == 0)
    {
        if (best.empty() || better(path, best))
            best = path;
        return;
    }
    const int k_users = static_cast<int>(in.channels.size());
    for (int k = 0; k < k_users; ++k)
        if (counts[k] < in.per_user && users[k].active.empty() && !restore(users[k], in.user_books[k]))
            return;
    if (bs.active.empty() && !restore(bs, in.bs_book))
        return;

    for (int k = 0; k < k_users; ++k)
    {
        if (counts[k] >= in.per_user)
            continue;
        for (int r : users[k].active)
        {
            for (int t : bs.active)
            {
                const double obj = naive_gain(in.channels[k], in.user_books[k][r], in.bs_book[t]);
                // Only sequences whose prefix can still win are explored.
                if (!best.empty())
                {
                    std::vector<Pick> probe = path;
                    probe.push_back({k, r, t, obj});
                    std::vector<Pick> best_prefix(best.begin(), best.begin() + static_cast<long>(probe.size()));
                    if (better(best_prefix, probe))
                        continue;
                }
                Pool bs2 = bs;
                std::vector<Pool> users2 = users;
                std::vector<int> counts2 = counts;
                prune(users2[k], in.user_books[k], r, in.beta);
                prune(bs2, in.bs_book, t, in.beta);
                ++counts2[k];
                path.push_back({k, r, t, obj});
                search(in, bs2, users2, counts2, path, best, remaining_iters - 1);
                path.pop_back();
            }
        }
    }
}

} // namespace detail

inline std::vector<Pick> japc_brute_force(const JapcInstance &in)
{
    detail::Pool bs;
    for (int i = 0; i < static_cast<int>(in.bs_book.size()); ++i)
        bs.active.insert(i);
    std::vector<detail::Pool> users(in.user_books.size());
    for (std::size_t k = 0; k < users.size(); ++k)
        for (int i = 0; i < static_cast<int>(in.user_books[k].size()); ++i)
            users[k].active.insert(i);
    std::vector<int> counts(in.channels.size(), 0);
    std::vector<Pick> path, best;
    detail::search(in, bs, users, counts, path, best,
                   static_cast<int>(in.channels.size()) * in.per_user);
    return best;
}

} // namespace oracle

#endif
