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

#ifndef HMSE_CONFIG_HPP
#define HMSE_CONFIG_HPP

#include "errors.hpp"
#include "geometry.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace hmse {

struct SystemConfig
{
    ArrayGeometry bs_geometry{8, 8, 0.5};
    ArrayGeometry user_geometry{4, 4, 0.5};
    int users = 2;           // K
    int rf_bs = 4;           // M_t
    int rf_user = 2;         // M_r
    int streams = 2;         // N_s per user
    double power = 1.0;      // P_t
    double sigma2 = 0.1;     // noise variance per receive antenna
    int bits_bs = 3;         // B_t, 0 = unquantized
    int bits_user = 2;       // B_r, 0 = unquantized
    int rho = 8;
    double beta = 0.15;
    std::uint64_t seed = 1;
    int trials = 1000;       // channel realizations per SNR point
    std::int64_t ber_bits = 1'000'000;
    int smse_symbols = 1000; // symbol vectors per channel for Monte Carlo SMSE

    int clusters = 8;        // N_c
    int paths = 10;          // N_p
    double spread_deg = 7.5;

    int threads = 1;

    [[nodiscard]] int n_tx() const { return bs_geometry.size(); }
    [[nodiscard]] int n_rx() const { return user_geometry.size(); }
};

struct Violation
{
    std::string invariant;
    std::string detail;
};

inline std::vector<Violation> validate_config(const SystemConfig &c)
{
    std::vector<Violation> out;
    auto add = [&](std::string inv, std::string detail) { out.push_back({std::move(inv), std::move(detail)}); };
    auto s = [](auto v) { std::ostringstream o; o << v; return o.str(); };

    if (c.bs_geometry.n_y < 1 || c.bs_geometry.n_z < 1)
        add("n_y >= 1, n_z >= 1 (BS)", "bs " + s(c.bs_geometry.n_y) + "x" + s(c.bs_geometry.n_z));
    if (c.user_geometry.n_y < 1 || c.user_geometry.n_z < 1)
        add("n_y >= 1, n_z >= 1 (user)", "user " + s(c.user_geometry.n_y) + "x" + s(c.user_geometry.n_z));
    if (!(c.bs_geometry.spacing_over_wavelength > 0.0) || !(c.user_geometry.spacing_over_wavelength > 0.0))
        add("d/lambda > 0", "bs " + s(c.bs_geometry.spacing_over_wavelength) + ", user " +
                                 s(c.user_geometry.spacing_over_wavelength));
    if (c.users < 1 || c.rf_bs < 1 || c.rf_user < 1 || c.streams < 1)
        add("K, M_t, M_r, N_s >= 1", "K=" + s(c.users) + " M_t=" + s(c.rf_bs) + " M_r=" + s(c.rf_user) +
                                         " N_s=" + s(c.streams));
    if (c.users * c.rf_user != c.rf_bs)
        add("K·M_r = M_t", "K=" + s(c.users) + " M_r=" + s(c.rf_user) + " M_t=" + s(c.rf_bs));
    if (c.streams > c.rf_user)
        add("N_s ≤ M_r", "N_s=" + s(c.streams) + " M_r=" + s(c.rf_user));
    if (c.users * c.streams > c.rf_bs)
        add("K·N_s ≤ M_t", "K=" + s(c.users) + " N_s=" + s(c.streams) + " M_t=" + s(c.rf_bs));
    if (c.rf_bs > c.n_tx())
        add("M_t ≤ N_t", "M_t=" + s(c.rf_bs) + " N_t=" + s(c.n_tx()));
    if (c.rf_user > c.n_rx())
        add("M_r ≤ N_r", "M_r=" + s(c.rf_user) + " N_r=" + s(c.n_rx()));
    if (!(c.power > 0.0))
        add("P_t > 0", "P_t=" + s(c.power));
    if (c.sigma2 < 0.0)
        add("sigma2 ≥ 0", "sigma2=" + s(c.sigma2));
    if (c.bits_bs < 0 || c.bits_user < 0 || c.bits_bs > 16 || c.bits_user > 16)
        add("0 ≤ B_t, B_r ≤ 16", "B_t=" + s(c.bits_bs) + " B_r=" + s(c.bits_user));
    if (c.rho < 1)
        add("rho ≥ 1", "rho=" + s(c.rho));
    if (!(c.beta > 0.0 && c.beta <= 1.0))
        add("0 < beta ≤ 1", "beta=" + s(c.beta));
    if (c.trials < 1)
        add("trials ≥ 1", "trials=" + s(c.trials));
    if (c.clusters < 1 || c.paths < 1)
        add("N_c, N_p ≥ 1", "N_c=" + s(c.clusters) + " N_p=" + s(c.paths));
    if (c.spread_deg < 0.0)
        add("angle spread ≥ 0", "spread_deg=" + s(c.spread_deg));
    if (c.ber_bits < 1 || c.smse_symbols < 1)
        add("ber_bits, smse_symbols ≥ 1", "ber_bits=" + s(c.ber_bits) + " smse_symbols=" + s(c.smse_symbols));
    if (c.threads < 1)
        add("threads ≥ 1", "threads=" + s(c.threads));
    return out;
}

// Flat "key = value" text. '#' starts a comment. Unknown keys are an error.
//
//   bs_ny bs_nz user_ny user_nz spacing users mt mr ns pt sigma2 bt br rho
//   beta seed trials ber_bits smse_symbols clusters paths spread_deg threads
inline void apply_setting(SystemConfig &c, const std::string &key, const std::string &value)
{
    auto to_int = [&]() {
        std::size_t pos = 0;
        long long v = 0;
        try { v = std::stoll(value, &pos); } catch (const std::exception &) { pos = 0; }
        if (pos != value.size())
            throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
        return v;
    };
    auto to_double = [&]() {
        std::size_t pos = 0;
        double v = 0;
        try { v = std::stod(value, &pos); } catch (const std::exception &) { pos = 0; }
        if (pos != value.size())
            throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
        return v;
    };

    if (key == "bs_ny") c.bs_geometry.n_y = static_cast<int>(to_int());
    else if (key == "bs_nz") c.bs_geometry.n_z = static_cast<int>(to_int());
    else if (key == "user_ny") c.user_geometry.n_y = static_cast<int>(to_int());
    else if (key == "user_nz") c.user_geometry.n_z = static_cast<int>(to_int());
    else if (key == "spacing")
    {
        c.bs_geometry.spacing_over_wavelength = to_double();
        c.user_geometry.spacing_over_wavelength = c.bs_geometry.spacing_over_wavelength;
    }
    else if (key == "users") c.users = static_cast<int>(to_int());
    else if (key == "mt") c.rf_bs = static_cast<int>(to_int());
    else if (key == "mr") c.rf_user = static_cast<int>(to_int());
    else if (key == "ns") c.streams = static_cast<int>(to_int());
    else if (key == "pt") c.power = to_double();
    else if (key == "sigma2") c.sigma2 = to_double();
    else if (key == "bt") c.bits_bs = static_cast<int>(to_int());
    else if (key == "br") c.bits_user = static_cast<int>(to_int());
    else if (key == "rho") c.rho = static_cast<int>(to_int());
    else if (key == "beta") c.beta = to_double();
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int());
    else if (key == "trials") c.trials = static_cast<int>(to_int());
    else if (key == "ber_bits") c.ber_bits = to_int();
    else if (key == "smse_symbols") c.smse_symbols = static_cast<int>(to_int());
    else if (key == "clusters") c.clusters = static_cast<int>(to_int());
    else if (key == "paths") c.paths = static_cast<int>(to_int());
    else if (key == "spread_deg") c.spread_deg = to_double();
    else if (key == "threads") c.threads = static_cast<int>(to_int());
    else throw ConfigError("unknown config key '" + key + "'");
}

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline void parse_config(std::istream &in, SystemConfig &c)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

inline SystemConfig load_config(const std::string &path, SystemConfig base = {})
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    parse_config(in, base);
    return base;
}

// Inverse of parse_config; every key is written so a file fully determines a run.
inline std::vector<std::pair<std::string, std::string>> config_entries(const SystemConfig &c)
{
    auto num = [](double v) { std::ostringstream o; o.precision(17); o << v; return o.str(); };
    return {
        {"bs_ny", std::to_string(c.bs_geometry.n_y)},
        {"bs_nz", std::to_string(c.bs_geometry.n_z)},
        {"user_ny", std::to_string(c.user_geometry.n_y)},
        {"user_nz", std::to_string(c.user_geometry.n_z)},
        {"spacing", num(c.bs_geometry.spacing_over_wavelength)},
        {"users", std::to_string(c.users)},
        {"mt", std::to_string(c.rf_bs)},
        {"mr", std::to_string(c.rf_user)},
        {"ns", std::to_string(c.streams)},
        {"pt", num(c.power)},
        {"bt", std::to_string(c.bits_bs)},
        {"br", std::to_string(c.bits_user)},
        {"rho", std::to_string(c.rho)},
        {"beta", num(c.beta)},
        {"seed", std::to_string(c.seed)},
        {"trials", std::to_string(c.trials)},
        {"ber_bits", std::to_string(c.ber_bits)},
        {"smse_symbols", std::to_string(c.smse_symbols)},
        {"clusters", std::to_string(c.clusters)},
        {"paths", std::to_string(c.paths)},
        {"spread_deg", num(c.spread_deg)},
    };
}

} // namespace hmse

#endif
