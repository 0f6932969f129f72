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

#ifndef HMSE_HARNESS_HPP
#define HMSE_HARNESS_HPP

#include "analog.hpp"
#include "channel.hpp"
#include "codebook.hpp"
#include "config.hpp"
#include "digital.hpp"
#include "evaluation.hpp"
#include "random.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#ifndef HMSE_VERSION
#define HMSE_VERSION "0.1.0"
#endif

namespace hmse {

enum class Scheme
{
    proposed_full,         // codebook JAPC analog + min-SMSE digital
    proposed_analog_only,  // codebook JAPC analog + pluggable digital
    proposed_digital_only, // pluggable analog + min-SMSE digital
    full_digital,          // F = I, M_k = I, min-SMSE digital on the raw channels
};

enum class Metric
{
    sse,
    ber,
    smse,
};

inline std::string to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::proposed_full: return "proposed";
    case Scheme::proposed_analog_only: return "analog-only";
    case Scheme::proposed_digital_only: return "digital-only";
    case Scheme::full_digital: return "full-digital";
    }
    return "unknown";
}

inline std::string to_string(Metric m)
{
    switch (m)
    {
    case Metric::sse: return "sse";
    case Metric::ber: return "ber";
    case Metric::smse: return "smse";
    }
    return "unknown";
}

inline Scheme parse_scheme(const std::string &s)
{
    for (auto v : {Scheme::proposed_full, Scheme::proposed_analog_only, Scheme::proposed_digital_only,
                   Scheme::full_digital})
        if (to_string(v) == s)
            return v;
    throw ConfigError("unknown scheme '" + s + "'");
}

struct SnrGrid
{
    std::vector<double> points_db;

    static SnrGrid range(double lo, double hi, double step)
    {
        if (!(step > 0.0) || hi < lo)
            throw ConfigError("SNR grid: need snr_min <= snr_max and step > 0");
        SnrGrid g;
        const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
        for (int i = 0; i <= n; ++i)
            g.points_db.push_back(lo + step * i);
        return g;
    }

    void validate() const
    {
        if (points_db.empty())
            throw ConfigError("SNR grid is empty");
        for (std::size_t i = 1; i < points_db.size(); ++i)
            if (!(points_db[i] > points_db[i - 1]))
                throw ConfigError("SNR grid must be strictly increasing");
    }

    // SNR = P_t / sigma2
    static double noise_variance(double snr_db, double power) { return power / std::pow(10.0, snr_db / 10.0); }
};

struct MetricCurve
{
    std::vector<std::pair<std::string, std::string>> header; // "# key=value" lines in order
    std::vector<double> snr_db;
    std::vector<double> value;
    std::vector<double> stderr_;
    std::vector<std::int64_t> trials;

    [[nodiscard]] std::string tag(const std::string &key) const
    {
        for (const auto &[k, v] : header)
            if (k == key)
                return v;
        return {};
    }

    friend bool operator==(const MetricCurve &, const MetricCurve &) = default;
};

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_curve_csv(std::ostream &out, const MetricCurve &c)
{
    for (const auto &[k, v] : c.header)
        out << "# " << k << '=' << v << '\n';
    out << "snr_db,value,stderr,trials\n";
    for (std::size_t i = 0; i < c.snr_db.size(); ++i)
        out << format_double(c.snr_db[i]) << ',' << format_double(c.value[i]) << ',' << format_double(c.stderr_[i])
            << ',' << c.trials[i] << '\n';
}

inline MetricCurve read_curve_csv(std::istream &in)
{
    MetricCurve c;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line))
    {
        if (line.rfind("# ", 0) == 0)
        {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("curve csv: bad header line '" + line + "'");
            c.header.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        if (!have_columns)
        {
            if (line != "snr_db,value,stderr,trials")
                throw std::runtime_error("curve csv: missing column header");
            have_columns = true;
            continue;
        }
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string a, b, s, t;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, s, ',') ||
            !std::getline(ss, t, ','))
            throw std::runtime_error("curve csv: short row '" + line + "'");
        c.snr_db.push_back(std::stod(a));
        c.value.push_back(std::stod(b));
        c.stderr_.push_back(std::stod(s));
        c.trials.push_back(std::stoll(t));
    }
    if (!have_columns)
        throw std::runtime_error("curve csv: missing column header");
    return c;
}

// Codebooks keyed by (geometry, rho, bits). With a directory set, codebooks
// are also persisted in the codebook file format and reloaded from there.
class CodebookCache
{
  public:
    explicit CodebookCache(std::filesystem::path directory = {}) : dir_(std::move(directory)) {}

    const Codebook &get(const ArrayGeometry &g, int rho, int bits)
    {
        const std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(g.n_y, g.n_z, rho, bits);
        if (auto it = books_.find(key); it != books_.end())
            return *it->second;

        std::shared_ptr<Codebook> cb;
        if (!dir_.empty())
        {
            const auto file = dir_ / ("osc_" + std::to_string(g.n_y) + "x" + std::to_string(g.n_z) + "_rho" +
                                      std::to_string(rho) + "_q" + std::to_string(bits) + ".csv");
            if (std::filesystem::exists(file))
            {
                std::ifstream in(file);
                cb = std::make_shared<Codebook>(read_codebook(in));
                cb->geometry.spacing_over_wavelength = g.spacing_over_wavelength;
            }
            else
            {
                cb = std::make_shared<Codebook>(build_osc(g, rho, bits));
                std::filesystem::create_directories(dir_);
                std::ofstream out(file);
                write_codebook(out, *cb);
            }
        }
        else
        {
            cb = std::make_shared<Codebook>(build_osc(g, rho, bits));
        }
        books_.emplace(key, cb);
        return *cb;
    }

  private:
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, int>, std::shared_ptr<Codebook>> books_;
};

// Zero-forcing digital stage: W = pinv(H_eff) V_ini scaled to the power budget,
// V_k = V_ini^k. The default digital plug-in for the analog-only scheme.
inline DigitalStage zero_forcing_digital(const std::vector<CMatrix> &h_eff_blocks, const AnalogStage &analog,
                                         const InitialCombiner &v_ini, double sigma2, double p_t)
{
    DigitalStage d;
    d.precoder = digital_precoder_min_norm(stack_rows(h_eff_blocks), v_ini);
    d.gamma = normalization_gamma(analog.precoder, d.precoder, p_t);
    d.sigma2 = sigma2;
    d.mu = 1.0;
    d.combiners = v_ini.blocks;
    return d;
}

using AnalogDesigner = std::function<AnalogStage(const ChannelSet &, const SystemConfig &)>;
using DigitalDesigner = std::function<DigitalStage(const std::vector<CMatrix> &, const AnalogStage &,
                                                   const SystemConfig &, double sigma2)>;

struct ExperimentOptions
{
    AnalogDesigner analog_plugin;   // used by proposed_digital_only
    DigitalDesigner digital_plugin; // used by proposed_analog_only
    std::filesystem::path codebook_dir;
    CodebookCache *cache = nullptr; // shared cache; a private one is used when null
};

class TrialError : public NumericalError
{
  public:
    TrialError(const std::string &what, int trial, std::uint64_t seed)
        : NumericalError("trial " + std::to_string(trial) + " (seed " + std::to_string(seed) + "): " + what),
          trial_(trial), seed_(seed)
    {
    }
    [[nodiscard]] int trial() const { return trial_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

  private:
    int trial_;
    std::uint64_t seed_;
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are
// rethrown for the lowest failing index so failures are reproducible.
template <typename Fn>
void parallel_for(int n, int threads, Fn &&fn)
{
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    auto guarded = [&](int i) {
        try { fn(i); }
        catch (...) { errors[static_cast<std::size_t>(i)] = std::current_exception(); }
    };
    if (threads <= 1 || n <= 1)
    {
        for (int i = 0; i < n; ++i)
            guarded(i);
    }
    else
    {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < std::min(threads, n); ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < n; i = next++)
                    guarded(i);
            });
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

// One Monte Carlo sweep of a scheme over the SNR grid. Channel realization t
// comes from (seed, t) alone, so different schemes and SNR points see the same
// channels. Analog stages do not depend on the noise level and are designed
// once per realization.
inline MetricCurve run_experiment(const SystemConfig &config, Scheme scheme, Metric metric, const SnrGrid &grid,
                                  const std::string &output_path = {}, const ExperimentOptions &options = {})
{
    if (const auto v = validate_config(config); !v.empty())
        throw ConfigError("invalid config: " + v.front().invariant + " (" + v.front().detail + ")");
    grid.validate();

    const int users = config.users;
    const int ns = config.streams;
    const int n_snr = static_cast<int>(grid.points_db.size());
    const ClusterSpec spec = cluster_spec_from(config);

    CodebookCache own_cache(options.codebook_dir);
    CodebookCache &cache = options.cache ? *options.cache : own_cache;
    const bool uses_codebooks = scheme == Scheme::proposed_full || scheme == Scheme::proposed_analog_only;
    const Codebook *bs_book = nullptr;
    std::vector<Codebook> user_books;
    if (uses_codebooks)
    {
        bs_book = &cache.get(config.bs_geometry, config.rho, config.bits_bs);
        user_books.assign(static_cast<std::size_t>(users),
                          cache.get(config.user_geometry, config.rho, config.bits_user));
    }

    const std::int64_t bits_per_vector = 4LL * users * ns;
    const std::int64_t vectors_per_trial =
        std::max<std::int64_t>(1, (config.ber_bits + bits_per_vector * config.trials - 1) /
                                      (bits_per_vector * config.trials));
    const std::int64_t bits_per_trial = vectors_per_trial * bits_per_vector;

    // values[t][i]: per-trial metric (errors for BER)
    std::vector<std::vector<double>> values(static_cast<std::size_t>(config.trials),
                                            std::vector<double>(static_cast<std::size_t>(n_snr), 0.0));

    auto run_trial = [&](int t) {
        try
        {
            Rng channel_rng = make_stream(config.seed, Stream::channel, static_cast<std::uint64_t>(t));
            const ChannelSet channels = sample_channel(config, spec, channel_rng);

            AnalogStage analog;
            switch (scheme)
            {
            case Scheme::proposed_full:
            case Scheme::proposed_analog_only:
                analog = japc(channels, *bs_book, user_books, JapcConfig{config.beta, config.rf_user});
                break;
            case Scheme::proposed_digital_only:
                analog = options.analog_plugin
                             ? options.analog_plugin(channels, config)
                             : phase_extraction_analog(channels, config.rf_user, config.bits_bs, config.bits_user);
                break;
            case Scheme::full_digital:
                analog = identity_analog(channels);
                break;
            }
            const auto h_eff = effective_channels(channels, analog);
            const auto rf_user = static_cast<int>(analog.combiners.front().cols());
            const auto v_ini = InitialCombiner::identity(users, rf_user, ns);
            const ModulationSpec mod = qam16();

            for (int i = 0; i < n_snr; ++i)
            {
                const double sigma2 = SnrGrid::noise_variance(grid.points_db[static_cast<std::size_t>(i)], config.power);
                DigitalStage digital;
                if (scheme == Scheme::proposed_analog_only)
                    digital = options.digital_plugin
                                  ? options.digital_plugin(h_eff, analog, config, sigma2)
                                  : zero_forcing_digital(h_eff, analog, v_ini, sigma2, config.power);
                else
                    digital = design_digital(h_eff, analog, v_ini, sigma2, config.power,
                                             scheme == Scheme::full_digital);

                const auto stream_index = static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(n_snr) +
                                          static_cast<std::uint64_t>(i);
                double &out = values[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
                switch (metric)
                {
                case Metric::sse:
                    out = sse(channels, analog, digital, sigma2);
                    break;
                case Metric::ber:
                {
                    Rng rng = make_stream(config.seed, Stream::noise, stream_index);
                    out = static_cast<double>(ber(channels, analog, digital, mod, bits_per_trial, rng).errors);
                    break;
                }
                case Metric::smse:
                {
                    Rng rng = make_stream(config.seed, Stream::noise, stream_index);
                    out = smse_empirical(channels, analog, digital, config.smse_symbols, rng).mean;
                    break;
                }
                }
            }
        }
        catch (const NumericalError &e)
        {
            throw TrialError(e.what(), t, config.seed);
        }
    };
    detail::parallel_for(config.trials, config.threads, run_trial);

    MetricCurve curve;
    curve.header.emplace_back("scheme", to_string(scheme));
    curve.header.emplace_back("metric", to_string(metric));
    curve.header.emplace_back("version", HMSE_VERSION);
    for (auto &kv : config_entries(config))
        curve.header.push_back(std::move(kv));

    for (int i = 0; i < n_snr; ++i)
    {
        curve.snr_db.push_back(grid.points_db[static_cast<std::size_t>(i)]);
        if (metric == Metric::ber)
        {
            std::int64_t errors = 0;
            for (const auto &row : values)
                errors += static_cast<std::int64_t>(row[static_cast<std::size_t>(i)]);
            const auto e = make_ber_estimate(errors, bits_per_trial * config.trials);
            curve.value.push_back(e.ber);
            curve.stderr_.push_back(e.stderr_);
        }
        else
        {
            RunningStats stats;
            for (const auto &row : values)
                stats.add(row[static_cast<std::size_t>(i)]);
            const auto e = stats.estimate();
            curve.value.push_back(e.mean);
            curve.stderr_.push_back(e.stderr_);
        }
        curve.trials.push_back(config.trials);
    }

    if (!output_path.empty())
    {
        {
            std::ofstream out(output_path);
            if (!out)
                throw std::runtime_error("cannot write '" + output_path + "'");
            write_curve_csv(out, curve);
        }
        std::ofstream py(output_path + ".plot.py");
        const bool log_y = metric == Metric::ber;
        py << "# Plots " << std::filesystem::path(output_path).filename().string() << "\n"
           << "import csv\nimport matplotlib.pyplot as plt\n\n"
           << "rows = [r for r in csv.reader(open(" << std::quoted(output_path) << ")) if r and not r[0].startswith('#')]\n"
           << "x = [float(r[0]) for r in rows[1:]]\ny = [float(r[1]) for r in rows[1:]]\n"
           << "e = [float(r[2]) for r in rows[1:]]\n"
           << "plt.errorbar(x, y, yerr=e, marker='o', label=" << std::quoted(to_string(scheme)) << ")\n"
           << (log_y ? "plt.yscale('log')\n" : "") << "plt.xlabel('SNR (dB)')\nplt.ylabel("
           << std::quoted(to_string(metric)) << ")\nplt.grid(True)\nplt.legend()\nplt.show()\n";
    }
    return curve;
}

} // namespace hmse

#endif
