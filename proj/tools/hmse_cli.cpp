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

#include "hmse/hmse.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Overrides
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> rho, bt, br, trials, threads;
    std::optional<double> beta;
    double snr_min = -10.0;
    double snr_max = 20.0;
    double snr_step = 5.0;
    std::string out;
    std::string scheme = "proposed";
    std::string codebook_dir;
    std::string side = "bs";
};

void add_common(CLI::App *cmd, Overrides &o)
{
    cmd->add_option("--config", o.config_path, "Key-value configuration file");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--rho", o.rho, "Codebook oversampling factor");
    cmd->add_option("--beta", o.beta, "Maximum correlation factor in (0, 1]");
    cmd->add_option("--bt", o.bt, "BS phase-shifter bits (0 = unquantized)");
    cmd->add_option("--br", o.br, "User phase-shifter bits (0 = unquantized)");
    cmd->add_option("--trials", o.trials, "Channel realizations per SNR point");
    cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on it)");
    cmd->add_option("--out", o.out, "Output file");
}

void add_sweep(CLI::App *cmd, Overrides &o)
{
    cmd->add_option("--snr-min", o.snr_min, "Lowest SNR in dB")->capture_default_str();
    cmd->add_option("--snr-max", o.snr_max, "Highest SNR in dB")->capture_default_str();
    cmd->add_option("--snr-step", o.snr_step, "SNR step in dB")->capture_default_str();
    cmd->add_option("--scheme", o.scheme, "proposed | analog-only | digital-only | full-digital")
        ->capture_default_str();
    cmd->add_option("--codebook-dir", o.codebook_dir, "Directory for cached codebook files");
}

hmse::SystemConfig resolve(const Overrides &o)
{
    hmse::SystemConfig c;
    if (!o.config_path.empty())
        c = hmse::load_config(o.config_path, c);
    if (o.seed) c.seed = *o.seed;
    if (o.rho) c.rho = *o.rho;
    if (o.beta) c.beta = *o.beta;
    if (o.bt) c.bits_bs = *o.bt;
    if (o.br) c.bits_user = *o.br;
    if (o.trials) c.trials = *o.trials;
    if (o.threads) c.threads = *o.threads;
    return c;
}

int report_violations(const hmse::SystemConfig &c)
{
    const auto violations = hmse::validate_config(c);
    for (const auto &v : violations)
        std::cerr << "violation: " << v.invariant << " (" << v.detail << ")\n";
    return violations.empty() ? exit_ok : exit_config;
}

int run_sweep(const Overrides &o, hmse::Metric metric)
{
    const auto config = resolve(o);
    if (report_violations(config) != exit_ok)
        return exit_config;
    const auto grid = hmse::SnrGrid::range(o.snr_min, o.snr_max, o.snr_step);
    hmse::ExperimentOptions options;
    options.codebook_dir = o.codebook_dir;
    const auto curve = hmse::run_experiment(config, hmse::parse_scheme(o.scheme), metric, grid, o.out, options);
    if (o.out.empty())
        hmse::write_curve_csv(std::cout, curve);
    else
        std::cerr << "wrote " << o.out << " and " << o.out << ".plot.py\n";
    return exit_ok;
}

int run_codebook(const Overrides &o)
{
    const auto config = resolve(o);
    if (o.side != "bs" && o.side != "user")
        throw hmse::ConfigError("--side must be 'bs' or 'user'");
    const bool bs = o.side == "bs";
    if (config.rho < 1)
        throw hmse::ConfigError("rho must be >= 1");
    const auto cb = hmse::build_osc(bs ? config.bs_geometry : config.user_geometry, config.rho,
                                    bs ? config.bits_bs : config.bits_user);
    if (o.out.empty())
    {
        hmse::write_codebook(std::cout, cb);
    }
    else
    {
        std::ofstream out(o.out);
        if (!out)
            throw std::runtime_error("cannot write '" + o.out + "'");
        hmse::write_codebook(out, cb);
        std::cerr << "wrote " << cb.size() << " entries to " << o.out << '\n';
    }
    return exit_ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Hybrid min-SMSE precoding simulator"};
    app.require_subcommand(1);
    Overrides o;

    auto *codebook = app.add_subcommand("codebook", "Build an over-sampled codebook and export it");
    add_common(codebook, o);
    codebook->add_option("--side", o.side, "bs | user")->capture_default_str();

    auto *sse = app.add_subcommand("sse", "Sum spectral efficiency sweep");
    auto *ber = app.add_subcommand("ber", "16-QAM bit error rate sweep");
    auto *smse = app.add_subcommand("smse", "Monte Carlo sum MSE sweep");
    for (auto *cmd : {sse, ber, smse})
    {
        add_common(cmd, o);
        add_sweep(cmd, o);
    }
    auto *validate = app.add_subcommand("validate", "Check a configuration");
    add_common(validate, o);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*codebook)
            return run_codebook(o);
        if (*sse)
            return run_sweep(o, hmse::Metric::sse);
        if (*ber)
            return run_sweep(o, hmse::Metric::ber);
        if (*smse)
            return run_sweep(o, hmse::Metric::smse);
        if (*validate)
        {
            const int rc = report_violations(resolve(o));
            if (rc == exit_ok)
                std::cout << "ok\n";
            return rc;
        }
    }
    catch (const hmse::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const hmse::NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_ok;
}
