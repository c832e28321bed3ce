// zedloc: backscatter-beacon localization simulator.
//
//   zedloc validate-bep --scenario s.json [--bits N] [--points K]
//   zedloc link         --scenario s.json --zed ID --sm x,y
//   zedloc sweep        --scenario s.json --out-dir DIR [--n-tti 1,2,3,6] [--workers W]
//   zedloc trace        --scenario s.json --tx bs --rx zed:3

#include <CLI11.hpp>
#include <iostream>

#include "zedloc/commands.hpp"

namespace {

struct Common {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int workers = 1;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Override the scenario RNG seed");
    cmd->add_option("--out-dir", c.out_dir, "Directory for output files");
    cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
}

zedloc::CommonOptions to_options(const Common& c) { return {c.seed, c.out_dir, c.workers}; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-energy-device beacon localization simulator"};
    app.require_subcommand(1);

    Common bep_common;
    zedloc::ValidateBepOptions bep;
    std::optional<std::string> bep_sm;
    auto* bep_cmd = app.add_subcommand("validate-bep", "Monte-Carlo BER against the closed-form BEP");
    add_common(bep_cmd, bep_common);
    bep_cmd->add_option("--n-tti", bep.n_tti, "Subframes per bit");
    bep_cmd->add_option("--snr-db-min", bep.snr_db_min, "Lowest SNR point (dB)");
    bep_cmd->add_option("--snr-db-max", bep.snr_db_max, "Highest SNR point (dB)");
    bep_cmd->add_option("--points", bep.points, "Number of SNR points")->check(CLI::PositiveNumber);
    bep_cmd->add_option("--bits", bep.bits, "Bits per SNR point")->check(CLI::Range(1000ul, 1000000000ul));
    bep_cmd->add_option("--zed", bep.zed_id, "Beacon whose traced channel shapes the test link");
    bep_cmd->add_option("--sm", bep_sm, "SM position: bs, zed:<id> or x,y");

    Common link_common;
    zedloc::LinkOptions link;
    std::string link_sm;
    auto* link_cmd = app.add_subcommand("link", "Single beacon-to-smartphone link: sync, learning, decoding");
    add_common(link_cmd, link_common);
    link_cmd->add_option("--zed", link.zed_id, "Beacon id")->required();
    link_cmd->add_option("--sm", link_sm, "SM position: x,y or zed:<id>")->required();
    link_cmd->add_option("--n-tti", link.n_tti, "Subframes per bit");
    link_cmd->add_option("--idle", link.idle_periods, "Idle bit periods before the training sequence");

    Common sweep_common;
    zedloc::SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Coverage maps, CA table and room accuracy per n_tti");
    add_common(sweep_cmd, sweep_common);
    sweep_cmd->add_option("--n-tti", sweep.n_tti, "Comma-separated n_tti values")->delimiter(',');

    Common trace_common;
    zedloc::TraceCommandOptions trace;
    std::string trace_output;
    auto* trace_cmd = app.add_subcommand("trace", "Dump traced rays as CSV");
    add_common(trace_cmd, trace_common);
    trace_cmd->add_option("--tx", trace.tx, "Transmitter: bs, zed:<id> or x,y")->required();
    trace_cmd->add_option("--rx", trace.rx, "Receiver: bs, zed:<id> or x,y")->required();
    trace_cmd->add_option("--output", trace_output, "Ray CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? zedloc::kExitOk : zedloc::kExitUsage;
    }

    try {
        if (*bep_cmd) {
            const auto scenario = zedloc::load_scenario(bep_common.scenario);
            bep.common = to_options(bep_common);
            if (bep_sm) bep.sm = zedloc::resolve_point(scenario, *bep_sm);
            return zedloc::cmd_validate_bep(scenario, bep, std::cout);
        }
        if (*link_cmd) {
            const auto scenario = zedloc::load_scenario(link_common.scenario);
            link.common = to_options(link_common);
            link.sm = zedloc::resolve_point(scenario, link_sm);
            return zedloc::cmd_link(scenario, link, std::cout);
        }
        if (*sweep_cmd) {
            const auto scenario = zedloc::load_scenario(sweep_common.scenario);
            sweep.common = to_options(sweep_common);
            return zedloc::cmd_sweep(scenario, sweep, std::cout, std::cerr);
        }
        if (*trace_cmd) {
            const auto scenario = zedloc::load_scenario(trace_common.scenario);
            trace.common = to_options(trace_common);
            if (!trace_output.empty()) trace.output = trace_output;
            return zedloc::cmd_trace(scenario, trace, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return zedloc::kExitUsage;
    }
    return zedloc::kExitUsage;
}
