#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zedloc/scenario.hpp"

namespace zedloc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;

struct CommonOptions {
    std::optional<std::uint64_t> seed;  // overrides the scenario seed
    std::filesystem::path out_dir;      // empty: write to the output stream only
    int workers = 1;
};

/// Resolves "bs", "zed:<id>" or "x,y" against the scenario.
Vec2 resolve_point(const Scenario& scenario, const std::string& spec);

struct ValidateBepOptions {
    CommonOptions common;
    std::optional<int> n_tti;
    std::optional<double> snr_db_min;  // default: BEP 0.3 at the scenario's N
    std::optional<double> snr_db_max;  // default: BEP 1e-3
    int points = 10;
    std::size_t bits = 100000;
    std::optional<int> zed_id;  // channel shape source, default first beacon
    std::optional<Vec2> sm;     // default: 1 m east of the beacon
};

struct BepPoint {
    double snr_db;
    double analytic;
    double empirical;
    double band;  // 3 sigma around the analytic value
    std::size_t errors;
    std::size_t bits;
    bool within_band;
};

/// Monte-Carlo BER against the closed form over an SNR grid. Writes CSV to
/// `out` (and validate_bep.csv in out_dir), returns kExitValidation if any
/// point leaves its band.
int cmd_validate_bep(const Scenario& scenario, const ValidateBepOptions& opts, std::ostream& out,
                     std::vector<BepPoint>* points = nullptr);

/// Inverse of q_function on (0, 0.5].
double q_inverse(double p);

struct LinkOptions {
    CommonOptions common;
    int zed_id = 0;
    Vec2 sm;
    std::optional<int> n_tti;
    int idle_periods = 3;
};

struct LinkReport {
    std::vector<double> mu_trace;
    std::optional<std::size_t> sync_offset;
    double snr = 0.0;            // perfect-state, linear
    double estimated_snr = 0.0;  // from the learned states
    double analytic_bep = 0.5;
    std::vector<int> sent_bits;
    std::vector<int> decoded_bits;
    std::optional<int> decoded_id;
};

int cmd_link(const Scenario& scenario, const LinkOptions& opts, std::ostream& out, LinkReport* report = nullptr);

struct SweepOptions {
    CommonOptions common;
    std::vector<int> n_tti{1, 2, 3, 6};
};

/// Per n_tti: map_ntti<N>.csv and <quantity>_ntti<N>.pgm; plus ca_table.csv
/// and room_accuracy.csv. A summary goes to `out`.
int cmd_sweep(const Scenario& scenario, const SweepOptions& opts, std::ostream& out, std::ostream& err);

struct TraceCommandOptions {
    CommonOptions common;
    std::string tx;
    std::string rx;
    std::optional<std::filesystem::path> output;  // default: stdout
};

int cmd_trace(const Scenario& scenario, const TraceCommandOptions& opts, std::ostream& out);

}  // namespace zedloc
