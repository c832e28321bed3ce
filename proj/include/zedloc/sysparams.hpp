#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace zedloc {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr int kSymbolsPerSubframe = 14;

/// Thrown when a parameter set or input violates a documented constraint.
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// dB <-> linear conversions. Only configuration and output code should call these.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return db_to_linear(dbm - 30.0); }
inline double watt_to_dbm(double w) { return linear_to_db(w) + 30.0; }

/// System constants of the ambient 4G link. Defaults are the LTE 10 MHz
/// carrier used for evaluation (50 RB, 8 CRS pilots per RB and subframe).
/// Power-like fields are stored linearly; use the *_db setters when
/// reading configuration in dB.
struct SystemParams {
    int n_rb = 50;
    int n_tti = 1;
    int k_pilots = 8;
    double f_rb = 180e3;  // Hz
    double scs = 15e3;    // Hz
    double tti = 1e-3;    // s
    double bw = 9e6;      // Hz
    double p_bs = dbm_to_watt(46.0);        // W
    double n_th = dbm_to_watt(-174.0);      // W/Hz
    double nf = db_to_linear(9.0);          // linear
    double f0 = 857e6;                      // Hz
    int n_zed = 127;
    double bep_threshold = 0.01;
    double pixel_size = 0.4;  // m
    int l_train = 8;
    int n_bits_id = 7;

    double t_ofdm() const { return tti / kSymbolsPerSubframe; }
    double bit_period() const { return n_tti * tti; }
    double bit_rate() const { return 1.0 / bit_period(); }
    double wavelength() const { return kSpeedOfLight / f0; }

    /// Pilots per received bit vector, n_rb * n_tti * k_pilots.
    std::size_t pilots_per_bit() const {
        return static_cast<std::size_t>(n_rb) * static_cast<std::size_t>(n_tti) *
               static_cast<std::size_t>(k_pilots);
    }

    int subcarriers_per_rb() const;

    /// Throws ValidationError naming the first violated constraint.
    void validate() const;
};

struct LinkBudget {
    double p_u;  // pilot transmit PSD, W/Hz
    double n0;   // receiver noise PSD, W/Hz
};

LinkBudget derive_link_budget(const SystemParams& params);

struct PilotSlot {
    int tti_index;         // 1..n_tti
    int rb_index;          // 1..n_rb
    int k_index;           // 1..k_pilots
    double freq_offset;    // Hz relative to f0
    int symbol_index;      // 0..13 within the subframe
    std::size_t freq_bin;  // index into PilotGrid::frequencies()
};

/// Ordered pilot resource elements of one bit period.
///
/// Entry n sits at (tti-1)*n_rb*K + (rb-1)*K + (k-1), so the grid is
/// tti-major, then rb, then k. Pilots repeat identically in every subframe;
/// the distinct frequency offsets are kept once in frequencies() and each
/// slot refers to its bin.
class PilotGrid {
   public:
    PilotGrid() = default;
    PilotGrid(std::vector<PilotSlot> entries, std::vector<double> frequencies)
        : entries_(std::move(entries)), frequencies_(std::move(frequencies)) {}

    const std::vector<PilotSlot>& entries() const { return entries_; }
    const std::vector<double>& frequencies() const { return frequencies_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const PilotSlot& operator[](std::size_t n) const { return entries_[n]; }

   private:
    std::vector<PilotSlot> entries_;
    std::vector<double> frequencies_;
};

/// Cell-specific reference signal positions (antenna port 0, frequency
/// shift 0): {symbol, subcarrier offset inside the RB}.
struct CrsPosition {
    int symbol;
    int subcarrier;
};
inline constexpr CrsPosition kCrsPattern[] = {
    {0, 0}, {0, 6}, {4, 3}, {4, 9}, {7, 0}, {7, 6}, {11, 3}, {11, 9},
};

PilotGrid build_pilot_grid(const SystemParams& params);

}  // namespace zedloc
