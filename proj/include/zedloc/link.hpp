#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "zedloc/channel.hpp"
#include "zedloc/sysparams.hpp"

namespace zedloc {

using Rng = std::mt19937_64;

/// Complex noise power per pilot sample, in units of n0. With this scaling
/// the closed form Q(||x_t - x_r|| / (2 sqrt(2 n0))) is the exact error
/// probability of the coherent detector below.
inline constexpr double kNoisePowerPerN0 = 4.0;

struct NoiseModel {
    double n0;  // W/Hz
    std::uint64_t seed = 0;

    double sample_power() const { return kNoisePowerPerN0 * n0; }
    void validate() const;
};

/// Independent 64-bit seed for stream `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// x = sqrt(p_u) * h.
CVector transmit_pilots(const CVector& h, double p_u);

/// y = x + w with w circularly-symmetric Gaussian. The first overload is a
/// pure function of (x, noise.seed); the second draws from a caller stream.
CVector add_noise(const CVector& x, const NoiseModel& noise);
CVector add_noise(const CVector& x, double sample_power, Rng& rng);

/// mu = ||sum_l (y[l+L] - y[l])|| / sum_l ||y[l+L] - y[l]|| over a window
/// of exactly 2L vectors; 0 when every difference vanishes.
double sync_metric(std::span<const CVector> window, int l_train);

inline constexpr double kSyncThreshold = 0.9;

/// Slides a 2L window over the stream one bit period at a time. Within the
/// first run of offsets whose metric exceeds the threshold, returns the
/// offset with the largest ||sum of differences||, i.e. the window best
/// aligned on the S0 S1 transition.
std::optional<std::size_t> detect_training(std::span<const CVector> stream, int l_train,
                                           double threshold = kSyncThreshold);

struct StateEstimate {
    CVector x_t;
    CVector x_r;
};

/// Averages of the first and last L vectors of an aligned training window.
StateEstimate estimate_states(std::span<const CVector> window, int l_train);

/// Learned hypothesis centres and the derived midpoint m and unit direction u.
class DetectorState {
   public:
    DetectorState(CVector x_t, CVector x_r);

    const CVector& x_t() const { return x_t_; }
    const CVector& x_r() const { return x_r_; }
    const CVector& m() const { return m_; }
    const CVector& u() const { return u_; }
    // ||x_t - x_r||
    double separation() const { return separation_; }
    std::size_t size() const { return static_cast<std::size_t>(x_t_.size()); }

   private:
    CVector x_t_;
    CVector x_r_;
    CVector m_;
    CVector u_;
    double separation_;
};

struct Decision {
    int bit;
    double r;
};

/// r = Re(u^H (y - m)); bit 0 when r > 0, bit 1 otherwise (ties included).
Decision detect_bit(const CVector& y, const DetectorState& det);

/// ||x_t - x_r||^2 / (N n0).
double zed_snr(const DetectorState& det, double n0);

/// Gaussian tail, erfc(x / sqrt 2) / 2.
double q_function(double x);

double analytic_bep(const DetectorState& det, double n0);
double analytic_bep_from_snr(double snr, std::size_t n);

struct BerEstimate {
    double ber;
    double half_width;  // 3 sigma binomial, from the measured rate
    std::size_t errors;
    std::size_t bits;
};

inline constexpr std::size_t kMonteCarloChunk = 2048;

/// Sends uniformly random bits through the pilot channel with perfectly
/// known hypothesis centres and counts decision errors. Bits are drawn in
/// fixed chunks, each from its own derived stream, so the result is
/// independent of `workers`.
BerEstimate monte_carlo_ber(const PilotChannel& chan, const LinkBudget& budget, const NoiseModel& noise,
                            std::size_t bits, int workers = 1);

/// 3 sigma half-width of a binomial rate p measured over `bits` trials.
double binomial_half_width(double p, std::size_t bits);

}  // namespace zedloc
