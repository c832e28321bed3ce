#include "zedloc/link.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "zedloc/parallel.hpp"

namespace zedloc {

void NoiseModel::validate() const {
    if (!(n0 > 0.0)) throw ValidationError("noise n0 must be > 0");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finaliser over a golden-ratio stride
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CVector transmit_pilots(const CVector& h, double p_u) {
    if (!(p_u > 0.0)) throw ValidationError("transmit_pilots: p_u must be > 0");
    return std::sqrt(p_u) * h;
}

CVector add_noise(const CVector& x, double sample_power, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(sample_power / 2.0));
    CVector y(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        const double re = normal(rng);
        const double im = normal(rng);
        y[n] = x[n] + std::complex<double>(re, im);
    }
    return y;
}

CVector add_noise(const CVector& x, const NoiseModel& noise) {
    noise.validate();
    Rng rng(noise.seed);
    return add_noise(x, noise.sample_power(), rng);
}

namespace {

void check_window(std::span<const CVector> window, int l_train, const char* who) {
    if (l_train < 1) throw ValidationError(fmt::format("{}: L must be >= 1", who));
    if (window.size() != 2 * static_cast<std::size_t>(l_train)) {
        throw ValidationError(fmt::format("{}: window holds {} vectors, expected 2L = {}", who, window.size(),
                                          2 * l_train));
    }
    for (const CVector& y : window) {
        if (y.size() != window.front().size()) {
            throw ValidationError(fmt::format("{}: window vectors differ in length", who));
        }
    }
}

struct SyncTerms {
    double numerator;
    double denominator;
};

// Pairwise summation: L identical differences (a clean transition) then sum
// exactly whenever L is a power of two, so the metric is exactly 1.
template <class T>
T pairwise_sum(std::vector<T>& terms) {
    for (std::size_t width = 1; width < terms.size(); width *= 2) {
        for (std::size_t i = 0; i + width < terms.size(); i += 2 * width) terms[i] = terms[i] + terms[i + width];
    }
    return terms.front();
}

SyncTerms sync_terms(std::span<const CVector> window, int l_train) {
    const auto L = static_cast<std::size_t>(l_train);
    std::vector<CVector> diffs;
    std::vector<double> norms;
    diffs.reserve(L);
    norms.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        diffs.push_back(window[l + L] - window[l]);
        norms.push_back(diffs.back().norm());
    }
    const double denominator = pairwise_sum(norms);
    return {pairwise_sum(diffs).norm(), denominator};
}

double ratio(const SyncTerms& t) { return t.denominator > 0.0 ? t.numerator / t.denominator : 0.0; }

}  // namespace

double sync_metric(std::span<const CVector> window, int l_train) {
    check_window(window, l_train, "sync_metric");
    return ratio(sync_terms(window, l_train));
}

std::optional<std::size_t> detect_training(std::span<const CVector> stream, int l_train, double threshold) {
    if (l_train < 1) throw ValidationError("detect_training: L must be >= 1");
    const auto span_len = 2 * static_cast<std::size_t>(l_train);
    if (stream.size() < span_len) return std::nullopt;

    std::optional<std::size_t> best;
    double best_numerator = -1.0;
    for (std::size_t offset = 0; offset + span_len <= stream.size(); ++offset) {
        const auto window = stream.subspan(offset, span_len);
        check_window(window, l_train, "detect_training");
        const SyncTerms terms = sync_terms(window, l_train);
        if (ratio(terms) > threshold) {
            if (terms.numerator > best_numerator) {
                best = offset;
                best_numerator = terms.numerator;
            }
        } else if (best) {
            break;
        }
    }
    return best;
}

StateEstimate estimate_states(std::span<const CVector> window, int l_train) {
    check_window(window, l_train, "estimate_states");
    const auto L = static_cast<std::size_t>(l_train);
    CVector x_t = CVector::Zero(window.front().size());
    CVector x_r = CVector::Zero(window.front().size());
    for (std::size_t l = 0; l < L; ++l) {
        x_t += window[l];
        x_r += window[l + L];
    }
    return {x_t / static_cast<double>(L), x_r / static_cast<double>(L)};
}

DetectorState::DetectorState(CVector x_t, CVector x_r) : x_t_(std::move(x_t)), x_r_(std::move(x_r)) {
    if (x_t_.size() != x_r_.size() || x_t_.size() == 0) {
        throw ValidationError("DetectorState: x_t and x_r must be non-empty and of equal length");
    }
    const CVector diff = x_t_ - x_r_;
    separation_ = diff.norm();
    if (!(separation_ > 0.0)) throw ValidationError("DetectorState: x_t and x_r are identical");
    m_ = (x_t_ + x_r_) / 2.0;
    u_ = diff / separation_;
}

namespace {

double decision_statistic(const CVector& y, const CVector& m, const CVector& u) {
    // Eigen's dot() conjugates the left operand: u.dot(v) = u^H v.
    return u.dot(y - m).real();
}

}  // namespace

Decision detect_bit(const CVector& y, const DetectorState& det) {
    if (static_cast<std::size_t>(y.size()) != det.size()) {
        throw ValidationError("detect_bit: received vector length differs from detector state");
    }
    const double r = decision_statistic(y, det.m(), det.u());
    return {r > 0.0 ? 0 : 1, r};
}

double zed_snr(const DetectorState& det, double n0) {
    if (!(n0 > 0.0)) throw ValidationError("zed_snr: n0 must be > 0");
    return det.separation() * det.separation() / (static_cast<double>(det.size()) * n0);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double analytic_bep(const DetectorState& det, double n0) {
    if (!(n0 > 0.0)) throw ValidationError("analytic_bep: n0 must be > 0");
    return q_function(det.separation() / (2.0 * std::sqrt(2.0 * n0)));
}

double analytic_bep_from_snr(double snr, std::size_t n) {
    if (!(snr >= 0.0)) throw ValidationError("analytic_bep_from_snr: snr must be >= 0");
    if (n < 1) throw ValidationError("analytic_bep_from_snr: n must be >= 1");
    return q_function(std::sqrt(static_cast<double>(n) * snr) / (2.0 * std::numbers::sqrt2));
}

double binomial_half_width(double p, std::size_t bits) {
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
}

BerEstimate monte_carlo_ber(const PilotChannel& chan, const LinkBudget& budget, const NoiseModel& noise,
                            std::size_t bits, int workers) {
    noise.validate();
    if (bits < 1000) throw ValidationError("monte_carlo_ber: at least 1000 bits required");
    const CVector x_t = transmit_pilots(effective(chan, 0), budget.p_u);
    const CVector x_r = transmit_pilots(effective(chan, 1), budget.p_u);

    // Identical hypotheses leave no decision direction; fall back to the
    // first pilot axis so the decision is the sign of pure noise.
    std::optional<DetectorState> det;
    if ((x_t - x_r).norm() > 0.0) det.emplace(x_t, x_r);
    CVector axis = CVector::Zero(x_t.size());
    axis[0] = 1.0;
    auto decide = [&](const CVector& y) {
        if (det) return detect_bit(y, *det).bit;
        return decision_statistic(y, x_t, axis) > 0.0 ? 0 : 1;
    };

    const std::size_t n_chunks = (bits + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<std::size_t> chunk_errors(n_chunks, 0);
    parallel_for(n_chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(noise.seed, c));
        std::bernoulli_distribution coin(0.5);
        const std::size_t begin = c * kMonteCarloChunk;
        const std::size_t end = std::min(bits, begin + kMonteCarloChunk);
        std::size_t errors = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const int bit = coin(rng) ? 1 : 0;
            const CVector y = add_noise(bit == 0 ? x_t : x_r, noise.sample_power(), rng);
            if (decide(y) != bit) ++errors;
        }
        chunk_errors[c] = errors;
    });

    std::size_t errors = 0;
    for (std::size_t e : chunk_errors) errors += e;
    const double ber = static_cast<double>(errors) / static_cast<double>(bits);
    return {ber, binomial_half_width(ber, bits), errors, bits};
}

}  // namespace zedloc
