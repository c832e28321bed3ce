#include "zedloc/channel.hpp"

#include <fmt/format.h>

#include <numbers>

namespace zedloc {

CVector compose(const std::vector<Ray>& rays, const PilotGrid& grid) {
    if (grid.empty()) throw ValidationError("compose: empty pilot grid");
    const auto& freqs = grid.frequencies();
    std::vector<std::complex<double>> per_bin(freqs.size(), {0.0, 0.0});
    for (std::size_t b = 0; b < freqs.size(); ++b) {
        std::complex<double> acc{0.0, 0.0};
        for (const Ray& ray : rays) {
            acc += ray.gain * std::polar(1.0, -2.0 * std::numbers::pi * freqs[b] * ray.delay);
        }
        per_bin[b] = acc;
    }
    CVector out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        out[static_cast<Eigen::Index>(n)] = per_bin[grid[n].freq_bin];
    }
    return out;
}

PilotChannel make_pilot_channel(CVector gamma, CVector phi, CVector lambda_) {
    if (gamma.size() != phi.size() || gamma.size() != lambda_.size()) {
        throw ValidationError(fmt::format("pilot channel length mismatch: {} / {} / {}", gamma.size(),
                                          phi.size(), lambda_.size()));
    }
    CVector g = gamma + phi.cwiseProduct(lambda_);
    return {std::move(gamma), std::move(phi), std::move(lambda_), std::move(g)};
}

PilotChannel build_pilot_channel(const std::vector<Ray>& gamma_rays, const std::vector<Ray>& phi_rays,
                                 const std::vector<Ray>& lambda_rays, const PilotGrid& grid) {
    return make_pilot_channel(compose(gamma_rays, grid), compose(phi_rays, grid), compose(lambda_rays, grid));
}

const CVector& effective(const PilotChannel& chan, int bit) {
    if (bit != 0 && bit != 1) throw ValidationError(fmt::format("effective: bit must be 0 or 1, got {}", bit));
    return bit == 0 ? chan.gamma : chan.g;
}

double zed_delta_norm2(const PilotChannel& chan) {
    if (chan.size() == 0) return 0.0;
    return chan.phi.cwiseProduct(chan.lambda_).squaredNorm() / static_cast<double>(chan.size());
}

}  // namespace zedloc
