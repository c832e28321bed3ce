#include "zedloc/sysparams.hpp"

#include <fmt/format.h>

#include <cmath>
#include <iterator>

namespace zedloc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace

int SystemParams::subcarriers_per_rb() const {
    return static_cast<int>(std::lround(f_rb / scs));
}

void SystemParams::validate() const {
    require(n_rb >= 1, "n_rb must be >= 1");
    require(n_tti >= 1, "n_tti must be >= 1");
    require(k_pilots >= 1, "k_pilots must be >= 1");
    require(n_zed >= 1, "n_zed must be >= 1");
    require(l_train >= 1, "l_train must be >= 1");
    require(n_bits_id >= 1 && n_bits_id <= 62, "n_bits_id must be in [1, 62]");
    require(f_rb > 0 && scs > 0 && tti > 0 && bw > 0, "f_rb, scs, tti and bw must be > 0");
    require(p_bs > 0 && n_th > 0 && nf > 0, "p_bs, n_th and nf must be > 0");
    require(f0 > 0, "f0 must be > 0");
    require(bep_threshold > 0 && bep_threshold < 0.5, "bep_threshold must be in (0, 0.5)");
    require(pixel_size > 0, "pixel_size must be > 0");
    require((std::int64_t{1} << n_bits_id) - 1 >= n_zed,
            "2^n_bits_id - 1 must be >= n_zed (one nonzero codeword per beacon)");
    require(std::abs(f_rb / scs - subcarriers_per_rb()) < 1e-9,
            "f_rb must be an integer multiple of scs");
    require(n_rb * f_rb <= bw * (1.0 + 1e-12), "n_rb * f_rb must fit inside bw");
    require(k_pilots <= static_cast<int>(std::size(kCrsPattern)), "k_pilots must be <= 8 (CRS positions per RB)");
}

LinkBudget derive_link_budget(const SystemParams& params) {
    params.validate();
    return {params.p_bs / params.bw, params.n_th * params.nf};
}

PilotGrid build_pilot_grid(const SystemParams& params) {
    params.validate();
    if (params.n_rb * params.f_rb > params.bw * (1.0 + 1e-12)) {
        throw ValidationError(fmt::format("n_rb * f_rb = {} Hz exceeds bw = {} Hz",
                                          params.n_rb * params.f_rb, params.bw));
    }
    if (params.k_pilots > static_cast<int>(std::size(kCrsPattern))) {
        throw ValidationError(fmt::format("k_pilots = {} exceeds the {} CRS positions per RB",
                                          params.k_pilots, std::size(kCrsPattern)));
    }
    const int sc_per_rb = params.subcarriers_per_rb();
    // Occupied block centred on f0; equals f0 - bw/2 when n_rb * f_rb == bw.
    const long first_sc = -std::lround(params.n_rb * sc_per_rb / 2.0);

    // Frequency bins are laid out for the first subframe and shared by the rest.
    std::vector<double> frequencies;
    frequencies.reserve(static_cast<std::size_t>(params.n_rb * params.k_pilots));
    for (int rb = 0; rb < params.n_rb; ++rb) {
        for (int k = 0; k < params.k_pilots; ++k) {
            const long sc = first_sc + rb * sc_per_rb + kCrsPattern[k].subcarrier;
            frequencies.push_back(static_cast<double>(sc) * params.scs);
        }
    }

    std::vector<PilotSlot> entries;
    entries.reserve(params.pilots_per_bit());
    for (int t = 0; t < params.n_tti; ++t) {
        for (int rb = 0; rb < params.n_rb; ++rb) {
            for (int k = 0; k < params.k_pilots; ++k) {
                const auto bin = static_cast<std::size_t>(rb * params.k_pilots + k);
                entries.push_back({t + 1, rb + 1, k + 1, frequencies[bin], kCrsPattern[k].symbol, bin});
            }
        }
    }
    return PilotGrid(std::move(entries), std::move(frequencies));
}

}  // namespace zedloc
