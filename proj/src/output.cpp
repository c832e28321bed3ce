#include "zedloc/output.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace zedloc {

std::string params_banner(const SystemParams& p) {
    return fmt::format(
        "# params: n_rb={} n_tti={} k_pilots={} f_rb={:g} Hz scs={:g} Hz tti={:g} s t_ofdm={:.6g} s bw={:g} Hz "
        "p_bs={:.6g} dBm n_th={:.6g} dBm/Hz nf={:.6g} dB f0={:g} Hz n_zed={} bep_threshold={:g} pixel_size={:g} m "
        "l_train={} n_bits_id={} pilots_per_bit={}",
        p.n_rb, p.n_tti, p.k_pilots, p.f_rb, p.scs, p.tti, p.t_ofdm(), p.bw, watt_to_dbm(p.p_bs),
        watt_to_dbm(p.n_th), linear_to_db(p.nf), p.f0, p.n_zed, p.bep_threshold, p.pixel_size, p.l_train,
        p.n_bits_id, p.pilots_per_bit());
}

std::string format_db(double linear) {
    if (linear <= 0.0) return "-inf";
    return fmt::format("{:.6f}", linear_to_db(linear));
}

namespace {

struct Strongest {
    std::size_t index;
    double snr;
    double bep;
};

std::optional<Strongest> strongest(const CoverageCell& cell) {
    if (cell.snr.empty()) return std::nullopt;
    const auto it = std::max_element(cell.snr.begin(), cell.snr.end());
    const auto k = static_cast<std::size_t>(it - cell.snr.begin());
    return Strongest{k, cell.snr[k], cell.bep[k]};
}

unsigned char scale(double value, double lo, double hi) {
    const double t = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(255.0 * t));
}

}  // namespace

void write_map_csv(std::ostream& out, const CoverageMap& map, const SystemParams& params) {
    out << kMapSchema << '\n' << params_banner(params) << '\n';
    out << "x_m,y_m,room,covered,best_zed,best_snr_db,best_bep\n";
    for (const CoverageCell& cell : map.cells) {
        const std::string room = cell.room >= 0 ? map.room_names[static_cast<std::size_t>(cell.room)] : "";
        const auto best = strongest(cell);
        out << fmt::format("{:.3f},{:.3f},{},{},{},{},{}\n", cell.center.x, cell.center.y, room,
                           cell.covered ? 1 : 0, cell.best_zed ? std::to_string(*cell.best_zed) : "",
                           best ? format_db(best->snr) : "", best ? fmt::format("{:.6e}", best->bep) : "");
    }
}

std::string heatmap_name(Heatmap quantity) {
    switch (quantity) {
        case Heatmap::BestZed: return "best_zed";
        case Heatmap::BestSnrDb: return "best_snr_db";
        case Heatmap::BestBep: return "best_bep";
        case Heatmap::Covered: return "covered";
    }
    return "unknown";
}

void write_pgm(std::ostream& out, const CoverageMap& map, Heatmap quantity) {
    out << "P5\n" << map.nx << ' ' << map.ny << "\n255\n";
    const double n_beacons = static_cast<double>(std::max<std::size_t>(1, map.beacons.size()));
    for (int iy = map.ny - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < map.nx; ++ix) {
            const CoverageCell& cell = map.cell(ix, iy);
            const auto best = strongest(cell);
            unsigned char v = 0;
            switch (quantity) {
                case Heatmap::BestZed:
                    if (cell.best_zed) {
                        const double rank = static_cast<double>(map.beacon_index(*cell.best_zed) + 1);
                        v = static_cast<unsigned char>(std::lround(255.0 * rank / n_beacons));
                    }
                    break;
                case Heatmap::BestSnrDb:
                    if (best && best->snr > 0.0) v = scale(linear_to_db(best->snr), kHeatmapSnrMinDb, kHeatmapSnrMaxDb);
                    break;
                case Heatmap::BestBep:
                    if (best) v = scale(-std::log10(std::max(best->bep, 1e-300)), 0.0, kHeatmapMaxNegLog10Bep);
                    break;
                case Heatmap::Covered: v = cell.covered ? 255 : 0; break;
            }
            out.put(static_cast<char>(v));
        }
    }
}

void write_ca_table_csv(std::ostream& out, const CaTable& table) {
    out << kCaSchema << '\n';
    out << "zed_id";
    for (int n : table.n_tti) out << fmt::format(",ca_pixels_ntti{0},ca_m2_ntti{0}", n);
    out << '\n';
    for (std::size_t b = 0; b < table.ids.size(); ++b) {
        out << table.ids[b];
        for (std::size_t k = 0; k < table.n_tti.size(); ++k) {
            const std::size_t px = table.pixels[b][k];
            out << fmt::format(",{},{:.4f}", px, static_cast<double>(px) * table.pixel_area);
        }
        out << '\n';
    }
}

void write_room_accuracy_csv(std::ostream& out, const std::vector<std::pair<int, RoomAccuracy>>& rows) {
    out << kRoomAccuracySchema << '\n';
    out << "n_tti,evaluated_pixels,correct_pixels,outside_rooms,accuracy\n";
    for (const auto& [n_tti, acc] : rows) {
        out << fmt::format("{},{},{},{},{}\n", n_tti, acc.evaluated, acc.correct, acc.outside_rooms,
                           acc.accuracy ? fmt::format("{:.6f}", *acc.accuracy) : "");
    }
}

}  // namespace zedloc
