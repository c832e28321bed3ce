#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zedloc/locmap.hpp"
#include "zedloc/sysparams.hpp"

namespace zedloc {

inline constexpr const char* kMapSchema = "# zedloc-map v1";
inline constexpr const char* kCaSchema = "# zedloc-ca v1";
inline constexpr const char* kRoomAccuracySchema = "# zedloc-room-accuracy v1";
inline constexpr const char* kBepSchema = "# zedloc-validate-bep v1";

/// One-line "# params: ..." echo of the radio configuration, dB quantities
/// in their configuration units.
std::string params_banner(const SystemParams& p);

/// 10 log10, with "-inf" for zero.
std::string format_db(double linear);

/// One row per pixel: x_m,y_m,room,covered,best_zed,best_snr_db,best_bep.
/// best_snr_db / best_bep describe the strongest beacon; best_zed is empty
/// when that beacon misses the BEP threshold.
void write_map_csv(std::ostream& out, const CoverageMap& map, const SystemParams& params);

enum class Heatmap { BestZed, BestSnrDb, BestBep, Covered };

// Fixed scales so images from different runs compare directly.
inline constexpr double kHeatmapSnrMinDb = -40.0;
inline constexpr double kHeatmapSnrMaxDb = 40.0;
inline constexpr double kHeatmapMaxNegLog10Bep = 6.0;

/// Binary 8-bit PGM, north (max y) on the first row.
void write_pgm(std::ostream& out, const CoverageMap& map, Heatmap quantity);
std::string heatmap_name(Heatmap quantity);

void write_ca_table_csv(std::ostream& out, const CaTable& table);
void write_room_accuracy_csv(std::ostream& out, const std::vector<std::pair<int, RoomAccuracy>>& rows);

}  // namespace zedloc
