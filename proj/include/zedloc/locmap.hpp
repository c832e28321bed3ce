#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zedloc/channel.hpp"
#include "zedloc/geometry.hpp"
#include "zedloc/raytrace.hpp"
#include "zedloc/sysparams.hpp"

namespace zedloc {

/// Big-endian fixed-width binary codeword of a beacon id in [1, 2^n_bits - 1].
std::vector<int> encode_id(int id, int n_bits);
int decode_id(std::span<const int> bits);

struct ZedBeacon {
    int id = 0;
    Vec2 position;
    std::vector<int> codeword;
};

ZedBeacon make_beacon(int id, Vec2 position, int n_bits);

struct Deployment {
    FloorPlan plan;
    Vec2 bs;  // may lie outside the plan bounds
    std::vector<ZedBeacon> beacons;
    SystemParams params;
    // When false, params.n_zed is an upper bound rather than the exact count.
    bool enforce_count = true;

    void validate() const;
};

/// Round-robin TDM frame: each beacon sends 2L training bits plus its id.
struct Schedule {
    std::vector<int> frame;  // beacon ids in slot order
    double slot_duration = 0.0;

    double slot_start(std::size_t slot) const { return static_cast<double>(slot) * slot_duration; }
    double frame_period() const { return static_cast<double>(frame.size()) * slot_duration; }
};

Schedule build_schedule(const Deployment& dep);

struct PropagationOptions {
    int max_reflections = 2;
    double gain_floor_db = -180.0;
    double min_distance_m = 0.1;  // clamp on the beacon -> SM leg
    int workers = 1;
};

struct ZedLinkQuality {
    int id;
    double snr;  // linear
    double bep;
};

struct PixelEvaluation {
    std::vector<ZedLinkQuality> links;  // deployment beacon order
    bool clamped = false;               // some beacon closer than min_distance_m
};

/// Traces the three links for every beacon at SM position pos and applies
/// the closed-form SNR and BEP.
PixelEvaluation evaluate_pixel(Vec2 pos, const Deployment& dep, const PilotGrid& grid, const LinkBudget& budget,
                               const PropagationOptions& opts = {});

struct CoverageCell {
    Vec2 center;
    int room = -1;  // index into room_names, -1 outside every room
    std::vector<double> snr;  // per beacon, map beacon order
    std::vector<double> bep;
    std::optional<int> best_zed;
    bool covered = false;
    bool clamped = false;
};

struct CoverageMap {
    double pixel_size = 0.0;
    Vec2 origin;  // lower-left corner of pixel (0, 0)
    int nx = 0;
    int ny = 0;
    double bep_threshold = 0.0;
    int n_tti = 0;
    std::size_t n_pilots = 0;
    std::vector<ZedBeacon> beacons;  // ascending id
    std::vector<std::string> room_names;
    std::vector<CoverageCell> cells;  // row-major, iy * nx + ix, y upwards

    const CoverageCell& cell(int ix, int iy) const { return cells[static_cast<std::size_t>(iy * nx + ix)]; }
    /// Index of beacon `id` in `beacons`; throws ValidationError if unknown.
    std::size_t beacon_index(int id) const;
    std::size_t clamped_pixels() const;
};

CoverageMap sweep(const Deployment& dep, const PilotGrid& grid, const LinkBudget& budget,
                  const PropagationOptions& opts = {});

struct CoverageArea {
    std::size_t pixels = 0;
    double area_m2 = 0.0;
};

CoverageArea coverage_area(const CoverageMap& map, int zed_id);
CoverageArea coverage_area(const CoverageMap& map, int zed_id, double bep_threshold);
std::vector<bool> coverage_mask(const CoverageMap& map, int zed_id, double bep_threshold);

struct RoomAccuracy {
    std::optional<double> accuracy;  // none when no covered pixel lies in a room
    std::size_t correct = 0;
    std::size_t evaluated = 0;
    std::size_t outside_rooms = 0;  // covered pixels excluded for lying outside every room
};

/// Fraction of covered pixels whose selected beacon sits in the pixel's room.
RoomAccuracy room_accuracy(const CoverageMap& map, const FloorPlan& plan);

struct CaTable {
    std::vector<int> n_tti;
    std::vector<int> ids;
    std::vector<std::vector<std::size_t>> pixels;  // [beacon][n_tti]
    double pixel_area = 0.0;
};

struct NttiComparison {
    CaTable table;
    std::vector<CoverageMap> maps;  // one per n_tti value
};

NttiComparison compare_ntti(const Deployment& dep, std::span<const int> n_tti_values, const LinkBudget& budget,
                            const PropagationOptions& opts = {});

/// Placement heuristic: candidate indices sorted by BS illumination
/// ||phi||^2 / N, strongest first (ties keep input order).
std::vector<std::size_t> rank_by_illumination(const FloorPlan& plan, Vec2 bs, std::span<const Vec2> candidates,
                                              const PilotGrid& grid, double f0, const PropagationOptions& opts = {});

}  // namespace zedloc
