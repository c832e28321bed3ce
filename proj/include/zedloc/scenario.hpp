#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "zedloc/locmap.hpp"
#include "zedloc/raytrace.hpp"
#include "zedloc/sysparams.hpp"

namespace zedloc {

/// System parameters in configuration units (dB where the radio world uses dB).
struct ScenarioParams {
    int n_rb = 50;
    int n_tti = 1;
    int k_pilots = 8;
    double f_rb_hz = 180e3;
    double scs_hz = 15e3;
    double tti_s = 1e-3;
    double bw_hz = 9e6;
    double p_bs_dbm = 46.0;
    double n_th_dbm_per_hz = -174.0;
    double nf_db = 9.0;
    double f0_hz = 857e6;
    int n_zed = 127;
    double bep_threshold = 0.01;
    double pixel_size_m = 0.4;
    int l_train = 8;
    int n_bits_id = 7;

    SystemParams to_system_params() const;
};

struct RaytraceSettings {
    int max_reflections = 2;
    double gain_floor_db = -180.0;
    double min_distance_m = 0.1;
};

struct Scenario {
    std::string name;
    ScenarioParams config;
    bool n_zed_explicit = false;
    FloorPlan plan;
    Vec2 bs;
    std::vector<ZedBeacon> beacons;
    std::vector<std::string> beacon_rooms;  // parallel to beacons, "" when unspecified
    RaytraceSettings raytrace;
    std::uint64_t seed = 1;

    SystemParams params() const;
    Deployment deployment() const;
    PropagationOptions propagation(int workers = 1) const;
    const ZedBeacon& beacon(int id) const;
};

/// Thrown for malformed or inconsistent scenario files; what() starts with
/// the offending field path, e.g. "beacons[2].id: ...".
class ScenarioError : public ValidationError {
   public:
    using ValidationError::ValidationError;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical form with every default filled in.
nlohmann::json to_json(const Scenario& scenario);

}  // namespace zedloc
