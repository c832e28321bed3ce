#include "zedloc/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <map>
#include <string_view>

namespace zedloc {

using nlohmann::json;

SystemParams ScenarioParams::to_system_params() const {
    SystemParams p;
    p.n_rb = n_rb;
    p.n_tti = n_tti;
    p.k_pilots = k_pilots;
    p.f_rb = f_rb_hz;
    p.scs = scs_hz;
    p.tti = tti_s;
    p.bw = bw_hz;
    p.p_bs = dbm_to_watt(p_bs_dbm);
    p.n_th = dbm_to_watt(n_th_dbm_per_hz);
    p.nf = db_to_linear(nf_db);
    p.f0 = f0_hz;
    p.n_zed = n_zed;
    p.bep_threshold = bep_threshold;
    p.pixel_size = pixel_size_m;
    p.l_train = l_train;
    p.n_bits_id = n_bits_id;
    return p;
}

SystemParams Scenario::params() const { return config.to_system_params(); }

Deployment Scenario::deployment() const {
    return {plan, bs, beacons, params(), n_zed_explicit};
}

PropagationOptions Scenario::propagation(int workers) const {
    return {raytrace.max_reflections, raytrace.gain_floor_db, raytrace.min_distance_m, workers};
}

const ZedBeacon& Scenario::beacon(int id) const {
    for (const ZedBeacon& b : beacons) {
        if (b.id == id) return b;
    }
    throw ValidationError(fmt::format("no beacon with id {}", id));
}

namespace {

[[noreturn]] void fail(const std::string& path, std::string_view what) {
    throw ScenarioError(fmt::format("{}: {}", path.empty() ? "<root>" : path, what));
}

std::string child(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

std::string index(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

const json& require_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (std::string_view a : allowed) known = known || key == a;
        if (!known) fail(child(path, key), "unknown field");
    }
    return j;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

Vec2 get_point(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y] in meters");
    return {get_number(j[0], index(path, 0)), get_number(j[1], index(path, 1))};
}

std::complex<double> get_complex(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) fail(path, "expected a number or [re, im]");
    return {get_number(j[0], index(path, 0)), get_number(j[1], index(path, 1))};
}

template <class T, class Getter>
void optional_field(const json& obj, const std::string& path, std::string_view key, T& out, Getter get) {
    if (const auto it = obj.find(std::string(key)); it != obj.end()) out = get(*it, child(path, key));
}

ScenarioParams parse_params(const json& j, const std::string& path, bool& n_zed_explicit) {
    require_object(j, path,
                   {"n_rb", "n_tti", "k_pilots", "f_rb_hz", "scs_hz", "tti_s", "bw_hz", "p_bs_dbm",
                    "n_th_dbm_per_hz", "nf_db", "f0_hz", "n_zed", "bep_threshold", "pixel_size_m", "l_train",
                    "n_bits_id"});
    ScenarioParams p;
    optional_field(j, path, "n_rb", p.n_rb, get_int);
    optional_field(j, path, "n_tti", p.n_tti, get_int);
    optional_field(j, path, "k_pilots", p.k_pilots, get_int);
    optional_field(j, path, "f_rb_hz", p.f_rb_hz, get_number);
    optional_field(j, path, "scs_hz", p.scs_hz, get_number);
    optional_field(j, path, "tti_s", p.tti_s, get_number);
    optional_field(j, path, "bw_hz", p.bw_hz, get_number);
    optional_field(j, path, "p_bs_dbm", p.p_bs_dbm, get_number);
    optional_field(j, path, "n_th_dbm_per_hz", p.n_th_dbm_per_hz, get_number);
    optional_field(j, path, "nf_db", p.nf_db, get_number);
    optional_field(j, path, "f0_hz", p.f0_hz, get_number);
    optional_field(j, path, "n_zed", p.n_zed, get_int);
    optional_field(j, path, "bep_threshold", p.bep_threshold, get_number);
    optional_field(j, path, "pixel_size_m", p.pixel_size_m, get_number);
    optional_field(j, path, "l_train", p.l_train, get_int);
    optional_field(j, path, "n_bits_id", p.n_bits_id, get_int);
    n_zed_explicit = j.contains("n_zed");
    return p;
}

FloorPlan parse_plan(const json& j, const std::string& path) {
    require_object(j, path, {"bounds", "walls", "rooms"});
    FloorPlan plan;
    if (!j.contains("bounds")) fail(child(path, "bounds"), "required field missing");
    const std::string bpath = child(path, "bounds");
    const json& b = require_object(j["bounds"], bpath, {"min", "max"});
    if (!b.contains("min") || !b.contains("max")) fail(bpath, "requires min and max");
    plan.bounds = {get_point(b["min"], child(bpath, "min")), get_point(b["max"], child(bpath, "max"))};
    if (!(plan.bounds.max.x > plan.bounds.min.x && plan.bounds.max.y > plan.bounds.min.y)) {
        fail(bpath, "max must exceed min in both coordinates");
    }

    if (j.contains("walls")) {
        const std::string wpath = child(path, "walls");
        if (!j["walls"].is_array()) fail(wpath, "expected an array");
        for (std::size_t i = 0; i < j["walls"].size(); ++i) {
            const std::string p = index(wpath, i);
            const json& w = require_object(j["walls"][i], p, {"from", "to", "transmission_loss_db", "reflection_coeff"});
            if (!w.contains("from") || !w.contains("to")) fail(p, "requires from and to");
            Wall wall;
            wall.segment = {get_point(w["from"], child(p, "from")), get_point(w["to"], child(p, "to"))};
            if (wall.segment.length() == 0.0) fail(p, "zero-length wall");
            optional_field(w, p, "transmission_loss_db", wall.transmission_loss_db, get_number);
            optional_field(w, p, "reflection_coeff", wall.reflection_coeff, get_complex);
            if (!(wall.transmission_loss_db >= 0.0)) fail(child(p, "transmission_loss_db"), "must be >= 0");
            if (std::abs(wall.reflection_coeff) > 1.0) fail(child(p, "reflection_coeff"), "magnitude must be <= 1");
            plan.walls.push_back(wall);
        }
    }

    if (j.contains("rooms")) {
        const std::string rpath = child(path, "rooms");
        if (!j["rooms"].is_array()) fail(rpath, "expected an array");
        std::map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < j["rooms"].size(); ++i) {
            const std::string p = index(rpath, i);
            const json& r = require_object(j["rooms"][i], p, {"name", "polygon"});
            if (!r.contains("name") || !r["name"].is_string() || r["name"].get<std::string>().empty()) {
                fail(child(p, "name"), "expected a non-empty string");
            }
            Room room;
            room.name = r["name"].get<std::string>();
            if (const auto [it, fresh] = seen.emplace(room.name, i); !fresh) {
                fail(child(p, "name"), fmt::format("duplicate room name '{}' (also rooms[{}])", room.name, it->second));
            }
            if (!r.contains("polygon") || !r["polygon"].is_array()) fail(child(p, "polygon"), "expected an array of points");
            for (std::size_t v = 0; v < r["polygon"].size(); ++v) {
                room.polygon.push_back(get_point(r["polygon"][v], index(child(p, "polygon"), v)));
            }
            if (!is_simple_polygon(room.polygon)) fail(child(p, "polygon"), "must be a simple polygon with >= 3 vertices");
            plan.rooms.push_back(std::move(room));
        }
    }
    return plan;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    require_object(doc, "", {"schema", "name", "seed", "params", "floor_plan", "bs", "beacons", "raytrace"});
    Scenario s;
    if (doc.contains("schema")) {
        if (doc["schema"] != "zedloc-scenario/1") fail("schema", "unsupported schema (expected \"zedloc-scenario/1\")");
    }
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) fail("name", "expected a string");
        s.name = doc["name"].get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
        s.seed = doc["seed"].get<std::uint64_t>();
    }

    bool n_zed_explicit = false;
    if (doc.contains("params")) s.config = parse_params(doc["params"], "params", n_zed_explicit);
    s.n_zed_explicit = n_zed_explicit;

    if (!doc.contains("floor_plan")) fail("floor_plan", "required field missing");
    s.plan = parse_plan(doc["floor_plan"], "floor_plan");

    if (!doc.contains("bs")) fail("bs", "required field missing");
    s.bs = get_point(doc["bs"], "bs");

    if (doc.contains("raytrace")) {
        const json& r = require_object(doc["raytrace"], "raytrace", {"max_reflections", "gain_floor_db", "min_distance_m"});
        optional_field(r, "raytrace", "max_reflections", s.raytrace.max_reflections, get_int);
        optional_field(r, "raytrace", "gain_floor_db", s.raytrace.gain_floor_db, get_number);
        optional_field(r, "raytrace", "min_distance_m", s.raytrace.min_distance_m, get_number);
        if (s.raytrace.max_reflections < 0) fail("raytrace.max_reflections", "must be >= 0");
        if (!(s.raytrace.min_distance_m > 0.0)) fail("raytrace.min_distance_m", "must be > 0");
    }

    if (doc.contains("beacons")) {
        if (!doc["beacons"].is_array()) fail("beacons", "expected an array");
        std::map<int, std::size_t> seen;
        for (std::size_t i = 0; i < doc["beacons"].size(); ++i) {
            const std::string p = index("beacons", i);
            const json& b = require_object(doc["beacons"][i], p, {"id", "position", "room"});
            if (!b.contains("id")) fail(child(p, "id"), "required field missing");
            if (!b.contains("position")) fail(child(p, "position"), "required field missing");
            const int id = get_int(b["id"], child(p, "id"));
            const Vec2 pos = get_point(b["position"], child(p, "position"));
            if (const auto [it, fresh] = seen.emplace(id, i); !fresh) {
                const Vec2 other = s.beacons[it->second].position;
                fail(child(p, "id"), fmt::format("duplicate beacon id {} at ({}, {}); first defined at beacons[{}] ({}, {})",
                                                 id, pos.x, pos.y, it->second, other.x, other.y));
            }
            const int max_id = (1 << std::clamp(s.config.n_bits_id, 1, 30)) - 1;
            if (id < 1 || id > max_id) {
                fail(child(p, "id"), fmt::format("id {} outside [1, {}] for n_bits_id = {}", id, max_id, s.config.n_bits_id));
            }
            if (!s.plan.bounds.contains(pos)) fail(child(p, "position"), "lies outside floor_plan.bounds");
            if (pos == s.bs) fail(child(p, "position"), "coincides with the BS");
            std::string room;
            if (b.contains("room")) {
                if (!b["room"].is_string()) fail(child(p, "room"), "expected a room name");
                room = b["room"].get<std::string>();
                const auto r = std::find_if(s.plan.rooms.begin(), s.plan.rooms.end(),
                                            [&](const Room& x) { return x.name == room; });
                if (r == s.plan.rooms.end()) fail(child(p, "room"), fmt::format("unknown room '{}'", room));
                if (!point_in_polygon(pos, r->polygon)) fail(child(p, "room"), fmt::format("position is not inside room '{}'", room));
            }
            s.beacons.push_back({id, pos, encode_id(id, s.config.n_bits_id)});
            s.beacon_rooms.push_back(room);
        }
    }

    try {
        s.params().validate();
    } catch (const ValidationError& e) {
        fail("params", e.what());
    }
    if (s.n_zed_explicit && static_cast<int>(s.beacons.size()) != s.config.n_zed) {
        fail("params.n_zed", fmt::format("n_zed = {} but {} beacons are listed", s.config.n_zed, s.beacons.size()));
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(fmt::format("{}: cannot open scenario file", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(fmt::format("{}: JSON parse error: {}", path.string(), e.what()));
    }
    return parse_scenario(doc);
}

namespace {

json point(Vec2 p) { return json::array({p.x, p.y}); }

}  // namespace

json to_json(const Scenario& s) {
    const ScenarioParams& c = s.config;
    json params = {
        {"n_rb", c.n_rb},
        {"n_tti", c.n_tti},
        {"k_pilots", c.k_pilots},
        {"f_rb_hz", c.f_rb_hz},
        {"scs_hz", c.scs_hz},
        {"tti_s", c.tti_s},
        {"bw_hz", c.bw_hz},
        {"p_bs_dbm", c.p_bs_dbm},
        {"n_th_dbm_per_hz", c.n_th_dbm_per_hz},
        {"nf_db", c.nf_db},
        {"f0_hz", c.f0_hz},
        {"bep_threshold", c.bep_threshold},
        {"pixel_size_m", c.pixel_size_m},
        {"l_train", c.l_train},
        {"n_bits_id", c.n_bits_id},
    };
    if (s.n_zed_explicit) params["n_zed"] = c.n_zed;

    json walls = json::array();
    for (const Wall& w : s.plan.walls) {
        walls.push_back({{"from", point(w.segment.a)},
                         {"to", point(w.segment.b)},
                         {"transmission_loss_db", w.transmission_loss_db},
                         {"reflection_coeff", json::array({w.reflection_coeff.real(), w.reflection_coeff.imag()})}});
    }
    json rooms = json::array();
    for (const Room& r : s.plan.rooms) {
        json poly = json::array();
        for (Vec2 v : r.polygon) poly.push_back(point(v));
        rooms.push_back({{"name", r.name}, {"polygon", poly}});
    }
    json beacons = json::array();
    for (std::size_t i = 0; i < s.beacons.size(); ++i) {
        json b = {{"id", s.beacons[i].id}, {"position", point(s.beacons[i].position)}};
        if (!s.beacon_rooms[i].empty()) b["room"] = s.beacon_rooms[i];
        beacons.push_back(b);
    }
    return {
        {"schema", "zedloc-scenario/1"},
        {"name", s.name},
        {"seed", s.seed},
        {"params", params},
        {"floor_plan",
         {{"bounds", {{"min", point(s.plan.bounds.min)}, {"max", point(s.plan.bounds.max)}}},
          {"walls", walls},
          {"rooms", rooms}}},
        {"bs", point(s.bs)},
        {"beacons", beacons},
        {"raytrace",
         {{"max_reflections", s.raytrace.max_reflections},
          {"gain_floor_db", s.raytrace.gain_floor_db},
          {"min_distance_m", s.raytrace.min_distance_m}}},
    };
}

}  // namespace zedloc
