#include "zedloc/locmap.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "zedloc/link.hpp"
#include "zedloc/parallel.hpp"

namespace zedloc {

std::vector<int> encode_id(int id, int n_bits) {
    if (n_bits < 1 || n_bits > 30) throw ValidationError(fmt::format("encode_id: n_bits {} out of range", n_bits));
    const int max_id = (1 << n_bits) - 1;
    if (id < 1 || id > max_id) {
        throw ValidationError(fmt::format("encode_id: id {} outside [1, {}]", id, max_id));
    }
    std::vector<int> bits(static_cast<std::size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) bits[static_cast<std::size_t>(i)] = (id >> (n_bits - 1 - i)) & 1;
    return bits;
}

int decode_id(std::span<const int> bits) {
    if (bits.empty() || bits.size() > 30) throw ValidationError("decode_id: codeword length out of range");
    int id = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw ValidationError("decode_id: bits must be 0 or 1");
        id = (id << 1) | b;
    }
    return id;
}

ZedBeacon make_beacon(int id, Vec2 position, int n_bits) { return {id, position, encode_id(id, n_bits)}; }

void Deployment::validate() const {
    params.validate();
    plan.validate();
    if (enforce_count && static_cast<int>(beacons.size()) != params.n_zed) {
        throw ValidationError(
            fmt::format("deployment lists {} beacons but n_zed = {}", beacons.size(), params.n_zed));
    }
    if (static_cast<int>(beacons.size()) > params.n_zed) {
        throw ValidationError(fmt::format("deployment lists {} beacons, more than n_zed = {}", beacons.size(),
                                          params.n_zed));
    }
    std::set<int> ids;
    for (const ZedBeacon& b : beacons) {
        if (!ids.insert(b.id).second) throw ValidationError(fmt::format("duplicate beacon id {}", b.id));
        if (b.codeword != encode_id(b.id, params.n_bits_id)) {
            throw ValidationError(fmt::format("beacon {} codeword does not encode its id", b.id));
        }
        if (!plan.bounds.contains(b.position)) {
            throw ValidationError(fmt::format("beacon {} at ({}, {}) lies outside the plan bounds", b.id,
                                              b.position.x, b.position.y));
        }
        if (b.position == bs) throw ValidationError(fmt::format("beacon {} coincides with the BS", b.id));
    }
}

Schedule build_schedule(const Deployment& dep) {
    dep.validate();
    Schedule s;
    for (const ZedBeacon& b : dep.beacons) s.frame.push_back(b.id);
    std::sort(s.frame.begin(), s.frame.end());
    const auto& p = dep.params;
    s.slot_duration = (2.0 * p.l_train + p.n_bits_id) * p.bit_period();
    return s;
}

namespace {

TraceOptions trace_options(const SystemParams& params, const PropagationOptions& opts, double min_distance) {
    TraceOptions t;
    t.f0 = params.f0;
    t.max_reflections = opts.max_reflections;
    t.gain_floor_db = opts.gain_floor_db;
    t.min_distance_m = min_distance;
    return t;
}

CVector compose_phi(const Deployment& dep, const ZedBeacon& b, const PilotGrid& grid,
                    const PropagationOptions& opts) {
    return compose(trace(dep.plan, dep.bs, b.position, trace_options(dep.params, opts, 0.0)), grid);
}

// Shared by evaluate_pixel and sweep; phi[i] is the composed BS -> beacon i channel.
PixelEvaluation evaluate_with_phi(Vec2 pos, const Deployment& dep, std::span<const ZedBeacon> beacons,
                                  std::span<const CVector> phi, const PilotGrid& grid, const LinkBudget& budget,
                                  const PropagationOptions& opts) {
    PixelEvaluation out;
    const CVector gamma = compose(trace(dep.plan, dep.bs, pos, trace_options(dep.params, opts, 0.0)), grid);
    const TraceOptions lambda_opts = trace_options(dep.params, opts, opts.min_distance_m);
    out.links.reserve(beacons.size());
    for (std::size_t i = 0; i < beacons.size(); ++i) {
        if (distance(pos, beacons[i].position) < opts.min_distance_m) out.clamped = true;
        const CVector lambda_ = compose(trace(dep.plan, beacons[i].position, pos, lambda_opts), grid);
        const PilotChannel chan = make_pilot_channel(gamma, phi[i], lambda_);
        const double snr = budget.p_u * zed_delta_norm2(chan) / budget.n0;
        out.links.push_back({beacons[i].id, snr, analytic_bep_from_snr(snr, grid.size())});
    }
    return out;
}

int cells_along(double extent, double pixel) {
    return std::max(1, static_cast<int>(std::ceil(extent / pixel - 1e-9)));
}

}  // namespace

PixelEvaluation evaluate_pixel(Vec2 pos, const Deployment& dep, const PilotGrid& grid, const LinkBudget& budget,
                               const PropagationOptions& opts) {
    if (!dep.plan.bounds.contains(pos)) {
        throw ValidationError(fmt::format("evaluate_pixel: ({}, {}) lies outside the plan bounds", pos.x, pos.y));
    }
    std::vector<CVector> phi;
    phi.reserve(dep.beacons.size());
    for (const ZedBeacon& b : dep.beacons) phi.push_back(compose_phi(dep, b, grid, opts));
    return evaluate_with_phi(pos, dep, dep.beacons, phi, grid, budget, opts);
}

std::size_t CoverageMap::beacon_index(int id) const {
    for (std::size_t i = 0; i < beacons.size(); ++i) {
        if (beacons[i].id == id) return i;
    }
    throw ValidationError(fmt::format("unknown beacon id {}", id));
}

std::size_t CoverageMap::clamped_pixels() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.clamped; }));
}

CoverageMap sweep(const Deployment& dep, const PilotGrid& grid, const LinkBudget& budget,
                  const PropagationOptions& opts) {
    dep.validate();
    CoverageMap map;
    map.pixel_size = dep.params.pixel_size;
    map.origin = dep.plan.bounds.min;
    map.nx = cells_along(dep.plan.bounds.width(), map.pixel_size);
    map.ny = cells_along(dep.plan.bounds.height(), map.pixel_size);
    map.bep_threshold = dep.params.bep_threshold;
    map.n_tti = dep.params.n_tti;
    map.n_pilots = grid.size();
    map.beacons = dep.beacons;
    std::sort(map.beacons.begin(), map.beacons.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const Room& r : dep.plan.rooms) map.room_names.push_back(r.name);
    map.cells.resize(static_cast<std::size_t>(map.nx) * static_cast<std::size_t>(map.ny));

    std::vector<CVector> phi(map.beacons.size());
    parallel_for(map.beacons.size(), opts.workers,
                 [&](std::size_t i) { phi[i] = compose_phi(dep, map.beacons[i], grid, opts); });

    parallel_for(map.cells.size(), opts.workers, [&](std::size_t idx) {
        const int ix = static_cast<int>(idx % static_cast<std::size_t>(map.nx));
        const int iy = static_cast<int>(idx / static_cast<std::size_t>(map.nx));
        CoverageCell& cell = map.cells[idx];
        cell.center = {map.origin.x + (ix + 0.5) * map.pixel_size, map.origin.y + (iy + 0.5) * map.pixel_size};
        cell.room = dep.plan.room_at(cell.center);
        const PixelEvaluation eval = evaluate_with_phi(cell.center, dep, map.beacons, phi, grid, budget, opts);
        cell.clamped = eval.clamped;
        double best_snr = -1.0;
        for (const ZedLinkQuality& q : eval.links) {
            cell.snr.push_back(q.snr);
            cell.bep.push_back(q.bep);
            // beacons ascend by id, so strict > keeps the lowest id on ties
            if (q.bep < map.bep_threshold && q.snr > best_snr) {
                best_snr = q.snr;
                cell.best_zed = q.id;
            }
        }
        cell.covered = cell.best_zed.has_value();
    });
    return map;
}

std::vector<bool> coverage_mask(const CoverageMap& map, int zed_id, double bep_threshold) {
    const std::size_t k = map.beacon_index(zed_id);
    std::vector<bool> mask(map.cells.size());
    for (std::size_t i = 0; i < map.cells.size(); ++i) mask[i] = map.cells[i].bep[k] < bep_threshold;
    return mask;
}

CoverageArea coverage_area(const CoverageMap& map, int zed_id, double bep_threshold) {
    const auto mask = coverage_mask(map, zed_id, bep_threshold);
    const auto pixels = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    return {pixels, static_cast<double>(pixels) * map.pixel_size * map.pixel_size};
}

CoverageArea coverage_area(const CoverageMap& map, int zed_id) {
    return coverage_area(map, zed_id, map.bep_threshold);
}

RoomAccuracy room_accuracy(const CoverageMap& map, const FloorPlan& plan) {
    RoomAccuracy acc;
    std::vector<int> beacon_room;
    for (const ZedBeacon& b : map.beacons) beacon_room.push_back(plan.room_at(b.position));
    for (const CoverageCell& cell : map.cells) {
        if (!cell.covered) continue;
        const int room = plan.room_at(cell.center);
        if (room < 0) {
            ++acc.outside_rooms;
            continue;
        }
        ++acc.evaluated;
        if (beacon_room[map.beacon_index(*cell.best_zed)] == room) ++acc.correct;
    }
    if (acc.evaluated > 0) acc.accuracy = static_cast<double>(acc.correct) / static_cast<double>(acc.evaluated);
    return acc;
}

NttiComparison compare_ntti(const Deployment& dep, std::span<const int> n_tti_values, const LinkBudget& budget,
                            const PropagationOptions& opts) {
    NttiComparison out;
    out.table.n_tti.assign(n_tti_values.begin(), n_tti_values.end());
    out.table.pixel_area = dep.params.pixel_size * dep.params.pixel_size;
    for (int n_tti : n_tti_values) {
        Deployment variant = dep;
        variant.params.n_tti = n_tti;
        out.maps.push_back(sweep(variant, build_pilot_grid(variant.params), budget, opts));
    }
    if (out.maps.empty()) return out;
    for (const ZedBeacon& b : out.maps.front().beacons) {
        out.table.ids.push_back(b.id);
        std::vector<std::size_t> row;
        for (const CoverageMap& map : out.maps) row.push_back(coverage_area(map, b.id).pixels);
        out.table.pixels.push_back(std::move(row));
    }
    return out;
}

std::vector<std::size_t> rank_by_illumination(const FloorPlan& plan, Vec2 bs, std::span<const Vec2> candidates,
                                              const PilotGrid& grid, double f0, const PropagationOptions& opts) {
    TraceOptions t;
    t.f0 = f0;
    t.max_reflections = opts.max_reflections;
    t.gain_floor_db = opts.gain_floor_db;
    std::vector<double> power(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        power[i] = compose(trace(plan, bs, candidates[i], t), grid).squaredNorm() / static_cast<double>(grid.size());
    }
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return power[a] > power[b]; });
    return order;
}

}  // namespace zedloc
