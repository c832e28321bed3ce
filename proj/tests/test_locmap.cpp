#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "zedloc/link.hpp"
#include "zedloc/locmap.hpp"
#include "zedloc/scenario.hpp"

using namespace zedloc;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

Wall wall(Vec2 a, Vec2 b, double loss_db, double refl = 0.0) { return {{a, b}, loss_db, {refl, 0.0}}; }

// Two 4 x 1 m rooms side by side; a lossy partition at x = 3 sits inside
// the left room, so the pixel between it and the room boundary hears the
// right-hand beacon better.
Deployment corridor(double partition_db) {
    Deployment d;
    d.plan.bounds = {{0, 0}, {8, 1}};
    d.plan.rooms = {{"west", rect(0, 0, 4, 1)}, {"east", rect(4, 0, 8, 1)}};
    d.plan.walls = {wall({3, 0}, {3, 1}, partition_db)};
    d.bs = {4, -100};
    d.params.n_zed = 2;
    d.params.pixel_size = 1.0;
    d.beacons = {make_beacon(1, {2, 0.5}, 7), make_beacon(2, {6, 0.5}, 7)};
    return d;
}

PropagationOptions direct_only() {
    PropagationOptions o;
    o.max_reflections = 0;
    return o;
}

Deployment open_room(Vec2 size, Vec2 bs, std::vector<Vec2> positions) {
    Deployment d;
    d.plan.bounds = {{0, 0}, size};
    d.plan.rooms = {{"room", rect(0, 0, size.x, size.y)}};
    d.bs = bs;
    d.params.n_zed = static_cast<int>(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        d.beacons.push_back(make_beacon(static_cast<int>(i) + 1, positions[i], 7));
    return d;
}

Deployment four_room(double pixel) {
    Deployment d = load_scenario(ZEDLOC_FIXTURE_DIR "/four_room.json").deployment();
    d.params.pixel_size = pixel;
    return d;
}

}  // namespace

TEST_CASE("id codewords") {
    CHECK(encode_id(1, 7) == std::vector<int>{0, 0, 0, 0, 0, 0, 1});
    CHECK(encode_id(100, 7) == std::vector<int>{1, 1, 0, 0, 1, 0, 0});
    for (int id = 1; id <= 127; ++id) CHECK(decode_id(encode_id(id, 7)) == id);
    CHECK_THROWS_AS(encode_id(0, 7), ValidationError);
    CHECK_THROWS_AS(encode_id(128, 7), ValidationError);
    CHECK_THROWS_AS(decode_id(std::vector<int>{0, 2, 1}), ValidationError);
}

TEST_CASE("deployment validation") {
    Deployment d = corridor(20.0);
    CHECK_NOTHROW(d.validate());
    SUBCASE("duplicate id") {
        d.beacons[1] = make_beacon(1, {6, 0.5}, 7);
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
    SUBCASE("beacon outside the plan") {
        d.beacons[1].position = {9, 0.5};
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
    SUBCASE("count must match n_zed") {
        d.params.n_zed = 3;
        CHECK_THROWS_AS(d.validate(), ValidationError);
        d.enforce_count = false;
        CHECK_NOTHROW(d.validate());
        d.params.n_zed = 1;
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
}

TEST_CASE("TDM schedule") {
    Deployment d = open_room({10, 10}, {5, -10}, {{1, 1}, {2, 2}, {3, 3}});
    std::swap(d.beacons[0], d.beacons[2]);
    const Schedule s = build_schedule(d);
    CHECK(s.frame == std::vector<int>{1, 2, 3});
    CHECK(s.slot_duration == doctest::Approx(23e-3).epsilon(1e-12));
    CHECK(s.frame_period() == doctest::Approx(69e-3).epsilon(1e-12));

    std::vector<Vec2> many;
    for (int i = 0; i < 127; ++i) many.push_back({0.05 + 0.07 * i, 5.0});
    const Schedule full = build_schedule(open_room({10, 10}, {5, -10}, many));
    REQUIRE(full.frame.size() == 127);
    for (std::size_t k = 1; k < full.frame.size(); ++k) {
        CHECK(full.slot_start(k) >= full.slot_start(k - 1) + full.slot_duration - 1e-15);
    }
    CHECK(full.frame_period() == doctest::Approx(127 * 23e-3));
}

TEST_CASE("pixel evaluation") {
    const SystemParams params;
    const PilotGrid grid = build_pilot_grid(params);
    const LinkBudget budget = derive_link_budget(params);

    SUBCASE("free-space SNR falls 20 log10(5) dB from 1 m to 5 m") {
        Deployment d = open_room({20, 20}, {10, -1000}, {{5, 10}});
        d.plan.rooms.clear();
        const double near = evaluate_pixel({6, 10}, d, grid, budget).links[0].snr;
        const double far = evaluate_pixel({10, 10}, d, grid, budget).links[0].snr;
        CHECK(linear_to_db(near / far) == doctest::Approx(20 * std::log10(5.0)).epsilon(1e-9));
        CHECK(evaluate_pixel({6, 10}, d, grid, budget).links[0].bep < evaluate_pixel({10, 10}, d, grid, budget).links[0].bep);
    }
    SUBCASE("a beacon the BS cannot reach is never decodable") {
        Deployment d = open_room({10, 10}, {5, -10}, {{5, 5}});
        d.plan.walls = {wall({0, 0}, {10, 0}, 400.0)};
        const ZedLinkQuality q = evaluate_pixel({5, 7}, d, grid, budget).links[0];
        CHECK(q.snr == 0.0);
        CHECK(q.bep == 0.5);
    }
    SUBCASE("longer bits keep the SNR and lower the BEP") {
        Deployment d = open_room({10, 10}, {5, -1000}, {{5, 5}});
        SystemParams two = params;
        two.n_tti = 2;
        const PilotGrid grid2 = build_pilot_grid(two);
        const ZedLinkQuality a = evaluate_pixel({8, 8}, d, grid, budget).links[0];
        const ZedLinkQuality b = evaluate_pixel({8, 8}, d, grid2, budget).links[0];
        CHECK(b.snr == doctest::Approx(a.snr).epsilon(1e-12));
        CHECK(b.bep < a.bep);
        CHECK(b.bep == doctest::Approx(analytic_bep_from_snr(a.snr, 2 * grid.size())).epsilon(1e-9));
    }
    SUBCASE("clamp flag near a beacon") {
        Deployment d = open_room({10, 10}, {5, -10}, {{5, 5}});
        const PixelEvaluation e = evaluate_pixel({5.05, 5}, d, grid, budget);
        CHECK(e.clamped);
        CHECK(std::isfinite(e.links[0].snr));
        CHECK_FALSE(evaluate_pixel({6, 5}, d, grid, budget).clamped);
    }
    CHECK_THROWS_AS(evaluate_pixel({-1, 0}, corridor(20), grid, budget), ValidationError);
}

TEST_CASE("sweep geometry and degenerate deployments") {
    const SystemParams params;
    const PilotGrid grid = build_pilot_grid(params);
    const LinkBudget budget = derive_link_budget(params);

    SUBCASE("pixel centres tile the bounds") {
        Deployment d = open_room({2.0, 1.0}, {1, -10}, {{1, 0.5}});
        d.params.pixel_size = 0.4;
        const CoverageMap map = sweep(d, grid, budget);
        CHECK(map.nx == 5);
        CHECK(map.ny == 3);
        CHECK(map.cell(0, 0).center.x == doctest::Approx(0.2));
        CHECK(map.cell(4, 2).center.y == doctest::Approx(1.0));
        CHECK(map.n_pilots == grid.size());
    }
    SUBCASE("no beacons means nothing is covered") {
        Deployment d = open_room({4, 4}, {2, -10}, {});
        d.params.n_zed = 127;
        d.enforce_count = false;
        const CoverageMap map = sweep(d, grid, budget);
        CHECK(map.cells.size() == static_cast<std::size_t>(map.nx * map.ny));
        for (const CoverageCell& c : map.cells) {
            CHECK_FALSE(c.covered);
            CHECK(c.snr.empty());
        }
        CHECK_FALSE(room_accuracy(map, d.plan).accuracy.has_value());
    }
    SUBCASE("ties go to the lowest id") {
        Deployment d = open_room({4, 2}, {2, -100}, {{1, 1}, {3, 1}});
        std::swap(d.beacons[0].id, d.beacons[1].id);
        d.beacons[0].codeword = encode_id(d.beacons[0].id, 7);
        d.beacons[1].codeword = encode_id(d.beacons[1].id, 7);
        d.params.pixel_size = 1.0;
        const CoverageMap map = sweep(d, grid, budget, direct_only());
        CHECK(map.beacons.front().id == 1);
        CHECK(map.beacons.front().position.x == 3);
    }
}

TEST_CASE("sweep matches independent per-pixel evaluation") {
    Deployment d = four_room(1.0);
    const PilotGrid grid = build_pilot_grid(d.params);
    const LinkBudget budget = derive_link_budget(d.params);
    const CoverageMap map = sweep(d, grid, budget, PropagationOptions{2, -180, 0.1, 2});
    REQUIRE(map.nx == 16);
    REQUIRE(map.ny == 16);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(0, 15);
    for (int trial = 0; trial < 12; ++trial) {
        const int ix = pick(rng);
        const int iy = pick(rng);
        const CoverageCell& cell = map.cell(ix, iy);
        const PixelEvaluation e = evaluate_pixel(cell.center, d, grid, budget);
        for (const ZedLinkQuality& q : e.links) {
            const std::size_t k = map.beacon_index(q.id);
            CHECK(cell.snr[k] == doctest::Approx(q.snr).epsilon(1e-12));
            CHECK(cell.bep[k] == doctest::Approx(q.bep).epsilon(1e-12));
        }
        CHECK(cell.room == d.plan.room_at(cell.center));
    }
}

TEST_CASE("coverage area") {
    const SystemParams params;
    const PilotGrid grid = build_pilot_grid(params);
    const LinkBudget budget = derive_link_budget(params);

    SUBCASE("shadowed beacon covers nothing") {
        Deployment d = open_room({4, 4}, {2, -10}, {{2, 2}, {3, 3}});
        d.plan.walls = {wall({0, 2.5}, {4, 2.5}, 400.0)};
        d.params.pixel_size = 0.5;
        const CoverageMap map = sweep(d, grid, budget, direct_only());
        CHECK(coverage_area(map, 2).pixels == 0);
        CHECK(coverage_area(map, 2, 0.5).pixels == 0);
        CHECK(coverage_area(map, 1).pixels > 0);
    }
    SUBCASE("a lenient threshold admits every illuminated pixel") {
        Deployment d = open_room({4, 4}, {2, -1000}, {{2, 2}});
        d.params.pixel_size = 0.5;
        const CoverageMap map = sweep(d, grid, budget);
        CHECK(coverage_area(map, 1, 0.5).pixels == map.cells.size());
        CHECK(coverage_area(map, 1, 0.5).area_m2 == doctest::Approx(16.0));
    }
    SUBCASE("coverage nests in threshold and bit length") {
        Deployment d = four_room(1.0);
        const std::vector<int> ntti{1, 2, 3, 6};
        const NttiComparison cmp = compare_ntti(d, ntti, derive_link_budget(d.params));
        for (const ZedBeacon& b : cmp.maps.front().beacons) {
            for (std::size_t j = 1; j < cmp.maps.size(); ++j) {
                const auto lo = coverage_mask(cmp.maps[j - 1], b.id, 0.01);
                const auto hi = coverage_mask(cmp.maps[j], b.id, 0.01);
                for (std::size_t i = 0; i < lo.size(); ++i) CHECK((!lo[i] || hi[i]));
            }
            const auto strict = coverage_mask(cmp.maps.front(), b.id, 1e-3);
            const auto loose = coverage_mask(cmp.maps.front(), b.id, 1e-2);
            for (std::size_t i = 0; i < strict.size(); ++i) CHECK((!strict[i] || loose[i]));
        }
    }
}

TEST_CASE("room accuracy") {
    const SystemParams params;
    const PilotGrid grid = build_pilot_grid(params);

    SUBCASE("symmetric rooms are perfectly separated") {
        const Deployment d = corridor(0.0);
        const CoverageMap map = sweep(d, grid, derive_link_budget(d.params), direct_only());
        const RoomAccuracy acc = room_accuracy(map, d.plan);
        REQUIRE(acc.evaluated == 8);
        CHECK(*acc.accuracy == 1.0);
    }
    SUBCASE("a partition inside a room misassigns one pixel") {
        const Deployment d = corridor(20.0);
        const CoverageMap map = sweep(d, grid, derive_link_budget(d.params), direct_only());
        const RoomAccuracy acc = room_accuracy(map, d.plan);
        REQUIRE(acc.evaluated == 8);
        CHECK(acc.correct == 7);
        CHECK(*acc.accuracy == doctest::Approx(7.0 / 8.0));
        CHECK(map.cell(3, 0).best_zed == 2);
    }
    SUBCASE("covered pixels outside every room are set aside") {
        Deployment d = corridor(0.0);
        d.plan.rooms.pop_back();
        const CoverageMap map = sweep(d, grid, derive_link_budget(d.params), direct_only());
        const RoomAccuracy acc = room_accuracy(map, d.plan);
        CHECK(acc.evaluated == 4);
        CHECK(acc.outside_rooms == 4);
    }
    SUBCASE("nothing covered") {
        Deployment d = corridor(0.0);
        d.bs = {4, -1e7};
        const CoverageMap map = sweep(d, grid, derive_link_budget(d.params), direct_only());
        CHECK_FALSE(room_accuracy(map, d.plan).accuracy.has_value());
    }
}

TEST_CASE("coverage across bit lengths") {
    SUBCASE("four-room fixture grows with N_TTI") {
        const Deployment d = four_room(1.0);
        const std::vector<int> ntti{1, 2, 3, 6};
        const CaTable t = compare_ntti(d, ntti, derive_link_budget(d.params)).table;
        REQUIRE(t.ids.size() == 4);
        bool grew = false;
        for (const auto& row : t.pixels) {
            for (std::size_t j = 1; j < row.size(); ++j) {
                CHECK(row[j] >= row[j - 1]);
                grew = grew || row[j] > row[j - 1];
            }
        }
        CHECK(grew);
        CHECK(t.pixel_area == 1.0);
    }
    SUBCASE("a saturated room stays constant") {
        Deployment d = open_room({2, 2}, {1, -10}, {{1, 1}});
        d.params.pixel_size = 0.5;
        const std::vector<int> ntti{1, 2, 6};
        const CaTable t = compare_ntti(d, ntti, derive_link_budget(d.params)).table;
        CHECK(t.pixels[0] == std::vector<std::size_t>{16, 16, 16});
    }
}

TEST_CASE("maps depend on p_u and n0 only through their ratio") {
    Deployment d = four_room(2.0);
    const PilotGrid grid = build_pilot_grid(d.params);
    const LinkBudget base = derive_link_budget(d.params);
    const LinkBudget scaled{base.p_u * 1e3, base.n0 * 1e3};
    const CoverageMap a = sweep(d, grid, base);
    const CoverageMap b = sweep(d, grid, scaled);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].best_zed == b.cells[i].best_zed);
        for (std::size_t k = 0; k < a.beacons.size(); ++k)
            CHECK(b.cells[i].snr[k] == doctest::Approx(a.cells[i].snr[k]).epsilon(1e-12));
    }
}

TEST_CASE("placement ranking by BS illumination") {
    const SystemParams params;
    const PilotGrid grid = build_pilot_grid(params);
    FloorPlan plan;
    plan.bounds = {{0, 0}, {10, 10}};
    plan.walls = {wall({0, 6}, {10, 6}, 30.0)};
    const std::vector<Vec2> candidates{{5, 8}, {5, 2}, {5, 5}, {9, 9}};
    const auto order = rank_by_illumination(plan, {5, -5}, candidates, grid, params.f0);
    CHECK(order == std::vector<std::size_t>{1, 2, 0, 3});
}
