#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "mola/energy.hpp"
#include "mola/nucleation.hpp"

using namespace mola;

namespace {

// Independent oracle: enumerate every (cell, direction) edge of the lattice
// and count member edges whose far side is outside the mask or the map.
Geometry geometry_oracle(const RegionMask& mask) {
    Geometry g;
    for (int i = 0; i < mask.rows(); i++) {
        for (int j = 0; j < mask.cols(); j++) {
            if (!mask.at(i, j)) continue;
            g.area++;
            const int ni[4] = {i - 1, i + 1, i, i};
            const int nj[4] = {j, j, j - 1, j + 1};
            for (int k = 0; k < 4; k++) {
                const bool inside = ni[k] >= 0 && ni[k] < mask.rows() && nj[k] >= 0 &&
                                    nj[k] < mask.cols() && mask.at(ni[k], nj[k]);
                if (!inside) g.boundary++;
            }
        }
    }
    return g;
}

RegionMask random_mask(int rows, int cols, double fill, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RegionMask m(rows, cols);
    for (int i = 0; i < rows; i++)
        for (int j = 0; j < cols; j++) m.set(i, j, u(eng) < fill);
    return m;
}

bool empty_mask(const RegionMask& m) {
    for (int i = 0; i < m.rows(); i++)
        for (int j = 0; j < m.cols(); j++)
            if (m.at(i, j)) return false;
    return true;
}

// Uniform background of type 0 with a rectangular incentive of `margin`
// for type 1 inside the mask.
SuitabilityField island_field(int rows, int cols, const RegionMask& mask, double margin) {
    SuitabilityField f(rows, cols, 3);
    for (int i = 0; i < rows; i++)
        for (int j = 0; j < cols; j++)
            if (mask.at(i, j)) f.set(i, j, 1, margin);
    return f;
}

}  // namespace

TEST_CASE("boundary and area of canonical shapes") {
    SUBCASE("single interior parcel") {
        RegionMask m(5, 5);
        m.set(2, 2, true);
        const Geometry g = boundary_and_area(m);
        CHECK(g.boundary == 4);
        CHECK(g.area == 1);
        CHECK(flip_threshold(m, 1.0) == doctest::Approx(4.0));
    }
    SUBCASE("4x4 square: L=16, A=16") {
        const auto m = RegionMask::rectangle(10, 10, 3, 3, 4, 4);
        const Geometry g = boundary_and_area(m);
        CHECK(g.boundary == 16);
        CHECK(g.area == 16);
        CHECK(flip_threshold(m, 1.0) == doctest::Approx(1.0));
    }
    SUBCASE("2x8 strip: same area, longer boundary") {
        const auto m = RegionMask::rectangle(10, 12, 4, 2, 2, 8);
        const Geometry g = boundary_and_area(m);
        CHECK(g.boundary == 20);
        CHECK(g.area == 16);
    }
    SUBCASE("map edges count as exposed") {
        const auto m = RegionMask::rectangle(4, 4, 0, 0, 4, 4);  // fills the map
        const Geometry g = boundary_and_area(m);
        CHECK(g.area == 16);
        CHECK(g.boundary == 16);
    }
    SUBCASE("empty mask is rejected") {
        CHECK_THROWS_AS(boundary_and_area(RegionMask(3, 3)), std::invalid_argument);
    }
    SUBCASE("out-of-bounds rectangle is rejected") {
        CHECK_THROWS_AS(RegionMask::rectangle(5, 5, 3, 3, 4, 4), std::invalid_argument);
    }
}

TEST_CASE("random masks match the edge-enumeration oracle") {
    for (std::uint64_t seed = 0; seed < 50; seed++) {
        const auto m = random_mask(7, 9, 0.4, seed);
        if (empty_mask(m)) continue;
        const Geometry got = boundary_and_area(m);
        const Geometry want = geometry_oracle(m);
        CHECK(got.boundary == want.boundary);
        CHECK(got.area == want.area);
    }
}

TEST_CASE("flip_threshold shrinks as a square droplet grows") {
    double prev = 1e9;
    for (int side = 1; side <= 8; side++) {
        const auto m = RegionMask::rectangle(20, 20, 5, 5, side, side);
        const double thr = flip_threshold(m, 1.0);
        CHECK(thr == doctest::Approx(4.0 / side));
        CHECK(thr < prev);
        prev = thr;
    }
}

TEST_CASE("nucleation_estimate sign logic") {
    const auto m = RegionMask::rectangle(10, 10, 3, 3, 4, 4);  // L=16, A=16
    CHECK(nucleation_estimate(m, 1.0, 1.5).flips);             // 16 - 24 < 0
    CHECK_FALSE(nucleation_estimate(m, 1.0, 0.5).flips);       // 16 - 8 > 0
    const auto edge = nucleation_estimate(m, 1.0, 1.0);        // exactly balanced
    CHECK(edge.delta_f == doctest::Approx(0.0));
    CHECK_FALSE(edge.flips);
}

TEST_CASE("moore pair count matches broken same-type pairs under a flip") {
    SUBCASE("6x6 interior island has 68 boundary pairs") {
        const auto m = RegionMask::rectangle(30, 30, 12, 12, 6, 6);
        CHECK(moore_boundary_pairs(m) == 68);
    }
    SUBCASE("random masks: compactness cost of the flip is 2 per pair") {
        for (std::uint64_t seed = 100; seed < 120; seed++) {
            const auto m = random_mask(8, 8, 0.35, seed);
            if (empty_mask(m)) continue;
            LandUseGrid uniform(8, 8, 3, 0);
            LandUseGrid flipped(8, 8, 3, 0);
            for (int i = 0; i < 8; i++)
                for (int j = 0; j < 8; j++)
                    if (m.at(i, j)) flipped.set(i, j, 1);
            const double d_o1 = compactness_objective(flipped) - compactness_objective(uniform);
            CHECK(d_o1 == doctest::Approx(2.0 * moore_boundary_pairs(m)));
        }
    }
}

TEST_CASE("predict_flashpoint_priority") {
    const auto mask = RegionMask::rectangle(30, 30, 12, 12, 6, 6);
    const PrioritySet base{1.0, 0.0, 1.0};

    SUBCASE("6x6 island at unit margin: P_S* = 2*68/36") {
        const auto field = island_field(30, 30, mask, 1.0);
        const auto p = predict_flashpoint_priority(mask, field, 0, 1, base);
        REQUIRE(p.has_value());
        CHECK(p->boundary == 68);
        CHECK(p->area == 36);
        CHECK(p->margin == doctest::Approx(1.0));
        CHECK(p->p_s_star == doctest::Approx(136.0 / 36.0));
    }
    SUBCASE("prediction is the exact zero crossing of the flip energy") {
        const auto field = island_field(30, 30, mask, 1.0);
        const auto p = predict_flashpoint_priority(mask, field, 0, 1, base);
        REQUIRE(p.has_value());
        LandUseGrid background(30, 30, 3, 0);
        LandUseGrid flipped(30, 30, 3, 0);
        for (int i = 12; i < 18; i++)
            for (int j = 12; j < 18; j++) flipped.set(i, j, 1);
        auto gap = [&](double p_s) {
            const PrioritySet w{1.0, p_s, 1.0};
            return total_energy(flipped, field, w).total - total_energy(background, field, w).total;
        };
        CHECK(gap(p->p_s_star) == doctest::Approx(0.0));
        CHECK(gap(p->p_s_star + 0.01) < 0.0);
        CHECK(gap(p->p_s_star - 0.01) > 0.0);
    }
    SUBCASE("threshold scales inversely with the margin") {
        const auto f1 = island_field(30, 30, mask, 1.0);
        const auto f3 = island_field(30, 30, mask, 3.0);
        const auto p1 = predict_flashpoint_priority(mask, f1, 0, 1, base);
        const auto p3 = predict_flashpoint_priority(mask, f3, 0, 1, base);
        REQUIRE((p1 && p3));
        CHECK(p3->p_s_star == doctest::Approx(p1->p_s_star / 3.0));
    }
    SUBCASE("threshold scales linearly with the compactness priority") {
        const auto field = island_field(30, 30, mask, 1.0);
        const auto p1 = predict_flashpoint_priority(mask, field, 0, 1, base);
        const auto p2 = predict_flashpoint_priority(mask, field, 0, 1, PrioritySet{2.5, 0.0, 1.0});
        REQUIRE((p1 && p2));
        CHECK(p2->p_s_star == doctest::Approx(2.5 * p1->p_s_star));
    }
    SUBCASE("no on-site incentive gives no prediction") {
        const auto field = island_field(30, 30, mask, -0.5);
        CHECK_FALSE(predict_flashpoint_priority(mask, field, 0, 1, base).has_value());
        const SuitabilityField flat(30, 30, 3);
        CHECK_FALSE(predict_flashpoint_priority(mask, flat, 0, 1, base).has_value());
    }
    SUBCASE("four-neighbor mode underestimates the interface of a compact island") {
        const auto field = island_field(30, 30, mask, 1.0);
        const auto moore = predict_flashpoint_priority(mask, field, 0, 1, base, BoundaryMode::moore_pairs);
        const auto four = predict_flashpoint_priority(mask, field, 0, 1, base, BoundaryMode::four_neighbor);
        REQUIRE((moore && four));
        CHECK(four->boundary == 24);
        CHECK(four->p_s_star < moore->p_s_star);
    }
    SUBCASE("bad type pairs are rejected") {
        const auto field = island_field(30, 30, mask, 1.0);
        CHECK_THROWS_AS(predict_flashpoint_priority(mask, field, 1, 1, base), std::invalid_argument);
        CHECK_THROWS_AS(predict_flashpoint_priority(mask, field, 0, 3, base), std::invalid_argument);
    }
}
