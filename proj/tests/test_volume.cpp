#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "segrad/volume.hpp"

using namespace segrad;
using segrad::test::grid;

TEST_CASE("grid indexing runs axis 0 fastest") {
    const Grid3 g = grid(3, 4, 5, {0.5, 1, 2}, {10, 20, 30});
    CHECK(g.linear(1, 2, 3) == 1 + 3 * (2 + 4 * 3));
    const Index3 idx = g.unravel(g.linear(2, 3, 4));
    CHECK(idx == Index3{2, 3, 4});
    const Vec3 p = g.physical(2, 3, 4);
    CHECK(p[0] == 11.0);
    CHECK(p[1] == 23.0);
    CHECK(p[2] == 38.0);
    CHECK(g.voxel_volume() == 1.0);
}

TEST_CASE("grid validation") {
    Grid3 g = grid(2, 2, 2);
    g.spacing[1] = 0;
    CHECK_THROWS_AS(g.validate(), Error);
    g = grid(2, 2, 2);
    g.dims[2] = 0;
    CHECK_THROWS_AS(g.validate(), Error);
    g = grid(2, 2, 2);
    g.direction[0] = 2;
    CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("image rejects non-finite values and size mismatch") {
    const Grid3 g = grid(2, 1, 1);
    CHECK_THROWS_AS(ScalarVolume(g, std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(ScalarVolume(g, std::vector<double>{1.0, std::nan("")}), Error);
}

TEST_CASE("resample: constant stays constant") {
    const ScalarVolume v(grid(7, 5, 3, {0.7, 1.3, 2.9}), 42.5);
    for (Vec3 s : {Vec3{2, 2, 2}, Vec3{0.3, 0.9, 1.7}, Vec3{5, 1, 0.5}}) {
        const ScalarVolume r = resample(v, s);
        for (double x : r.values()) CHECK(x == doctest::Approx(42.5).epsilon(1e-14));
    }
}

TEST_CASE("resample: ramp midpoint is interpolated linearly") {
    const ScalarVolume v(grid(2, 1, 1), std::vector<double>{0.0, 10.0});
    const ScalarVolume r = resample(v, {0.5, 1, 1});
    REQUIRE(r.grid().dims == Index3{4, 1, 1});
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 5.0);
    CHECK(r[2] == 10.0);
    CHECK(r[3] == 10.0);  // edge clamp
}

TEST_CASE("resample: own grid is bit-identical and idempotent") {
    std::mt19937_64 rng(3);
    const ScalarVolume v = test::random_volume(grid(6, 5, 4, {1.5, 1.5, 2.5}), rng);
    CHECK(resample(v, v.grid().spacing) == v);
    const ScalarVolume once = resample(v, {2, 2, 2});
    const ScalarVolume twice = resample(once, {2, 2, 2});
    REQUIRE(twice.grid().dims == once.grid().dims);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::abs(twice[i] - once[i]) <= 1e-12);
}

TEST_CASE("resample: output grid covers the input extent") {
    const Grid3 g = resampled_grid(grid(5, 3, 1, {0.7, 0.7, 3.0}, {1, 2, 3}), {2, 2, 2});
    CHECK(g.dims == Index3{2, 2, 2});  // ceil(3.5/2), ceil(2.1/2), ceil(3/2)
    CHECK(g.origin == Vec3{1, 2, 3});
    CHECK(g.voxel_volume() == 8.0);
}

TEST_CASE("resample: nearest mode only emits input values") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(0, 4);
    ScalarVolume v(grid(9, 7, 5, {0.8, 0.9, 1.7}), 0.0);
    std::set<double> seen;
    for (double& x : v.values()) {
        x = 10.0 * pick(rng);
        seen.insert(x);
    }
    const ScalarVolume r = resample(v, {2, 2, 2}, Interpolation::Nearest);
    for (double x : r.values()) CHECK(seen.count(x) == 1);
}

TEST_CASE("resample: masks stay binary") {
    const LabelMask m = test::ellipsoid_mask(grid(20, 20, 20, {0.9, 0.9, 1.1}), {6, 5, 4});
    const LabelMask r = resample(m, {2, 2, 2});
    for (auto x : r.values()) CHECK((x == 0 || x == 1));
    CHECK(count_inside(r) > 0);
}

TEST_CASE("resample: invalid spacing is a configuration error") {
    const ScalarVolume v(grid(2, 2, 2), 1.0);
    try {
        resample(v, {0, 1, 1});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
}

TEST_CASE("discretize: fixed bin width examples") {
    const Grid3 g = grid(4, 1, 1);
    const LabelMask all(g, 1);
    SUBCASE("values 0, 24, 25, 74") {
        const auto d = discretize(ScalarVolume(g, std::vector<double>{0, 24, 25, 74}), all, 25);
        CHECK(d.num_levels == 3);
        CHECK(std::vector<int>(d.levels.values().begin(), d.levels.values().end()) == std::vector<int>{1, 1, 2, 3});
    }
    SUBCASE("negative minimum") {
        const Grid3 g2 = grid(2, 1, 1);
        const auto d = discretize(ScalarVolume(g2, std::vector<double>{-30, 0}), LabelMask(g2, 1), 25);
        CHECK(d.levels[0] == 1);
        CHECK(d.levels[1] == 3);
        CHECK(d.num_levels == 3);
    }
    SUBCASE("constant") {
        const auto d = discretize(ScalarVolume(g, 17.0), all, 25);
        CHECK(d.num_levels == 1);
        for (int l : d.levels.values()) CHECK(l == 1);
    }
}

TEST_CASE("discretize: errors") {
    const Grid3 g = grid(3, 1, 1);
    const ScalarVolume v(g, 1.0);
    CHECK_THROWS_AS(discretize(v, LabelMask(g, 0), 25), Error);
    try {
        discretize(v, LabelMask(g, 0), 25);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyRoi);
    }
    try {
        discretize(v, LabelMask(grid(4, 1, 1), 1), 25);
        FAIL("expected geometry error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Geometry);
    }
}

TEST_CASE("discretize: histogram sums to ROI size and shift by multiples of w is invisible") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid3 g = grid(6, 6, 4);
        const ScalarVolume v = test::random_volume(g, rng, -500, 500);
        std::bernoulli_distribution coin(0.6);
        LabelMask m(g, 0);
        for (auto& x : m.values()) x = coin(rng);
        m[0] = 1;
        const auto d = discretize(v, m, 25);
        std::size_t in = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!m[i]) continue;
            ++in;
            CHECK(d.levels[i] >= 1);
            CHECK(d.levels[i] <= d.num_levels);
        }
        CHECK(in == count_inside(m));
        const int shift = std::uniform_int_distribution<int>(-20, 20)(rng);
        ScalarVolume shifted = v;
        for (double& x : shifted.values()) x += 25.0 * shift;
        CHECK(discretize(shifted, m, 25).levels == d.levels);
    }
}

TEST_CASE("bounding box, expand and crop") {
    const Grid3 g = grid(10, 8, 6, {1, 2, 3}, {5, 5, 5});
    const LabelMask m = test::mask_where(g, [](auto i, auto j, auto k) { return i >= 3 && i <= 5 && j == 4 && k >= 1 && k <= 2; });
    const auto box = bounding_box(m);
    REQUIRE(box);
    CHECK(box->lo == Index3{3, 4, 1});
    CHECK(box->hi == Index3{5, 4, 2});
    const Box3 e = expand(*box, 2, g.dims);
    CHECK(e.lo == Index3{1, 2, 0});
    CHECK(e.hi == Index3{7, 6, 4});
    const LabelMask c = crop(m, e);
    CHECK(c.grid().dims == Index3{7, 5, 5});
    CHECK(c.grid().origin == Vec3{6, 9, 5});
    CHECK(count_inside(c) == count_inside(m));
    CHECK_FALSE(bounding_box(LabelMask(g, 0)));
}
