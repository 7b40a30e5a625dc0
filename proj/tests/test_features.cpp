#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "segrad/features.hpp"

using namespace segrad;
using segrad::test::grid;

namespace {

const FeatureValue& named(const NamedValues& v, const std::string& name) {
    for (const auto& [n, x] : v)
        if (n == name) return x;
    FAIL("missing feature " << name);
    throw std::logic_error("unreachable");
}

DiscretizedVolume levels_2x2(std::vector<int> levels) {
    const Grid3 g = grid(2, 2, 1);
    DiscretizedVolume dv;
    dv.levels = Image<int>(g, std::move(levels));
    dv.num_levels = *std::max_element(dv.levels.values().begin(), dv.levels.values().end());
    dv.bin_width = 25;
    return dv;
}

// Textbook GLDM by direct enumeration, independent of the library's matrix code.
std::map<std::string, double> gldm_oracle(const DiscretizedVolume& dv, const LabelMask& mask, double alpha, int delta) {
    const Grid3& g = dv.levels.grid();
    std::map<std::pair<int, int>, double> P;
    double nz = 0;
    const long d = delta;
    for (long k = 0; k < static_cast<long>(g.dims[2]); ++k)
        for (long j = 0; j < static_cast<long>(g.dims[1]); ++j)
            for (long i = 0; i < static_cast<long>(g.dims[0]); ++i) {
                if (!mask.at(i, j, k)) continue;
                const int level = dv.levels.at(i, j, k);
                int dep = 1;
                for (long dk = -d; dk <= d; ++dk)
                    for (long dj = -d; dj <= d; ++dj)
                        for (long di = -d; di <= d; ++di) {
                            if (di == 0 && dj == 0 && dk == 0) continue;
                            const long a = i + di, b = j + dj, c = k + dk;
                            if (a < 0 || b < 0 || c < 0 || a >= static_cast<long>(g.dims[0]) ||
                                b >= static_cast<long>(g.dims[1]) || c >= static_cast<long>(g.dims[2]))
                                continue;
                            if (!mask.at(a, b, c)) continue;
                            if (std::abs(dv.levels.at(a, b, c) - level) <= alpha) ++dep;
                        }
                P[{level, dep}] += 1;
                nz += 1;
            }
    std::map<int, double> by_level, by_dep;
    std::map<std::string, double> f;
    for (const auto& [ij, p] : P) {
        const double i = ij.first, j = ij.second;
        by_level[ij.first] += p;
        by_dep[ij.second] += p;
        f["SmallDependenceEmphasis"] += p / (j * j) / nz;
        f["LargeDependenceEmphasis"] += p * j * j / nz;
        f["LowGrayLevelEmphasis"] += p / (i * i) / nz;
        f["HighGrayLevelEmphasis"] += p * i * i / nz;
        f["SmallDependenceLowGrayLevelEmphasis"] += p / (i * i * j * j) / nz;
        f["DependenceEntropy"] -= (p / nz) * std::log2(p / nz);
    }
    for (const auto& [i, s] : by_level) f["GrayLevelNonUniformity"] += s * s / nz;
    for (const auto& [j, s] : by_dep) f["DependenceNonUniformity"] += s * s / nz;
    return f;
}

}  // namespace

TEST_CASE("feature keys flatten and parse back") {
    const FeatureKey k{"log-sigma-1", FeatureClass::FirstOrder, "Mean"};
    CHECK(k.column() == "log-sigma-1_firstorder_Mean");
    CHECK(FeatureKey::parse(k.column()) == k);
    CHECK(FeatureKey::parse("original_gldm_SmallDependenceLowGrayLevelEmphasis").name ==
          "SmallDependenceLowGrayLevelEmphasis");
    CHECK_THROWS_AS(FeatureKey::parse("original_Mean"), Error);
    CHECK_THROWS_AS(FeatureKey::parse("original_glcm_Contrast"), Error);
    CHECK(log_image_type(1.0) == "log-sigma-1");
    CHECK(log_image_type(1.5) == "log-sigma-1.5");
    CHECK(wavelet_image_type(SubBand::parse("LLH")) == "wavelet-LLH");
}

TEST_CASE("feature vector keeps insertion order and rejects duplicates") {
    FeatureVector v;
    v.add({"original", FeatureClass::Shape, "B"}, {1});
    v.add({"original", FeatureClass::Shape, "A"}, {2});
    CHECK(v.keys()[0].name == "B");
    CHECK_THROWS_AS(v.add({"original", FeatureClass::Shape, "A"}, {3}), Error);
    CHECK(v.at({"original", FeatureClass::Shape, "A"}).value == 2);
    CHECK_THROWS_AS(v.at({"original", FeatureClass::Shape, "C"}), Error);
}

TEST_CASE("GLDM: 2x2 slice with one odd level") {
    const auto dv = levels_2x2({1, 1, 1, 2});
    const LabelMask mask(dv.levels.grid(), 1);
    const auto [m, f] = gldm_features(dv, mask, 0.0, 1);
    CHECK(m.max_dependence == 27);
    CHECK(m.voxel_count == 4);
    CHECK(m.at(1, 3) == 3);
    CHECK(m.at(2, 1) == 1);
    CHECK(named(f, "SmallDependenceLowGrayLevelEmphasis").value == 7.0 / 48.0);
}

TEST_CASE("GLDM: uniform 2x2 slice and single voxel") {
    const auto dv = levels_2x2({1, 1, 1, 1});
    const auto [m, f] = gldm_features(dv, LabelMask(dv.levels.grid(), 1), 0.0, 1);
    CHECK(m.at(1, 4) == 4);
    CHECK(named(f, "SmallDependenceLowGrayLevelEmphasis").value == 1.0 / 16.0);

    LabelMask one(dv.levels.grid(), 0);
    one[0] = 1;
    const auto [m1, f1] = gldm_features(dv, one, 0.0, 1);
    CHECK(m1.at(1, 1) == 1);
    CHECK(named(f1, "SmallDependenceLowGrayLevelEmphasis").value == 1.0);
}

TEST_CASE("GLDM: matches brute-force enumeration on random volumes") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const Grid3 g = grid(5 + trial % 3, 4 + trial % 4, 3 + trial % 2, {1.0, 0.8, 2.0});
        const ScalarVolume v = test::random_volume(g, rng, -60, 140);
        std::bernoulli_distribution coin(0.7);
        LabelMask mask(g, 0);
        for (auto& x : mask.values()) x = coin(rng);
        mask[0] = 1;
        const double alpha = trial % 3 == 0 ? 1.0 : 0.0;
        const int delta = trial % 4 == 0 ? 2 : 1;
        const auto dv = discretize(v, mask, 25);
        const auto [m, f] = gldm_features(dv, mask, alpha, delta);
        std::uint64_t total = 0;
        for (auto c : m.counts) total += c;
        CHECK(total == count_inside(mask));
        const auto oracle = gldm_oracle(dv, mask, alpha, delta);
        for (const auto& [name, value] : f) {
            INFO(name);
            CHECK(value.value == doctest::Approx(oracle.at(name)).epsilon(1e-12));
        }
        const double sdlgle = named(f, "SmallDependenceLowGrayLevelEmphasis").value;
        CHECK(sdlgle > 0.0);
        CHECK(sdlgle <= 1.0);

        // shifting intensities by whole bins leaves every GLDM feature unchanged
        ScalarVolume shifted = v;
        for (double& x : shifted.values()) x += 25.0 * 7;
        const auto [m2, f2] = gldm_features(discretize(shifted, mask, 25), mask, alpha, delta);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(f2[i].second.value == f[i].second.value);
    }
}

TEST_CASE("first order: two voxels") {
    const Grid3 g = grid(2, 1, 1, {2, 2, 2});
    const ExtractionConfig cfg;
    const auto f = firstorder_features(ScalarVolume(g, std::vector<double>{3, 4}), LabelMask(g, 1), cfg);
    CHECK(named(f, "Energy").value == 25.0);
    CHECK(named(f, "TotalEnergy").value == 200.0);
    CHECK(named(f, "Mean").value == 3.5);
    CHECK(named(f, "Median").value == 3.5);
    CHECK(named(f, "Range").value == 1.0);
    CHECK(named(f, "Variance").value == 0.25);
    CHECK(named(f, "Skewness").value == doctest::Approx(0.0));
    CHECK(named(f, "Kurtosis").value == doctest::Approx(1.0));
    CHECK(named(f, "Entropy").value == 0.0);  // both values share one 25-wide bin
    CHECK(named(f, "Uniformity").value == 1.0);
}

TEST_CASE("first order: constant ROI") {
    const Grid3 g = grid(3, 3, 3, {0.5, 0.7, 1.9});
    const double c = 0.1;
    const auto f = firstorder_features(ScalarVolume(g, c), LabelMask(g, 1), ExtractionConfig{});
    CHECK(named(f, "TotalEnergy").value == doctest::Approx(27 * c * c * g.voxel_volume()).epsilon(1e-14));
    CHECK(named(f, "Variance").value == 0.0);
    CHECK(named(f, "Mean").value == c);
    CHECK(named(f, "Skewness").degenerate);
    CHECK(named(f, "Kurtosis").degenerate);
    CHECK_FALSE(named(f, "Mean").degenerate);
}

TEST_CASE("first order: moments against a direct oracle, energy scaling") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const Grid3 g = grid(7, 6, 5, {1.1, 0.9, 2.3});
        const ScalarVolume v = test::random_volume(g, rng, -300, 300);
        std::bernoulli_distribution coin(0.5);
        LabelMask mask(g, 0);
        for (auto& x : mask.values()) x = coin(rng);
        mask[3] = 1;
        mask[4] = 1;
        ExtractionConfig cfg;
        const auto f = firstorder_features(v, mask, cfg);

        std::vector<double> x;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (mask[i]) x.push_back(v[i]);
        const double n = static_cast<double>(x.size());
        double mean = 0;
        for (double a : x) mean += a / n;
        double m2 = 0, m3 = 0, m4 = 0, e = 0;
        for (double a : x) {
            m2 += std::pow(a - mean, 2) / n;
            m3 += std::pow(a - mean, 3) / n;
            m4 += std::pow(a - mean, 4) / n;
            e += a * a;
        }
        CHECK(named(f, "Mean").value == doctest::Approx(mean).epsilon(1e-12));
        CHECK(named(f, "Variance").value == doctest::Approx(m2).epsilon(1e-12));
        CHECK(named(f, "Skewness").value == doctest::Approx(m3 / std::pow(m2, 1.5)).epsilon(1e-10));
        CHECK(named(f, "Kurtosis").value == doctest::Approx(m4 / (m2 * m2)).epsilon(1e-10));
        CHECK(named(f, "Energy").value == doctest::Approx(e).epsilon(1e-12));
        CHECK(named(f, "TotalEnergy").value == named(f, "Energy").value * g.voxel_volume());

        ScalarVolume doubled = v;
        for (double& a : doubled.values()) a *= 2;
        const auto f2 = firstorder_features(doubled, mask, cfg);
        CHECK(named(f2, "Energy").value == 4 * named(f, "Energy").value);
        CHECK(named(f2, "TotalEnergy").value == 4 * named(f, "TotalEnergy").value);
    }
}

TEST_CASE("first order: energy shift") {
    const Grid3 g = grid(2, 1, 1);
    ExtractionConfig cfg;
    cfg.energy_shift = 1.0;
    const auto f = firstorder_features(ScalarVolume(g, std::vector<double>{3, 4}), LabelMask(g, 1), cfg);
    CHECK(named(f, "Energy").value == 41.0);
}

TEST_CASE("shape: digital cube mesh matches the analytic marching-cubes surface") {
    const Grid3 g = grid(24, 24, 24);
    const LabelMask cube = test::mask_where(g, [](auto i, auto j, auto k) {
        return i >= 2 && i < 22 && j >= 2 && j < 22 && k >= 2 && k < 22;
    });
    // Flat faces 19x19, chamfered edges of width sqrt(1/2), corner triangles of area sqrt(3)/8.
    const double area = 6 * 361.0 + 12 * 19 * std::sqrt(0.5) + std::sqrt(3.0);
    const double volume = 8000.0 - 12 * 19 * 0.125 - 8 * (0.125 - 0.125 / 6.0);
    const MeshMeasures mm = mesh_measures(cube);
    CHECK(mm.surface_area == doctest::Approx(area).epsilon(1e-12));
    CHECK(mm.volume == doctest::Approx(volume).epsilon(1e-12));

    const auto f = shape_features(cube);
    CHECK(named(f, "VoxelVolume").value == 8000.0);
    const double sphericity = std::cbrt(std::numbers::pi) * std::pow(6 * volume, 2.0 / 3.0) / area;
    CHECK(named(f, "Sphericity").value == doctest::Approx(sphericity).epsilon(1e-12));
    CHECK(named(f, "Elongation").value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(named(f, "Flatness").value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("shape: ellipsoid 30/20/10 mm against a moment oracle") {
    const Grid3 g = grid(66, 46, 26);
    const LabelMask m = test::ellipsoid_mask(g, {30, 20, 10});
    // Axis-aligned and centred, so the covariance is diagonal: per-axis variances are the moments.
    std::array<double, 3> sum{}, sum2{};
    double n = 0;
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
        if (!m[idx]) continue;
        const Index3 p = g.unravel(idx);
        for (int a = 0; a < 3; ++a) {
            sum[a] += static_cast<double>(p[a]);
            sum2[a] += static_cast<double>(p[a]) * static_cast<double>(p[a]);
        }
        n += 1;
    }
    std::array<double, 3> var{};
    for (int a = 0; a < 3; ++a) var[a] = sum2[a] / n - (sum[a] / n) * (sum[a] / n);
    const auto lambda = principal_moments(m);
    for (int a = 0; a < 3; ++a) CHECK(lambda[a] == doctest::Approx(var[a]).epsilon(1e-9));

    const auto f = shape_features(m);
    CHECK(named(f, "Elongation").value == doctest::Approx(std::sqrt(var[1] / var[0])).epsilon(1e-9));
    CHECK(named(f, "Flatness").value == doctest::Approx(std::sqrt(var[2] / var[0])).epsilon(1e-9));
    CHECK(std::abs(named(f, "Elongation").value - 2.0 / 3.0) <= 0.03);
    CHECK(std::abs(named(f, "Flatness").value - 1.0 / 3.0) <= 0.03);
    const double s = named(f, "Sphericity").value;
    CHECK(s > 0.0);
    CHECK(s <= 1.02);
}

TEST_CASE("shape: sphere mesh converges toward the analytic sphere") {
    const Grid3 g = grid(44, 44, 44);
    const LabelMask m = test::ellipsoid_mask(g, {20, 20, 20});
    const MeshMeasures mm = mesh_measures(m);
    const double v = 4.0 / 3.0 * std::numbers::pi * 8000;
    CHECK(std::abs(mm.volume - v) / v < 0.01);
    const auto f = shape_features(m);
    CHECK(named(f, "Sphericity").value <= 1.0);
    CHECK(named(f, "Sphericity").value > 0.85);
}

TEST_CASE("shape: translation and 90-degree rotation invariance") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        // random blob: union of a few balls
        const Grid3 g = grid(18, 18, 18);
        std::uniform_real_distribution<double> c(6, 11), r(2, 5);
        std::vector<std::array<double, 4>> balls;
        for (int b = 0; b < 4; ++b) balls.push_back({c(rng), c(rng), c(rng), r(rng)});
        auto inside = [&](double x, double y, double z) {
            for (const auto& b : balls)
                if ((x - b[0]) * (x - b[0]) + (y - b[1]) * (y - b[1]) + (z - b[2]) * (z - b[2]) <= b[3] * b[3])
                    return true;
            return false;
        };
        const LabelMask m = test::mask_where(g, [&](auto i, auto j, auto k) {
            return inside(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
        });
        const auto base = shape_features(m);

        const Grid3 big = grid(25, 23, 21, {1, 1, 1}, {-40, 12.5, 3});
        const LabelMask moved = test::mask_where(big, [&](auto i, auto j, auto k) {
            return i >= 4 && j >= 2 && k >= 1 && i - 4 < 18 && j - 2 < 18 && k - 1 < 18 && m.at(i - 4, j - 2, k - 1);
        });
        // rotation by 90 degrees about axis 2: (i, j) -> (j, 17 - i)
        const LabelMask rotated = test::mask_where(g, [&](auto i, auto j, auto k) { return m.at(17 - j, i, k) != 0; });
        // axis permutation (i, j, k) -> (k, i, j)
        const LabelMask permuted = test::mask_where(g, [&](auto i, auto j, auto k) { return m.at(j, k, i) != 0; });

        for (const LabelMask* other : {&moved, &rotated, &permuted}) {
            const auto f = shape_features(*other);
            for (std::size_t i = 0; i < base.size(); ++i) {
                INFO(base[i].first);
                CHECK(std::abs(f[i].second.value - base[i].second.value) <= 1e-9 * std::max(1.0, std::abs(base[i].second.value)));
            }
        }
    }
}

TEST_CASE("shape: single voxel and empty mask") {
    const Grid3 g = grid(3, 3, 3);
    LabelMask one(g, 0);
    one.at(1, 1, 1) = 1;
    const auto f = shape_features(one);
    CHECK(named(f, "VoxelVolume").value == 1.0);
    CHECK(named(f, "Elongation").degenerate);
    CHECK(named(f, "Flatness").degenerate);
    CHECK(named(f, "MeshVolume").value > 0.0);
    try {
        shape_features(LabelMask(g, 0));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyRoi);
    }
}

TEST_CASE("extract_all: configuration contract") {
    const Grid3 g = grid(30, 30, 30, {1, 1, 1});
    std::mt19937_64 rng(1);
    const ScalarVolume image = test::random_volume(g, rng, 0, 200);
    const LabelMask mask = test::ellipsoid_mask(g, {8, 6, 5});

    ExtractionConfig shape_only;
    shape_only.firstorder = shape_only.gldm = false;
    shape_only.log_sigmas.clear();
    shape_only.wavelet_bands.clear();
    const FeatureVector fv = extract_all(image, mask, shape_only);
    std::vector<std::string> names;
    for (const auto& [k, v] : fv) {
        CHECK(k.image_type == "original");
        CHECK(k.feature_class == FeatureClass::Shape);
        names.push_back(k.name);
    }
    CHECK(names == std::vector<std::string>{"VoxelVolume", "MeshVolume", "SurfaceArea", "Sphericity", "Elongation",
                                            "Flatness"});

    const FeatureVector full = extract_all(image, mask, ExtractionConfig{});
    CHECK(full.size() == 6 + 10 * (12 + 8));
    for (const auto& [k, v] : full) {
        if (k.feature_class == FeatureClass::Shape) CHECK(k.image_type == "original");
        CHECK(std::isfinite(v.value));
    }
    CHECK(full.find({"wavelet-HLH", FeatureClass::Gldm, "SmallDependenceLowGrayLevelEmphasis"}) != nullptr);
    CHECK(full.find({"log-sigma-1", FeatureClass::FirstOrder, "TotalEnergy"}) != nullptr);
    // Resampled to 2 mm: each voxel counts 8 mm^3.
    CHECK(std::fmod(full.at({"original", FeatureClass::Shape, "VoxelVolume"}).value, 8.0) == 0.0);
}

TEST_CASE("extract_all: empty ROI is reported with its stage") {
    const Grid3 g = grid(10, 10, 10);
    const ScalarVolume image(g, 1.0);
    try {
        extract_all(image, LabelMask(g, 0), ExtractionConfig{});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyRoi);
    }
    // A single voxel that nearest-neighbour resampling drops.
    LabelMask tiny(g, 0);
    tiny.at(1, 1, 1) = 1;
    try {
        extract_all(image, tiny, ExtractionConfig{});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyRoi);
        CHECK(std::string(e.what()).find("resampl") != std::string::npos);
    }
}

TEST_CASE("extract_all: intensity doubling keeps shape, quadruples energy") {
    const Grid3 g = grid(24, 24, 24, {1.5, 1.5, 1.5});
    std::mt19937_64 rng(12);
    const ScalarVolume image = test::random_volume(g, rng, 0, 100);
    ScalarVolume doubled = image;
    for (double& x : doubled.values()) x *= 2;
    const LabelMask mask = test::ellipsoid_mask(g, {9, 7, 6});
    ExtractionConfig cfg;
    cfg.log_sigmas.clear();
    cfg.wavelet_bands.clear();
    const auto a = extract_all(image, mask, cfg);
    const auto b = extract_all(doubled, mask, cfg);
    for (const auto& [k, v] : a) {
        if (k.feature_class == FeatureClass::Shape) CHECK(b.at(k).value == v.value);
        if (k.name == "Energy" || k.name == "TotalEnergy") CHECK(b.at(k).value == 4 * v.value);
    }
}
