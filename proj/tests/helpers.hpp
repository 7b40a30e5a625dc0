#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "segrad/volume.hpp"

namespace segrad::test {

inline Grid3 grid(std::size_t nx, std::size_t ny, std::size_t nz, Vec3 spacing = {1, 1, 1}, Vec3 origin = {0, 0, 0}) {
    Grid3 g;
    g.dims = {nx, ny, nz};
    g.spacing = spacing;
    g.origin = origin;
    return g;
}

inline LabelMask mask_where(const Grid3& g, const std::function<bool(std::size_t, std::size_t, std::size_t)>& inside) {
    LabelMask m(g, 0);
    for (std::size_t k = 0; k < g.dims[2]; ++k)
        for (std::size_t j = 0; j < g.dims[1]; ++j)
            for (std::size_t i = 0; i < g.dims[0]; ++i) m.at(i, j, k) = inside(i, j, k) ? 1 : 0;
    return m;
}

inline ScalarVolume volume_from(const Grid3& g, const std::function<double(std::size_t, std::size_t, std::size_t)>& f) {
    ScalarVolume v(g, 0.0);
    for (std::size_t k = 0; k < g.dims[2]; ++k)
        for (std::size_t j = 0; j < g.dims[1]; ++j)
            for (std::size_t i = 0; i < g.dims[0]; ++i) v.at(i, j, k) = f(i, j, k);
    return v;
}

inline ScalarVolume random_volume(const Grid3& g, std::mt19937_64& rng, double lo = -100, double hi = 100) {
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarVolume v(g, 0.0);
    for (double& x : v.values()) x = u(rng);
    return v;
}

/// Voxels whose centers fall inside the ellipsoid with the given semi-axes (mm), centered in the grid.
inline LabelMask ellipsoid_mask(const Grid3& g, const Vec3& semi_axes) {
    Vec3 c;
    for (int a = 0; a < 3; ++a) c[a] = 0.5 * static_cast<double>(g.dims[a] - 1) * g.spacing[a];
    return mask_where(g, [&](std::size_t i, std::size_t j, std::size_t k) {
        const double x = (static_cast<double>(i) * g.spacing[0] - c[0]) / semi_axes[0];
        const double y = (static_cast<double>(j) * g.spacing[1] - c[1]) / semi_axes[1];
        const double z = (static_cast<double>(k) * g.spacing[2] - c[2]) / semi_axes[2];
        return x * x + y * y + z * z <= 1.0;
    });
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("segrad_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace segrad::test
