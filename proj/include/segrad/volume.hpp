#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "segrad/error.hpp"

namespace segrad {

using Index3 = std::array<std::size_t, 3>;
using Vec3 = std::array<double, 3>;

/// Axis-aligned voxel grid in physical space (mm). Index 0 varies fastest.
struct Grid3 {
    Index3 dims{1, 1, 1};
    Vec3 spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};
    std::array<int, 3> direction{1, 1, 1};

    std::size_t voxel_count() const noexcept { return dims[0] * dims[1] * dims[2]; }
    double voxel_volume() const noexcept { return spacing[0] * spacing[1] * spacing[2]; }

    std::size_t linear(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return i + dims[0] * (j + dims[1] * k);
    }

    Index3 unravel(std::size_t idx) const noexcept {
        return {idx % dims[0], (idx / dims[0]) % dims[1], idx / (dims[0] * dims[1])};
    }

    /// Physical position (mm) of a voxel center.
    Vec3 physical(double i, double j, double k) const noexcept {
        return {origin[0] + direction[0] * i * spacing[0],
                origin[1] + direction[1] * j * spacing[1],
                origin[2] + direction[2] * k * spacing[2]};
    }

    /// Throws Error{Config|InvalidInput} when the grid violates its invariants.
    void validate() const;

    /// True when dims match exactly and spacing/origin agree within `tol` mm.
    bool same_geometry(const Grid3& other, double tol = 1e-6) const noexcept;

    bool operator==(const Grid3&) const = default;
};

template <typename T>
class Image {
public:
    using value_type = T;

    Image() = default;

    explicit Image(const Grid3& grid, T fill = T{})
        : grid_(grid), data_((grid.validate(), grid.voxel_count()), fill) {}

    Image(const Grid3& grid, std::vector<T> data) : grid_(grid), data_(std::move(data)) {
        grid_.validate();
        if (data_.size() != grid_.voxel_count()) {
            throw Error(ErrorKind::InvalidInput,
                        "value count " + std::to_string(data_.size()) + " does not match grid size " +
                            std::to_string(grid_.voxel_count()));
        }
        if constexpr (std::is_floating_point_v<T>) {
            for (T v : data_) {
                if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite voxel value");
            }
        }
    }

    const Grid3& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator[](std::size_t idx) noexcept { return data_[idx]; }
    const T& operator[](std::size_t idx) const noexcept { return data_[idx]; }

    T& at(std::size_t i, std::size_t j, std::size_t k) noexcept { return data_[grid_.linear(i, j, k)]; }
    const T& at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return data_[grid_.linear(i, j, k)];
    }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool operator==(const Image&) const = default;

private:
    Grid3 grid_;
    std::vector<T> data_;
};

/// Intensities (HU for CT). All values finite.
using ScalarVolume = Image<double>;

/// Binary region of interest: nonzero = inside.
using LabelMask = Image<std::uint8_t>;

/// Gray levels 1..num_levels inside the mask, 0 outside.
struct DiscretizedVolume {
    Image<int> levels;
    int num_levels = 0;
    double bin_width = 0.0;
};

enum class Interpolation { Trilinear, Nearest };

/// Closed voxel-index bounding box.
struct Box3 {
    Index3 lo{};
    Index3 hi{};
};

std::size_t count_inside(const LabelMask& mask) noexcept;

/// Grid covering the physical extent of `grid` at `target_spacing`, same origin and direction.
Grid3 resampled_grid(const Grid3& grid, const Vec3& target_spacing);

/// Resample onto the grid from resampled_grid(); edge-clamped sampling.
ScalarVolume resample(const ScalarVolume& volume, const Vec3& target_spacing,
                      Interpolation mode = Interpolation::Trilinear);

/// Masks are always resampled nearest-neighbor.
LabelMask resample(const LabelMask& mask, const Vec3& target_spacing);

/// Bounding box of in-mask voxels, nullopt when empty.
std::optional<Box3> bounding_box(const LabelMask& mask) noexcept;

/// Expand `box` by `margin` voxels per side, clamped to `dims`.
Box3 expand(const Box3& box, std::size_t margin, const Index3& dims) noexcept;

template <typename T>
Image<T> crop(const Image<T>& image, const Box3& box) {
    const Grid3& g = image.grid();
    for (int a = 0; a < 3; ++a) {
        if (box.lo[a] > box.hi[a] || box.hi[a] >= g.dims[a]) {
            throw Error(ErrorKind::Geometry, "crop box outside image extent");
        }
    }
    Grid3 out = g;
    out.dims = {box.hi[0] - box.lo[0] + 1, box.hi[1] - box.lo[1] + 1, box.hi[2] - box.lo[2] + 1};
    out.origin = g.physical(static_cast<double>(box.lo[0]), static_cast<double>(box.lo[1]),
                            static_cast<double>(box.lo[2]));
    std::vector<T> data;
    data.reserve(out.voxel_count());
    for (std::size_t k = box.lo[2]; k <= box.hi[2]; ++k)
        for (std::size_t j = box.lo[1]; j <= box.hi[1]; ++j)
            for (std::size_t i = box.lo[0]; i <= box.hi[0]; ++i) data.push_back(image.at(i, j, k));
    return Image<T>(out, std::move(data));
}

/// Fixed-bin-width discretization:
/// level(x) = floor(x / w) - floor(min_in_mask / w) + 1.
DiscretizedVolume discretize(const ScalarVolume& volume, const LabelMask& mask, double bin_width);

/// Throws Error{Geometry} unless both grids match.
void require_same_grid(const Grid3& a, const Grid3& b, const char* context);

}  // namespace segrad
