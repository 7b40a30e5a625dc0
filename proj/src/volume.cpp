#include "segrad/volume.hpp"

#include <algorithm>
#include <limits>

namespace segrad {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config: return "configuration error";
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::EmptyRoi: return "empty ROI";
        case ErrorKind::Geometry: return "geometry error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Format: return "format error";
        case ErrorKind::Corruption: return "corrupt data";
        case ErrorKind::Io: return "I/O error";
        case ErrorKind::Validation: return "validation error";
        case ErrorKind::Incomplete: return "incomplete input";
        case ErrorKind::Undefined: return "undefined result";
    }
    return "error";
}

void Grid3::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] < 1) throw Error(ErrorKind::InvalidInput, "grid dimension must be >= 1");
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
            throw Error(ErrorKind::Config, "grid spacing must be positive and finite");
        if (!std::isfinite(origin[a])) throw Error(ErrorKind::InvalidInput, "grid origin must be finite");
        if (direction[a] != 1 && direction[a] != -1)
            throw Error(ErrorKind::Geometry, "direction signs must be +1 or -1");
    }
}

bool Grid3::same_geometry(const Grid3& other, double tol) const noexcept {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] != other.dims[a] || direction[a] != other.direction[a]) return false;
        if (std::abs(spacing[a] - other.spacing[a]) > tol) return false;
        if (std::abs(origin[a] - other.origin[a]) > tol) return false;
    }
    return true;
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* context) {
    if (!a.same_geometry(b)) throw Error(ErrorKind::Geometry, std::string(context) + ": grids differ");
}

std::size_t count_inside(const LabelMask& mask) noexcept {
    return static_cast<std::size_t>(
        std::count_if(mask.values().begin(), mask.values().end(), [](std::uint8_t v) { return v != 0; }));
}

Grid3 resampled_grid(const Grid3& grid, const Vec3& target_spacing) {
    grid.validate();
    for (double s : target_spacing) {
        if (!(s > 0.0) || !std::isfinite(s))
            throw Error(ErrorKind::Config, "target spacing must be positive");
    }
    Grid3 out = grid;
    out.spacing = target_spacing;
    for (int a = 0; a < 3; ++a) {
        double extent = static_cast<double>(grid.dims[a]) * grid.spacing[a] / target_spacing[a];
        out.dims[a] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(extent - 1e-9)));
    }
    return out;
}

namespace {

// Sample position along one axis: lower index, upper index, fraction toward upper.
struct AxisSample {
    std::size_t lo;
    std::size_t hi;
    double frac;
};

std::vector<AxisSample> axis_samples(std::size_t n_in, std::size_t n_out, double ratio,
                                     Interpolation mode) {
    std::vector<AxisSample> out(n_out);
    const double last = static_cast<double>(n_in - 1);
    for (std::size_t o = 0; o < n_out; ++o) {
        double pos = static_cast<double>(o) * ratio;
        pos = std::clamp(pos, 0.0, last);
        if (mode == Interpolation::Nearest) {
            auto idx = static_cast<std::size_t>(std::floor(pos + 0.5));
            idx = std::min(idx, n_in - 1);
            out[o] = {idx, idx, 0.0};
            continue;
        }
        auto lo = static_cast<std::size_t>(std::floor(pos));
        lo = std::min(lo, n_in - 1);
        std::size_t hi = std::min(lo + 1, n_in - 1);
        double frac = pos - static_cast<double>(lo);
        if (hi == lo) frac = 0.0;
        out[o] = {lo, hi, frac};
    }
    return out;
}

template <typename T, typename Out>
std::vector<Out> resample_values(const Image<T>& in, const Grid3& out_grid, Interpolation mode) {
    const Grid3& g = in.grid();
    std::array<std::vector<AxisSample>, 3> axes;
    for (int a = 0; a < 3; ++a) {
        double ratio = out_grid.spacing[a] / g.spacing[a];
        axes[a] = axis_samples(g.dims[a], out_grid.dims[a], ratio, mode);
    }
    std::vector<Out> values(out_grid.voxel_count());
    std::size_t idx = 0;
    for (std::size_t k = 0; k < out_grid.dims[2]; ++k) {
        const AxisSample& sk = axes[2][k];
        for (std::size_t j = 0; j < out_grid.dims[1]; ++j) {
            const AxisSample& sj = axes[1][j];
            for (std::size_t i = 0; i < out_grid.dims[0]; ++i, ++idx) {
                const AxisSample& si = axes[0][i];
                if constexpr (std::is_floating_point_v<Out>) {
                    // Zero-weight terms are skipped so exact grid hits reproduce inputs bit-for-bit.
                    auto along_i = [&](std::size_t jj, std::size_t kk) {
                        double v = static_cast<double>(in.at(si.lo, jj, kk));
                        if (si.frac == 0.0) return v;
                        return v * (1.0 - si.frac) + static_cast<double>(in.at(si.hi, jj, kk)) * si.frac;
                    };
                    auto along_j = [&](std::size_t kk) {
                        double v = along_i(sj.lo, kk);
                        if (sj.frac == 0.0) return v;
                        return v * (1.0 - sj.frac) + along_i(sj.hi, kk) * sj.frac;
                    };
                    double v = along_j(sk.lo);
                    if (sk.frac != 0.0) v = v * (1.0 - sk.frac) + along_j(sk.hi) * sk.frac;
                    values[idx] = static_cast<Out>(v);
                } else {
                    values[idx] = static_cast<Out>(in.at(si.lo, sj.lo, sk.lo));
                }
            }
        }
    }
    return values;
}

}  // namespace

ScalarVolume resample(const ScalarVolume& volume, const Vec3& target_spacing, Interpolation mode) {
    if (volume.empty()) throw Error(ErrorKind::InvalidInput, "cannot resample an empty volume");
    Grid3 out = resampled_grid(volume.grid(), target_spacing);
    return ScalarVolume(out, resample_values<double, double>(volume, out, mode));
}

LabelMask resample(const LabelMask& mask, const Vec3& target_spacing) {
    if (mask.empty()) throw Error(ErrorKind::InvalidInput, "cannot resample an empty mask");
    Grid3 out = resampled_grid(mask.grid(), target_spacing);
    return LabelMask(out, resample_values<std::uint8_t, std::uint8_t>(mask, out, Interpolation::Nearest));
}

std::optional<Box3> bounding_box(const LabelMask& mask) noexcept {
    const Grid3& g = mask.grid();
    Box3 box{{g.dims[0], g.dims[1], g.dims[2]}, {0, 0, 0}};
    bool any = false;
    for (std::size_t idx = 0; idx < mask.size(); ++idx) {
        if (!mask[idx]) continue;
        any = true;
        Index3 p = g.unravel(idx);
        for (int a = 0; a < 3; ++a) {
            box.lo[a] = std::min(box.lo[a], p[a]);
            box.hi[a] = std::max(box.hi[a], p[a]);
        }
    }
    if (!any) return std::nullopt;
    return box;
}

Box3 expand(const Box3& box, std::size_t margin, const Index3& dims) noexcept {
    Box3 out;
    for (int a = 0; a < 3; ++a) {
        out.lo[a] = box.lo[a] > margin ? box.lo[a] - margin : 0;
        out.hi[a] = std::min(box.hi[a] + margin, dims[a] - 1);
    }
    return out;
}

DiscretizedVolume discretize(const ScalarVolume& volume, const LabelMask& mask, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw Error(ErrorKind::Config, "bin width must be positive");
    require_same_grid(volume.grid(), mask.grid(), "discretize");
    double min_value = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < mask.size(); ++idx) {
        if (mask[idx]) min_value = std::min(min_value, volume[idx]);
    }
    if (!std::isfinite(min_value)) throw Error(ErrorKind::EmptyRoi, "discretize: mask is empty");

    const double base = std::floor(min_value / bin_width);
    DiscretizedVolume out;
    out.bin_width = bin_width;
    out.levels = Image<int>(volume.grid(), 0);
    for (std::size_t idx = 0; idx < mask.size(); ++idx) {
        if (!mask[idx]) continue;
        int level = static_cast<int>(std::floor(volume[idx] / bin_width) - base) + 1;
        out.levels[idx] = level;
        out.num_levels = std::max(out.num_levels, level);
    }
    return out;
}

}  // namespace segrad
