#include "segrad/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "segrad/io.hpp"

namespace segrad {

namespace fs = std::filesystem;

void PhantomParams::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Domain, "phantom: " + m); };
    if (n < 2) fail("n must be at least 2");
    if (k < 2) fail("k must be at least 2");
    if (families < 1 || families > k) fail("families must lie in 1..k");
    for (std::size_t d : dims)
        if (d < 16) fail("each grid dimension must be at least 16");
    for (double s : spacing)
        if (!(s > 0) || !std::isfinite(s)) fail("spacing must be positive");
    for (double v : {boundary_noise_mm, dilation_mm, member_jitter, member_noise, retest_shift_mm, image_noise_sd})
        if (!(v >= 0) || !std::isfinite(v)) fail("perturbation scales must be finite and non-negative");
    if (!(rounding >= 0 && rounding <= 1)) fail("rounding must lie in [0, 1]");
}

std::size_t phantom_family(const PhantomParams& params, std::size_t j) {
    return (j - 1) * params.families / params.k;
}

namespace {

using Rng = std::mt19937_64;

Vec3 voxel_position(const Grid3& grid, std::size_t i) {
    const Index3 idx = grid.unravel(i);
    return grid.physical(static_cast<double>(idx[0]), static_cast<double>(idx[1]), static_cast<double>(idx[2]));
}

Rng make_rng(std::uint64_t seed, std::uint64_t patient, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(patient), static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Sum of plane waves, scaled to roughly [-1, 1].
struct WaveField {
    struct Wave {
        Vec3 k;
        double phase;
    };
    std::vector<Wave> waves;

    WaveField() = default;
    WaveField(Rng& rng, std::size_t count, double min_wavelength, double max_wavelength) {
        for (std::size_t i = 0; i < count; ++i) {
            // random direction on the sphere
            const double z = uniform(rng, -1.0, 1.0);
            const double phi = uniform(rng, 0.0, 2 * std::numbers::pi);
            const double r = std::sqrt(1 - z * z);
            const double wl = uniform(rng, min_wavelength, max_wavelength);
            const double f = 2 * std::numbers::pi / wl;
            waves.push_back({{f * r * std::cos(phi), f * r * std::sin(phi), f * z}, uniform(rng, 0.0, 2 * std::numbers::pi)});
        }
    }

    double operator()(const Vec3& x) const {
        if (waves.empty()) return 0.0;
        double s = 0.0;
        for (const Wave& w : waves) s += std::sin(w.k[0] * x[0] + w.k[1] * x[1] + w.k[2] * x[2] + w.phase);
        return s * std::sqrt(2.0 / static_cast<double>(waves.size()));
    }
};

struct Ellipsoid {
    Vec3 center;
    Vec3 axes;

    /// First-order signed distance (mm), negative inside.
    double distance(const Vec3& p) const {
        double rho2 = 0.0;
        double grad2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double d = p[a] - center[a];
            rho2 += d * d / (axes[a] * axes[a]);
            grad2 += d * d / (axes[a] * axes[a] * axes[a] * axes[a]);
        }
        const double rho = std::sqrt(rho2);
        if (grad2 <= 0.0) return -*std::min_element(axes.begin(), axes.end());
        return (rho - 1.0) * rho / std::sqrt(grad2);
    }

    Ellipsoid shifted(const Vec3& s) const { return {{center[0] + s[0], center[1] + s[1], center[2] + s[2]}, axes}; }

    Ellipsoid rounded(double t) const {
        const double g = std::cbrt(axes[0] * axes[1] * axes[2]);
        Ellipsoid out = *this;
        for (int a = 0; a < 3; ++a) out.axes[a] = std::pow(axes[a], 1.0 - t) * std::pow(g, t);
        return out;
    }
};

struct PatientModel {
    Ellipsoid tumour;
    double background = 0.0;
    double tumour_mean = 0.0;
    double texture_amplitude = 0.0;
    WaveField texture;
    WaveField background_texture;
    Vec3 retest_shift{};
};

PatientModel draw_patient(Rng& rng, const PhantomParams& params, const Grid3& grid) {
    PatientModel m;
    const double r0 = uniform(rng, 7.0, 11.0);
    std::array<double, 3> axes{r0 * uniform(rng, 1.0, 1.9), r0, r0 / uniform(rng, 1.0, 1.7)};
    std::shuffle(axes.begin(), axes.end(), rng);
    for (int a = 0; a < 3; ++a) {
        const double mid = grid.origin[a] + 0.5 * static_cast<double>(grid.dims[a] - 1) * grid.spacing[a];
        m.tumour.center[a] = mid + uniform(rng, -2.0, 2.0);
        m.tumour.axes[a] = axes[a];
    }
    m.background = uniform(rng, 10.0, 50.0);
    m.tumour_mean = uniform(rng, 70.0, 170.0);
    m.texture_amplitude = uniform(rng, 10.0, 45.0);
    m.texture = WaveField(rng, 6, 4.0, 14.0);
    m.background_texture = WaveField(rng, 4, 10.0, 30.0);
    const double z = uniform(rng, -1.0, 1.0);
    const double phi = uniform(rng, 0.0, 2 * std::numbers::pi);
    const double r = std::sqrt(1 - z * z);
    m.retest_shift = {params.retest_shift_mm * r * std::cos(phi), params.retest_shift_mm * r * std::sin(phi),
                      params.retest_shift_mm * z};
    return m;
}

// The tumour edge is a 0.5 mm logistic ramp so the retest shift moves intensities smoothly.
ScalarVolume render_scan(const Grid3& grid, const PatientModel& m, const Vec3& shift, double noise_sd, Rng& rng) {
    std::normal_distribution<double> noise(0.0, 1.0);
    const Ellipsoid tumour = m.tumour.shifted(shift);
    std::vector<double> values(grid.voxel_count());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Vec3 p = voxel_position(grid, i);
        const Vec3 local{p[0] - shift[0], p[1] - shift[1], p[2] - shift[2]};
        const double bg = m.background + 8.0 * m.background_texture(local);
        const double inside = 1.0 / (1.0 + std::exp(tumour.distance(p) / 0.5));
        const double fg = m.tumour_mean + m.texture_amplitude * m.texture(local);
        values[i] = std::round(bg + inside * (fg - bg) + noise_sd * noise(rng));
    }
    return ScalarVolume(grid, std::move(values));
}

template <typename Inside>
LabelMask render_mask(const Grid3& grid, Inside&& inside) {
    std::vector<std::uint8_t> values(grid.voxel_count());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = inside(voxel_position(grid, i)) ? 1 : 0;
    return LabelMask(grid, std::move(values));
}

// Family A's boundary field is shared by its members (one tool's systematic behaviour);
// every member adds its own weaker field on top.
LabelMask render_member(const Grid3& grid, const PatientModel& m, const PhantomParams& params, std::size_t family,
                        const WaveField& family_field, Rng& rng) {
    const std::size_t op = family % 3;
    const double strength = 1.0 + static_cast<double>(family / 3);
    const double jitter = 1.0 + params.member_jitter * uniform(rng, -1.0, 1.0);
    const WaveField own(rng, 8, 8.0, 20.0);
    const double member_amp = params.boundary_noise_mm * params.member_noise;
    switch (op) {
        case 0: {
            const double amp = params.boundary_noise_mm * strength * jitter;
            return render_mask(grid, [&](const Vec3& p) {
                return m.tumour.distance(p) < amp * family_field(p) + member_amp * own(p);
            });
        }
        case 1: {
            const double offset = params.dilation_mm * strength * jitter;
            return render_mask(grid, [&](const Vec3& p) { return m.tumour.distance(p) < offset + member_amp * own(p); });
        }
        default: {
            const Ellipsoid round = m.tumour.rounded(std::min(1.0, params.rounding * strength * jitter));
            return render_mask(grid, [&](const Vec3& p) { return round.distance(p) < member_amp * own(p); });
        }
    }
}

}  // namespace

CohortManifest generate_phantom_cohort(const PhantomParams& params, std::uint64_t seed, const fs::path& out_dir) {
    params.validate();
    Grid3 grid;
    grid.dims = params.dims;
    grid.spacing = params.spacing;
    grid.validate();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());

    const WriteOptions scan_options{ElementType::Int16, true};
    const int width = std::max<int>(2, static_cast<int>(std::to_string(params.n).size()));
    CohortManifest manifest;
    manifest.k = params.k;
    for (std::size_t p = 0; p < params.n; ++p) {
        PatientEntry e;
        e.id = fmt::format("P{:0{}}", p + 1, width);
        const fs::path dir = out_dir / e.id;
        fs::create_directories(dir, ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

        Rng model_rng = make_rng(seed, p, 0);
        const PatientModel model = draw_patient(model_rng, params, grid);

        Rng scan1_rng = make_rng(seed, p, 1);
        Rng scan2_rng = make_rng(seed, p, 2);
        e.scan1 = dir / "scan1.nrrd";
        e.scan2 = dir / "scan2.nrrd";
        write_nrrd(e.scan1, render_scan(grid, model, {0, 0, 0}, params.image_noise_sd, scan1_rng), scan_options);
        write_nrrd(*e.scan2, render_scan(grid, model, model.retest_shift, params.image_noise_sd, scan2_rng),
                   scan_options);

        e.reference_segmentation = dir / "reference.nrrd";
        e.retest_segmentation = dir / "retest.nrrd";
        write_nrrd(*e.reference_segmentation,
                   render_mask(grid, [&](const Vec3& x) { return model.tumour.distance(x) < 0; }), true);
        const Ellipsoid moved = model.tumour.shifted(model.retest_shift);
        write_nrrd(*e.retest_segmentation, render_mask(grid, [&](const Vec3& x) { return moved.distance(x) < 0; }),
                   true);

        for (std::size_t j = 1; j <= params.k; ++j) {
            const std::size_t family = phantom_family(params, j);
            Rng family_rng = make_rng(seed, p, 50 + family);
            const WaveField family_field(family_rng, 8, 8.0, 20.0);
            Rng member_rng = make_rng(seed, p, 100 + j);
            const fs::path path = dir / fmt::format("seg{}.nrrd", j);
            write_nrrd(path, render_member(grid, model, params, family, family_field, member_rng), true);
            e.segmentations.push_back(path);
        }
        manifest.patients.push_back(std::move(e));
    }
    write_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

}  // namespace segrad
