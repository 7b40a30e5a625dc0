#pragma once

#include <cstdint>
#include <filesystem>

#include "segrad/pipeline.hpp"

namespace segrad {

/// Synthetic stand-in for a test-retest cohort with k segmentations from a few method families.
/// Segmentations are assigned to families in contiguous blocks: 1..k/f family A, then B, then C.
/// Family operators: A = smooth boundary noise, B = dilation, C = rounding toward an equal-volume
/// sphere. Families beyond three reuse the operators at increased strength.
struct PhantomParams {
    std::size_t n = 10;
    std::size_t k = 9;
    std::size_t families = 3;

    Index3 dims{64, 64, 64};
    Vec3 spacing{1.0, 1.0, 1.0};

    double boundary_noise_mm = 1.2;  // family A amplitude of the smooth radial displacement
    double dilation_mm = 1.5;        // family B outward offset
    double rounding = 0.6;           // family C: 0 keeps the ellipsoid, 1 gives the sphere
    /// Relative spread of each member's operator strength around its family value.
    double member_jitter = 0.1;
    /// Independent boundary noise added to every member, as a fraction of boundary_noise_mm.
    double member_noise = 0.25;

    double retest_shift_mm = 0.6;
    double image_noise_sd = 12.0;

    void validate() const;
};

/// Writes scan1/scan2 volumes and all masks as gzip NRRD under out_dir, plus out_dir/manifest.json.
/// Output bytes depend only on params and seed.
CohortManifest generate_phantom_cohort(const PhantomParams& params, std::uint64_t seed,
                                       const std::filesystem::path& out_dir);

/// 0-based family of 1-based segmentation index j.
std::size_t phantom_family(const PhantomParams& params, std::size_t j);

}  // namespace segrad
