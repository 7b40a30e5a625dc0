#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "segrad/filters.hpp"
#include "segrad/volume.hpp"

namespace segrad {

enum class FeatureClass { Shape, FirstOrder, Gldm };

std::string to_string(FeatureClass c);
FeatureClass parse_feature_class(const std::string& s);

/// (image type, feature class, name). Image types: "original", "log-sigma-<s>", "wavelet-<band>".
struct FeatureKey {
    std::string image_type;
    FeatureClass feature_class = FeatureClass::Shape;
    std::string name;

    /// Flattened column name, e.g. "original_shape_Elongation".
    std::string column() const;

    /// Inverse of column(); throws Error{InvalidInput} for malformed names.
    static FeatureKey parse(const std::string& column);

    auto operator<=>(const FeatureKey&) const = default;
    bool operator==(const FeatureKey&) const = default;
};

struct FeatureValue {
    double value = 0.0;
    /// Zero-variance or single-voxel inputs where the formula is 0/0; value is then a placeholder.
    bool degenerate = false;

    bool operator==(const FeatureValue&) const = default;
};

using NamedValues = std::vector<std::pair<std::string, FeatureValue>>;

/// Insertion-ordered feature map with unique keys.
class FeatureVector {
public:
    using Entry = std::pair<FeatureKey, FeatureValue>;

    void add(FeatureKey key, FeatureValue value);
    const FeatureValue* find(const FeatureKey& key) const noexcept;
    const FeatureValue& at(const FeatureKey& key) const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }
    std::vector<FeatureKey> keys() const;

private:
    std::vector<Entry> entries_;
};

inline std::vector<SubBand> all_wavelet_bands() {
    auto all = SubBand::all();
    return {all.begin(), all.end()};
}

struct ExtractionConfig {
    bool resample = true;
    Vec3 resample_spacing{2.0, 2.0, 2.0};
    double bin_width = 25.0;
    /// Margin (voxels) kept around the ROI bounding box before filtering.
    std::size_t crop_margin = 10;

    bool original = true;
    std::vector<double> log_sigmas{1.0};
    std::vector<SubBand> wavelet_bands = all_wavelet_bands();

    bool shape = true;
    bool firstorder = true;
    bool gldm = true;

    double gldm_alpha = 0.0;
    int gldm_delta = 1;
    /// Added to intensities before Energy/TotalEnergy.
    double energy_shift = 0.0;

    void validate() const;
};

std::string log_image_type(double sigma_mm);
std::string wavelet_image_type(SubBand band);

// --- shape ---------------------------------------------------------------

struct MeshMeasures {
    double volume = 0.0;        // mm^3, signed-tetrahedron sum
    double surface_area = 0.0;  // mm^2
    std::size_t triangles = 0;
};

/// Marching cubes on the binary mask at iso-level 0.5 with physical vertex coordinates.
MeshMeasures mesh_measures(const LabelMask& mask);

/// Eigenvalues (descending) of the population covariance of in-mask voxel centers (mm^2).
std::array<double, 3> principal_moments(const LabelMask& mask);

/// VoxelVolume, MeshVolume, SurfaceArea, Sphericity, Elongation, Flatness.
NamedValues shape_features(const LabelMask& mask);

// --- first order -----------------------------------------------------------

/// Energy, TotalEnergy, Mean, Median, Minimum, Maximum, Range, Variance,
/// Skewness, Kurtosis, Entropy, Uniformity. Entropy/Uniformity use the
/// fixed-bin-width histogram.
NamedValues firstorder_features(const ScalarVolume& volume, const LabelMask& mask,
                                const ExtractionConfig& config);

// --- GLDM ----------------------------------------------------------------

struct GldmMatrix {
    int num_levels = 0;       // Ng
    int max_dependence = 0;   // Jmax = (2*delta+1)^3
    std::size_t voxel_count = 0;  // Nz
    double alpha = 0.0;
    int delta = 1;
    std::vector<std::uint64_t> counts;  // row-major Ng x Jmax

    /// 1-based gray level i and dependence j.
    std::uint64_t at(int level, int dependence) const {
        return counts[static_cast<std::size_t>(level - 1) * static_cast<std::size_t>(max_dependence) +
                      static_cast<std::size_t>(dependence - 1)];
    }
};

GldmMatrix gldm_matrix(const DiscretizedVolume& dv, const LabelMask& mask, double alpha, int delta);

/// SmallDependenceEmphasis, LargeDependenceEmphasis, GrayLevelNonUniformity,
/// DependenceNonUniformity, DependenceEntropy, LowGrayLevelEmphasis,
/// HighGrayLevelEmphasis, SmallDependenceLowGrayLevelEmphasis.
NamedValues gldm_features(const GldmMatrix& matrix);

inline std::pair<GldmMatrix, NamedValues> gldm_features(const DiscretizedVolume& dv, const LabelMask& mask,
                                                        double alpha, int delta) {
    GldmMatrix m = gldm_matrix(dv, mask, alpha, delta);
    NamedValues f = gldm_features(m);
    return {std::move(m), std::move(f)};
}

// --- composition ------------------------------------------------------------

/// Resample, crop to the ROI, then shape on the mask plus first-order and GLDM
/// on every enabled image type.
FeatureVector extract_all(const ScalarVolume& image, const LabelMask& mask, const ExtractionConfig& config);

}  // namespace segrad
