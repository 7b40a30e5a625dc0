#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "segrad/pipeline.hpp"
#include "segrad/table.hpp"
#include "segrad/volume.hpp"

namespace segrad {

enum class VolumeFormat { Nrrd, Nifti };
enum class ElementType { Int8, UInt8, Int16, UInt16, Int32, Float32, Float64 };

std::string to_string(ElementType t);

struct VolumeFileMeta {
    VolumeFormat format = VolumeFormat::Nrrd;
    ElementType element_type = ElementType::Float32;
    bool gzip = false;
    Vec3 spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};
    std::array<int, 3> direction{1, 1, 1};
    /// NIfTI intensity scaling applied on read (slope 0 means "no scaling").
    double scl_slope = 1.0;
    double scl_inter = 0.0;
};

struct LoadedVolume {
    ScalarVolume volume;
    VolumeFileMeta meta;
};

/// NRRD (raw/gzip, attached data) or NIfTI-1 (.nii/.nii.gz), detected by magic bytes.
LoadedVolume read_volume_file(const std::filesystem::path& path);
ScalarVolume read_volume(const std::filesystem::path& path);

/// Binarizes by nonzero, or by equality with `label` when given.
LabelMask read_mask(const std::filesystem::path& path, std::optional<int> label = std::nullopt);

struct WriteOptions {
    ElementType element_type = ElementType::Float32;
    bool gzip = false;
};

/// Values are rounded when the element type is integral.
void write_nrrd(const std::filesystem::path& path, const ScalarVolume& volume, const WriteOptions& options = {});
void write_nrrd(const std::filesystem::path& path, const LabelMask& mask, bool gzip = false);

/// NIfTI-1 single file; gzip when the path ends in ".gz".
void write_nifti(const std::filesystem::path& path, const ScalarVolume& volume,
                 ElementType element_type = ElementType::Float32);

// --- tables ----------------------------------------------------------------

enum class TableFormat { Csv, Json };

/// CSV: patient,scan,segmentation,<feature columns>; 17 significant digits.
/// JSON: same structure with explicit per-cell degenerate flags.
void write_feature_table(const FeatureTable& table, const std::filesystem::path& path, TableFormat format);

/// Format chosen by extension (.csv / .json).
FeatureTable read_feature_table(const std::filesystem::path& path);

// --- manifest -----------------------------------------------------------------

/// Relative paths resolve against the manifest's directory. With `check_paths`,
/// every referenced file must exist.
CohortManifest read_manifest(const std::filesystem::path& path, bool check_paths = true);

/// Paths are written relative to the manifest directory when they live below it.
void write_manifest(const CohortManifest& manifest, const std::filesystem::path& path);

// --- small helpers shared by writers ------------------------------------------

/// 17 significant digits; round-trips exactly through strtod.
std::string format_real(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace segrad
