#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "segrad/pipeline.hpp"

namespace segrad {

/// CSV (one line per feature) and a JSON twin with full precision and flags.
void write_selection_report(const SelectionReport& report, const std::filesystem::path& csv_path,
                            const std::filesystem::path& json_path);

/// Mean matrix as CSV; JSON holds mean plus per-patient matrices and flags.
void write_cohort_dsc(const CohortDsc& dsc, const std::filesystem::path& csv_path,
                      const std::filesystem::path& json_path);

void write_gold_standard(const GoldStandardReport& report, const std::filesystem::path& csv_path,
                         const std::filesystem::path& json_path);

/// Square matrix for CSV and heatmap output; NaN marks undefined cells.
struct SquareMatrix {
    std::size_t k = 0;
    std::vector<double> values;  // row-major
    std::string title;

    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * k + j]; }
};

SquareMatrix to_square(const PairwiseIccMatrix& m, std::string title = {});
SquareMatrix to_square(const DscMatrix& m, std::string title = {});

/// Header "segmentation,1..k", then one row per segmentation.
std::string matrix_csv(const SquareMatrix& m);
SquareMatrix parse_matrix_csv(const std::string& text);

/// Cell colors interpolate linearly in RGB from kRampLow at 0 to kRampHigh at 1.
/// Values are clamped into [0, 1] for color only; the printed number is unclamped.
inline constexpr const char* kRampLow = "#f7fbff";
inline constexpr const char* kRampHigh = "#08306b";
std::string ramp_color(double v);
std::string heatmap_svg(const SquareMatrix& m);

/// Writes <base>.csv and <base>.svg.
void heatmap_export(const SquareMatrix& m, const std::filesystem::path& base);

}  // namespace segrad
