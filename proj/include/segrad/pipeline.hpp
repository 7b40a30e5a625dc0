#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segrad/agreement.hpp"
#include "segrad/table.hpp"

namespace segrad {

struct PatientEntry {
    std::string id;
    std::filesystem::path scan1;
    std::optional<std::filesystem::path> scan2;
    /// Contour on scan 1 used for test-retest features.
    std::optional<std::filesystem::path> reference_segmentation;
    /// Contour on scan 2; falls back to reference_segmentation when absent.
    std::optional<std::filesystem::path> retest_segmentation;
    std::vector<std::filesystem::path> segmentations;
};

struct CohortManifest {
    std::vector<PatientEntry> patients;
    std::size_t k = 0;
    /// Optional label value selecting the ROI in segmentation files (nonzero when unset).
    std::optional<int> mask_label;

    std::size_t n() const noexcept { return patients.size(); }
};

/// Runs extract_all on every (patient, scan, segmentation) in the manifest.
/// Rows: (id, 1, 0) reference, (id, 2, 0) retest, (id, 1, j) for j = 1..k.
/// Work fans out over `threads` workers; row order is manifest order regardless.
FeatureTable cohort_extract(const CohortManifest& manifest, const ExtractionConfig& config, unsigned threads = 1);

/// n x k ratings of `feature` over scan-1 segmentations 1..k. Throws Error{Incomplete} naming the first gap.
RatingsMatrix segmentation_ratings(const FeatureTable& table, const FeatureKey& feature);

PairwiseIccMatrix pairwise_icc(const FeatureTable& table, const FeatureKey& feature,
                               IccModel model = IccModel::Icc2_1);

struct FeatureSelection {
    FeatureKey key;
    std::optional<CccResult> ccc;
    std::optional<IccResult> overall_icc;
    std::optional<double> min_pairwise_icc;
    /// Constant feature column; ranked last.
    bool degenerate = false;
    bool selected = false;
};

struct SelectionReport {
    double threshold = 0.0;
    std::vector<FeatureSelection> features;
    /// Ranked keys (ascending min pairwise ICC) for sensitivity reports; empty for CCC selection.
    std::vector<FeatureKey> ranking;

    std::vector<FeatureKey> selected_keys() const;
    const FeatureSelection* find(const FeatureKey& key) const noexcept;
};

/// Per-feature CCC between the two scans over patients; keeps CCC strictly above `threshold`.
/// Each table holds one row per patient (matched by id).
SelectionReport reproducibility_select(const FeatureTable& scan1, const FeatureTable& scan2, double threshold = 0.93);

/// Splits a cohort table into its (scan 1, reference) and (scan 2, retest) halves.
std::pair<FeatureTable, FeatureTable> test_retest_tables(const FeatureTable& table);

/// Overall ICC on the n x k matrix and min pairwise ICC per feature; ranking = top_m by ascending min ICC,
/// degenerate columns last.
SelectionReport sensitivity_rank(const FeatureTable& table, std::span<const FeatureKey> selected,
                                 std::size_t top_m = 7, IccModel model = IccModel::Icc2_1);

/// Copies CCC values from a reproducibility report into matching features of `report`.
void attach_ccc(SelectionReport& report, const SelectionReport& reproducibility);

/// k x k matrix of DSC values; flagged cells are undefined (both masks empty).
struct DscMatrix {
    std::size_t k = 0;
    std::vector<double> values;
    std::vector<bool> flagged;

    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * k + j]; }
    double min_off_diagonal() const noexcept;
};

DscMatrix dsc_matrix(std::span<const LabelMask> masks);

struct CohortDsc {
    std::vector<std::string> patients;
    std::vector<DscMatrix> per_patient;
    /// Elementwise mean over patients (flagged cells excluded per element).
    DscMatrix mean;
};

CohortDsc cohort_dsc(const CohortManifest& manifest, unsigned threads = 1);
DscMatrix mean_dsc(std::span<const DscMatrix> matrices);

struct GoldStandardReport {
    std::size_t reference = 1;        // 1-based
    std::vector<std::size_t> others;  // 1-based, ascending
    std::vector<FeatureKey> features;
    std::vector<std::vector<IccResult>> icc;  // [feature][other]
    std::vector<double> average;              // per other, over features
    std::vector<std::string> average_class;   // classify(Icc, average)
    std::vector<bool> flagged;                // average is poor or moderate
};

GoldStandardReport gold_standard_report(const FeatureTable& table, std::size_t reference_index,
                                        std::span<const FeatureKey> features, IccModel model = IccModel::Icc2_1);

}  // namespace segrad
