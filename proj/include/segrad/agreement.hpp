#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "segrad/volume.hpp"

namespace segrad {

/// Dice similarity 2|A∩B| / (|A| + |B|). Throws Error{Undefined} when both masks are empty.
double dsc(const LabelMask& a, const LabelMask& b);

struct CccResult {
    double value = 0.0;
    bool degenerate = false;  // both sequences constant
};

/// Lin's concordance correlation coefficient with population (1/n) moments.
CccResult ccc(std::span<const double> x, std::span<const double> y);

/// n targets (rows) x k raters (columns), row-major.
class RatingsMatrix {
public:
    RatingsMatrix(std::size_t targets, std::size_t raters, std::vector<double> values);

    std::size_t targets() const noexcept { return n_; }
    std::size_t raters() const noexcept { return k_; }
    double operator()(std::size_t target, std::size_t rater) const noexcept { return values_[target * k_ + rater]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<double> values_;
};

/// Two-way ANOVA mean squares for a complete ratings matrix.
struct AnovaTable {
    double ms_rows = 0.0;     // MSR, targets
    double ms_columns = 0.0;  // MSC, raters
    double ms_error = 0.0;    // MSE, residual
    double ms_within = 0.0;   // MSW, pooled within-target (one-way model)
    std::size_t n = 0;
    std::size_t k = 0;
};

AnovaTable two_way_anova(const RatingsMatrix& ratings);

enum class IccModel {
    Icc1_1,  // one-way random, single rater
    Icc2_1,  // two-way random, absolute agreement, single rater
    Icc3_1,  // two-way mixed, consistency, single rater
};

std::string to_string(IccModel model);
IccModel parse_icc_model(const std::string& s);

struct IccResult {
    double icc = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    /// All cells equal (MSR = MSC = MSE = 0): icc reported as 1.
    bool degenerate = false;
};

/// ICC with confidence bounds at `confidence` (McGraw & Wong / Shrout & Fleiss forms).
IccResult icc(const RatingsMatrix& ratings, IccModel model = IccModel::Icc2_1, double confidence = 0.95);

inline IccResult icc2_1(const RatingsMatrix& ratings, double confidence = 0.95) {
    return icc(ratings, IccModel::Icc2_1, confidence);
}

/// k x k symmetric matrix of pairwise ICCs with a unit diagonal.
class PairwiseIccMatrix {
public:
    explicit PairwiseIccMatrix(std::size_t k);

    std::size_t size() const noexcept { return k_; }
    const IccResult& operator()(std::size_t i, std::size_t j) const noexcept { return cells_[i * k_ + j]; }
    void set(std::size_t i, std::size_t j, const IccResult& r);

    /// Smallest off-diagonal ICC among non-degenerate pairs; nullopt-like NaN when none.
    double min_off_diagonal() const noexcept;
    /// Row-major ICC values (for export).
    std::vector<double> icc_values() const;

private:
    std::size_t k_;
    std::vector<IccResult> cells_;
};

/// Pairwise ICC over the columns of an n x k ratings matrix: entry (i, j) is the ICC of the n x 2 submatrix.
PairwiseIccMatrix pairwise_icc(const RatingsMatrix& ratings, IccModel model = IccModel::Icc2_1,
                               double confidence = 0.95);

enum class Metric { Icc, Dsc };

/// ICC: poor < 0.5 <= moderate < 0.75 <= good < 0.9 <= excellent. DSC: good if > 0.7, else poor.
std::string classify(Metric metric, double value);

}  // namespace segrad
