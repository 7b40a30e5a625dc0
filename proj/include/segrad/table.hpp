#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "segrad/features.hpp"

namespace segrad {

/// Segmentation index 0 denotes the reference (test-retest) contour; 1..k the compared segmentations.
struct RowKey {
    std::string patient;
    int scan = 1;
    int segmentation = 0;

    auto operator<=>(const RowKey&) const = default;
    bool operator==(const RowKey&) const = default;
};

/// Rectangular (row, feature) table; column order fixed by the first row added.
class FeatureTable {
public:
    FeatureTable() = default;
    explicit FeatureTable(std::vector<FeatureKey> columns) : columns_(std::move(columns)) {}

    void add_row(RowKey key, const FeatureVector& features);
    void add_row(RowKey key, std::vector<FeatureValue> cells);

    const std::vector<FeatureKey>& columns() const noexcept { return columns_; }
    const std::vector<RowKey>& rows() const noexcept { return rows_; }
    std::size_t row_count() const noexcept { return rows_.size(); }
    std::size_t column_count() const noexcept { return columns_.size(); }
    bool empty() const noexcept { return rows_.empty(); }

    const FeatureValue& cell(std::size_t row, std::size_t col) const { return cells_[row * columns_.size() + col]; }
    std::optional<std::size_t> find_row(const RowKey& key) const noexcept;
    std::optional<std::size_t> find_column(const FeatureKey& key) const noexcept;

    /// Rows matching the predicate, same columns.
    template <typename Pred>
    FeatureTable filter(Pred&& keep) const {
        FeatureTable out(columns_);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (!keep(rows_[r])) continue;
            out.rows_.push_back(rows_[r]);
            out.cells_.insert(out.cells_.end(), cells_.begin() + static_cast<std::ptrdiff_t>(r * columns_.size()),
                              cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * columns_.size()));
        }
        return out;
    }

    /// Patient ids in first-appearance order.
    std::vector<std::string> patients() const;
    /// Distinct segmentation indices > 0 for `scan`, ascending.
    std::vector<int> segmentations(int scan = 1) const;

    bool operator==(const FeatureTable&) const = default;

private:
    std::vector<FeatureKey> columns_;
    std::vector<RowKey> rows_;
    std::vector<FeatureValue> cells_;
};

}  // namespace segrad
