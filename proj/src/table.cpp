#include "segrad/table.hpp"

#include <algorithm>
#include <set>

namespace segrad {

void FeatureTable::add_row(RowKey key, const FeatureVector& features) {
    if (rows_.empty() && columns_.empty()) columns_ = features.keys();
    std::vector<FeatureValue> cells;
    cells.reserve(columns_.size());
    for (const FeatureKey& col : columns_) {
        const FeatureValue* v = features.find(col);
        if (v == nullptr) {
            throw Error(ErrorKind::Incomplete, "row " + key.patient + "/scan" + std::to_string(key.scan) + "/seg" +
                                                   std::to_string(key.segmentation) + " lacks feature " + col.column());
        }
        cells.push_back(*v);
    }
    if (features.size() != columns_.size()) {
        throw Error(ErrorKind::Incomplete, "row " + key.patient + " carries features outside the table columns");
    }
    add_row(std::move(key), std::move(cells));
}

void FeatureTable::add_row(RowKey key, std::vector<FeatureValue> cells) {
    if (cells.size() != columns_.size()) throw Error(ErrorKind::Incomplete, "row width does not match table columns");
    if (find_row(key)) {
        throw Error(ErrorKind::InvalidInput, "duplicate row " + key.patient + "/scan" + std::to_string(key.scan) +
                                                 "/seg" + std::to_string(key.segmentation));
    }
    rows_.push_back(std::move(key));
    cells_.insert(cells_.end(), cells.begin(), cells.end());
}

std::optional<std::size_t> FeatureTable::find_row(const RowKey& key) const noexcept {
    auto it = std::find(rows_.begin(), rows_.end(), key);
    if (it == rows_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - rows_.begin());
}

std::optional<std::size_t> FeatureTable::find_column(const FeatureKey& key) const noexcept {
    auto it = std::find(columns_.begin(), columns_.end(), key);
    if (it == columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<std::string> FeatureTable::patients() const {
    std::vector<std::string> out;
    for (const RowKey& r : rows_)
        if (std::find(out.begin(), out.end(), r.patient) == out.end()) out.push_back(r.patient);
    return out;
}

std::vector<int> FeatureTable::segmentations(int scan) const {
    std::set<int> segs;
    for (const RowKey& r : rows_)
        if (r.scan == scan && r.segmentation > 0) segs.insert(r.segmentation);
    return {segs.begin(), segs.end()};
}

}  // namespace segrad
