#include "segrad/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "segrad/io.hpp"
#include "segrad/parallel.hpp"

namespace segrad {

namespace {

struct ExtractJob {
    std::size_t patient;
    RowKey key;
    std::filesystem::path image;
    std::filesystem::path mask;
};

[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const Error& e) {
        throw Error(e.kind(), context + ": " + e.what());
    }
}

}  // namespace

FeatureTable cohort_extract(const CohortManifest& manifest, const ExtractionConfig& config, unsigned threads) {
    config.validate();
    std::vector<ExtractJob> jobs;
    for (std::size_t p = 0; p < manifest.patients.size(); ++p) {
        const PatientEntry& e = manifest.patients[p];
        if (e.reference_segmentation) {
            jobs.push_back({p, {e.id, 1, 0}, e.scan1, *e.reference_segmentation});
            if (e.scan2) jobs.push_back({p, {e.id, 2, 0}, *e.scan2, e.retest_segmentation.value_or(*e.reference_segmentation)});
        }
        for (std::size_t j = 0; j < e.segmentations.size(); ++j)
            jobs.push_back({p, {e.id, 1, static_cast<int>(j + 1)}, e.scan1, e.segmentations[j]});
    }
    if (jobs.empty()) throw Error(ErrorKind::Validation, "manifest yields no extraction jobs");

    std::vector<FeatureVector> results(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        const ExtractJob& job = jobs[i];
        try {
            const ScalarVolume image = read_volume(job.image);
            const LabelMask mask = read_mask(job.mask, manifest.mask_label);
            results[i] = extract_all(image, mask, config);
        } catch (const Error&) {
            rethrow_with_context(job.key.patient + " scan " + std::to_string(job.key.scan) + " segmentation " +
                                 std::to_string(job.key.segmentation));
        }
    });

    FeatureTable table;
    for (std::size_t i = 0; i < jobs.size(); ++i) table.add_row(jobs[i].key, results[i]);
    return table;
}

RatingsMatrix segmentation_ratings(const FeatureTable& table, const FeatureKey& feature) {
    const auto col = table.find_column(feature);
    if (!col) throw Error(ErrorKind::InvalidInput, "table has no column " + feature.column());
    const std::vector<int> segs = table.segmentations(1);
    for (std::size_t j = 0; j < segs.size(); ++j) {
        if (segs[j] != static_cast<int>(j + 1))
            throw Error(ErrorKind::Incomplete, "segmentation indices must run 1..k; missing " + std::to_string(j + 1));
    }
    const std::vector<std::string> patients = table.patients();
    const std::size_t k = segs.size();
    std::vector<double> values;
    values.reserve(patients.size() * k);
    for (const std::string& p : patients) {
        for (std::size_t j = 1; j <= k; ++j) {
            const auto row = table.find_row({p, 1, static_cast<int>(j)});
            if (!row) throw Error(ErrorKind::Incomplete, "patient " + p + " lacks segmentation " + std::to_string(j));
            values.push_back(table.cell(*row, *col).value);
        }
    }
    if (patients.size() < 2 || k < 2)
        throw Error(ErrorKind::InvalidInput, "need at least 2 patients and 2 segmentations for ICC");
    return RatingsMatrix(patients.size(), k, std::move(values));
}

PairwiseIccMatrix pairwise_icc(const FeatureTable& table, const FeatureKey& feature, IccModel model) {
    return pairwise_icc(segmentation_ratings(table, feature), model);
}

std::vector<FeatureKey> SelectionReport::selected_keys() const {
    std::vector<FeatureKey> out;
    for (const auto& f : features)
        if (f.selected) out.push_back(f.key);
    return out;
}

const FeatureSelection* SelectionReport::find(const FeatureKey& key) const noexcept {
    for (const auto& f : features)
        if (f.key == key) return &f;
    return nullptr;
}

namespace {

std::vector<double> column_by_patient(const FeatureTable& t, std::size_t col, const std::vector<std::string>& patients,
                                      const char* label) {
    std::vector<double> out;
    out.reserve(patients.size());
    for (const std::string& p : patients) {
        std::optional<std::size_t> row;
        for (std::size_t r = 0; r < t.row_count(); ++r) {
            if (t.rows()[r].patient != p) continue;
            if (row) throw Error(ErrorKind::InvalidInput, std::string(label) + " holds several rows for patient " + p);
            row = r;
        }
        if (!row) throw Error(ErrorKind::Incomplete, std::string(label) + " lacks patient " + p);
        out.push_back(t.cell(*row, col).value);
    }
    return out;
}

}  // namespace

SelectionReport reproducibility_select(const FeatureTable& scan1, const FeatureTable& scan2, double threshold) {
    const std::vector<std::string> patients = scan1.patients();
    if (patients.size() < 2) throw Error(ErrorKind::InvalidInput, "insufficient cohort: CCC needs at least 2 patients");
    if (scan2.patients().size() != patients.size())
        throw Error(ErrorKind::InvalidInput, "scan tables cover different patient sets");
    if (scan1.columns() != scan2.columns())
        throw Error(ErrorKind::InvalidInput, "scan tables carry different feature columns");

    SelectionReport report;
    report.threshold = threshold;
    for (std::size_t c = 0; c < scan1.column_count(); ++c) {
        const auto x = column_by_patient(scan1, c, patients, "scan-1 table");
        const auto y = column_by_patient(scan2, c, patients, "scan-2 table");
        FeatureSelection f;
        f.key = scan1.columns()[c];
        f.ccc = ccc(x, y);
        f.degenerate = f.ccc->degenerate;
        f.selected = !f.degenerate && f.ccc->value > threshold;
        report.features.push_back(std::move(f));
    }
    return report;
}

std::pair<FeatureTable, FeatureTable> test_retest_tables(const FeatureTable& table) {
    return {table.filter([](const RowKey& r) { return r.scan == 1 && r.segmentation == 0; }),
            table.filter([](const RowKey& r) { return r.scan == 2 && r.segmentation == 0; })};
}

SelectionReport sensitivity_rank(const FeatureTable& table, std::span<const FeatureKey> selected, std::size_t top_m,
                                 IccModel model) {
    SelectionReport report;
    report.threshold = std::numeric_limits<double>::quiet_NaN();
    for (const FeatureKey& key : selected) {
        const RatingsMatrix ratings = segmentation_ratings(table, key);
        FeatureSelection f;
        f.key = key;
        f.overall_icc = icc(ratings, model);
        const double min_icc = pairwise_icc(ratings, model).min_off_diagonal();
        if (!std::isnan(min_icc)) f.min_pairwise_icc = min_icc;
        f.degenerate = f.overall_icc->degenerate || !f.min_pairwise_icc;
        report.features.push_back(std::move(f));
    }
    std::stable_sort(report.features.begin(), report.features.end(),
                     [](const FeatureSelection& a, const FeatureSelection& b) {
                         if (a.degenerate != b.degenerate) return !a.degenerate;
                         if (a.degenerate) return false;
                         return *a.min_pairwise_icc < *b.min_pairwise_icc;
                     });
    for (std::size_t i = 0; i < report.features.size() && i < top_m; ++i) {
        report.features[i].selected = true;
        report.ranking.push_back(report.features[i].key);
    }
    return report;
}

void attach_ccc(SelectionReport& report, const SelectionReport& reproducibility) {
    report.threshold = reproducibility.threshold;
    for (auto& f : report.features)
        if (const FeatureSelection* r = reproducibility.find(f.key)) f.ccc = r->ccc;
}

double DscMatrix::min_off_diagonal() const noexcept {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j && !flagged[i * k + j] && (std::isnan(best) || values[i * k + j] < best))
                best = values[i * k + j];
    return best;
}

DscMatrix dsc_matrix(std::span<const LabelMask> masks) {
    DscMatrix m;
    m.k = masks.size();
    m.values.assign(m.k * m.k, std::numeric_limits<double>::quiet_NaN());
    m.flagged.assign(m.k * m.k, false);
    for (std::size_t i = 0; i < m.k; ++i) {
        for (std::size_t j = i; j < m.k; ++j) {
            try {
                const double d = dsc(masks[i], masks[j]);
                m.values[i * m.k + j] = m.values[j * m.k + i] = d;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Undefined) throw;
                m.flagged[i * m.k + j] = m.flagged[j * m.k + i] = true;
            }
        }
    }
    return m;
}

DscMatrix mean_dsc(std::span<const DscMatrix> matrices) {
    if (matrices.empty()) throw Error(ErrorKind::InvalidInput, "no DSC matrices to average");
    DscMatrix out;
    out.k = matrices.front().k;
    out.values.assign(out.k * out.k, 0.0);
    out.flagged.assign(out.k * out.k, false);
    std::vector<std::size_t> counts(out.k * out.k, 0);
    for (const DscMatrix& m : matrices) {
        if (m.k != out.k) throw Error(ErrorKind::InvalidInput, "DSC matrices differ in size");
        for (std::size_t c = 0; c < m.values.size(); ++c) {
            if (m.flagged[c]) continue;
            out.values[c] += m.values[c];
            ++counts[c];
        }
    }
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        if (counts[c] == 0) {
            out.flagged[c] = true;
            out.values[c] = std::numeric_limits<double>::quiet_NaN();
        } else {
            out.values[c] /= static_cast<double>(counts[c]);
        }
    }
    return out;
}

CohortDsc cohort_dsc(const CohortManifest& manifest, unsigned threads) {
    CohortDsc out;
    out.per_patient.resize(manifest.n());
    parallel_for(manifest.n(), threads, [&](std::size_t p) {
        const PatientEntry& e = manifest.patients[p];
        try {
            std::vector<LabelMask> masks;
            masks.reserve(e.segmentations.size());
            for (const auto& s : e.segmentations) masks.push_back(read_mask(s, manifest.mask_label));
            out.per_patient[p] = dsc_matrix(masks);
        } catch (const Error&) {
            rethrow_with_context(e.id);
        }
    });
    for (const auto& e : manifest.patients) out.patients.push_back(e.id);
    out.mean = mean_dsc(out.per_patient);
    return out;
}

GoldStandardReport gold_standard_report(const FeatureTable& table, std::size_t reference_index,
                                        std::span<const FeatureKey> features, IccModel model) {
    const std::size_t k = table.segmentations(1).size();
    if (reference_index < 1 || reference_index > k) {
        throw Error(ErrorKind::Domain, "reference index " + std::to_string(reference_index) + " outside 1.." +
                                           std::to_string(k));
    }
    GoldStandardReport r;
    r.reference = reference_index;
    for (std::size_t j = 1; j <= k; ++j)
        if (j != reference_index) r.others.push_back(j);
    r.features.assign(features.begin(), features.end());

    for (const FeatureKey& key : features) {
        const RatingsMatrix ratings = segmentation_ratings(table, key);
        const std::size_t n = ratings.targets();
        std::vector<IccResult> row;
        for (std::size_t other : r.others) {
            std::vector<double> pair(2 * n);
            for (std::size_t t = 0; t < n; ++t) {
                pair[2 * t] = ratings(t, reference_index - 1);
                pair[2 * t + 1] = ratings(t, other - 1);
            }
            row.push_back(icc(RatingsMatrix(n, 2, std::move(pair)), model));
        }
        r.icc.push_back(std::move(row));
    }

    for (std::size_t o = 0; o < r.others.size(); ++o) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& row : r.icc) {
            if (row[o].degenerate) continue;
            sum += row[o].icc;
            ++count;
        }
        const double avg = count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
        r.average.push_back(avg);
        const std::string cls = std::isnan(avg) ? "undefined" : classify(Metric::Icc, avg);
        r.average_class.push_back(cls);
        r.flagged.push_back(cls == "poor" || cls == "moderate");
    }
    return r;
}

}  // namespace segrad
