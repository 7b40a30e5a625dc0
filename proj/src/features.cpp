#include "segrad/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace segrad {

std::string to_string(FeatureClass c) {
    switch (c) {
        case FeatureClass::Shape: return "shape";
        case FeatureClass::FirstOrder: return "firstorder";
        case FeatureClass::Gldm: return "gldm";
    }
    return "unknown";
}

FeatureClass parse_feature_class(const std::string& s) {
    if (s == "shape") return FeatureClass::Shape;
    if (s == "firstorder") return FeatureClass::FirstOrder;
    if (s == "gldm") return FeatureClass::Gldm;
    throw Error(ErrorKind::InvalidInput, "unknown feature class '" + s + "'");
}

std::string FeatureKey::column() const { return image_type + "_" + to_string(feature_class) + "_" + name; }

FeatureKey FeatureKey::parse(const std::string& column) {
    auto first = column.find('_');
    auto second = first == std::string::npos ? std::string::npos : column.find('_', first + 1);
    if (second == std::string::npos || first == 0 || second + 1 >= column.size()) {
        throw Error(ErrorKind::InvalidInput, "malformed feature column '" + column + "'");
    }
    return FeatureKey{column.substr(0, first), parse_feature_class(column.substr(first + 1, second - first - 1)),
                      column.substr(second + 1)};
}

void FeatureVector::add(FeatureKey key, FeatureValue value) {
    if (find(key) != nullptr) throw Error(ErrorKind::InvalidInput, "duplicate feature " + key.column());
    entries_.emplace_back(std::move(key), value);
}

const FeatureValue* FeatureVector::find(const FeatureKey& key) const noexcept {
    for (const auto& [k, v] : entries_)
        if (k == key) return &v;
    return nullptr;
}

const FeatureValue& FeatureVector::at(const FeatureKey& key) const {
    if (const FeatureValue* v = find(key)) return *v;
    throw Error(ErrorKind::Incomplete, "feature " + key.column() + " not present");
}

std::vector<FeatureKey> FeatureVector::keys() const {
    std::vector<FeatureKey> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
}

void ExtractionConfig::validate() const {
    if (resample) {
        for (double s : resample_spacing)
            if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::Config, "resample spacing must be positive");
    }
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw Error(ErrorKind::Config, "bin width must be positive");
    for (double s : log_sigmas)
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::Config, "LoG sigma must be positive");
    if (!(gldm_alpha >= 0.0)) throw Error(ErrorKind::Config, "GLDM alpha must be >= 0");
    if (gldm_delta < 1) throw Error(ErrorKind::Config, "GLDM delta must be >= 1");
    if (!std::isfinite(energy_shift)) throw Error(ErrorKind::Config, "energy shift must be finite");
}

std::string log_image_type(double sigma_mm) { return fmt::format("log-sigma-{:g}", sigma_mm); }

std::string wavelet_image_type(SubBand band) { return "wavelet-" + band.label(); }

// --- first order -----------------------------------------------------------

NamedValues firstorder_features(const ScalarVolume& volume, const LabelMask& mask, const ExtractionConfig& config) {
    require_same_grid(volume.grid(), mask.grid(), "firstorder");
    std::vector<double> x;
    for (std::size_t idx = 0; idx < mask.size(); ++idx)
        if (mask[idx]) x.push_back(volume[idx]);
    if (x.empty()) throw Error(ErrorKind::EmptyRoi, "firstorder: mask is empty");

    const auto n = static_cast<double>(x.size());
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    // Checked exactly: a rounded mean would leave a spurious tiny variance.
    const bool constant = sorted.front() == sorted.back();

    double energy = 0.0;
    double sum = 0.0;
    for (double v : x) {
        energy += (v + config.energy_shift) * (v + config.energy_shift);
        sum += v;
    }
    const double mean = constant ? sorted.front() : sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    if (!constant) {
        for (double v : x) {
            const double d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
    }

    const DiscretizedVolume dv = discretize(volume, mask, config.bin_width);
    std::map<int, std::size_t> hist;
    for (std::size_t idx = 0; idx < mask.size(); ++idx)
        if (mask[idx]) ++hist[dv.levels[idx]];
    double entropy = 0.0, uniformity = 0.0;
    for (const auto& [level, count] : hist) {
        const double p = static_cast<double>(count) / n;
        entropy -= p * std::log2(p);
        uniformity += p * p;
    }

    NamedValues out;
    out.emplace_back("Energy", FeatureValue{energy});
    out.emplace_back("TotalEnergy", FeatureValue{energy * volume.grid().voxel_volume()});
    out.emplace_back("Mean", FeatureValue{mean});
    out.emplace_back("Median", FeatureValue{median});
    out.emplace_back("Minimum", FeatureValue{sorted.front()});
    out.emplace_back("Maximum", FeatureValue{sorted.back()});
    out.emplace_back("Range", FeatureValue{sorted.back() - sorted.front()});
    out.emplace_back("Variance", FeatureValue{m2});
    if (m2 > 0.0) {
        out.emplace_back("Skewness", FeatureValue{m3 / std::pow(m2, 1.5)});
        out.emplace_back("Kurtosis", FeatureValue{m4 / (m2 * m2)});
    } else {
        out.emplace_back("Skewness", FeatureValue{0.0, true});
        out.emplace_back("Kurtosis", FeatureValue{0.0, true});
    }
    out.emplace_back("Entropy", FeatureValue{entropy});
    out.emplace_back("Uniformity", FeatureValue{uniformity});
    return out;
}

// --- GLDM ----------------------------------------------------------------

GldmMatrix gldm_matrix(const DiscretizedVolume& dv, const LabelMask& mask, double alpha, int delta) {
    if (!(alpha >= 0.0)) throw Error(ErrorKind::Config, "GLDM alpha must be >= 0");
    if (delta < 1) throw Error(ErrorKind::Config, "GLDM delta must be >= 1");
    const Grid3& g = mask.grid();
    if (g.dims != dv.levels.grid().dims) throw Error(ErrorKind::Geometry, "gldm: level and mask grids differ");

    GldmMatrix m;
    m.alpha = alpha;
    m.delta = delta;
    m.num_levels = dv.num_levels;
    m.max_dependence = (2 * delta + 1) * (2 * delta + 1) * (2 * delta + 1);
    m.counts.assign(static_cast<std::size_t>(std::max(m.num_levels, 0)) * static_cast<std::size_t>(m.max_dependence),
                    0);

    const auto dx = static_cast<std::ptrdiff_t>(g.dims[0]);
    const auto dy = static_cast<std::ptrdiff_t>(g.dims[1]);
    const auto dz = static_cast<std::ptrdiff_t>(g.dims[2]);
    for (std::ptrdiff_t k = 0; k < dz; ++k) {
        for (std::ptrdiff_t j = 0; j < dy; ++j) {
            for (std::ptrdiff_t i = 0; i < dx; ++i) {
                const auto idx = g.linear(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                          static_cast<std::size_t>(k));
                if (!mask[idx]) continue;
                const int level = dv.levels[idx];
                if (level < 1 || level > m.num_levels)
                    throw Error(ErrorKind::InvalidInput, "gldm: in-mask voxel without a valid gray level");
                int dependence = 1;
                for (std::ptrdiff_t c = std::max<std::ptrdiff_t>(0, k - delta); c <= std::min(dz - 1, k + delta); ++c) {
                    for (std::ptrdiff_t b = std::max<std::ptrdiff_t>(0, j - delta); b <= std::min(dy - 1, j + delta);
                         ++b) {
                        for (std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, i - delta);
                             a <= std::min(dx - 1, i + delta); ++a) {
                            if (a == i && b == j && c == k) continue;
                            const auto nidx = g.linear(static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                                                       static_cast<std::size_t>(c));
                            if (!mask[nidx]) continue;
                            if (std::abs(dv.levels[nidx] - level) <= alpha) ++dependence;
                        }
                    }
                }
                ++m.counts[static_cast<std::size_t>(level - 1) * static_cast<std::size_t>(m.max_dependence) +
                           static_cast<std::size_t>(dependence - 1)];
                ++m.voxel_count;
            }
        }
    }
    if (m.voxel_count == 0) throw Error(ErrorKind::EmptyRoi, "gldm: mask is empty");
    return m;
}

NamedValues gldm_features(const GldmMatrix& m) {
    if (m.voxel_count == 0) throw Error(ErrorKind::EmptyRoi, "gldm: matrix is empty");
    // Sums run in extended precision and round once, so small exact cases come out correctly rounded.
    using acc = long double;
    const auto nz = static_cast<acc>(m.voxel_count);
    std::vector<acc> per_level(static_cast<std::size_t>(m.num_levels), 0.0L);
    std::vector<acc> per_dependence(static_cast<std::size_t>(m.max_dependence), 0.0L);
    acc sde = 0, lde = 0, lgle = 0, hgle = 0, sdlgle = 0, entropy = 0;
    for (int i = 1; i <= m.num_levels; ++i) {
        const auto di = static_cast<acc>(i);
        for (int j = 1; j <= m.max_dependence; ++j) {
            const auto p = static_cast<acc>(m.at(i, j));
            if (p == 0.0L) continue;
            const auto dj = static_cast<acc>(j);
            per_level[static_cast<std::size_t>(i - 1)] += p;
            per_dependence[static_cast<std::size_t>(j - 1)] += p;
            sde += p / (dj * dj);
            lde += p * dj * dj;
            lgle += p / (di * di);
            hgle += p * di * di;
            sdlgle += p / (di * di * dj * dj);
            const acc q = p / nz;
            entropy -= q * std::log2(q);
        }
    }
    acc gln = 0, dn = 0;
    for (acc s : per_level) gln += s * s;
    for (acc s : per_dependence) dn += s * s;
    const auto value = [](acc v) { return FeatureValue{static_cast<double>(v)}; };

    NamedValues out;
    out.emplace_back("SmallDependenceEmphasis", value(sde / nz));
    out.emplace_back("LargeDependenceEmphasis", value(lde / nz));
    out.emplace_back("GrayLevelNonUniformity", value(gln / nz));
    out.emplace_back("DependenceNonUniformity", value(dn / nz));
    out.emplace_back("DependenceEntropy", value(entropy));
    out.emplace_back("LowGrayLevelEmphasis", value(lgle / nz));
    out.emplace_back("HighGrayLevelEmphasis", value(hgle / nz));
    out.emplace_back("SmallDependenceLowGrayLevelEmphasis", value(sdlgle / nz));
    return out;
}

// --- composition ------------------------------------------------------------

namespace {

void add_all(FeatureVector& fv, const std::string& image_type, FeatureClass cls, const NamedValues& values) {
    for (const auto& [name, value] : values) fv.add(FeatureKey{image_type, cls, name}, value);
}

void add_intensity_features(FeatureVector& fv, const std::string& image_type, const ScalarVolume& image,
                            const LabelMask& mask, const ExtractionConfig& config) {
    if (config.firstorder) add_all(fv, image_type, FeatureClass::FirstOrder, firstorder_features(image, mask, config));
    if (config.gldm) {
        const DiscretizedVolume dv = discretize(image, mask, config.bin_width);
        add_all(fv, image_type, FeatureClass::Gldm,
                gldm_features(gldm_matrix(dv, mask, config.gldm_alpha, config.gldm_delta)));
    }
}

}  // namespace

FeatureVector extract_all(const ScalarVolume& image, const LabelMask& mask, const ExtractionConfig& config) {
    config.validate();
    require_same_grid(image.grid(), mask.grid(), "extract");
    if (count_inside(mask) == 0) throw Error(ErrorKind::EmptyRoi, "extract: mask is empty");

    ScalarVolume img = config.resample ? resample(image, config.resample_spacing) : image;
    LabelMask roi = config.resample ? resample(mask, config.resample_spacing) : mask;
    auto box = bounding_box(roi);
    if (!box) throw Error(ErrorKind::EmptyRoi, "extract: mask is empty after resampling");
    const Box3 crop_box = expand(*box, config.crop_margin, roi.grid().dims);
    img = crop(img, crop_box);
    roi = crop(roi, crop_box);

    FeatureVector fv;
    if (config.original) {
        if (config.shape) add_all(fv, "original", FeatureClass::Shape, shape_features(roi));
        add_intensity_features(fv, "original", img, roi, config);
    }
    const bool intensity = config.firstorder || config.gldm;
    if (!intensity) return fv;
    for (double sigma : config.log_sigmas) {
        add_intensity_features(fv, log_image_type(sigma), log_filter(img, sigma).image, roi, config);
    }
    if (!config.wavelet_bands.empty()) {
        const SubBandSet bands = wavelet_decompose(img);
        for (SubBand band : config.wavelet_bands) {
            add_intensity_features(fv, wavelet_image_type(band), bands.at(band), roi, config);
        }
    }
    return fv;
}

}  // namespace segrad
