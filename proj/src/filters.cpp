#include "segrad/filters.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace segrad {

SubBand SubBand::parse(const std::string& label) {
    if (label.size() != 3) throw Error(ErrorKind::InvalidInput, "sub-band label must have 3 letters: " + label);
    unsigned bits = 0;
    for (int a = 0; a < 3; ++a) {
        if (label[a] == 'H') {
            bits |= 1u << a;
        } else if (label[a] != 'L') {
            throw Error(ErrorKind::InvalidInput, "sub-band letters must be L or H: " + label);
        }
    }
    return SubBand(bits);
}

std::string SubBand::label() const {
    std::string s(3, 'L');
    for (int a = 0; a < 3; ++a)
        if (high(a)) s[a] = 'H';
    return s;
}

std::array<SubBand, 8> SubBand::all() noexcept {
    // Ordered as the labels read alphabetically (first letter most significant).
    std::array<SubBand, 8> bands;
    for (unsigned n = 0; n < 8; ++n) {
        unsigned bits = ((n >> 2) & 1u) | (n & 2u) | ((n & 1u) << 2);
        bands[n] = SubBand(bits);
    }
    return bands;
}

namespace {

// Half-sample symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1.
std::ptrdiff_t reflect(std::ptrdiff_t idx, std::ptrdiff_t n) {
    if (n == 1) return 0;
    const std::ptrdiff_t period = 2 * n;
    idx %= period;
    if (idx < 0) idx += period;
    return idx < n ? idx : period - 1 - idx;
}

template <typename LineOp>
void for_each_line(const Grid3& g, int axis, LineOp&& op) {
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? g.dims[0] : g.dims[0] * g.dims[1];
    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    for (std::size_t q = 0; q < g.dims[a2]; ++q) {
        for (std::size_t p = 0; p < g.dims[a1]; ++p) {
            Index3 start{0, 0, 0};
            start[a1] = p;
            start[a2] = q;
            op(g.linear(start[0], start[1], start[2]), stride, g.dims[axis]);
        }
    }
}

void convolve_axis(std::vector<double>& data, const Grid3& g, int axis, const std::vector<double>& kernel) {
    const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    std::vector<double> line;
    for_each_line(g, axis, [&](std::size_t base, std::size_t stride, std::size_t n) {
        line.resize(n);
        for (std::size_t t = 0; t < n; ++t) line[t] = data[base + t * stride];
        const auto len = static_cast<std::ptrdiff_t>(n);
        for (std::ptrdiff_t t = 0; t < len; ++t) {
            double acc = 0.0;
            for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
                acc += kernel[static_cast<std::size_t>(o + radius)] * line[static_cast<std::size_t>(reflect(t + o, len))];
            }
            data[base + static_cast<std::size_t>(t) * stride] = acc;
        }
    });
}

std::vector<double> gaussian_kernel(double sigma_vox, double truncate) {
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(truncate * sigma_vox));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
        double w = std::exp(-0.5 * (o * o) / (sigma_vox * sigma_vox));
        k[static_cast<std::size_t>(o + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

}  // namespace

LogResult log_filter(const ScalarVolume& volume, double sigma_mm, const LogOptions& options) {
    if (!(sigma_mm > 0.0) || !std::isfinite(sigma_mm))
        throw Error(ErrorKind::Config, "LoG sigma must be positive");
    if (volume.empty()) throw Error(ErrorKind::InvalidInput, "LoG of an empty volume");
    const Grid3& g = volume.grid();

    LogResult result;
    const double min_spacing = std::min({g.spacing[0], g.spacing[1], g.spacing[2]});
    result.undersampled = sigma_mm < 0.5 * min_spacing;

    std::vector<double> smooth(volume.values().begin(), volume.values().end());
    for (int a = 0; a < 3; ++a) {
        if (g.dims[a] < 2) continue;
        convolve_axis(smooth, g, a, gaussian_kernel(sigma_mm / g.spacing[a], options.truncate));
    }

    std::vector<double> lap(smooth.size(), 0.0);
    for (int a = 0; a < 3; ++a) {
        if (g.dims[a] < 2) continue;
        const double inv_h2 = 1.0 / (g.spacing[a] * g.spacing[a]);
        for_each_line(g, a, [&](std::size_t base, std::size_t stride, std::size_t n) {
            const auto len = static_cast<std::ptrdiff_t>(n);
            for (std::ptrdiff_t t = 0; t < len; ++t) {
                double prev = smooth[base + static_cast<std::size_t>(reflect(t - 1, len)) * stride];
                double next = smooth[base + static_cast<std::size_t>(reflect(t + 1, len)) * stride];
                double here = smooth[base + static_cast<std::size_t>(t) * stride];
                lap[base + static_cast<std::size_t>(t) * stride] += (next - 2.0 * here + prev) * inv_h2;
            }
        });
    }
    if (options.scale_normalize) {
        for (double& v : lap) v *= sigma_mm * sigma_mm;
    }
    result.image = ScalarVolume(g, std::move(lap));
    return result;
}

SubBandSet wavelet_decompose(const ScalarVolume& volume) {
    const Grid3& g = volume.grid();
    for (int a = 0; a < 3; ++a) {
        if (g.dims[a] < 2)
            throw Error(ErrorKind::InvalidInput, "wavelet decomposition needs at least 2 voxels on every axis");
    }
    // Filter axis by axis; each stage doubles the number of partial bands.
    std::vector<std::pair<unsigned, std::vector<double>>> stage;
    stage.emplace_back(0u, std::vector<double>(volume.values().begin(), volume.values().end()));
    for (int a = 0; a < 3; ++a) {
        std::vector<std::pair<unsigned, std::vector<double>>> next;
        for (auto& [bits, data] : stage) {
            std::vector<double> low(data.size()), high(data.size());
            for_each_line(g, a, [&](std::size_t base, std::size_t stride, std::size_t n) {
                for (std::size_t t = 0; t < n; ++t) {
                    double cur = data[base + t * stride];
                    double prev = t == 0 ? cur : data[base + (t - 1) * stride];
                    low[base + t * stride] = 0.5 * (cur + prev);
                    high[base + t * stride] = 0.5 * (cur - prev);
                }
            });
            next.emplace_back(bits, std::move(low));
            next.emplace_back(bits | (1u << a), std::move(high));
        }
        stage = std::move(next);
    }
    SubBandSet bands;
    for (auto& [bits, data] : stage) bands.emplace(SubBand(bits), ScalarVolume(g, std::move(data)));
    return bands;
}

ScalarVolume wavelet_reconstruct(const SubBandSet& bands) {
    const ScalarVolume* first = nullptr;
    for (SubBand b : SubBand::all()) {
        auto it = bands.find(b);
        if (it == bands.end()) throw Error(ErrorKind::Incomplete, "missing wavelet band " + b.label());
        if (first == nullptr) {
            first = &it->second;
        } else {
            require_same_grid(first->grid(), it->second.grid(), "wavelet_reconstruct");
        }
    }
    std::vector<double> sum(first->size(), 0.0);
    for (SubBand b : SubBand::all()) {
        const ScalarVolume& v = bands.at(b);
        for (std::size_t idx = 0; idx < sum.size(); ++idx) sum[idx] += v[idx];
    }
    return ScalarVolume(first->grid(), std::move(sum));
}

}  // namespace segrad
