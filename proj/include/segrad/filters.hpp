#pragma once

#include <array>
#include <map>
#include <string>

#include "segrad/volume.hpp"

namespace segrad {

/// One letter per array axis (first letter = axis 0): 'L' low-pass, 'H' high-pass.
class SubBand {
public:
    constexpr SubBand() = default;

    /// Bit a set = high-pass along axis a.
    constexpr explicit SubBand(unsigned bits) : bits_(bits & 7u) {}

    /// Parses "LLH" etc.; throws Error{InvalidInput} on anything else.
    static SubBand parse(const std::string& label);

    constexpr bool high(int axis) const noexcept { return (bits_ >> axis) & 1u; }
    constexpr unsigned bits() const noexcept { return bits_; }
    std::string label() const;

    /// All 8 bands in a fixed order: LLL, LLH, LHL, LHH, HLL, HLH, HHL, HHH.
    static std::array<SubBand, 8> all() noexcept;

    constexpr auto operator<=>(const SubBand&) const = default;

private:
    unsigned bits_ = 0;
};

using SubBandSet = std::map<SubBand, ScalarVolume>;

struct LogOptions {
    /// Multiply the response by sigma^2 (scale normalization). Off by default.
    bool scale_normalize = false;
    /// Gaussian support in units of sigma.
    double truncate = 4.0;
};

struct LogResult {
    ScalarVolume image;
    /// Set when sigma is below half the smallest spacing; the kernel is then barely resolved.
    bool undersampled = false;
};

/// Laplacian of Gaussian: separable Gaussian (sigma in mm, mirror boundary)
/// followed by a central-difference Laplacian. Same grid as the input.
LogResult log_filter(const ScalarVolume& volume, double sigma_mm, const LogOptions& options = {});

/// Single-level undecimated Haar decomposition with unit-DC normalization:
/// per axis L_i = (x_i + x_{i-1})/2, H_i = (x_i - x_{i-1})/2, x_{-1} = x_0.
SubBandSet wavelet_decompose(const ScalarVolume& volume);

/// Voxelwise sum of all 8 bands; inverts wavelet_decompose exactly up to rounding.
ScalarVolume wavelet_reconstruct(const SubBandSet& bands);

}  // namespace segrad
