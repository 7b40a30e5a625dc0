#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "segrad/agreement.hpp"
#include "segrad/features.hpp"
#include "segrad/phantom.hpp"

namespace segrad {

/// Everything that shapes a run's results. Thread count and output directory live
/// outside it so the echoed config is identical across --threads values.
struct RunConfig {
    ExtractionConfig extraction;
    double ccc_threshold = 0.93;
    IccModel icc_model = IccModel::Icc2_1;
    std::size_t top_m = 7;
    std::size_t reference = 1;
    std::uint64_t seed = 0;
    PhantomParams phantom;

    void validate() const;
};

/// Keys absent from the JSON keep their current value; unknown keys are a Config error.
void merge_config_json(RunConfig& config, const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Stable pretty-printed JSON (two-space indent, trailing newline).
std::string config_json(const RunConfig& config);

}  // namespace segrad
