#include "segrad/config.hpp"

#include <json.hpp>

#include "segrad/io.hpp"

namespace segrad {

using json = nlohmann::ordered_json;

void RunConfig::validate() const {
    extraction.validate();
    if (!(ccc_threshold >= -1.0 && ccc_threshold <= 1.0))
        throw Error(ErrorKind::Config, "CCC threshold must lie in [-1, 1]");
    if (top_m < 1) throw Error(ErrorKind::Config, "top_m must be at least 1");
    if (reference < 1) throw Error(ErrorKind::Config, "reference index is 1-based");
    try {
        phantom.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Vec3 take_vec3(const json& j, const char* key) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3) throw Error(ErrorKind::Config, std::string(key) + " must be a 3-element array");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

void merge_config_json(RunConfig& c, const std::string& text) {
    static const char* kKnown[] = {"resample",       "resample_spacing", "bin_width",     "crop_margin",
                                   "original",       "log_sigmas",       "wavelet_bands", "feature_classes",
                                   "gldm_alpha",     "gldm_delta",       "energy_shift",  "ccc_threshold",
                                   "icc_model",      "top_m",            "reference",     "seed",
                                   "phantom"};
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown))
                throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
        }
        ExtractionConfig& e = c.extraction;
        take(j, "resample", e.resample);
        if (j.contains("resample_spacing")) e.resample_spacing = take_vec3(j, "resample_spacing");
        take(j, "bin_width", e.bin_width);
        take(j, "crop_margin", e.crop_margin);
        take(j, "original", e.original);
        take(j, "log_sigmas", e.log_sigmas);
        if (j.contains("wavelet_bands")) {
            e.wavelet_bands.clear();
            for (const auto& b : j["wavelet_bands"]) e.wavelet_bands.push_back(SubBand::parse(b.get<std::string>()));
        }
        if (j.contains("feature_classes")) {
            e.shape = e.firstorder = e.gldm = false;
            for (const auto& f : j["feature_classes"]) {
                switch (parse_feature_class(f.get<std::string>())) {
                    case FeatureClass::Shape: e.shape = true; break;
                    case FeatureClass::FirstOrder: e.firstorder = true; break;
                    case FeatureClass::Gldm: e.gldm = true; break;
                }
            }
        }
        take(j, "gldm_alpha", e.gldm_alpha);
        take(j, "gldm_delta", e.gldm_delta);
        take(j, "energy_shift", e.energy_shift);
        take(j, "ccc_threshold", c.ccc_threshold);
        if (j.contains("icc_model")) c.icc_model = parse_icc_model(j["icc_model"].get<std::string>());
        take(j, "top_m", c.top_m);
        take(j, "reference", c.reference);
        take(j, "seed", c.seed);
        if (j.contains("phantom")) {
            const json& p = j["phantom"];
            PhantomParams& ph = c.phantom;
            take(p, "n", ph.n);
            take(p, "k", ph.k);
            take(p, "families", ph.families);
            if (p.contains("dims")) {
                const auto& d = p["dims"];
                if (!d.is_array() || d.size() != 3) throw Error(ErrorKind::Config, "phantom.dims must have 3 entries");
                ph.dims = {d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>()};
            }
            if (p.contains("spacing")) ph.spacing = take_vec3(p, "spacing");
            take(p, "boundary_noise_mm", ph.boundary_noise_mm);
            take(p, "dilation_mm", ph.dilation_mm);
            take(p, "rounding", ph.rounding);
            take(p, "member_jitter", ph.member_jitter);
            take(p, "member_noise", ph.member_noise);
            take(p, "retest_shift_mm", ph.retest_shift_mm);
            take(p, "image_noise_sd", ph.image_noise_sd);
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::Config, std::string("config: ") + ex.what());
    } catch (const Error& ex) {
        throw Error(ErrorKind::Config, ex.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    RunConfig c;
    merge_config_json(c, read_text_file(path));
    return c;
}

std::string config_json(const RunConfig& c) {
    const ExtractionConfig& e = c.extraction;
    json j;
    j["resample"] = e.resample;
    j["resample_spacing"] = e.resample_spacing;
    j["bin_width"] = e.bin_width;
    j["crop_margin"] = e.crop_margin;
    j["original"] = e.original;
    j["log_sigmas"] = e.log_sigmas;
    j["wavelet_bands"] = json::array();
    for (const SubBand& b : e.wavelet_bands) j["wavelet_bands"].push_back(b.label());
    j["feature_classes"] = json::array();
    if (e.shape) j["feature_classes"].push_back(to_string(FeatureClass::Shape));
    if (e.firstorder) j["feature_classes"].push_back(to_string(FeatureClass::FirstOrder));
    if (e.gldm) j["feature_classes"].push_back(to_string(FeatureClass::Gldm));
    j["gldm_alpha"] = e.gldm_alpha;
    j["gldm_delta"] = e.gldm_delta;
    j["energy_shift"] = e.energy_shift;
    j["ccc_threshold"] = c.ccc_threshold;
    j["icc_model"] = to_string(c.icc_model);
    j["top_m"] = c.top_m;
    j["reference"] = c.reference;
    j["seed"] = c.seed;
    const PhantomParams& p = c.phantom;
    j["phantom"] = json{{"n", p.n},
                        {"k", p.k},
                        {"families", p.families},
                        {"dims", p.dims},
                        {"spacing", p.spacing},
                        {"boundary_noise_mm", p.boundary_noise_mm},
                        {"dilation_mm", p.dilation_mm},
                        {"rounding", p.rounding},
                        {"member_jitter", p.member_jitter},
                        {"member_noise", p.member_noise},
                        {"retest_shift_mm", p.retest_shift_mm},
                        {"image_noise_sd", p.image_noise_sd}};
    return j.dump(2) + "\n";
}

}  // namespace segrad
