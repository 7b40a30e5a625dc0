#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "segrad/config.hpp"
#include "segrad/io.hpp"
#include "segrad/phantom.hpp"
#include "segrad/pipeline.hpp"
#include "segrad/report.hpp"

namespace segrad::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json real_json(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

// Flags registered on a subcommand that, when given, overwrite a RunConfig field.
struct Overrides {
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> items;

    template <typename T>
    CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help,
                     std::function<void(RunConfig&, const T&)> apply) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, help);
        items.emplace_back(opt, [value, apply](RunConfig& c) { apply(c, *value); });
        return opt;
    }

    void flag(CLI::App* app, const std::string& name, const std::string& help, std::function<void(RunConfig&)> apply) {
        CLI::Option* opt = app->add_flag(name, help);
        items.emplace_back(opt, std::move(apply));
    }

    void apply(RunConfig& c) const {
        for (const auto& [opt, fn] : items)
            if (opt->count() > 0) fn(c);
    }
};

void extraction_flags(CLI::App* app, Overrides& o) {
    o.add<std::vector<double>>(app, "--spacing", "Resample spacing in mm (3 values)",
                               [](RunConfig& c, const std::vector<double>& v) {
                                   if (v.size() != 3) throw Error(ErrorKind::Config, "--spacing takes 3 values");
                                   c.extraction.resample_spacing = {v[0], v[1], v[2]};
                               });
    o.flag(app, "--no-resample", "Extract on the native grid", [](RunConfig& c) { c.extraction.resample = false; });
    o.add<double>(app, "--bin-width", "Intensity bin width", [](RunConfig& c, const double& v) { c.extraction.bin_width = v; });
    o.add<std::vector<double>>(app, "--log-sigma", "LoG sigmas in mm (repeatable); 0 disables LoG",
                               [](RunConfig& c, const std::vector<double>& v) {
                                   c.extraction.log_sigmas.clear();
                                   for (double s : v)
                                       if (s != 0.0) c.extraction.log_sigmas.push_back(s);
                               })
        ->delimiter(',');
    o.add<std::vector<std::string>>(app, "--wavelet", "Wavelet sub-bands (LLL..HHH, 'all' or 'none')",
                                    [](RunConfig& c, const std::vector<std::string>& v) {
                                        c.extraction.wavelet_bands.clear();
                                        for (const auto& s : v) {
                                            if (s == "none") continue;
                                            if (s == "all") {
                                                c.extraction.wavelet_bands = all_wavelet_bands();
                                                continue;
                                            }
                                            c.extraction.wavelet_bands.push_back(SubBand::parse(s));
                                        }
                                    })
        ->delimiter(',');
    o.flag(app, "--no-original", "Skip the unfiltered image type", [](RunConfig& c) { c.extraction.original = false; });
    o.add<std::vector<std::string>>(app, "--classes", "Feature classes: shape firstorder gldm",
                                    [](RunConfig& c, const std::vector<std::string>& v) {
                                        auto& e = c.extraction;
                                        e.shape = e.firstorder = e.gldm = false;
                                        for (const auto& s : v) {
                                            switch (parse_feature_class(s)) {
                                                case FeatureClass::Shape: e.shape = true; break;
                                                case FeatureClass::FirstOrder: e.firstorder = true; break;
                                                case FeatureClass::Gldm: e.gldm = true; break;
                                            }
                                        }
                                    })
        ->delimiter(',');
    o.add<double>(app, "--gldm-alpha", "GLDM dependence tolerance", [](RunConfig& c, const double& v) { c.extraction.gldm_alpha = v; });
    o.add<int>(app, "--gldm-delta", "GLDM neighbourhood distance", [](RunConfig& c, const int& v) { c.extraction.gldm_delta = v; });
}

void stats_flags(CLI::App* app, Overrides& o, bool ccc, bool rank, bool reference) {
    o.add<std::string>(app, "--icc-model", "ICC(1,1), ICC(2,1) or ICC(3,1)",
                       [](RunConfig& c, const std::string& v) { c.icc_model = parse_icc_model(v); });
    if (ccc)
        o.add<double>(app, "--ccc-threshold", "Keep features with test-retest CCC above this",
                      [](RunConfig& c, const double& v) { c.ccc_threshold = v; });
    if (rank)
        o.add<std::size_t>(app, "--top-m", "Number of most sensitive features to report",
                           [](RunConfig& c, const std::size_t& v) { c.top_m = v; });
    if (reference)
        o.add<std::size_t>(app, "--reference", "Gold-standard segmentation index (1-based)",
                           [](RunConfig& c, const std::size_t& v) { c.reference = v; });
}

void phantom_flags(CLI::App* app, Overrides& o) {
    o.add<std::uint64_t>(app, "--seed", "Random seed", [](RunConfig& c, const std::uint64_t& v) { c.seed = v; });
    o.add<std::size_t>(app, "--n", "Patients", [](RunConfig& c, const std::size_t& v) { c.phantom.n = v; });
    o.add<std::size_t>(app, "--k", "Segmentations per patient", [](RunConfig& c, const std::size_t& v) { c.phantom.k = v; });
    o.add<std::size_t>(app, "--families", "Segmentation method families",
                       [](RunConfig& c, const std::size_t& v) { c.phantom.families = v; });
    o.add<double>(app, "--boundary-noise", "Family A boundary displacement amplitude (mm)",
                  [](RunConfig& c, const double& v) { c.phantom.boundary_noise_mm = v; });
    o.add<double>(app, "--dilation", "Family B dilation (mm)", [](RunConfig& c, const double& v) { c.phantom.dilation_mm = v; });
    o.add<double>(app, "--rounding", "Family C rounding fraction in [0,1]",
                  [](RunConfig& c, const double& v) { c.phantom.rounding = v; });
    o.add<double>(app, "--member-jitter", "Relative spread of operator strength within a family",
                  [](RunConfig& c, const double& v) { c.phantom.member_jitter = v; });
    o.add<double>(app, "--member-noise", "Per-member boundary noise as a fraction of --boundary-noise",
                  [](RunConfig& c, const double& v) { c.phantom.member_noise = v; });
    o.add<double>(app, "--retest-shift", "Rigid retest shift (mm)", [](RunConfig& c, const double& v) { c.phantom.retest_shift_mm = v; });
    o.add<double>(app, "--image-noise", "Image noise SD", [](RunConfig& c, const double& v) { c.phantom.image_noise_sd = v; });
}

struct Context {
    RunConfig config;
    fs::path out;
    unsigned threads = 0;
    json inputs = json::object();
    json results = json::object();
    std::ostream* log = nullptr;
};

struct Command {
    CLI::App* app = nullptr;
    Overrides overrides;
    std::string config_path;
    std::string out;
    unsigned threads = 0;
    std::function<void(Context&)> body;
};

void add_common(Command& cmd, bool threads) {
    cmd.app->add_option("--out", cmd.out, "Output directory")->required();
    cmd.app->add_option("--config", cmd.config_path, "JSON run configuration (flags override it)")
        ->check(CLI::ExistingFile);
    if (threads) cmd.app->add_option("--threads", cmd.threads, "Worker threads (0 = all cores)");
}

FeatureTable load_table(const std::string& path) { return read_feature_table(path); }

std::vector<FeatureKey> selection_keys(const fs::path& path) {
    try {
        const json doc = json::parse(read_text_file(path));
        std::vector<FeatureKey> keys;
        if (doc.contains("ranking") && !doc["ranking"].empty()) {
            for (const auto& k : doc["ranking"]) keys.push_back(FeatureKey::parse(k.get<std::string>()));
            return keys;
        }
        for (const auto& f : doc.at("features"))
            if (f.at("selected").get<bool>()) keys.push_back(FeatureKey::parse(f.at("feature").get<std::string>()));
        return keys;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, path.string() + ": " + e.what());
    }
}

json selection_summary(const SelectionReport& r) {
    json j;
    j["features"] = r.features.size();
    j["selected"] = r.selected_keys().size();
    j["ranking"] = json::array();
    for (const auto& k : r.ranking) j["ranking"].push_back(k.column());
    return j;
}

bool has_retest(const FeatureTable& t) {
    const auto& rows = t.rows();
    return std::any_of(rows.begin(), rows.end(), [](const RowKey& r) { return r.scan == 2 && r.segmentation == 0; });
}

SelectionReport ccc_gate(const FeatureTable& table, const RunConfig& c) {
    auto [s1, s2] = test_retest_tables(table);
    return reproducibility_select(s1, s2, c.ccc_threshold);
}

std::string heatmap_name(std::size_t rank, const FeatureKey& key) { return fmt::format("{:02}_{}", rank, key.column()); }

void write_feature_outputs(const FeatureTable& table, const fs::path& out) {
    write_feature_table(table, out / "features.csv", TableFormat::Csv);
    write_feature_table(table, out / "features.json", TableFormat::Json);
}

// --- subcommand bodies ------------------------------------------------------------

struct ExtractArgs {
    std::string image, mask, id = "case";
    int label = 0;
    CLI::Option* label_opt = nullptr;
};

void run_extract(Context& ctx, const ExtractArgs& a) {
    ctx.inputs = {{"image", a.image}, {"mask", a.mask}, {"id", a.id}};
    std::optional<int> label;
    if (a.label_opt->count() > 0) {
        label = a.label;
        ctx.inputs["mask_label"] = a.label;
    }
    const ScalarVolume image = read_volume(a.image);
    const LabelMask mask = read_mask(a.mask, label);
    const FeatureVector fv = extract_all(image, mask, ctx.config.extraction);
    FeatureTable table;
    table.add_row({a.id, 1, 0}, fv);
    write_feature_outputs(table, ctx.out);
    ctx.results["features"] = fv.size();
}

void run_cohort_extract(Context& ctx, const std::string& manifest_path) {
    ctx.inputs = {{"manifest", manifest_path}};
    const CohortManifest m = read_manifest(manifest_path);
    const FeatureTable table = cohort_extract(m, ctx.config.extraction, ctx.threads);
    write_feature_outputs(table, ctx.out);
    ctx.results = {{"patients", m.n()}, {"k", m.k}, {"rows", table.row_count()}, {"features", table.column_count()}};
}

void run_ccc_select(Context& ctx, const std::string& table_path) {
    ctx.inputs = {{"table", table_path}};
    const SelectionReport r = ccc_gate(load_table(table_path), ctx.config);
    write_selection_report(r, ctx.out / "ccc_selection.csv", ctx.out / "ccc_selection.json");
    ctx.results = selection_summary(r);
}

SelectionReport rank_features(const FeatureTable& table, const RunConfig& c, const std::string& selection_path,
                              std::optional<SelectionReport>& gate) {
    std::vector<FeatureKey> keys;
    if (!selection_path.empty()) {
        keys = selection_keys(selection_path);
    } else if (has_retest(table)) {
        gate = ccc_gate(table, c);
        keys = gate->selected_keys();
    } else {
        keys = table.columns();
    }
    SelectionReport r = sensitivity_rank(table, keys, c.top_m, c.icc_model);
    if (gate) attach_ccc(r, *gate);
    return r;
}

void run_icc_rank(Context& ctx, const std::string& table_path, const std::string& selection_path) {
    ctx.inputs = {{"table", table_path}};
    if (!selection_path.empty()) ctx.inputs["selection"] = selection_path;
    std::optional<SelectionReport> gate;
    const SelectionReport r = rank_features(load_table(table_path), ctx.config, selection_path, gate);
    write_selection_report(r, ctx.out / "icc_rank.csv", ctx.out / "icc_rank.json");
    ctx.results = selection_summary(r);
}

void run_dsc(Context& ctx, const std::string& manifest_path) {
    ctx.inputs = {{"manifest", manifest_path}};
    const CohortManifest m = read_manifest(manifest_path);
    const CohortDsc d = cohort_dsc(m, ctx.threads);
    write_cohort_dsc(d, ctx.out / "dsc_mean.csv", ctx.out / "dsc.json");
    heatmap_export(to_square(d.mean, "Mean DSC"), ctx.out / "dsc_heatmap");
    ctx.results = {{"patients", m.n()}, {"k", m.k}, {"min_mean_off_diagonal", real_json(d.mean.min_off_diagonal())}};
}

// The reference index is user input, so a value past k is a validation error rather than a data error.
void check_reference(const FeatureTable& table, std::size_t reference) {
    const std::size_t k = table.segmentations(1).size();
    if (reference > k) throw Error(ErrorKind::Validation, fmt::format("--reference {} exceeds k = {}", reference, k));
}

json gold_summary(const GoldStandardReport& g) {
    json pairs = json::array();
    for (std::size_t o = 0; o < g.others.size(); ++o)
        pairs.push_back({{"pair", fmt::format("{}-{}", g.reference, g.others[o])},
                         {"average", real_json(g.average[o])},
                         {"class", g.average_class[o]}});
    return pairs;
}

void run_gold_standard(Context& ctx, const std::string& table_path, const std::string& selection_path,
                       const std::vector<std::string>& feature_names) {
    ctx.inputs = {{"table", table_path}};
    const FeatureTable table = load_table(table_path);
    std::vector<FeatureKey> keys;
    if (!feature_names.empty()) {
        for (const auto& f : feature_names) keys.push_back(FeatureKey::parse(f));
        ctx.inputs["features"] = feature_names;
    } else if (!selection_path.empty()) {
        keys = selection_keys(selection_path);
        ctx.inputs["selection"] = selection_path;
    } else {
        keys = table.columns();
    }
    check_reference(table, ctx.config.reference);
    const GoldStandardReport g = gold_standard_report(table, ctx.config.reference, keys, ctx.config.icc_model);
    write_gold_standard(g, ctx.out / "gold_standard.csv", ctx.out / "gold_standard.json");
    ctx.results = {{"pairs", gold_summary(g)}};
}

void run_heatmap(Context& ctx, const std::string& table_path, const std::string& feature, const std::string& matrix,
                 const std::string& name) {
    SquareMatrix m;
    if (!matrix.empty()) {
        ctx.inputs = {{"matrix", matrix}};
        m = parse_matrix_csv(read_text_file(matrix));
    } else {
        if (table_path.empty() || feature.empty())
            throw Error(ErrorKind::Config, "heatmap needs --matrix, or --table with --feature");
        ctx.inputs = {{"table", table_path}, {"feature", feature}};
        const FeatureKey key = FeatureKey::parse(feature);
        m = to_square(pairwise_icc(load_table(table_path), key, ctx.config.icc_model), key.column());
    }
    heatmap_export(m, ctx.out / name);
    ctx.results = {{"k", m.k}, {"files", json::array({name + ".csv", name + ".svg"})}};
}

void run_phantom(Context& ctx) {
    const CohortManifest m = generate_phantom_cohort(ctx.config.phantom, ctx.config.seed, ctx.out);
    ctx.results = {{"patients", m.n()}, {"k", m.k}, {"manifest", "manifest.json"}};
}

void run_pipeline(Context& ctx, const std::string& manifest_path) {
    ctx.inputs = {{"manifest", manifest_path}};
    const RunConfig& c = ctx.config;
    std::ostream& log = *ctx.log;
    const CohortManifest m = read_manifest(manifest_path);
    log << fmt::format("pipeline: {} patients, k={}\n", m.n(), m.k);

    const FeatureTable table = cohort_extract(m, c.extraction, ctx.threads);
    write_feature_outputs(table, ctx.out);
    check_reference(table, c.reference);
    log << fmt::format("pipeline: extracted {} features over {} rows\n", table.column_count(), table.row_count());

    std::optional<SelectionReport> gate;
    const SelectionReport ranked = rank_features(table, c, "", gate);
    if (gate) write_selection_report(*gate, ctx.out / "ccc_selection.csv", ctx.out / "ccc_selection.json");
    write_selection_report(ranked, ctx.out / "icc_rank.csv", ctx.out / "icc_rank.json");

    fs::create_directories(ctx.out / "heatmaps");
    for (std::size_t i = 0; i < ranked.ranking.size(); ++i) {
        const FeatureKey& key = ranked.ranking[i];
        heatmap_export(to_square(pairwise_icc(table, key, c.icc_model), key.column()),
                       ctx.out / "heatmaps" / heatmap_name(i + 1, key));
    }

    const CohortDsc d = cohort_dsc(m, ctx.threads);
    fs::create_directories(ctx.out / "dsc");
    write_cohort_dsc(d, ctx.out / "dsc" / "dsc_mean.csv", ctx.out / "dsc" / "dsc.json");
    heatmap_export(to_square(d.mean, "Mean DSC"), ctx.out / "dsc" / "dsc_heatmap");

    const GoldStandardReport g = gold_standard_report(table, c.reference, ranked.ranking, c.icc_model);
    write_gold_standard(g, ctx.out / "gold_standard.csv", ctx.out / "gold_standard.json");

    ctx.results = {{"patients", m.n()},
                   {"k", m.k},
                   {"features", table.column_count()},
                   {"ccc_selected", gate ? json(gate->selected_keys().size()) : json(nullptr)},
                   {"ranking", selection_summary(ranked)["ranking"]},
                   {"min_mean_dsc", real_json(d.mean.min_off_diagonal())},
                   {"gold_standard", gold_summary(g)}};
}

std::vector<std::string> list_outputs(const fs::path& dir) {
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir).generic_string());
    std::erase(files, "run_summary.json");
    std::sort(files.begin(), files.end());
    return files;
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::Config || kind == ErrorKind::Validation ? 1 : 2; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Segmentation-sensitivity radiomics toolkit", "segrad"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::vector<std::unique_ptr<Command>> commands;
    auto make = [&](const std::string& name, const std::string& help) -> Command& {
        commands.push_back(std::make_unique<Command>());
        commands.back()->app = app.add_subcommand(name, help);
        return *commands.back();
    };

    ExtractArgs extract_args;
    std::string manifest, table, selection, feature, matrix, heat_name = "heatmap";
    std::vector<std::string> features;

    {
        Command& c = make("extract", "Extract features for one image and mask");
        c.app->add_option("--image", extract_args.image, "Image volume (NRRD/NIfTI)")->required()->check(CLI::ExistingFile);
        c.app->add_option("--mask", extract_args.mask, "Mask volume")->required()->check(CLI::ExistingFile);
        extract_args.label_opt = c.app->add_option("--label", extract_args.label, "Mask label value (default: nonzero)");
        c.app->add_option("--id", extract_args.id, "Row id in the output table");
        add_common(c, false);
        extraction_flags(c.app, c.overrides);
        c.body = [&](Context& ctx) { run_extract(ctx, extract_args); };
    }
    {
        Command& c = make("cohort-extract", "Extract features for every scan and segmentation in a manifest");
        c.app->add_option("--manifest", manifest, "Cohort manifest JSON")->required()->check(CLI::ExistingFile);
        add_common(c, true);
        extraction_flags(c.app, c.overrides);
        c.body = [&](Context& ctx) { run_cohort_extract(ctx, manifest); };
    }
    {
        Command& c = make("ccc-select", "Test-retest CCC gating of a cohort feature table");
        c.app->add_option("--table", table, "Cohort feature table (.csv/.json)")->required()->check(CLI::ExistingFile);
        add_common(c, false);
        stats_flags(c.app, c.overrides, true, false, false);
        c.body = [&](Context& ctx) { run_ccc_select(ctx, table); };
    }
    {
        Command& c = make("icc-rank", "Rank features by minimum pairwise ICC across segmentations");
        c.app->add_option("--table", table, "Cohort feature table (.csv/.json)")->required()->check(CLI::ExistingFile);
        c.app->add_option("--selection", selection, "Selection report JSON restricting the features")
            ->check(CLI::ExistingFile);
        add_common(c, false);
        stats_flags(c.app, c.overrides, true, true, false);
        c.body = [&](Context& ctx) { run_icc_rank(ctx, table, selection); };
    }
    {
        Command& c = make("dsc", "Pairwise DSC matrices per patient and their cohort mean");
        c.app->add_option("--manifest", manifest, "Cohort manifest JSON")->required()->check(CLI::ExistingFile);
        add_common(c, true);
        c.body = [&](Context& ctx) { run_dsc(ctx, manifest); };
    }
    {
        Command& c = make("gold-standard", "ICC of every segmentation against a reference segmentation");
        c.app->add_option("--table", table, "Cohort feature table (.csv/.json)")->required()->check(CLI::ExistingFile);
        c.app->add_option("--selection", selection, "Selection report JSON (uses its ranking)")
            ->check(CLI::ExistingFile);
        c.app->add_option("--features", features, "Feature columns, e.g. original_shape_Sphericity");
        add_common(c, false);
        stats_flags(c.app, c.overrides, false, false, true);
        c.body = [&](Context& ctx) { run_gold_standard(ctx, table, selection, features); };
    }
    {
        Command& c = make("heatmap", "Render a square matrix as CSV and SVG");
        c.app->add_option("--table", table, "Cohort feature table")->check(CLI::ExistingFile);
        c.app->add_option("--feature", feature, "Feature column for a pairwise-ICC heatmap");
        c.app->add_option("--matrix", matrix, "Square matrix CSV instead of a table")->check(CLI::ExistingFile);
        c.app->add_option("--name", heat_name, "Output base name");
        add_common(c, false);
        stats_flags(c.app, c.overrides, false, false, false);
        c.body = [&](Context& ctx) { run_heatmap(ctx, table, feature, matrix, heat_name); };
    }
    {
        Command& c = make("phantom", "Generate a synthetic test-retest cohort with segmentation families");
        add_common(c, false);
        phantom_flags(c.app, c.overrides);
        c.body = [&](Context& ctx) { run_phantom(ctx); };
    }
    {
        Command& c = make("pipeline", "Extraction, CCC gating, ICC ranking, DSC, gold standard and heatmaps");
        c.app->add_option("--manifest", manifest, "Cohort manifest JSON")->required()->check(CLI::ExistingFile);
        add_common(c, true);
        extraction_flags(c.app, c.overrides);
        stats_flags(c.app, c.overrides, true, true, true);
        c.body = [&](Context& ctx) { run_pipeline(ctx, manifest); };
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    Command* cmd = nullptr;
    for (auto& c : commands)
        if (c->app->parsed()) cmd = c.get();
    if (cmd == nullptr) return 1;  // unreachable with require_subcommand

    Context ctx;
    ctx.out = cmd->out;
    ctx.threads = cmd->threads;
    ctx.log = &err;
    const std::string name = cmd->app->get_name();

    try {
        if (!cmd->config_path.empty()) ctx.config = load_config(cmd->config_path);
        cmd->overrides.apply(ctx.config);
        ctx.config.validate();
    } catch (const std::exception& e) {
        err << "error: config: " << e.what() << "\n";
        return 1;
    }

    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) {
        err << "error: cannot create output directory " << ctx.out.string() << ": " << ec.message() << "\n";
        return 2;
    }

    json summary;
    summary["command"] = name;
    int code = 0;
    try {
        cmd->body(ctx);
        summary["status"] = "ok";
    } catch (const Error& e) {
        code = exit_code(e.kind());
        summary["status"] = "error";
        summary["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
        err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        code = 2;
        summary["status"] = "error";
        summary["error"] = {{"kind", "internal"}, {"message", e.what()}};
        err << "error: " << e.what() << "\n";
    }

    try {
        json effective;
        effective["command"] = name;
        effective["inputs"] = ctx.inputs;
        effective["config"] = json::parse(config_json(ctx.config));
        write_text_file(ctx.out / "effective_config.json", effective.dump(2) + "\n");
        summary["results"] = ctx.results;
        summary["outputs"] = list_outputs(ctx.out);
        write_text_file(ctx.out / "run_summary.json", summary.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: cannot write run summary: " << e.what() << "\n";
        if (code == 0) code = 2;
    }
    if (code == 0) out << name << ": ok (" << ctx.out.string() << ")\n";
    return code;
}

}  // namespace segrad::cli
