#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "segrad/io.hpp"

namespace segrad {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    return fmt::format("{:.17g}", v);
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

double parse_real(const std::string& s, const std::string& what) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Format, what + ": bad number '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorKind::Format, what + ": bad number '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Format, what + ": bad integer '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorKind::Format, what + ": bad integer '" + s + "'");
    return v;
}

// Ids are quoted only when they need it.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string table_csv(const FeatureTable& table) {
    std::string out = "patient,scan,segmentation";
    for (const FeatureKey& k : table.columns()) out += "," + k.column();
    out += "\n";
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const RowKey& key = table.rows()[r];
        out += csv_field(key.patient) + "," + std::to_string(key.scan) + "," + std::to_string(key.segmentation);
        for (std::size_t c = 0; c < table.column_count(); ++c) out += "," + format_real(table.cell(r, c).value);
        out += "\n";
    }
    return out;
}

json real_json(double v) {
    if (std::isfinite(v)) return v;
    return format_real(v);  // JSON has no NaN/Inf literals
}

double json_real(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_real(j.get<std::string>(), what);
    throw Error(ErrorKind::Format, what + ": expected a number");
}

std::string table_json(const FeatureTable& table) {
    json doc;
    doc["columns"] = json::array();
    for (const FeatureKey& k : table.columns()) doc["columns"].push_back(k.column());
    doc["rows"] = json::array();
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const RowKey& key = table.rows()[r];
        json row;
        row["patient"] = key.patient;
        row["scan"] = key.scan;
        row["segmentation"] = key.segmentation;
        json cells = json::array();
        for (std::size_t c = 0; c < table.column_count(); ++c) {
            const FeatureValue& v = table.cell(r, c);
            cells.push_back(json{{"value", real_json(v.value)}, {"degenerate", v.degenerate}});
        }
        row["cells"] = std::move(cells);
        doc["rows"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

FeatureTable parse_table_csv(const std::string& text, const std::string& what) {
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Format, what + ": empty table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "patient" || header[1] != "scan" || header[2] != "segmentation")
        throw Error(ErrorKind::Format, what + ": header must start with patient,scan,segmentation");
    std::vector<FeatureKey> columns;
    for (std::size_t i = 3; i < header.size(); ++i) columns.push_back(FeatureKey::parse(header[i]));
    FeatureTable table(columns);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = what + ":" + std::to_string(line_no);
        if (fields.size() != header.size())
            throw Error(ErrorKind::Format, where + ": expected " + std::to_string(header.size()) + " fields");
        RowKey key{fields[0], parse_int(fields[1], where), parse_int(fields[2], where)};
        std::vector<FeatureValue> cells;
        for (std::size_t i = 3; i < fields.size(); ++i) cells.push_back({parse_real(fields[i], where), false});
        table.add_row(std::move(key), std::move(cells));
    }
    return table;
}

FeatureTable parse_table_json(const std::string& text, const std::string& what) {
    json doc;
    try {
        doc = json::parse(text);
        std::vector<FeatureKey> columns;
        for (const auto& c : doc.at("columns")) columns.push_back(FeatureKey::parse(c.get<std::string>()));
        FeatureTable table(columns);
        for (const auto& row : doc.at("rows")) {
            RowKey key{row.at("patient").get<std::string>(), row.at("scan").get<int>(),
                       row.at("segmentation").get<int>()};
            std::vector<FeatureValue> cells;
            for (const auto& cell : row.at("cells"))
                cells.push_back({json_real(cell.at("value"), what), cell.at("degenerate").get<bool>()});
            table.add_row(std::move(key), std::move(cells));
        }
        return table;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, what + ": " + e.what());
    }
}

}  // namespace

void write_feature_table(const FeatureTable& table, const fs::path& path, TableFormat format) {
    if (table.empty()) throw Error(ErrorKind::InvalidInput, "refusing to write an empty feature table");
    write_text_file(path, format == TableFormat::Csv ? table_csv(table) : table_json(table));
}

FeatureTable read_feature_table(const fs::path& path) {
    const std::string text = read_text_file(path);
    const auto ext = path.extension().string();
    if (ext == ".csv") return parse_table_csv(text, path.string());
    if (ext == ".json") return parse_table_json(text, path.string());
    throw Error(ErrorKind::Format, path.string() + ": table format must be .csv or .json");
}

// --- manifest ------------------------------------------------------------------

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relative_if_below(const fs::path& base, const fs::path& p) {
    if (base.empty()) return p.generic_string();
    const fs::path rel = p.lexically_normal().lexically_relative(base.lexically_normal());
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return p.generic_string();
}

}  // namespace

CohortManifest read_manifest(const fs::path& path, bool check_paths) {
    const std::string what = path.string();
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, what + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    CohortManifest m;
    std::vector<std::string> problems;
    try {
        if (doc.contains("mask_label") && !doc["mask_label"].is_null()) m.mask_label = doc["mask_label"].get<int>();
        if (!doc.contains("patients") || !doc["patients"].is_array())
            throw Error(ErrorKind::Validation, what + ": 'patients' array is required");
        std::set<std::string> ids;
        for (const auto& p : doc["patients"]) {
            PatientEntry e;
            e.id = p.at("id").get<std::string>();
            if (e.id.empty()) problems.push_back("patient with empty id");
            if (!ids.insert(e.id).second) problems.push_back("duplicate patient id '" + e.id + "'");
            e.scan1 = resolve(base, p.at("scan1").get<std::string>());
            if (p.contains("scan2") && !p["scan2"].is_null()) e.scan2 = resolve(base, p["scan2"].get<std::string>());
            if (p.contains("reference_segmentation") && !p["reference_segmentation"].is_null())
                e.reference_segmentation = resolve(base, p["reference_segmentation"].get<std::string>());
            if (p.contains("retest_segmentation") && !p["retest_segmentation"].is_null())
                e.retest_segmentation = resolve(base, p["retest_segmentation"].get<std::string>());
            for (const auto& s : p.at("segmentations")) e.segmentations.push_back(resolve(base, s.get<std::string>()));
            m.patients.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Validation, what + ": " + e.what());
    }
    if (m.patients.empty()) throw Error(ErrorKind::Validation, what + ": manifest lists no patients");

    std::size_t k = m.patients.front().segmentations.size();
    if (doc.contains("k") && !doc["k"].is_null()) k = doc["k"].get<std::size_t>();
    std::vector<std::string> ragged;
    for (const auto& p : m.patients)
        if (p.segmentations.size() != k)
            ragged.push_back(fmt::format("{} ({} segmentations)", p.id, p.segmentations.size()));
    if (!ragged.empty()) {
        std::string list;
        for (const auto& r : ragged) list += (list.empty() ? "" : ", ") + r;
        problems.push_back(fmt::format("expected k={} segmentations per patient; offenders: {}", k, list));
    }
    if (!problems.empty()) {
        std::string msg = what + ": invalid manifest";
        for (const auto& p : problems) msg += "; " + p;
        throw Error(ErrorKind::Validation, msg);
    }
    m.k = k;

    if (check_paths) {
        std::vector<std::string> missing;
        auto check = [&](const std::string& id, const fs::path& p) {
            if (!fs::exists(p)) missing.push_back(id + ": " + p.string());
        };
        for (const auto& p : m.patients) {
            check(p.id, p.scan1);
            if (p.scan2) check(p.id, *p.scan2);
            if (p.reference_segmentation) check(p.id, *p.reference_segmentation);
            if (p.retest_segmentation) check(p.id, *p.retest_segmentation);
            for (const auto& s : p.segmentations) check(p.id, s);
        }
        if (!missing.empty()) {
            std::string msg = what + ": unresolved paths";
            for (const auto& s : missing) msg += "; " + s;
            throw Error(ErrorKind::Io, msg);
        }
    }
    return m;
}

void write_manifest(const CohortManifest& manifest, const fs::path& path) {
    const fs::path base = path.parent_path();
    json doc;
    doc["version"] = 1;
    doc["k"] = manifest.k;
    if (manifest.mask_label) doc["mask_label"] = *manifest.mask_label;
    doc["patients"] = json::array();
    for (const auto& p : manifest.patients) {
        json e;
        e["id"] = p.id;
        e["scan1"] = relative_if_below(base, p.scan1);
        if (p.scan2) e["scan2"] = relative_if_below(base, *p.scan2);
        if (p.reference_segmentation) e["reference_segmentation"] = relative_if_below(base, *p.reference_segmentation);
        if (p.retest_segmentation) e["retest_segmentation"] = relative_if_below(base, *p.retest_segmentation);
        e["segmentations"] = json::array();
        for (const auto& s : p.segmentations) e["segmentations"].push_back(relative_if_below(base, s));
        doc["patients"].push_back(std::move(e));
    }
    write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace segrad
