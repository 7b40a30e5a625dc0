#include "segrad/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "segrad/io.hpp"

namespace segrad {

using json = nlohmann::ordered_json;

namespace {

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

json real_json(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json icc_json(const IccResult& r) {
    return json{{"icc", real_json(r.icc)},
                {"lower", real_json(r.lower)},
                {"upper", real_json(r.upper)},
                {"degenerate", r.degenerate}};
}

json matrix_json(const DscMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.k; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.k; ++j) row.push_back(m.flagged[i * m.k + j] ? json(nullptr) : real_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void write_selection_report(const SelectionReport& report, const std::filesystem::path& csv_path,
                            const std::filesystem::path& json_path) {
    std::string csv = "rank,feature,ccc,icc,icc_lower,icc_upper,min_pairwise_icc,degenerate,selected\n";
    json doc;
    doc["threshold"] = real_json(report.threshold);
    doc["ranking"] = json::array();
    for (const auto& k : report.ranking) doc["ranking"].push_back(k.column());
    doc["features"] = json::array();
    for (std::size_t i = 0; i < report.features.size(); ++i) {
        const FeatureSelection& f = report.features[i];
        const auto rank = std::find(report.ranking.begin(), report.ranking.end(), f.key);
        const std::string rank_text =
            rank == report.ranking.end() ? "" : std::to_string(rank - report.ranking.begin() + 1);
        csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", rank_text, f.key.column(),
                           f.ccc ? format_real(f.ccc->value) : "",
                           f.overall_icc ? format_real(f.overall_icc->icc) : "",
                           f.overall_icc ? format_real(f.overall_icc->lower) : "",
                           f.overall_icc ? format_real(f.overall_icc->upper) : "", opt_real(f.min_pairwise_icc),
                           f.degenerate ? 1 : 0, f.selected ? 1 : 0);
        json e;
        e["feature"] = f.key.column();
        e["ccc"] = f.ccc ? json{{"value", real_json(f.ccc->value)}, {"degenerate", f.ccc->degenerate}} : json(nullptr);
        e["overall_icc"] = f.overall_icc ? icc_json(*f.overall_icc) : json(nullptr);
        e["min_pairwise_icc"] = f.min_pairwise_icc ? real_json(*f.min_pairwise_icc) : json(nullptr);
        e["degenerate"] = f.degenerate;
        e["selected"] = f.selected;
        doc["features"].push_back(std::move(e));
    }
    write_text_file(csv_path, csv);
    write_text_file(json_path, doc.dump(2) + "\n");
}

void write_cohort_dsc(const CohortDsc& dsc, const std::filesystem::path& csv_path,
                      const std::filesystem::path& json_path) {
    write_text_file(csv_path, matrix_csv(to_square(dsc.mean)));
    json doc;
    doc["k"] = dsc.mean.k;
    doc["mean"] = matrix_json(dsc.mean);
    doc["min_off_diagonal_mean"] = real_json(dsc.mean.min_off_diagonal());
    doc["patients"] = json::array();
    for (std::size_t p = 0; p < dsc.patients.size(); ++p)
        doc["patients"].push_back(json{{"id", dsc.patients[p]}, {"dsc", matrix_json(dsc.per_patient[p])}});
    write_text_file(json_path, doc.dump(2) + "\n");
}

void write_gold_standard(const GoldStandardReport& report, const std::filesystem::path& csv_path,
                         const std::filesystem::path& json_path) {
    std::string csv = "feature";
    for (std::size_t o : report.others) csv += fmt::format(",icc{}-{}", report.reference, o);
    csv += "\n";
    for (std::size_t f = 0; f < report.features.size(); ++f) {
        csv += report.features[f].column();
        for (const auto& r : report.icc[f]) csv += "," + format_real(r.icc);
        csv += "\n";
    }
    csv += "Average";
    for (double a : report.average) csv += "," + format_real(a);
    csv += "\nClass";
    for (const auto& c : report.average_class) csv += "," + c;
    csv += "\n";

    json doc;
    doc["reference"] = report.reference;
    doc["others"] = report.others;
    doc["features"] = json::array();
    for (std::size_t f = 0; f < report.features.size(); ++f) {
        json cells = json::array();
        for (const auto& r : report.icc[f]) cells.push_back(icc_json(r));
        doc["features"].push_back(json{{"feature", report.features[f].column()}, {"icc", std::move(cells)}});
    }
    doc["pairs"] = json::array();
    for (std::size_t o = 0; o < report.others.size(); ++o) {
        doc["pairs"].push_back(json{{"pair", fmt::format("{}-{}", report.reference, report.others[o])},
                                    {"average", real_json(report.average[o])},
                                    {"class", report.average_class[o]},
                                    {"flagged", static_cast<bool>(report.flagged[o])}});
    }
    write_text_file(csv_path, csv);
    write_text_file(json_path, doc.dump(2) + "\n");
}

SquareMatrix to_square(const PairwiseIccMatrix& m, std::string title) {
    SquareMatrix out{m.size(), m.icc_values(), std::move(title)};
    for (std::size_t i = 0; i < out.k; ++i)
        for (std::size_t j = 0; j < out.k; ++j)
            if (i != j && m(i, j).degenerate) out.values[i * out.k + j] = std::nan("");
    return out;
}

SquareMatrix to_square(const DscMatrix& m, std::string title) {
    SquareMatrix out{m.k, m.values, std::move(title)};
    for (std::size_t c = 0; c < out.values.size(); ++c)
        if (m.flagged[c]) out.values[c] = std::nan("");
    return out;
}

std::string matrix_csv(const SquareMatrix& m) {
    std::string out = "segmentation";
    for (std::size_t j = 0; j < m.k; ++j) out += "," + std::to_string(j + 1);
    out += "\n";
    for (std::size_t i = 0; i < m.k; ++i) {
        out += std::to_string(i + 1);
        for (std::size_t j = 0; j < m.k; ++j) out += "," + format_real(m(i, j));
        out += "\n";
    }
    return out;
}

SquareMatrix parse_matrix_csv(const std::string& text) {
    std::stringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string field;
        std::getline(ls, field, ',');
        std::vector<double> row;
        while (std::getline(ls, field, ',')) row.push_back(field == "nan" ? std::nan("") : std::stod(field));
        rows.push_back(std::move(row));
    }
    SquareMatrix m;
    m.k = rows.size();
    for (const auto& r : rows) {
        if (r.size() != m.k) throw Error(ErrorKind::Format, "matrix CSV is not square");
        m.values.insert(m.values.end(), r.begin(), r.end());
    }
    return m;
}

namespace {

struct Rgb {
    int r, g, b;
};

Rgb parse_hex(const char* hex) {
    return {std::stoi(std::string(hex + 1, 2), nullptr, 16), std::stoi(std::string(hex + 3, 2), nullptr, 16),
            std::stoi(std::string(hex + 5, 2), nullptr, 16)};
}

}  // namespace

std::string ramp_color(double v) {
    if (std::isnan(v)) return "#cccccc";
    const double t = std::clamp(v, 0.0, 1.0);
    const Rgb lo = parse_hex(kRampLow);
    const Rgb hi = parse_hex(kRampHigh);
    auto mix = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
    return fmt::format("#{:02x}{:02x}{:02x}", mix(lo.r, hi.r), mix(lo.g, hi.g), mix(lo.b, hi.b));
}

std::string heatmap_svg(const SquareMatrix& m) {
    constexpr int cell = 48;
    constexpr int left = 40;
    constexpr int top = 56;
    const int size = static_cast<int>(m.k) * cell;
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\">\n",
        left + size + 16, top + size + 16);
    if (!m.title.empty()) svg += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">{}</text>\n", left, m.title);
    for (std::size_t j = 0; j < m.k; ++j) {
        svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                           left + static_cast<int>(j) * cell + cell / 2, top - 8, j + 1);
    }
    for (std::size_t i = 0; i < m.k; ++i) {
        const int y = top + static_cast<int>(i) * cell;
        svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n", left - 6,
                           y + cell / 2 + 4, i + 1);
        for (std::size_t j = 0; j < m.k; ++j) {
            const int x = left + static_cast<int>(j) * cell;
            const double v = m(i, j);
            const bool dark = !std::isnan(v) && v > 0.5;
            svg += fmt::format("<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", x, y, cell, cell,
                               ramp_color(v));
            svg += fmt::format(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
                x + cell / 2, y + cell / 2 + 4, dark ? "#ffffff" : "#000000",
                std::isnan(v) ? std::string("n/a") : fmt::format("{:.3f}", v));
        }
    }
    svg += "</svg>\n";
    return svg;
}

void heatmap_export(const SquareMatrix& m, const std::filesystem::path& base) {
    if (m.values.size() != m.k * m.k) throw Error(ErrorKind::InvalidInput, "heatmap matrix is not square");
    write_text_file(std::filesystem::path(base.string() + ".csv"), matrix_csv(m));
    write_text_file(std::filesystem::path(base.string() + ".svg"), heatmap_svg(m));
}

}  // namespace segrad
