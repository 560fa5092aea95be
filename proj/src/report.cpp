#include "vbpbb/report.hpp"

#include "vbpbb/errors.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <sstream>

namespace vbpbb {

using json = nlohmann::json;

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

std::string fmt_double(double v)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

json vec_json(const Eigen::VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json band_json(const CIBand& band)
{
    const LineTest test = horizontal_line_test(band);
    json out{{"alpha", band.alpha},
             {"method", std::string(to_string(band.method))},
             {"phase_zero_date", band.phase_zero_date ? json(band.phase_zero_date->iso()) : json(nullptr)},
             {"lower", vec_json(band.lower)},
             {"median", vec_json(band.median)},
             {"upper", vec_json(band.upper)},
             {"max_lower", test.max_lower},
             {"min_upper", test.min_upper}};
    return out;
}

json ratio_json(double ratio)
{
    return std::isfinite(ratio) ? json(ratio) : json("inf");
}

} // namespace

std::string band_to_csv(const CIBand& band)
{
    std::string out = "phase,calendar_label,lower,median,upper\n";
    for (Eigen::Index p = 0; p < band.size(); ++p) {
        out += std::to_string(p);
        out += ',';
        out += band.calendar_label(p);
        out += ',';
        out += fmt_double(band.lower[p]);
        out += ',';
        out += fmt_double(band.median[p]);
        out += ',';
        out += fmt_double(band.upper[p]);
        out += '\n';
    }
    return out;
}

std::string report_to_json(const AnalysisReport& report)
{
    json doc;
    doc["dataset_digest"] = report.dataset_digest;
    doc["seed"] = report.seed;
    doc["B"] = report.resamples;
    doc["alpha"] = report.alpha;
    doc["components"] = json::array();
    for (const auto& r : report.components) {
        json c{{"period", std::to_string(r.component.period())},
               {"harmonic", r.component.harmonic()},
               {"frequency", r.component.frequency().str()},
               {"block_period", r.component.block_period()},
               {"m", r.window},
               {"k", r.iterations},
               {"method", std::string(to_string(r.method))},
               {"status", r.status == ScanStatus::Tested ? "tested" : "untestable"}};
        if (r.status == ScanStatus::Tested && r.band) {
            c["significant"] = r.significant;
            c["max_lower"] = r.max_lower;
            c["min_upper"] = r.min_upper;
            c["median_width"] = r.median_width;
            c["band"] = band_json(*r.band);
        } else {
            c["significant"] = nullptr;
            c["note"] = r.note;
        }
        doc["components"].push_back(std::move(c));
    }
    doc["width_ratios"] = json::object();
    for (const auto& [label, ratio] : report.width_ratios) {
        doc["width_ratios"][label] = ratio_json(ratio);
    }
    doc["r_squared"] = json::object();
    for (const auto& [key, entry] : report.r_squared) {
        doc["r_squared"][key] = {{"value", entry.value}, {"components", entry.components}};
    }
    doc["combined_bands"] = json::object();
    for (const auto& [key, band] : report.combined_bands) {
        doc["combined_bands"][key] = band_json(band);
    }
    return doc.dump(2) + "\n";
}

SummaryFormat parse_summary_format(std::string_view text)
{
    if (text == "csv") {
        return SummaryFormat::Csv;
    }
    if (text == "json") {
        return SummaryFormat::Json;
    }
    if (text == "markdown") {
        return SummaryFormat::Markdown;
    }
    throw InvalidParameter("unknown report format '" + std::string(text) +
                           "' (expected csv, json or markdown)");
}

std::string summarize_report(std::string_view report_json, SummaryFormat format)
{
    json doc;
    try {
        doc = json::parse(report_json);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("components")) {
        throw ParseError("report JSON has no \"components\" list");
    }

    struct Row {
        std::string component, method, m, status, significant, median_width, ratio;
    };
    std::vector<Row> rows;
    auto as_text = [](const json& v) -> std::string {
        if (v.is_null()) {
            return "";
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "yes" : "no";
        }
        if (v.is_number_float()) {
            return fmt_double(v.get<double>());
        }
        if (v.is_string()) {
            return v.get<std::string>();
        }
        return v.dump();
    };
    try {
        for (const auto& c : doc.at("components")) {
            const std::string label =
                c.at("period").get<std::string>() + ":" + std::to_string(c.at("harmonic").get<int>());
            std::string ratio;
            if (doc.contains("width_ratios") && doc["width_ratios"].contains(label)) {
                ratio = as_text(doc["width_ratios"][label]);
            }
            rows.push_back({label, c.at("method").get<std::string>(), as_text(c.at("m")),
                            c.value("status", std::string("tested")),
                            as_text(c.value("significant", json(nullptr))),
                            as_text(c.value("median_width", json(nullptr))), ratio});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid report JSON: ") + e.what());
    }

    if (format == SummaryFormat::Json) {
        json out;
        out["dataset_digest"] = doc.value("dataset_digest", std::string());
        out["components"] = json::array();
        for (const auto& r : rows) {
            out["components"].push_back({{"component", r.component},
                                         {"method", r.method},
                                         {"m", r.m},
                                         {"status", r.status},
                                         {"significant", r.significant},
                                         {"median_width", r.median_width},
                                         {"width_ratio", r.ratio}});
        }
        out["r_squared"] = json::object();
        const json rsq = doc.value("r_squared", json::object());
        for (const auto& [key, entry] : rsq.items()) {
            out["r_squared"][key] = entry.value("value", 0.0);
        }
        return out.dump(2) + "\n";
    }

    std::ostringstream os;
    if (format == SummaryFormat::Csv) {
        os << "component,method,m,status,significant,median_width,width_ratio\n";
        for (const auto& r : rows) {
            os << r.component << ',' << r.method << ',' << r.m << ',' << r.status << ','
               << r.significant << ',' << r.median_width << ',' << r.ratio << '\n';
        }
        return os.str();
    }

    os << "| component | method | m | status | significant | median width | PBB/VBPBB |\n";
    os << "|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        os << "| " << r.component << " | " << r.method << " | " << r.m << " | " << r.status << " | "
           << r.significant << " | " << r.median_width << " | " << r.ratio << " |\n";
    }
    const auto rsq = doc.value("r_squared", json::object());
    if (!rsq.empty()) {
        os << "\n| R^2 curve | value |\n|---|---|\n";
        for (const auto& [key, entry] : rsq.items()) {
            os << "| " << key << " | " << fmt_double(entry.value("value", 0.0)) << " |\n";
        }
    }
    return os.str();
}

} // namespace vbpbb
