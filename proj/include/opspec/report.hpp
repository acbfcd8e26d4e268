#pragma once

// Machine-readable spectrum reports. CSV columns are fixed:
// block,engine,re_lambda,im_lambda,multiplicity,residual with floats at 15
// significant digits; the JSON mirror keeps full double round-trip fidelity.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "opspec/errors.hpp"

namespace opspec {

inline std::string format_sig(double x, int digits = 15) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

struct SpectrumRow {
    int block; // 0 marks union rows merged across blocks
    std::string engine;
    double re_lambda;
    double im_lambda;
    int multiplicity;
    double residual;

    bool operator==(const SpectrumRow& o) const {
        return block == o.block && engine == o.engine && re_lambda == o.re_lambda &&
               im_lambda == o.im_lambda && multiplicity == o.multiplicity &&
               residual == o.residual;
    }
};

inline void sort_rows(std::vector<SpectrumRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const SpectrumRow& a, const SpectrumRow& b) {
        if (a.block != b.block) return a.block < b.block;
        if (a.re_lambda != b.re_lambda) return a.re_lambda < b.re_lambda;
        if (a.im_lambda != b.im_lambda) return a.im_lambda < b.im_lambda;
        return a.engine < b.engine;
    });
}

inline const char* spectrum_csv_header() {
    return "block,engine,re_lambda,im_lambda,multiplicity,residual";
}

inline std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
    std::string out(spectrum_csv_header());
    out += "\n";
    for (const SpectrumRow& r : rows) {
        out += std::to_string(r.block);
        out += ",";
        out += r.engine;
        out += ",";
        out += format_sig(r.re_lambda);
        out += ",";
        out += format_sig(r.im_lambda);
        out += ",";
        out += std::to_string(r.multiplicity);
        out += ",";
        out += format_sig(r.residual);
        out += "\n";
    }
    return out;
}

inline nlohmann::json spectrum_json(const std::vector<SpectrumRow>& rows) {
    nlohmann::json jrows = nlohmann::json::array();
    for (const SpectrumRow& r : rows) {
        jrows.push_back({{"block", r.block},
                         {"engine", r.engine},
                         {"re_lambda", r.re_lambda},
                         {"im_lambda", r.im_lambda},
                         {"multiplicity", r.multiplicity},
                         {"residual", r.residual}});
    }
    return nlohmann::json{{"schema_version", "1"}, {"rows", jrows}};
}

inline std::vector<SpectrumRow> spectrum_from_json(const nlohmann::json& j) {
    std::vector<SpectrumRow> rows;
    if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array())
        throw validation_error("spectrum JSON must carry a 'rows' array");
    for (const auto& r : j["rows"]) {
        rows.push_back({r.at("block").get<int>(), r.at("engine").get<std::string>(),
                        r.at("re_lambda").get<double>(), r.at("im_lambda").get<double>(),
                        r.at("multiplicity").get<int>(), r.at("residual").get<double>()});
    }
    return rows;
}

} // namespace opspec
