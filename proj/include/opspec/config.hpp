#pragma once

// JSON problem configuration: blocks (interval, coefficient A, boundary
// parameter W), grid size, search region and tolerance overrides. Every
// validation failure carries the JSON path it was found at.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "opspec/analytic.hpp"
#include "opspec/boundary.hpp"
#include "opspec/hilbert.hpp"
#include "opspec/multipoint.hpp"

namespace opspec {

struct config_error : std::runtime_error {
    std::string path;

    config_error(std::string p, const std::string& msg)
        : std::runtime_error(p.empty() ? msg : p + ": " + msg), path(std::move(p)) {}
};

/// Tunable tolerances with their pinned defaults.
struct Tolerances {
    double root_residual = 1e-9;      // det root acceptance
    double dedup = 1e-6;              // root dedup radius
    double merge = 1e-8;              // union merge radius
    double normality_identity = 1e-3; // cmd normality identity threshold
    int eigen_cap = 4000;             // dense eigensolver size cap
};

struct ProblemConfig {
    std::string schema_version;
    MultipointProblem problem;
    int m;
    SearchRegion region;
    Tolerances tol;
};

namespace detail {

using nlohmann::json;

inline const json& member(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw config_error(path, std::string("missing field '") + key + "'");
    return *it;
}

inline double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw config_error(path, "expected a number");
    return j.get<double>();
}

inline int integer_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw config_error(path, "expected an integer");
    return j.get<int>();
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw config_error(path, "unknown field '" + it.key() + "'");
    }
}

inline rmat real_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw config_error(path, "expected a nonempty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    rmat out;
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.empty())
            throw config_error(path + "[" + std::to_string(r) + "]", "expected a nonempty row");
        if (r == 0) {
            cols = row.size();
            out.resize(rows, cols);
        } else if (row.size() != cols) {
            throw config_error(path + "[" + std::to_string(r) + "]",
                               "row length differs from row 0");
        }
        for (std::size_t c = 0; c < cols; ++c)
            out(r, c) = number_at(row[c], path + "[" + std::to_string(r) + "][" +
                                              std::to_string(c) + "]");
    }
    return out;
}

inline cmat complex_matrix(const json& j, const std::string& path) {
    if (!j.is_object()) throw config_error(path, "expected an object with 're' (and optional 'im')");
    check_keys(j, path, {"re", "im"});
    rmat re = real_matrix(member(j, path, "re"), path + ".re");
    rmat im;
    if (j.contains("im")) {
        im = real_matrix(j["im"], path + ".im");
        if (im.rows() != re.rows() || im.cols() != re.cols())
            throw config_error(path + ".im", "shape differs from 're'");
    } else {
        im = rmat::Zero(re.rows(), re.cols());
    }
    cmat out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

inline BoundaryUnitary parse_boundary(const json& j, const std::string& path, int d) {
    if (!j.is_object()) throw config_error(path, "expected an object with field 'kind'");
    const json& kindj = member(j, path, "kind");
    if (!kindj.is_string()) throw config_error(path + ".kind", "expected a string");
    const std::string kind = kindj.get<std::string>();
    if (kind == "periodic" || kind == "dirichlet" || kind == "neumann") {
        check_keys(j, path, {"kind"});
        BoundaryKind bk = kind == "periodic" ? BoundaryKind::periodic
                          : kind == "dirichlet" ? BoundaryKind::dirichlet
                                                : BoundaryKind::neumann;
        return canonical_unitary(bk, d);
    }
    if (kind != "matrix")
        throw config_error(path + ".kind",
                           "expected one of periodic, dirichlet, neumann, matrix");
    check_keys(j, path, {"kind", "re", "im"});
    json sub = j;
    sub.erase("kind");
    cmat w = complex_matrix(sub, path);
    if (w.rows() != 2 * d)
        throw config_error(path, "boundary matrix must be 2d x 2d = " + std::to_string(2 * d) +
                                     " x " + std::to_string(2 * d) + " for this block");
    try {
        return BoundaryUnitary(std::move(w));
    } catch (const std::exception& e) {
        throw config_error(path, e.what());
    }
}

} // namespace detail

inline ProblemConfig parse_config_text(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("", "top level must be an object");
    detail::check_keys(j, "config",
                       {"schema_version", "blocks", "grid", "search", "tolerances"});

    std::string version = "1";
    if (j.contains("schema_version")) {
        if (!j["schema_version"].is_string())
            throw config_error("schema_version", "expected a string");
        version = j["schema_version"].get<std::string>();
        if (version != "1") throw config_error("schema_version", "unsupported version " + version);
    }

    const json& jb = detail::member(j, "config", "blocks");
    if (!jb.is_array() || jb.empty())
        throw config_error("blocks", "expected a nonempty array");

    std::vector<Block> blocks;
    std::vector<BoundaryUnitary> exts;
    for (std::size_t n = 0; n < jb.size(); ++n) {
        const std::string path = "blocks[" + std::to_string(n) + "]";
        const json& b = jb[n];
        if (!b.is_object()) throw config_error(path, "expected an object");
        detail::check_keys(b, path, {"interval", "A", "W"});
        const json& iv = detail::member(b, path, "interval");
        if (!iv.is_array() || iv.size() != 2)
            throw config_error(path + ".interval", "expected [a, b]");
        const double a = detail::number_at(iv[0], path + ".interval[0]");
        const double bb = detail::number_at(iv[1], path + ".interval[1]");
        if (!(a < bb)) throw config_error(path + ".interval", "requires a < b");

        cmat amat = detail::complex_matrix(detail::member(b, path, "A"), path + ".A");
        if (amat.rows() != amat.cols())
            throw config_error(path + ".A", "must be square");
        try {
            CoefficientMatrix coeff(std::move(amat));
            blocks.emplace_back(static_cast<int>(n) + 1, Interval(a, bb), std::move(coeff));
        } catch (const std::exception& e) {
            throw config_error(path + ".A", e.what());
        }
        exts.push_back(
            detail::parse_boundary(detail::member(b, path, "W"), path + ".W", blocks.back().dim()));
    }

    int m = 201;
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) throw config_error("grid", "expected an object");
        detail::check_keys(g, "grid", {"m"});
        if (g.contains("m")) {
            m = detail::integer_at(g["m"], "grid.m");
            if (m < 5) throw config_error("grid.m", "must be >= 5");
        }
    }

    double re_lo = 0.0, re_hi = 50.0, im_lo = 0.0, im_hi = 3.0;
    int scan_re = 40, scan_im = 20;
    if (j.contains("search")) {
        const json& s = j["search"];
        if (!s.is_object()) throw config_error("search", "expected an object");
        detail::check_keys(s, "search", {"re", "im", "scan"});
        if (s.contains("re")) {
            if (!s["re"].is_array() || s["re"].size() != 2)
                throw config_error("search.re", "expected [min, max]");
            re_lo = detail::number_at(s["re"][0], "search.re[0]");
            re_hi = detail::number_at(s["re"][1], "search.re[1]");
        }
        if (s.contains("im")) {
            if (!s["im"].is_array() || s["im"].size() != 2)
                throw config_error("search.im", "expected [min, max]");
            im_lo = detail::number_at(s["im"][0], "search.im[0]");
            im_hi = detail::number_at(s["im"][1], "search.im[1]");
        }
        if (s.contains("scan")) {
            if (!s["scan"].is_array() || s["scan"].size() != 2)
                throw config_error("search.scan", "expected [n_re, n_im]");
            scan_re = detail::integer_at(s["scan"][0], "search.scan[0]");
            scan_im = detail::integer_at(s["scan"][1], "search.scan[1]");
        }
    }

    Tolerances tol;
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) throw config_error("tolerances", "expected an object");
        detail::check_keys(t, "tolerances",
                           {"root_residual", "dedup", "merge", "normality_identity", "eigen_cap"});
        auto positive = [&](const char* key, double& slot) {
            if (t.contains(key)) {
                slot = detail::number_at(t[key], std::string("tolerances.") + key);
                if (!(slot > 0))
                    throw config_error(std::string("tolerances.") + key, "must be > 0");
            }
        };
        positive("root_residual", tol.root_residual);
        positive("dedup", tol.dedup);
        positive("merge", tol.merge);
        positive("normality_identity", tol.normality_identity);
        if (t.contains("eigen_cap")) {
            tol.eigen_cap = detail::integer_at(t["eigen_cap"], "tolerances.eigen_cap");
            if (tol.eigen_cap < 16) throw config_error("tolerances.eigen_cap", "must be >= 16");
        }
    }

    try {
        MultipointProblem problem(std::move(blocks), std::move(exts));
        SearchRegion region(re_lo, re_hi, im_lo, im_hi, scan_re, scan_im);
        return ProblemConfig{version, std::move(problem), m, region, tol};
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error("config", e.what());
    }
}

inline ProblemConfig parse_config_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw config_error("", "cannot open config file " + filename);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace opspec
