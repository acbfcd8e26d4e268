// opspec command line tool.
//
// Subcommands:
//   check           admissibility report per block
//   spectrum        point spectra by the analytic and/or discrete engine
//   normality       grid-level normality witnesses per block
//   counterexample  divergent direct-sum norm series demonstration
//
// Machine-readable output (CSV or JSON) goes to stdout or --out; progress
// and human-oriented notes go to stderr. Identical inputs produce
// byte-identical output. Exit codes: 0 success, 1 mathematical property
// violated, 2 invalid input, 3 resource cap exceeded, 4 internal failure.

#include <CLI11.hpp>

#include <opspec/opspec.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace opspec;

int thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("OPSPEC_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw validation_error("OPSPEC_THREADS must be a positive integer");
        hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return static_cast<int>(hw);
}

// Runs fn(n) for every 1-based block index, at most `threads` at a time.
// Results are collected per index so output order never depends on timing.
template <typename Fn>
auto run_per_block(int count, int threads, Fn&& fn)
    -> std::vector<decltype(fn(1))> {
    using R = decltype(fn(1));
    std::vector<R> results(count);
    if (threads <= 1 || count <= 1) {
        for (int n = 1; n <= count; ++n) results[n - 1] = fn(n);
        return results;
    }
    std::vector<std::future<R>> slots;
    int next = 1;
    while (next <= count || !slots.empty()) {
        while (next <= count && static_cast<int>(slots.size()) < threads) {
            slots.push_back(std::async(std::launch::async, fn, next));
            ++next;
        }
        int n_done = next - static_cast<int>(slots.size());
        results[n_done - 1] = slots.front().get();
        slots.erase(slots.begin());
    }
    return results;
}

void write_machine(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file " + out_path);
    out << text;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct CommonFlags {
    std::string config_path;
    std::string format = "csv";
    std::string out_path;
    int m_override = 0;
    std::uint64_t seed = 20250816;
};

ProblemConfig load_config(const CommonFlags& fl) {
    if (fl.config_path.empty()) throw validation_error("--config FILE is required");
    ProblemConfig cfg = parse_config_file(fl.config_path);
    if (fl.m_override > 0) {
        if (fl.m_override < 5) throw validation_error("--m must be at least 5");
        cfg.m = fl.m_override;
    }
    return cfg;
}

// ---------------------------------------------------------------- check --

int cmd_check(const CommonFlags& fl) {
    ProblemConfig cfg = load_config(fl);
    const auto& prob = cfg.problem;

    std::vector<AdmissibilityReport> reps;
    for (int n = 1; n <= prob.size(); ++n) {
        auto [blk, w] = project_block(prob, n);
        reps.push_back(admissibility_check(*w, blk->coefficient));
    }

    bool all_ok = true;
    std::string text;
    if (fl.format == "csv") {
        text = "block,w_residual,v_residual,commutator_norm,admissible\n";
        for (int n = 1; n <= prob.size(); ++n) {
            const auto& r = reps[n - 1];
            text += std::to_string(n) + "," + format_sig(r.w_residual) + "," +
                    format_sig(r.v_residual) + "," + format_sig(r.commutator_norm) +
                    "," + bool_str(r.admissible) + "\n";
            all_ok = all_ok && r.admissible;
        }
    } else {
        nlohmann::json doc;
        doc["schema_version"] = "1";
        auto& rows = doc["blocks"];
        rows = nlohmann::json::array();
        for (int n = 1; n <= prob.size(); ++n) {
            const auto& r = reps[n - 1];
            rows.push_back({{"block", n},
                            {"w_residual", r.w_residual},
                            {"v_residual", r.v_residual},
                            {"commutator_norm", r.commutator_norm},
                            {"admissible", r.admissible}});
            all_ok = all_ok && r.admissible;
        }
        doc["all_admissible"] = all_ok;
        text = doc.dump(2) + "\n";
    }
    write_machine(text, fl.out_path);
    std::fprintf(stderr, "check: %d block(s), %s\n", prob.size(),
                 all_ok ? "all admissible" : "non-admissible block present");
    return all_ok ? 0 : 1;
}

// ------------------------------------------------------------- spectrum --

struct BlockSpectra {
    std::vector<Eigenvalue> analytic;
    std::vector<Eigenvalue> discrete;
};

int cmd_spectrum(const CommonFlags& fl, const std::string& engine) {
    ProblemConfig cfg = load_config(fl);
    const auto& prob = cfg.problem;
    const bool want_a = engine == "analytic" || engine == "both";
    const bool want_d = engine == "discrete" || engine == "both";
    const double margin = 1e-7 * (1.0 + cfg.region.diameter());

    auto spectra = run_per_block(prob.size(), thread_budget(), [&](int n) {
        auto [blk, w] = project_block(prob, n);
        BlockSpectra s;
        if (want_a) {
            s.analytic = det_root_search(*blk, *w, cfg.region, cfg.tol.root_residual);
            for (auto& e : s.analytic) e.block_index = n;
        }
        if (want_d) {
            DiscreteOperator op = discretize(*blk, *w, cfg.m);
            auto evs = eigen_spectrum(op, cfg.tol.eigen_cap);
            for (auto& e : evs) {
                e.block_index = n;
                if (cfg.region.contains(e.lambda, margin)) s.discrete.push_back(e);
            }
        }
        return s;
    });

    std::vector<SpectrumRow> rows;
    auto push_rows = [&rows](const std::vector<Eigenvalue>& evs, Engine eng, int block) {
        for (const auto& e : evs)
            rows.push_back({block, to_string(eng), e.lambda.real(), e.lambda.imag(),
                            e.multiplicity, e.residual});
    };
    auto push_union = [&](bool analytic_side) {
        std::vector<std::vector<Eigenvalue>> per;
        for (const auto& s : spectra) per.push_back(analytic_side ? s.analytic : s.discrete);
        for (const auto& a : aggregate_spectrum(per, cfg.tol.merge))
            rows.push_back({0, analytic_side ? "analytic" : "discrete", a.lambda.real(),
                            a.lambda.imag(), a.multiplicity, a.residual});
    };
    for (int n = 1; n <= prob.size(); ++n) {
        if (want_a) push_rows(spectra[n - 1].analytic, Engine::analytic, n);
        if (want_d) push_rows(spectra[n - 1].discrete, Engine::discrete, n);
    }
    if (want_a) push_union(true);
    if (want_d) push_union(false);
    sort_rows(rows);

    std::string text = fl.format == "csv" ? spectrum_csv(rows)
                                          : spectrum_json(rows).dump(2) + "\n";
    write_machine(text, fl.out_path);

    if (want_a && want_d) {
        std::fprintf(stderr, "pairing (analytic vs discrete, per block):\n");
        for (int n = 1; n <= prob.size(); ++n) {
            for (const auto& a : spectra[n - 1].analytic) {
                double best = -1.0;
                const Eigenvalue* hit = nullptr;
                for (const auto& d : spectra[n - 1].discrete) {
                    double dist = std::abs(a.lambda - d.lambda);
                    if (!hit || dist < best) { hit = &d; best = dist; }
                }
                if (hit)
                    std::fprintf(stderr,
                                 "  block %d  analytic (%s, %s)  discrete (%s, %s)  deviation %s\n",
                                 n, format_sig(a.lambda.real()).c_str(),
                                 format_sig(a.lambda.imag()).c_str(),
                                 format_sig(hit->lambda.real()).c_str(),
                                 format_sig(hit->lambda.imag()).c_str(),
                                 format_sig(best, 6).c_str());
                else
                    std::fprintf(stderr, "  block %d  analytic (%s, %s)  unmatched\n", n,
                                 format_sig(a.lambda.real()).c_str(),
                                 format_sig(a.lambda.imag()).c_str());
            }
        }
    }
    std::fprintf(stderr, "spectrum: %zu row(s)\n", rows.size());
    return 0;
}

// ------------------------------------------------------------ normality --

struct NormalityRow {
    double matrix_residual;
    double refined_residual;
    double identity_residual;
    bool matrix_ok;
    bool normal;
};

int cmd_normality(const CommonFlags& fl) {
    ProblemConfig cfg = load_config(fl);
    const auto& prob = cfg.problem;

    // The identity witness scales like h^2 for admissible blocks, so it is
    // always evaluated on a fixed fine grid; grid.m governs the matrix
    // witness and its refinement step.
    const int identity_m = 401;
    const int samples = 20;

    auto rows = run_per_block(prob.size(), thread_budget(), [&](int n) {
        auto [blk, w] = project_block(prob, n);
        NormalityRow row{};
        auto rep = admissibility_check(*w, blk->coefficient);
        row.matrix_residual = normality_residual(discretize(*blk, *w, cfg.m));
        row.refined_residual = normality_residual(discretize(*blk, *w, 2 * cfg.m - 1));
        row.identity_residual =
            normality_identity_on_domain(*blk, *w, samples, identity_m, fl.seed);
        row.matrix_ok = row.matrix_residual <= 1e-10 ||
                        row.refined_residual <= 0.75 * row.matrix_residual;
        row.normal = rep.admissible && row.matrix_ok &&
                     row.identity_residual <= cfg.tol.normality_identity;
        return row;
    });

    bool all_ok = true;
    for (const auto& r : rows) all_ok = all_ok && r.normal;

    std::string text;
    if (fl.format == "csv") {
        text = "block,normality_residual,refined_residual,identity_residual,normal\n";
        for (int n = 1; n <= prob.size(); ++n) {
            const auto& r = rows[n - 1];
            text += std::to_string(n) + "," + format_sig(r.matrix_residual) + "," +
                    format_sig(r.refined_residual) + "," +
                    format_sig(r.identity_residual) + "," + bool_str(r.normal) + "\n";
        }
    } else {
        nlohmann::json doc;
        doc["schema_version"] = "1";
        auto& jrows = doc["blocks"];
        jrows = nlohmann::json::array();
        for (int n = 1; n <= prob.size(); ++n) {
            const auto& r = rows[n - 1];
            jrows.push_back({{"block", n},
                             {"normality_residual", r.matrix_residual},
                             {"refined_residual", r.refined_residual},
                             {"identity_residual", r.identity_residual},
                             {"normal", r.normal}});
        }
        doc["all_normal"] = all_ok;
        text = doc.dump(2) + "\n";
    }
    write_machine(text, fl.out_path);
    std::fprintf(stderr, "normality: %d block(s), %s\n", prob.size(),
                 all_ok ? "all witnesses pass" : "witness violation present");
    return all_ok ? 0 : 1;
}

// -------------------------------------------------------- counterexample --

int cmd_counterexample(const CommonFlags& fl, const CounterexampleSpec& spec,
                       const std::string& plot_path) {
    auto norms = counterexample_norms(spec);
    std::vector<int> n_list(spec.blocks);
    for (int n = 1; n <= spec.blocks; ++n) n_list[n - 1] = n;
    auto growth = direct_sum_membership(norms.closed_form, n_list);

    std::string text;
    if (fl.format == "csv") {
        text = "n,alpha_n,c_n,norm_sq_closed,norm_sq_quadrature,partial_sum\n";
        for (int n = 1; n <= spec.blocks; ++n)
            text += std::to_string(n) + "," + format_sig(counterexample_alpha(spec, n)) +
                    "," + format_sig(counterexample_c(spec, n)) + "," +
                    format_sig(norms.closed_form[n - 1]) + "," +
                    format_sig(norms.quadrature[n - 1]) + "," +
                    format_sig(norms.partial_sums[n - 1]) + "\n";
    } else {
        nlohmann::json doc;
        doc["schema_version"] = "1";
        doc["alpha_power"] = spec.alpha_power;
        doc["c_power"] = spec.c_power;
        doc["length"] = spec.length;
        doc["growth_exponent"] = growth.exponent;
        doc["divergent"] = growth.divergent;
        auto& jrows = doc["blocks"];
        jrows = nlohmann::json::array();
        for (int n = 1; n <= spec.blocks; ++n)
            jrows.push_back({{"n", n},
                             {"alpha_n", counterexample_alpha(spec, n)},
                             {"c_n", counterexample_c(spec, n)},
                             {"norm_sq_closed", norms.closed_form[n - 1]},
                             {"norm_sq_quadrature", norms.quadrature[n - 1]},
                             {"partial_sum", norms.partial_sums[n - 1]}});
        text = doc.dump(2) + "\n";
    }
    write_machine(text, fl.out_path);

    if (!plot_path.empty()) {
        std::string plot;
        for (int n = 1; n <= spec.blocks; ++n)
            plot += std::to_string(n) + " " + format_sig(norms.partial_sums[n - 1]) + "\n";
        std::ofstream out(plot_path, std::ios::binary);
        if (!out) throw validation_error("cannot open plot file " + plot_path);
        out << plot;
    }
    std::fprintf(stderr, "counterexample: N=%d growth exponent %.4f, %s\n", spec.blocks,
                 growth.exponent,
                 growth.divergent ? "series diverges (candidate escapes the domain)"
                                  : "series converges");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"opspec: spectra and normality of multipoint differential operators"};
    app.require_subcommand(1);

    CommonFlags fl;
    std::string engine = "both";
    CounterexampleSpec cx;
    int cx_blocks = 20;
    std::string plot_path;

    auto add_common = [&fl](CLI::App* cmd, bool with_seed) {
        cmd->add_option("--config", fl.config_path, "JSON problem description");
        cmd->add_option("--format", fl.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", fl.out_path, "write machine output to FILE");
        cmd->add_option("--m", fl.m_override, "grid size override");
        if (with_seed) cmd->add_option("--seed", fl.seed, "sampling seed");
    };

    CLI::App* c_check = app.add_subcommand("check", "admissibility of each block");
    add_common(c_check, false);

    CLI::App* c_spec = app.add_subcommand("spectrum", "point spectra and their union");
    add_common(c_spec, false);
    c_spec->add_option("--engine", engine, "analytic, discrete or both")
        ->check(CLI::IsMember({"analytic", "discrete", "both"}));

    CLI::App* c_norm = app.add_subcommand(
        "normality", "grid-level normality witnesses (identity witness at m=401)");
    add_common(c_norm, true);

    CLI::App* c_cx = app.add_subcommand("counterexample",
                                        "divergent direct-sum norm series");
    c_cx->add_option("--format", fl.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    c_cx->add_option("--out", fl.out_path, "write machine output to FILE");
    c_cx->add_option("--m", cx_blocks, "number of blocks N")->check(CLI::PositiveNumber);
    c_cx->add_option("--alpha-power", cx.alpha_power, "alpha_n = n^p");
    c_cx->add_option("--c-power", cx.c_power, "c_n ~ n^q");
    c_cx->add_option("--length", cx.length, "interval length per block");
    c_cx->add_option("--plot-out", plot_path, "two-column N vs partial-sum file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_check)) return cmd_check(fl);
        if (app.got_subcommand(c_spec)) return cmd_spectrum(fl, engine);
        if (app.got_subcommand(c_norm)) return cmd_normality(fl);
        cx.blocks = cx_blocks;
        return cmd_counterexample(fl, cx, plot_path);
    } catch (const resource_cap_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const boundary_encoding_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}
