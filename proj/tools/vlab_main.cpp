// vlab: batch driver for constrained ground-state computation and the
// structural-inequality verifiers. One JSON config drives every subcommand;
// all artifacts land in the output directory as JSON/CSV/VFLD1 files.

#include "vlab/ccdiag.hpp"
#include "vlab/config.hpp"
#include "vlab/energy.hpp"
#include "vlab/flow.hpp"
#include "vlab/io.hpp"
#include "vlab/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitInconclusive = 4;

using vlab::Functional;
using vlab::RunConfig;
using vlab::Verdict;

int verdict_exit(Verdict v) {
    switch (v) {
    case Verdict::pass: return kExitPass;
    case Verdict::fail: return kExitFail;
    case Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitRuntime;
}

nlohmann::json base_report(const RunConfig& cfg, const std::string& command) {
    return {{"command", command},
            {"config_digest", cfg.digest()},
            {"report_version", cfg.report_version}};
}

nlohmann::json runs_json(const vlab::MultistartResult& result) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : result.runs)
        runs.push_back({{"index", r.index},
                        {"style", r.style},
                        {"seed", r.seed},
                        {"energy", r.energy},
                        {"converged", r.converged},
                        {"iterations", r.iterations}});
    return runs;
}

int cmd_solve(const RunConfig& cfg) {
    const vlab::Grid grid = cfg.make_grid();
    auto result = vlab::solve_multistart(grid, cfg.solve.c, cfg.nonlinearity, cfg.flow,
                                         cfg.solve.functional, nullptr, cfg.threads);
    const auto& best = result.best;

    const std::filesystem::path out(cfg.output_dir);
    vlab::write_field(out / "minimizer.vfld", best.minimizer);
    vlab::write_trace_csv(out / "trace.csv", best.trace);

    nlohmann::json report = base_report(cfg, "solve");
    report["c"] = cfg.solve.c;
    report["functional"] = cfg.solve.functional == Functional::J ? "J" : "Jinf";
    report["energy"] = best.energy;
    report["kinetic"] = best.kinetic;
    report["potential"] = best.potential;
    report["multiplier"] = best.multiplier;
    report["residual"] = best.residual;
    report["iterations"] = best.iterations;
    report["converged"] = best.converged;
    report["stop_reason"] = best.stop_reason;
    report["mass_error"] = best.mass_error;
    report["multiple_minima"] = result.multiple_minima_flag;
    report["runs"] = runs_json(result);

    if (cfg.solve.l_check) {
        // Box-size sensitivity: re-solve on a 1.5x wider box at the same
        // resolution and report the energy drift.
        int m_wide = static_cast<int>(cfg.grid_m * 1.5);
        if (m_wide % 2 != 0) ++m_wide;
        const vlab::Grid wide = vlab::Grid::make(cfg.grid_n, m_wide, cfg.grid_l * 1.5);
        auto wide_result = vlab::solve_multistart(wide, cfg.solve.c, cfg.nonlinearity,
                                                  cfg.flow, cfg.solve.functional,
                                                  nullptr, cfg.threads);
        report["l_check"] = {{"L", cfg.grid_l * 1.5},
                             {"M", m_wide},
                             {"energy", wide_result.best.energy},
                             {"energy_drift",
                              wide_result.best.energy - best.energy}};
    }

    vlab::write_json(out / "solve_report.json", report);
    return best.converged ? kExitPass : kExitRuntime;
}

int cmd_scan(const RunConfig& cfg) {
    const vlab::Grid grid = cfg.make_grid();
    auto points = vlab::scan_mass(grid, cfg.scan.c_values, cfg.nonlinearity, cfg.flow,
                                  cfg.scan.functional, cfg.threads);
    const std::filesystem::path out(cfg.output_dir);
    vlab::write_scan_csv(out / "scan.csv", points);

    nlohmann::json report = base_report(cfg, "scan");
    nlohmann::json rows = nlohmann::json::array();
    bool all_converged = true;
    for (const auto& p : points) {
        rows.push_back({{"c", p.c},
                        {"energy", p.energy},
                        {"multiplier", p.multiplier},
                        {"residual", p.residual},
                        {"converged", p.converged}});
        all_converged = all_converged && p.converged;
    }
    report["points"] = rows;
    report["all_converged"] = all_converged;
    vlab::write_json(out / "scan_report.json", report);
    return all_converged ? kExitPass : kExitRuntime;
}

int cmd_verify(const RunConfig& cfg, const std::string& lemma) {
    const vlab::VerifyContext ctx{cfg.make_grid(), cfg.nonlinearity, cfg.flow,
                                  cfg.threads};
    const double c = cfg.verify.c;

    vlab::VerificationReport report;
    if (lemma == "negativity") {
        report = vlab::verify_negativity(ctx, c, cfg.verify.lambdas, cfg.verify.tol_neg,
                                         cfg.constants ? &*cfg.constants : nullptr);
    } else if (lemma == "subadditivity") {
        report = vlab::verify_subadditivity(ctx, c, cfg.verify.fractions,
                                            cfg.verify.functional);
    } else if (lemma == "comparison") {
        report = vlab::verify_comparison(ctx, c);
    } else if (lemma == "continuity") {
        report = vlab::verify_continuity(ctx, c, cfg.verify.delta_frac * c);
    } else if (lemma == "supercritical") {
        report = vlab::probe_supercritical(ctx, c, cfg.verify.bound);
    } else if (lemma == "critical-threshold") {
        if (!cfg.constants)
            throw std::invalid_argument("verify critical-threshold: constants.A required");
        report = vlab::critical_threshold(ctx, cfg.constants->A).report;
    } else {
        throw std::invalid_argument("verify: unknown lemma '" + lemma + "'");
    }

    nlohmann::json j = base_report(cfg, "verify");
    j.update(report.to_json());
    vlab::write_json(std::filesystem::path(cfg.output_dir) /
                         ("verify_" + lemma + "_report.json"),
                     j);
    std::cout << lemma << ": " << vlab::to_string(report.verdict) << "\n";
    return verdict_exit(report.verdict);
}

int cmd_check_assumptions(const RunConfig& cfg) {
    if (!cfg.constants)
        throw std::invalid_argument("check-assumptions: constants section required");
    auto report = vlab::check_assumptions(cfg.nonlinearity, *cfg.constants, cfg.grid_n,
                                          cfg.check);

    nlohmann::json j = base_report(cfg, "check-assumptions");
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.results) {
        nlohmann::json row = {{"name", r.name},
                              {"margin", r.margin},
                              {"pass", r.pass},
                              {"note", r.note}};
        row["witness"] = {{"x", r.witness_x},
                          {"s", r.witness_s},
                          {"theta", r.witness_theta}};
        rows.push_back(row);
    }
    j["assumptions"] = rows;
    j["strict_fraction"] = report.strict_fraction;
    j["all_pass"] = report.all_pass;
    vlab::write_json(std::filesystem::path(cfg.output_dir) / "assumptions_report.json", j);

    for (const auto& r : report.results)
        std::cout << r.name << ": " << (r.pass ? "ok" : "VIOLATED")
                  << " (margin " << r.margin << ")\n";
    return report.all_pass ? kExitPass : kExitFail;
}

int cmd_probe_dilation(const RunConfig& cfg) {
    const vlab::VerifyContext ctx{cfg.make_grid(), cfg.nonlinearity, cfg.flow,
                                  cfg.threads};
    auto report = vlab::verify_negativity(ctx, cfg.verify.c, cfg.verify.lambdas,
                                          cfg.verify.tol_neg,
                                          cfg.constants ? &*cfg.constants : nullptr);

    std::string csv = "lambda,energy\n";
    for (const auto& row : report.measurements["curve"]) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n",
                      row["lambda"].get<double>(), row["energy"].get<double>());
        csv += buf;
    }
    const std::filesystem::path out(cfg.output_dir);
    vlab::atomic_write(out / "dilation_curve.csv", csv);

    nlohmann::json j = base_report(cfg, "probe-dilation");
    j.update(report.to_json());
    vlab::write_json(out / "dilation_report.json", j);
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vlab: constrained minimizers and structural-inequality checks "
                 "for coupled fields on the mass sphere"};
    app.require_subcommand(1);
    app.fallthrough(); // let global flags appear after the subcommand

    std::string config_path;
    std::string out_override;
    int threads_override = 0;
    std::optional<std::uint64_t> seed_override;

    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_override, "output directory (overrides config and env)");
    app.add_option("--threads", threads_override, "worker threads (overrides config)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "seed (overrides config)");

    auto* sub_solve = app.add_subcommand("solve", "compute a constrained minimizer");
    auto* sub_scan = app.add_subcommand("scan", "minimize along a list of masses");
    auto* sub_verify = app.add_subcommand("verify", "check one structural inequality");
    std::string lemma;
    sub_verify->add_option("lemma", lemma,
                           "negativity | subadditivity | comparison | continuity | "
                           "supercritical | critical-threshold")
        ->required();
    auto* sub_check =
        app.add_subcommand("check-assumptions", "sampled growth-assumption margins");
    auto* sub_probe =
        app.add_subcommand("probe-dilation", "energy along the dilation curve");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = RunConfig::load(config_path);
        if (const char* env = std::getenv("VLAB_OUT_DIR")) cfg.output_dir = env;
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (threads_override > 0) cfg.threads = threads_override;
        if (seed_opt->count() > 0) cfg.flow.seed = seed_value;

        if (sub_solve->parsed()) return cmd_solve(cfg);
        if (sub_scan->parsed()) return cmd_scan(cfg);
        if (sub_verify->parsed()) return cmd_verify(cfg, lemma);
        if (sub_check->parsed()) return cmd_check_assumptions(cfg);
        if (sub_probe->parsed()) return cmd_probe_dilation(cfg);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
}
