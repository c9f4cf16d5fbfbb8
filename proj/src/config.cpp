#include "vlab/config.hpp"

#include "vlab/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace vlab {

namespace {

Functional functional_from_string(const std::string& s, const char* where) {
    if (s == "J") return Functional::J;
    if (s == "Jinf") return Functional::Jinf;
    throw std::invalid_argument(std::string(where) + ": functional must be J or Jinf");
}

std::string functional_to_string(Functional f) {
    return f == Functional::J ? "J" : "Jinf";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "explicit") return Scheme::explicit_euler;
    if (s == "semi-implicit") return Scheme::semi_implicit;
    throw std::invalid_argument("flow: scheme must be explicit or semi-implicit");
}

std::string scheme_to_string(Scheme s) {
    return s == Scheme::explicit_euler ? "explicit" : "semi-implicit";
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    reject_unknown_keys(j, "config",
                        {"grid", "nonlinearity", "constants", "flow", "solve", "scan",
                         "verify", "check", "output_dir", "threads", "report_version"});

    RunConfig cfg;

    const auto& grid = j.at("grid");
    reject_unknown_keys(grid, "grid", {"N", "M", "L"});
    cfg.grid_n = grid.at("N").get<int>();
    cfg.grid_m = grid.at("M").get<int>();
    cfg.grid_l = grid.at("L").get<double>();
    cfg.make_grid(); // validate early

    cfg.nonlinearity = nonlin_from_json(j.at("nonlinearity"));

    if (j.contains("constants")) {
        cfg.constants = constants_from_json(j.at("constants"));
        cfg.constants->check(cfg.grid_n);
        if (static_cast<int>(cfg.constants->alpha.size()) !=
            cfg.nonlinearity.components())
            throw std::invalid_argument("constants: alpha arity does not match m");
    }

    if (j.contains("flow")) {
        const auto& flow = j.at("flow");
        reject_unknown_keys(flow, "flow",
                            {"scheme", "tau", "max_iters", "residual_tol", "energy_tol",
                             "backtracking", "max_halvings", "seed", "multistart",
                             "trace_stride"});
        if (flow.contains("scheme"))
            cfg.flow.scheme = scheme_from_string(flow.at("scheme").get<std::string>());
        cfg.flow.tau = flow.value("tau", cfg.flow.tau);
        cfg.flow.max_iters = flow.value("max_iters", cfg.flow.max_iters);
        cfg.flow.residual_tol = flow.value("residual_tol", cfg.flow.residual_tol);
        cfg.flow.energy_tol = flow.value("energy_tol", cfg.flow.energy_tol);
        cfg.flow.backtracking = flow.value("backtracking", cfg.flow.backtracking);
        cfg.flow.max_halvings = flow.value("max_halvings", cfg.flow.max_halvings);
        cfg.flow.seed = flow.value("seed", cfg.flow.seed);
        cfg.flow.multistart = flow.value("multistart", cfg.flow.multistart);
        cfg.flow.trace_stride = flow.value("trace_stride", cfg.flow.trace_stride);
        if (!(cfg.flow.tau > 0.0))
            throw std::invalid_argument("flow: tau must be positive");
        if (!(cfg.flow.residual_tol > 0.0) || !(cfg.flow.energy_tol > 0.0))
            throw std::invalid_argument("flow: tolerances must be positive");
        if (cfg.flow.max_iters < 1 || cfg.flow.multistart < 1)
            throw std::invalid_argument("flow: max_iters and multistart must be >= 1");
    }

    if (j.contains("solve")) {
        const auto& solve = j.at("solve");
        reject_unknown_keys(solve, "solve", {"c", "functional", "l_check"});
        cfg.solve.c = solve.value("c", cfg.solve.c);
        if (solve.contains("functional"))
            cfg.solve.functional =
                functional_from_string(solve.at("functional").get<std::string>(), "solve");
        cfg.solve.l_check = solve.value("l_check", false);
        if (!(cfg.solve.c > 0.0))
            throw std::invalid_argument("solve: c must be positive");
    }

    if (j.contains("scan")) {
        const auto& scan = j.at("scan");
        reject_unknown_keys(scan, "scan", {"c_values", "functional"});
        cfg.scan.c_values = scan.value("c_values", std::vector<double>{});
        if (scan.contains("functional"))
            cfg.scan.functional =
                functional_from_string(scan.at("functional").get<std::string>(), "scan");
    }

    if (j.contains("verify")) {
        const auto& verify = j.at("verify");
        reject_unknown_keys(verify, "verify",
                            {"c", "fractions", "lambdas", "delta_frac", "bound",
                             "tol_neg", "functional"});
        cfg.verify.c = verify.value("c", cfg.verify.c);
        cfg.verify.fractions = verify.value("fractions", cfg.verify.fractions);
        cfg.verify.lambdas = verify.value("lambdas", cfg.verify.lambdas);
        cfg.verify.delta_frac = verify.value("delta_frac", cfg.verify.delta_frac);
        cfg.verify.bound = verify.value("bound", cfg.verify.bound);
        cfg.verify.tol_neg = verify.value("tol_neg", cfg.verify.tol_neg);
        if (verify.contains("functional"))
            cfg.verify.functional = functional_from_string(
                verify.at("functional").get<std::string>(), "verify");
        if (!(cfg.verify.c > 0.0))
            throw std::invalid_argument("verify: c must be positive");
        for (double f : cfg.verify.fractions)
            if (!(f > 0.0) || !(f < 1.0))
                throw std::invalid_argument("verify: fractions must lie in (0,1)");
        for (double l : cfg.verify.lambdas)
            if (!(l > 0.0) || l > 1.0 + 1e-12)
                throw std::invalid_argument("verify: lambdas must lie in (0,1]");
        if (!(cfg.verify.delta_frac > 0.0) || !(cfg.verify.delta_frac < 0.5))
            throw std::invalid_argument("verify: delta_frac must lie in (0, 0.5)");
    }

    if (j.contains("check")) {
        const auto& check = j.at("check");
        reject_unknown_keys(check, "check",
                            {"samples", "r_max", "s_max", "seed", "a3_tol", "strict_eps"});
        cfg.check.samples = check.value("samples", cfg.check.samples);
        cfg.check.r_max = check.value("r_max", cfg.check.r_max);
        cfg.check.s_max = check.value("s_max", cfg.check.s_max);
        cfg.check.seed = check.value("seed", cfg.check.seed);
        cfg.check.a3_tol = check.value("a3_tol", cfg.check.a3_tol);
        cfg.check.strict_eps = check.value("strict_eps", cfg.check.strict_eps);
        if (cfg.check.samples == 0 || !(cfg.check.r_max > 0.0) || !(cfg.check.s_max > 0.0))
            throw std::invalid_argument("check: invalid sample plan");
    }

    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.report_version = j.value("report_version", cfg.report_version);
    if (cfg.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: JSON parse error in " + path.string() +
                                    ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["grid"] = {{"N", grid_n}, {"M", grid_m}, {"L", grid_l}};
    j["nonlinearity"] = nonlin_to_json(nonlinearity);
    if (constants) j["constants"] = constants_to_json(*constants);
    j["flow"] = {{"scheme", scheme_to_string(flow.scheme)},
                 {"tau", flow.tau},
                 {"max_iters", flow.max_iters},
                 {"residual_tol", flow.residual_tol},
                 {"energy_tol", flow.energy_tol},
                 {"backtracking", flow.backtracking},
                 {"max_halvings", flow.max_halvings},
                 {"seed", flow.seed},
                 {"multistart", flow.multistart},
                 {"trace_stride", flow.trace_stride}};
    j["solve"] = {{"c", solve.c},
                  {"functional", functional_to_string(solve.functional)},
                  {"l_check", solve.l_check}};
    j["scan"] = {{"c_values", scan.c_values},
                 {"functional", functional_to_string(scan.functional)}};
    j["verify"] = {{"c", verify.c},
                   {"fractions", verify.fractions},
                   {"lambdas", verify.lambdas},
                   {"delta_frac", verify.delta_frac},
                   {"bound", verify.bound},
                   {"tol_neg", verify.tol_neg},
                   {"functional", functional_to_string(verify.functional)}};
    j["check"] = {{"samples", check.samples},
                  {"r_max", check.r_max},
                  {"s_max", check.s_max},
                  {"seed", check.seed},
                  {"a3_tol", check.a3_tol},
                  {"strict_eps", check.strict_eps}};
    // output_dir is where results land, not an input to any number; it stays
    // out of the canonical form so relocated runs digest identically.
    j["threads"] = threads;
    j["report_version"] = report_version;
    return j;
}

std::string RunConfig::digest() const { return json_digest(to_json()); }

Grid RunConfig::make_grid() const { return Grid::make(grid_n, grid_m, grid_l); }

} // namespace vlab
