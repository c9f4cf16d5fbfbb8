#pragma once

#include "vlab/energy.hpp"
#include "vlab/flow.hpp"
#include "vlab/nonlin.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vlab {

/// One JSON configuration drives every subcommand. Parsing is strict:
/// unknown keys anywhere are rejected, and all module preconditions that can
/// be checked without computing are checked here.
struct RunConfig {
    int grid_n = 1;
    int grid_m = 256;
    double grid_l = 16.0;

    NonlinearitySpec nonlinearity = NonlinearitySpec::paper_example(
        2, 1.0, 1.0, 1.0, {{1.0, 1.0}});
    std::optional<AssumptionConstants> constants;
    FlowConfig flow;

    struct SolveParams {
        double c = 1.0;
        Functional functional = Functional::J;
        bool l_check = false; // re-solve on a 1.5x wider box, report the drift
    };
    struct ScanParams {
        std::vector<double> c_values;
        Functional functional = Functional::J;
    };
    struct VerifyParams {
        double c = 1.0;
        std::vector<double> fractions = {0.3, 0.5, 0.7};
        std::vector<double> lambdas = {1.0, 0.5, 0.25, 0.125};
        double delta_frac = 0.01;
        double bound = 1000.0;
        double tol_neg = 1e-8;
        Functional functional = Functional::J;
    };

    SolveParams solve;
    ScanParams scan;
    VerifyParams verify;
    SamplePlan check;

    std::string output_dir = "out";
    int threads = 1;
    int report_version = 1;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);

    /// Canonical re-serialization; the digest of this is stamped on reports.
    nlohmann::json to_json() const;
    std::string digest() const;

    Grid make_grid() const;
};

} // namespace vlab
