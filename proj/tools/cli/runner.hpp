#ifndef QDA_CLI_RUNNER_HPP
#define QDA_CLI_RUNNER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "format.hpp"

namespace qda::cli {

enum class Engine { analytic, oracle, both };

/// A fully resolved run request. All rates and frequencies are in
/// gamma_a units and the sweep axis is the laser detuning from the lower
/// dressed state.
struct RunSpec {
    Engine engine = Engine::analytic;
    double gamma_b = 1.0;
    double j = 0.5;
    double delta_ab = 0.0;
    double linewidth = 1e-3;
    double from = -2.0;
    double to = 3.0;
    int points = 1001;
    std::vector<std::string> quantities = {"p_total", "w_abs"};
    std::vector<std::int64_t> photons = {1, 10, 100};
    double rel_tol = 1e-10;
    bool include_cross = false;
    int threads = 1;
    bool cascade_work = false; // add w_cascade_N next to p_cascade_N

    void validate() const; // throws std::invalid_argument
};

const std::vector<std::string>& known_quantities();
bool is_known_quantity(const std::string& name);

/// Column names for the sweep table implied by the spec. Depends only on
/// the requested quantities, photon counts, and engine, never on which
/// cells end up computable.
std::vector<std::string> column_names(const RunSpec& spec);

struct SweepOutcome {
    Table table;
    int failures = 0; // points where at least one engine threw
};

/// Evaluate the sweep grid. Points run concurrently when spec.threads > 1;
/// results are buffered by index so the table is identical regardless of
/// thread count. Numerical failures leave the affected cells blank.
SweepOutcome run_sweep(const RunSpec& spec);

struct PointOutcome {
    nlohmann::ordered_json doc;
    double max_residual = 0.0;
    bool numerical_failure = false;
};

/// Evaluate a single detuning and assemble the full JSON report
/// (energetics, adaptation breakdown, cross-engine residuals for
/// engine=both).
PointOutcome run_point(const RunSpec& spec, double delta_l);

} // namespace qda::cli

#endif
