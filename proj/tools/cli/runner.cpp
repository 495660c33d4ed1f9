#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "qda/adaptation.hpp"
#include "qda/analytic.hpp"
#include "qda/errors.hpp"
#include "qda/model.hpp"
#include "qda/oracle.hpp"
#include "qda/pulse.hpp"

namespace qda::cli {

namespace {

SiteSystem make_system(const RunSpec& spec) {
    return SiteSystem(0.5 * spec.delta_ab, -0.5 * spec.delta_ab, spec.j, 1.0,
                      spec.gamma_b);
}

struct EngineResult {
    std::optional<EnergeticsReport> report;
    std::optional<QdaBreakdown> breakdown;
    bool attempted = false;
};

EngineResult eval_analytic(const DressedFrame& frame, const ExpPulse& pulse) {
    EngineResult out;
    out.attempted = true;
    EnergeticsReport r = closed_form_report(frame, pulse);
    out.breakdown = qda_breakdown(frame, r);
    out.report = std::move(r);
    return out;
}

EngineResult eval_oracle(const DressedFrame& frame, const ExpPulse& pulse,
                         const RunSpec& spec) {
    EngineResult out;
    out.attempted = true;
    IntegrationOptions opts;
    opts.rel_tol = spec.rel_tol;
    opts.include_cross = spec.include_cross;
    EnergeticsReport r = oracle_report(frame, exp_envelope(pulse), opts);
    out.breakdown = qda_breakdown(frame, r);
    out.report = std::move(r);
    return out;
}

// Base column value for one engine result; blank when the quantity is
// not provided by that engine (w_reac analytically, w_so/w_coh off the
// degenerate-sites manifold) or the point failed.
std::optional<double> base_value(const std::string& name,
                                 const EngineResult& er) {
    if (!er.report) return std::nullopt;
    const EnergeticsReport& r = *er.report;
    if (name.rfind("p_cascade_", 0) == 0)
        return cascade(r.p_total, r.w_abs, std::stoll(name.substr(10))).p_n;
    if (name.rfind("w_cascade_", 0) == 0)
        return cascade(r.p_total, r.w_abs, std::stoll(name.substr(10))).w_n;
    if (name == "p_total") return r.p_total;
    if (name == "p_lambda_plus") return r.p_lambda_plus;
    if (name == "p_lambda_minus") return r.p_lambda_minus;
    if (name == "rho_pm") return r.rho_pm;
    if (name == "w_abs") return r.w_abs;
    if (name == "w_reac") return r.w_reac;
    if (name == "w_so") return r.w_so;
    if (name == "w_coh") return r.w_coh;
    if (name == "deviation") return er.breakdown->deviation;
    throw std::logic_error("unknown base column: " + name);
}

double cross_residual(double a, double o) {
    return std::abs(a - o) / std::max({std::abs(a), std::abs(o), 1e-3});
}

// Base names a quantity expands to (cascade quantities get one column
// per photon count).
std::vector<std::string> expand_quantity(const RunSpec& spec,
                                         const std::string& q) {
    if (q != "p_cascade") return {q};
    std::vector<std::string> names;
    for (const std::int64_t n : spec.photons) {
        names.push_back("p_cascade_" + std::to_string(n));
        if (spec.cascade_work) names.push_back("w_cascade_" + std::to_string(n));
    }
    return names;
}

std::vector<std::string> base_columns(const RunSpec& spec) {
    std::vector<std::string> names;
    for (const auto& q : spec.quantities)
        for (auto& n : expand_quantity(spec, q)) names.push_back(std::move(n));
    return names;
}

std::vector<std::optional<double>> evaluate_cells(const RunSpec& spec,
                                                  const DressedFrame& frame,
                                                  double delta_l,
                                                  bool& failed) {
    const ExpPulse pulse(spec.linewidth, frame.omega_minus + delta_l);
    EngineResult analytic, oracle;
    try {
        if (spec.engine != Engine::oracle) analytic = eval_analytic(frame, pulse);
    } catch (const NumericalError&) {
        failed = true;
    }
    try {
        if (spec.engine != Engine::analytic)
            oracle = eval_oracle(frame, pulse, spec);
    } catch (const NumericalError&) {
        failed = true;
    }

    std::vector<std::optional<double>> cells;
    for (const auto& name : base_columns(spec)) {
        if (spec.engine == Engine::analytic) {
            cells.push_back(base_value(name, analytic));
        } else if (spec.engine == Engine::oracle) {
            cells.push_back(base_value(name, oracle));
        } else {
            const auto a = base_value(name, analytic);
            const auto o = base_value(name, oracle);
            cells.push_back(a);
            cells.push_back(o);
            if (a && o)
                cells.push_back(cross_residual(*a, *o));
            else
                cells.push_back(std::nullopt);
        }
    }
    return cells;
}

nlohmann::ordered_json report_json(const EnergeticsReport& r) {
    nlohmann::ordered_json j;
    j["p_lambda_plus"] = r.p_lambda_plus;
    j["p_lambda_minus"] = r.p_lambda_minus;
    j["rho_pm"] = r.rho_pm;
    j["p_total"] = r.p_total;
    j["w_abs"] = r.w_abs;
    j["w_reac"] = r.w_reac ? nlohmann::ordered_json(*r.w_reac)
                           : nlohmann::ordered_json(nullptr);
    j["w_so"] = r.w_so ? nlohmann::ordered_json(*r.w_so)
                       : nlohmann::ordered_json(nullptr);
    j["w_coh"] = r.w_coh ? nlohmann::ordered_json(*r.w_coh)
                         : nlohmann::ordered_json(nullptr);
    j["residual_qda"] = r.residual_qda;
    j["residual_sum"] = r.residual_sum;
    j["p_total_clipped"] = r.p_total_clipped;
    return j;
}

nlohmann::ordered_json breakdown_json(const QdaBreakdown& b) {
    nlohmann::ordered_json j;
    j["generalized_rhs"] = b.generalized_rhs;
    j["standard_rhs"] = b.standard_rhs;
    j["four_term"] = b.four_term;
    j["four_term_sum"] = b.four_term_sum;
    j["deviation"] = b.deviation;
    j["branch_resolved"] = b.branch_resolved;
    j["w_so"] = b.w_so ? nlohmann::ordered_json(*b.w_so)
                       : nlohmann::ordered_json(nullptr);
    j["w_coh"] = b.w_coh ? nlohmann::ordered_json(*b.w_coh)
                         : nlohmann::ordered_json(nullptr);
    return j;
}

nlohmann::ordered_json engine_json(const EngineResult& er) {
    nlohmann::ordered_json j;
    j["report"] = report_json(*er.report);
    j["breakdown"] = breakdown_json(*er.breakdown);
    return j;
}

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::analytic: return "analytic";
        case Engine::oracle: return "oracle";
        default: return "both";
    }
}

} // namespace

const std::vector<std::string>& known_quantities() {
    static const std::vector<std::string> names = {
        "p_total", "p_lambda_plus", "p_lambda_minus", "rho_pm", "w_abs",
        "w_reac", "w_so", "w_coh", "deviation", "p_cascade"};
    return names;
}

bool is_known_quantity(const std::string& name) {
    const auto& k = known_quantities();
    return std::find(k.begin(), k.end(), name) != k.end();
}

void RunSpec::validate() const {
    if (!(std::isfinite(gamma_b) && gamma_b > 0.0))
        throw std::invalid_argument("gamma-b must be positive and finite");
    if (!std::isfinite(j) || !std::isfinite(delta_ab))
        throw std::invalid_argument("j and delta-ab must be finite");
    if (j == 0.0 && delta_ab == 0.0)
        throw std::invalid_argument(
            "j = 0 with delta-ab = 0 leaves the excited manifold degenerate");
    if (!(std::isfinite(linewidth) && linewidth > 0.0))
        throw std::invalid_argument("linewidth must be positive and finite");
    if (points < 2) throw std::invalid_argument("points must be >= 2");
    if (!(std::isfinite(from) && std::isfinite(to) && from < to))
        throw std::invalid_argument("sweep range requires finite from < to");
    if (quantities.empty()) throw std::invalid_argument("no quantities requested");
    for (const auto& q : quantities)
        if (!is_known_quantity(q))
            throw std::invalid_argument("unknown quantity: " + q);
    for (const std::int64_t n : photons)
        if (n < 1) throw std::invalid_argument("photon counts must be >= 1");
    if (!(rel_tol > 0.0) || rel_tol > 1e-3)
        throw std::invalid_argument("rel-tol must be in (0, 1e-3]");
    if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

std::vector<std::string> column_names(const RunSpec& spec) {
    std::vector<std::string> names;
    for (const auto& base : base_columns(spec)) {
        if (spec.engine == Engine::both) {
            names.push_back(base + "_analytic");
            names.push_back(base + "_oracle");
            names.push_back("residual_" + base);
        } else {
            names.push_back(base);
        }
    }
    return names;
}

SweepOutcome run_sweep(const RunSpec& spec) {
    spec.validate();
    const DressedFrame frame = diagonalize(make_system(spec));
    const int n = spec.points;

    SweepOutcome out;
    out.table.axis_name = "delta_l_minus_ratio";
    out.table.columns = column_names(spec);
    out.table.axis.resize(n);
    out.table.rows.resize(n);

    std::atomic<int> next{0};
    std::atomic<int> failures{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        try {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                const double dl =
                    spec.from + (spec.to - spec.from) * i / (n - 1);
                out.table.axis[i] = dl;
                bool failed = false;
                out.table.rows[i] = evaluate_cells(spec, frame, dl, failed);
                if (failed) failures.fetch_add(1);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    int n_threads = spec.threads;
    if (n_threads == 0)
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, n);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    out.failures = failures.load();
    return out;
}

PointOutcome run_point(const RunSpec& spec, double delta_l) {
    spec.validate();
    if (!std::isfinite(delta_l))
        throw std::invalid_argument("delta-l must be finite");
    const DressedFrame frame = diagonalize(make_system(spec));
    const ExpPulse pulse(spec.linewidth, frame.omega_minus + delta_l);

    PointOutcome out;
    nlohmann::ordered_json& doc = out.doc;
    doc["engine"] = engine_name(spec.engine);
    doc["system"] = {{"gamma_a", 1.0},
                     {"gamma_b", spec.gamma_b},
                     {"j", spec.j},
                     {"delta_ab", spec.delta_ab}};
    doc["pulse"] = {{"linewidth", spec.linewidth},
                    {"delta_l_minus", delta_l},
                    {"omega_l", pulse.omega_l}};
    doc["frame"] = {{"omega_gap", frame.omega_gap},
                    {"omega_plus", frame.omega_plus},
                    {"omega_minus", frame.omega_minus},
                    {"u_plus", frame.u_plus},
                    {"u_minus", frame.u_minus},
                    {"gamma_pp", frame.gamma_pp},
                    {"gamma_mm", frame.gamma_mm},
                    {"gamma_cross", frame.gamma_cross}};

    EngineResult analytic, oracle;
    auto run = [&](Engine which, EngineResult& slot) {
        try {
            slot = which == Engine::analytic ? eval_analytic(frame, pulse)
                                             : eval_oracle(frame, pulse, spec);
        } catch (const NumericalError& e) {
            out.numerical_failure = true;
            doc["errors"].push_back(e.what());
        }
    };
    if (spec.engine != Engine::oracle) run(Engine::analytic, analytic);
    if (spec.engine != Engine::analytic) run(Engine::oracle, oracle);

    auto fold_residuals = [&](const EngineResult& er) {
        if (!er.report) return;
        out.max_residual = std::max({out.max_residual, er.report->residual_qda,
                                     er.report->residual_sum});
    };

    if (spec.engine == Engine::both) {
        if (analytic.report) doc["analytic"] = engine_json(analytic);
        if (oracle.report) doc["oracle"] = engine_json(oracle);
        if (analytic.report && oracle.report) {
            nlohmann::ordered_json res;
            const EnergeticsReport &a = *analytic.report, &o = *oracle.report;
            res["p_total"] = cross_residual(a.p_total, o.p_total);
            res["p_lambda_plus"] = cross_residual(a.p_lambda_plus, o.p_lambda_plus);
            res["p_lambda_minus"] =
                cross_residual(a.p_lambda_minus, o.p_lambda_minus);
            res["rho_pm"] = cross_residual(a.rho_pm, o.rho_pm);
            res["w_abs"] = cross_residual(a.w_abs, o.w_abs);
            for (const auto& [key, value] : res.items())
                out.max_residual = std::max(out.max_residual, value.get<double>());
            doc["residuals"] = std::move(res);
        }
    } else {
        const EngineResult& er = spec.engine == Engine::analytic ? analytic : oracle;
        if (er.report) {
            doc["report"] = report_json(*er.report);
            doc["breakdown"] = breakdown_json(*er.breakdown);
        }
    }
    fold_residuals(analytic);
    fold_residuals(oracle);
    doc["max_residual"] = out.max_residual;
    return out;
}

} // namespace qda::cli
