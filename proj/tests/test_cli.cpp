#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd =
        std::string(QDA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path tmp_path(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qda_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

} // namespace

TEST_CASE("point prints the expected transfer numbers") {
    const CmdResult plateau = run_cli(
        "point --j 0.5 --linewidth 1e-4 --delta-l 0.5 --engine analytic");
    REQUIRE(plateau.code == 0);
    const json doc = json::parse(plateau.out);
    CHECK(doc["engine"] == "analytic");
    CHECK(std::abs(doc["report"]["p_total"].get<double>() - 1.0) < 1e-3);
    CHECK(std::abs(doc["report"]["w_abs"].get<double>() - 2.0) < 1e-3);
    CHECK(std::abs(doc["report"]["rho_pm"].get<double>()) < 1e-3);
    CHECK(doc["report"]["w_reac"].is_null());

    const CmdResult resonant =
        run_cli("point --j 0.5 --linewidth 1e-4 --delta-l 0");
    REQUIRE(resonant.code == 0);
    const json doc2 = json::parse(resonant.out);
    CHECK(std::abs(doc2["report"]["p_total"].get<double>() - 0.8) < 1e-3);
    CHECK(std::abs(doc2["report"]["w_abs"].get<double>() - 2.4) < 1e-3);
    CHECK(std::abs(doc2["breakdown"]["w_coh"].get<double>() - 0.8) < 2e-3);
    CHECK(doc2["frame"]["omega_gap"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("point with both engines reports small cross residuals") {
    // On resonance every reported quantity is O(1), so the cross residuals
    // are honest relative errors (off resonance the floored coherence
    // residual can sit above the default bar, which is exercised below).
    const CmdResult both = run_cli(
        "point --engine both --j 0.5 --linewidth 1e-3 --delta-l 0");
    REQUIRE(both.code == 0);
    const json doc = json::parse(both.out);
    REQUIRE(doc.contains("residuals"));
    for (const auto& [key, value] : doc["residuals"].items()) {
        CAPTURE(key);
        CHECK(value.get<double>() < 1e-6);
    }
    CHECK(doc["analytic"]["report"]["w_reac"].is_null());
    CHECK_FALSE(doc["oracle"]["report"]["w_reac"].is_null());
}

TEST_CASE("point flags residuals above the requested bar") {
    // The cross residual between the engines is tiny but never exactly
    // zero, so a zero tolerance must trip the verification exit code.
    const CmdResult r = run_cli(
        "point --engine both --j 0.5 --linewidth 0.5 --delta-l 0.3 "
        "--rel-tol 1e-6 --residual-tol 0");
    CHECK(r.code == 1);
}

TEST_CASE("sweep writes a deterministic CSV") {
    const fs::path a = tmp_path("sweep_a.csv"), b = tmp_path("sweep_b.csv");
    const std::string base =
        "sweep --j 0.5 --linewidth 1e-3 --from -1 --to 1 --points 5 "
        "--quantities p_total,w_abs --out ";
    REQUIRE(run_cli(base + a.string() + " --threads 1").code == 0);
    REQUIRE(run_cli(base + b.string() + " --threads 3").code == 0);

    const std::string text = slurp(a);
    CHECK(text == slurp(b)); // byte-identical regardless of thread count

    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "delta_l_minus_ratio,p_total,w_abs");
    double prev = -2.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 3);
        const double axis = std::stod(cells[0]);
        CHECK(axis > prev);
        prev = axis;
        CHECK(std::stod(cells[1]) >= 0.0);
        CHECK(std::stod(cells[2]) > 0.0);
    }
}

TEST_CASE("sweep prints to stdout when no output file is given") {
    const CmdResult r = run_cli(
        "sweep --j 0.5 --linewidth 1 --from -1 --to 1 --points 3");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("delta_l_minus_ratio,", 0) == 0);
    CHECK(lines_of(r.out).size() == 4);
}

TEST_CASE("dual-engine sweep carries suffixed columns and residuals") {
    const CmdResult r = run_cli(
        "sweep --engine both --j 1 --linewidth 0.5 --from 0 --to 2 "
        "--points 3 --quantities p_total --rel-tol 1e-8");
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] ==
          "delta_l_minus_ratio,p_total_analytic,p_total_oracle,"
          "residual_p_total");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 4);
        CHECK(std::stod(cells[3]) < 1e-6);
    }
}

TEST_CASE("schema does not depend on the engine") {
    // w_reac has no analytic route: the column must still exist, blank.
    const CmdResult analytic = run_cli(
        "sweep --j 0.5 --linewidth 0.5 --from 0 --to 1 --points 3 "
        "--quantities p_total,w_reac");
    REQUIRE(analytic.code == 0);
    auto lines = lines_of(analytic.out);
    CHECK(lines[0] == "delta_l_minus_ratio,p_total,w_reac");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 3);
        CHECK(cells[2].empty());
    }

    const CmdResult oracle = run_cli(
        "sweep --engine oracle --j 0.5 --linewidth 0.5 --from 0 --to 1 "
        "--points 3 --quantities p_total,w_reac");
    REQUIRE(oracle.code == 0);
    lines = lines_of(oracle.out);
    CHECK(lines[0] == "delta_l_minus_ratio,p_total,w_reac");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 3);
        CHECK_FALSE(cells[2].empty());
    }
}

TEST_CASE("presets select the published parameter sets") {
    const CmdResult r = run_cli("sweep --preset fig4 --points 7");
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 8);
    CHECK(lines[0] == "delta_l_minus_ratio,p_total,w_abs");
    CHECK(split_csv(lines[1])[0] == "-2");
    CHECK(split_csv(lines[7])[0] == "3");

    CHECK(run_cli("sweep --preset fig99 --points 3").code == 2);
}

TEST_CASE("svg chart is written alongside the csv") {
    const fs::path csv = tmp_path("chart.csv"), svg = tmp_path("chart.svg");
    const CmdResult r = run_cli(
        "sweep --j 0.5 --linewidth 1 --from -1 --to 1 --points 9 "
        "--quantities p_total,w_abs --out " + csv.string() + " --svg " +
        svg.string());
    REQUIRE(r.code == 0);
    const std::string chart = slurp(svg);
    CHECK(chart.rfind("<svg", 0) == 0);
    CHECK(chart.find("<polyline") != std::string::npos);
    CHECK(chart.find(">p_total<") != std::string::npos);
    CHECK(chart.find(">w_abs<") != std::string::npos);
    CHECK(chart.find("delta_l_minus_ratio") != std::string::npos);
}

TEST_CASE("cascade emits per-photon-count probability and work columns") {
    const CmdResult r = run_cli(
        "cascade --j 0.5 --linewidth 1e-3 --from -1 --to 2 --points 7 "
        "--photons 1,10");
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 8);
    CHECK(lines[0] ==
          "delta_l_minus_ratio,p_cascade_1,w_cascade_1,p_cascade_10,"
          "w_cascade_10");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 5);
        CHECK(std::stod(cells[3]) >= std::stod(cells[1])); // more photons help
        CHECK(std::stod(cells[4]) >= std::stod(cells[2]));
    }
}

TEST_CASE("verify subcommand reports machine-readable pass lines") {
    const CmdResult r = run_cli("verify --suite identities --samples 60");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["all_passed"] == true);
    REQUIRE(doc["suites"].size() == 1);
    CHECK(doc["suites"][0]["suite"] == "identities");
    CHECK(doc["suites"][0]["properties"].size() >= 4);
    for (const auto& p : doc["suites"][0]["properties"]) {
        CHECK(p.contains("name"));
        CHECK(p.contains("samples"));
        CHECK(p.contains("max_residual"));
        CHECK(p.contains("tolerance"));
        CHECK(p.contains("passed"));
    }
}

TEST_CASE("config file supplies defaults that flags override") {
    const fs::path cfg = tmp_path("run.json");
    std::ofstream(cfg) << R"({"j": 5.0, "linewidth": 1e-3})";

    const CmdResult from_file =
        run_cli("point --config " + cfg.string() + " --delta-l 0");
    REQUIRE(from_file.code == 0);
    CHECK(json::parse(from_file.out)["report"]["p_total"].get<double>() >
          0.99); // strong-coupling value

    const CmdResult overridden =
        run_cli("point --config " + cfg.string() + " --delta-l 0 --j 0.5");
    REQUIRE(overridden.code == 0);
    const double p =
        json::parse(overridden.out)["report"]["p_total"].get<double>();
    CHECK(std::abs(p - 0.8) < 1e-2); // intermediate-coupling value

    const fs::path bad = tmp_path("bad.json");
    std::ofstream(bad) << R"({"jay": 1.0})";
    CHECK(run_cli("point --config " + bad.string()).code == 2);
}

TEST_CASE("config errors use their own exit code") {
    CHECK(run_cli("sweep --points 1").code == 2);
    CHECK(run_cli("sweep --quantities not_a_quantity --points 3").code == 2);
    CHECK(run_cli("sweep --no-such-flag").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("cascade --photons 0 --points 3").code == 2);
    CHECK(run_cli("sweep --from 2 --to 1 --points 3").code == 2);
}

TEST_CASE("unwritable output maps to the i/o exit code") {
    CHECK(run_cli("sweep --points 3 --from 0 --to 1 --linewidth 1 "
                  "--out /nonexistent_dir_qda/x.csv")
              .code == 4);
}

TEST_SUITE_END();
