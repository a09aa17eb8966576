#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ed/cli_app.hpp"
#include "ed/config.hpp"
#include "ed/presets.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace ed;
namespace fs = std::filesystem;

namespace {

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ed_sim");
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("ed_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// First line of a CSV file.
std::string header_of(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    return line;
}

bool has_diag_at(const std::vector<Diagnostic>& diags, int line) {
    return std::any_of(diags.begin(), diags.end(),
                       [line](const Diagnostic& d) { return d.line == line; });
}

}  // namespace

TEST_CASE("every preset dump parses back with zero diagnostics") {
    const std::vector<std::string> names = preset_names();
    CHECK(names.size() == 9);
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
    for (const std::string& name : names) {
        const std::string text = preset_config(name);
        REQUIRE(!text.empty());
        std::vector<Diagnostic> diags;
        RunConfig rc = parse_config(text, diags);
        for (const Diagnostic& d : diags)
            MESSAGE(name, " line ", d.line, ": ", d.message);
        CHECK(diags.empty());
        CHECK(!rc.prefix.empty());
        CHECK(rc.scenario.trials >= 1);
    }
    CHECK(preset_config("fig1_nope").empty());
}

TEST_CASE("config diagnostics carry the offending line") {
    const std::string text =
        "[scenario]\n"           // 1
        "task = sweep\n"         // 2
        "trials = 5000\n"        // 3
        "\n"                     // 4
        "[constellation]\n"      // 5
        "type = custom\n"        // 6
        "energies = 0 0.5 1 3\n" // 7: prior-weighted mean 1.125, not 1
        "priors = 0.25 0.25 0.25 0.25\n"  // 8
        "\n"                     // 9
        "[channel]\n"            // 10
        "model = sparse\n"       // 11
        "paths = 0\n"            // 12: explicit zero is rejected
        "\n"                     // 13
        "[sweep]\n"              // 14
        "axis = antennas\n"      // 15
        "points = 8 16\n"        // 16
        "snr_db = 6\n";          // 17
    std::vector<Diagnostic> diags;
    parse_config(text, diags);
    REQUIRE(!diags.empty());
    CHECK(has_diag_at(diags, 7));
    CHECK(has_diag_at(diags, 12));

    // The normalization message names the actual mean.
    auto it = std::find_if(diags.begin(), diags.end(),
                           [](const Diagnostic& d) { return d.line == 7; });
    CHECK(it->message.find("1.125") != std::string::npos);
}

TEST_CASE("parser rejects malformed structure with line anchors") {
    std::vector<Diagnostic> diags;

    parse_config("trials = 5\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 1);  // key outside any section
    diags.clear();

    parse_config("[nope]\nkey = 1\n", diags);
    REQUIRE(diags.size() == 1);  // keys inside an unknown section stay quiet
    CHECK(diags[0].line == 1);
    diags.clear();

    parse_config("[scenario]\ntrials\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 2);
    CHECK(diags[0].message.find("key = value") != std::string::npos);
    diags.clear();

    parse_config("[scenario]\ntrials = 10\ntrials = 20\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 3);
    CHECK(diags[0].message.find("duplicate") != std::string::npos);
    diags.clear();

    parse_config("[scenario]\ntrials = plenty\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 2);
    diags.clear();

    parse_config("[scenario]\nbanana = 1\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].message.find("banana") != std::string::npos);
}

TEST_CASE("incompatible combinations are caught during resolution") {
    std::vector<Diagnostic> diags;

    // Fast fading cannot feed detectors that need the instantaneous channel.
    parse_config("[scenario]\nregime = fast\n[detector]\nvariants = ied_gaussian\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 4);
    diags.clear();

    // The sweep axis owns its parameter; a fixed value for it is an error.
    parse_config("[sweep]\naxis = snr_db\npoints = 0 6\nsnr_db = 3\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 4);
    diags.clear();

    // Only one outer list: paths and snr_db cannot both vary.
    parse_config(
        "[channel]\nmodel = sparse\npaths = 3 9\n"
        "[sweep]\naxis = antennas\npoints = 8 16\nsnr_db = 0 6\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 7);
    diags.clear();

    // Sparse-only keys under a rayleigh model.
    parse_config("[channel]\nmodel = rayleigh\npaths = 4\n", diags);
    REQUIRE(!diags.empty());
    CHECK(diags[0].line == 3);
}

TEST_CASE("outer lists expand into per-curve scenarios with shifted stream keys") {
    const std::string text =
        "[scenario]\ntask = sweep\ntrials = 100\n"
        "[detector]\nvariants = aed_gaussian\n"
        "[sweep]\naxis = antennas\npoints = 8 16 32\nsnr_db = -3 0 3 6\n";
    std::vector<Diagnostic> diags;
    RunConfig rc = parse_config(text, diags);
    REQUIRE(diags.empty());
    REQUIRE(outer_count(rc) == 4);
    CHECK(rc.scenario.snr_db == -3.0);

    Scenario s2 = outer_scenario(rc, 2);
    CHECK(s2.snr_db == 3.0);
    CHECK(s2.point_offset == 6);  // two earlier curves, three points each
    CHECK(outer_scenario(rc, 0).point_offset == 0);
    CHECK_THROWS(outer_scenario(rc, 4));

    // Sparse path lists map the antennas keyword onto tracking mode.
    const std::string sparse_text =
        "[scenario]\ntask = sweep\ntrials = 100\n"
        "[channel]\nmodel = sparse\npaths = 3 9 antennas\n"
        "[detector]\nvariants = aed_bayesian\n"
        "[sweep]\naxis = antennas\npoints = 8 16\nsnr_db = 10\n";
    diags.clear();
    RunConfig sp = parse_config(sparse_text, diags);
    REQUIRE(diags.empty());
    REQUIRE(outer_count(sp) == 3);
    CHECK(outer_scenario(sp, 0).channel.paths == 3);
    CHECK(outer_scenario(sp, 2).channel.paths == 0);
    CHECK(point_spec(outer_scenario(sp, 2), 1).paths == 16);
}

TEST_CASE("cli rejects bad invocations with exit code 2") {
    CHECK(cli({"--preset", "fig1_nope", "--out", "/tmp/ed_cli_never"}) == 2);
    CHECK(cli({}) == 2);  // neither preset nor config
    const fs::path dir = fresh_dir("both");
    const fs::path conf = dir / "a.conf";
    std::ofstream(conf) << "[scenario]\ntask = sweep\n";
    CHECK(cli({"--preset", "fig3_ook_vs_M", "--config", conf.string()}) == 2);
    CHECK(cli({"--config", (dir / "missing.conf").string()}) == 2);

    // Config with diagnostics: parse failure exit.
    const fs::path bad = dir / "bad.conf";
    std::ofstream(bad) << "[sweep]\npoints = 16 8\n";
    CHECK(cli({"--config", bad.string()}) == 2);

    // Validation mode reports success without writing anything.
    CHECK(cli({"--preset", "fig3_ook_vs_M", "--validate"}) == 0);
    fs::remove_all(dir);
}

TEST_CASE("smoke run emits curves, symbols, and a manifest with overrides") {
    const fs::path dir = fresh_dir("smoke");
    REQUIRE(cli({"--preset", "fig3_ook_vs_M", "--out", dir.string(),
                 "--trials", "200", "--seed", "99", "--threads", "2"}) == 0);

    const fs::path curves = dir / "fig3_curves.csv";
    const fs::path symbols = dir / "fig3_symbols.csv";
    const fs::path manifest = dir / "fig3_manifest.json";
    REQUIRE(fs::exists(curves));
    REQUIRE(fs::exists(symbols));
    REQUIRE(fs::exists(manifest));

    CHECK(header_of(curves) == "method,M,snr_db,ser,ci_lo,ci_hi");
    CHECK(header_of(symbols) == "method,M,snr_db,symbol,ser");

    // 4 SNR curves x 5 array sizes x 5 detectors x (measured + analytic).
    std::istringstream rows(slurp(curves));
    std::string line;
    int count = -1;
    while (std::getline(rows, line))
        if (!line.empty()) ++count;
    CHECK(count == 200);

    nlohmann::json m = nlohmann::json::parse(slurp(manifest));
    CHECK(m["task"] == "sweep");
    CHECK(m["preset"] == "fig3_ook_vs_M");
    CHECK(m["seed"] == 99);
    CHECK(m["trials"] == 200);
    CHECK(m["threads"] == 2);
    CHECK(m["overrides"]["trials"] == 200);
    CHECK(m["overrides"]["seed"] == 99);
    CHECK(m["outputs"].size() == 2);
    CHECK(m.contains("wall_clock_seconds"));
    fs::remove_all(dir);
}

TEST_CASE("csv bytes are identical for any thread count") {
    const fs::path a = fresh_dir("thr1");
    const fs::path b = fresh_dir("thr4");
    REQUIRE(cli({"--preset", "fig9_sparse_nlos_aed", "--out", a.string(),
                 "--trials", "500", "--threads", "1"}) == 0);
    REQUIRE(cli({"--preset", "fig9_sparse_nlos_aed", "--out", b.string(),
                 "--trials", "500", "--threads", "4"}) == 0);
    CHECK(slurp(a / "fig9_curves.csv") == slurp(b / "fig9_curves.csv"));
    CHECK(slurp(a / "fig9_symbols.csv") == slurp(b / "fig9_symbols.csv"));
    CHECK(header_of(a / "fig9_curves.csv") ==
          "method,M,snr_db,ser,ci_lo,ci_hi,paths,profile");

    // The env fallback path must produce the same bytes too.
    const fs::path c = fresh_dir("threnv");
    setenv("ED_THREADS", "3", 1);
    REQUIRE(cli({"--preset", "fig9_sparse_nlos_aed", "--out", c.string(),
                 "--trials", "500"}) == 0);
    unsetenv("ED_THREADS");
    CHECK(slurp(a / "fig9_curves.csv") == slurp(c / "fig9_curves.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("pdf task writes both laws over the documented grid") {
    const fs::path dir = fresh_dir("pdf");
    REQUIRE(cli({"--preset", "fig2_pdf_compare", "--out", dir.string()}) == 0);
    const fs::path pdf = dir / "fig2_pdf.csv";
    REQUIRE(fs::exists(pdf));
    CHECK(header_of(pdf) == "method,M,symbol,z,log_pdf");

    std::istringstream rows(slurp(pdf));
    std::string line;
    int exact = 0, gaussian = 0;
    std::set<std::string> ms;
    while (std::getline(rows, line)) {
        if (line.rfind("exact,", 0) == 0) ++exact;
        if (line.rfind("gaussian,", 0) == 0) ++gaussian;
        const std::size_t c1 = line.find(',');
        if (c1 != std::string::npos && line.substr(0, c1) != "method")
            ms.insert(line.substr(c1 + 1, line.find(',', c1 + 1) - c1 - 1));
    }
    CHECK(exact == 2 * 4 * 400);
    CHECK(gaussian == 2 * 4 * 400);
    CHECK(ms == std::set<std::string>{"8", "200"});
    fs::remove_all(dir);
}

TEST_CASE("custom constellation config runs end to end") {
    const fs::path dir = fresh_dir("custom");
    const fs::path conf = dir / "run.conf";
    std::ofstream(conf) <<
        "[scenario]\n"
        "task = sweep\n"
        "trials = 400\n"
        "seed = 5\n"
        "[constellation]\n"
        "type = custom\n"
        "energies = 0 0.4 1.2 2.4\n"
        "priors = 0.25 0.25 0.25 0.25\n"
        "[detector]\n"
        "variants = aed_bayesian\n"
        "[sweep]\n"
        "axis = antennas\n"
        "points = 8 16\n"
        "snr_db = 6\n"
        "[output]\n"
        "prefix = custom\n";
    REQUIRE(cli({"--config", conf.string(), "--out", dir.string()}) == 0);
    REQUIRE(fs::exists(dir / "custom_curves.csv"));
    nlohmann::json m = nlohmann::json::parse(slurp(dir / "custom_manifest.json"));
    CHECK(m["config_path"] == conf.string());
    CHECK(m["overrides"].empty());
    fs::remove_all(dir);
}
