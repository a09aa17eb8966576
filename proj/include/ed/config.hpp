#pragma once

#include "ed/montecarlo.hpp"

#include <string>
#include <vector>

namespace ed {

// One problem found while parsing or validating a run configuration.
// line is 1-based within the config text; 0 marks file-level problems.
struct Diagnostic {
    int line = 0;
    std::string message;
};

// A complete experiment description: the scenario template plus the task
// to run, the output file prefix, and at most one outer parameter list.
// An outer list repeats the whole sweep once per value (e.g. one
// SER-vs-antennas curve per SNR), all emitted into the same output files.
struct RunConfig {
    Scenario scenario;
    std::string task = "sweep";  // sweep | pdf_compare | constellation_opt | opt_ser_sweep
    std::string prefix = "run";
    std::vector<double> outer_snr_db;  // only with axis = antennas
    std::vector<int> outer_antennas;   // only with axis = snr_db
    std::vector<int> outer_paths;      // sparse channels; 0 tracks the antenna count
    bool chernoff_overlay = false;     // add the closed-form bound as an extra curve
    bool floor_reference = false;      // add the high-SNR error floor as a reference row
};

// Number of outer curves (1 when no outer list is present).
int outer_count(const RunConfig& rc);

// Scenario for one outer curve: applies the outer value and offsets the
// per-point stream keys so every curve consumes independent trial streams.
Scenario outer_scenario(const RunConfig& rc, int outer_index);

// Parses the flat "[section]" / "key = value" format. Problems are
// collected instead of thrown; the returned config is only meaningful
// when diags stays empty. '#' starts a comment anywhere on a line.
RunConfig parse_config(const std::string& text, std::vector<Diagnostic>& diags);

// Reads and parses a file; an unreadable path yields a line-0 diagnostic.
RunConfig load_config(const std::string& path, std::vector<Diagnostic>& diags);

}  // namespace ed
