#include "ed/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ed {

namespace {

struct RawValue {
    std::string text;
    int line = 0;
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> tokens(const std::string& s) {
    std::string spaced = s;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::istringstream in(spaced);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

// Known keys per section; anything else is flagged with its line.
const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"scenario", {"task", "regime", "trials", "seed"}},
    {"constellation", {"type", "levels", "energies", "priors"}},
    {"channel", {"model", "avg_energy", "paths", "line_of_sight", "rician_k_db",
                 "profile", "decay_rate", "los_cos"}},
    {"detector", {"variants", "chernoff_overlay"}},
    {"sweep", {"axis", "points", "snr_db", "antennas"}},
    {"output", {"prefix", "floor_reference"}},
};

class Parser {
public:
    Parser(const std::string& text, std::vector<Diagnostic>& diags) : diags_(diags) {
        scan(text);
    }

    RunConfig resolve() {
        RunConfig rc;
        resolve_scenario(rc);
        resolve_constellation(rc);
        resolve_channel(rc);
        resolve_detector(rc);
        resolve_sweep(rc);
        resolve_output(rc);
        if (diags_.empty()) final_check(rc);
        return rc;
    }

private:
    std::vector<Diagnostic>& diags_;
    std::map<std::string, RawValue> raw_;

    void fail(int line, std::string message) { diags_.push_back({line, std::move(message)}); }

    void scan(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::string section;
        bool section_known = true;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    fail(number, "unterminated section header");
                    continue;
                }
                section = trim(line.substr(1, line.size() - 2));
                section_known = kKnownKeys.count(section) > 0;
                if (!section_known) fail(number, "unknown section [" + section + "]");
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                fail(number, "expected key = value");
                continue;
            }
            if (section.empty()) {
                fail(number, "key outside any section");
                continue;
            }
            if (!section_known) continue;  // the header line already carries the diagnostic
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            const std::vector<std::string>& known = kKnownKeys.at(section);
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                fail(number, "unknown key '" + key + "' in section [" + section + "]");
                continue;
            }
            if (value.empty()) {
                fail(number, "empty value for '" + key + "'");
                continue;
            }
            const std::string slot = section + "." + key;
            if (raw_.count(slot)) {
                fail(number, "duplicate key '" + key + "' in section [" + section + "]");
                continue;
            }
            raw_[slot] = {value, number};
        }
    }

    const RawValue* get(const std::string& slot) const {
        auto it = raw_.find(slot);
        return it == raw_.end() ? nullptr : &it->second;
    }

    bool to_double(const RawValue& v, double& out) {
        try {
            std::size_t used = 0;
            out = std::stod(v.text, &used);
            if (used != v.text.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            fail(v.line, "expected a number, got '" + v.text + "'");
            return false;
        }
        return true;
    }

    bool to_int64(const RawValue& v, long long& out) {
        try {
            std::size_t used = 0;
            out = std::stoll(v.text, &used);
            if (used != v.text.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            fail(v.line, "expected an integer, got '" + v.text + "'");
            return false;
        }
        return true;
    }

    bool to_bool(const RawValue& v, bool& out) {
        if (v.text == "true") { out = true; return true; }
        if (v.text == "false") { out = false; return true; }
        fail(v.line, "expected true or false, got '" + v.text + "'");
        return false;
    }

    bool to_doubles(const RawValue& v, std::vector<double>& out) {
        out.clear();
        for (const std::string& t : tokens(v.text)) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(t, &used));
                if (used != t.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail(v.line, "expected a list of numbers, got '" + t + "'");
                return false;
            }
        }
        return true;
    }

    void resolve_scenario(RunConfig& rc) {
        if (const RawValue* v = get("scenario.task")) {
            static const std::vector<std::string> kTasks = {"sweep", "pdf_compare",
                                                            "constellation_opt", "opt_ser_sweep"};
            if (std::find(kTasks.begin(), kTasks.end(), v->text) == kTasks.end())
                fail(v->line, "unknown task '" + v->text + "'");
            else
                rc.task = v->text;
        }
        if (const RawValue* v = get("scenario.regime")) {
            if (v->text == "slow") rc.scenario.regime = Regime::SlowFading;
            else if (v->text == "fast") rc.scenario.regime = Regime::FastFading;
            else fail(v->line, "regime must be slow or fast");
        }
        if (const RawValue* v = get("scenario.trials")) {
            long long n = 0;
            if (to_int64(*v, n)) {
                if (n < 1 || n > 0xFFFFFFFFll)
                    fail(v->line, "trials must be between 1 and 4294967295");
                else
                    rc.scenario.trials = n;
            }
        }
        if (const RawValue* v = get("scenario.seed")) {
            long long n = 0;
            if (to_int64(*v, n)) {
                if (n < 0) fail(v->line, "seed must be non-negative");
                else rc.scenario.seed = static_cast<std::uint64_t>(n);
            }
        }
    }

    void resolve_constellation(RunConfig& rc) {
        const RawValue* type = get("constellation.type");
        const RawValue* levels_v = get("constellation.levels");
        const RawValue* energies_v = get("constellation.energies");
        const RawValue* priors_v = get("constellation.priors");

        std::string kind = type ? type->text : "ook";
        if (type && kind != "ook" && kind != "conventional" && kind != "custom") {
            fail(type->line, "constellation type must be ook, conventional, or custom");
            return;
        }

        long long levels = 0;
        if (levels_v && to_int64(*levels_v, levels) && levels < 2)
            fail(levels_v->line, "levels must be at least 2");

        std::vector<double> priors;
        if (priors_v && !to_doubles(*priors_v, priors)) return;

        if (kind == "ook") {
            if (energies_v) fail(energies_v->line, "energies only apply to type = custom");
            if (levels_v && levels != 2) fail(levels_v->line, "on-off keying has exactly 2 levels");
            if (priors_v) {
                if (priors.size() != 2) {
                    fail(priors_v->line, "priors must list one weight per level");
                    return;
                }
                if (std::abs(priors[0] + priors[1] - 1.0) > 1e-9) {
                    fail(priors_v->line, "priors must sum to 1");
                    return;
                }
                if (!(priors[1] > 0.0)) {
                    fail(priors_v->line, "the energetic symbol needs positive prior mass");
                    return;
                }
                // Unit mean energy pins the on level at 1 / q_on.
                if (diags_.empty())
                    rc.scenario.constellation = make_custom({0.0, 1.0 / priors[1]}, priors);
            } else if (diags_.empty()) {
                rc.scenario.constellation = make_ook();
            }
            return;
        }
        if (kind == "conventional") {
            if (energies_v) fail(energies_v->line, "energies only apply to type = custom");
            if (!levels_v) {
                fail(type->line, "type = conventional needs a levels key");
                return;
            }
            if (priors_v && static_cast<long long>(priors.size()) != levels) {
                fail(priors_v->line, "priors must list one weight per level");
                return;
            }
            if (diags_.empty()) {
                if (priors_v) {
                    Eigen::ArrayXd q = Eigen::Map<const Eigen::ArrayXd>(priors.data(), priors.size());
                    rc.scenario.constellation = make_conventional_pam(static_cast<int>(levels), q);
                } else {
                    rc.scenario.constellation = make_conventional_pam(static_cast<int>(levels));
                }
            }
            return;
        }

        // custom
        if (!energies_v) {
            fail(type->line, "type = custom needs an energies key");
            return;
        }
        std::vector<double> energies;
        if (!to_doubles(*energies_v, energies)) return;
        if (levels_v && static_cast<long long>(energies.size()) != levels) {
            fail(energies_v->line, "energies list does not match levels");
            return;
        }
        if (priors_v && priors.size() != energies.size()) {
            fail(priors_v->line, "priors must list one weight per level");
            return;
        }
        if (priors.empty()) priors.assign(energies.size(), 1.0 / energies.size());

        for (std::size_t p = 0; p + 1 < energies.size(); ++p)
            if (energies[p] >= energies[p + 1]) {
                fail(energies_v->line, "energies must be strictly increasing");
                return;
            }
        double mean = 0.0, mass = 0.0;
        for (std::size_t p = 0; p < energies.size(); ++p) {
            mean += priors[p] * energies[p];
            mass += priors[p];
        }
        if (std::abs(mass - 1.0) > 1e-9) {
            fail(priors_v ? priors_v->line : energies_v->line, "priors must sum to 1");
            return;
        }
        if (std::abs(mean - 1.0) > 1e-9) {
            std::ostringstream msg;
            msg << "constellation breaks the unit-mean-energy normalization: "
                   "sum of prior * energy = " << mean << ", expected 1";
            fail(energies_v->line, msg.str());
            return;
        }
        if (diags_.empty()) {
            try {
                rc.scenario.constellation = make_custom(energies, priors);
            } catch (const std::exception& e) {
                fail(energies_v->line, e.what());
            }
        }
    }

    void resolve_channel(RunConfig& rc) {
        const RawValue* model = get("channel.model");
        std::string kind = model ? model->text : "rayleigh";
        if (model && kind != "rayleigh" && kind != "sparse") {
            fail(model->line, "channel model must be rayleigh or sparse");
            return;
        }
        rc.scenario.channel.sparse = kind == "sparse";

        if (const RawValue* v = get("channel.avg_energy")) {
            double e = 0.0;
            if (to_double(*v, e)) {
                if (e <= 0.0) fail(v->line, "avg_energy must be positive");
                else if (rc.scenario.channel.sparse && e != 1.0)
                    fail(v->line, "sparse channels normalize total power to one; set avg_energy = 1");
                else rc.scenario.channel.avg_energy = e;
            }
        }

        static const char* kSparseOnly[] = {"paths", "line_of_sight", "rician_k_db",
                                            "profile", "decay_rate", "los_cos"};
        if (!rc.scenario.channel.sparse) {
            for (const char* key : kSparseOnly)
                if (const RawValue* v = get(std::string("channel.") + key))
                    fail(v->line, std::string("'") + key + "' only applies to model = sparse");
            return;
        }

        if (const RawValue* v = get("channel.paths")) {
            std::vector<int> values;
            for (const std::string& t : tokens(v->text)) {
                if (t == "antennas") {
                    values.push_back(0);
                    continue;
                }
                long long n = 0;
                try {
                    std::size_t used = 0;
                    n = std::stoll(t, &used);
                    if (used != t.size()) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    fail(v->line, "paths must be positive integers or the keyword antennas");
                    return;
                }
                if (n < 1) {
                    fail(v->line, "a sparse channel needs at least one path; "
                                  "use the keyword antennas to track the array size");
                    return;
                }
                if (n > 1000000) {
                    fail(v->line, "path count is implausibly large");
                    return;
                }
                values.push_back(static_cast<int>(n));
            }
            if (values.empty()) {
                fail(v->line, "paths needs at least one value");
                return;
            }
            rc.scenario.channel.paths = values.front();
            if (values.size() > 1) {
                rc.outer_paths = values;
                outer_lines_.push_back(v->line);
            }
        }
        if (const RawValue* v = get("channel.line_of_sight")) {
            bool b = false;
            if (to_bool(*v, b)) rc.scenario.channel.line_of_sight = b;
        }
        if (const RawValue* v = get("channel.rician_k_db")) {
            double k = 0.0;
            if (to_double(*v, k)) rc.scenario.channel.rician_k_db = k;
        }
        if (const RawValue* v = get("channel.profile")) {
            if (v->text == "equal") rc.scenario.channel.profile = PathProfile::Equal;
            else if (v->text == "exponential") rc.scenario.channel.profile = PathProfile::ExponentialDecay;
            else fail(v->line, "profile must be equal or exponential");
        }
        if (const RawValue* v = get("channel.decay_rate")) {
            double r = 0.0;
            if (to_double(*v, r)) {
                if (r <= 0.0) fail(v->line, "decay_rate must be positive");
                else rc.scenario.channel.decay_rate = r;
            }
        }
        if (const RawValue* v = get("channel.los_cos")) {
            double c = 0.0;
            if (to_double(*v, c)) {
                if (c < -1.0 || c > 1.0) fail(v->line, "los_cos must lie in [-1, 1]");
                else rc.scenario.channel.los_cos = c;
            }
        }
    }

    void resolve_detector(RunConfig& rc) {
        if (const RawValue* v = get("detector.variants")) {
            std::vector<DetectorVariant> list;
            for (const std::string& t : tokens(v->text)) {
                auto parsed = parse_detector(t);
                if (!parsed) {
                    fail(v->line, "unknown detector '" + t + "'");
                    return;
                }
                list.push_back(*parsed);
            }
            if (list.empty()) {
                fail(v->line, "variants needs at least one detector");
                return;
            }
            if (rc.scenario.regime == Regime::FastFading) {
                for (DetectorVariant d : list) {
                    if (d != DetectorVariant::AedGaussian && d != DetectorVariant::AedBayesian) {
                        fail(v->line, std::string("detector '") + detector_name(d) +
                                          "' needs the instantaneous channel and cannot "
                                          "run under fast fading");
                        return;
                    }
                }
            }
            rc.scenario.detectors = list;
        }
        if (const RawValue* v = get("detector.chernoff_overlay")) {
            bool b = false;
            if (to_bool(*v, b)) rc.chernoff_overlay = b;
        }
    }

    void resolve_sweep(RunConfig& rc) {
        const RawValue* axis = get("sweep.axis");
        std::string kind = axis ? axis->text : "antennas";
        if (axis && kind != "antennas" && kind != "snr_db") {
            fail(axis->line, "axis must be antennas or snr_db");
            return;
        }
        rc.scenario.axis = kind == "antennas" ? SweepAxis::Antennas : SweepAxis::SnrDb;

        if (const RawValue* v = get("sweep.points")) {
            std::vector<double> pts;
            if (to_doubles(*v, pts)) {
                if (pts.empty()) {
                    fail(v->line, "points needs at least one value");
                } else {
                    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
                        if (pts[i] >= pts[i + 1]) {
                            fail(v->line, "points must be strictly increasing");
                            return;
                        }
                    if (rc.scenario.axis == SweepAxis::Antennas) {
                        for (double p : pts)
                            if (p < 1.0 || p != std::floor(p)) {
                                fail(v->line, "antenna points must be positive integers");
                                return;
                            }
                    }
                    rc.scenario.sweep = pts;
                }
            }
        }

        if (const RawValue* v = get("sweep.snr_db")) {
            if (rc.scenario.axis == SweepAxis::SnrDb) {
                fail(v->line, "snr_db conflicts with axis = snr_db; the points list holds the SNRs");
                return;
            }
            std::vector<double> values;
            if (!to_doubles(*v, values)) return;
            if (values.empty()) {
                fail(v->line, "snr_db needs at least one value");
                return;
            }
            rc.scenario.snr_db = values.front();
            if (values.size() > 1) {
                rc.outer_snr_db = values;
                outer_lines_.push_back(v->line);
            }
        }

        if (const RawValue* v = get("sweep.antennas")) {
            if (rc.scenario.axis == SweepAxis::Antennas) {
                fail(v->line, "antennas conflicts with axis = antennas; the points list holds the counts");
                return;
            }
            std::vector<double> values;
            if (!to_doubles(*v, values)) return;
            if (values.empty()) {
                fail(v->line, "antennas needs at least one value");
                return;
            }
            std::vector<int> counts;
            for (double m : values) {
                if (m < 1.0 || m != std::floor(m)) {
                    fail(v->line, "antenna counts must be positive integers");
                    return;
                }
                counts.push_back(static_cast<int>(m));
            }
            rc.scenario.antennas = counts.front();
            if (counts.size() > 1) {
                rc.outer_antennas = counts;
                outer_lines_.push_back(v->line);
            }
        }

        if (outer_lines_.size() > 1)
            fail(outer_lines_.back(), "at most one outer list is allowed "
                                      "(a second list would need a second output axis)");
    }

    void resolve_output(RunConfig& rc) {
        if (const RawValue* v = get("output.prefix")) {
            for (char ch : v->text)
                if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') {
                    fail(v->line, "prefix may use letters, digits, '_' and '-' only");
                    return;
                }
            rc.prefix = v->text;
        }
        if (const RawValue* v = get("output.floor_reference")) {
            bool b = false;
            if (to_bool(*v, b)) rc.floor_reference = b;
        }
    }

    void final_check(RunConfig& rc) {
        try {
            validate_scenario(outer_scenario(rc, 0));
        } catch (const std::exception& e) {
            fail(0, e.what());
        }
    }

    std::vector<int> outer_lines_;
};

}  // namespace

int outer_count(const RunConfig& rc) {
    if (!rc.outer_snr_db.empty()) return static_cast<int>(rc.outer_snr_db.size());
    if (!rc.outer_antennas.empty()) return static_cast<int>(rc.outer_antennas.size());
    if (!rc.outer_paths.empty()) return static_cast<int>(rc.outer_paths.size());
    return 1;
}

Scenario outer_scenario(const RunConfig& rc, int outer_index) {
    if (outer_index < 0 || outer_index >= outer_count(rc))
        throw std::invalid_argument("outer curve index out of range");
    Scenario s = rc.scenario;
    if (!rc.outer_snr_db.empty())
        s.snr_db = rc.outer_snr_db[outer_index];
    else if (!rc.outer_antennas.empty())
        s.antennas = rc.outer_antennas[outer_index];
    else if (!rc.outer_paths.empty())
        s.channel.paths = rc.outer_paths[outer_index];
    s.point_offset = rc.scenario.point_offset +
                     static_cast<std::uint32_t>(outer_index * rc.scenario.sweep.size());
    return s;
}

RunConfig parse_config(const std::string& text, std::vector<Diagnostic>& diags) {
    Parser parser(text, diags);
    return parser.resolve();
}

RunConfig load_config(const std::string& path, std::vector<Diagnostic>& diags) {
    std::ifstream in(path);
    if (!in) {
        diags.push_back({0, "cannot read '" + path + "'"});
        return RunConfig{};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), diags);
}

}  // namespace ed
