#include "escape/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace escape {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config field \"" + field + "\" " + why);
}

// `label` names the field in diagnostics; the last path segment is the key
std::string key_of(const std::string& label) {
    const std::size_t dot = label.rfind('.');
    return dot == std::string::npos ? label : label.substr(dot + 1);
}

const json& need(const json& j, const std::string& label) {
    auto it = j.find(key_of(label));
    if (it == j.end()) bad_field(label, "is missing");
    return *it;
}

int need_int(const json& j, const std::string& label) {
    const json& v = need(j, label);
    if (!v.is_number_integer()) bad_field(label, "must be an integer");
    return v.get<int>();
}

double need_real(const json& j, const std::string& label) {
    const json& v = need(j, label);
    if (!v.is_number()) bad_field(label, "must be a number");
    return v.get<double>();
}

std::string need_string(const json& j, const std::string& label) {
    const json& v = need(j, label);
    if (!v.is_string()) bad_field(label, "must be a string");
    return v.get<std::string>();
}

LocallyConstantFunction parse_function(const TransitionMatrix& A, const json& spec,
                                       const std::string& where) {
    const int depth = need_int(spec, where + ".depth");
    const double theta = need_real(spec, where + ".theta");
    const json& vals = need(spec, where + ".values");
    if (!vals.is_object()) bad_field(where + ".values", "must be an object");
    std::map<std::string, double> values;
    for (auto it = vals.begin(); it != vals.end(); ++it) {
        if (!it.value().is_number())
            bad_field(where + ".values." + it.key(), "must be a number");
        values[it.key()] = it.value().get<double>();
    }
    return LocallyConstantFunction::from_values(A, depth, theta, values);
}

ShiftPoint parse_target(const TransitionMatrix& A, const json& t) {
    if (!t.is_object()) bad_field("target", "must be an object");
    ShiftPoint z;
    z.prefix = word_from_string(need_string(t, "target.prefix"), A.a);
    z.tail = word_from_string(need_string(t, "target.tail"), A.a);
    if (z.prefix.empty() && z.tail.empty()) bad_field("target", "must fix at least one symbol");
    // the full description must be admissible, including the tail wrap
    Word probe = z.prefix;
    probe.insert(probe.end(), z.tail.begin(), z.tail.end());
    probe.insert(probe.end(), z.tail.begin(), z.tail.end());
    if (!admissible(A, probe)) bad_field("target", "describes an inadmissible point");
    return z;
}

}  // namespace

const LocallyConstantFunction& ExperimentConfig::potential() const {
    auto it = functions.find(potential_name);
    if (it == functions.end()) bad_field("potential", "names no declared function");
    return it->second;
}

const LocallyConstantFunction& ExperimentConfig::roof() const {
    if (roof_name.empty()) bad_field("roof", "is missing");
    auto it = functions.find(roof_name);
    if (it == functions.end()) bad_field("roof", "names no declared function");
    return it->second;
}

ExperimentConfig parse_config(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig cfg;
    const json& mat = need(j, "matrix");
    if (!mat.is_array()) bad_field("matrix", "must be an array of rows");
    std::vector<std::vector<int>> rows;
    for (const json& r : mat) {
        if (!r.is_array()) bad_field("matrix", "must be an array of rows");
        rows.push_back(r.get<std::vector<int>>());
    }
    cfg.matrix = validate_transition_matrix(rows);
    if (j.contains("alphabet_size") && need_int(j, "alphabet_size") != cfg.matrix.a)
        bad_field("alphabet_size", "disagrees with the matrix size");

    if (j.contains("functions")) {
        const json& fns = j["functions"];
        if (!fns.is_array()) bad_field("functions", "must be an array");
        for (const json& f : fns) {
            const std::string name = need_string(f, "functions[].name");
            if (cfg.functions.count(name)) bad_field("functions[].name", "repeats " + name);
            cfg.function_names.push_back(name);
            cfg.functions.emplace(name, parse_function(cfg.matrix, f, "functions[]"));
        }
    }
    if (j.contains("potential")) {
        cfg.potential_name = need_string(j, "potential");
        if (!cfg.functions.count(cfg.potential_name))
            bad_field("potential", "names no declared function");
    } else {
        bad_field("potential", "is missing");
    }
    if (j.contains("roof")) {
        cfg.roof_name = need_string(j, "roof");
        if (!cfg.functions.count(cfg.roof_name)) bad_field("roof", "names no declared function");
    }

    if (j.contains("discretization")) {
        const json& d = j["discretization"];
        if (!d.is_object()) bad_field("discretization", "must be an object");
        cfg.has_discretization = true;
        const json& delta = need(d, "discretization.delta");
        if (delta.is_string()) {
            if (delta.get<std::string>() != "auto")
                bad_field("discretization.delta", "must be a number or \"auto\"");
            cfg.delta_auto = true;
        } else if (delta.is_number()) {
            cfg.delta_request = delta.get<double>();
            if (!(cfg.delta_request > 0.0))
                bad_field("discretization.delta", "must be positive");
        } else {
            bad_field("discretization.delta", "must be a number or \"auto\"");
        }
        if (d.contains("m")) {
            cfg.m = need_int(d, "discretization.m");
            if (*cfg.m < 1) bad_field("discretization.m", "must be >= 1");
        }
        if (!cfg.delta_auto && !cfg.m)
            bad_field("discretization.m", "is required with an explicit delta");
    }

    if (j.contains("target")) cfg.target = parse_target(cfg.matrix, j["target"]);

    if (j.contains("holes")) {
        const json& h = j["holes"];
        if (!h.is_object()) bad_field("holes", "must be an object");
        cfg.n_min = need_int(h, "holes.n_min");
        cfg.n_max = need_int(h, "holes.n_max");
        if (*cfg.n_min < 1 || *cfg.n_max < *cfg.n_min)
            bad_field("holes", "needs 1 <= n_min <= n_max");
        if (h.contains("c")) cfg.overrides.c = need_real(h, "holes.c");
        if (h.contains("rho")) cfg.overrides.rho = need_real(h, "holes.rho");
        if (h.contains("kappa")) cfg.overrides.kappa = need_real(h, "holes.kappa");
        if (h.contains("l")) {
            if (!h["l"].is_array()) bad_field("holes.l", "must be an array of integers");
            cfg.overrides.l = h["l"].get<std::vector<int>>();
        }
    }

    if (j.contains("hole")) {
        const json& h = j["hole"];
        if (!h.is_object()) bad_field("hole", "must be an object");
        const int depth = need_int(h, "hole.depth");
        const json& ws = need(h, "hole.words");
        if (!ws.is_array()) bad_field("hole.words", "must be an array of word strings");
        std::vector<Word> words;
        for (const json& w : ws) {
            if (!w.is_string()) bad_field("hole.words", "must be an array of word strings");
            words.push_back(word_from_string(w.get<std::string>(), cfg.matrix.a));
        }
        cfg.hole = make_hole(cfg.matrix, depth, std::move(words));
    }

    if (j.contains("monte_carlo")) {
        const json& mc = j["monte_carlo"];
        if (!mc.is_object()) bad_field("monte_carlo", "must be an object");
        MonteCarloConfig m;
        const json& samples = need(mc, "monte_carlo.samples");
        if (!samples.is_number_integer() || samples.get<std::int64_t>() < 1000)
            bad_field("monte_carlo.samples", "must be an integer >= 1000");
        m.samples = samples.get<std::uint64_t>();
        const json& seed = need(mc, "monte_carlo.seed");
        if (!seed.is_number_integer()) bad_field("monte_carlo.seed", "must be an integer");
        m.seed = seed.get<std::uint64_t>();
        m.time = need_real(mc, "monte_carlo.time");
        if (!(m.time >= 0.0)) bad_field("monte_carlo.time", "must be >= 0");
        cfg.monte_carlo = m;
    }

    if (j.contains("k_max")) {
        cfg.k_max = need_int(j, "k_max");
        if (cfg.k_max < 1) bad_field("k_max", "must be >= 1");
    }
    if (j.contains("n_max")) {
        cfg.n_scan = need_int(j, "n_max");
        if (cfg.n_scan < 1) bad_field("n_max", "must be >= 1");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config file not readable: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace escape
