#ifndef OPTODIMER_SCENARIO_HPP
#define OPTODIMER_SCENARIO_HPP

// Scenario configuration: the scenario catalog and the key = value config grammar.
//
// Grammar (one item per line):
//   # comment            ; also after a value
//   [section]            ; scenario | params | state | time | numerics | output
//   key = value
// Keys are unique across sections. Keys before any header may belong to any
// section; after a header they must belong to it. Unknown keys are rejected.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "optodimer/errors.hpp"
#include "optodimer/fock.hpp"
#include "optodimer/observables.hpp"
#include "optodimer/params.hpp"

namespace optodimer {

enum class StateKind { Fock, Noon, Thermal, ThermalNbar };

struct InitialStateSpec {
    StateKind kind = StateKind::Fock;
    int n_a = 1;
    int n_b = 0;
    int N = 1;                 // noon
    double temperature = 0.0;  // thermal
    double nbar_a = 0.0;       // thermal_nbar
    double nbar_b = 0.0;

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case StateKind::Fock: os << "fock " << n_a << ' ' << n_b; break;
            case StateKind::Noon: os << "noon " << N; break;
            case StateKind::Thermal: os << "thermal " << temperature; break;
            case StateKind::ThermalNbar: os << "thermal_nbar " << nbar_a << ' ' << nbar_b; break;
        }
        return os.str();
    }
};

enum class PlotKind { Occupations, Coherence };

struct ScenarioConfig {
    std::string id = "custom";
    std::string title;
    std::vector<Engine> engines{Engine::Lindblad, Engine::NonHermitian};
    SystemParams params = experimental_params(1.33e-2);
    InitialStateSpec state;
    std::optional<double> t_end;  // units of 1/gamma_a; unset: default rule
    int samples = 2000;
    std::optional<int> truncation;  // per-mode dimension; unset: automatic
    double rtol = 1e-9;
    double atol = 1e-12;
    // Relative tolerance for the regime label.
    double classify_tol = 5e-3;
    double thermal_tail_tol = 1e-6;
    std::string out_dir = ".";
    bool svg = false;
    PlotKind plot = PlotKind::Occupations;

    bool has(Engine e) const { return std::find(engines.begin(), engines.end(), e) != engines.end(); }
};

inline constexpr double lindblad_max_nbar = 0.5;

// ---------------------------------------------------------------- catalog

namespace catalog {

inline constexpr double g_pt_over_omega_b = 1.33e-2;
inline constexpr double g_broken_over_omega_b = 1.33e-3;

/// Couplings for columns a/b/c (PT-symmetric, exceptional point, broken).
inline double column_coupling(int column, const SystemParams& p) {
    switch (column) {
        case 0: return g_pt_over_omega_b * p.omega_b;
        case 1: return std::abs(gamma_contrast(p.gamma_a, p.gamma_b));
        default: return g_broken_over_omega_b * p.omega_b;
    }
}

inline const char* column_name(int column) {
    switch (column) {
        case 0: return "PT-symmetric";
        case 1: return "exceptional point";
        default: return "broken";
    }
}

inline std::vector<std::string> ids() {
    std::vector<std::string> out;
    for (int fig = 1; fig <= 6; ++fig) {
        const int panels = fig == 6 ? 3 : 6;
        for (int k = 0; k < panels; ++k) out.push_back("fig" + std::to_string(fig) + static_cast<char>('a' + k));
    }
    return out;
}

}  // namespace catalog

inline bool is_catalog_id(const std::string& id) {
    const auto all = catalog::ids();
    return std::find(all.begin(), all.end(), id) != all.end();
}

/// Catalog entry for a panel id (fig1a ... fig6c) or the "custom" defaults.
inline ScenarioConfig catalog_scenario(const std::string& id) {
    ScenarioConfig c;
    c.id = id;
    if (id == "custom") {
        c.title = "custom scenario";
        return c;
    }
    if (!is_catalog_id(id)) throw ConfigError("unknown scenario id '" + id + "'");
    const int fig = id[3] - '0';
    const int panel = id[4] - 'a';
    const int column = panel % 3;
    const bool bottom = panel >= 3;
    c.params.g = catalog::column_coupling(column, c.params);

    InitialStateSpec s;
    switch (fig) {
        case 1:
            if (bottom) {
                s.kind = StateKind::Noon;
                s.N = 1;
            } else {
                s.kind = StateKind::Fock;
                s.n_a = 1;
                s.n_b = 0;
            }
            break;
        case 2:
        case 3:
            s.kind = StateKind::Fock;
            s.n_a = bottom ? 3 : 5;
            s.n_b = bottom ? 2 : 0;
            break;
        case 4:
        case 5:
            s.kind = StateKind::Noon;
            s.N = bottom ? 5 : 2;
            break;
        case 6:
            s.kind = StateKind::Thermal;
            s.temperature = 293.0;
            c.params.temperature = 293.0;
            c.engines = {Engine::Gaussian};
            break;
        default: break;
    }
    c.state = s;
    c.plot = (fig == 3 || fig == 5) ? PlotKind::Coherence : PlotKind::Occupations;
    c.title = id + ": " + s.describe() + ", " + catalog::column_name(column);
    return c;
}

// ---------------------------------------------------------------- derived settings

inline double default_t_end_seconds(const ScenarioConfig& c) {
    const double g = coupling(c.params);
    if (c.state.kind == StateKind::Thermal) {
        const double slowest = mode_decay_rates(g, c.params.gamma_a, c.params.gamma_b).first;
        if (!(slowest > 0.0)) throw ConfigError("default time window needs a nonzero slowest decay rate");
        return 5.0 / slowest;
    }
    if (!(c.params.gamma_a > 0.0)) throw ConfigError("default time window needs gamma_a > 0; set t_end");
    return 5.0 / c.params.gamma_a;
}

inline double t_end_seconds(const ScenarioConfig& c) {
    if (c.t_end) {
        if (!(c.params.gamma_a > 0.0)) throw ConfigError("t_end is in units of 1/gamma_a; gamma_a must be > 0");
        return *c.t_end / c.params.gamma_a;
    }
    return default_t_end_seconds(c);
}

/// Initial occupations (nbar_a, nbar_b) for the thermal descriptors.
inline std::pair<double, double> initial_thermal_occupations(const ScenarioConfig& c) {
    if (c.state.kind == StateKind::Thermal)
        return {thermal_occupation(c.params.omega_a, c.state.temperature),
                thermal_occupation(c.params.omega_b, c.state.temperature)};
    return {c.state.nbar_a, c.state.nbar_b};
}

inline FockSpace space_for(const ScenarioConfig& c) {
    if (c.truncation) return FockSpace(*c.truncation, *c.truncation);
    switch (c.state.kind) {
        case StateKind::Fock: {
            const int d = truncation_dim(c.state.n_a + c.state.n_b);
            return FockSpace(d, d);
        }
        case StateKind::Noon: {
            const int d = truncation_dim(c.state.N);
            return FockSpace(d, d);
        }
        case StateKind::Thermal:
        case StateKind::ThermalNbar: {
            const auto [ia, ib] = initial_thermal_occupations(c);
            const auto [ba, bb] = bath_occupations(c.params);
            return FockSpace(thermal_truncation_dim(std::max(ia, ba), c.thermal_tail_tol),
                             thermal_truncation_dim(std::max(ib, bb), c.thermal_tail_tol));
        }
    }
    return {};
}

/// Semantic checks on a filled-in config.
inline void validate(const ScenarioConfig& c) {
    if (c.engines.empty()) throw ConfigError("engine set is empty");
    try {
        validate(c.params);
        coupling(c.params);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (c.samples < 5) throw ConfigError("samples must be >= 5");
    if (c.t_end && !(*c.t_end > 0.0)) throw ConfigError("t_end must be > 0");
    if (!(c.rtol > 0.0) || !(c.atol > 0.0)) throw ConfigError("rtol and atol must be > 0");
    if (!(c.classify_tol > 0.0)) throw ConfigError("classify_tol must be > 0");
    if (c.truncation && *c.truncation < 2) throw ConfigError("truncation must be >= 2");

    const auto [bath_a, bath_b] = bath_occupations(c.params);
    switch (c.state.kind) {
        case StateKind::Fock:
            if (c.state.n_a < 0 || c.state.n_b < 0) throw ConfigError("fock occupations must be >= 0");
            if (c.state.n_a + c.state.n_b == 0) throw ConfigError("fock 0 0 has no excitations to renormalize by");
            [[fallthrough]];
        case StateKind::Noon:
            if (c.state.kind == StateKind::Noon && c.state.N < 1) throw ConfigError("noon N must be >= 1");
            if (bath_a > 0.0 || bath_b > 0.0) throw ConfigError("fock/noon states require a zero-temperature bath");
            break;
        case StateKind::Thermal:
            if (!(c.state.temperature >= 0.0)) throw ConfigError("thermal temperature must be >= 0");
            if (c.has(Engine::Lindblad) || c.has(Engine::NonHermitian))
                throw ConfigError("thermal <T> requires the gaussian engine only; use thermal_nbar for lindblad");
            break;
        case StateKind::ThermalNbar:
            if (!(c.state.nbar_a >= 0.0) || !(c.state.nbar_b >= 0.0)) throw ConfigError("thermal_nbar must be >= 0");
            if (c.state.nbar_a + c.state.nbar_b == 0.0) throw ConfigError("thermal_nbar 0 0 has no excitations");
            if (c.has(Engine::Lindblad) &&
                std::max({c.state.nbar_a, c.state.nbar_b, bath_a, bath_b}) > lindblad_max_nbar)
                throw ConfigError("lindblad engine needs occupations <= 0.5 (truncated Fock space)");
            break;
    }
}

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view v, int line, const std::string& key) {
    double x = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x))
        throw ConfigError("malformed number '" + std::string(v) + "' for key '" + key + "'", line);
    return x;
}

inline int parse_int(std::string_view v, int line, const std::string& key) {
    int x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("malformed integer '" + std::string(v) + "' for key '" + key + "'", line);
    return x;
}

inline bool parse_bool(std::string_view v, int line, const std::string& key) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("malformed boolean '" + std::string(v) + "' for key '" + key + "'", line);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) out.push_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline Engine parse_engine(std::string_view v, int line) {
    if (v == "lindblad") return Engine::Lindblad;
    if (v == "nonhermitian") return Engine::NonHermitian;
    if (v == "gaussian") return Engine::Gaussian;
    throw ConfigError("unknown engine '" + std::string(v) + "'", line);
}

inline const std::map<std::string, std::string, std::less<>>& key_sections() {
    static const std::map<std::string, std::string, std::less<>> keys = {
        {"id", "scenario"},          {"engines", "scenario"},        {"plot", "scenario"},
        {"omega_a", "params"},       {"omega_b", "params"},          {"omega_p", "params"},
        {"gamma_a", "params"},       {"gamma_b", "params"},          {"g0", "params"},
        {"pump", "params"},          {"g", "params"},                {"g_over_omega_b", "params"},
        {"temperature", "params"},   {"nbar_a", "params"},           {"nbar_b", "params"},
        {"initial", "state"},        {"t_end", "time"},              {"samples", "time"},
        {"rtol", "numerics"},        {"atol", "numerics"},           {"truncation", "numerics"},
        {"classify_tol", "numerics"}, {"thermal_tail_tol", "numerics"}, {"dir", "output"},
        {"svg", "output"},
    };
    return keys;
}

struct Entry {
    std::string key;
    std::string value;
    int line;
};

}  // namespace detail

/// Parses an initial-state descriptor: "fock n_a n_b", "noon N", "thermal T", "thermal_nbar na nb".
inline InitialStateSpec parse_initial_state(std::string_view v, int line = 0) {
    const auto parts = detail::split(v, ' ');
    if (parts.empty()) throw ConfigError("empty initial-state descriptor", line);
    InitialStateSpec s;
    auto expect = [&](size_t n) {
        if (parts.size() != n) throw ConfigError("initial-state descriptor '" + std::string(v) + "' has wrong arity", line);
    };
    if (parts[0] == "fock") {
        expect(3);
        s.kind = StateKind::Fock;
        s.n_a = detail::parse_int(parts[1], line, "initial");
        s.n_b = detail::parse_int(parts[2], line, "initial");
    } else if (parts[0] == "noon") {
        expect(2);
        s.kind = StateKind::Noon;
        s.N = detail::parse_int(parts[1], line, "initial");
    } else if (parts[0] == "thermal") {
        expect(2);
        s.kind = StateKind::Thermal;
        s.temperature = detail::parse_number(parts[1], line, "initial");
    } else if (parts[0] == "thermal_nbar") {
        expect(3);
        s.kind = StateKind::ThermalNbar;
        s.nbar_a = detail::parse_number(parts[1], line, "initial");
        s.nbar_b = detail::parse_number(parts[2], line, "initial");
    } else {
        throw ConfigError("unknown initial-state kind '" + std::string(parts[0]) + "'", line);
    }
    return s;
}

inline std::vector<Engine> parse_engines(std::string_view v, int line = 0) {
    std::vector<Engine> out;
    for (auto piece : detail::split(v, ',')) {
        const Engine e = detail::parse_engine(piece, line);
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
    if (out.empty()) throw ConfigError("engine set is empty", line);
    return out;
}

/// Parses config text on top of the catalog entry named by `scenario_id`
/// (which overrides any `id` key in the text). Returns a validated config.
inline ScenarioConfig parse_config(std::string_view text, std::optional<std::string> scenario_id = {}) {
    std::vector<detail::Entry> entries;
    std::string section;
    int line_no = 0;
    std::map<std::string, int, std::less<>> seen;
    size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            static const std::vector<std::string> sections = {"scenario", "params", "state",
                                                              "time",     "numerics", "output"};
            if (std::find(sections.begin(), sections.end(), section) == sections.end())
                throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("missing key", line_no);
        if (value.empty()) throw ConfigError("missing value for key '" + key + "'", line_no);
        const auto& keys = detail::key_sections();
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError("unknown key '" + key + "'", line_no);
        if (!section.empty() && it->second != section)
            throw ConfigError("key '" + key + "' does not belong to section [" + section + "]", line_no);
        if (seen.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
        seen[key] = line_no;
        entries.push_back({key, value, line_no});
    }

    std::string id = "custom";
    for (const auto& e : entries)
        if (e.key == "id") id = e.value;
    if (scenario_id) id = *scenario_id;
    ScenarioConfig c;
    try {
        c = catalog_scenario(id);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), seen.count("id") && !scenario_id ? seen["id"] : 0);
    }

    const bool sets_g = seen.count("g") || seen.count("g_over_omega_b");
    if (seen.count("g") && seen.count("g_over_omega_b"))
        throw ConfigError("set only one of g and g_over_omega_b", seen["g_over_omega_b"]);
    if (!sets_g && (seen.count("g0") || seen.count("pump"))) c.params.g.reset();

    std::optional<double> g_ratio;
    for (const auto& e : entries) {
        const auto& k = e.key;
        const auto num = [&] { return detail::parse_number(e.value, e.line, k); };
        if (k == "id") continue;
        else if (k == "engines") c.engines = parse_engines(e.value, e.line);
        else if (k == "plot") {
            if (e.value == "occupations") c.plot = PlotKind::Occupations;
            else if (e.value == "coherence") c.plot = PlotKind::Coherence;
            else throw ConfigError("plot must be 'occupations' or 'coherence'", e.line);
        }
        else if (k == "omega_a") c.params.omega_a = num();
        else if (k == "omega_b") c.params.omega_b = num();
        else if (k == "omega_p") c.params.omega_p = num();
        else if (k == "gamma_a") c.params.gamma_a = num();
        else if (k == "gamma_b") c.params.gamma_b = num();
        else if (k == "g0") c.params.g0 = num();
        else if (k == "pump") c.params.pump = num();
        else if (k == "g") c.params.g = num();
        else if (k == "g_over_omega_b") g_ratio = num();
        else if (k == "temperature") c.params.temperature = num();
        else if (k == "nbar_a") c.params.nbar_a = num();
        else if (k == "nbar_b") c.params.nbar_b = num();
        else if (k == "initial") c.state = parse_initial_state(e.value, e.line);
        else if (k == "t_end") c.t_end = num();
        else if (k == "samples") c.samples = detail::parse_int(e.value, e.line, k);
        else if (k == "rtol") c.rtol = num();
        else if (k == "atol") c.atol = num();
        else if (k == "truncation") {
            if (e.value == "auto") c.truncation.reset();
            else c.truncation = detail::parse_int(e.value, e.line, k);
        }
        else if (k == "classify_tol") c.classify_tol = num();
        else if (k == "thermal_tail_tol") c.thermal_tail_tol = num();
        else if (k == "dir") c.out_dir = e.value;
        else if (k == "svg") c.svg = detail::parse_bool(e.value, e.line, k);
    }
    // Ratio applies after omega_b is final.
    if (g_ratio) c.params.g = *g_ratio * c.params.omega_b;
    validate(c);
    return c;
}

}  // namespace optodimer

#endif
