// cli.hpp — argument parsing, experiment dispatch and CSV / JSON writers for the fockladder tool

#pragma once

#include "fockladder/errors.hpp"
#include "fockladder/experiments.hpp"
#include "fockladder/floquet.hpp"
#include "fockladder/meanfield.hpp"
#include "fockladder/observables.hpp"
#include "fockladder/validation.hpp"
#include "fockladder/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fockladder::cli {

using json = nlohmann::ordered_json;

enum class Command { bands, ground, current_scan, mu_scan, fss, entropy_scan, validate };
enum class Format { csv, json };

inline constexpr std::array<std::pair<Command, std::string_view>, 7> kCommandNames{{
    {Command::bands, "bands"},
    {Command::ground, "ground"},
    {Command::current_scan, "current-scan"},
    {Command::mu_scan, "mu-scan"},
    {Command::fss, "fss"},
    {Command::entropy_scan, "entropy-scan"},
    {Command::validate, "validate"},
}};

inline std::string_view to_string(Command c) {
    for (auto [cmd, name] : kCommandNames)
        if (cmd == c) return name;
    return "?";
}

inline std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

/// Bad command line; the tool exits with status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// --help was given; carries the rendered help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double min{0.0};
    double max{0.0};
    std::size_t points{1};

    [[nodiscard]] std::vector<double> values() const { return experiments::linspace(min, max, points); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct RunConfig {
    Command command{Command::validate};
    SystemParams params{};
    GridSpec phi_grid{0.0, 0.5 * std::numbers::pi, 121};
    GridSpec mu_grid{-0.6, 0.1, 71};
    std::vector<int> ns{experiments::default_sizes()};
    std::optional<std::vector<double>> fluxes;  // nullopt: {φ_c/2, φ_c, 3φ_c/2}
    std::string out{"fockladder"};
    Format format{Format::csv};

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ------------------------------- parsing -------------------------------------

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !(is >> std::ws).eof())
            throw UsageError(std::string(flag) + ": cannot parse '" + item + "' in list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": list is empty");
    return out;
}

inline void require_finite(double v, const char* flag) {
    if (!std::isfinite(v)) throw UsageError(std::string(flag) + ": value must be finite");
}

inline void require_grid(const GridSpec& g, const char* min_flag, const char* max_flag, const char* points_flag) {
    require_finite(g.min, min_flag);
    require_finite(g.max, max_flag);
    if (g.points == 0) throw UsageError(std::string(points_flag) + ": grid must not be empty");
    if (g.points > 1 && !(g.max > g.min))
        throw UsageError(std::string(max_flag) + ": must exceed " + min_flag + " when the grid has several points");
}

inline void require_even_n(int n, const char* flag) {
    if (n < 2 || n % 2 != 0)
        throw UsageError(std::string(flag) + ": particle number must be even and at least 2 (got " +
                         std::to_string(n) + ")");
}

/// Checks every invariant of a RunConfig, naming the flag at fault.
inline void validate(const RunConfig& c) {
    require_even_n(c.params.N, "--n");
    require_finite(c.params.mu, "--mu");
    require_finite(c.params.xi, "--xi");
    require_finite(c.params.phi, "--phi");
    require_finite(c.params.tau, "--tau");
    if (c.params.xi < 0.0) throw UsageError("--xi: must be non-negative");
    if (!(c.params.tau > 0.0)) throw UsageError("--tau: must be positive");
    require_grid(c.phi_grid, "--phi-min", "--phi-max", "--phi-points");
    require_grid(c.mu_grid, "--mu-min", "--mu-max", "--mu-points");
    if (c.ns.empty()) throw UsageError("--ns: list is empty");
    for (int n : c.ns) require_even_n(n, "--ns");
    if (c.fluxes) {
        if (c.fluxes->empty()) throw UsageError("--fluxes: list is empty");
        for (double f : *c.fluxes) require_finite(f, "--fluxes");
    }
    if (c.out.empty()) throw UsageError("--out: path is empty");
}

}  // namespace detail

inline RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig c;
    CLI::App app{"Floquet Fock-state ladder: spectra, chiral currents and entanglement of a driven BEC with an impurity",
                 "fockladder"};
    app.set_version_flag("--version", std::string(kVersion));

    std::string command;
    std::string ns_text, fluxes_text = "auto", format_text = "csv";
    bool phi_min_set = false;
    app.add_option("command", command, "bands | ground | current-scan | mu-scan | fss | entropy-scan | validate")
        ->required();
    app.add_option("--n", c.params.N, "particle number N (even)")->capture_default_str();
    app.add_option("--mu", c.params.mu, "interaction strength mu")->capture_default_str();
    app.add_option("--xi", c.params.xi, "impurity tunneling ratio xi = K/J")->capture_default_str();
    app.add_option("--tau", c.params.tau, "pulse interval tau")->capture_default_str();
    app.add_option("--phi", c.params.phi, "flux phi for `ground` [rad]")->capture_default_str();
    app.add_option_function<double>("--phi-min", [&](double v) {
        c.phi_grid.min = v;
        phi_min_set = true;
    },
                                    "flux grid start [rad]");
    app.add_option("--phi-max", c.phi_grid.max, "flux grid end [rad]")->capture_default_str();
    app.add_option("--phi-points", c.phi_grid.points, "flux grid size")->capture_default_str();
    app.add_option("--mu-min", c.mu_grid.min, "interaction grid start")->capture_default_str();
    app.add_option("--mu-max", c.mu_grid.max, "interaction grid end")->capture_default_str();
    app.add_option("--mu-points", c.mu_grid.points, "interaction grid size")->capture_default_str();
    app.add_option("--ns", ns_text, "comma-separated particle numbers for fss (default 20,40,60,80,100)");
    app.add_option("--fluxes", fluxes_text, "band-panel fluxes: auto or comma-separated list [rad]")
        ->capture_default_str();
    app.add_option("--out", c.out, "output path stem")->capture_default_str();
    app.add_option("--format", format_text, "csv | json")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForVersion&) {
        throw HelpRequested(std::string(kVersion) + "\n");
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    bool known = false;
    for (auto [cmd, name] : kCommandNames)
        if (command == name) c.command = cmd, known = true;
    if (!known) throw UsageError("command: unknown command '" + command + "'");

    if (format_text == "csv") c.format = Format::csv;
    else if (format_text == "json") c.format = Format::json;
    else throw UsageError("--format: expected csv or json, got '" + format_text + "'");

    if (!ns_text.empty()) c.ns = detail::parse_list<int>(ns_text, "--ns");
    if (fluxes_text != "auto") c.fluxes = detail::parse_list<double>(fluxes_text, "--fluxes");

    // The entanglement entropy is undefined at φ = 0; drop that point from the default grid.
    if (c.command == Command::entropy_scan && !phi_min_set && c.phi_grid.min == 0.0 && c.phi_grid.points > 1) {
        c.phi_grid.min = c.phi_grid.max / static_cast<double>(c.phi_grid.points - 1);
        c.phi_grid.points -= 1;
    }
    detail::validate(c);
    return c;
}

inline RunConfig parse_args(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return parse_args(args);
}

// ------------------------------ serialization --------------------------------

inline json to_json(const RunConfig& c) {
    json j;
    j["command"] = std::string(to_string(c.command));
    j["n"] = c.params.N;
    j["mu"] = c.params.mu;
    j["xi"] = c.params.xi;
    j["phi"] = c.params.phi;
    j["tau"] = c.params.tau;
    j["phi_grid"] = {{"min", c.phi_grid.min}, {"max", c.phi_grid.max}, {"points", c.phi_grid.points}};
    j["mu_grid"] = {{"min", c.mu_grid.min}, {"max", c.mu_grid.max}, {"points", c.mu_grid.points}};
    j["ns"] = c.ns;
    j["fluxes"] = c.fluxes ? json(*c.fluxes) : json("auto");
    j["out"] = c.out;
    j["format"] = std::string(to_string(c.format));
    return j;
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        const auto command = j.at("command").get<std::string>();
        bool known = false;
        for (auto [cmd, name] : kCommandNames)
            if (command == name) c.command = cmd, known = true;
        if (!known) throw UsageError("command: unknown command '" + command + "'");
        c.params = {j.at("n").get<int>(), j.at("mu").get<double>(), j.at("xi").get<double>(),
                    j.at("phi").get<double>(), j.at("tau").get<double>()};
        for (auto [key, grid] : {std::pair{"phi_grid", &c.phi_grid}, std::pair{"mu_grid", &c.mu_grid}}) {
            const json& g = j.at(key);
            *grid = {g.at("min").get<double>(), g.at("max").get<double>(), g.at("points").get<std::size_t>()};
        }
        c.ns = j.at("ns").get<std::vector<int>>();
        if (j.at("fluxes").is_string()) {
            if (j.at("fluxes").get<std::string>() != "auto") throw UsageError("fluxes: expected auto or a list");
            c.fluxes.reset();
        } else {
            c.fluxes = j.at("fluxes").get<std::vector<double>>();
        }
        c.out = j.at("out").get<std::string>();
        const auto format = j.at("format").get<std::string>();
        if (format != "csv" && format != "json") throw UsageError("format: expected csv or json");
        c.format = format == "csv" ? Format::csv : Format::json;
    } catch (const json::exception& e) {
        throw UsageError(std::string("metadata: ") + e.what());
    }
    detail::validate(c);
    return c;
}

/// Reads the `config` block of a metadata sidecar.
inline RunConfig config_from_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return config_from_json(json::parse(in).at("config"));
}

// -------------------------------- writers ------------------------------------

/// Fixed 17-significant-digit decimal rendering.
inline std::string format_number(double v) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

/// RFC 4180 field quoting.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
        write_fields(header);
    }

    using Cell = std::variant<double, long long, std::string, std::nullopt_t>;

    void row(const std::vector<Cell>& cells) {
        std::vector<std::string> fields;
        fields.reserve(cells.size());
        for (const auto& cell : cells) {
            if (auto d = std::get_if<double>(&cell)) fields.push_back(format_number(*d));
            else if (auto i = std::get_if<long long>(&cell)) fields.push_back(std::to_string(*i));
            else if (auto s = std::get_if<std::string>(&cell)) fields.push_back(*s);
            else fields.emplace_back();
        }
        write_fields(fields);
    }

    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("failed writing " + path_.string());
    }

private:
    void write_fields(const std::vector<std::string>& fields) {
        for (std::size_t k = 0; k < fields.size(); ++k) out_ << (k ? "," : "") << csv_field(fields[k]);
        out_ << "\r\n";
        if (!out_) throw std::runtime_error("failed writing " + path_.string());
    }

    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Output file naming: `<stem>.<ext>`, `<stem>_<tag>.<ext>` and the sidecar `<stem>.meta.json`.
struct OutputPaths {
    std::filesystem::path stem;

    explicit OutputPaths(const std::string& out) : stem(out) {
        const auto ext = stem.extension();
        if (ext == ".csv" || ext == ".json") stem.replace_extension();
    }

    [[nodiscard]] std::filesystem::path data(Format f, const std::string& tag = "") const {
        std::filesystem::path p = stem;
        p += (tag.empty() ? "" : "_" + tag) + (f == Format::csv ? ".csv" : ".json");
        return p;
    }
    [[nodiscard]] std::filesystem::path sidecar() const {
        std::filesystem::path p = stem;
        p += ".meta.json";
        return p;
    }
};

/// Fails early when the output directory is missing or read-only.
inline void require_writable_output(const OutputPaths& paths) {
    std::filesystem::path dir = paths.stem.parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw std::runtime_error("output directory " + dir.string() + " does not exist");
    if (::access(dir.c_str(), W_OK) != 0)
        throw std::runtime_error("output directory " + dir.string() + " is not writable");
}

// ------------------------------- commands ------------------------------------

struct CommandOutput {
    json results = json::object();
    std::vector<std::filesystem::path> files;
};

namespace detail {

inline const std::vector<std::string> kScanHeader{
    "N [particles]",  "mu [1]", "xi [1]", "phi [rad]", "tau [1/J]", "2J_C/(NJ) numeric [1]", "2J_C/(NJ) analytic [1]",
    "S numeric [nat]", "S analytic [nat]"};

inline void write_scan(const std::vector<experiments::ScanRecord>& records, const RunConfig& c, CommandOutput& out) {
    const OutputPaths paths(c.out);
    const auto file = paths.data(c.format);
    if (c.format == Format::csv) {
        CsvWriter w(file, kScanHeader);
        for (const auto& r : records) {
            auto opt = [](const std::optional<double>& v) -> CsvWriter::Cell {
                if (v) return *v;
                return std::nullopt;
            };
            w.row({static_cast<long long>(r.params.N), r.params.mu, r.params.xi, r.params.phi, r.params.tau,
                   r.jc_numeric, r.jc_analytic, opt(r.entropy_numeric), opt(r.entropy_analytic)});
        }
        w.close();
    } else {
        json rows = json::array();
        for (const auto& r : records)
            rows.push_back({{"n", r.params.N},
                            {"mu", r.params.mu},
                            {"xi", r.params.xi},
                            {"phi", r.params.phi},
                            {"tau", r.params.tau},
                            {"jc_numeric", r.jc_numeric},
                            {"jc_analytic", r.jc_analytic},
                            {"entropy_numeric", optional_json(r.entropy_numeric)},
                            {"entropy_analytic", optional_json(r.entropy_analytic)}});
        write_json(file, {{"records", rows}});
    }
    out.files.push_back(file);
}

inline CommandOutput run_current_scan(const RunConfig& c) {
    CommandOutput out;
    const auto& p = c.params;
    const auto records = experiments::scan_flux(p.N, p.mu, p.xi, p.tau, c.phi_grid.values());
    write_scan(records, c, out);
    std::size_t k = 0;
    for (std::size_t j = 1; j < records.size(); ++j)
        if (records[j].jc_numeric > records[k].jc_numeric) k = j;
    out.results = {{"peak_phi", records[k].params.phi},
                   {"peak_jc", records[k].jc_numeric},
                   {"critical_flux", p.xi > 0.0 ? json(meanfield::critical_flux(p.xi)) : json(nullptr)}};
    return out;
}

inline CommandOutput run_entropy_scan(const RunConfig& c) {
    CommandOutput out;
    const auto& p = c.params;
    const auto records = experiments::entropy_scan(p.N, p.xi, p.tau, c.phi_grid.values());
    write_scan(records, c, out);
    double worst = 0.0, at = 0.0;
    for (const auto& r : records) {
        const double gap = std::abs(*r.entropy_numeric - *r.entropy_analytic);
        if (gap > worst) worst = gap, at = r.params.phi;
    }
    out.results = {{"max_abs_difference", worst}, {"max_difference_phi", at}};
    return out;
}

inline CommandOutput run_ground(const RunConfig& c) {
    CommandOutput out;
    const auto& p = c.params;
    p.validate();
    const GroundState g = solve_ground_state(p);
    const LegProfile prof = fock_density_phase(g.state);
    const ChiralCurrent jc = chiral_current_numeric(g.state, p.phi);
    const OutputPaths paths(c.out);
    const auto file = paths.data(c.format);
    if (c.format == Format::csv) {
        CsvWriter w(file, {"n [particles]", "density left [1]", "phase left [rad]", "density right [1]",
                           "phase right [rad]"});
        for (int n = -p.N / 2; n <= p.N / 2; ++n) {
            const auto k = static_cast<std::size_t>(n + p.N / 2);
            auto phase = [&](int leg) -> CsvWriter::Cell {
                if (prof.phase[leg][k]) return *prof.phase[leg][k];
                return std::nullopt;
            };
            w.row({static_cast<long long>(n), prof.density[0][k], phase(0), prof.density[1][k], phase(1)});
        }
        w.close();
    } else {
        json legs = json::array();
        for (int leg = 0; leg < 2; ++leg) {
            json phases = json::array();
            for (const auto& ph : prof.phase[leg]) phases.push_back(optional_json(ph));
            legs.push_back({{"leg", leg == 0 ? "left" : "right"}, {"density", prof.density[leg]}, {"phase", phases}});
        }
        write_json(file, {{"n_min", -p.N / 2}, {"legs", legs}});
    }
    out.files.push_back(file);
    out.results = {{"quasienergy", g.quasienergy},
                   {"jc", jc.jc},
                   {"jc_normalized", jc.normalized},
                   {"entropy", entanglement_entropy_numeric(g.state)}};
    return out;
}

inline json mu_maximum_json(const experiments::MuMaximum& m) {
    json per = json::array();
    for (std::size_t k = 0; k < m.mus.size(); ++k)
        per.push_back({{"mu", m.mus[k]}, {"phi_at_max", m.maxima[k].phi}, {"max_jc", m.maxima[k].jc}});
    return {{"mu_max", m.mu_max}, {"max_jc", m.max_jc}, {"mu_grid_max", m.mu_grid_max}, {"grid", per}};
}

inline CommandOutput run_mu_scan(const RunConfig& c) {
    CommandOutput out;
    const auto& p = c.params;
    const auto m = experiments::find_mu_max(p.N, p.xi, p.tau, c.mu_grid.values(), c.phi_grid.values());
    const OutputPaths paths(c.out);
    const auto file = paths.data(c.format);
    if (c.format == Format::csv) {
        CsvWriter w(file, {"mu [1]", "phi at max [rad]", "max 2J_C/(NJ) [1]"});
        for (std::size_t k = 0; k < m.mus.size(); ++k) w.row({m.mus[k], m.maxima[k].phi, m.maxima[k].jc});
        w.close();
    } else {
        write_json(file, mu_maximum_json(m));
    }
    out.files.push_back(file);
    out.results = {{"mu_max", m.mu_max},
                   {"max_jc", m.max_jc},
                   {"mu_grid_max", m.mu_grid_max},
                   {"mu_critical", p.xi > 0.0 ? json(meanfield::mu_critical(p.xi)) : json(nullptr)}};
    return out;
}

inline CommandOutput run_fss(const RunConfig& c) {
    CommandOutput out;
    const auto& p = c.params;
    const auto r = experiments::finite_size_extrapolation(c.ns, p.xi, p.tau, c.mu_grid.values(), c.phi_grid.values());
    const json fit = {{"slope", r.fit.slope},
                      {"intercept", r.fit.intercept},
                      {"r_squared", r.fit.r_squared},
                      {"mu_critical", r.mu_c}};
    const OutputPaths paths(c.out);
    if (c.format == Format::csv) {
        const auto points = paths.data(Format::csv);
        CsvWriter w(points, {"N [particles]", "1/N [1]", "mu_max [1]", "max 2J_C/(NJ) [1]", "|mu_max - mu_c| [1]"});
        for (std::size_t k = 0; k < r.sizes.size(); ++k)
            w.row({static_cast<long long>(r.sizes[k]), r.fit.points[k].first, r.per_size[k].mu_max,
                   r.per_size[k].max_jc, r.fit.points[k].second});
        w.close();
        const auto fit_file = paths.data(Format::csv, "fit");
        CsvWriter f(fit_file, {"slope [1]", "intercept [1]", "r_squared [1]", "mu_c [1]"});
        f.row({r.fit.slope, r.fit.intercept, r.fit.r_squared, r.mu_c});
        f.close();
        out.files = {points, fit_file};
    } else {
        json sizes = json::array();
        for (std::size_t k = 0; k < r.sizes.size(); ++k) {
            json entry = mu_maximum_json(r.per_size[k]);
            entry["n"] = r.sizes[k];
            entry["abs_difference"] = r.fit.points[k].second;
            sizes.push_back(entry);
        }
        const auto file = paths.data(Format::json);
        write_json(file, {{"fit", fit}, {"sizes", sizes}});
        out.files = {file};
    }
    out.results = fit;
    return out;
}

inline CommandOutput run_bands(const RunConfig& c) {
    CommandOutput out;
    const auto& p = c.params;
    if (!c.fluxes && !(p.xi > 0.0)) throw std::invalid_argument("--fluxes auto needs xi > 0");
    const auto fluxes = c.fluxes ? *c.fluxes : experiments::default_panel_fluxes(p.xi);
    const auto panels = experiments::band_panels(p.N, p.xi, p.mu, p.tau, fluxes);
    const OutputPaths paths(c.out);
    json summary = json::array();
    if (c.format == Format::json) {
        json all = json::array();
        for (const auto& panel : panels) {
            json density_left = json::array(), density_right = json::array();
            for (Eigen::Index k = 0; k < panel.density_left.rows(); ++k) {
                std::vector<double> l(panel.density_left.cols()), r(panel.density_right.cols());
                for (Eigen::Index i = 0; i < panel.density_left.cols(); ++i) {
                    l[i] = panel.density_left(k, i);
                    r[i] = panel.density_right(k, i);
                }
                density_left.push_back(l);
                density_right.push_back(r);
            }
            json legs = json::array();
            for (int leg = 0; leg < 2; ++leg) {
                json phases = json::array();
                for (const auto& ph : panel.ground.phase[leg]) phases.push_back(optional_json(ph));
                legs.push_back(
                    {{"leg", leg == 0 ? "left" : "right"}, {"density", panel.ground.density[leg]}, {"phase", phases}});
            }
            all.push_back({{"phi", panel.phi},
                           {"theta", panel.thetas},
                           {"e_lower", panel.e_lower},
                           {"e_upper", panel.e_upper},
                           {"quasienergies", std::vector<double>(panel.quasienergies.begin(), panel.quasienergies.end())},
                           {"density_left", density_left},
                           {"density_right", density_right},
                           {"ground", {{"quasienergy", panel.ground_quasienergy}, {"n_min", -p.N / 2}, {"legs", legs}}}});
        }
        const auto file = paths.data(Format::json);
        write_json(file, {{"panels", all}});
        out.files.push_back(file);
    } else {
        for (std::size_t k = 0; k < panels.size(); ++k) {
            const auto& panel = panels[k];
            const std::string tag = "panel" + std::to_string(k);
            const auto bands = paths.data(Format::csv, tag + "_bands");
            CsvWriter wb(bands, {"theta [rad]", "E_lower [J]", "E_upper [J]"});
            for (std::size_t t = 0; t < panel.thetas.size(); ++t)
                wb.row({panel.thetas[t], panel.e_lower[t], panel.e_upper[t]});
            wb.close();

            const auto density = paths.data(Format::csv, tag + "_density");
            CsvWriter wd(density, {"theta [rad]", "level [index]", "quasienergy [J]", "P_left [1]", "P_right [1]"});
            for (Eigen::Index t = 0; t < panel.density_left.rows(); ++t)
                for (Eigen::Index i = 0; i < panel.density_left.cols(); ++i)
                    wd.row({panel.thetas[static_cast<std::size_t>(t)], static_cast<long long>(i),
                            panel.quasienergies(i), panel.density_left(t, i), panel.density_right(t, i)});
            wd.close();

            const auto ground = paths.data(Format::csv, tag + "_ground");
            CsvWriter wg(ground, {"n [particles]", "density left [1]", "phase left [rad]", "density right [1]",
                                  "phase right [rad]"});
            for (int n = -p.N / 2; n <= p.N / 2; ++n) {
                const auto j = static_cast<std::size_t>(n + p.N / 2);
                auto phase = [&](int leg) -> CsvWriter::Cell {
                    if (panel.ground.phase[leg][j]) return *panel.ground.phase[leg][j];
                    return std::nullopt;
                };
                wg.row({static_cast<long long>(n), panel.ground.density[0][j], phase(0), panel.ground.density[1][j],
                        phase(1)});
            }
            wg.close();
            out.files.insert(out.files.end(), {bands, density, ground});
        }
    }
    for (const auto& panel : panels)
        summary.push_back({{"phi", panel.phi}, {"ground_quasienergy", panel.ground_quasienergy}});
    out.results = {{"panels", summary}};
    return out;
}

inline CommandOutput run_validate(const RunConfig& c, std::ostream& log, bool& all_passed) {
    CommandOutput out;
    const auto checks = validation::run_invariant_suite(c.params);
    all_passed = validation::all_passed(checks);
    const OutputPaths paths(c.out);
    const auto file = paths.data(c.format);
    json rows = json::array();
    for (const auto& ch : checks) {
        log << (ch.passed ? "PASS " : "FAIL ") << ch.name << "  value=" << format_number(ch.value)
            << " tol=" << format_number(ch.tolerance) << '\n';
        rows.push_back({{"name", ch.name}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"passed", ch.passed}});
    }
    if (c.format == Format::csv) {
        CsvWriter w(file, {"check [name]", "value [1]", "tolerance [1]", "passed [bool]"});
        for (const auto& ch : checks)
            w.row({ch.name, ch.value, ch.tolerance, std::string(ch.passed ? "true" : "false")});
        w.close();
    } else {
        write_json(file, {{"checks", rows}});
    }
    out.files.push_back(file);
    out.results = {{"all_passed", all_passed}, {"checks", rows}};
    return out;
}

}  // namespace detail

/// Executes a parsed configuration: 0 on success, 1 on a compute or I/O failure (or a failed
/// invariant in `validate`).
inline int run(const RunConfig& c, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    const auto start = std::chrono::steady_clock::now();
    try {
        detail::validate(c);
        const OutputPaths paths(c.out);
        require_writable_output(paths);

        bool passed = true;
        CommandOutput result;
        switch (c.command) {
            case Command::bands: result = detail::run_bands(c); break;
            case Command::ground: result = detail::run_ground(c); break;
            case Command::current_scan: result = detail::run_current_scan(c); break;
            case Command::mu_scan: result = detail::run_mu_scan(c); break;
            case Command::fss: result = detail::run_fss(c); break;
            case Command::entropy_scan: result = detail::run_entropy_scan(c); break;
            case Command::validate: result = detail::run_validate(c, log, passed); break;
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json files = json::array();
        for (const auto& f : result.files) files.push_back(f.string());
        write_json(paths.sidecar(), {{"tool", "fockladder"},
                                     {"version", std::string(kVersion)},
                                     {"config", to_json(c)},
                                     {"wall_time_s", wall},
                                     {"files", files},
                                     {"results", result.results}});
        for (const auto& f : result.files) log << "wrote " << f.string() << '\n';
        log << "wrote " << paths.sidecar().string() << '\n';
        if (!passed) {
            err << "error: invariant suite failed\n";
            return 1;
        }
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << to_string(c.command) << " failed at " << c.params.describe() << ": " << e.what() << '\n';
        return 1;
    }
}

/// Full entry point: parse, run, map usage problems to exit status 2.
inline int main(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    try {
        return run(parse_args(argc, argv), log, err);
    } catch (const HelpRequested& h) {
        log << h.what();
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun with --help for the flag list\n";
        return 2;
    }
}

}  // namespace fockladder::cli
