#include "kinslab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "kinslab/errors.hpp"

namespace kinslab {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"model", {"collision", "epsilon"}},
        {"grids", {"nx", "nv", "vmax"}},
        {"boundary", {"alpha", "beta", "alpha_left", "beta_left", "alpha_right", "beta_right", "iota"}},
        {"potential", {"kind", "amplitude", "file"}},
        {"initial", {"kind", "amplitude", "center", "width", "value"}},
        {"time", {"final", "cfl", "record_interval"}},
        {"output", {"snapshots"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> raw(const std::string& path) const {
        const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'));
        if (!node) return std::nullopt;
        return trim(*node);
    }

    double number(const std::string& path, double fallback) const {
        const auto text = raw(path);
        if (!text) return fallback;
        double value = 0.0;
        const char* end = text->data() + text->size();
        const auto [ptr, ec] = std::from_chars(text->data(), end, value);
        if (ec != std::errc() || ptr != end || text->empty()) {
            throw ConfigError(path + ": expected a number, got '" + *text + "'");
        }
        return value;
    }

    int integer(const std::string& path, int fallback) const {
        const auto text = raw(path);
        if (!text) return fallback;
        int value = 0;
        const char* end = text->data() + text->size();
        const auto [ptr, ec] = std::from_chars(text->data(), end, value);
        if (ec != std::errc() || ptr != end || text->empty()) {
            throw ConfigError(path + ": expected an integer, got '" + *text + "'");
        }
        return value;
    }

    bool boolean(const std::string& path, bool fallback) const {
        const auto text = raw(path);
        if (!text) return fallback;
        if (*text == "true" || *text == "yes" || *text == "1" || *text == "on") return true;
        if (*text == "false" || *text == "no" || *text == "0" || *text == "off") return false;
        throw ConfigError(path + ": expected true or false, got '" + *text + "'");
    }

    std::string word(const std::string& path, const std::string& fallback) const {
        return raw(path).value_or(fallback);
    }

private:
    const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) {
            if (body.empty()) throw ConfigError(section + ": keys must appear inside a section");
            throw ConfigError(section + ": unknown section");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) throw ConfigError(section + "." + key + ": unknown key");
        }
    }
}

template <typename Fn>
auto rethrow_with_path(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        throw ConfigError(path + ": " + what);
    }
}

std::string format_number(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("malformed configuration at line " + std::to_string(e.line()) + ": " + e.message());
    }
    check_keys(tree);
    const Reader r(tree);

    RunConfig cfg;
    SimConfig& sim = cfg.sim;
    sim.collision = rethrow_with_path("model.collision",
                                      [&] { return parse_collision_kind(r.word("model.collision", "bgk")); });
    sim.epsilon = r.number("model.epsilon", sim.epsilon);
    sim.nx = r.integer("grids.nx", sim.nx);
    sim.nv = r.integer("grids.nv", sim.nv);
    sim.vmax = r.number("grids.vmax", sim.vmax);

    const double alpha = r.number("boundary.alpha", 1.0);
    const double beta = r.number("boundary.beta", 0.0);
    sim.boundary.walls[wall_index(Wall::Left)] = {r.number("boundary.alpha_left", alpha),
                                                  r.number("boundary.beta_left", beta)};
    sim.boundary.walls[wall_index(Wall::Right)] = {r.number("boundary.alpha_right", alpha),
                                                   r.number("boundary.beta_right", beta)};
    sim.boundary.iota = r.number("boundary.iota", sim.boundary.iota);

    const auto kind = rethrow_with_path("potential.kind",
                                        [&] { return parse_potential_kind(r.word("potential.kind", "zero")); });
    if (kind == PotentialKind::Tabulated) {
        const auto file = r.raw("potential.file");
        if (!file || file->empty()) throw ConfigError("potential.file: required when potential.kind = table");
        std::filesystem::path path(*file);
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        const std::string resolved = std::filesystem::absolute(path).lexically_normal().string();
        sim.potential = rethrow_with_path("potential.file", [&] { return read_potential_table(resolved); });
    } else {
        if (r.raw("potential.file")) throw ConfigError("potential.file: only valid with potential.kind = table");
        sim.potential.kind = kind;
        sim.potential.amplitude = r.number("potential.amplitude", 0.0);
        if (!std::isfinite(sim.potential.amplitude)) throw ConfigError("potential.amplitude: must be finite");
    }

    sim.initial.kind = rethrow_with_path("initial.kind",
                                         [&] { return parse_initial_kind(r.word("initial.kind", "cosine")); });
    sim.initial.amplitude = r.number("initial.amplitude", sim.initial.amplitude);
    sim.initial.center = r.number("initial.center", sim.initial.center);
    sim.initial.width = r.number("initial.width", sim.initial.width);
    sim.initial.value = r.number("initial.value", sim.initial.value);

    sim.final_time = r.number("time.final", sim.final_time);
    sim.cfl = r.number("time.cfl", sim.cfl);
    sim.record_interval = r.number("time.record_interval", sim.record_interval);
    cfg.output.snapshots = r.boolean("output.snapshots", false);
    sim.keep_snapshots = cfg.output.snapshots;

    sim.validate();
    // Grid admissibility beyond the simple bounds (quadrature tolerance).
    rethrow_with_path("grids", [&] { return build_velocity_grid(sim.nv, sim.vmax); });
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(buffer.str(), dir.empty() ? "." : dir.string());
}

nlohmann::json config_echo(const RunConfig& cfg) {
    const SimConfig& s = cfg.sim;
    nlohmann::json j;
    j["model"] = {{"collision", to_string(s.collision)}, {"epsilon", s.epsilon}};
    j["grids"] = {{"nx", s.nx}, {"nv", s.nv}, {"vmax", s.vmax}};
    const auto& l = s.boundary.at(Wall::Left);
    const auto& r = s.boundary.at(Wall::Right);
    j["boundary"] = {{"alpha_left", l.alpha}, {"beta_left", l.beta},   {"alpha_right", r.alpha},
                     {"beta_right", r.beta},  {"iota", s.boundary.iota}};
    j["potential"] = {{"kind", to_string(s.potential.kind)}, {"amplitude", s.potential.amplitude}};
    if (s.potential.kind == PotentialKind::Tabulated) j["potential"]["file"] = s.potential.source;
    j["initial"] = {{"kind", to_string(s.initial.kind)}, {"amplitude", s.initial.amplitude},
                    {"center", s.initial.center},         {"width", s.initial.width},
                    {"value", s.initial.value}};
    j["time"] = {{"final", s.final_time}, {"cfl", s.cfl}, {"record_interval", s.record_interval}};
    j["output"] = {{"snapshots", cfg.output.snapshots}};
    return j;
}

std::string render_config(const RunConfig& cfg) {
    const SimConfig& s = cfg.sim;
    const auto& l = s.boundary.at(Wall::Left);
    const auto& r = s.boundary.at(Wall::Right);
    std::ostringstream os;
    os << "[model]\ncollision = " << to_string(s.collision) << "\nepsilon = " << format_number(s.epsilon)
       << "\n\n[grids]\nnx = " << s.nx << "\nnv = " << s.nv << "\nvmax = " << format_number(s.vmax)
       << "\n\n[boundary]\nalpha_left = " << format_number(l.alpha) << "\nbeta_left = " << format_number(l.beta)
       << "\nalpha_right = " << format_number(r.alpha) << "\nbeta_right = " << format_number(r.beta)
       << "\niota = " << format_number(s.boundary.iota) << "\n\n[potential]\nkind = " << to_string(s.potential.kind)
       << "\n";
    if (s.potential.kind == PotentialKind::Tabulated) {
        os << "file = " << s.potential.source << "\n";
    } else {
        os << "amplitude = " << format_number(s.potential.amplitude) << "\n";
    }
    os << "\n[initial]\nkind = " << to_string(s.initial.kind) << "\namplitude = " << format_number(s.initial.amplitude)
       << "\ncenter = " << format_number(s.initial.center) << "\nwidth = " << format_number(s.initial.width)
       << "\nvalue = " << format_number(s.initial.value) << "\n\n[time]\nfinal = " << format_number(s.final_time)
       << "\ncfl = " << format_number(s.cfl) << "\nrecord_interval = " << format_number(s.record_interval)
       << "\n\n[output]\nsnapshots = " << (cfg.output.snapshots ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace kinslab
