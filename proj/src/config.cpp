#include "navslip/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "navslip/error.hpp"

namespace navslip {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& where) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw SolverError(where + ": expected a number, got '" + v + "'");
    return out;
}

int to_int(const std::string& v, const std::string& where) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw SolverError(where + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw SolverError(where + ": expected true or false, got '" + v + "'");
}

using Setter = void (*)(RunSettings&, const std::string&, const std::string&);

const std::map<std::string, std::map<std::string, Setter>>& table() {
    static const std::map<std::string, std::map<std::string, Setter>> t = {
        {"grid",
         {{"nx", [](RunSettings& s, const std::string& v, const std::string& w) { s.nx = to_int(v, w); }},
          {"ny", [](RunSettings& s, const std::string& v, const std::string& w) { s.ny = to_int(v, w); }},
          {"lx", [](RunSettings& s, const std::string& v, const std::string& w) { s.lx = to_double(v, w); }},
          {"ly", [](RunSettings& s, const std::string& v, const std::string& w) { s.ly = to_double(v, w); }}}},
        {"physics",
         {{"viscosity",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.viscosity = to_double(v, w); }},
          {"friction",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.friction = to_double(v, w); }},
          {"density_diffusivity",
           [](RunSettings& s, const std::string& v, const std::string& w) {
               if (v == "auto") s.diffusivity.reset();
               else s.diffusivity = to_double(v, w);
           }},
          {"density_floor",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.density_floor = to_double(v, w); }},
          {"flux_mode",
           [](RunSettings& s, const std::string& v, const std::string&) { s.flux_mode = flux_mode_from_string(v); }},
          {"diffusion",
           [](RunSettings& s, const std::string& v, const std::string& w) {
               if (v == "explicit") s.implicit_diffusion = false;
               else if (v == "implicit") s.implicit_diffusion = true;
               else throw SolverError(w + ": expected explicit or implicit, got '" + v + "'");
           }},
          {"eps_compensation",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.eps_compensation = to_bool(v, w); }},
          {"smoothing",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.smoothing = to_bool(v, w); }}}},
        {"solver",
         {{"dt", [](RunSettings& s, const std::string& v, const std::string& w) { s.dt = to_double(v, w); }},
          {"t_end", [](RunSettings& s, const std::string& v, const std::string& w) { s.t_end = to_double(v, w); }},
          {"poisson_tol",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.poisson_tol = to_double(v, w); }},
          {"viscous_tol",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.viscous_tol = to_double(v, w); }},
          {"max_iterations",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.max_iterations = to_int(v, w); }}}},
        {"output",
         {{"snapshot_every",
           [](RunSettings& s, const std::string& v, const std::string& w) { s.snapshot_every = to_int(v, w); }}}},
    };
    return t;
}

} // namespace

RunSettings parse_settings(const std::string& text, RunSettings base, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw SolverError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!table().count(section)) throw SolverError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SolverError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw SolverError(where + ": key '" + key + "' appears before any section");
        const auto& keys = table().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) throw SolverError(where + ": unknown key '" + key + "' in [" + section + "]");
        if (value.empty()) throw SolverError(where + ": empty value for '" + key + "'");
        it->second(base, value, where + " (" + key + ")");
    }
    return base;
}

RunSettings load_settings(const std::string& path, const RunSettings& base) {
    std::ifstream in(path);
    if (!in) throw SolverError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_settings(ss.str(), base, path);
}

} // namespace navslip
