#include "bt/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bt {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
    std::ostringstream os;
    os << "config error at line " << line << ": " << msg;
    throw std::runtime_error(os.str());
}

[[noreturn]] void fail_key(const std::string& key, const std::string& msg) {
    throw std::runtime_error("config key '" + key + "': " + msg);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        fail_key(key, "not a number: '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    const int i = static_cast<int>(std::lround(x));
    if (i != x) fail_key(key, "not an integer: '" + v + "'");
    return i;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) fail_key(key, "empty list");
    return out;
}

const std::set<std::string> kCommonKeys{"grid_n", "grid_length", "regime",
                                        "h_min", "bathymetry"};

const std::map<std::string, std::set<std::string>> kSubcommandKeys{
    {"dn-verify", {"eps_list", "nz", "expansion_order", "surface", "data"}},
    {"symmetry-solve",
     {"guess_theta", "guess_lambda1", "guess_lambda2", "guess_mu", "grad_h_norm"}},
    {"simulate",
     {"model", "eps", "theta", "lambda", "mu", "lambda1", "lambda2", "horizon",
      "dt", "snap_dt", "surface", "data", "nz"}},
    {"consistency",
     {"target", "eps_list", "theta", "lambda", "mu", "horizon", "dt", "snap_dt",
      "nz", "seed", "surface", "data"}},
    {"compare",
     {"eps_list", "theta", "lambda", "mu", "horizon", "dt", "snap_dt", "nz",
      "surface", "data"}},
};

}  // namespace

ScalarField FieldSpec::realize(const Grid& g) const {
    ScalarField f(g);
    switch (kind) {
        case Kind::Flat:
            break;
        case Kind::Constant:
            std::fill(f.v.begin(), f.v.end(), p0);
            break;
        case Kind::Cosine: {
            const double k = 2.0 * std::numbers::pi / g.length[0] * p1;
            for (int i = 0; i < g.n[0]; ++i)
                for (int j = 0; j < g.n[1]; ++j)
                    f.v[g.index(i, j)] = p0 * std::cos(k * g.x(i));
            break;
        }
        case Kind::Bump: {
            // periodized gaussian bump
            for (int i = 0; i < g.n[0]; ++i) {
                double v = 0.0;
                for (int im = -2; im <= 2; ++im) {
                    const double dx = g.x(i) - p0 + im * g.length[0];
                    v += p2 * std::exp(-dx * dx / (2.0 * p1 * p1));
                }
                for (int j = 0; j < g.n[1]; ++j) f.v[g.index(i, j)] = v;
            }
            break;
        }
        case Kind::File: {
            std::ifstream is(path);
            if (!is) throw std::runtime_error("field sample file not readable: " + path);
            for (double& v : f.v)
                if (!(is >> v))
                    throw std::runtime_error("field sample file too short: " + path);
            break;
        }
    }
    return f;
}

std::string FieldSpec::describe() const {
    std::ostringstream os;
    os.precision(16);
    switch (kind) {
        case Kind::Flat: return "flat";
        case Kind::Constant: os << "constant(" << p0 << ")"; break;
        case Kind::Cosine: os << "cosine(" << p0 << "," << p1 << ")"; break;
        case Kind::Bump: os << "bump(" << p0 << "," << p1 << "," << p2 << ")"; break;
        case Kind::File: os << "file(" << path << ")"; break;
    }
    return os.str();
}

FieldSpec parse_field_spec(const std::string& text) {
    const std::string t = trim(text);
    FieldSpec spec;
    if (t == "flat" || t == "zero") return spec;
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
        throw std::runtime_error("bad field shape '" + t +
                                 "' (expected flat, constant(v), cosine(a,k), "
                                 "bump(c,w,h), or file(path))");
    const std::string name = trim(t.substr(0, open));
    const std::string args = t.substr(open + 1, t.size() - open - 2);
    std::vector<std::string> parts;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));

    auto need = [&](size_t n) {
        if (parts.size() != n)
            throw std::runtime_error("field shape '" + name + "' expects " +
                                     std::to_string(n) + " arguments");
    };
    if (name == "constant") {
        need(1);
        spec.kind = FieldSpec::Kind::Constant;
        spec.p0 = to_double("field", parts[0]);
    } else if (name == "cosine") {
        need(2);
        spec.kind = FieldSpec::Kind::Cosine;
        spec.p0 = to_double("field", parts[0]);
        spec.p1 = to_double("field", parts[1]);
    } else if (name == "bump") {
        need(3);
        spec.kind = FieldSpec::Kind::Bump;
        spec.p0 = to_double("field", parts[0]);
        spec.p1 = to_double("field", parts[1]);
        spec.p2 = to_double("field", parts[2]);
        if (spec.p1 <= 0.0) throw std::runtime_error("bump width must be positive");
    } else if (name == "file") {
        need(1);
        spec.kind = FieldSpec::Kind::File;
        spec.path = parts[0];
    } else {
        throw std::runtime_error("unknown field shape '" + name + "'");
    }
    return spec;
}

Regime RunConfig::regime_enum() const {
    if (regime == "small") return Regime::SmallVariation;
    if (regime == "strong") return Regime::StrongVariation;
    fail_key("regime", "must be 'small' or 'strong', got '" + regime + "'");
}

Grid RunConfig::make_grid() const {
    const double length = grid_length > 0.0 ? grid_length : 2.0 * std::numbers::pi;
    return Grid::line(grid_n, length);
}

RunConfig parse_config(const std::string& text, const std::string& subcommand) {
    const auto sub_it = kSubcommandKeys.find(subcommand);
    if (sub_it == kSubcommandKeys.end())
        throw std::runtime_error("unknown subcommand '" + subcommand + "'");

    RunConfig c;
    c.subcommand = subcommand;

    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    std::string section;
    bool seen_section = false;

    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail_line(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (kSubcommandKeys.find(section) == kSubcommandKeys.end())
                fail_line(lineno, "unknown section '" + section + "'");
            if (section == subcommand) seen_section = true;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_line(lineno, "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_line(lineno, "empty key");
        if (section.empty())
            fail_line(lineno, "key '" + key + "' appears before any [section]");
        if (section != subcommand) continue;  // other subcommands' settings

        if (!kCommonKeys.count(key) && !sub_it->second.count(key))
            fail_line(lineno, "unknown key '" + key + "' for subcommand '" +
                                  subcommand + "'");

        try {
            if (key == "grid_n") c.grid_n = to_int(key, value);
            else if (key == "grid_length") c.grid_length = to_double(key, value);
            else if (key == "regime") c.regime = value;
            else if (key == "h_min") c.h_min = to_double(key, value);
            else if (key == "bathymetry") c.bathymetry = parse_field_spec(value);
            else if (key == "eps_list") c.eps_list = to_list(key, value);
            else if (key == "nz") c.nz = to_int(key, value);
            else if (key == "expansion_order") c.expansion_order = to_int(key, value);
            else if (key == "surface") c.surface = parse_field_spec(value);
            else if (key == "data") c.data = parse_field_spec(value);
            else if (key == "guess_theta") c.guess[0] = to_double(key, value);
            else if (key == "guess_lambda1") c.guess[1] = to_double(key, value);
            else if (key == "guess_lambda2") c.guess[2] = to_double(key, value);
            else if (key == "guess_mu") c.guess[3] = to_double(key, value);
            else if (key == "grad_h_norm") c.grad_h_norm = to_double(key, value);
            else if (key == "model") c.model = value;
            else if (key == "eps") c.eps = to_double(key, value);
            else if (key == "theta") c.theta = to_double(key, value);
            else if (key == "lambda") c.lambda = to_double(key, value);
            else if (key == "mu") c.mu = to_double(key, value);
            else if (key == "lambda1") c.lambda1 = to_double(key, value);
            else if (key == "lambda2") c.lambda2 = to_double(key, value);
            else if (key == "horizon") c.horizon = to_double(key, value);
            else if (key == "dt") c.dt = to_double(key, value);
            else if (key == "snap_dt") c.snap_dt = to_double(key, value);
            else if (key == "target") c.target = value;
            else if (key == "seed") c.seed = static_cast<unsigned>(to_int(key, value));
        } catch (const std::runtime_error& e) {
            fail_line(lineno, e.what());
        }
    }

    if (!seen_section)
        throw std::runtime_error("config has no [" + subcommand + "] section");

    // validation
    if (c.grid_n < 8) fail_key("grid_n", "must be >= 8");
    if ((c.grid_n & (c.grid_n - 1)) != 0) fail_key("grid_n", "must be a power of two");
    if (c.grid_length < 0.0) fail_key("grid_length", "must be positive");
    c.regime_enum();  // validates
    if (c.h_min <= 0.0) fail_key("h_min", "must be positive");
    if (c.nz < 8) fail_key("nz", "must be >= 8");
    if (c.expansion_order != 1 && c.expansion_order != 2)
        fail_key("expansion_order", "must be 1 or 2");
    if (c.eps <= 0.0 || c.eps >= 1.0) fail_key("eps", "must lie in (0,1)");
    for (double e : c.eps_list)
        if (e <= 0.0 || e >= 1.0) fail_key("eps_list", "entries must lie in (0,1)");
    if (c.theta < 0.0 || c.theta > 1.0) fail_key("theta", "must lie in [0,1]");
    if (c.horizon <= 0.0) fail_key("horizon", "must be positive");
    if (c.dt < 0.0) fail_key("dt", "must be >= 0");
    if (c.snap_dt < 0.0) fail_key("snap_dt", "must be >= 0");
    return c;
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream os;
    os.precision(16);
    os << "[" << c.subcommand << "]\n";
    os << "grid_n = " << c.grid_n << "\n";
    if (c.grid_length > 0.0) os << "grid_length = " << c.grid_length << "\n";
    os << "regime = " << c.regime << "\n";
    os << "h_min = " << c.h_min << "\n";
    os << "bathymetry = " << c.bathymetry.describe() << "\n";

    const auto& keys = kSubcommandKeys.at(c.subcommand);
    auto has = [&](const char* k) { return keys.count(k) > 0; };
    if (has("eps_list") && !c.eps_list.empty()) {
        os << "eps_list = ";
        for (size_t i = 0; i < c.eps_list.size(); ++i)
            os << (i ? "," : "") << c.eps_list[i];
        os << "\n";
    }
    if (has("nz")) os << "nz = " << c.nz << "\n";
    if (has("expansion_order")) os << "expansion_order = " << c.expansion_order << "\n";
    if (has("surface")) os << "surface = " << c.surface.describe() << "\n";
    if (has("data")) os << "data = " << c.data.describe() << "\n";
    if (has("guess_theta")) {
        os << "guess_theta = " << c.guess[0] << "\n";
        os << "guess_lambda1 = " << c.guess[1] << "\n";
        os << "guess_lambda2 = " << c.guess[2] << "\n";
        os << "guess_mu = " << c.guess[3] << "\n";
        os << "grad_h_norm = " << c.grad_h_norm << "\n";
    }
    if (has("model")) os << "model = " << c.model << "\n";
    if (has("eps")) os << "eps = " << c.eps << "\n";
    if (has("theta")) os << "theta = " << c.theta << "\n";
    if (has("lambda")) os << "lambda = " << c.lambda << "\n";
    if (has("mu")) os << "mu = " << c.mu << "\n";
    if (has("lambda1")) os << "lambda1 = " << c.lambda1 << "\n";
    if (has("lambda2")) os << "lambda2 = " << c.lambda2 << "\n";
    if (has("horizon")) os << "horizon = " << c.horizon << "\n";
    if (has("dt")) os << "dt = " << c.dt << "\n";
    if (has("snap_dt")) os << "snap_dt = " << c.snap_dt << "\n";
    if (has("target")) os << "target = " << c.target << "\n";
    if (has("seed")) os << "seed = " << c.seed << "\n";
    return os.str();
}

}  // namespace bt
