#ifndef BT_CONFIG_HPP
#define BT_CONFIG_HPP

#include <array>
#include <string>
#include <vector>

#include "bt/coeffs.hpp"
#include "bt/dn.hpp"

namespace bt {

// Analytic field shapes nameable in config files:
//   flat | zero | constant(v) | cosine(amplitude, wavenumber)
//   | bump(center, width, height) | file(path)
struct FieldSpec {
    enum class Kind { Flat, Constant, Cosine, Bump, File };
    Kind kind = Kind::Flat;
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    std::string path;

    ScalarField realize(const Grid& g) const;
    std::string describe() const;
};

FieldSpec parse_field_spec(const std::string& text);

// One validated run description for a single subcommand. Config files are
// flat key=value with `#` comments, keys grouped under a [subcommand]
// section header.
struct RunConfig {
    std::string subcommand;

    // grid and bathymetry (all subcommands)
    int grid_n = 64;
    double grid_length = 0.0;  // 0 -> 2*pi
    std::string regime = "small";
    double h_min = 0.05;
    FieldSpec bathymetry;

    // dn-verify
    std::vector<double> eps_list;
    int nz = 256;
    int expansion_order = 2;
    FieldSpec surface;  // eta
    FieldSpec data;     // Dirichlet data f / initial velocity amplitude

    // symmetry-solve
    std::array<double, 4> guess{0.6318, -0.3416, -2.8209, -3.1157};
    double grad_h_norm = 1.0;

    // simulate / consistency / compare
    std::string model = "b1";
    double eps = 0.1;
    double theta = 1.0, lambda = 1.0, mu = 0.0;
    double lambda1 = -0.3416, lambda2 = -2.8209;
    double horizon = 1.0;
    double dt = 0.0;
    double snap_dt = 0.0;
    std::string target = "b1";
    unsigned seed = 1234;

    Regime regime_enum() const;
    Grid make_grid() const;
};

// Parses the section matching `subcommand`. Throws std::runtime_error with a
// line number on malformed lines or unknown keys, and a key name on
// validation failures.
RunConfig parse_config(const std::string& text, const std::string& subcommand);

// Emits a canonical config text for the subcommand; parse_config is its
// left inverse.
std::string emit_config(const RunConfig& c);

}  // namespace bt

#endif
