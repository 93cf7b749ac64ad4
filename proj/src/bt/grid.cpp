#include "bt/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace bt {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> symmetric_wavenumbers(int n, double length) {
    std::vector<double> k(n);
    const double base = 2.0 * M_PI / length;
    for (int i = 0; i < n; ++i) {
        int idx = (i <= n / 2) ? i : i - n;
        k[i] = base * idx;
    }
    return k;
}

}  // namespace

void Grid::build_wavenumbers() {
    for (int a = 0; a < dim; ++a) {
        if (n[a] < 8 || !power_of_two(n[a]))
            throw std::invalid_argument("Grid: N must be a power of two >= 8");
        if (length[a] <= 0.0)
            throw std::invalid_argument("Grid: period must be positive");
        wavenumbers[a] = symmetric_wavenumbers(n[a], length[a]);
    }
}

Grid Grid::line(int n, double length) {
    Grid g;
    g.dim = 1;
    g.n = {n, 1};
    g.length = {length, 0.0};
    g.build_wavenumbers();
    return g;
}

Grid Grid::plane(int nx, int ny, double lx, double ly) {
    Grid g;
    g.dim = 2;
    g.n = {nx, ny};
    g.length = {lx, ly};
    g.build_wavenumbers();
    return g;
}

ScalarField::ScalarField(const Grid& g, std::vector<double> samples)
    : grid(g), v(std::move(samples)) {
    if (static_cast<int>(v.size()) != g.size())
        throw std::invalid_argument("ScalarField: sample count does not match grid");
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument("ScalarField: non-finite sample");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
}
ScalarField& ScalarField::operator*=(double a) {
    for (double& x : v) x *= a;
    return *this;
}

ScalarField VectorField::component(int axis) const {
    ScalarField f(grid);
    f.v = comp[axis];
    return f;
}

void VectorField::set_component(int axis, const ScalarField& f) {
    comp[axis] = f.v;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    for (int a = 0; a < grid.dim; ++a)
        for (size_t i = 0; i < comp[a].size(); ++i) comp[a][i] += o.comp[a][i];
    return *this;
}
VectorField& VectorField::operator-=(const VectorField& o) {
    for (int a = 0; a < grid.dim; ++a)
        for (size_t i = 0; i < comp[a].size(); ++i) comp[a][i] -= o.comp[a][i];
    return *this;
}
VectorField& VectorField::operator*=(double a) {
    for (int ax = 0; ax < grid.dim; ++ax)
        for (double& x : comp[ax]) x *= a;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }
VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double a, VectorField f) { return f *= a; }

ScalarField pointwise(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid);
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] = a.v[i] * b.v[i];
    return r;
}

VectorField pointwise(const ScalarField& a, const VectorField& b) {
    VectorField r(b.grid);
    for (int ax = 0; ax < b.grid.dim; ++ax)
        for (size_t i = 0; i < r.comp[ax].size(); ++i)
            r.comp[ax][i] = a.v[i] * b.comp[ax][i];
    return r;
}

StripGrid::StripGrid(const Grid& g, int nz_) : grid(g), nz(nz_) {
    if (nz < 8) throw std::invalid_argument("StripGrid: N_z must be >= 8");
}

}  // namespace bt
