#ifndef BT_GRID_HPP
#define BT_GRID_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace bt {

// Periodic collocation grid in the transverse variable, d = 1 or 2.
// Wavenumbers follow the standard symmetric FFT ordering, 2*pi/L times
// the integer index; the Nyquist mode is treated as real (its odd
// derivatives are zeroed).
struct Grid {
    int dim = 1;
    std::array<int, 2> n{1, 1};          // points per dimension
    std::array<double, 2> length{0, 0};  // period per dimension
    std::array<std::vector<double>, 2> wavenumbers;

    static Grid line(int n, double length);
    static Grid plane(int nx, int ny, double lx, double ly);

    int size() const { return n[0] * n[1]; }
    double dx(int axis) const { return length[axis] / n[axis]; }
    double x(int i) const { return i * dx(0); }
    double y(int j) const { return j * dx(1); }
    // row-major: index = i*n[1] + j
    int index(int i, int j = 0) const { return i * n[1] + j; }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && length == o.length;
    }

private:
    void build_wavenumbers();
};

struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), v(g.size(), 0.0) {}
    ScalarField(const Grid& g, std::vector<double> samples);

    double& operator()(int i, int j = 0) { return v[grid.index(i, j)]; }
    double operator()(int i, int j = 0) const { return v[grid.index(i, j)]; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a);
};

struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;  // comp[axis], axis < dim

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g) {
        for (int a = 0; a < g.dim; ++a) comp[a].assign(g.size(), 0.0);
    }

    ScalarField component(int axis) const;
    void set_component(int axis, const ScalarField& f);

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double a);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField f);
VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double a, VectorField f);

// Pointwise products (no dealiasing; see spectral.hpp for the 2/3 rule).
ScalarField pointwise(const ScalarField& a, const ScalarField& b);
VectorField pointwise(const ScalarField& a, const VectorField& b);

// Vertical extension of a transverse grid: nodes z_j uniform on [-1, 0],
// z_0 = -1, z_{nz-1} = 0.
struct StripGrid {
    Grid grid;
    int nz = 0;

    StripGrid() = default;
    StripGrid(const Grid& g, int nz);

    double dz() const { return 1.0 / (nz - 1); }
    double z(int j) const { return -1.0 + j * dz(); }
    int size() const { return grid.size() * nz; }
    // z-major layout: index = j*grid.size() + transverse index
    int index(int j, int ix) const { return j * grid.size() + ix; }
};

}  // namespace bt

#endif
