#include "bt/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bt {

namespace {

// FFTW plan cache keyed by (n0, n1, sign). Plans are created with
// FFTW_ESTIMATE and executed through the new-array interface, so the
// cached plan never touches the arrays it was created with.
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;
    std::vector<fftw_complex*> scratch;

    fftw_plan get(int n0, int n1, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(n0, n1, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n0) * n1);
        scratch.push_back(buf);
        fftw_plan p;
        if (n1 == 1)
            p = fftw_plan_dft_1d(n0, buf, buf, sign, FFTW_ESTIMATE);
        else
            p = fftw_plan_dft_2d(n0, n1, buf, buf, sign, FFTW_ESTIMATE);
        plans[key] = p;
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run_fft(const Grid& g, std::vector<std::complex<double>>& data, int sign) {
    fftw_plan p = cache().get(g.n[0], g.dim == 2 ? g.n[1] : 1, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

Spectrum forward_fft(const ScalarField& f) {
    Spectrum s(f.v.begin(), f.v.end());
    run_fft(f.grid, s, FFTW_FORWARD);
    const double inv = 1.0 / f.grid.size();
    for (auto& c : s) c *= inv;
    return s;
}

ScalarField inverse_fft(const Grid& g, const Spectrum& s) {
    Spectrum tmp = s;
    run_fft(g, tmp, FFTW_BACKWARD);
    ScalarField f(g);
    for (int i = 0; i < g.size(); ++i) f.v[i] = tmp[i].real();
    return f;
}

namespace {

// Visit every mode with its (kx, ky) pair and integer indices.
template <class Fn>
void for_each_mode(const Grid& g, Spectrum& s, Fn&& fn) {
    const int n0 = g.n[0];
    const int n1 = g.dim == 2 ? g.n[1] : 1;
    for (int i = 0; i < n0; ++i) {
        const double kx = g.wavenumbers[0][i];
        const int ix = (i <= n0 / 2) ? i : i - n0;
        for (int j = 0; j < n1; ++j) {
            const double ky = g.dim == 2 ? g.wavenumbers[1][j] : 0.0;
            const int iy = g.dim == 2 ? ((j <= n1 / 2) ? j : j - n1) : 0;
            fn(s[i * n1 + j], kx, ky, ix, iy);
        }
    }
}

bool is_nyquist(int idx, int n) { return idx == -n / 2 || idx == n / 2; }

}  // namespace

ScalarField derivative(const ScalarField& f, int axis) {
    if (axis >= f.grid.dim) throw std::invalid_argument("derivative: bad axis");
    Spectrum s = forward_fft(f);
    const Grid& g = f.grid;
    for_each_mode(g, s, [&](std::complex<double>& c, double kx, double ky, int ix, int iy) {
        const double k = axis == 0 ? kx : ky;
        const int idx = axis == 0 ? ix : iy;
        if (is_nyquist(idx, g.n[axis]))
            c = 0.0;  // Nyquist treated as real: odd derivative vanishes
        else
            c *= std::complex<double>(0.0, k);
    });
    return inverse_fft(g, s);
}

VectorField fourier_grad(const ScalarField& f) {
    VectorField v(f.grid);
    for (int a = 0; a < f.grid.dim; ++a) v.set_component(a, derivative(f, a));
    return v;
}

ScalarField fourier_div(const VectorField& v) {
    ScalarField d = derivative(v.component(0), 0);
    for (int a = 1; a < v.grid.dim; ++a) d += derivative(v.component(a), a);
    return d;
}

ScalarField fourier_laplacian(const ScalarField& f) {
    Spectrum s = forward_fft(f);
    for_each_mode(f.grid, s, [&](std::complex<double>& c, double kx, double ky, int, int) {
        c *= -(kx * kx + ky * ky);
    });
    return inverse_fft(f.grid, s);
}

VectorField fourier_laplacian(const VectorField& v) {
    VectorField r(v.grid);
    for (int a = 0; a < v.grid.dim; ++a)
        r.set_component(a, fourier_laplacian(v.component(a)));
    return r;
}

ScalarField apply_symbol(const ScalarField& f,
                         const std::function<double(double, double)>& symbol) {
    Spectrum s = forward_fft(f);
    for_each_mode(f.grid, s, [&](std::complex<double>& c, double kx, double ky, int, int) {
        c *= symbol(kx, ky);
    });
    return inverse_fft(f.grid, s);
}

ScalarField helmholtz_inverse(const ScalarField& f, double c) {
    if (c < 0.0)
        throw std::invalid_argument("helmholtz_inverse: c must be >= 0");
    if (c == 0.0) return f;
    return apply_symbol(f, [c](double kx, double ky) {
        return 1.0 / (1.0 + c * (kx * kx + ky * ky));
    });
}

ScalarField dealias(const ScalarField& f) {
    Spectrum s = forward_fft(f);
    const Grid& g = f.grid;
    for_each_mode(g, s, [&](std::complex<double>& c, double, double, int ix, int iy) {
        if (std::abs(ix) > g.n[0] / 3) c = 0.0;
        if (g.dim == 2 && std::abs(iy) > g.n[1] / 3) c = 0.0;
    });
    return inverse_fft(g, s);
}

VectorField dealias(const VectorField& v) {
    VectorField r(v.grid);
    for (int a = 0; a < v.grid.dim; ++a) r.set_component(a, dealias(v.component(a)));
    return r;
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
    return dealias(pointwise(a, b));
}

VectorField product(const ScalarField& a, const VectorField& b) {
    return dealias(pointwise(a, b));
}

ScalarField dot(const VectorField& a, const VectorField& b) {
    ScalarField r(a.grid);
    for (int ax = 0; ax < a.grid.dim; ++ax)
        for (size_t i = 0; i < r.v.size(); ++i)
            r.v[i] += a.comp[ax][i] * b.comp[ax][i];
    return dealias(r);
}

ScalarField antiderivative(const ScalarField& f, int axis) {
    Spectrum s = forward_fft(f);
    const Grid& g = f.grid;
    for_each_mode(g, s, [&](std::complex<double>& c, double kx, double ky, int ix, int iy) {
        const double k = axis == 0 ? kx : ky;
        const int idx = axis == 0 ? ix : iy;
        if (idx == 0 || is_nyquist(idx, g.n[axis]))
            c = 0.0;
        else
            c /= std::complex<double>(0.0, k);
    });
    return inverse_fft(g, s);
}

double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double x : f.v) s += x * x;
    return std::sqrt(s / f.grid.size());
}

double l2_norm(const VectorField& v) {
    double s = 0.0;
    for (int a = 0; a < v.grid.dim; ++a)
        for (double x : v.comp[a]) s += x * x;
    return std::sqrt(s / v.grid.size());
}

double max_norm(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double max_norm(const VectorField& v) {
    double m = 0.0;
    for (int a = 0; a < v.grid.dim; ++a)
        for (double x : v.comp[a]) m = std::max(m, std::abs(x));
    return m;
}

double l2_norm_spectral(const ScalarField& f) {
    Spectrum s = forward_fft(f);
    double sum = 0.0;
    for (const auto& c : s) sum += std::norm(c);
    return std::sqrt(sum);
}

double mean(const ScalarField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s / f.grid.size();
}

double grad_sup_norm(const ScalarField& f) {
    VectorField g = fourier_grad(f);
    double m = 0.0;
    for (int i = 0; i < f.grid.size(); ++i) {
        double mag2 = 0.0;
        for (int a = 0; a < f.grid.dim; ++a) mag2 += g.comp[a][i] * g.comp[a][i];
        m = std::max(m, std::sqrt(mag2));
    }
    return m;
}

double w1inf_norm(const ScalarField& f) {
    return std::max(max_norm(f), grad_sup_norm(f));
}

}  // namespace bt
