#ifndef BT_SPECTRAL_HPP
#define BT_SPECTRAL_HPP

#include <complex>
#include <functional>
#include <vector>

#include "bt/grid.hpp"

namespace bt {

// Fourier calculus on periodic grids. All derivatives are exact on the
// trigonometric interpolant; odd derivatives drop the Nyquist mode.

using Spectrum = std::vector<std::complex<double>>;

Spectrum forward_fft(const ScalarField& f);
ScalarField inverse_fft(const Grid& g, const Spectrum& s);

ScalarField derivative(const ScalarField& f, int axis);
VectorField fourier_grad(const ScalarField& f);
ScalarField fourier_div(const VectorField& v);
ScalarField fourier_laplacian(const ScalarField& f);
VectorField fourier_laplacian(const VectorField& v);

// Multiply each mode by symbol(kx, ky) (real multiplier).
ScalarField apply_symbol(const ScalarField& f,
                         const std::function<double(double, double)>& symbol);

// Solves (1 - c*Laplacian) u = f; requires c >= 0 so the symbol 1 + c|k|^2
// never vanishes.
ScalarField helmholtz_inverse(const ScalarField& f, double c);

// 2/3-rule dealiasing: zero modes with |index| > N/3 in any dimension.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);

// Dealiased pointwise products (the default for quadratic nonlinearities).
ScalarField product(const ScalarField& a, const ScalarField& b);
VectorField product(const ScalarField& a, const VectorField& b);
ScalarField dot(const VectorField& a, const VectorField& b);

// Spectral antiderivative along an axis; the mean mode is set to zero.
ScalarField antiderivative(const ScalarField& f, int axis);

double l2_norm(const ScalarField& f);          // sqrt(1/N * sum f^2)
double l2_norm(const VectorField& v);
double max_norm(const ScalarField& f);
double max_norm(const VectorField& v);
double l2_norm_spectral(const ScalarField& f);  // Parseval route
double mean(const ScalarField& f);

// sup-norm of |grad f| over the grid.
double grad_sup_norm(const ScalarField& f);

// W^{1,inf} surrogate: max(|f|_inf, |grad f|_inf).
double w1inf_norm(const ScalarField& f);

}  // namespace bt

#endif
