#include "bt/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bt {

namespace {

void check_theta(double theta) {
    if (theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("theta must lie in [0,1], got " +
                                    std::to_string(theta));
}

// No range check: the Newton iterates may leave [0,1] and must still see a
// smooth residual.
StrongCoeffs strong_unchecked(double theta, double lambda1, double lambda2,
                              double mu) {
    StrongCoeffs s{theta, lambda1, lambda2, mu, {}, {}};
    const double t = theta;
    s.b[0] = lambda1 * (1.0 - t * t);
    s.b[1] = (1.0 - t) * (2.0 * lambda2 - 1.5 * lambda1 * (1.0 + t));
    s.b[2] = 0.5 * lambda1 * (1.0 - t * t);
    s.b[3] = (1.0 - t) * (lambda2 - 0.5 * lambda1 * (1.0 + t));
    s.c[0] = mu * (t * t - 1.0 / 3.0);
    s.c[1] = mu * (1.5 * t * t - 7.0 / 6.0);
    s.c[2] = -0.5 * t * t + 2.0 * t - 7.0 / 6.0;
    s.c[3] = 0.5 * (t - 2.0) * (t - 2.0);
    return s;
}

}  // namespace

SmallCoeffs coeffs_small(double theta, double lambda, double mu) {
    check_theta(theta);
    SmallCoeffs c{theta, lambda, mu, 0, 0, 0, 0};
    const double t2m1 = theta * theta - 1.0;
    const double disp = theta * theta / 2.0 - 1.0 / 6.0;
    c.a1 = -mu * t2m1 / 2.0;
    c.a2 = (mu - 1.0) * t2m1 / 2.0;
    c.a3 = lambda * disp;
    c.a4 = (1.0 - lambda) * disp;
    return c;
}

StrongCoeffs coeffs_strong(double theta, double lambda1, double lambda2, double mu) {
    check_theta(theta);
    return strong_unchecked(theta, lambda1, lambda2, mu);
}

bool is_symmetric_small(const SmallCoeffs& c) {
    return std::abs(c.a1 - c.a3) <= 1e-12 && c.a2 >= 0.0 && c.a4 >= 0.0;
}

std::array<double, 4> symmetry_residual_strong(double theta, double lambda1,
                                               double lambda2, double mu) {
    const StrongCoeffs s = strong_unchecked(theta, lambda1, lambda2, mu);
    return {s.b[0] - s.c[0], s.b[1] + s.c[1], s.b[2] - s.c[2], s.b[3] + s.c[3]};
}

namespace {

double max_abs(const std::array<double, 4>& r) {
    double m = 0.0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
}

// Solve the 4x4 system J dx = r by Gaussian elimination with partial pivoting.
std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> J,
                             std::array<double, 4> r) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(J[row][col]) > std::abs(J[piv][col])) piv = row;
        if (std::abs(J[piv][col]) < 1e-14)
            throw std::runtime_error("solve_symmetric_strong: singular Jacobian");
        std::swap(J[col], J[piv]);
        std::swap(r[col], r[piv]);
        for (int row = col + 1; row < 4; ++row) {
            const double f = J[row][col] / J[col][col];
            for (int k = col; k < 4; ++k) J[row][k] -= f * J[col][k];
            r[row] -= f * r[col];
        }
    }
    std::array<double, 4> x{};
    for (int row = 3; row >= 0; --row) {
        double s = r[row];
        for (int k = row + 1; k < 4; ++k) s -= J[row][k] * x[k];
        x[row] = s / J[row][row];
    }
    return x;
}

}  // namespace

SymmetricRootResult solve_symmetric_strong(const std::array<double, 4>& guess) {
    constexpr double kFdStep = 1e-7;
    constexpr double kTol = 1e-12;
    constexpr int kMaxIter = 50;

    std::array<double, 4> x = guess;
    auto eval = [](const std::array<double, 4>& p) {
        return symmetry_residual_strong(p[0], p[1], p[2], p[3]);
    };

    std::array<double, 4> r = eval(x);
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        std::array<std::array<double, 4>, 4> J{};
        for (int col = 0; col < 4; ++col) {
            std::array<double, 4> xp = x;
            xp[col] += kFdStep;
            const auto rp = eval(xp);
            for (int row = 0; row < 4; ++row)
                J[row][col] = (rp[row] - r[row]) / kFdStep;
        }
        const auto dx = solve4(J, {-r[0], -r[1], -r[2], -r[3]});
        for (int i = 0; i < 4; ++i) x[i] += dx[i];
        r = eval(x);
        if (max_abs(r) <= kTol) {
            SymmetricRootResult out;
            out.coeffs = strong_unchecked(x[0], x[1], x[2], x[3]);
            out.residual = r;
            out.iterations = iter;
            out.theta_in_range = x[0] >= 0.0 && x[0] <= 1.0;
            return out;
        }
    }
    throw std::runtime_error(
        "solve_symmetric_strong: no convergence after 50 iterations, residual " +
        std::to_string(max_abs(r)));
}

EpsilonBounds epsilon_positivity_bounds(double theta, double lambda1, double lambda2,
                                        double mu, double grad_h_norm) {
    if (grad_h_norm < 0.0)
        throw std::invalid_argument("epsilon_positivity_bounds: negative |grad h|");
    EpsilonBounds out;
    const double inf = std::numeric_limits<double>::infinity();
    const double g2 = grad_h_norm * grad_h_norm;
    out.bound2_applies = theta * theta > 1.0 / 3.0;
    if (g2 == 0.0) {
        out.bound1 = inf;
        out.bound2 = inf;
        return out;
    }
    out.bound1 = 2.0 * (1.0 + theta) * (1.0 - lambda1) /
                 ((1.0 - theta) * (1.0 - lambda2) * (1.0 - lambda2) * g2);
    const double c = 1.5 * theta * theta - 7.0 / 6.0;
    out.bound2 = 8.0 * (theta * theta - 1.0 / 3.0) / ((1.0 - mu) * c * c * g2);
    return out;
}

}  // namespace bt
