#pragma once

// Real polynomials with coefficients stored in descending degree order:
//   c[0] x^n + c[1] x^(n-1) + ... + c[n].

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "optomech/errors.hpp"

namespace optomech::poly {

template <typename T>
[[nodiscard]] T evaluate(std::span<const double> c, T x) {
    T acc{0};
    for (double ci : c) acc = acc * x + ci;
    return acc;
}

[[nodiscard]] inline std::vector<double> derivative(std::span<const double> c) {
    const auto n = static_cast<int>(c.size()) - 1;
    std::vector<double> d;
    for (int i = 0; i < n; ++i) d.push_back(c[i] * static_cast<double>(n - i));
    return d;
}

/// Drops exactly-zero leading coefficients.
[[nodiscard]] inline std::vector<double> trim_leading_zeros(std::span<const double> c) {
    auto first = std::find_if(c.begin(), c.end(), [](double v) { return v != 0.0; });
    return {first, c.end()};
}

/// Number of sign changes in the sequence of non-zero coefficients: an upper
/// bound, of equal parity, on the number of positive real roots.
[[nodiscard]] inline int descartes_bound(std::span<const double> c) {
    int changes = 0;
    int last_sign = 0;
    for (double v : c) {
        if (v == 0.0) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++changes;
        last_sign = s;
    }
    if (last_sign == 0) throw InvalidParameter("descartes_bound: all-zero polynomial");
    return changes;
}

namespace detail {

// Parlett-Reinsch balancing restricted to powers of two so scaling is exact.
inline void balance(Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    constexpr double gamma = 0.95;
    bool changed = true;
    for (int sweep = 0; changed && sweep < 100; ++sweep) {
        changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            double row = 0.0, col = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                row += std::abs(m(i, j));
                col += std::abs(m(j, i));
            }
            if (row == 0.0 || col == 0.0) continue;
            int exponent = 0;
            std::frexp(row / col, &exponent);
            exponent /= 2;
            if (exponent == 0) continue;
            const double scaled_col = std::ldexp(col, exponent);
            const double scaled_row = std::ldexp(row, -exponent);
            if (scaled_col + scaled_row < gamma * (col + row)) {
                changed = true;
                m.row(i) *= std::ldexp(1.0, -exponent);
                m.col(i) *= std::ldexp(1.0, exponent);
            }
        }
    }
}

}  // namespace detail

/// All complex roots, from the eigenvalues of the balanced companion matrix.
/// Leading zero coefficients reduce the degree; a constant yields no roots.
[[nodiscard]] inline std::vector<std::complex<double>> roots(std::span<const double> coeffs) {
    const std::vector<double> c = trim_leading_zeros(coeffs);
    if (c.empty()) throw InvalidParameter("roots: all-zero polynomial");
    const auto degree = static_cast<Eigen::Index>(c.size()) - 1;
    if (degree == 0) return {};
    if (degree == 1) return {std::complex<double>(-c[1] / c[0], 0.0)};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    companion.diagonal(-1).setOnes();
    for (Eigen::Index i = 0; i < degree; ++i) companion(i, degree - 1) = -c[degree - i] / c[0];
    detail::balance(companion);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw Error("roots: companion eigenvalue solve failed");
    const auto& ev = solver.eigenvalues();
    return {ev.begin(), ev.end()};
}

/// Newton polish on a real root; steps are kept only while |p(x)| decreases.
[[nodiscard]] inline double polish(std::span<const double> c, double x, int max_steps = 3) {
    const std::vector<double> dc = derivative(c);
    double fx = std::abs(evaluate(c, x));
    for (int k = 0; k < max_steps && fx > 0.0; ++k) {
        const double slope = evaluate(std::span<const double>(dc), x);
        if (slope == 0.0 || !std::isfinite(slope)) break;
        const double next = x - evaluate(c, x) / slope;
        const double fnext = std::abs(evaluate(c, next));
        if (!(fnext < fx)) break;
        x = next;
        fx = fnext;
    }
    return x;
}

struct RealRoot {
    double value = 0.0;
    bool near_degenerate = false;
};

struct RealRootOptions {
    double tol_imag = 1e-8;        // |Im| < tol_imag (1 + |Re|) counts as real
    double tol_degenerate = 1e-6;  // roots closer than this (relative) are flagged
};

/// Real roots in ascending order, each Newton-polished once. A conjugate pair
/// whose imaginary part is below tolerance contributes two entries, both
/// flagged near-degenerate.
[[nodiscard]] inline std::vector<RealRoot> real_roots(std::span<const double> coeffs,
                                                      const RealRootOptions& opt = {}) {
    const std::vector<double> c = trim_leading_zeros(coeffs);
    std::vector<RealRoot> out;
    for (const auto& z : roots(c)) {
        if (std::abs(z.imag()) < opt.tol_imag * (1.0 + std::abs(z.real())))
            out.push_back({polish(c, z.real()), false});
    }
    std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double gap = out[i].value - out[i - 1].value;
        if (gap <= opt.tol_degenerate * (1.0 + std::abs(out[i].value))) {
            out[i].near_degenerate = true;
            out[i - 1].near_degenerate = true;
        }
    }
    return out;
}

}  // namespace optomech::poly
