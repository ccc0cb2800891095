#pragma once

// Test-only reference computations. Nothing here calls into the library's
// Eigen or FFTW paths.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

struct Dof2 {
    double m1, m2, k11, k12, k22, c11, c12, c22;
};

inline Dof2 from_params(double m1, double m2, double km1, double km2, double kc, double c1, double c2, double cc) {
    return {m1, m2, km1 + kc, -kc, km2 + kc, c1 + cc, -cc, c2 + cc};
}

struct Eig2 {
    std::array<double, 2> lambda;              // ascending
    std::array<std::array<double, 2>, 2> vec;  // vec[mode] = {x1, x2}, x2 normalized to 1 when possible
};

// det(K - lambda M) = 0 for diagonal M, by the quadratic formula.
inline Eig2 eig(const Dof2& s) {
    const double a = s.m1 * s.m2;
    const double b = -(s.k11 * s.m2 + s.k22 * s.m1);
    const double c = s.k11 * s.k22 - s.k12 * s.k12;
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    // Numerically stable pair.
    const double q = -0.5 * (b - disc);
    double l1 = c / q;
    double l2 = q / a;
    if (l1 > l2) std::swap(l1, l2);
    Eig2 e{};
    e.lambda = {l1, l2};
    for (int i = 0; i < 2; ++i) {
        // Second row: k12 x1 + (k22 - lambda m2) x2 = 0.
        const double x2 = 1.0;
        const double x1 = s.k12 != 0.0 ? -(s.k22 - e.lambda[i] * s.m2) / s.k12 : (i == 0 ? 1.0 : 0.0);
        e.vec[i] = {x1, x2};
    }
    return e;
}

// Closed-form 2x2 complex inverse of K - w^2 M + i w C.
inline std::array<std::array<std::complex<double>, 2>, 2> receptance(const Dof2& s, double f_hz) {
    const double w = 2.0 * std::numbers::pi * f_hz;
    const std::complex<double> i(0.0, 1.0);
    const auto d11 = s.k11 - w * w * s.m1 + i * w * s.c11;
    const auto d12 = s.k12 + i * w * s.c12;
    const auto d22 = s.k22 - w * w * s.m2 + i * w * s.c22;
    const auto det = d11 * d22 - d12 * d12;
    return {{{d22 / det, -d12 / det}, {-d12 / det, d11 / det}}};
}

// Brute-force O(N^2) Hann-windowed Welch periodogram, one-sided density.
inline std::vector<double> welch_direct(const std::vector<double>& x, double dt, std::size_t L, std::size_t step) {
    const double fs = 1.0 / dt;
    std::vector<double> w(L);
    double wss = 0.0;
    for (std::size_t n = 0; n < L; ++n) {
        w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(n) / double(L)));
        wss += w[n] * w[n];
    }
    const std::size_t bins = L / 2 + 1;
    std::vector<double> p(bins, 0.0);
    std::size_t segs = 0;
    for (std::size_t start = 0; start + L <= x.size(); start += step, ++segs) {
        for (std::size_t k = 0; k < bins; ++k) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t n = 0; n < L; ++n) {
                const double ph = -2.0 * std::numbers::pi * double(k * n) / double(L);
                acc += w[n] * x[start + n] * std::complex<double>(std::cos(ph), std::sin(ph));
            }
            p[k] += std::norm(acc);
        }
    }
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (L % 2 == 0 && k == bins - 1);
        p[k] *= (edge ? 1.0 : 2.0) / (fs * wss * double(segs));
    }
    return p;
}

inline double mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += v[i];
    return s / double(end - begin);
}

}  // namespace oracle
