#pragma once

// Dense complex linear algebra for finite sections: LU with partial
// pivoting, inversion with a 1-norm condition estimate, and a power
// iteration for the largest singular value.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "carleman/matrix.hpp"
#include "carleman/rng.hpp"

namespace carleman {

struct SingularMatrixError : std::runtime_error {
    explicit SingularMatrixError(double cond, const std::string& what)
        : std::runtime_error(what), cond_estimate(cond) {}
    double cond_estimate;
};

/// Max absolute column sum.
inline double norm_one(const FiniteMatrix& a) {
    const int n = a.size();
    double best = 0.0;
    for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += std::abs(a(r, c));
        best = std::max(best, s);
    }
    return best;
}

struct LuDecomposition {
    std::vector<Complex> lu; // row-major, unit-lower L below, U on and above
    std::vector<int> piv;    // row swapped with k at step k
    int n = 0;
};

inline LuDecomposition lu_decompose(std::vector<Complex> a, int n) {
    LuDecomposition f;
    f.piv.resize(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a[static_cast<std::size_t>(k) * n + k]);
        for (int r = k + 1; r < n; ++r) {
            const double v = std::abs(a[static_cast<std::size_t>(r) * n + k]);
            if (v > best) {
                best = v;
                p = r;
            }
        }
        f.piv[k] = p;
        if (p != k)
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(k) * n + c],
                          a[static_cast<std::size_t>(p) * n + c]);
        const Complex pivot = a[static_cast<std::size_t>(k) * n + k];
        if (best == 0.0 || !std::isfinite(best))
            throw SingularMatrixError(std::numeric_limits<double>::infinity(),
                                      "LU: zero pivot at step " + std::to_string(k));
        const Complex inv_pivot = 1.0 / pivot;
        for (int r = k + 1; r < n; ++r) {
            Complex* row = &a[static_cast<std::size_t>(r) * n];
            const Complex m = row[k] * inv_pivot;
            row[k] = m;
            if (m == Complex{}) continue;
            const Complex* rk = &a[static_cast<std::size_t>(k) * n];
            for (int c = k + 1; c < n; ++c) row[c] -= m * rk[c];
        }
    }
    f.lu = std::move(a);
    f.n = n;
    return f;
}

/// Solve A x = b in place (b holds x on return).
inline void lu_solve(const LuDecomposition& f, Complex* b) {
    const int n = f.n;
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (int r = 1; r < n; ++r) {
        Complex s = b[r];
        const Complex* row = &f.lu[static_cast<std::size_t>(r) * n];
        for (int c = 0; c < r; ++c) s -= row[c] * b[c];
        b[r] = s;
    }
    for (int r = n - 1; r >= 0; --r) {
        Complex s = b[r];
        const Complex* row = &f.lu[static_cast<std::size_t>(r) * n];
        for (int c = r + 1; c < n; ++c) s -= row[c] * b[c];
        b[r] = s / row[r];
    }
}

struct Inversion {
    FiniteMatrix inverse;
    double cond_one; // ||A||_1 ||A^-1||_1
};

/// Inverse by LU with partial pivoting, solving one unit column at a time.
inline Inversion invert(const FiniteMatrix& a) {
    const int n = a.size();
    const double a_norm = norm_one(a);
    const auto f = lu_decompose(a.data(), n);
    FiniteMatrix inv(a.dim(), a.window());
    std::vector<Complex> col(n);
    for (int j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), Complex{});
        col[j] = 1.0;
        lu_solve(f, col.data());
        for (int r = 0; r < n; ++r) inv(r, j) = col[r];
    }
    const double inv_norm = norm_one(inv);
    return {std::move(inv), a_norm * inv_norm};
}

/// Largest singular value by power iteration on A^H A with a deterministic
/// start vector. `iters` and `tol` default to a tight setting for small
/// sections; the shift heuristic in the experiments uses (200, 1e-8).
inline double operator_norm_l2(const FiniteMatrix& a, int iters = 20000,
                               double tol = 1e-14) {
    const int n = a.size();
    std::vector<Complex> v(n), av(n), w(n);
    for (int i = 0; i < n; ++i)
        v[i] = Complex(1.0 + rng::to_unit(rng::splitmix64(0xC0FFEE + i)),
                       rng::to_unit(rng::splitmix64(0xFEED + i)));
    double nv = 0.0;
    for (const auto& z : v) nv += std::norm(z);
    nv = std::sqrt(nv);
    for (auto& z : v) z /= nv;

    double sigma = 0.0;
    int stable = 0;
    for (int it = 0; it < iters; ++it) {
        // av = A v
        for (int r = 0; r < n; ++r) {
            Complex s{};
            const Complex* row = &a.data()[static_cast<std::size_t>(r) * n];
            for (int c = 0; c < n; ++c) s += row[c] * v[c];
            av[r] = s;
        }
        double na = 0.0;
        for (const auto& z : av) na += std::norm(z);
        na = std::sqrt(na);
        if (na == 0.0) return 0.0;
        // w = A^H av
        for (int c = 0; c < n; ++c) w[c] = Complex{};
        for (int r = 0; r < n; ++r) {
            const Complex* row = &a.data()[static_cast<std::size_t>(r) * n];
            const Complex s = av[r];
            for (int c = 0; c < n; ++c) w[c] += std::conj(row[c]) * s;
        }
        double nw = 0.0;
        for (const auto& z : w) nw += std::norm(z);
        nw = std::sqrt(nw);
        if (nw == 0.0) return na;
        for (int c = 0; c < n; ++c) v[c] = w[c] / nw;
        const double prev = sigma;
        sigma = na;
        if (std::abs(sigma - prev) <= tol * sigma) {
            if (++stable >= 3) break;
        } else {
            stable = 0;
        }
    }
    return sigma;
}

} // namespace carleman
