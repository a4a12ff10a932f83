#pragma once

// Dense complex finite sections of Z^d-indexed matrices (d = 1 or 2) over a
// centered index window [-W, W]^d, with the side-diagonal decomposition, the
// commuting derivations delta_j(A)(k,l) = 2 pi i (k_j - l_j) A(k,l), the
// modulation action chi_t, and band truncation.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace carleman {

using Complex = std::complex<double>;

/// A point or offset in Z^d; the second coordinate is 0 when d = 1.
struct Offset {
    int x = 0;
    int y = 0;

    int sup_norm() const { return std::max(std::abs(x), std::abs(y)); }
    friend Offset operator-(Offset a, Offset b) { return {a.x - b.x, a.y - b.y}; }
    friend bool operator==(Offset a, Offset b) { return a.x == b.x && a.y == b.y; }
};

class FiniteMatrix {
public:
    FiniteMatrix(int d, int window)
        : d_(d), w_(window), side_(2 * window + 1),
          n_(d == 1 ? side_ : side_ * side_) {
        if (d != 1 && d != 2) throw std::domain_error("FiniteMatrix: d must be 1 or 2");
        if (window < 0) throw std::domain_error("FiniteMatrix: window must be >= 0");
        a_.assign(static_cast<std::size_t>(n_) * n_, Complex{});
    }

    static FiniteMatrix identity(int d, int window) {
        FiniteMatrix m(d, window);
        for (int r = 0; r < m.n_; ++r) m(r, r) = 1.0;
        return m;
    }

    int dim() const { return d_; }
    int window() const { return w_; }
    int size() const { return n_; } // number of window points, matrix is size x size

    Complex& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    const Complex& operator()(int r, int c) const {
        return a_[static_cast<std::size_t>(r) * n_ + c];
    }

    const std::vector<Complex>& data() const { return a_; }
    std::vector<Complex>& data() { return a_; }

    /// Window point of a flat index (row-major over the cube).
    Offset point(int flat) const {
        if (d_ == 1) return {flat - w_, 0};
        return {flat / side_ - w_, flat % side_ - w_};
    }

    /// Flat index of a window point; -1 if outside the window.
    int flat(Offset p) const {
        if (std::abs(p.x) > w_ || (d_ == 2 && std::abs(p.y) > w_)) return -1;
        if (d_ == 1) return p.x + w_;
        return (p.x + w_) * side_ + (p.y + w_);
    }

    FiniteMatrix& operator+=(const FiniteMatrix& o) {
        check_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    FiniteMatrix& operator-=(const FiniteMatrix& o) {
        check_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    FiniteMatrix& operator*=(Complex s) {
        for (auto& v : a_) v *= s;
        return *this;
    }
    friend FiniteMatrix operator+(FiniteMatrix a, const FiniteMatrix& b) { return a += b; }
    friend FiniteMatrix operator-(FiniteMatrix a, const FiniteMatrix& b) { return a -= b; }
    friend FiniteMatrix operator*(Complex s, FiniteMatrix a) { return a *= s; }

    friend FiniteMatrix operator*(const FiniteMatrix& a, const FiniteMatrix& b) {
        a.check_shape(b);
        const int n = a.n_;
        FiniteMatrix c(a.d_, a.w_);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                const Complex* brow = &b.a_[static_cast<std::size_t>(k) * n];
                Complex* crow = &c.a_[static_cast<std::size_t>(i) * n];
                for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    double max_abs() const {
        double v = 0;
        for (const auto& z : a_) v = std::max(v, std::abs(z));
        return v;
    }

private:
    void check_shape(const FiniteMatrix& o) const {
        if (d_ != o.d_ || w_ != o.w_)
            throw std::domain_error("FiniteMatrix: shape mismatch");
    }

    int d_, w_, side_, n_;
    std::vector<Complex> a_;
};

/// The k-th side diagonal: entries A(l,m) with l - m = k, all else zero.
/// Offsets outside the window give the zero matrix.
inline FiniteMatrix side_diagonal(const FiniteMatrix& a, Offset k) {
    FiniteMatrix out(a.dim(), a.window());
    const int n = a.size();
    for (int r = 0; r < n; ++r) {
        const Offset pr = a.point(r);
        const int c = a.flat(pr - k);
        if (c >= 0) out(r, c) = a(r, c);
    }
    return out;
}

/// delta_j(A)(k,l) = 2 pi i (k_j - l_j) A(k,l); exact, no discretization.
inline FiniteMatrix delta(const FiniteMatrix& a, int axis) {
    if (axis < 1 || axis > a.dim())
        throw std::domain_error("delta: axis out of range for this dimension");
    FiniteMatrix out(a.dim(), a.window());
    const int n = a.size();
    for (int r = 0; r < n; ++r) {
        const Offset pr = a.point(r);
        for (int c = 0; c < n; ++c) {
            const Offset pc = a.point(c);
            const int diff = (axis == 1) ? pr.x - pc.x : pr.y - pc.y;
            out(r, c) = Complex(0.0, 2.0 * M_PI * diff) * a(r, c);
        }
    }
    return out;
}

/// delta_1^{a1} delta_2^{a2} applied in one pass over the entries.
inline FiniteMatrix delta_power(const FiniteMatrix& a, int a1, int a2 = 0) {
    if (a1 < 0 || a2 < 0) throw std::domain_error("delta_power: negative exponent");
    if (a2 > 0 && a.dim() < 2) throw std::domain_error("delta_power: axis 2 needs d = 2");
    FiniteMatrix out(a.dim(), a.window());
    const int n = a.size();
    for (int r = 0; r < n; ++r) {
        const Offset pr = a.point(r);
        for (int c = 0; c < n; ++c) {
            const Offset pc = a.point(c);
            Complex mult{1.0, 0.0};
            const Complex m1(0.0, 2.0 * M_PI * (pr.x - pc.x));
            const Complex m2(0.0, 2.0 * M_PI * (pr.y - pc.y));
            for (int i = 0; i < a1; ++i) mult *= m1;
            for (int i = 0; i < a2; ++i) mult *= m2;
            out(r, c) = mult * a(r, c);
        }
    }
    return out;
}

/// chi_t(A) = M_t A M_{-t}: entrywise multiplication by e^{2 pi i (k-l).t}.
inline FiniteMatrix modulate(const FiniteMatrix& a, double t1, double t2 = 0.0) {
    FiniteMatrix out(a.dim(), a.window());
    const int n = a.size();
    for (int r = 0; r < n; ++r) {
        const Offset pr = a.point(r);
        for (int c = 0; c < n; ++c) {
            const Offset pc = a.point(c);
            const double phase =
                2.0 * M_PI * ((pr.x - pc.x) * t1 + (pr.y - pc.y) * t2);
            out(r, c) = std::polar(1.0, phase) * a(r, c);
        }
    }
    return out;
}

/// Keep side diagonals with |k|_inf < n, zero the rest (X_0 = {0}).
inline FiniteMatrix band_truncate(const FiniteMatrix& a, int n) {
    if (n < 0) throw std::domain_error("band_truncate: n must be >= 0");
    FiniteMatrix out(a.dim(), a.window());
    const int sz = a.size();
    for (int r = 0; r < sz; ++r) {
        const Offset pr = a.point(r);
        for (int c = 0; c < sz; ++c) {
            const Offset pc = a.point(c);
            if ((pr - pc).sup_norm() < n) out(r, c) = a(r, c);
        }
    }
    return out;
}

/// Largest |k|_inf with a nonzero entry on side diagonal k.
inline int max_offset(const FiniteMatrix& a) {
    int best = 0;
    const int n = a.size();
    for (int r = 0; r < n; ++r) {
        const Offset pr = a.point(r);
        for (int c = 0; c < n; ++c) {
            if (a(r, c) == Complex{}) continue;
            best = std::max(best, (pr - a.point(c)).sup_norm());
        }
    }
    return best;
}

} // namespace carleman
