#pragma once

// Calculus of defining sequences M = (M_k), M_0 = 1: generators, the
// associated function T_M(u) = sup_k u^k / M_k, log-convex regularization
// (lower Newton polygon), and the associated weight v_M(l) = sum_k (2*pi*l)^k / M_k.
//
// All sequence arithmetic is carried out in the log domain: (k!)^2 overflows
// binary64 near k = 85, while log M_k stays small for prefixes of thousands
// of terms. Every quantity computed here has finite-prefix semantics; where
// a value would depend on the tail of the sequence a saturation flag records
// that the prefix was too short.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace carleman {

/// Positive sequence M with M_0 = 1, stored as log M_k for k = 0..k_max.
struct DefiningSequence {
    std::vector<double> log_m; // log_m[k] = log M_k, log_m[0] == 0
    std::string label;

    std::size_t k_max() const { return log_m.size() - 1; }

    double log_at(std::size_t k) const { return log_m.at(k); }
};

namespace detail {

inline void validate_sequence(const DefiningSequence& m) {
    if (m.log_m.size() < 2)
        throw std::domain_error("defining sequence needs k_max >= 1");
    if (m.log_m[0] != 0.0)
        throw std::domain_error("defining sequence must have M_0 = 1 (log_m[0] = 0)");
    for (double v : m.log_m)
        if (!std::isfinite(v))
            throw std::domain_error("defining sequence entries must be finite");
}

} // namespace detail

/// M_k = 1 for all k (the bandlimited-class sequence).
inline DefiningSequence make_constant(std::size_t k_max) {
    if (k_max < 1) throw std::domain_error("k_max must be >= 1");
    DefiningSequence m;
    m.log_m.assign(k_max + 1, 0.0);
    m.label = "constant";
    return m;
}

/// M_k = (k!)^r, the Gevrey-type scale (r = 1 is the analytic class).
inline DefiningSequence make_factorial_power(double r, std::size_t k_max) {
    if (!(r > 0.0)) throw std::domain_error("factorial_power requires r > 0");
    if (k_max < 1) throw std::domain_error("k_max must be >= 1");
    DefiningSequence m;
    m.log_m.resize(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k)
        m.log_m[k] = r * std::lgamma(static_cast<double>(k) + 1.0);
    m.log_m[0] = 0.0;
    m.label = "gevrey(r=" + std::to_string(r) + ")";
    return m;
}

/// M_k = k^{rk} with M_0 = 1 (and M_1 = 1).
inline DefiningSequence make_power(double r, std::size_t k_max) {
    if (!(r > 0.0)) throw std::domain_error("power requires r > 0");
    if (k_max < 1) throw std::domain_error("k_max must be >= 1");
    DefiningSequence m;
    m.log_m.resize(k_max + 1);
    m.log_m[0] = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k)
        m.log_m[k] = r * static_cast<double>(k) * std::log(static_cast<double>(k));
    m.label = "power(r=" + std::to_string(r) + ")";
    return m;
}

/// Explicit prefix; values[0] must be 1 and all values positive.
inline DefiningSequence make_explicit(const std::vector<double>& values,
                                      std::string label = "explicit") {
    if (values.size() < 2)
        throw std::domain_error("explicit sequence needs at least M_0, M_1");
    if (values[0] != 1.0)
        throw std::domain_error("explicit sequence must start with M_0 = 1");
    DefiningSequence m;
    m.log_m.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] > 0.0))
            throw std::domain_error("explicit sequence entries must be positive");
        m.log_m[k] = std::log(values[k]);
    }
    m.log_m[0] = 0.0;
    m.label = std::move(label);
    return m;
}

/// Explicit prefix given directly in the log domain.
inline DefiningSequence make_from_logs(std::vector<double> log_values,
                                       std::string label = "explicit-log") {
    DefiningSequence m;
    m.log_m = std::move(log_values);
    m.label = std::move(label);
    detail::validate_sequence(m);
    return m;
}

/// Geometric grid of n points from lo to hi (inclusive), lo, hi > 0.
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::domain_error("geometric_grid requires 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + step * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// Default u-grid for associated-function tables: 1e-2 .. 1e4, 400 points.
inline std::vector<double> default_u_grid() { return geometric_grid(1e-2, 1e4, 400); }

struct LogAssocValue {
    double log_t;       // log T_M(u) on the prefix
    std::size_t argmax; // smallest maximizing k
};

/// log T_M(u) = max_{k <= k_max} (k log u - log M_k); ties break to the
/// smallest k (only the saturation flag depends on the tie rule).
inline LogAssocValue log_associated_value(const DefiningSequence& m, double u) {
    if (!(u > 0.0)) throw std::domain_error("associated function needs u > 0");
    const double lu = std::log(u);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k <= m.k_max(); ++k) {
        const double v = static_cast<double>(k) * lu - m.log_m[k];
        if (v > best) {
            best = v;
            arg = k;
        }
    }
    return {best, arg};
}

/// Tabulated log T_M over a grid, with per-point saturation flags
/// (saturated = the maximizing index hit the end of the prefix, so the
/// value is only a lower bound for the full sequence).
struct AssociatedFunction {
    std::vector<double> u_grid;
    std::vector<double> log_t;
    std::vector<bool> saturated;
};

inline AssociatedFunction associated_function(const DefiningSequence& m,
                                              const std::vector<double>& u_grid) {
    if (u_grid.empty()) throw std::domain_error("associated_function: empty grid");
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        if (!(u_grid[i] > 0.0))
            throw std::domain_error("associated_function: grid must be positive");
        if (i > 0 && !(u_grid[i] > u_grid[i - 1]))
            throw std::domain_error("associated_function: grid must be strictly increasing");
    }
    AssociatedFunction f;
    f.u_grid = u_grid;
    f.log_t.resize(u_grid.size());
    f.saturated.resize(u_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const auto v = log_associated_value(m, u_grid[i]);
        f.log_t[i] = v.log_t;
        f.saturated[i] = (v.argmax == m.k_max());
    }
    return f;
}

namespace detail {

// Lower convex hull of the points (k, y_k), k = 0..n-1, by monotone chain.
// Collinearity is decided with a small relative tolerance so that running
// the hull on already-regularized data reproduces the vertex set exactly
// (interpolated points land on chords only up to round-off).
inline std::vector<std::size_t> lower_hull_vertices(const std::vector<double>& y) {
    const std::size_t n = y.size();
    double scale = 1.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    const double tol = 16.0 * static_cast<double>(n) * scale *
                       std::numeric_limits<double>::epsilon();
    std::vector<std::size_t> hull;
    for (std::size_t k = 0; k < n; ++k) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull[hull.size() - 1];
            // cross of (a->b) x (a->k); middle point b is kept only if it
            // lies strictly below the chord a--k
            const double cross =
                static_cast<double>(b - a) * (y[k] - y[a]) -
                static_cast<double>(k - a) * (y[b] - y[a]);
            if (cross <= tol)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    return hull;
}

} // namespace detail

/// Indices k at which the log-convex regularization touches M.
inline std::vector<std::size_t> hull_vertices(const DefiningSequence& m) {
    detail::validate_sequence(m);
    return detail::lower_hull_vertices(m.log_m);
}

/// Largest log-convex minorant M^c of M on the same prefix: the lower
/// convex hull of (k, log M_k). Vertex values are copied verbatim and
/// interior values interpolated, so regularizing twice is bit-identical.
inline DefiningSequence log_convex_regularize(const DefiningSequence& m) {
    detail::validate_sequence(m);
    const auto hull = detail::lower_hull_vertices(m.log_m);
    DefiningSequence out;
    out.log_m.resize(m.log_m.size());
    out.label = m.label + "^c";
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const std::size_t k1 = hull[h];
        const std::size_t k2 = hull[h + 1];
        const double y1 = m.log_m[k1];
        const double y2 = m.log_m[k2];
        out.log_m[k1] = y1;
        out.log_m[k2] = y2;
        const double span = static_cast<double>(k2 - k1);
        for (std::size_t k = k1 + 1; k < k2; ++k)
            out.log_m[k] = y1 + (y2 - y1) * (static_cast<double>(k - k1) / span);
    }
    return out;
}

/// Result of the dual-formula regularization M^c_k = sup_u u^k / T_M(u).
struct DualRegularization {
    DefiningSequence seq;          // the dual estimate of M^c
    std::vector<bool> saturated;   // grid argmax on the boundary for index k
    bool conclusive = true;        // false if the grid disagreed with the hull
    double max_log_gap = 0.0;      // largest |dual - hull| over unsaturated k
};

/// Independent route to M^c: a grid maximum of k log u - log T_M(u),
/// refined by ternary search between neighboring grid points (the
/// objective is concave in log u). Compares itself against the hull and
/// flags the result inconclusive rather than silently accepting a grid
/// that was too coarse.
inline DualRegularization regularize_via_dual(const DefiningSequence& m,
                                              const std::vector<double>& u_grid,
                                              double tolerance = 1e-6) {
    detail::validate_sequence(m);
    if (u_grid.size() < 8)
        throw std::domain_error("regularize_via_dual: grid too small");
    std::vector<double> s_grid(u_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        if (!(u_grid[i] > 0.0))
            throw std::domain_error("regularize_via_dual: grid must be positive");
        s_grid[i] = std::log(u_grid[i]);
    }

    const auto log_t_at = [&](double s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= m.k_max(); ++k)
            best = std::max(best, static_cast<double>(k) * s - m.log_m[k]);
        return best;
    };

    DualRegularization out;
    out.seq.log_m.resize(m.log_m.size());
    out.seq.label = m.label + "^c(dual)";
    out.saturated.assign(m.log_m.size(), false);

    for (std::size_t k = 0; k <= m.k_max(); ++k) {
        const double kk = static_cast<double>(k);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
            const double v = kk * s_grid[i] - log_t_at(s_grid[i]);
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        // local refinement around the best grid point
        double lo = s_grid[arg == 0 ? 0 : arg - 1];
        double hi = s_grid[std::min(arg + 1, s_grid.size() - 1)];
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            const double s1 = lo + (hi - lo) / 3.0;
            const double s2 = hi - (hi - lo) / 3.0;
            if (kk * s1 - log_t_at(s1) < kk * s2 - log_t_at(s2))
                lo = s1;
            else
                hi = s2;
        }
        const double s_star = 0.5 * (lo + hi);
        best = std::max(best, kk * s_star - log_t_at(s_star));
        out.seq.log_m[k] = (k == 0) ? 0.0 : best; // u^0 / T_M(u) -> 1 as u -> 0
        out.saturated[k] = (arg + 1 >= s_grid.size());
    }

    const auto hull = log_convex_regularize(m);
    for (std::size_t k = 0; k <= m.k_max(); ++k) {
        if (out.saturated[k]) continue;
        out.max_log_gap = std::max(out.max_log_gap,
                                   std::abs(out.seq.log_m[k] - hull.log_m[k]));
    }
    out.conclusive = (out.max_log_gap <= tolerance);
    return out;
}

/// Thrown when a weight or series value would need sequence entries past
/// the stored prefix.
struct SaturationError : std::runtime_error {
    explicit SaturationError(const std::string& what) : std::runtime_error(what) {}
};

/// log of the partial sum sum_{k=0..k_cut} (2 pi l)^k / M_k, computed by
/// scaling with the largest term. No convergence check; pairs with the
/// Dales-Davie norm truncated at the same k_cut.
inline double log_weight_partial_sum(const DefiningSequence& m, double l,
                                     std::size_t k_cut) {
    if (!(l >= 0.0)) throw std::domain_error("associated weight needs l >= 0");
    if (k_cut > m.k_max()) throw std::domain_error("k_cut exceeds the stored prefix");
    if (l == 0.0) return 0.0; // only the k = 0 term survives, M_0 = 1
    const double lx = std::log(2.0 * M_PI * l);
    std::vector<double> t(k_cut + 1);
    double t_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= k_cut; ++k) {
        t[k] = static_cast<double>(k) * lx - m.log_m[k];
        t_max = std::max(t_max, t[k]);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k <= k_cut; ++k) {
        const double d = t[k] - t_max;
        if (d > -40.0) acc += std::exp(d); // dropped terms are < 5e-18 relative
    }
    return t_max + std::log(acc);
}

/// log v_M(l) for the associated weight v_M(l) = sum_k (2 pi l)^k / M_k.
/// Throws SaturationError when the series has not decayed 40 log-units
/// below its peak by the end of the prefix ("prefix too short for this l").
inline double log_associated_weight(const DefiningSequence& m, double l) {
    if (!(l >= 0.0)) throw std::domain_error("associated weight needs l >= 0");
    if (l == 0.0) return 0.0;
    const double lx = std::log(2.0 * M_PI * l);
    double t_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= m.k_max(); ++k)
        t_max = std::max(t_max, static_cast<double>(k) * lx - m.log_m[k]);
    const double t_last = static_cast<double>(m.k_max()) * lx - m.log_m[m.k_max()];
    if (t_last > t_max - 40.0)
        throw SaturationError("associated weight: prefix too short for this l (k_max=" +
                              std::to_string(m.k_max()) + ", l=" + std::to_string(l) + ")");
    return log_weight_partial_sum(m, l, m.k_max());
}

/// v_M(l) in the linear domain (+inf when not representable in binary64).
inline double associated_weight(const DefiningSequence& m, double l) {
    const double lv = log_associated_weight(m, l);
    if (lv > std::log(std::numeric_limits<double>::max()))
        return std::numeric_limits<double>::infinity();
    return std::exp(lv);
}

} // namespace carleman
