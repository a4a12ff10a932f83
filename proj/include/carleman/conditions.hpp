#pragma once

// Regularity-condition checkers for defining sequences. Every verdict has
// finite-prefix semantics: "holds_on_prefix" and "fails" report a trend or a
// concrete witness on the stored prefix, never a proof about the tail, and
// an explicit "inconclusive" state exists for genuinely undecided data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleman/sequence.hpp"

namespace carleman {

using Json = nlohmann::ordered_json;

enum class Condition { grs, m2prime, almost_increasing, equivalence };
enum class Verdict { holds_on_prefix, fails, inconclusive };

inline const char* to_string(Condition c) {
    switch (c) {
        case Condition::grs: return "GRS";
        case Condition::m2prime: return "M2Prime";
        case Condition::almost_increasing: return "AlmostIncreasing";
        case Condition::equivalence: return "Equivalence";
    }
    return "?";
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds_on_prefix: return "holds_on_prefix";
        case Verdict::fails: return "fails";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct ConditionReport {
    Condition condition;
    Verdict verdict;
    Json witness; // constants, failing indices, fitted slopes
};

namespace detail {

inline void require_prefix(const DefiningSequence& m, std::size_t k_min,
                           const char* who) {
    validate_sequence(m);
    if (m.k_max() < k_min)
        throw std::domain_error(std::string(who) + ": needs k_max >= " +
                                std::to_string(k_min));
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return 0.0;
    return (n * sxy - sx * sy) / den;
}

} // namespace detail

/// GRS trend test: p_k = (1/k)(log M_k - log k!) must drift to +infinity
/// for (M_k/k!)^{1/k} -> infinity. The verdict is a trend on the prefix.
inline ConditionReport check_grs(const DefiningSequence& m) {
    detail::require_prefix(m, 8, "check_grs");
    const std::size_t K = m.k_max();
    std::vector<double> ks, ps;
    for (std::size_t k = 1; k <= K; ++k) {
        ks.push_back(static_cast<double>(k));
        ps.push_back((m.log_m[k] - std::lgamma(static_cast<double>(k) + 1.0)) /
                     static_cast<double>(k));
    }
    const std::size_t mid = K / 2;
    std::vector<double> tail_k(ks.begin() + (mid - 1), ks.end());
    std::vector<double> tail_p(ps.begin() + (mid - 1), ps.end());
    const double slope = detail::fit_slope(tail_k, tail_p);
    const double delta = ps[K - 1] - ps[mid - 1];

    constexpr double slope_tol = 1e-3;
    ConditionReport rep;
    rep.condition = Condition::grs;
    rep.witness = Json{{"p_first", ps.front()},
                       {"p_mid", ps[mid - 1]},
                       {"p_last", ps.back()},
                       {"tail_slope", slope},
                       {"tail_delta", delta}};
    if (slope > slope_tol && delta > 0.0)
        rep.verdict = Verdict::holds_on_prefix;
    else if (slope < slope_tol && delta <= 1e-12)
        rep.verdict = Verdict::fails;
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

/// Default h candidates for the (M2') search.
inline std::vector<double> default_h_grid() { return {1.5, 2.0, std::exp(1.0), 4.0, 8.0}; }

/// (M2') in the form T_M(h r) >= C r T_M(r): grid search for an h whose
/// constant C = min_r T_M(hr)/(r T_M(r)) stays bounded away from zero.
/// Only radii where both associated-function values are unsaturated count
/// toward "holds"; the decay trend of the ratio decides "fails".
inline ConditionReport check_m2prime(const DefiningSequence& m,
                                     const std::vector<double>& h_grid,
                                     const std::vector<double>& r_grid) {
    detail::require_prefix(m, 8, "check_m2prime");
    if (h_grid.empty() || r_grid.empty())
        throw std::domain_error("check_m2prime: grids must be non-empty");
    for (double h : h_grid)
        if (!(h > 1.0)) throw std::domain_error("check_m2prime: h must be > 1");

    struct PerH {
        double h = 0;
        double min_log_c = std::numeric_limits<double>::infinity();
        double slope = 0;
        std::size_t valid = 0;
    };
    std::vector<PerH> results;

    for (double h : h_grid) {
        PerH ph;
        ph.h = h;
        std::vector<double> xs, ys; // log r vs log ratio, unsaturated points
        for (double r : r_grid) {
            if (!(r > 0.0)) throw std::domain_error("check_m2prime: r must be > 0");
            const auto t1 = log_associated_value(m, r);
            const auto t2 = log_associated_value(m, h * r);
            if (t1.argmax == m.k_max() || t2.argmax == m.k_max()) continue;
            const double log_ratio = t2.log_t - t1.log_t - std::log(r);
            ph.min_log_c = std::min(ph.min_log_c, log_ratio);
            xs.push_back(std::log(r));
            ys.push_back(log_ratio);
        }
        ph.valid = xs.size();
        if (ph.valid >= 5) {
            const std::size_t half = ph.valid / 2;
            std::vector<double> tx(xs.begin() + half, xs.end());
            std::vector<double> ty(ys.begin() + half, ys.end());
            ph.slope = detail::fit_slope(tx, ty);
        }
        results.push_back(ph);
    }

    ConditionReport rep;
    rep.condition = Condition::m2prime;
    const PerH* best = nullptr;
    bool all_collapse = true;
    bool any_usable = false;
    for (const auto& ph : results) {
        if (ph.valid < 5) continue;
        any_usable = true;
        if (ph.slope > -0.5) all_collapse = false;
        const bool ok = ph.min_log_c >= std::log(1e-8) && ph.slope >= -0.1;
        if (ok && (!best || ph.min_log_c > best->min_log_c)) best = &ph;
    }
    if (best) {
        rep.verdict = Verdict::holds_on_prefix;
        rep.witness = Json{{"h", best->h},
                           {"C", std::exp(best->min_log_c)},
                           {"tail_slope", best->slope},
                           {"usable_radii", best->valid}};
    } else if (any_usable && all_collapse) {
        rep.verdict = Verdict::fails;
        Json per_h = Json::array();
        for (const auto& ph : results)
            per_h.push_back(Json{{"h", ph.h},
                                 {"tail_slope", ph.slope},
                                 {"usable_radii", ph.valid}});
        rep.witness = Json{{"ratio_collapses", true}, {"per_h", per_h}};
    } else {
        rep.verdict = Verdict::inconclusive;
        rep.witness = Json{{"usable", any_usable}};
    }
    return rep;
}

inline ConditionReport check_m2prime(const DefiningSequence& m) {
    return check_m2prime(m, default_h_grid(), geometric_grid(1e-2, 1e4, 61));
}

/// Almost-increasing test for (M_k/k!)^{1/k}, via two routes:
/// (a) the smallest C' with M_k^{1/k}/k <= C' M_l^{1/l}/l over k < l, and
/// (b) brute force over all compositions j_1+...+j_l = j <= j_max of the
///     smallest C with prod M_{j_i}/j_i! <= C^j M_j/j!.
/// Holds when both constants are stable over the prefix; an oscillating
/// per-j constant in (b) is reported as failure with the (k, l) witness.
inline ConditionReport check_almost_increasing(const DefiningSequence& m,
                                               std::size_t j_max) {
    detail::require_prefix(m, 8, "check_almost_increasing");
    if (j_max > 14)
        throw std::length_error("check_almost_increasing: j_max > 14 (composition "
                                "enumeration is exponential)");
    if (j_max < 4 || j_max > m.k_max())
        throw std::domain_error("check_almost_increasing: need 4 <= j_max <= k_max");

    const std::size_t K = m.k_max();
    // (a) pairwise constant on roots, log domain
    std::vector<double> a(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k)
        a[k] = m.log_m[k] / static_cast<double>(k) - std::log(static_cast<double>(k));
    double best_full = -std::numeric_limits<double>::infinity();
    double best_half = -std::numeric_limits<double>::infinity();
    std::size_t wk = 1, wl = 2;
    for (std::size_t k = 1; k <= K; ++k) {
        for (std::size_t l = k + 1; l <= K; ++l) {
            const double gap = a[k] - a[l];
            if (gap > best_full) {
                best_full = gap;
                wk = k;
                wl = l;
            }
            if (l <= K / 2 && gap > best_half) best_half = gap;
        }
    }

    // (b) composition brute force on P_k = M_k / k!
    std::vector<double> p(K + 1);
    for (std::size_t k = 0; k <= K; ++k)
        p[k] = m.log_m[k] - std::lgamma(static_cast<double>(k) + 1.0);
    std::vector<double> cb(j_max + 1, 0.0); // per-j constant, log domain, per unit j
    std::vector<std::vector<std::size_t>> cb_arg(j_max + 1);
    std::vector<std::size_t> parts;
    for (std::size_t j = 2; j <= j_max; ++j) {
        double best = 0.0; // the trivial composition (j) gives 0
        std::vector<std::size_t> best_parts{j};
        parts.clear();
        // enumerate compositions of j recursively
        auto rec = [&](auto&& self, std::size_t remaining, double acc) -> void {
            if (remaining == 0) {
                const double v = (acc - p[j]) / static_cast<double>(j);
                if (v > best) {
                    best = v;
                    best_parts = parts;
                }
                return;
            }
            for (std::size_t part = 1; part <= remaining; ++part) {
                parts.push_back(part);
                self(self, remaining - part, acc + p[part]);
                parts.pop_back();
            }
        };
        rec(rec, j, 0.0);
        cb[j] = best;
        cb_arg[j] = best_parts;
    }

    const std::size_t tail_lo = std::max<std::size_t>(2, j_max / 2);
    double tail_min = std::numeric_limits<double>::infinity();
    double tail_max = -std::numeric_limits<double>::infinity();
    std::size_t j_at_max = tail_lo;
    for (std::size_t j = tail_lo; j <= j_max; ++j) {
        tail_min = std::min(tail_min, cb[j]);
        if (cb[j] > tail_max) {
            tail_max = cb[j];
            j_at_max = j;
        }
    }
    const double variation = tail_max - tail_min;
    const double growth = best_full - best_half;

    ConditionReport rep;
    rep.condition = Condition::almost_increasing;
    Json parts_json = Json::array();
    for (auto v : cb_arg[j_at_max]) parts_json.push_back(v);
    rep.witness = Json{{"roots_constant", std::exp(best_full)},
                       {"roots_pair", Json::array({wk, wl})},
                       {"composition_constant", std::exp(tail_max)},
                       {"composition_j", j_at_max},
                       {"composition_parts", parts_json},
                       {"tail_variation", std::exp(variation)},
                       {"roots_constant_growth", std::exp(growth)}};
    if (variation <= std::log(4.0) && growth <= std::log(1.5))
        rep.verdict = Verdict::holds_on_prefix;
    else if (variation > std::log(4.0) || growth >= std::log(2.0) - 1e-9)
        rep.verdict = Verdict::fails; // doubling the prefix doubled the constant
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

/// Equivalence criterion (M^c_k)^{1/k} vs (N^c_k)^{1/k}: the gap
/// q_k = (1/k)(log M^c_k - log N^c_k) must stay bounded along the prefix.
/// The last decile is boundary-affected by the finite hull and excluded.
inline ConditionReport sequences_equivalent(const DefiningSequence& m,
                                            const DefiningSequence& n) {
    detail::require_prefix(m, 8, "sequences_equivalent");
    detail::require_prefix(n, 8, "sequences_equivalent");
    if (m.k_max() != n.k_max())
        throw std::domain_error("sequences_equivalent: prefixes must have equal k_max");

    const auto mc = log_convex_regularize(m);
    const auto nc = log_convex_regularize(n);
    const std::size_t K_eff = std::max<std::size_t>(2, (9 * m.k_max()) / 10);
    const std::size_t half = std::max<std::size_t>(1, K_eff / 2);

    double max_abs = 0.0, head_max = 0.0, tail_max = 0.0;
    for (std::size_t k = 1; k <= K_eff; ++k) {
        const double q = (mc.log_m[k] - nc.log_m[k]) / static_cast<double>(k);
        max_abs = std::max(max_abs, std::abs(q));
        if (k <= half)
            head_max = std::max(head_max, std::abs(q));
        else
            tail_max = std::max(tail_max, std::abs(q));
    }
    const double delta = tail_max - head_max;

    ConditionReport rep;
    rep.condition = Condition::equivalence;
    rep.witness = Json{{"ratio_bound", std::exp(max_abs)},
                       {"max_abs_q", max_abs},
                       {"tail_growth", delta},
                       {"k_effective", K_eff}};
    if (delta <= 0.15)
        rep.verdict = Verdict::holds_on_prefix;
    else if (delta > 0.3)
        rep.verdict = Verdict::fails;
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

} // namespace carleman
