#pragma once

// Norms on finite sections: operator norm, the solid Schur-sum and Baskakov
// norms, their weighted forms over side diagonals, approximation errors
// against band truncation, and the Carleman / Dales-Davie scales built from
// a defining sequence.
//
// Two aggregates appear in the literature for the "C^1_{v_0}" norm: the
// double sum sum_k sum_l |A(l,l-k)| and the per-diagonal sum_k sup_l.
// Both are implemented (schur_sum and baskakov); baskakov is the default
// because the Dales-Davie identification computes with per-diagonal
// aggregates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "carleman/linalg.hpp"
#include "carleman/matrix.hpp"
#include "carleman/sequence.hpp"

namespace carleman {

enum class BaseNorm { operator_l2, schur_sum, baskakov };

inline const char* to_string(BaseNorm b) {
    switch (b) {
        case BaseNorm::operator_l2: return "operator_l2";
        case BaseNorm::schur_sum: return "schur_sum";
        case BaseNorm::baskakov: return "baskakov";
    }
    return "?";
}

using OffsetWeight = std::function<double(Offset)>;

struct NormSpec {
    BaseNorm base = BaseNorm::baskakov;
    double p = 1.0;      // exponent of the weighted form; infinity for sup
    OffsetWeight weight; // optional weight on Z^d, weight(0) must be 1

    static NormSpec plain(BaseNorm b) { return {b, 1.0, {}}; }
    static NormSpec weighted(BaseNorm b, OffsetWeight w, double p_ = 1.0) {
        return {b, p_, std::move(w)};
    }
};

namespace detail {

// Per-offset aggregates in one pass: sum of |entries| and sup of |entries|
// on every side diagonal, indexed over the offset cube [-2W, 2W]^d.
struct DiagonalAggregates {
    int w = 0, d = 1, span = 1;
    std::vector<double> sum, sup;

    int index(Offset k) const {
        return d == 1 ? k.x + 2 * w : (k.x + 2 * w) * span + (k.y + 2 * w);
    }
    Offset offset(int idx) const {
        return d == 1 ? Offset{idx - 2 * w, 0}
                      : Offset{idx / span - 2 * w, idx % span - 2 * w};
    }
};

inline DiagonalAggregates diagonal_aggregates(const FiniteMatrix& a) {
    DiagonalAggregates g;
    g.w = a.window();
    g.d = a.dim();
    g.span = 4 * g.w + 1;
    const std::size_t cells = (g.d == 1) ? g.span : static_cast<std::size_t>(g.span) * g.span;
    g.sum.assign(cells, 0.0);
    g.sup.assign(cells, 0.0);
    const int n = a.size();
    for (int r = 0; r < n; ++r) {
        const Offset pr = a.point(r);
        for (int c = 0; c < n; ++c) {
            const double v = std::abs(a(r, c));
            if (v == 0.0) continue;
            const int idx = g.index(pr - a.point(c));
            g.sum[idx] += v;
            g.sup[idx] = std::max(g.sup[idx], v);
        }
    }
    return g;
}

} // namespace detail

/// Norm of a finite section under the given spec. With a weight present the
/// value is (sum_k ||A^(k)||_base^p v(k)^p)^{1/p}, sup over k for p = inf,
/// where ||.||_base is the base norm of the k-th side diagonal.
inline double norm(const FiniteMatrix& a, const NormSpec& spec) {
    if (!spec.weight) {
        switch (spec.base) {
            case BaseNorm::operator_l2:
                return operator_norm_l2(a);
            case BaseNorm::schur_sum: {
                double s = 0.0;
                for (const auto& z : a.data()) s += std::abs(z);
                return s;
            }
            case BaseNorm::baskakov: {
                const auto g = detail::diagonal_aggregates(a);
                double s = 0.0;
                for (double v : g.sup) s += v;
                return s;
            }
        }
    }
    if (std::abs(spec.weight(Offset{0, 0}) - 1.0) > 1e-12)
        throw std::domain_error("norm: weight(0) must be 1");
    if (!(spec.p >= 1.0)) throw std::domain_error("norm: p must be in [1, inf]");
    const auto g = detail::diagonal_aggregates(a);
    const bool sup_form = std::isinf(spec.p);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.sum.size(); ++i) {
        // base norm of one side diagonal: entry sum for schur_sum, entry sup
        // for baskakov and for the operator norm (one nonzero per row/column)
        const double b = (spec.base == BaseNorm::schur_sum) ? g.sum[i] : g.sup[i];
        if (b == 0.0) continue;
        const Offset k = g.offset(static_cast<int>(i));
        const double v = spec.weight(k);
        if (!(v > 0.0)) throw std::domain_error("norm: weight must be positive");
        if (sup_form)
            acc = std::max(acc, b * v);
        else
            acc += std::pow(b * v, spec.p);
    }
    return sup_form ? acc : std::pow(acc, 1.0 / spec.p);
}

/// ||A - band_truncate(A, n)||: for solid specs this is the exact n-th
/// approximation error by banded matrices; for operator_l2 it is an upper
/// bound surrogate for the infimum.
inline double approx_error(const FiniteMatrix& a, int n, const NormSpec& spec) {
    return norm(a - band_truncate(a, n), spec);
}

/// (sum_{k>=0} E_k(A)^p w(k)^p)^{1/p}, sup form for p = inf. E_k vanishes
/// once k exceeds the largest present offset, so the sum is finite.
inline double approximation_norm(const FiniteMatrix& a, double p,
                                 const std::function<double(std::size_t)>& w,
                                 const NormSpec& spec) {
    if (!(p >= 1.0)) throw std::domain_error("approximation_norm: p must be in [1, inf]");
    const int k_top = 2 * a.window() + 1;
    const bool sup_form = std::isinf(p);
    double acc = 0.0;
    for (int k = 0; k <= k_top; ++k) {
        const double e = approx_error(a, k, spec);
        if (e == 0.0) continue;
        const double v = w(static_cast<std::size_t>(k));
        if (sup_form)
            acc = std::max(acc, e * v);
        else
            acc += std::pow(e * v, p);
    }
    return sup_form ? acc : std::pow(acc, 1.0 / p);
}

/// Truncated Carleman norm: max over |alpha| <= alpha_max of
/// ||delta^alpha A|| / (r^|alpha| M_|alpha|), evaluated in the log domain.
inline double carleman_norm(const FiniteMatrix& a, double r, const DefiningSequence& m,
                            int alpha_max, const NormSpec& spec) {
    if (!(r > 0.0)) throw std::domain_error("carleman_norm: r must be > 0");
    if (alpha_max < 0 || alpha_max > 12)
        throw std::domain_error("carleman_norm: alpha_max must be in [0, 12]");
    if (static_cast<std::size_t>(alpha_max) > m.k_max())
        throw std::domain_error("carleman_norm: alpha_max exceeds the sequence prefix");
    const double log_r = std::log(r);
    double best = -std::numeric_limits<double>::infinity();
    for (int a1 = 0; a1 <= alpha_max; ++a1) {
        const int a2_top = (a.dim() == 2) ? alpha_max - a1 : 0;
        for (int a2 = 0; a2 <= a2_top; ++a2) {
            const int total = a1 + a2;
            const double nrm = norm(delta_power(a, a1, a2), spec);
            if (nrm == 0.0) continue;
            best = std::max(best, std::log(nrm) - total * log_r - m.log_m[total]);
        }
    }
    if (best == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(best);
}

/// Dales-Davie norm sum_{k=0..k_cut} ||delta^k A|| / M_k for the
/// one-parameter setting (d = 1), with a tail diagnostic: the partial sums
/// are flagged as diverging when the last term has not dropped below the
/// first.
struct DalesDavieNorm {
    double value = 0.0;
    double last_term_ratio = 0.0; // last term / first term
    bool converged = true;
};

inline DalesDavieNorm dales_davie_norm(const FiniteMatrix& a, const DefiningSequence& m,
                                       std::size_t k_cut, const NormSpec& spec) {
    if (a.dim() != 1)
        throw std::domain_error("dales_davie_norm: one-parameter setting needs d = 1");
    if (k_cut > m.k_max())
        throw std::domain_error("dales_davie_norm: k_cut exceeds the sequence prefix");
    double log_first = 0.0, log_last = 0.0;
    std::vector<double> log_terms;
    for (std::size_t k = 0; k <= k_cut; ++k) {
        const double nrm = norm(delta_power(a, static_cast<int>(k)), spec);
        const double lt = (nrm == 0.0) ? -std::numeric_limits<double>::infinity()
                                       : std::log(nrm) - m.log_m[k];
        log_terms.push_back(lt);
        if (k == 0) log_first = lt;
        log_last = lt;
    }
    double t_max = -std::numeric_limits<double>::infinity();
    for (double t : log_terms) t_max = std::max(t_max, t);
    DalesDavieNorm out;
    if (t_max == -std::numeric_limits<double>::infinity()) return out; // zero matrix
    double acc = 0.0;
    for (double t : log_terms) acc += std::exp(t - t_max);
    const double log_value = t_max + std::log(acc);
    out.value = (log_value > std::log(std::numeric_limits<double>::max()))
                    ? std::numeric_limits<double>::infinity()
                    : std::exp(log_value);
    out.last_term_ratio = std::exp(log_last - log_first);
    out.converged = (log_last < log_first);
    return out;
}

/// Bernstein ratio sweep for a banded section: verifies
/// ||delta^alpha A|| <= (2 pi sigma)^{|alpha|} ||A|| for |alpha| <= alpha_max.
struct BernsteinReport {
    double max_ratio = 0.0;
    bool ok = true;
};

inline BernsteinReport bernstein_check(const FiniteMatrix& a, int sigma, int alpha_max,
                                       const NormSpec& spec) {
    if (sigma < 0) throw std::domain_error("bernstein_check: sigma must be >= 0");
    if (max_offset(a) > sigma)
        throw std::domain_error("bernstein_check: matrix has offsets beyond sigma");
    const double base = norm(a, spec);
    BernsteinReport rep;
    if (base == 0.0) return rep;
    const double log_bound_unit = std::log(2.0 * M_PI * std::max(sigma, 1));
    for (int a1 = 0; a1 <= alpha_max; ++a1) {
        const int a2_top = (a.dim() == 2) ? alpha_max - a1 : 0;
        for (int a2 = 0; a2 <= a2_top; ++a2) {
            const int total = a1 + a2;
            const double nrm = norm(delta_power(a, a1, a2), spec);
            double ratio;
            if (sigma == 0) // only the diagonal: all derivations vanish
                ratio = (total == 0) ? nrm / base : (nrm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            else
                ratio = std::exp(std::log(std::max(nrm, 1e-300)) - total * log_bound_unit -
                                 std::log(base));
            if (nrm == 0.0) ratio = 0.0;
            rep.max_ratio = std::max(rep.max_ratio, ratio);
        }
    }
    rep.ok = rep.max_ratio <= 1.0 + 1e-9;
    return rep;
}

} // namespace carleman
