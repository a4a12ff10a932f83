#pragma once

// The iterated quotient rule for commuting derivations: for a tuple
// B = (b_1,...,b_k) of derivation indices,
//
//   delta_B(a^-1) = sum_{m=1..k} (-1)^m sum_{ordered partitions (B_1..B_m)}
//                   ( prod_{j=1..m} a^-1 delta_{B_j}(a) ) a^-1 .
//
// Partitions are ordered set partitions: the blocks carve up the index set
// {1..k} into m nonempty disjoint subsets whose order matters and whose
// members keep their original order. Their count is m! S(k,m), matching the
// multinomial count used in the norm estimate; a contiguous-subtuple reading
// would undercount, and the numerical oracle (direct_derivation) confirms
// the set-partition reading.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "carleman/linalg.hpp"
#include "carleman/matrix.hpp"
#include "carleman/sequence.hpp"

namespace carleman {

/// A tuple of derivation indices, each in 1..d.
struct DerivationWord {
    std::vector<int> letters;
    int d = 1;

    std::size_t length() const { return letters.size(); }

    void validate() const {
        if (d < 1 || d > 2) throw std::domain_error("DerivationWord: d must be 1 or 2");
        for (int b : letters)
            if (b < 1 || b > d)
                throw std::domain_error("DerivationWord: letter out of range 1..d");
    }
};

/// One signed product term: sign = (-1)^{number of blocks}; blocks are
/// 1-based position subsets of {1..k}, each ascending.
struct ExpansionTerm {
    int sign = -1;
    std::vector<std::vector<int>> blocks;
};

struct Expansion {
    DerivationWord word;
    std::vector<ExpansionTerm> terms;
};

/// All ordered set partitions of {1..k} into m nonempty blocks, enumerated
/// as surjections f: {1..k} -> {1..m} in lexicographic order of the vector
/// (f(1),...,f(k)); block i collects f^{-1}(i) in ascending order.
/// m > k yields the empty list; k > 10 is rejected (the count is m! S(k,m)).
inline std::vector<std::vector<std::vector<int>>> ordered_set_partitions(int k, int m) {
    if (k < 1 || m < 1) throw std::domain_error("ordered_set_partitions: k, m must be >= 1");
    if (k > 10) throw std::length_error("ordered_set_partitions: k > 10");
    std::vector<std::vector<std::vector<int>>> out;
    if (m > k) return out;
    std::vector<int> f(static_cast<std::size_t>(k), 0);
    std::vector<int> count(static_cast<std::size_t>(m) + 1, 0);
    int used = 0;
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == k) {
            if (used != m) return; // not surjective
            std::vector<std::vector<int>> blocks(static_cast<std::size_t>(m));
            for (int p = 0; p < k; ++p) blocks[static_cast<std::size_t>(f[p] - 1)].push_back(p + 1);
            out.push_back(std::move(blocks));
            return;
        }
        if (k - pos < m - used) return; // not enough positions left to cover all labels
        for (int label = 1; label <= m; ++label) {
            f[pos] = label;
            const bool fresh = (count[label]++ == 0);
            if (fresh) ++used;
            self(self, pos + 1);
            if (--count[label] == 0) --used;
        }
    };
    rec(rec, 0);
    return out;
}

/// Full expansion of delta_B(a^-1): terms from all m = 1..|B| with sign
/// (-1)^m. The term count is the ordered Bell number of |B|.
inline Expansion expand_inverse_derivation(const DerivationWord& word) {
    word.validate();
    const int k = static_cast<int>(word.length());
    if (k < 1) throw std::domain_error("expand_inverse_derivation: empty word");
    if (k > 10) throw std::length_error("expand_inverse_derivation: |word| > 10");
    Expansion e;
    e.word = word;
    for (int m = 1; m <= k; ++m) {
        const int sign = (m % 2 == 0) ? 1 : -1;
        for (auto& blocks : ordered_set_partitions(k, m))
            e.terms.push_back(ExpansionTerm{sign, std::move(blocks)});
    }
    return e;
}

using DerivationFamily = std::function<FiniteMatrix(const FiniteMatrix&, int)>;

/// The derivations of the matrix module, delta_j(A) = [X_j, A].
inline DerivationFamily matrix_derivations() {
    return [](const FiniteMatrix& a, int axis) { return delta(a, axis); };
}

/// Numerical evaluation of an expansion: a^-1 is computed once by LU with
/// partial pivoting; sections with 1-norm condition estimate above
/// `cond_limit` are rejected. Terms are summed in enumeration order.
inline FiniteMatrix eval_expansion(const Expansion& expansion, const FiniteMatrix& a,
                                   const DerivationFamily& derivations = matrix_derivations(),
                                   double cond_limit = 1e12) {
    expansion.word.validate();
    const auto inv = invert(a);
    if (!(inv.cond_one < cond_limit))
        throw SingularMatrixError(inv.cond_one,
                                  "eval_expansion: condition estimate " +
                                      std::to_string(inv.cond_one) + " exceeds limit");
    // a^-1 delta_{B_j}(a) depends only on the block's positions; blocks
    // repeat heavily across terms, so cache the left-multiplied factor
    std::map<std::vector<int>, FiniteMatrix> cache;
    const auto block_factor = [&](const std::vector<int>& block) -> const FiniteMatrix& {
        auto it = cache.find(block);
        if (it != cache.end()) return it->second;
        FiniteMatrix d = a;
        for (int pos : block)
            d = derivations(d, expansion.word.letters[static_cast<std::size_t>(pos - 1)]);
        return cache.emplace(block, inv.inverse * d).first->second;
    };

    FiniteMatrix acc(a.dim(), a.window());
    for (const auto& term : expansion.terms) {
        FiniteMatrix prod = block_factor(term.blocks.front());
        for (std::size_t j = 1; j < term.blocks.size(); ++j)
            prod = prod * block_factor(term.blocks[j]);
        prod = prod * inv.inverse;
        prod *= Complex(static_cast<double>(term.sign), 0.0);
        acc += prod;
    }
    return acc;
}

/// Oracle for the expansion: compute a^-1 once, then apply the derivations
/// letter by letter. Exact up to round-off because each delta_j acts by
/// entrywise multiplication. The empty word returns a^-1 itself.
inline FiniteMatrix direct_derivation(const FiniteMatrix& a, const DerivationWord& word,
                                      const DerivationFamily& derivations = matrix_derivations()) {
    word.validate();
    FiniteMatrix m = invert(a).inverse;
    for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it)
        m = derivations(m, *it);
    return m;
}

/// Log-domain right side of the Carleman inverse-norm estimate: for each
/// k <= K,
///   sum_{m=1..k} ||a^-1||^{m+1} sum_{k_1+..+k_m=k, k_j>=1}
///       multinomial(k; k_1..k_m) prod_j C r^{k_j} M_{k_j}
/// with C = max_k norms[k] / (r^k M_k) read from the measured derivation
/// norms. Returns log bounds indexed 0..K (index 0 is log ||a^-1||).
inline std::vector<double> carleman_inverse_bound(const std::vector<double>& norms,
                                                  double inv_norm,
                                                  const DefiningSequence& m, double r) {
    if (norms.size() < 2) throw std::domain_error("carleman_inverse_bound: need K >= 1");
    const std::size_t K = norms.size() - 1;
    if (K > 20) throw std::length_error("carleman_inverse_bound: K > 20");
    if (K > m.k_max()) throw std::domain_error("carleman_inverse_bound: K exceeds prefix");
    if (!(inv_norm > 0.0) || !(r > 0.0))
        throw std::domain_error("carleman_inverse_bound: inv_norm and r must be > 0");
    for (std::size_t k = 1; k <= K; ++k)
        if (!(norms[k] > 0.0))
            throw std::domain_error("carleman_inverse_bound: norms must be positive");

    const double log_r = std::log(r);
    const double log_inv = std::log(inv_norm);
    double log_c = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= K; ++k)
        log_c = std::max(log_c, std::log(norms[k]) - static_cast<double>(k) * log_r - m.log_m[k]);

    std::vector<double> log_bounds(K + 1);
    log_bounds[0] = log_inv;
    std::vector<double> lgam(K + 2);
    for (std::size_t i = 0; i < lgam.size(); ++i)
        lgam[i] = std::lgamma(static_cast<double>(i) + 1.0);

    for (std::size_t k = 1; k <= K; ++k) {
        // collect log terms over all compositions of k
        std::vector<double> terms;
        std::vector<std::size_t> parts;
        double part_acc = 0.0; // sum over parts of (log_c + k_j log r + log M_{k_j})
        double lgam_acc = 0.0; // sum over parts of lgamma(k_j + 1)
        auto rec = [&](auto&& self, std::size_t remaining) -> void {
            if (remaining == 0) {
                const std::size_t mm = parts.size();
                const double log_multinomial = lgam[k] - lgam_acc;
                terms.push_back(static_cast<double>(mm + 1) * log_inv + log_multinomial +
                                part_acc);
                return;
            }
            for (std::size_t part = 1; part <= remaining; ++part) {
                parts.push_back(part);
                part_acc += log_c + static_cast<double>(part) * log_r + m.log_m[part];
                lgam_acc += lgam[part];
                self(self, remaining - part);
                lgam_acc -= lgam[part];
                part_acc -= log_c + static_cast<double>(part) * log_r + m.log_m[part];
                parts.pop_back();
            }
        };
        rec(rec, k);
        double t_max = -std::numeric_limits<double>::infinity();
        for (double t : terms) t_max = std::max(t_max, t);
        double acc = 0.0;
        for (double t : terms) acc += std::exp(t - t_max);
        log_bounds[k] = t_max + std::log(acc);
    }
    return log_bounds;
}

} // namespace carleman
