#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "carleman/linalg.hpp"
#include "carleman/matrix.hpp"
#include "test_support.hpp"

using namespace carleman;
using test_support::random_matrix;
using test_support::rel_frobenius_error;

TEST_CASE("index map is a bijection on the window") {
    for (int d : {1, 2}) {
        FiniteMatrix a(d, 3);
        for (int f = 0; f < a.size(); ++f) REQUIRE(a.flat(a.point(f)) == f);
    }
    FiniteMatrix a(2, 3);
    REQUIRE(a.flat({4, 0}) == -1);
}

TEST_CASE("side diagonals decompose and reconstruct") {
    const auto id = FiniteMatrix::identity(2, 2);
    REQUIRE(rel_frobenius_error(side_diagonal(id, {0, 0}), id) == 0.0);
    REQUIRE(test_support::frobenius(side_diagonal(id, {1, 0})) == 0.0);

    FiniteMatrix single(1, 4);
    single(single.flat({2, 0}), single.flat({-1, 0})) = Complex(0.3, -0.7);
    REQUIRE(rel_frobenius_error(side_diagonal(single, {3, 0}), single) == 0.0);
    REQUIRE(test_support::frobenius(side_diagonal(single, {2, 0})) == 0.0);

    // out-of-range offsets give the zero matrix, not an error
    const auto far = side_diagonal(single, {100, 0});
    REQUIRE(test_support::frobenius(far) == 0.0);

    for (int d : {1, 2}) {
        const auto a = random_matrix(7, d, 2);
        FiniteMatrix sum(d, 2);
        const int top = 2 * a.window();
        for (int kx = -top; kx <= top; ++kx) {
            const int ky_top = (d == 2) ? top : 0;
            for (int ky = -ky_top; ky <= ky_top; ++ky) sum += side_diagonal(a, {kx, ky});
        }
        REQUIRE(rel_frobenius_error(sum, a) == 0.0); // exact reconstruction
    }
}

TEST_CASE("derivations: kernel, scaling, Leibniz, commutation") {
    auto diag = FiniteMatrix::identity(1, 4);
    diag(2, 2) = Complex(2.0, 1.0);
    REQUIRE(test_support::frobenius(delta(diag, 1)) == 0.0);

    FiniteMatrix e(2, 2);
    e(e.flat({1, 0}), e.flat({0, 0})) = Complex(1.0, 0.5); // offset (1, 0)
    const auto de = delta(e, 1);
    REQUIRE(std::abs(de(e.flat({1, 0}), e.flat({0, 0})) -
                     Complex(0.0, 2.0 * M_PI) * Complex(1.0, 0.5)) < 1e-15);
    REQUIRE(test_support::frobenius(delta(e, 2)) == 0.0); // k_2 - l_2 = 0

    const auto a = random_matrix(11, 1, 3);
    const auto b = random_matrix(13, 1, 3);
    const auto lhs = delta(a * b, 1);
    const auto rhs = a * delta(b, 1) + delta(a, 1) * b;
    REQUIRE(rel_frobenius_error(lhs, rhs) < 1e-12);

    // the multipliers commute; the two application orders agree to the ulp
    const auto c = random_matrix(17, 2, 2);
    REQUIRE(rel_frobenius_error(delta(delta(c, 1), 2), delta(delta(c, 2), 1)) < 1e-15);

    REQUIRE(rel_frobenius_error(delta_power(c, 2, 1),
                                delta(delta(delta(c, 1), 1), 2)) < 1e-13);
    REQUIRE_THROWS_AS(delta(c, 3), std::domain_error);
}

TEST_CASE("modulation: identity, side-diagonal eigenvalue, group law, generator") {
    const auto a = random_matrix(19, 2, 2);
    REQUIRE(rel_frobenius_error(modulate(a, 0.0, 0.0), a) == 0.0);

    // chi_t on a single side diagonal multiplies by e^{2 pi i k.t}
    const Offset k{1, -2};
    const auto ak = side_diagonal(a, k);
    const double t1 = 0.37, t2 = -0.21;
    auto expected = ak;
    expected *= std::polar(1.0, 2.0 * M_PI * (k.x * t1 + k.y * t2));
    REQUIRE(rel_frobenius_error(modulate(ak, t1, t2), expected) < 1e-12);

    const double s1 = 0.11, s2 = 0.83;
    REQUIRE(rel_frobenius_error(modulate(modulate(a, s1, s2), t1, t2),
                                modulate(a, s1 + t1, s2 + t2)) < 1e-12);

    // central difference of h -> chi_{h e_j}(A) at 0 approximates delta_j
    const double h = 1e-5;
    auto diff = modulate(a, h, 0.0) - modulate(a, -h, 0.0);
    diff *= Complex(1.0 / (2.0 * h), 0.0);
    REQUIRE(rel_frobenius_error(diff, delta(a, 1)) < 1e-6);
}

TEST_CASE("band truncation") {
    const auto a = random_matrix(23, 1, 4);
    REQUIRE(test_support::frobenius(band_truncate(a, 0)) == 0.0);
    REQUIRE(rel_frobenius_error(band_truncate(a, 2 * a.window() + 1), a) == 0.0);

    const auto diag_part = band_truncate(a, 1);
    for (int r = 0; r < a.size(); ++r)
        for (int c = 0; c < a.size(); ++c)
            REQUIRE(diag_part(r, c) == ((r == c) ? a(r, c) : Complex{}));

    REQUIRE(max_offset(band_truncate(a, 3)) == 2);
}

TEST_CASE("LU inversion against Eigen") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto a = test_support::random_invertible(seed, 1, 3);
        const auto inv = invert(a);
        const Eigen::MatrixXcd eig = test_support::to_eigen(a).inverse();
        double err = 0.0;
        for (int r = 0; r < a.size(); ++r)
            for (int c = 0; c < a.size(); ++c)
                err = std::max(err, std::abs(inv.inverse(r, c) - eig(r, c)));
        REQUIRE(err < 1e-12);
        REQUIRE(inv.cond_one >= 1.0);

        // A A^-1 = I
        const auto prod = a * inv.inverse;
        const auto id = FiniteMatrix::identity(1, 3);
        REQUIRE(rel_frobenius_error(prod, id) < 1e-12);
    }

    FiniteMatrix singular(1, 2); // rank deficient
    singular(0, 0) = 1.0;
    singular(1, 0) = 1.0;
    REQUIRE_THROWS_AS(invert(singular), SingularMatrixError);
}

TEST_CASE("operator norm matches a dense SVD oracle") {
    for (std::uint64_t seed : {5ULL, 6ULL, 7ULL, 8ULL}) {
        const auto a = random_matrix(seed, 1, 5);
        const double mine = operator_norm_l2(a);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(test_support::to_eigen(a));
        const double ref = svd.singularValues()(0);
        REQUIRE_THAT(mine, Catch::Matchers::WithinRel(ref, 1e-10));
    }
    REQUIRE(operator_norm_l2(FiniteMatrix(1, 3)) == 0.0);
    REQUIRE_THAT(operator_norm_l2(FiniteMatrix::identity(2, 2)),
                 Catch::Matchers::WithinRel(1.0, 1e-12));
}
