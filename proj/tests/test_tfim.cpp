#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numbers>

#include "affqetu/tfim.hpp"
#include "affqetu/linalg.hpp"

using namespace aff;

TEST_CASE("ground energies of the unit-coupling chain") {
    // frozen reference energies for J = g = 1
    const auto h6 = build_tfim({6, 1.0, 1.0});
    REQUIRE(h6.ground_energy() == Catch::Approx(-7.7274).margin(1e-3));
    const auto h8 = build_tfim({8, 1.0, 1.0});
    REQUIRE(h8.ground_energy() == Catch::Approx(-10.251).margin(1e-2));
}

TEST_CASE("pure coupling spectrum at L = 2") {
    const auto h = build_tfim({2, 1.0, 0.0});
    const auto& ev = h.decomposition().eigenvalues;
    REQUIRE(ev(0) == Catch::Approx(-1.0));
    REQUIRE(ev(1) == Catch::Approx(-1.0));
    REQUIRE(ev(2) == Catch::Approx(1.0));
    REQUIRE(ev(3) == Catch::Approx(1.0));
}

TEST_CASE("closed-form ground energies in the decoupled limits") {
    for (int L : {2, 3, 5, 7}) {
        const int bonds = (L >= 3) ? L : 1;
        const auto hx = build_tfim({L, 0.0, 1.3});
        REQUIRE(hx.ground_energy() == Catch::Approx(-1.3 * L).margin(1e-10));
        const auto hz = build_tfim({L, 0.7, 0.0});
        REQUIRE(hz.ground_energy() ==
                Catch::Approx(-0.7 * bonds).margin(1e-10));
    }
}

TEST_CASE("two-site build matches the kron assembly") {
    const CMatrix i2 = identity_matrix(2);
    const CMatrix expected = -kron(pauli_z(), pauli_z()) -
                             kron(pauli_x(), i2) - kron(i2, pauli_x());
    const auto h = build_tfim({2, 1.0, 1.0});
    REQUIRE((h.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
    REQUIRE(h.ground_energy() == Catch::Approx(-std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("spectrum is invariant under flipping the field sign") {
    for (int L : {2, 4, 6}) {
        const auto plus = build_tfim({L, 1.0, 1.0}).decomposition().eigenvalues;
        const auto minus = build_tfim({L, 1.0, -1.0}).decomposition().eigenvalues;
        REQUIRE((plus - minus).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("build_tfim rejects oversized and invalid inputs") {
    REQUIRE_THROWS_AS(build_tfim({13, 1.0, 1.0}), TooLargeError);
    REQUIRE_THROWS_AS(build_tfim({1, 1.0, 1.0}), BadParametersError);
}

TEST_CASE("linear transform endpoint mapping") {
    const auto h = build_tfim({2, 1.0, 0.0}); // eigenvalues -1, -1, 1, 1
    const SpectrumBounds bounds{-1.0, 1.0};
    const auto ht = linear_transform(h, bounds);
    const auto& ev = ht.decomposition().eigenvalues;
    REQUIRE(ev(0) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(ev(3) == Catch::Approx(std::numbers::pi).margin(1e-12));
}

TEST_CASE("linear transform of the six-site ground level") {
    const auto h = build_tfim({6, 1.0, 1.0});
    const auto ht = linear_transform(h, SpectrumBounds{-10.0, 10.0});
    // pi * (lambda_0 + 10) / 20 with lambda_0 ~ -7.7274
    REQUIRE(ht.ground_energy() == Catch::Approx(0.35699).margin(2e-4));
    REQUIRE(cosine_map(ht.ground_energy()) == Catch::Approx(0.98411).margin(5e-5));
}

TEST_CASE("linear transform rejects degenerate bounds") {
    const auto h = build_tfim({2, 1.0, 1.0});
    REQUIRE_THROWS_AS(linear_transform(h, SpectrumBounds{1.0, 1.0}),
                      DegenerateBoundsError);
}

TEST_CASE("cosine map endpoints and monotonicity") {
    REQUIRE(cosine_map(std::numbers::pi) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(cosine_map(std::numbers::pi / 2.0) ==
            Catch::Approx(std::sqrt(2.0) / 2.0));
    double prev = 2.0;
    for (int i = 1; i < 100; ++i) {
        const double v = cosine_map(std::numbers::pi * i / 100.0);
        REQUIRE(v < prev);
        prev = v;
    }
}

TEST_CASE("composed map is monotone decreasing in energy") {
    const auto h = build_tfim({4, 1.0, 1.0});
    const SpectrumBounds bounds = default_bounds({4, 1.0, 1.0});
    const auto tc = TransformCoefficients::from_bounds(bounds);
    double prev = 2.0;
    for (int i = 0; i <= 50; ++i) {
        const double lambda =
            bounds.lower + bounds.width() * (0.01 + 0.98 * i / 50.0);
        const double a = std::cos(tc.c1 * lambda + tc.c2);
        REQUIRE(a < prev);
        prev = a;
    }
}

TEST_CASE("spectral gaps of the six and eight site chains") {
    const auto h6 = build_tfim({6, 1.0, 1.0});
    const auto g6 = spectral_gaps(h6.decomposition(), SpectrumBounds{-10, 10});
    REQUIRE(g6.delta == Catch::Approx(0.263).margin(5e-3));
    REQUIRE(g6.delta_a == Catch::Approx(0.004).margin(5e-4));
    REQUIRE(g6.a0 == Catch::Approx(0.98411).margin(5e-5));
    REQUIRE(g6.a0 > g6.a1);

    const auto h8 = build_tfim({8, 1.0, 1.0});
    const auto g8 = spectral_gaps(h8.decomposition(), SpectrumBounds{-15, 15});
    REQUIRE(g8.delta_a == Catch::Approx(0.003).margin(5e-4));
}

TEST_CASE("spectral gaps rejects a fully degenerate spectrum") {
    SpectralDecomposition d;
    d.eigenvalues = RVector::Constant(4, 2.0);
    d.eigenvectors = CMatrix::Identity(4, 4);
    REQUIRE_THROWS_AS(spectral_gaps(d, SpectrumBounds{0, 4}),
                      FullyDegenerateError);
}

TEST_CASE("default bounds enclose the exact spectrum") {
    for (int L : {2, 4, 6, 8}) {
        const TFIMParams params{L, 1.0, 1.0};
        const auto bounds = default_bounds(params);
        const auto h = build_tfim(params);
        const auto& ev = h.decomposition().eigenvalues;
        REQUIRE(ev(0) > bounds.lower);
        REQUIRE(ev(ev.size() - 1) < bounds.upper);
    }
}
