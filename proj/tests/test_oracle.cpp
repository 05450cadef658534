#include "sbf/engine.hpp"
#include "sbf/oracle.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace sbf;

TEST_CASE("two-node spectrum") {
    for (double w : {0.1, 0.5, 0.9}) {
        const DenseSpectrum s = eigendecompose(test::two_node_graph(w));
        CHECK(std::abs(s.eigenvalues[0]) <= 1e-15);
        CHECK(s.eigenvalues[1] == doctest::Approx(2 * w / (1 + w)).epsilon(1e-14));
    }
}

TEST_CASE("eigendecomposition of a BF graph") {
    const BilateralGraph g = build_graph(test::random_image(12, 12, 1), GraphParams{2.0, 0.1, 0});
    const DenseSpectrum s = eigendecompose(g);
    const Eigen::MatrixXd l = dense_normalized_laplacian(g);
    const auto n = static_cast<Eigen::Index>(g.size());

    CHECK(s.eigenvalues[0] >= -1e-12);
    CHECK(s.eigenvalues[n - 1] <= 2.0 + 1e-12);
    CHECK(std::abs(s.eigenvalues[0]) <= 1e-12);
    for (Eigen::Index i = 1; i < n; ++i) CHECK(s.eigenvalues[i] >= s.eigenvalues[i - 1]);

    // zero mode is D^1/2 1 up to sign
    Eigen::VectorXd u0 = s.degree.cwiseSqrt();
    u0.normalize();
    CHECK(std::abs(std::abs(u0.dot(s.eigenvectors.col(0))) - 1.0) <= 1e-10);

    const Eigen::MatrixXd rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
    CHECK((rebuilt - l).cwiseAbs().maxCoeff() <= 1e-9);
    const Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);

    // D^-1/2 (I - L) D^1/2 = D^-1 W
    const Eigen::MatrixXd bf = dense_bf_matrix(g);
    const Eigen::VectorXd sq = s.degree.cwiseSqrt();
    const Eigen::MatrixXd similar =
        sq.cwiseInverse().asDiagonal() * (Eigen::MatrixXd::Identity(n, n) - l) * sq.asDiagonal();
    CHECK((similar - bf).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("graph Fourier transform") {
    const BilateralGraph g = build_graph(test::random_image(10, 9, 2), GraphParams{2.0, 0.05, 0});
    const DenseSpectrum s = eigendecompose(g);
    const Signal x = test::random_vector(g.size(), 3);
    const Signal t = gft(s, x);
    CHECK(test::max_abs_diff(igft(s, t), x) <= 1e-12);
    CHECK(test::norm2(t) == doctest::Approx(test::norm2(x)).epsilon(1e-12));

    const Signal ones(g.size(), 1.0);
    const Signal t1 = gft(s, g.normalize_signal(ones));
    double rest = 0.0;
    for (std::size_t i = 1; i < t1.size(); ++i) rest += t1[i] * t1[i];
    CHECK(rest / (t1[0] * t1[0]) <= 1e-20);
    CHECK_THROWS_AS(gft(s, Signal(3, 0.0)), std::invalid_argument);
}

TEST_CASE("exact spectral filter") {
    const BilateralGraph g = build_graph(test::random_image(11, 11, 4), GraphParams{2.0, 0.035, 0});
    const DenseSpectrum s = eigendecompose(g);
    const Signal x = test::random_vector(g.size(), 5);
    const Signal via_oracle = g.denormalize_signal(exact_spectral_filter(s, make_bf_kernel(), g.normalize_signal(x)));
    CHECK(test::max_abs_diff(via_oracle, g.apply_bf(x)) <= 1e-10);
    const Signal cubed = g.denormalize_signal(exact_spectral_filter(s, iterated_bf_filter(3), g.normalize_signal(x)));
    CHECK(test::max_abs_diff(cubed, iterate_bf(g, x, 3)) <= 1e-10);
    const Signal ident =
        exact_spectral_filter(s, [](double) { return 1.0; }, std::span<const double>(x.data(), x.size()));
    CHECK(test::max_abs_diff(ident, x) <= 1e-12);
}

TEST_CASE("empirical spectral response") {
    const BilateralGraph g = build_graph(test::random_image(10, 10, 6), GraphParams{2.0, 0.035, 0});
    const DenseSpectrum s = eigendecompose(g);
    SUBCASE("one BF pass gives 1 - lambda") {
        const auto r = empirical_spectral_response(g, s);
        REQUIRE(r.size() == g.size());
        for (const auto& sample : r) CHECK(std::abs(sample.response - (1.0 - sample.lambda)) <= 1e-9);
    }
    SUBCASE("k passes give (1 - lambda)^k") {
        const auto r = empirical_spectral_response(g, s, [&g](std::span<const double> v) { return iterate_bf(g, v, 6); });
        for (const auto& sample : r) CHECK(std::abs(sample.response - std::pow(1.0 - sample.lambda, 6)) <= 1e-8);
    }
    SUBCASE("identity operator") {
        const auto r = empirical_spectral_response(g, s, [](std::span<const double> v) { return Signal(v.begin(), v.end()); });
        for (const auto& sample : r) CHECK(std::abs(sample.response - 1.0) <= 1e-12);
    }
}

TEST_CASE("energy compaction") {
    const ImageGrid img = test::two_region_image(16, 16, 0.2, 0.8);
    const Signal x(img.pixels().begin(), img.pixels().end());
    std::vector<double> first;
    for (GraphMode mode : {GraphMode::bilateral, GraphMode::gaussian}) {
        const BilateralGraph g = build_graph(img, GraphParams{2.0, 0.1, 0, mode});
        const DenseSpectrum s = eigendecompose(g);
        const auto e = energy_compaction(s, g.normalize_signal(x));
        REQUIRE(e.size() == g.size());
        CHECK(e.back() == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k] >= e[k - 1]);
        if (first.empty()) {
            first = e;
        } else {
            // the bilateral graph packs the step into fewer modes
            for (std::size_t k = 0; k < e.size(); ++k) CHECK(first[k] >= e[k] - 1e-12);
        }
    }
    const BilateralGraph g = build_graph(img, GraphParams{});
    CHECK_THROWS_AS(energy_compaction(eigendecompose(g), Signal(g.size(), 0.0)), std::invalid_argument);
}

TEST_CASE("dense oracle size cap") {
    const BilateralGraph g = build_graph(ImageGrid(91, 91, 0.5), GraphParams{1.0, 0.1, 1});
    REQUIRE(g.size() > kMaxDenseNodes);
    CHECK_THROWS_AS(eigendecompose(g), std::invalid_argument);
}
