#include "sbf/kernels.hpp"
#include "test_support.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <random>

using namespace sbf;

namespace {

// Reference values computed before the build with an independent oracle:
// coefficients by adaptive quadrature of h(1+cos t)cos(jt) at 50 digits
// (mpmath), sup error by evaluating that series on the 10,001-point grid.
constexpr std::array<double, 6> kDenoiseCoeffs5 = {
    0.56886448100578311, -0.43457379350328036, 0.049650363955290358,
    0.030794424668657645, -0.01911512622597894, 0.0044885958994582361,
};
constexpr std::array<double, 12> kDenoiseSupError = {
    0.07317817627961332,   0.053088638464353854,  0.02318040262747245,    0.005193762892479747,
    0.0013095083297409715, 0.0009429392832683847, 0.0002881936469691926,  4.0066676704642035e-05,
    3.26510309784922e-05,  1.3666266586942477e-05, 2.9461978616751594e-06, 8.469240520003751e-07,
};

std::vector<SpectralKernel> kernel_zoo() {
    return {
        make_bf_kernel(),
        make_iterated_bf_kernel(3),
        make_denoise_kernel(),
        make_regularized_kernel(power_penalty(1.0), 0.25),
        make_constant_kernel(0.7),
    };
}

} // namespace

TEST_CASE("eval_kernel closed forms") {
    CHECK(eval_kernel(make_bf_kernel(), 0.0) == 1.0);
    CHECK(eval_kernel(make_bf_kernel(), 2.0) == -1.0);
    CHECK(eval_kernel(make_iterated_bf_kernel(2), 1.0) == 0.0);
    CHECK(eval_kernel(make_regularized_kernel(power_penalty(2.0), 1.0), 2.0) == doctest::Approx(1.0 / 17.0));
    CHECK(eval_kernel(make_denoise_kernel(), 1.0) == doctest::Approx(0.5));
    CHECK(eval_kernel(make_denoise_kernel(), 2.0) == doctest::Approx(0.2));
    CHECK_THROWS_AS(eval_kernel(make_bf_kernel(), -0.01), std::domain_error);
    CHECK_THROWS_AS(eval_kernel(make_bf_kernel(), 2.01), std::domain_error);
    CHECK_THROWS_AS(eval_kernel(make_bf_kernel(), std::nan("")), std::domain_error);
}

TEST_CASE("regularized kernels") {
    SUBCASE("DC gain is one when h_p(0) = 0") {
        for (double p : {0.5, 1.0, 2.0, 3.0}) {
            CHECK(eval_kernel(make_regularized_kernel(power_penalty(p), 2.5), 0.0) == 1.0);
        }
    }
    SUBCASE("vanishing rho approaches the identity") {
        const auto h = make_regularized_kernel(power_penalty(2.0), 1e-12);
        for (int i = 0; i <= 1000; ++i) CHECK(std::abs(h(2.0 * i / 1000) - 1.0) <= 1e-10);
    }
    SUBCASE("non-increasing with values in (0,1]") {
        for (const auto& h : {make_denoise_kernel(), make_regularized_kernel(power_penalty(2.0), 3.0),
                              make_regularized_kernel(power_penalty(0.5), 0.1)}) {
            double prev = h(0.0);
            for (int i = 0; i <= 1000; ++i) {
                const double v = h(2.0 * i / 1000);
                CHECK(v > 0.0);
                CHECK(v <= 1.0);
                CHECK(v <= prev);
                prev = v;
            }
        }
    }
    SUBCASE("invalid rho or penalty is rejected") {
        CHECK_THROWS_AS(make_regularized_kernel(power_penalty(2.0), 0.0), std::invalid_argument);
        CHECK_THROWS_AS(make_regularized_kernel(power_penalty(2.0), -1.0), std::invalid_argument);
        CHECK_THROWS_AS(make_regularized_kernel(Penalty{"2-lambda", [](double l) { return 2.0 - l; }}, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(make_regularized_kernel(Penalty{"lambda-1", [](double l) { return l - 1.0; }}, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(power_penalty(-1.0), std::invalid_argument);
    }
}

TEST_CASE("sharp low-pass") {
    const auto h = make_sharp_lowpass(0.2, 50.0);
    CHECK(h(0.2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h(0.0) >= 0.9999);
    CHECK(h(0.5) <= 4e-7);
    CHECK(h(2.0) < 1e-30);
    CHECK_THROWS_AS(make_sharp_lowpass(0.0, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(make_sharp_lowpass(2.0, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(make_sharp_lowpass(0.2, 0.0), std::invalid_argument);
}

TEST_CASE("tabulated kernels interpolate linearly") {
    const auto h = make_tabulated_kernel({0.0, 1.0, 2.0}, {1.0, 0.5, 0.0});
    CHECK(h(0.5) == doctest::Approx(0.75));
    CHECK(h(1.5) == doctest::Approx(0.25));
    CHECK(h(2.0) == 0.0);
    CHECK_THROWS_AS(make_tabulated_kernel({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_tabulated_kernel({0.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("fit_chebyshev") {
    SUBCASE("constant kernel") {
        for (int k : {0, 1, 5, 20}) {
            const auto f = fit_chebyshev(make_constant_kernel(0.8), k);
            const auto& c = f.chebyshev().coeffs;
            CHECK(c.size() == static_cast<std::size_t>(k + 1));
            CHECK(std::abs(c[0] - 0.8) <= 1e-13);
            for (std::size_t j = 1; j < c.size(); ++j) CHECK(std::abs(c[j]) <= 1e-13);
        }
    }
    SUBCASE("1 - lambda is -T_1") {
        const PolyFilter f = fit_chebyshev(make_bf_kernel(), 6);
        const auto& c = f.chebyshev().coeffs;
        for (std::size_t j = 0; j < c.size(); ++j) CHECK(std::abs(c[j] - (j == 1 ? -1.0 : 0.0)) <= 1e-13);
    }
    SUBCASE("degree-5 denoising fit matches the quadrature oracle") {
        const auto h = make_denoise_kernel();
        const auto f = fit_chebyshev(h, 5);
        for (std::size_t j = 0; j < kDenoiseCoeffs5.size(); ++j) {
            CHECK(f.chebyshev().coeffs[j] == doctest::Approx(kDenoiseCoeffs5[j]).epsilon(1e-12));
        }
        CHECK(poly_sup_error(h, f, 10001) == doctest::Approx(kDenoiseSupError[4]).epsilon(1e-9));
    }
    SUBCASE("sup error sweep for 1/(1+lambda^2)") {
        const auto h = make_denoise_kernel();
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 12; ++k) {
            const double e = poly_sup_error(h, fit_chebyshev(h, k), 10001);
            CHECK(e == doctest::Approx(kDenoiseSupError[static_cast<std::size_t>(k - 1)]).epsilon(1e-8));
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }
    SUBCASE("exact for polynomial kernels") {
        for (int k = 0; k <= 8; ++k) {
            const auto h = make_iterated_bf_kernel(k);
            for (int deg = k; deg <= k + 3; ++deg) CHECK(poly_sup_error(h, fit_chebyshev(h, deg), 10001) <= 1e-12);
        }
    }
    SUBCASE("degree zero of 1 - lambda") {
        const auto f = fit_chebyshev(make_bf_kernel(), 0);
        CHECK(std::abs(f.chebyshev().coeffs[0]) <= 1e-15);
        CHECK(poly_sup_error(make_bf_kernel(), f, 10001) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(fit_chebyshev(make_bf_kernel(), -1), std::invalid_argument);
    CHECK_THROWS_AS(poly_sup_error(make_bf_kernel(), fit_chebyshev(make_bf_kernel(), 1), 1), std::invalid_argument);
}

TEST_CASE("sup error is finite and non-increasing in the degree") {
    for (const auto& h : kernel_zoo()) {
        CAPTURE(h.describe());
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 20; ++k) {
            const double e = poly_sup_error(h, fit_chebyshev(h, k), 10001);
            CHECK(std::isfinite(e));
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }
}

// Truncation is not best approximation: adding a degree can raise the sup
// error. Values cross-checked with a 4096-node numpy projection.
TEST_CASE("sup error of a truncated series can grow with the degree") {
    const auto h = make_regularized_kernel(power_penalty(2.0), 1.0);
    const double e1 = poly_sup_error(h, fit_chebyshev(h, 1), 10001);
    const double e2 = poly_sup_error(h, fit_chebyshev(h, 2), 10001);
    CHECK(e1 == doctest::Approx(0.1320154827883585).epsilon(1e-12));
    CHECK(e2 == doctest::Approx(0.13426268004262742).epsilon(1e-12));
    const auto lp = make_sharp_lowpass(0.2, 50.0);
    for (int k = 0; k <= 30; ++k) CHECK(std::isfinite(poly_sup_error(lp, fit_chebyshev(lp, k), 10001)));
}

TEST_CASE("Clenshaw evaluation of a degree-30 series matches 256-bit arithmetic") {
    using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> c(31);
    for (double& v : c) v = dist(rng);
    const PolyFilter f(ChebyshevForm{c});
    for (int i = 0; i <= 1000; ++i) {
        const double lambda = 2.0 * i / 1000;
        const Big t = Big(lambda) - 1;
        Big t_prev = 1, t_cur = t, sum = Big(c[0]) + Big(c[1]) * t;
        for (std::size_t j = 2; j < c.size(); ++j) {
            const Big t_next = 2 * t * t_cur - t_prev;
            sum += Big(c[j]) * t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
        CHECK(std::abs(eval_poly(f, lambda) - sum.convert_to<double>()) <= 1e-9);
    }
}

TEST_CASE("root-form evaluation") {
    const auto lin = make_roots_filter(1.0, {1.0});
    CHECK(eval_poly(lin, 0.0) == 1.0);
    CHECK(eval_poly(lin, 2.0) == -1.0);

    const std::complex<double> r(0.3, 0.8);
    const auto pair = make_roots_filter(2.0, {r, std::conj(r)});
    CHECK(pair.degree() == 2);
    const std::complex<double> direct = 2.0 * (1.0 - r * 1.0) * (1.0 - std::conj(r) * 1.0);
    CHECK(eval_poly(pair, 1.0) == doctest::Approx(direct.real()).epsilon(1e-15));
    CHECK(eval_poly(pair, 1.0) == doctest::Approx(2.0 * (1.0 - 2.0 * 0.3 + (0.09 + 0.64))));

    for (int k : {1, 4, 20}) {
        const auto f = iterated_bf_filter(k);
        const auto h = make_iterated_bf_kernel(k);
        for (int i = 0; i <= 1000; ++i) CHECK(std::abs(f(2.0 * i / 1000) - h(2.0 * i / 1000)) <= 1e-12);
    }
    CHECK_THROWS_AS(eval_poly(lin, 3.0), std::domain_error);
    CHECK_THROWS_AS(make_roots_filter(1.0, {r}), std::invalid_argument);
    CHECK_THROWS_AS(make_roots_filter(1.0, {r, r}), std::invalid_argument);
}

TEST_CASE("roots_to_coeffs") {
    SUBCASE("(1 - lambda)^2") {
        const auto c = roots_to_coeffs(iterated_bf_filter(2));
        REQUIRE(c.is_chebyshev());
        CHECK(eval_poly(c, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(eval_poly(c, 1.0)) <= 1e-15);
    }
    SUBCASE("empty root list is the scale") {
        const auto c = roots_to_coeffs(make_roots_filter(3.0, {}));
        CHECK(c.chebyshev().coeffs == std::vector<double>{3.0});
    }
    SUBCASE("random polynomials agree on a 1001-point grid") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> dist(-1.2, 1.2);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::complex<double>> roots;
            for (int j = 0; j < 6; ++j) roots.emplace_back(dist(rng), 0.0);
            if (trial % 2) {
                const std::complex<double> z(dist(rng), dist(rng));
                roots.push_back(z);
                roots.push_back(std::conj(z));
            }
            const auto f = make_roots_filter(dist(rng), roots);
            const auto c = roots_to_coeffs(f);
            CHECK(c.degree() == f.degree());
            for (int i = 0; i <= 1000; ++i) CHECK(std::abs(c(2.0 * i / 1000) - f(2.0 * i / 1000)) <= 1e-10);
        }
    }
}

TEST_CASE("kernel specifications") {
    SUBCASE("bare names") {
        CHECK(resolve_kernel_argument("denoise").kernel->describe() == "regularized(h_p=lambda, rho=1)");
        CHECK(resolve_kernel_argument("lowpass").kernel->describe() == "sharp-lowpass(cutoff=0.2, steepness=50)");
        const auto bf = resolve_kernel_argument("bf");
        REQUIRE(bf.roots_filter);
        CHECK(bf.roots_filter->degree() == 1);
    }
    SUBCASE("inline pairs") {
        const auto s = resolve_kernel_argument("kind=iterated-bf,k=3");
        CHECK(s.roots_filter->degree() == 3);
        CHECK((*s.kernel)(0.5) == doctest::Approx(0.125));
        const auto r = resolve_kernel_argument("kind=regularized,h_p=lambda^2,rho=1");
        CHECK((*r.kernel)(2.0) == doctest::Approx(1.0 / 17.0));
    }
    SUBCASE("file form with comments, tables and complex roots") {
        const auto path = test::tmp_path("kernel.txt");
        std::ofstream(path) << "# custom response\nkind = tabulated\ntable = 0:1; 1:0.25; 2:0\n";
        const auto t = resolve_kernel_argument(path.string());
        CHECK((*t.kernel)(0.5) == doctest::Approx(0.625));

        const auto roots = parse_kernel_spec("kind = roots\nr0 = 2\nroots = 0.5; 0.25+0.5i\n");
        REQUIRE(roots.roots_filter);
        CHECK_FALSE(roots.kernel);
        CHECK(roots.roots_filter->degree() == 3);
        const double expect = 2.0 * (1 - 0.5) * (1 - 2 * 0.25 + (0.0625 + 0.25));
        CHECK((*roots.roots_filter)(1.0) == doctest::Approx(expect));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(parse_kernel_spec("k = 3\n"), std::invalid_argument);
        CHECK_THROWS_AS(resolve_kernel_argument("nonsense"), std::invalid_argument);
        CHECK_THROWS_AS(resolve_kernel_argument("kind=lowpass,k=3"), std::invalid_argument);
        CHECK_THROWS_AS(resolve_kernel_argument("kind=lowpass,cutoff=abc"), std::invalid_argument);
        CHECK_THROWS_AS(parse_kernel_spec("kind = bf\nkind = bf\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_kernel_spec("kind bf\n"), std::invalid_argument);
    }
}
