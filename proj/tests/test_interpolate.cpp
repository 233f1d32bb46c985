#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rnss/interpolate.hpp"
#include "rnss/rng.hpp"

using namespace rnss;

namespace {

// brute-force basis product, independent of the library loop
double basis_oracle(const std::vector<double>& xs, double x, std::size_t j) {
    double out = 1.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (k != j) out *= (x - xs[k]) / (xs[j] - xs[k]);
    return out;
}

}  // namespace

TEST_CASE("lagrange basis reproduces hand values") {
    const std::vector<double> xs{0.0, 1.0, 3.0};
    // (2-1)(2-3) / ((0-1)(0-3)) = -1/3
    CHECK(lagrange_basis(xs, 2.0, 0) == Catch::Approx(-1.0 / 3.0).epsilon(1e-15));

    const std::vector<double> xs2{0.0, 1.0};
    CHECK(lagrange_basis(xs2, 0.0, 0) == 1.0);
}

TEST_CASE("lagrange basis matches brute-force product") {
    const std::vector<double> xs{0.0, 0.5, 0.65, 0.95, 1.4, 2.0};
    for (std::size_t j = 0; j < xs.size(); ++j) {
        CHECK(lagrange_basis(xs, 0.8, j) ==
              Catch::Approx(basis_oracle(xs, 0.8, j)).margin(1e-14));
    }
}

TEST_CASE("duplicate nodes are rejected") {
    const std::vector<double> xs{0.0, 1.0, 1.0};
    CHECK_THROWS_AS(lagrange_basis(xs, 2.0, 0), DegenerateNodes);
    const std::vector<double> ys{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(interpolate_barycentric(xs, ys, 0.5), DegenerateNodes);
}

TEST_CASE("barycentric equals product form away from nodes") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xs, ys;
        const int m = 2 + static_cast<int>(rng.below(6));
        for (int i = 0; i < m; ++i) {
            xs.push_back(0.3 + 0.2 * i + 0.05 * rng.uniform());
            ys.push_back(rng.gaussian(0.0, 10.0));
        }
        const double x = -0.5 + 3.0 * rng.uniform();
        const double a = interpolate_barycentric(xs, ys, x);
        const double b = interpolate_product_form(xs, ys, x);
        CHECK(a == Catch::Approx(b).margin(1e-9 * (1.0 + std::fabs(a))));
    }
}

TEST_CASE("exact node hit returns the node value bit-for-bit") {
    const std::vector<double> xs{0.0, 0.5, 1.1, 1.7};
    const std::vector<double> ys{5.0, -466.5063877128687, 3.25, 0.125};
    for (std::size_t j = 0; j < xs.size(); ++j)
        CHECK(interpolate_barycentric(xs, ys, xs[j]) == ys[j]);
}
