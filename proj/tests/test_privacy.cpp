#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rnss/privacy.hpp"

using namespace rnss;

namespace {

LeakageModel make_model(DomainPtr domain, double sigma2_s, double sigma2_y,
                        std::vector<double> witness) {
    LeakageModel m{std::move(domain), SharingParams{0.0, sigma2_y, 0}, sigma2_s,
                   std::move(witness)};
    m.validate();
    return m;
}

}  // namespace

TEST_CASE("share-noise variance") {
    auto domain = make_domain({1.0, 2.0, 3.0}, 2);
    auto model = make_model(domain, 1.0, 100.0, {1.0, 3.0});

    // at a witness point the share IS the drawn noise value
    CHECK(sigma2_B(model, 1.0) == Catch::Approx(100.0).margin(1e-9));
    CHECK(sigma2_B(model, 3.0) == Catch::Approx(100.0).margin(1e-9));
    // the 3-point expansion gives weights (1, 1/3)
    CHECK(sigma2_B(model, 2.0) == Catch::Approx(100.0 * (1.0 + 1.0 / 9.0)).margin(1e-9));

    auto zero = make_model(domain, 1.0, 0.0, {1.0, 3.0});
    CHECK(sigma2_B(zero, 2.0) == 0.0);
}

TEST_CASE("single-share bound spot values") {
    auto domain = make_domain({1.0, 2.0, 3.0}, 2);

    // variance ratio 1/100: sigma2_SL0 = 10/9, sigma2_B = 1000/9
    auto model = make_model(domain, 10.0, 100.0, {1.0, 3.0});
    CHECK(per_share_bound(model, 2.0) == Catch::Approx(0.0071776).margin(1e-4));
    CHECK(per_share_bound(model, 2.0) ==
          Catch::Approx(0.5 * std::log2(1.01)).margin(1e-12));

    // witness points leak nothing at all
    CHECK(per_share_bound(model, 1.0) == 0.0);
    CHECK(per_share_bound(model, 3.0) == 0.0);

    // relabeling the witness does not move the bound
    auto permuted = make_model(domain, 10.0, 100.0, {3.0, 1.0});
    CHECK(per_share_bound(permuted, 2.0) == Catch::Approx(per_share_bound(model, 2.0)).margin(1e-15));

    // unit secret variance: 1/2 log2(1 + (1/9)/(100 + 100/9))
    auto unit = make_model(domain, 1.0, 100.0, {1.0, 3.0});
    CHECK(per_share_bound(unit, 2.0) == Catch::Approx(7.21e-4).margin(2e-5));

    // dead noise path with a live signal path diverges
    auto noiseless = make_model(domain, 1.0, 0.0, {1.0, 3.0});
    CHECK(per_share_bound(noiseless, 2.0) == kInfiniteLeak);
}

TEST_CASE("gaussian entropy in bits") {
    CHECK(gaussian_entropy_bits(10.0) == Catch::Approx(3.7080).margin(1e-3));
    CHECK(gaussian_entropy_bits(1.0) == Catch::Approx(2.0471).margin(1e-3));
    constexpr double two_pi_e = 17.079468445347132;
    CHECK(gaussian_entropy_bits(1.0 / two_pi_e) == Catch::Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(gaussian_entropy_bits(0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_entropy_bits(-2.0), std::invalid_argument);
}

TEST_CASE("joint bound: zero at the witness set, determinant lemma elsewhere") {
    auto domain = reference_domain(11, 5);
    const std::vector<double> witness{domain->point(0), domain->point(1), domain->point(3),
                                      domain->point(6), domain->point(10)};
    auto model = make_model(domain, 1.0, 101.0, witness);

    CHECK(t_share_bound(model, witness) == Catch::Approx(0.0).margin(1e-12));

    // rank-1 update identity: det(B + s ll')/det(B) = 1 + s l'B^-1 l
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto widx = rng.sample_without_replacement(11, 5);
        std::vector<double> wx;
        for (int i : widx) wx.push_back(domain->point(i));
        const double s2y = 0.5 + 500.0 * rng.uniform();
        auto m = make_model(domain, 1.0, s2y, wx);
        const auto oidx = rng.sample_without_replacement(11, 5);
        std::vector<double> obs;
        for (int i : oidx) obs.push_back(domain->point(i));

        const double via_det = t_share_bound(m, obs);

        Vector l(5);
        Matrix noise(5, 5);
        for (int i = 0; i < 5; ++i) {
            l(i) = leakdetail::l0(obs[static_cast<std::size_t>(i)], wx);
            for (int k = 0; k < 5; ++k) {
                double acc = 0.0;
                for (std::size_t j = 0; j < wx.size(); ++j)
                    acc += leakdetail::noise_weight(obs[static_cast<std::size_t>(i)], wx, j) *
                           leakdetail::noise_weight(obs[static_cast<std::size_t>(k)], wx, j);
                noise(i, k) = s2y * acc;
            }
        }
        const double quad = l.dot(noise.llt().solve(l));
        const double via_lemma = 0.5 * std::log2(1.0 + quad);
        CHECK(via_det == Catch::Approx(via_lemma).margin(1e-6));

        // eigenvalue relaxation dominates the determinant ratio
        CHECK(t_share_bound(m, obs) <= eigen_bound(m, obs) + 1e-9);
        // a joint observation reveals at least as much as any single one
        for (double p : obs)
            CHECK(t_share_bound(m, obs) + 1e-9 >= per_share_bound(m, p));
    }
}

TEST_CASE("joint bound is monotone nonincreasing in the share-noise variance") {
    auto domain = reference_domain(11, 5);
    const std::vector<double> witness{domain->point(1), domain->point(2), domain->point(4),
                                      domain->point(7), domain->point(9)};
    const std::vector<double> obs{domain->point(0), domain->point(3), domain->point(5),
                                  domain->point(6), domain->point(8)};
    double prev = kInfiniteLeak;
    for (double s2y : {1.0, 2.0, 8.0, 64.0, 1024.0, 1e6}) {
        auto m = make_model(domain, 1.0, s2y, witness);
        const double b = t_share_bound(m, obs);
        CHECK(b <= prev + 1e-12);
        prev = b;
    }
    // asymptotic privacy: the bound can be driven below any delta
    const std::vector<double> first5{domain->point(0), domain->point(1), domain->point(2),
                                     domain->point(3), domain->point(4)};
    CHECK(worst_case_bound(BoundKind::TShare, domain, 1.0, 1e6, first5) < 1e-4);
}

TEST_CASE("transcript bounds") {
    auto domain = reference_domain(11, 5);
    const std::vector<double> witness{domain->point(1), domain->point(2), domain->point(4),
                                      domain->point(7), domain->point(9)};
    const std::vector<double> obs{domain->point(0), domain->point(3), domain->point(5),
                                  domain->point(6), domain->point(8)};
    auto model = make_model(domain, 1.0, 101.0, witness);

    SECTION("an infinite mask reveals nothing beyond the shares") {
        const double with_mask = mult_transcript_bound(model, obs, 1e12);
        CHECK(with_mask == Catch::Approx(t_share_bound(model, obs)).margin(1e-6));
        CHECK(mult_transcript_bound(model, obs, 101.0) >= t_share_bound(model, obs) - 1e-12);
    }

    SECTION("worst-case bounds dominate the reference empirical estimates") {
        // reference estimates at sigma2_Y = 101 observe the first t points:
        // 1.39e-3 (t shares) and 2.12e-3 (t shares plus mask)
        const std::vector<double> first5{domain->point(0), domain->point(1), domain->point(2),
                                         domain->point(3), domain->point(4)};
        CHECK(worst_case_bound(BoundKind::TShare, domain, 1.0, 101.0, first5) > 0.00139);
        CHECK(worst_case_bound(BoundKind::MultTranscript, domain, 1.0, 101.0, first5, 101.0) >
              0.00212);
    }

    SECTION("inversion surrogate: unit secret variance reduces to the share bound") {
        CHECK(inv_transcript_bound(model, obs, 101.0) ==
              Catch::Approx(t_share_bound(model, obs)).margin(1e-12));
        CHECK(inv_transcript_bound(model, obs, 0.0) == kInfiniteLeak);
    }

    SECTION("fixed-witness sampling reproduces the closed forms") {
        // With the witness held fixed the observed joint is exactly the
        // Gaussian the bounds describe, so the plug-in estimate must land on
        // the closed-form value up to estimator noise.
        Rng rng(14);
        const int samples = 200000;
        const double s2y = 101.0;
        CovarianceAccumulator acc_mult(7), acc_inv(7);
        Vector vm(7), vi(7);
        for (int i = 0; i < samples; ++i) {
            const double s = rng.gaussian(0.0, 1.0);
            std::vector<double> ys(witness.size());
            for (double& y : ys) y = rng.gaussian(0.0, std::sqrt(s2y));
            vm(0) = vi(0) = s;
            for (int a = 0; a < 5; ++a) {
                double v = s * leakdetail::l0(obs[static_cast<std::size_t>(a)], witness);
                for (std::size_t j = 0; j < witness.size(); ++j)
                    v += ys[j] * leakdetail::noise_weight(obs[static_cast<std::size_t>(a)],
                                                          witness, j);
                vm(1 + a) = vi(1 + a) = v;
            }
            const double r = rng.gaussian(0.0, std::sqrt(s2y));
            vm(6) = s + r;
            vi(6) = s * r;
            acc_mult.add(vm);
            acc_inv.add(vi);
        }
        const double est_mult = gaussian_plugin_mi_bits(acc_mult.covariance()).bits;
        const double est_inv = gaussian_plugin_mi_bits(acc_inv.covariance()).bits;
        CHECK(est_mult == Catch::Approx(mult_transcript_bound(model, obs, s2y)).margin(3e-3));
        CHECK(est_inv == Catch::Approx(inv_transcript_bound(model, obs, s2y)).margin(3e-3));
    }

    SECTION("moment algebra: SR is uncorrelated with the shares") {
        // sampled second moments back the zero-cross-covariance construction
        Rng rng(6);
        const int samples = 200000;
        double acc_sr_share = 0.0, acc_sr = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double s = rng.gaussian(0.0, 1.0);
            const double r = rng.gaussian(0.0, std::sqrt(101.0));
            double share0 = s * leakdetail::l0(obs[0], witness);
            for (std::size_t j = 0; j < witness.size(); ++j)
                share0 += rng.gaussian(0.0, std::sqrt(101.0)) *
                          leakdetail::noise_weight(obs[0], witness, j);
            acc_sr_share += s * r * share0;
            acc_sr += s * r;
        }
        const double cov = acc_sr_share / samples - (acc_sr / samples) * 0.0;
        CHECK(std::fabs(cov) < 0.5);  // ~3 sigma of the estimator at this N
    }
}

TEST_CASE("eigen bound spot check against closed-form eigenvalues") {
    auto domain = make_domain({1.0, 2.0, 3.0}, 2);
    auto model = make_model(domain, 2.0, 50.0, {1.0, 3.0});
    const std::vector<double> obs{2.0, 3.0};

    // rank-1 signal: top eigenvalue is the trace
    const double l0_a = leakdetail::l0(2.0, model.witness_xs);
    const double l0_b = leakdetail::l0(3.0, model.witness_xs);
    const double max_a = 2.0 * (l0_a * l0_a + l0_b * l0_b);

    // 2x2 noise block: closed-form eigenvalues from trace and determinant
    Matrix noise(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < 2; ++j)
                acc += leakdetail::noise_weight(obs[static_cast<std::size_t>(i)],
                                                model.witness_xs, j) *
                       leakdetail::noise_weight(obs[static_cast<std::size_t>(k)],
                                                model.witness_xs, j);
            noise(i, k) = 50.0 * acc;
        }
    const double tr = noise.trace();
    const double det = noise.determinant();
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    const double max_b = tr / 2.0 + disc;
    const double min_b = tr / 2.0 - disc;

    const double expect = 0.5 * std::log2(max_a / min_b + max_b / min_b);
    CHECK(eigen_bound(model, obs) == Catch::Approx(expect).margin(1e-9));

    // scaling sigma2_Y by c scales both noise eigenvalues by c
    auto scaled = make_model(domain, 2.0, 500.0, {1.0, 3.0});
    const double expect_scaled = 0.5 * std::log2(max_a / (10.0 * min_b) + max_b / min_b);
    CHECK(eigen_bound(scaled, obs) == Catch::Approx(expect_scaled).margin(1e-9));
}

TEST_CASE("naive scheme bounds") {
    const std::vector<double> s2c{100.0, 100.0};
    CHECK(naive_scheme_bound(1.0, s2c, 1.0) == Catch::Approx(3.60e-3).margin(5e-5));
    CHECK(naive_scheme_bound(1.0, s2c, 3.0) == Catch::Approx(8.0e-5).margin(2e-6));
    CHECK(naive_scheme_bound(1.0, s2c, 3.0) < naive_scheme_bound(1.0, s2c, 1.0));
    CHECK(naive_scheme_bound(0.0, s2c, 1.0) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("gaussian plug-in estimator on synthetic data") {
    SECTION("known mutual information of 0.5 bits") {
        // rho^2 = 0.5 gives I = -1/2 log2(1 - rho^2) = 0.5 bits
        Rng rng(12);
        const double rho = std::sqrt(0.5);
        CovarianceAccumulator acc(2);
        Vector v(2);
        for (int i = 0; i < 100000; ++i) {
            const double x = rng.gaussian(0.0, 1.0);
            const double noise = rng.gaussian(0.0, 1.0);
            v(0) = x;
            v(1) = rho * x + std::sqrt(1.0 - rho * rho) * noise;
            acc.add(v);
        }
        const auto est = gaussian_plugin_mi_bits(acc.covariance());
        CHECK_FALSE(est.near_singular);
        CHECK(est.bits == Catch::Approx(0.5).margin(0.02));
    }

    SECTION("independent pair estimates to zero") {
        Rng rng(13);
        CovarianceAccumulator acc(2);
        Vector v(2);
        for (int i = 0; i < 100000; ++i) {
            v(0) = rng.gaussian(0.0, 1.0);
            v(1) = rng.gaussian(0.0, 5.0);
            acc.add(v);
        }
        CHECK(gaussian_plugin_mi_bits(acc.covariance()).bits < 0.01);
    }
}

TEST_CASE("empirical leakage estimates") {
    auto domain = reference_domain(11, 5);

    SECTION("witness shares are independent of the secret") {
        MiSampleSpec spec{MiQuantity::WitnessShare, 100000, 1.0, 1.0, 1.0, 3};
        CHECK(empirical_mi(domain, spec).bits < 0.01);
    }

    SECTION("estimates stay under the worst-case bounds") {
        const std::vector<double> obs{domain->point(0), domain->point(1), domain->point(2),
                                      domain->point(3), domain->point(4)};
        for (double s2y : {1.0, 101.0}) {
            MiSampleSpec spec{MiQuantity::SingleShare, 100000, 1.0, s2y, s2y, 5};
            const double single = empirical_mi(domain, spec).bits;
            spec.quantity = MiQuantity::TShares;
            const double joint = empirical_mi(domain, spec).bits;
            spec.quantity = MiQuantity::TSharesPlusMask;
            const double masked = empirical_mi(domain, spec).bits;

            CHECK(single <=
                  worst_case_bound(BoundKind::PerShare, domain, 1.0, s2y, obs) + 0.01);
            CHECK(joint <= worst_case_bound(BoundKind::TShare, domain, 1.0, s2y, obs) + 0.01);
            CHECK(masked <=
                  worst_case_bound(BoundKind::MultTranscript, domain, 1.0, s2y, obs, s2y) + 0.01);
        }
    }

    SECTION("sample-count guard") {
        MiSampleSpec spec{MiQuantity::SingleShare, 100, 1.0, 1.0, 1.0, 1};
        CHECK_THROWS_AS(empirical_mi(domain, spec), std::invalid_argument);
    }
}

TEST_CASE("leakage report assembles the closed forms") {
    auto domain = reference_domain(11, 5);
    const std::vector<double> witness{domain->point(1), domain->point(2), domain->point(4),
                                      domain->point(7), domain->point(9)};
    auto model = make_model(domain, 1.0, 101.0, witness);
    const std::vector<double> obs{domain->point(0), domain->point(3), domain->point(5),
                                  domain->point(6), domain->point(8)};
    const LeakageReport report = leakage_report(model, obs, 101.0);

    REQUIRE(report.per_share_bound_bits.size() == 11);
    for (double w : witness) CHECK(report.per_share_bound_bits.at(w) == 0.0);
    CHECK(report.t_share_bound_bits == t_share_bound(model, obs));
    CHECK(report.mult_transcript_bound_bits == mult_transcript_bound(model, obs, 101.0));
    CHECK(report.inv_transcript_bound_bits == inv_transcript_bound(model, obs, 101.0));
    CHECK(report.eigen_bound_bits == eigen_bound(model, obs));
    CHECK(report.t_share_bound_bits <= report.eigen_bound_bits);
}

TEST_CASE("leakage model validation") {
    auto domain = make_domain({1.0, 2.0, 3.0}, 2);
    LeakageModel bad_sigma{domain, SharingParams{0.0, 1.0, 0}, 0.0, {1.0, 3.0}};
    CHECK_THROWS_AS(bad_sigma.validate(), std::invalid_argument);
    LeakageModel bad_witness{domain, SharingParams{0.0, 1.0, 0}, 1.0, {1.0, 5.0}};
    CHECK_THROWS_AS(bad_witness.validate(), std::invalid_argument);
    LeakageModel dup{domain, SharingParams{0.0, 1.0, 0}, 1.0, {1.0, 1.0}};
    CHECK_THROWS_AS(dup.validate(), DegenerateNodes);
}
