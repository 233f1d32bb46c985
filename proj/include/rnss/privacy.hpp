#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "rnss/domain.hpp"
#include "rnss/matrix.hpp"
#include "rnss/rng.hpp"
#include "rnss/sharing.hpp"

namespace rnss {

// Mutual information is reported in bits (log base 2) everywhere. Quantities
// that diverge (zero noise against a live signal path) return the infinity
// marker rather than throwing: the caller decides what an unbounded leak
// means for it.
inline constexpr double kInfiniteLeak = std::numeric_limits<double>::infinity();

/// Everything the closed-form leakage bounds condition on: the domain, the
/// share-noise variance, the secret variance and one fixed witness draw.
/// The L_j values are treated as constants given the witness; worst cases
/// are taken by maximizing over witness draws (see worst_case_* below).
struct LeakageModel {
    DomainPtr domain;
    SharingParams params;
    double sigma2_s = 1.0;
    std::vector<double> witness_xs;

    void validate() const {
        if (sigma2_s <= 0.0) throw std::invalid_argument("sigma2_s must be positive");
        params.validate();
        require_distinct_nodes(witness_xs);
        for (double x : witness_xs) {
            bool found = false;
            for (double p : domain->points()) found = found || (p == x);
            if (!found) throw std::invalid_argument("witness point outside the domain");
        }
    }
};

namespace leakdetail {

/// Basis of the secret node 0 among nodes {0} ∪ witness, evaluated at p.
inline double l0(double p, std::span<const double> xs) {
    double out = 1.0;
    for (double xj : xs) out *= (p - xj) / (0.0 - xj);
    return out;
}

/// Coefficient of y_j in the share at p: (p/x_j) L_j(p) with L_j over the
/// witness nodes only.
inline double noise_weight(double p, std::span<const double> xs, std::size_t j) {
    double out = p / xs[j];
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k == j) continue;
        out *= (p - xs[k]) / (xs[j] - xs[k]);
    }
    return out;
}

struct CovBlocks {
    Matrix signal;  // sigma2_s * l l^T, rank one
    Matrix noise;   // sigma2_y * W W^T
    Vector l;
};

inline CovBlocks cov_blocks(const LeakageModel& model, std::span<const double> points) {
    const auto m = static_cast<Eigen::Index>(points.size());
    const auto t = static_cast<Eigen::Index>(model.witness_xs.size());
    Vector l(m);
    Matrix w(m, t);
    for (Eigen::Index i = 0; i < m; ++i) {
        l(i) = l0(points[static_cast<std::size_t>(i)], model.witness_xs);
        for (Eigen::Index j = 0; j < t; ++j)
            w(i, j) = noise_weight(points[static_cast<std::size_t>(i)], model.witness_xs,
                                   static_cast<std::size_t>(j));
    }
    return {model.sigma2_s * (l * l.transpose()), model.params.sigma2_y * (w * w.transpose()),
            std::move(l)};
}

inline double det_ratio_bits(const Matrix& numerator, const Matrix& denominator) {
    const double dd = denominator.determinant();
    if (!(dd > 0.0)) return kInfiniteLeak;
    const double dn = numerator.determinant();
    const double ratio = dn / dd;
    // the numerator exceeds the denominator by a PSD term, so ratio >= 1 up
    // to rounding
    return 0.5 * std::log2(std::max(ratio, 1.0));
}

}  // namespace leakdetail

/// Variance of the share noise B(p) = sum_j y_j (p/x_j) L_j(p). At a witness
/// point this collapses to sigma2_y itself (B(x_k) = y_k).
inline double sigma2_B(const LeakageModel& model, double p) {
    double sum = 0.0;
    for (std::size_t j = 0; j < model.witness_xs.size(); ++j) {
        const double w = leakdetail::noise_weight(p, model.witness_xs, j);
        sum += w * w;
    }
    return model.params.sigma2_y * sum;
}

/// h(X) = 1/2 log2(2 pi e sigma2) for Gaussian X.
inline double gaussian_entropy_bits(double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("entropy needs positive variance");
    constexpr double two_pi_e = 17.079468445347132;
    return 0.5 * std::log2(two_pi_e * sigma2);
}

/// Upper bound on I(S; S[p]) for one share at p, conditional on the witness:
/// 1/2 log2(1 + sigma2_{S L0(p)} / sigma2_{B(p)}). Exactly 0 at witness
/// points; the infinity marker when the noise path is dead but the signal
/// path is not.
inline double per_share_bound(const LeakageModel& model, double p) {
    const double l0 = leakdetail::l0(p, model.witness_xs);
    if (l0 == 0.0) return 0.0;
    const double noise = sigma2_B(model, p);
    if (noise == 0.0) return kInfiniteLeak;
    return 0.5 * std::log2(1.0 + l0 * l0 * model.sigma2_s / noise);
}

/// Upper bound on I(S; shares at the given points), |points| <= t:
/// 1/2 log2(det(C_signal + C_noise) / det(C_noise)).
inline double t_share_bound(const LeakageModel& model, std::span<const double> points) {
    if (points.size() > model.witness_xs.size())
        throw std::invalid_argument("joint bound takes at most t points");
    const auto blocks = leakdetail::cov_blocks(model, points);
    return leakdetail::det_ratio_bits(blocks.signal + blocks.noise, blocks.noise);
}

/// Joint bound with the multiplication transcript appended: the observed
/// vector is (shares..., S + R1); cov(S + R1, share_i) = sigma2_s L0(i),
/// var = sigma2_s + mask_sigma2, and the conditional side gains a diagonal
/// mask_sigma2 block.
inline double mult_transcript_bound(const LeakageModel& model, std::span<const double> points,
                                    double mask_sigma2) {
    if (mask_sigma2 <= 0.0) return kInfiniteLeak;
    const auto blocks = leakdetail::cov_blocks(model, points);
    const auto m = static_cast<Eigen::Index>(points.size());
    Matrix num = Matrix::Zero(m + 1, m + 1);
    Matrix den = Matrix::Zero(m + 1, m + 1);
    num.topLeftCorner(m, m) = blocks.signal + blocks.noise;
    num.block(0, m, m, 1) = model.sigma2_s * blocks.l;
    num.block(m, 0, 1, m) = model.sigma2_s * blocks.l.transpose();
    num(m, m) = model.sigma2_s + mask_sigma2;
    den.topLeftCorner(m, m) = blocks.noise;
    den(m, m) = mask_sigma2;
    return leakdetail::det_ratio_bits(num, den);
}

/// Joint bound with the opened inversion product appended. SR is not
/// Gaussian; the maximum-entropy surrogate keeps only its second moments:
/// var(SR) = sigma2_s * sigma2_r and cov(SR, share_i) = 0 for zero-mean
/// independent S and R, while the conditional side carries var(R).
inline double inv_transcript_bound(const LeakageModel& model, std::span<const double> points,
                                   double mask_sigma2) {
    if (mask_sigma2 <= 0.0) return kInfiniteLeak;  // degenerate mask: s revealed
    const auto blocks = leakdetail::cov_blocks(model, points);
    const auto m = static_cast<Eigen::Index>(points.size());
    Matrix num = Matrix::Zero(m + 1, m + 1);
    Matrix den = Matrix::Zero(m + 1, m + 1);
    num.topLeftCorner(m, m) = blocks.signal + blocks.noise;
    num(m, m) = model.sigma2_s * mask_sigma2;
    den.topLeftCorner(m, m) = blocks.noise;
    den(m, m) = mask_sigma2;
    return leakdetail::det_ratio_bits(num, den);
}

/// Eigenvalue relaxation of the determinant ratio:
/// 1/2 log2(max_eig(A)/min_eig(B) + max_eig(B)/min_eig(B)). Always at least
/// the determinant-ratio bound on the same inputs.
inline double eigen_bound(const LeakageModel& model, std::span<const double> points) {
    const auto blocks = leakdetail::cov_blocks(model, points);
    Eigen::SelfAdjointEigenSolver<Matrix> ea(blocks.signal);
    Eigen::SelfAdjointEigenSolver<Matrix> eb(blocks.noise);
    const double max_a = ea.eigenvalues().maxCoeff();
    const double max_b = eb.eigenvalues().maxCoeff();
    const double min_b = eb.eigenvalues().minCoeff();
    if (!(min_b > 0.0)) return kInfiniteLeak;
    return 0.5 * std::log2(max_a / min_b + max_b / min_b);
}

/// Leakage of the naive coefficient scheme at point p:
/// 1/2 log2(1 + sigma2_s / sum_j p^{2j} sigma2_{c_j}), decreasing in |p|.
inline double naive_scheme_bound(double sigma2_s, std::span<const double> sigma2_c, double p) {
    double denom = 0.0;
    double pw = 1.0;
    for (double s2 : sigma2_c) {
        pw *= p * p;
        denom += pw * s2;
    }
    if (denom == 0.0) return sigma2_s == 0.0 ? 0.0 : kInfiniteLeak;
    return 0.5 * std::log2(1.0 + sigma2_s / denom);
}

// ---------------------------------------------------------------------------
// Worst case over witness draws.

namespace leakdetail {

/// Visit size-t index subsets of [0, n): all of them when C(n, t) stays
/// within budget, otherwise a seeded random sample of that many.
template <typename Visit>
void for_each_witness(int n, int t, std::size_t budget, std::uint64_t seed, Visit&& visit) {
    double count = 1.0;
    for (int i = 0; i < t; ++i) count *= double(n - i) / double(i + 1);
    if (count <= double(budget)) {
        std::vector<int> idx(static_cast<std::size_t>(t));
        for (int i = 0; i < t; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (;;) {
            visit(idx);
            int pos = t - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - t + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int q = pos + 1; q < t; ++q)
                idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
        }
        return;
    }
    Rng rng(seed);
    for (std::size_t k = 0; k < budget; ++k) {
        auto idx = rng.sample_without_replacement(n, t);
        std::sort(idx.begin(), idx.end());
        visit(idx);
    }
}

}  // namespace leakdetail

enum class BoundKind { PerShare, TShare, MultTranscript, InvTranscript, Eigen };

/// Maximum of a closed-form bound over witness draws (exhaustive for small
/// n-choose-t, sampled beyond the budget). `points` is the observed set; for
/// PerShare only points[0] is used.
inline double worst_case_bound(BoundKind kind, const DomainPtr& domain, double sigma2_s,
                               double sigma2_y, std::span<const double> points,
                               double mask_sigma2 = 0.0, std::size_t budget = 20000,
                               std::uint64_t seed = 1) {
    LeakageModel model{domain, SharingParams{0.0, sigma2_y, 0}, sigma2_s, {}};
    double worst = 0.0;
    leakdetail::for_each_witness(
        domain->size(), domain->threshold(), budget, seed, [&](const std::vector<int>& idx) {
            model.witness_xs.clear();
            for (int i : idx) model.witness_xs.push_back(domain->point(i));
            double b = 0.0;
            switch (kind) {
                case BoundKind::PerShare: b = per_share_bound(model, points[0]); break;
                case BoundKind::TShare: b = t_share_bound(model, points); break;
                case BoundKind::MultTranscript:
                    b = mult_transcript_bound(model, points, mask_sigma2);
                    break;
                case BoundKind::InvTranscript:
                    b = inv_transcript_bound(model, points, mask_sigma2);
                    break;
                case BoundKind::Eigen: b = eigen_bound(model, points); break;
            }
            if (b > worst) worst = b;
        });
    return worst;
}

// ---------------------------------------------------------------------------
// Empirical estimation.

/// Streaming mean/outer-product accumulator for the Gaussian plug-in.
class CovarianceAccumulator {
public:
    explicit CovarianceAccumulator(Eigen::Index dim)
        : sum_(Vector::Zero(dim)), outer_(Matrix::Zero(dim, dim)), count_(0) {}

    void add(const Vector& x) {
        sum_ += x;
        outer_ += x * x.transpose();
        count_ += 1;
    }

    std::int64_t count() const { return count_; }

    Matrix covariance() const {
        const double n = static_cast<double>(count_);
        const Vector mean = sum_ / n;
        return outer_ / n - mean * mean.transpose();
    }

private:
    Vector sum_;
    Matrix outer_;
    std::int64_t count_;
};

struct MiEstimate {
    double bits = 0.0;
    bool near_singular = false;  // sample covariance was numerically fragile
};

/// Gaussian plug-in mutual information between coordinate 0 and the rest of
/// the joint sample covariance: 1/2 log2(det C_X det C_Y / det C_XY).
inline MiEstimate gaussian_plugin_mi_bits(const Matrix& joint_cov) {
    const Eigen::Index d = joint_cov.rows();
    const double det_x = joint_cov(0, 0);
    const double det_y = joint_cov.bottomRightCorner(d - 1, d - 1).determinant();
    const double det_xy = joint_cov.determinant();
    MiEstimate out;
    if (!(det_xy > 0.0) || !(det_y > 0.0) || !(det_x > 0.0)) {
        out.near_singular = true;
        out.bits = kInfiniteLeak;
        return out;
    }
    const double ratio = det_x * det_y / det_xy;
    out.bits = 0.5 * std::log2(std::max(ratio, 1.0));
    out.near_singular = det_xy < 1e-12 * det_x * det_y;
    return out;
}

enum class MiQuantity {
    SingleShare,      // (S, S[p0])
    TShares,          // (S, S[p0..p_{t-1}])
    TSharesPlusMask,  // (S, S[p0..], S + R1)
    WitnessShare,     // (S, the share at the first witness point of each draw)
};

struct MiSampleSpec {
    MiQuantity quantity = MiQuantity::SingleShare;
    std::int64_t sample_count = 100000;
    double sigma2_s = 1.0;
    double sigma2_y = 1.0;
    double mask_sigma2 = 1.0;
    std::uint64_t seed = 1;
};

/// Monte-Carlo estimate of the leakage: draw N secrets, share each with a
/// fresh witness, assemble the requested joint vector and apply the Gaussian
/// plug-in to its sample covariance.
inline MiEstimate empirical_mi(const DomainPtr& domain, const MiSampleSpec& spec) {
    if (spec.sample_count < 10000)
        throw std::invalid_argument("empirical_mi needs at least 1e4 samples");
    const int t = domain->threshold();
    Eigen::Index dim = 2;
    if (spec.quantity == MiQuantity::TShares) dim = 1 + t;
    if (spec.quantity == MiQuantity::TSharesPlusMask) dim = 2 + t;

    Rng rng(spec.seed);
    const SharingParams params{0.0, spec.sigma2_y, 0};
    CovarianceAccumulator acc(dim);
    Vector v(dim);
    const double s_std = std::sqrt(spec.sigma2_s);
    const double mask_std = std::sqrt(spec.mask_sigma2);
    for (std::int64_t i = 0; i < spec.sample_count; ++i) {
        const double s = rng.gaussian(0.0, s_std);
        const auto result = share_detailed(s, domain, params, rng);
        v(0) = s;
        switch (spec.quantity) {
            case MiQuantity::SingleShare: v(1) = result.shares.at(0); break;
            case MiQuantity::WitnessShare: v(1) = result.shares.at(result.witness.indices[0]); break;
            case MiQuantity::TSharesPlusMask:
                v(1 + t) = s + rng.gaussian(0.0, mask_std);
                [[fallthrough]];
            case MiQuantity::TShares:
                for (int j = 0; j < t; ++j) v(1 + j) = result.shares.at(j);
                break;
        }
        acc.add(v);
    }
    return gaussian_plugin_mi_bits(acc.covariance());
}

/// Closed-form bounds for one parameter set, as surfaced by the sweep CLI.
struct LeakageReport {
    std::map<double, double> per_share_bound_bits;  // keyed by evaluation point
    double t_share_bound_bits = 0.0;
    double mult_transcript_bound_bits = 0.0;
    double inv_transcript_bound_bits = 0.0;
    double eigen_bound_bits = 0.0;
};

inline LeakageReport leakage_report(const LeakageModel& model, std::span<const double> points,
                                    double mask_sigma2) {
    LeakageReport report;
    for (double p : model.domain->points())
        report.per_share_bound_bits[p] = per_share_bound(model, p);
    report.t_share_bound_bits = t_share_bound(model, points);
    report.mult_transcript_bound_bits = mult_transcript_bound(model, points, mask_sigma2);
    report.inv_transcript_bound_bits = inv_transcript_bound(model, points, mask_sigma2);
    report.eigen_bound_bits = eigen_bound(model, points);
    return report;
}

}  // namespace rnss
