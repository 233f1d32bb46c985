#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "rnss/domain.hpp"
#include "rnss/interpolate.hpp"
#include "rnss/rng.hpp"

namespace rnss {

/// Per-party real-valued samples of a sharing polynomial; the ciphertext.
/// Holds the full point set right after share(), a single entry in
/// party-local protocol code, or any subset of size >= t+1 as recon() input.
class ShareSet {
public:
    ShareSet() = default;
    explicit ShareSet(DomainPtr domain) : domain_(std::move(domain)) {}

    const DomainPtr& domain() const { return domain_; }
    const std::map<int, double>& values() const { return values_; }

    bool has(int index) const { return values_.count(index) != 0; }
    double at(int index) const { return values_.at(index); }
    void set(int index, double value) { values_[index] = value; }
    int size() const { return static_cast<int>(values_.size()); }
    bool full() const { return domain_ && size() == domain_->size(); }

    /// The single-entry view a logical party holds of this sharing.
    ShareSet slice(int index) const {
        ShareSet out(domain_);
        out.set(index, at(index));
        return out;
    }

    /// Restrict to a subset of party indices (e.g. a reconstruction set).
    ShareSet subset(const std::vector<int>& indices) const {
        ShareSet out(domain_);
        for (int i : indices) out.set(i, at(i));
        return out;
    }

private:
    DomainPtr domain_;
    std::map<int, double> values_;
};

/// The t anchor pairs (x_j, y_j) drawn by share(). The polynomial passes
/// through them exactly, so shares at these points are pure noise. Exposed
/// for tests and leakage analysis only; protocol code never needs it.
struct AnchorWitness {
    std::vector<int> indices;  // positions of xs within the domain
    std::vector<double> xs;
    std::vector<double> ys;
};

struct ShareResult {
    ShareSet shares;
    AnchorWitness witness;
};

/// Degree-t polynomial through (0, s) and the witness anchors, with
/// barycentric weights precomputed once so repeated evaluation is O(t).
class SharingPolynomial {
public:
    SharingPolynomial(double secret, const std::vector<double>& xs,
                      const std::vector<double>& ys) {
        nodes_.reserve(xs.size() + 1);
        vals_.reserve(xs.size() + 1);
        nodes_.push_back(0.0);
        vals_.push_back(secret);
        nodes_.insert(nodes_.end(), xs.begin(), xs.end());
        vals_.insert(vals_.end(), ys.begin(), ys.end());
        weights_ = barycentric_weights(nodes_);
    }

    double operator()(double x) const {
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            if (x == nodes_[j]) return vals_[j];
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            const double q = weights_[j] / (x - nodes_[j]);
            num += q * vals_[j];
            den += q;
        }
        return num / den;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> vals_;
    std::vector<double> weights_;
};

/// share() with the anchor pairs chosen by the caller. Deterministic; this is
/// the common core of share(), constant sharings and the reproduction tests.
inline ShareResult share_anchored(double secret, const DomainPtr& domain,
                                  std::vector<int> witness_indices,
                                  std::vector<double> ys) {
    AnchorWitness w;
    w.indices = std::move(witness_indices);
    w.ys = std::move(ys);
    w.xs.reserve(w.indices.size());
    for (int i : w.indices) w.xs.push_back(domain->point(i));
    require_distinct_nodes(w.xs);

    const SharingPolynomial f(secret, w.xs, w.ys);
    ShareSet shares(domain);
    for (int i = 0; i < domain->size(); ++i) shares.set(i, f(domain->point(i)));
    return {std::move(shares), std::move(w)};
}

/// Sharing: draw t distinct anchor points uniformly without replacement,
/// draw y_j iid Gaussian(mu_Y, sigma2_Y), interpolate through (0, s) and the
/// anchors, and emit the polynomial value at every domain point.
inline ShareResult share_detailed(double secret, const DomainPtr& domain,
                                  const SharingParams& params, Rng& rng) {
    params.validate();
    const int t = domain->threshold();
    std::vector<int> idx = rng.sample_without_replacement(domain->size(), t);
    std::vector<double> ys(static_cast<std::size_t>(t));
    const double stddev = std::sqrt(params.sigma2_y);
    for (double& y : ys) y = rng.gaussian(params.mu_y, stddev);
    return share_anchored(secret, domain, std::move(idx), std::move(ys));
}

inline ShareResult share_detailed(double secret, const DomainPtr& domain,
                                  const SharingParams& params) {
    Rng rng(params.rng_seed);
    return share_detailed(secret, domain, params, rng);
}

inline ShareSet share(double secret, const DomainPtr& domain,
                      const SharingParams& params, Rng& rng) {
    return share_detailed(secret, domain, params, rng).shares;
}

inline ShareSet share(double secret, const DomainPtr& domain, const SharingParams& params) {
    Rng rng(params.rng_seed);
    return share(secret, domain, params, rng);
}

/// Noise-free sharing of a public constant, anchored at the first t points.
/// Every party can derive it locally, which is what makes shift() a
/// communication-free operation.
inline ShareSet constant_share(double value, const DomainPtr& domain) {
    std::vector<int> idx(static_cast<std::size_t>(domain->threshold()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    return share_anchored(value, domain, std::move(idx),
                          std::vector<double>(idx.size(), 0.0))
        .shares;
}

enum class ReconMode {
    LowestPoints,  // interpolate through the t+1 smallest evaluation points
    UseAll,        // fit a degree-(|T|-1) interpolant through every given share
};

/// Reconstruction: interpolate the given shares and evaluate at 0.
inline double recon(const ShareSet& partial, ReconMode mode = ReconMode::LowestPoints,
                    InterpMethod method = InterpMethod::Barycentric) {
    if (!partial.domain()) throw DomainMismatch("share set has no domain");
    const int needed = partial.domain()->threshold() + 1;
    if (partial.size() < needed)
        throw InsufficientShares("recon needs at least t+1 shares");

    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<std::size_t>(partial.size()));
    for (const auto& [index, value] : partial.values())
        pts.emplace_back(partial.domain()->point(index), value);
    std::sort(pts.begin(), pts.end());

    const std::size_t take =
        mode == ReconMode::LowestPoints ? static_cast<std::size_t>(needed) : pts.size();
    std::vector<double> xs(take);
    std::vector<double> ys(take);
    for (std::size_t i = 0; i < take; ++i) {
        xs[i] = pts[i].first;
        ys[i] = pts[i].second;
    }
    return interpolate(xs, ys, 0.0, method);
}

/// Naive comparison scheme: share at p is s + sum_j c_j p^j with Gaussian
/// coefficients. Kept for the leakage comparison; the witness coefficients
/// are retained for tests.
struct NaiveShareSet {
    ShareSet shares;
    std::vector<double> coefficients;
};

inline NaiveShareSet naive_share(double secret, const DomainPtr& domain,
                                 const SharingParams& params, Rng& rng) {
    params.validate();
    const int t = domain->threshold();
    std::vector<double> coeffs(static_cast<std::size_t>(t));
    const double stddev = std::sqrt(params.sigma2_y);
    for (double& c : coeffs) c = rng.gaussian(0.0, stddev);

    NaiveShareSet out{ShareSet(domain), coeffs};
    for (int i = 0; i < domain->size(); ++i) {
        const double p = domain->point(i);
        double poly = 0.0;  // Horner over c_t .. c_1, then one multiply by p
        for (int j = t - 1; j >= 0; --j) poly = poly * p + coeffs[static_cast<std::size_t>(j)];
        out.shares.set(i, secret + poly * p);
    }
    return out;
}

inline NaiveShareSet naive_share(double secret, const DomainPtr& domain,
                                 const SharingParams& params) {
    Rng rng(params.rng_seed);
    return naive_share(secret, domain, params, rng);
}

}  // namespace rnss
