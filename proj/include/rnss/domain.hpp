#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rnss/errors.hpp"

namespace rnss {

/// The public set of n distinct nonzero real evaluation points plus the
/// threshold t. Point 0 is reserved for the secret: f(0) = s. Party i owns
/// points()[i]; the index/point bijection is fixed by construction order.
class EvaluationDomain {
public:
    EvaluationDomain(std::vector<double> points, int threshold)
        : points_(std::move(points)), threshold_(threshold) {
        const int n = static_cast<int>(points_.size());
        if (threshold_ < 1 || threshold_ >= n)
            throw ConfigError("threshold must satisfy 1 <= t < n");
        for (int i = 0; i < n; ++i) {
            if (points_[i] == 0.0)
                throw ConfigError("evaluation point 0 is reserved for the secret");
            for (int j = i + 1; j < n; ++j)
                if (points_[i] == points_[j])
                    throw DegenerateNodes("evaluation points must be distinct");
        }
    }

    int size() const { return static_cast<int>(points_.size()); }
    int threshold() const { return threshold_; }
    const std::vector<double>& points() const { return points_; }
    double point(int index) const { return points_.at(static_cast<std::size_t>(index)); }

    bool operator==(const EvaluationDomain& other) const {
        return threshold_ == other.threshold_ && points_ == other.points_;
    }

private:
    std::vector<double> points_;
    int threshold_;
};

using DomainPtr = std::shared_ptr<const EvaluationDomain>;

inline DomainPtr make_domain(std::vector<double> points, int threshold) {
    return std::make_shared<const EvaluationDomain>(std::move(points), threshold);
}

/// The grid 0.5 + 0.15k used throughout the reproduction experiments.
inline std::vector<double> reference_grid(int n) {
    std::vector<double> pts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pts[static_cast<std::size_t>(k)] = 0.5 + 0.15 * k;
    return pts;
}

inline DomainPtr reference_domain(int n, int threshold) {
    return make_domain(reference_grid(n), threshold);
}

/// Privacy parameters of the sharing noise.
struct SharingParams {
    double mu_y = 0.0;
    double sigma2_y = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (sigma2_y < 0.0) throw ConfigError("sigma2_y must be nonnegative");
    }
};

inline void require_same_domain(const DomainPtr& a, const DomainPtr& b) {
    if (a == b) return;
    if (!a || !b || !(*a == *b)) throw DomainMismatch("operands use different domains");
}

}  // namespace rnss
