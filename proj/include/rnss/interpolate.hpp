#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rnss/errors.hpp"

namespace rnss {

enum class InterpMethod {
    Barycentric,  // default; better conditioned when evaluating at 0
    ProductForm,  // textbook Lagrange sum, kept as an independent cross-check path
};

inline void require_distinct_nodes(std::span<const double> xs) {
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (xs[i] == xs[j]) throw DegenerateNodes("duplicate interpolation nodes");
}

/// The j'th Lagrange basis polynomial over the nodes xs, evaluated at eval_at:
/// prod_{k != j} (eval_at - xs[k]) / (xs[j] - xs[k]).
inline double lagrange_basis(std::span<const double> xs, double eval_at, std::size_t j) {
    require_distinct_nodes(xs);
    double out = 1.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k == j) continue;
        out *= (eval_at - xs[k]) / (xs[j] - xs[k]);
    }
    return out;
}

/// Interpolating polynomial through (xs[i], ys[i]) evaluated at x via the
/// plain Lagrange sum.
inline double interpolate_product_form(std::span<const double> xs,
                                       std::span<const double> ys, double x) {
    if (xs.size() != ys.size() || xs.empty())
        throw DegenerateNodes("node/value size mismatch");
    require_distinct_nodes(xs);
    double total = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double basis = 1.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k == j) continue;
            basis *= (x - xs[k]) / (xs[j] - xs[k]);
        }
        total += ys[j] * basis;
    }
    return total;
}

/// Barycentric weights w_j = 1 / prod_{k != j} (xs[j] - xs[k]).
inline std::vector<double> barycentric_weights(std::span<const double> xs) {
    require_distinct_nodes(xs);
    std::vector<double> w(xs.size(), 1.0);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k == j) continue;
            w[j] /= (xs[j] - xs[k]);
        }
    }
    return w;
}

/// Second-form barycentric evaluation. An exact node hit returns the node
/// value bit-for-bit, which is what anchors the share/witness identity.
inline double interpolate_barycentric(std::span<const double> xs,
                                      std::span<const double> ys, double x) {
    if (xs.size() != ys.size() || xs.empty())
        throw DegenerateNodes("node/value size mismatch");
    for (std::size_t j = 0; j < xs.size(); ++j)
        if (x == xs[j]) return ys[j];
    const std::vector<double> w = barycentric_weights(xs);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double q = w[j] / (x - xs[j]);
        num += q * ys[j];
        den += q;
    }
    return num / den;
}

inline double interpolate(std::span<const double> xs, std::span<const double> ys,
                          double x, InterpMethod method = InterpMethod::Barycentric) {
    return method == InterpMethod::Barycentric ? interpolate_barycentric(xs, ys, x)
                                               : interpolate_product_form(xs, ys, x);
}

}  // namespace rnss
