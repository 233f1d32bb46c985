#pragma once

#include <Eigen/Dense>

#include <limits>

#include "rnss/errors.hpp"

namespace rnss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// 2-norm condition estimate via singular values.
inline double condition_estimate(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("condition estimate needs a square matrix");
    const auto sv = m.jacobiSvd().singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

inline bool is_symmetric(const Matrix& m, double tol) {
    return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace rnss
