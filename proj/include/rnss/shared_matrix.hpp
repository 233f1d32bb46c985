#pragma once

#include <utility>
#include <vector>

#include "rnss/arith.hpp"
#include "rnss/engine.hpp"
#include "rnss/matrix.hpp"
#include "rnss/sharing.hpp"

namespace rnss {

/// A matrix secret-shared entrywise over one common domain; entry (i, j) of
/// the p'th share matrix is the p'th share of entry (i, j) of the plain one.
class SharedMatrix {
public:
    SharedMatrix() = default;
    SharedMatrix(DomainPtr domain, int rows, int cols)
        : domain_(std::move(domain)), rows_(rows), cols_(cols),
          cells_(static_cast<std::size_t>(rows * cols), ShareSet(domain_)) {
        if (rows <= 0 || cols <= 0) throw DimensionMismatch("matrix dims must be positive");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const DomainPtr& domain() const { return domain_; }

    ShareSet& at(int r, int c) { return cells_[index(r, c)]; }
    const ShareSet& at(int r, int c) const { return cells_[index(r, c)]; }

    /// Party indices with a value in every cell (all cells must agree).
    std::vector<int> present() const {
        std::vector<int> out;
        for (const auto& [i, v] : cells_[0].values()) out.push_back(i);
        return out;
    }

    /// The plain matrix of one party's shares.
    Matrix party_view(int party) const {
        Matrix m(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) m(r, c) = at(r, c).at(party);
        return m;
    }

    void set_party_view(int party, const Matrix& m) {
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) at(r, c).set(party, m(r, c));
    }

    SharedMatrix slice(int party) const {
        SharedMatrix out(domain_, rows_, cols_);
        out.set_party_view(party, party_view(party));
        return out;
    }

private:
    std::size_t index(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
            throw DimensionMismatch("matrix index out of range");
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    DomainPtr domain_;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<ShareSet> cells_;
};

inline SharedMatrix share_matrix(const Matrix& plain, const DomainPtr& domain,
                                 const SharingParams& params, Rng& rng) {
    SharedMatrix out(domain, static_cast<int>(plain.rows()), static_cast<int>(plain.cols()));
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c)
            out.at(r, c) = share(plain(r, c), domain, params, rng);
    return out;
}

/// Dealer-side reconstruction of every entry (not an interactive operation).
inline Matrix recon_matrix(const SharedMatrix& sm, ReconMode mode = ReconMode::LowestPoints) {
    Matrix m(sm.rows(), sm.cols());
    for (int r = 0; r < sm.rows(); ++r)
        for (int c = 0; c < sm.cols(); ++c) m(r, c) = recon(sm.at(r, c), mode);
    return m;
}

/// Cooperative opening of a whole shared matrix: one interactive operation.
inline Matrix open_matrix(Engine& engine, const SharedMatrix& sm) {
    std::vector<const ShareSet*> cells;
    cells.reserve(static_cast<std::size_t>(sm.rows() * sm.cols()));
    for (int r = 0; r < sm.rows(); ++r)
        for (int c = 0; c < sm.cols(); ++c) cells.push_back(&sm.at(r, c));
    const std::vector<double> opened = engine.open_values(cells);
    Matrix m(sm.rows(), sm.cols());
    for (int r = 0; r < sm.rows(); ++r)
        for (int c = 0; c < sm.cols(); ++c)
            m(r, c) = opened[static_cast<std::size_t>(r) * static_cast<std::size_t>(sm.cols()) +
                             static_cast<std::size_t>(c)];
    return m;
}

namespace detail {

inline void require_same_shape(const SharedMatrix& a, const SharedMatrix& b) {
    require_same_domain(a.domain(), b.domain());
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("shared matrix shapes differ");
}

template <typename F>
SharedMatrix cellwise(const SharedMatrix& a, const SharedMatrix& b, F&& f) {
    require_same_shape(a, b);
    SharedMatrix out(a.domain(), a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out.at(r, c) = f(a.at(r, c), b.at(r, c));
    return out;
}

}  // namespace detail

inline SharedMatrix mat_add(const SharedMatrix& x, const SharedMatrix& y) {
    return detail::cellwise(x, y, [](const ShareSet& a, const ShareSet& b) { return add(a, b); });
}

inline SharedMatrix mat_sub(const SharedMatrix& x, const SharedMatrix& y) {
    return detail::cellwise(x, y, [](const ShareSet& a, const ShareSet& b) { return sub(a, b); });
}

inline SharedMatrix mat_transpose(const SharedMatrix& x) {
    SharedMatrix out(x.domain(), x.cols(), x.rows());
    for (int r = 0; r < x.rows(); ++r)
        for (int c = 0; c < x.cols(); ++c) out.at(c, r) = x.at(r, c);
    return out;
}

/// Matrix Beaver triple for one (m1 x m2) * (m2 x m3) multiplication.
struct MatBeaverTriple {
    SharedMatrix r1;
    SharedMatrix r2;
    SharedMatrix r1r2;
    bool used = false;

    MatBeaverTriple slice(int party) const {
        return {r1.slice(party), r2.slice(party), r1r2.slice(party), used};
    }
};

inline MatBeaverTriple dealer_matrix_triple(const DomainPtr& domain,
                                            const SharingParams& params, double sigma2_r,
                                            int m1, int m2, int m3, Rng& rng) {
    const double stddev = std::sqrt(sigma2_r);
    Matrix r1(m1, m2), r2(m2, m3);
    for (int r = 0; r < m1; ++r)
        for (int c = 0; c < m2; ++c) r1(r, c) = rng.gaussian(0.0, stddev);
    for (int r = 0; r < m2; ++r)
        for (int c = 0; c < m3; ++c) r2(r, c) = rng.gaussian(0.0, stddev);
    const Matrix r1r2 = r1 * r2;
    return {share_matrix(r1, domain, params, rng), share_matrix(r2, domain, params, rng),
            share_matrix(r1r2, domain, params, rng), false};
}

/// Dealer-side sharing of a fresh Gaussian matrix (inversion randomness).
inline SharedMatrix dealer_random_matrix(const DomainPtr& domain, const SharingParams& params,
                                         double sigma2_r, int rows, int cols, Rng& rng) {
    const double stddev = std::sqrt(sigma2_r);
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian(0.0, stddev);
    return share_matrix(m, domain, params, rng);
}

struct MatMultResult {
    SharedMatrix shares;
    Matrix d;  // opened X - R1
    Matrix e;  // opened Y - R2
};

/// Beaver multiplication with matrix operands: two whole-matrix openings
/// (one IO each), then the local combination with matrix products.
inline MatMultResult mat_mult(const SharedMatrix& x, const SharedMatrix& y,
                              MatBeaverTriple& triple, Engine& engine) {
    require_same_domain(x.domain(), y.domain());
    if (x.cols() != y.rows()) throw DimensionMismatch("matrix product shape mismatch");
    detail::require_same_shape(x, triple.r1);
    detail::require_same_shape(y, triple.r2);
    if (triple.used) throw TripleReused("matrix Beaver triple already consumed");
    triple.used = true;

    const Matrix d = open_matrix(engine, mat_sub(x, triple.r1));
    const Matrix e = open_matrix(engine, mat_sub(y, triple.r2));
    const Matrix de = d * e;

    SharedMatrix out(x.domain(), x.rows(), y.cols());
    for (int p : x.present()) {
        const Matrix r1p = triple.r1.party_view(p);
        const Matrix r2p = triple.r2.party_view(p);
        const Matrix r1r2p = triple.r1r2.party_view(p);
        out.set_party_view(p, de + d * r2p + r1p * e + r1r2p);
    }
    return {std::move(out), d, e};
}

inline constexpr double kDefaultConditionCap = 1e12;

struct MatInvResult {
    SharedMatrix shares;
    Matrix sr;  // opened masked product
};

/// Matrix inversion by masking: open SR = recon(mat_mult(X, R)) and output
/// R[p] (SR)^-1, so the reconstruction is R (SR)^-1 = X^-1. Three interactive
/// operations in total. The smallest singular value generalizes the scalar
/// |sr| < epsilon guard; the condition cap catches unusable openings whose
/// entries are not small.
inline MatInvResult mat_inv(const SharedMatrix& x, const SharedMatrix& r,
                            MatBeaverTriple& triple, Engine& engine,
                            double condition_cap = kDefaultConditionCap,
                            double epsilon = kDefaultInvEpsilon) {
    if (x.rows() != x.cols()) throw DimensionMismatch("mat_inv needs a square matrix");
    MatMultResult masked = mat_mult(x, r, triple, engine);
    const Matrix sr = open_matrix(engine, masked.shares);
    const auto singular_values = sr.jacobiSvd().singularValues();
    const double s_min = singular_values(singular_values.size() - 1);
    if (s_min < epsilon || singular_values(0) > condition_cap * s_min)
        throw SingularMask("opened masked matrix is numerically unusable");
    const Matrix sr_inv = sr.inverse();

    SharedMatrix out(x.domain(), x.rows(), x.cols());
    for (int p : r.present()) out.set_party_view(p, r.party_view(p) * sr_inv);
    return {std::move(out), sr};
}

}  // namespace rnss
