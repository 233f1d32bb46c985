#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "rnss/matrix.hpp"
#include "rnss/shared_matrix.hpp"

namespace rnss {

/// Linear system x_k = A x_{k-1} + B u_k + w_k, z_k = H x_k + v_k with
/// process noise covariance Q and measurement noise covariance R.
struct KalmanModel {
    Matrix A;  // s x s state transition
    Matrix B;  // s x u control input
    Matrix H;  // m x s observation
    Matrix Q;  // s x s process noise covariance
    Matrix R;  // m x m measurement noise covariance

    int state_dim() const { return static_cast<int>(A.rows()); }
    int control_dim() const { return static_cast<int>(B.cols()); }
    int measurement_dim() const { return static_cast<int>(H.rows()); }

    void validate() const {
        const auto s = A.rows();
        if (A.cols() != s || B.rows() != s || H.cols() != s || Q.rows() != s || Q.cols() != s)
            throw DimensionMismatch("inconsistent Kalman model dimensions");
        if (R.rows() != H.rows() || R.cols() != H.rows())
            throw DimensionMismatch("R must be m x m");
        if (!is_symmetric(Q, 1e-9) || !is_symmetric(R, 1e-9))
            throw DimensionMismatch("Q and R must be symmetric");
        for (const Matrix* cov : {&Q, &R}) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(*cov);
            if (es.eigenvalues().minCoeff() < -1e-9)
                throw DimensionMismatch("noise covariances must be positive semidefinite");
        }
    }
};

struct KalmanState {
    Vector x_hat;
    Matrix P;
    int k = 0;
};

/// The 2-state constant-velocity tracker used by the reproduction runs.
inline KalmanModel default_tracking_model() {
    KalmanModel m;
    m.A = Matrix(2, 2);
    m.A << 1.0, 1.0, 0.0, 1.0;
    m.B = Matrix::Zero(2, 1);
    m.H = Matrix(1, 2);
    m.H << 1.0, 0.0;
    m.Q = 0.01 * Matrix::Identity(2, 2);
    m.R = Matrix::Identity(1, 1);
    return m;
}

inline KalmanState initial_state(const KalmanModel& model) {
    KalmanState st;
    st.x_hat = Vector::Zero(model.state_dim());
    st.P = Matrix::Identity(model.state_dim(), model.state_dim());
    st.k = 0;
    return st;
}

/// One plain filter update: predict, gain, correct. P is re-symmetrized
/// after the update.
inline KalmanState plain_step(const KalmanModel& model, const KalmanState& state,
                              const Vector& u, const Vector& z) {
    const Vector x_pred = model.A * state.x_hat + model.B * u;
    const Matrix p_pred = model.A * state.P * model.A.transpose() + model.Q;
    const Matrix s = model.H * p_pred * model.H.transpose() + model.R;
    if (condition_estimate(s) > 1e14)
        throw SingularInnovation("innovation covariance is numerically singular");
    const Matrix gain = p_pred * model.H.transpose() * s.inverse();
    KalmanState out;
    out.x_hat = x_pred + gain * (z - model.H * x_pred);
    out.P = p_pred - gain * model.H * p_pred;
    out.P = 0.5 * (out.P + out.P.transpose());
    out.k = state.k + 1;
    return out;
}

struct KalmanSimulation {
    std::vector<Vector> states;        // x_1 .. x_steps
    std::vector<Vector> measurements;  // z_1 .. z_steps
    std::vector<Vector> controls;      // u_1 .. u_steps (zero by default)
};

namespace kalmandetail {

/// Symmetric PSD square root, tolerant of semidefinite covariances.
inline Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Vector vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = std::sqrt(std::max(vals(i), 0.0));
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

inline Vector gaussian_vector(Rng& rng, const Matrix& sqrt_cov) {
    Vector z(sqrt_cov.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.gaussian(0.0, 1.0);
    return sqrt_cov * z;
}

}  // namespace kalmandetail

/// Evolve the true system and emit noisy measurements.
inline KalmanSimulation simulate(const KalmanModel& model, const Vector& x0, int steps,
                                 Rng& rng) {
    model.validate();
    const Matrix q_sqrt = kalmandetail::psd_sqrt(model.Q);
    const Matrix r_sqrt = kalmandetail::psd_sqrt(model.R);
    KalmanSimulation sim;
    Vector x = x0;
    for (int k = 0; k < steps; ++k) {
        const Vector u = Vector::Zero(model.control_dim());
        x = model.A * x + model.B * u + kalmandetail::gaussian_vector(rng, q_sqrt);
        sim.states.push_back(x);
        sim.measurements.push_back(model.H * x + kalmandetail::gaussian_vector(rng, r_sqrt));
        sim.controls.push_back(u);
    }
    return sim;
}

/// Per-step Euclidean distance between two estimate trajectories.
inline std::vector<double> rse_series(const std::vector<Vector>& private_estimates,
                                      const std::vector<Vector>& plain_estimates) {
    if (private_estimates.size() != plain_estimates.size())
        throw DimensionMismatch("trajectories differ in length");
    std::vector<double> out;
    out.reserve(private_estimates.size());
    for (std::size_t i = 0; i < private_estimates.size(); ++i)
        out.push_back((private_estimates[i] - plain_estimates[i]).norm());
    return out;
}

// ---------------------------------------------------------------------------
// Privacy-preserving filter.

struct SharedKalmanModel {
    SharedMatrix A, B, H, Q, R;
};

struct SharedKalmanState {
    SharedMatrix x_hat;  // s x 1
    SharedMatrix P;      // s x s
    int k = 0;
};

/// Offline material for one private step: twelve multiplication triples in
/// protocol order plus the inversion kit (one triple and the randomness for
/// masking the innovation matrix).
struct KalmanStepTriples {
    std::vector<MatBeaverTriple> mults;
    MatBeaverTriple inv_mult;
    SharedMatrix inv_r;
};

inline SharedKalmanModel share_kalman_model(const KalmanModel& model, const DomainPtr& domain,
                                            const SharingParams& params, Rng& rng) {
    model.validate();
    return {share_matrix(model.A, domain, params, rng), share_matrix(model.B, domain, params, rng),
            share_matrix(model.H, domain, params, rng), share_matrix(model.Q, domain, params, rng),
            share_matrix(model.R, domain, params, rng)};
}

inline SharedKalmanState share_initial_state(const KalmanModel& model, const DomainPtr& domain,
                                             const SharingParams& params, Rng& rng) {
    const KalmanState st = initial_state(model);
    Matrix x(model.state_dim(), 1);
    x.col(0) = st.x_hat;
    return {share_matrix(x, domain, params, rng), share_matrix(st.P, domain, params, rng), 0};
}

/// Triple dimensions are fixed per multiplication site of the protocol:
///   A x, B u, P A', A V, P~ H', H (P~H'), P~ H' (recomputed),
///   (P~H') S^-1, H x~, K y, H P~, K (H P~).
inline KalmanStepTriples dealer_kalman_triples(const KalmanModel& model, const DomainPtr& domain,
                                               const SharingParams& params, double sigma2_r,
                                               Rng& rng) {
    const int s = model.state_dim();
    const int u = model.control_dim();
    const int m = model.measurement_dim();
    const int dims[12][3] = {
        {s, s, 1},  // A x_hat
        {s, u, 1},  // B u
        {s, s, s},  // P A'
        {s, s, s},  // A V
        {s, s, m},  // P~ H'
        {m, s, m},  // H (P~ H')
        {s, s, m},  // P~ H' again, as the protocol box writes it
        {s, m, m},  // (P~ H') S^-1
        {m, s, 1},  // H x~
        {s, m, 1},  // K y
        {m, s, s},  // H P~
        {s, m, s},  // K (H P~)
    };
    KalmanStepTriples out{
        {},
        dealer_matrix_triple(domain, params, sigma2_r, m, m, m, rng),
        dealer_random_matrix(domain, params, sigma2_r, m, m, rng),
    };
    out.mults.reserve(12);
    for (const auto& d : dims)
        out.mults.push_back(dealer_matrix_triple(domain, params, sigma2_r, d[0], d[1], d[2], rng));
    return out;
}

/// One private filter update: twelve Beaver
/// multiplications and one masked inversion, 27 interactive operations,
/// independent of the matrix dimensions. Model matrices, state, control and
/// measurement are all secret shared; nothing plain is opened beyond the
/// masked transcripts.
inline SharedKalmanState private_step(Engine& engine, const SharedKalmanModel& model,
                                      const SharedKalmanState& state, const SharedMatrix& u,
                                      const SharedMatrix& z, KalmanStepTriples& triples) {
    auto& tm = triples.mults;
    if (tm.size() != 12) throw DimensionMismatch("a private step needs 12 triples");

    const SharedMatrix a_t = mat_transpose(model.A);
    const SharedMatrix h_t = mat_transpose(model.H);

    // predict
    SharedMatrix x_pred = mat_add(mat_mult(model.A, state.x_hat, tm[0], engine).shares,
                                  mat_mult(model.B, u, tm[1], engine).shares);
    SharedMatrix v = mat_mult(state.P, a_t, tm[2], engine).shares;
    SharedMatrix p_pred = mat_add(mat_mult(model.A, v, tm[3], engine).shares, model.Q);

    // gain
    SharedMatrix pht = mat_mult(p_pred, h_t, tm[4], engine).shares;
    SharedMatrix s = mat_add(mat_mult(model.H, pht, tm[5], engine).shares, model.R);
    SharedMatrix pht2 = mat_mult(p_pred, h_t, tm[6], engine).shares;
    SharedMatrix s_inv = mat_inv(s, triples.inv_r, triples.inv_mult, engine).shares;
    SharedMatrix gain = mat_mult(pht2, s_inv, tm[7], engine).shares;

    // correct
    SharedMatrix innovation = mat_sub(z, mat_mult(model.H, x_pred, tm[8], engine).shares);
    SharedMatrix x_new = mat_add(x_pred, mat_mult(gain, innovation, tm[9], engine).shares);
    SharedMatrix hp = mat_mult(model.H, p_pred, tm[10], engine).shares;
    SharedMatrix p_new = mat_sub(p_pred, mat_mult(gain, hp, tm[11], engine).shares);

    return {std::move(x_new), std::move(p_new), state.k + 1};
}

}  // namespace rnss
