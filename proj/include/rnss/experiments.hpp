#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rnss/arith.hpp"
#include "rnss/config.hpp"
#include "rnss/csv.hpp"
#include "rnss/engine.hpp"
#include "rnss/kalman.hpp"
#include "rnss/privacy.hpp"
#include "rnss/runtime.hpp"
#include "rnss/tcp.hpp"

namespace rnss {

// ---------------------------------------------------------------------------
// Accuracy sweep: RSE of recon/add/mult/inv over the sigma2_Y grid.

struct AccuracyRow {
    double sigma2_y = 0.0;
    std::string op;
    double rse_median = 0.0;
    double rse_max = 0.0;
    int trials = 0;
};

namespace expdetail {

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

inline double max_of(const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end());
}

}  // namespace expdetail

inline std::vector<AccuracyRow> accuracy_sweep_rows(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto domain = cfg.domain();
    const double s1 = 5.5, s2 = 34.7;
    std::vector<AccuracyRow> rows;
    const auto sweep = cfg.sweep();
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const double s2y = sweep[i];
        const SharingParams params{0.0, s2y, 0};
        Rng rng(stream_seed(cfg.seed, static_cast<int>(i), "accuracy"));
        DeskEngine engine(domain, stream_seed(cfg.seed, static_cast<int>(i), "accuracy.engine"));
        std::vector<double> rse_recon, rse_add, rse_mult, rse_inv;
        for (int trial = 0; trial < cfg.trials; ++trial) {
            auto sh1 = share(s1, domain, params, rng);
            auto sh2 = share(s2, domain, params, rng);
            rse_recon.push_back(std::fabs(recon(sh1) - s1));
            rse_add.push_back(std::fabs(recon(add(sh1, sh2)) - (s1 + s2)));

            auto triple = dealer_triple(domain, params, rng);
            auto prod = mult(sh1, sh2, triple, engine);
            rse_mult.push_back(std::fabs(recon(prod.shares) - s1 * s2));

            for (int attempt = 0;; ++attempt) {
                auto r = joint_random(engine, s2y > 0 ? s2y : 1.0, params);
                auto inv_triple = dealer_triple(domain, params, rng);
                try {
                    auto res = inv(sh1, r, inv_triple, engine);
                    rse_inv.push_back(std::fabs(recon(res.shares) - 1.0 / s1));
                    break;
                } catch (const SingularMask&) {
                    if (attempt >= 8) throw;  // fresh randomness, try again
                }
            }
        }
        rows.push_back({s2y, "recon", expdetail::median_of(rse_recon),
                        expdetail::max_of(rse_recon), cfg.trials});
        rows.push_back({s2y, "add", expdetail::median_of(rse_add), expdetail::max_of(rse_add),
                        cfg.trials});
        rows.push_back({s2y, "mult", expdetail::median_of(rse_mult),
                        expdetail::max_of(rse_mult), cfg.trials});
        rows.push_back({s2y, "inv", expdetail::median_of(rse_inv), expdetail::max_of(rse_inv),
                        cfg.trials});
    }
    return rows;
}

inline std::string accuracy_sweep_csv(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "sigma2_y,op,rse_median,rse_max,trials\n";
    for (const auto& r : accuracy_sweep_rows(cfg))
        out << format_double(r.sigma2_y) << ',' << r.op << ',' << format_double(r.rse_median)
            << ',' << format_double(r.rse_max) << ',' << r.trials << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Mutual-information sweep: plug-in estimates against worst-case bounds.

struct MiRow {
    double sigma2_y = 0.0;
    std::string quantity;
    double estimate_bits = 0.0;
    double bound_bits = 0.0;
    std::int64_t samples = 0;
};

inline std::vector<MiRow> mi_sweep_rows(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto domain = cfg.domain();
    std::vector<double> observed;
    for (int j = 0; j < domain->threshold(); ++j) observed.push_back(domain->point(j));
    const double sigma2_s = 1.0;  // standard normal secret throughout

    std::vector<MiRow> rows;
    const auto sweep = cfg.sweep();
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const double s2y = sweep[i];
        MiSampleSpec spec{MiQuantity::SingleShare, cfg.samples, sigma2_s, s2y, s2y,
                          stream_seed(cfg.seed, static_cast<int>(i), "mi")};
        rows.push_back({s2y, "single_share", empirical_mi(domain, spec).bits,
                        worst_case_bound(BoundKind::PerShare, domain, sigma2_s, s2y, observed),
                        cfg.samples});
        spec.quantity = MiQuantity::TShares;
        rows.push_back({s2y, "t_shares", empirical_mi(domain, spec).bits,
                        worst_case_bound(BoundKind::TShare, domain, sigma2_s, s2y, observed),
                        cfg.samples});
        spec.quantity = MiQuantity::TSharesPlusMask;
        rows.push_back({s2y, "t_shares_plus_mask", empirical_mi(domain, spec).bits,
                        worst_case_bound(BoundKind::MultTranscript, domain, sigma2_s, s2y,
                                         observed, s2y),
                        cfg.samples});
    }
    return rows;
}

inline std::string mi_sweep_csv(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "sigma2_y,quantity,mi_estimate_bits,mi_bound_bits,N\n";
    for (const auto& r : mi_sweep_rows(cfg))
        out << format_double(r.sigma2_y) << ',' << r.quantity << ','
            << format_double(r.estimate_bits) << ',' << format_double(r.bound_bits) << ','
            << r.samples << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Kalman experiment: plain vs private filtering, any engine.

inline KalmanModel kalman_model_from_config(const ExperimentConfig& cfg) {
    KalmanModel m = default_tracking_model();
    if (!cfg.kalman_a.empty()) m.A = parse_matrix(cfg.kalman_a);
    if (!cfg.kalman_b.empty()) m.B = parse_matrix(cfg.kalman_b);
    if (!cfg.kalman_h.empty()) m.H = parse_matrix(cfg.kalman_h);
    if (!cfg.kalman_q.empty()) m.Q = parse_matrix(cfg.kalman_q);
    if (!cfg.kalman_r.empty()) m.R = parse_matrix(cfg.kalman_r);
    m.validate();
    return m;
}

struct KalmanRow {
    int k = 0;
    double rse = 0.0;
    std::uint64_t io_cumulative = 0;
};

/// Runs the private filter next to the plain one over any engine. Sharings
/// and triples derive from dealer streams of the configured seed, so every
/// party (and every transport) produces identical rows.
inline std::vector<KalmanRow> kalman_experiment_rows(Engine& engine,
                                                     const ExperimentConfig& cfg) {
    const auto domain = engine.domain();
    const KalmanModel model = kalman_model_from_config(cfg);
    const SharingParams params{0.0, cfg.sigma2_y, 0};
    Rng dealer(stream_seed(cfg.seed, -1, "kalman.dealer"));
    Rng simrng(stream_seed(cfg.seed, -1, "kalman.sim"));

    const auto sim = simulate(model, Vector::Zero(model.state_dim()), cfg.steps, simrng);
    KalmanState plain = initial_state(model);
    SharedKalmanModel smodel = share_kalman_model(model, domain, params, dealer);
    SharedKalmanState sstate = share_initial_state(model, domain, params, dealer);

    const std::uint64_t io_start = engine.io().opens;
    std::vector<KalmanRow> rows;
    for (int k = 0; k < cfg.steps; ++k) {
        const Vector& u = sim.controls[static_cast<std::size_t>(k)];
        const Vector& z = sim.measurements[static_cast<std::size_t>(k)];
        plain = plain_step(model, plain, u, z);

        Matrix um(model.control_dim(), 1), zm(model.measurement_dim(), 1);
        um.col(0) = u;
        zm.col(0) = z;
        auto su = share_matrix(um, domain, params, dealer);
        auto sz = share_matrix(zm, domain, params, dealer);
        // masks keep their own spread even when the sharing noise is zero
        const double sigma2_r = cfg.sigma2_y > 0.0 ? cfg.sigma2_y : 1.0;
        auto triples = dealer_kalman_triples(model, domain, params, sigma2_r, dealer);
        sstate = private_step(engine, smodel, sstate, su, sz, triples);

        const Matrix x_priv = recon_matrix(sstate.x_hat);
        rows.push_back({k, (x_priv.col(0) - plain.x_hat).norm(),
                        engine.io().opens - io_start});
    }
    return rows;
}

inline std::string kalman_rows_csv(const std::vector<KalmanRow>& rows) {
    std::ostringstream out;
    out << "k,rse,io_cumulative\n";
    for (const auto& r : rows)
        out << r.k << ',' << format_double(r.rse) << ',' << r.io_cumulative << '\n';
    return out.str();
}

/// Desk-engine run (no transport), used by the plain `kalman` command.
inline std::string kalman_csv_desk(const ExperimentConfig& cfg) {
    cfg.validate();
    DeskEngine engine(cfg.domain(), cfg.seed);
    return kalman_rows_csv(kalman_experiment_rows(engine, cfg));
}

/// Lockstep in-process run over the simulated transport; all parties must
/// emit identical CSV, and party 0's copy is returned.
inline std::string kalman_csv_simulated(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto domain = cfg.domain();
    auto runs = run_simulated(domain, cfg.seed, [&cfg](PartyContext& ctx) {
        ctx.output = kalman_rows_csv(kalman_experiment_rows(ctx.engine, cfg));
    });
    for (const auto& r : runs)
        if (r.output != runs[0].output)
            throw Error("simulated parties disagree on the experiment output");
    return runs[0].output;
}

/// One TCP party running the same experiment; blocks until the mesh run
/// finishes and returns this party's CSV (identical at every party).
inline std::string kalman_csv_tcp(const ExperimentConfig& cfg, int party_index,
                                  int timeout_ms = 15000) {
    cfg.validate();
    const auto domain = cfg.domain();
    if (static_cast<int>(cfg.listen.size()) != domain->size())
        throw ConfigError("listen must name one endpoint per party");
    std::vector<Endpoint> endpoints;
    for (const auto& spec : cfg.listen) endpoints.push_back(parse_endpoint(spec));

    TcpTransport transport(endpoints, party_index, config_hash(cfg), timeout_ms);
    PartyEngine engine(domain, cfg.seed, transport);
    const std::string csv = kalman_rows_csv(kalman_experiment_rows(engine, cfg));
    transport.leave();
    return csv;
}

}  // namespace rnss
