#pragma once

#include <cmath>
#include <utility>

#include "rnss/engine.hpp"
#include "rnss/sharing.hpp"

namespace rnss {

namespace detail {

inline void require_same_keys(const ShareSet& a, const ShareSet& b) {
    require_same_domain(a.domain(), b.domain());
    if (a.values().size() != b.values().size())
        throw DomainMismatch("share sets hold different point sets");
    for (const auto& [i, v] : a.values())
        if (!b.has(i)) throw DomainMismatch("share sets hold different point sets");
}

template <typename F>
ShareSet pointwise(const ShareSet& a, const ShareSet& b, F&& f) {
    require_same_keys(a, b);
    ShareSet out(a.domain());
    for (const auto& [i, v] : a.values()) out.set(i, f(v, b.at(i)));
    return out;
}

}  // namespace detail

/// Share-level addition: pointwise, no communication.
inline ShareSet add(const ShareSet& x, const ShareSet& y) {
    return detail::pointwise(x, y, [](double a, double b) { return a + b; });
}

inline ShareSet sub(const ShareSet& x, const ShareSet& y) {
    return detail::pointwise(x, y, [](double a, double b) { return a - b; });
}

inline ShareSet operator+(const ShareSet& x, const ShareSet& y) { return add(x, y); }
inline ShareSet operator-(const ShareSet& x, const ShareSet& y) { return sub(x, y); }

/// Multiplication by a public constant, applied directly to the shares.
inline ShareSet scale(double c, const ShareSet& x) {
    ShareSet out(x.domain());
    for (const auto& [i, v] : x.values()) out.set(i, c * v);
    return out;
}

/// Addition of a public constant: add a noise-free sharing of it, so recon
/// semantics stay uniform with every other operation.
inline ShareSet shift(double c, const ShareSet& x) {
    const ShareSet full = constant_share(c, x.domain());
    ShareSet out(x.domain());
    for (const auto& [i, v] : x.values()) out.set(i, v + full.at(i));
    return out;
}

/// Pre-shared (r1, r2, r1*r2) enabling one Beaver multiplication. Single-use:
/// consuming it twice is a protocol error, never silent.
struct BeaverTriple {
    ShareSet r1;
    ShareSet r2;
    ShareSet r1r2;
    bool used = false;

    BeaverTriple slice(int index) const {
        return {r1.slice(index), r2.slice(index), r1r2.slice(index), used};
    }
};

/// Trusted-dealer triple generation: r1, r2 ~ N(0, sigma2_r), shared with the
/// given sharing params along with their product.
inline BeaverTriple dealer_triple(const DomainPtr& domain, const SharingParams& params,
                                  double sigma2_r, Rng& rng) {
    const double stddev = std::sqrt(sigma2_r);
    const double r1 = rng.gaussian(0.0, stddev);
    const double r2 = rng.gaussian(0.0, stddev);
    return {share(r1, domain, params, rng), share(r2, domain, params, rng),
            share(r1 * r2, domain, params, rng), false};
}

inline BeaverTriple dealer_triple(const DomainPtr& domain, const SharingParams& params,
                                  Rng& rng) {
    return dealer_triple(domain, params, params.sigma2_y, rng);
}

struct MultResult {
    ShareSet shares;
    double d = 0.0;  // opened s - r1
    double e = 0.0;  // opened a - r2
};

/// Beaver multiplication: open d = recon(x - r1) and e = recon(y - r2) (two interactive
/// operations), then locally combine de + d r2[p] + r1[p] e + r1r2[p].
inline MultResult mult(const ShareSet& x, const ShareSet& y, BeaverTriple& triple,
                       Engine& engine) {
    detail::require_same_keys(x, y);
    detail::require_same_keys(x, triple.r1);
    if (triple.used) throw TripleReused("Beaver triple already consumed");
    triple.used = true;

    const double d = engine.open(sub(x, triple.r1));
    const double e = engine.open(sub(y, triple.r2));

    ShareSet out(x.domain());
    for (const auto& [i, unused] : x.values())
        out.set(i, d * e + d * triple.r2.at(i) + triple.r1.at(i) * e + triple.r1r2.at(i));
    return {std::move(out), d, e};
}

/// Joint randomness: every party contributes a hidden Gaussian draw; the
/// result is a sharing of the sum, unknown to any single party. Streams are
/// named so desk and party engines produce bit-identical sharings.
inline ShareSet joint_random(Engine& engine, double sigma2_r, const SharingParams& params) {
    const DomainPtr& domain = engine.domain();
    const double stddev = std::sqrt(sigma2_r);
    const int n = domain->size();

    if (engine.party_index() < 0) {
        ShareSet total(domain);
        for (int i = 0; i < n; ++i) total.set(i, 0.0);
        for (int p = 0; p < n; ++p) {
            Rng& rng = engine.party_stream(p, "jointrand");
            const double rp = rng.gaussian(0.0, stddev);
            total = add(total, share(rp, domain, params, rng));
        }
        return total;
    }

    const int me = engine.party_index();
    Rng& rng = engine.party_stream(me, "jointrand");
    const double rp = rng.gaussian(0.0, stddev);
    const ShareSet mine = share(rp, domain, params, rng);
    std::vector<double> outgoing(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) outgoing[static_cast<std::size_t>(j)] = mine.at(j);
    const std::vector<double> received = engine.exchange_personal(outgoing);

    double sum = 0.0;
    for (double v : received) sum += v;
    ShareSet out(domain);
    out.set(me, sum);
    return out;
}

struct InvResult {
    ShareSet shares;
    double sr = 0.0;  // opened masked product
};

inline constexpr double kDefaultInvEpsilon = 1e-9;

/// Masked inversion: open sr = recon(mult(x, r)) (three interactive operations in
/// total) and output (sr)^-1 r[p]. |sr| below epsilon signals the masked
/// product is numerically unusable; retry with fresh randomness.
inline InvResult inv(const ShareSet& x, const ShareSet& r, BeaverTriple& triple,
                     Engine& engine, double epsilon = kDefaultInvEpsilon) {
    MultResult masked = mult(x, r, triple, engine);
    const double sr = engine.open(masked.shares);
    if (std::fabs(sr) < epsilon)
        throw SingularMask("opened masked product too close to zero");
    ShareSet out(r.domain());
    for (const auto& [i, v] : r.values()) out.set(i, v / sr);
    return {std::move(out), sr};
}

}  // namespace rnss
