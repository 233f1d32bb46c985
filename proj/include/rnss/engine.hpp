#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rnss/domain.hpp"
#include "rnss/interpolate.hpp"
#include "rnss/rng.hpp"
#include "rnss/sharing.hpp"
#include "rnss/transcript.hpp"
#include "rnss/transport.hpp"

namespace rnss {

enum class OpenMode {
    TPlusOneLowest,  // reconstruct from the t+1 lowest-indexed contributions
    UseAll,          // reconstruct from every gathered contribution
};

/// Execution context for protocol operations. The desk engine runs every
/// logical party in one context (unit tests, sweeps); the party engine runs
/// one party against a transport. Both count interactive operations the same
/// way: one opening, scalar or matrix, is one IO.
class Engine {
public:
    Engine(DomainPtr domain, std::uint64_t global_seed)
        : domain_(std::move(domain)), global_seed_(global_seed) {}
    virtual ~Engine() = default;

    const DomainPtr& domain() const { return domain_; }
    int party_count() const { return domain_->size(); }
    IoCounter& io() { return io_; }
    const IoCounter& io() const { return io_; }
    Transcript& transcript() { return transcript_; }
    const Transcript& transcript() const { return transcript_; }
    std::uint64_t global_seed() const { return global_seed_; }

    OpenMode open_mode() const { return open_mode_; }
    void set_open_mode(OpenMode m) { open_mode_ = m; }

    /// Index of the local party, or -1 for the desk engine.
    virtual int party_index() const = 0;

    /// Open a batch of masked sharings cooperatively. One call is one
    /// interactive operation no matter how many values travel (a matrix
    /// opening is a single IO). Every party receives identical plain values.
    virtual std::vector<double> open_values(const std::vector<const ShareSet*>& masked) = 0;

    double open(const ShareSet& masked) { return open_values({&masked})[0]; }

    /// All-to-all personalized exchange: element j of the argument goes to
    /// party j; the result holds one value per party (own value included).
    /// Not an opening, so the IO counter is untouched. Desk code never needs
    /// it; protocols running on the desk engine take their local path.
    virtual std::vector<double> exchange_personal(const std::vector<double>& per_party) = 0;

    /// Named per-party deterministic stream, seeded from
    /// (global seed, party, label). Party engines only own their own streams.
    Rng& party_stream(int party, std::string_view label) {
        const auto key = std::make_pair(party, std::string(label));
        auto it = streams_.find(key);
        if (it == streams_.end())
            it = streams_.emplace(key, Rng(stream_seed(global_seed_, party, label))).first;
        return it->second;
    }

protected:
    /// Reconstruct one opened value from gathered (index, value) pairs,
    /// ordered by party index.
    double recon_gathered(const std::vector<int>& indices,
                          const std::vector<double>& values) const {
        const std::size_t need = static_cast<std::size_t>(domain_->threshold()) + 1;
        if (indices.size() < need)
            throw InsufficientShares("opening gathered fewer than t+1 shares");
        const std::size_t take =
            open_mode_ == OpenMode::TPlusOneLowest ? need : indices.size();
        std::vector<double> xs(take), ys(take);
        for (std::size_t i = 0; i < take; ++i) {
            xs[i] = domain_->point(indices[i]);
            ys[i] = values[i];
        }
        return interpolate_barycentric(xs, ys, 0.0);
    }

    DomainPtr domain_;
    std::uint64_t global_seed_;
    IoCounter io_;
    Transcript transcript_;
    OpenMode open_mode_ = OpenMode::TPlusOneLowest;
    std::uint32_t round_ = 0;

private:
    std::map<std::pair<int, std::string>, Rng> streams_;
};

/// Single-context engine: all sharings are fully materialized locally.
/// Openings reconstruct directly but still count IOs and append the
/// equivalent broadcast messages to the transcript.
class DeskEngine final : public Engine {
public:
    explicit DeskEngine(DomainPtr domain, std::uint64_t global_seed = 0)
        : Engine(std::move(domain), global_seed) {}

    int party_index() const override { return -1; }

    std::vector<double> open_values(const std::vector<const ShareSet*>& masked) override {
        std::vector<int> contributors;
        for (int i = 0; i < party_count(); ++i) {
            bool all = true;
            for (const ShareSet* s : masked) all = all && s->has(i);
            if (all) contributors.push_back(i);
        }
        // minimal gather: only the t+1 lowest-indexed holders speak
        if (open_mode_ == OpenMode::TPlusOneLowest &&
            contributors.size() > static_cast<std::size_t>(domain_->threshold()) + 1)
            contributors.resize(static_cast<std::size_t>(domain_->threshold()) + 1);
        for (int i : contributors) {
            Frame f{kTagOpen, round_, static_cast<std::uint16_t>(i), {}};
            f.payload.reserve(masked.size());
            for (const ShareSet* s : masked) f.payload.push_back(s->at(i));
            transcript_.record(f);
        }
        std::vector<double> opened;
        opened.reserve(masked.size());
        for (const ShareSet* s : masked) {
            require_same_domain(domain_, s->domain());
            std::vector<double> vals;
            vals.reserve(contributors.size());
            for (int i : contributors) vals.push_back(s->at(i));
            opened.push_back(recon_gathered(contributors, vals));
        }
        io_.opens += 1;
        round_ += 1;
        return opened;
    }

    std::vector<double> exchange_personal(const std::vector<double>&) override {
        throw Error("exchange_personal is a party-engine operation");
    }
};

/// One logical party bound to a transport. Openings broadcast the local
/// contribution, gather one frame per peer, and reconstruct identically at
/// every party.
class PartyEngine final : public Engine {
public:
    PartyEngine(DomainPtr domain, std::uint64_t global_seed, Transport& transport)
        : Engine(std::move(domain), global_seed), transport_(transport) {
        if (transport_.party_count() != party_count())
            throw ConfigError("transport size does not match the domain");
    }

    int party_index() const override { return transport_.self(); }

    std::vector<double> open_values(const std::vector<const ShareSet*>& masked) override {
        const int me = transport_.self();
        // minimal gather: the t+1 lowest-indexed parties contribute, everyone
        // listens; full-gather mode has every party speak
        std::vector<int> contributors;
        const int speakers = open_mode_ == OpenMode::TPlusOneLowest
                                 ? domain_->threshold() + 1
                                 : party_count();
        for (int j = 0; j < speakers; ++j) contributors.push_back(j);

        const bool i_speak = me < speakers;
        Frame mine{kTagOpen, round_, static_cast<std::uint16_t>(me), {}};
        if (i_speak) {
            mine.payload.reserve(masked.size());
            for (const ShareSet* s : masked) {
                require_same_domain(domain_, s->domain());
                if (!s->has(me)) throw Error("local share missing for opening");
                mine.payload.push_back(s->at(me));
            }
            transport_.broadcast(mine);
        }

        std::vector<Frame> frames(static_cast<std::size_t>(speakers));
        if (i_speak) frames[static_cast<std::size_t>(me)] = mine;
        for (int j = 0; j < speakers; ++j) {
            if (j == me) continue;
            Frame f = transport_.receive(j, round_, kTagOpen);
            if (f.payload.size() != masked.size())
                throw Error("opening payload size mismatch");
            frames[static_cast<std::size_t>(j)] = std::move(f);
        }
        for (const Frame& f : frames) transcript_.record(f);

        std::vector<double> opened;
        opened.reserve(masked.size());
        for (std::size_t k = 0; k < masked.size(); ++k) {
            std::vector<double> vals(static_cast<std::size_t>(speakers));
            for (int j = 0; j < speakers; ++j)
                vals[static_cast<std::size_t>(j)] = frames[static_cast<std::size_t>(j)].payload[k];
            opened.push_back(recon_gathered(contributors, vals));
        }
        io_.opens += 1;
        round_ += 1;
        return opened;
    }

    std::vector<double> exchange_personal(const std::vector<double>& per_party) override {
        const int me = transport_.self();
        if (per_party.size() != static_cast<std::size_t>(party_count()))
            throw Error("exchange_personal needs one value per party");
        for (int j = 0; j < party_count(); ++j) {
            if (j == me) continue;
            Frame f{kTagScatter, round_, static_cast<std::uint16_t>(me), {per_party[static_cast<std::size_t>(j)]}};
            transport_.send(j, f);
            transcript_.record(f, static_cast<std::uint16_t>(j));
        }
        std::vector<double> received(static_cast<std::size_t>(party_count()));
        received[static_cast<std::size_t>(me)] = per_party[static_cast<std::size_t>(me)];
        for (int j = 0; j < party_count(); ++j) {
            if (j == me) continue;
            Frame f = transport_.receive(j, round_, kTagScatter);
            if (f.payload.size() != 1) throw Error("scatter payload must hold one value");
            received[static_cast<std::size_t>(j)] = f.payload[0];
            transcript_.record(f, static_cast<std::uint16_t>(me));
        }
        round_ += 1;
        return received;
    }

private:
    Transport& transport_;
};

}  // namespace rnss
