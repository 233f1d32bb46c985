#pragma once

#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rnss/engine.hpp"
#include "rnss/transport.hpp"

namespace rnss {

struct PartyIdentity {
    int index = 0;
    double evaluation_point = 0.0;
};

/// What one logical party sees while executing a script.
struct PartyContext {
    PartyIdentity identity;
    Engine& engine;
    std::string output;  // scripts deposit their result (e.g. CSV) here

    Rng& stream(std::string_view label) {
        return engine.party_stream(identity.index, label);
    }
};

using PartyScript = std::function<void(PartyContext&)>;

struct PartyRun {
    int index = 0;
    std::uint64_t io_opens = 0;
    Transcript transcript;
    std::string output;
};

/// Execute all n parties in-process in lockstep rounds over the in-memory
/// bus. Deterministic under a fixed seed. A script throwing at one party
/// converts into ProtocolAbort at the parties left waiting on it.
inline std::vector<PartyRun> run_simulated(const DomainPtr& domain, std::uint64_t global_seed,
                                           const PartyScript& script) {
    const int n = domain->size();
    auto bus = std::make_shared<SimBus>(n);
    std::vector<PartyRun> runs(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        threads.emplace_back([&, i] {
            SimTransport transport(bus, i);
            PartyEngine engine(domain, global_seed, transport);
            PartyContext ctx{{i, domain->point(i)}, engine, {}};
            try {
                script(ctx);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
            transport.leave();
            runs[static_cast<std::size_t>(i)] =
                PartyRun{i, engine.io().opens, engine.transcript(), std::move(ctx.output)};
        });
    }
    for (auto& th : threads) th.join();

    // a script failure is the root cause; aborts at other parties follow from it
    for (const auto& err : errors) {
        if (!err) continue;
        try {
            std::rethrow_exception(err);
        } catch (const ProtocolAbort&) {
            continue;
        } catch (...) {
            std::rethrow_exception(err);
        }
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return runs;
}

}  // namespace rnss
