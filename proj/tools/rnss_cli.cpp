// Experiment driver for the real-number secret sharing library: figure
// reproduction sweeps as CSV, ad-hoc share/recon/ops demos over the
// simulated runtime, and the networked party launcher.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

#include "rnss/experiments.hpp"

namespace {

using namespace rnss;

struct CliOptions {
    ExperimentConfig cfg;
    std::string config_path;
    std::string transport = "sim";
    std::string sweep_spec;
    std::string points_spec;
    int party = -1;
    double secret = 5.0;
    double secret2 = 34.7;
};

void emit(const ExperimentConfig& cfg, const std::string& csv) {
    if (cfg.out.empty()) {
        std::cout << csv;
    } else {
        write_file(cfg.out, csv);
        std::cerr << "wrote " << cfg.out << "\n";
    }
}

std::string describe_shares(const ShareSet& shares) {
    std::ostringstream out;
    for (const auto& [index, value] : shares.values())
        out << "  p=" << format_double(shares.domain()->point(index)) << "  share="
            << format_double(value) << "\n";
    return out.str();
}

int run_demo(const std::string& op, const CliOptions& opt) {
    const auto domain = opt.cfg.domain();
    const SharingParams params{0.0, opt.cfg.sigma2_y, 0};
    const double a = opt.secret;
    const double b = opt.secret2;

    if (op == "share" || op == "recon") {
        Rng rng(stream_seed(opt.cfg.seed, -1, "demo"));
        auto shares = share(a, domain, params, rng);
        std::cout << "secret " << format_double(a) << " over n=" << domain->size()
                  << ", t=" << domain->threshold() << "\n"
                  << describe_shares(shares);
        if (op == "recon")
            std::cout << "recon(t+1 lowest) = " << format_double(recon(shares)) << "\n"
                      << "recon(all shares) = "
                      << format_double(recon(shares, ReconMode::UseAll)) << "\n";
        return 0;
    }

    auto runs = run_simulated(domain, opt.cfg.seed, [&](PartyContext& ctx) {
        const int me = ctx.identity.index;
        Rng dealer(stream_seed(opt.cfg.seed, -1, "demo.dealer"));
        std::ostringstream out;
        auto sa = share(a, domain, params, dealer).slice(me);
        auto sb = share(b, domain, params, dealer).slice(me);
        if (op == "add") {
            const double sum = ctx.engine.open(add(sa, sb));
            out << "opened a+b = " << format_double(sum) << "\n";
        } else if (op == "mult") {
            auto triple = dealer_triple(domain, params, dealer).slice(me);
            auto res = mult(sa, sb, triple, ctx.engine);
            out << "opened d = " << format_double(res.d) << "\n"
                << "opened e = " << format_double(res.e) << "\n"
                << "opened a*b = " << format_double(ctx.engine.open(res.shares)) << "\n";
        } else if (op == "inv") {
            auto triple = dealer_triple(domain, params, dealer).slice(me);
            auto r = joint_random(ctx.engine, opt.cfg.sigma2_y, params);
            auto res = inv(sa, r, triple, ctx.engine);
            out << "opened s*r = " << format_double(res.sr) << "\n"
                << "opened 1/a = " << format_double(ctx.engine.open(res.shares)) << "\n";
        }
        out << "interactive operations: " << ctx.engine.io().opens << "\n";
        ctx.output = out.str();
    });
    std::cout << "secrets: a=" << format_double(a) << " b=" << format_double(b) << "\n"
              << runs[0].output;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"real-number secret sharing: experiments and demos"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "key=value configuration file");
    app.add_option("--n", opt.cfg.n, "number of parties");
    app.add_option("--t", opt.cfg.t, "threshold");
    app.add_option("--points", opt.points_spec, "comma list of evaluation points");
    app.add_option("--sigma2-y", opt.sweep_spec,
                   "share-noise variance: value, comma list, or start:stop:count (log spaced)");
    app.add_option("--trials", opt.cfg.trials, "trials per sweep point");
    app.add_option("--samples", opt.cfg.samples, "Monte-Carlo sample count");
    app.add_option("--seed", opt.cfg.seed, "global seed");
    app.add_option("--steps", opt.cfg.steps, "Kalman steps");
    app.add_option("--out", opt.cfg.out, "output CSV path (default stdout)");
    app.add_option("--transport", opt.transport, "sim or tcp")
        ->check(CLI::IsMember({"sim", "desk", "tcp"}));
    app.add_option("--party", opt.party, "party index for tcp runs");

    auto* acc = app.add_subcommand("accuracy-sweep", "RSE of recon/add/mult/inv vs sigma2_Y");
    auto* mi = app.add_subcommand("mi-sweep", "mutual-information estimates and bounds");
    auto* kal = app.add_subcommand("kalman", "private vs plain Kalman filtering");
    auto* demo = app.add_subcommand("demo", "one-shot operations over the simulated runtime");
    acc->fallthrough();
    mi->fallthrough();
    kal->fallthrough();
    demo->fallthrough();
    std::string demo_op;
    demo->add_option("op", demo_op, "share|recon|add|mult|inv")
        ->required()
        ->check(CLI::IsMember({"share", "recon", "add", "mult", "inv"}));
    demo->add_option("--secret", opt.secret, "first secret");
    demo->add_option("--secret2", opt.secret2, "second secret");
    auto* serve = app.add_subcommand("serve", "run one TCP party of the configured experiment");
    serve->fallthrough();

    try {
        app.parse(argc, argv);

        if (!opt.config_path.empty()) {
            const ExperimentConfig from_file = load_config_file(opt.config_path);
            const ExperimentConfig defaults;
            ExperimentConfig merged = from_file;
            // explicit flags win over the file
            if (app.count("--n")) merged.n = opt.cfg.n;
            if (app.count("--t")) merged.t = opt.cfg.t;
            if (app.count("--trials")) merged.trials = opt.cfg.trials;
            if (app.count("--samples")) merged.samples = opt.cfg.samples;
            if (app.count("--seed")) merged.seed = opt.cfg.seed;
            if (app.count("--steps")) merged.steps = opt.cfg.steps;
            if (app.count("--out")) merged.out = opt.cfg.out;
            opt.cfg = merged;
        }
        if (!opt.points_spec.empty()) {
            opt.cfg.points.clear();
            for (const auto& p : parse_sweep_spec(opt.points_spec))
                opt.cfg.points.push_back(p);
        }
        if (!opt.sweep_spec.empty()) {
            opt.cfg.sigma2_sweep = parse_sweep_spec(opt.sweep_spec);
            opt.cfg.sigma2_y = opt.cfg.sigma2_sweep.front();
        }

        if (*acc) {
            emit(opt.cfg, accuracy_sweep_csv(opt.cfg));
        } else if (*mi) {
            emit(opt.cfg, mi_sweep_csv(opt.cfg));
        } else if (*kal) {
            // the reference filtering configuration unless overridden
            if (!app.count("--n") && opt.config_path.empty()) opt.cfg.n = 3;
            if (!app.count("--t") && opt.config_path.empty()) opt.cfg.t = 1;
            if (!app.count("--sigma2-y") && opt.config_path.empty()) opt.cfg.sigma2_y = 1000.0;
            if (opt.transport == "tcp") {
                if (opt.party < 0) throw ConfigError("tcp transport needs --party");
                emit(opt.cfg, kalman_csv_tcp(opt.cfg, opt.party));
            } else if (opt.transport == "sim") {
                emit(opt.cfg, kalman_csv_simulated(opt.cfg));
            } else {
                emit(opt.cfg, kalman_csv_desk(opt.cfg));
            }
        } else if (*demo) {
            return run_demo(demo_op, opt);
        } else if (*serve) {
            if (opt.party < 0) throw ConfigError("serve needs --party");
            if (opt.cfg.experiment != "kalman")
                throw ConfigError("unknown experiment '" + opt.cfg.experiment + "'");
            emit(opt.cfg, kalman_csv_tcp(opt.cfg, opt.party));
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    } catch (const ConfigMismatch& e) {
        std::cerr << "configuration mismatch: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const ProtocolAbort& e) {
        std::cerr << "protocol abort: " << e.what();
        if (!e.missing.empty()) {
            std::cerr << " (round " << e.round << ", missing parties:";
            for (int i : e.missing) std::cerr << ' ' << i;
            std::cerr << ")";
        }
        std::cerr << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
