#include "commands.hpp"

#include "mismatchlab/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = mismatchlab::cli;

int main(int argc, char** argv) {
    CLI::App app{"Mismatched rank-one matrix estimation: asymptotic formulas, phase diagrams and finite-n simulation."};
    app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
    app.require_subcommand(1);

    cli::RunConfig cfg;
    std::vector<std::string> grid_specs;

    app.add_option("--sigma", cfg.params.sigma, "true prior standard deviation")->capture_default_str();
    app.add_option("--sigma-p,--sigma_p", cfg.params.sigma_p, "assumed prior standard deviation")->capture_default_str();
    app.add_option("--lambda", cfg.params.lambda, "true SNR")->capture_default_str();
    app.add_option("--lambda-p,--lambda_p", cfg.params.lambda_p, "assumed SNR")->capture_default_str();
    app.add_option("--n", cfg.n, "matrix dimension")->capture_default_str();
    app.add_option("--trials", cfg.trials, "independent instances")->capture_default_str();
    app.add_option("--chains", cfg.chains, "MCMC chains per instance")->capture_default_str();
    app.add_option("--burn-in,--burn_in", cfg.burn_in, "MCMC burn-in steps per chain")->capture_default_str();
    app.add_option("--samples", cfg.samples, "MCMC samples per chain, or sphere samples for hciz")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "run seed")->capture_default_str();
    app.add_option("--grid", grid_specs, "<axis>:<lo>:<hi>:<count>, repeatable");
    app.add_option("--theta", cfg.theta, "hciz: rank-one eigenvalue(s)");
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--dump", cfg.dump, "hciz: SPWG1 spectrum cache, read if present, written otherwise");
    app.add_flag("--no-gate,--no_gate", cfg.no_gate, "simulate: exit 0 even when |z| > 3");
    app.add_flag("--matched", cfg.matched, "section: set lambda' = lambda along a lambda sweep");
    app.add_flag("--finite-n,--finite_n", cfg.finite_n, "free-energy: also run the finite-n estimator");
    app.add_flag("--gnuplot", cfg.gnuplot, "phase-diagram/section: write a gnuplot script next to --out");

    const std::pair<const char*, const char*> commands[] = {
        {"mse", "asymptotic mismatched MSE"},
        {"free-energy", "asymptotic mismatched free energy (--finite-n adds a simulation)"},
        {"mmse", "Bayes-optimal MMSE"},
        {"region", "which branch of the piecewise formulas applies"},
        {"phase-diagram", "MSE over a (sigma', lambda') grid plus the three curves"},
        {"section", "MSE along one swept parameter"},
        {"simulate", "finite-n MSE by MCMC, JSON report"},
        {"validate", "run the validator suite, JSON report"},
        {"hciz", "Monte Carlo rank-one spherical integral against its large-n limit"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help)->fallthrough()->callback([&cfg, name = std::string(name)] { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
        for (const std::string& g : grid_specs) cfg.grid.push_back(cli::parse_grid(g));
        return cli::run(cfg, std::cout, std::cerr);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsage;
    } catch (const cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return cli::kUsage;
    } catch (const mismatchlab::InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return cli::kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kFailed;
    }
}
