// Command-line front end: catalog instances or config files through the
// analysis pipeline, plus the invariant suites.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reclab/catalog.hpp"
#include "reclab/config.hpp"
#include "reclab/experiment.hpp"
#include "reclab/verify.hpp"

using namespace reclab;

namespace {

struct CommonArgs {
    std::string config;
    std::string instance;
    std::string out;
    std::string format;
    std::optional<double> horizon;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "experiment config (JSON)");
    cmd->add_option("--instance", args.instance, "catalog instance name, or 'all'");
    cmd->add_option("--out", args.out, "directory for report files");
    cmd->add_option("--format", args.format, "report format")->check(CLI::IsMember({"csv", "structured"}));
    cmd->add_option("--horizon", args.horizon, "detector and criterion horizon");
    cmd->add_option("--tol", args.tol, "detector tolerance");
    cmd->add_option("--seed", args.seed, "seed for random test vectors");
}

std::vector<ExperimentConfig> resolve(const CommonArgs& args) {
    std::vector<ExperimentConfig> out;
    if (!args.config.empty() && !args.instance.empty()) {
        throw Error(ErrorKind::Validation, "use either --config or --instance, not both");
    }
    if (!args.config.empty()) {
        out.push_back(load_config_file(args.config));
    } else if (args.instance == "all") {
        for (const auto& inst : catalog()) out.push_back(inst.config);
    } else if (!args.instance.empty()) {
        out.push_back(catalog_instance(args.instance).config);
    } else {
        throw Error(ErrorKind::Validation, "one of --config or --instance is required");
    }
    for (auto& c : out) {
        if (args.horizon) {
            c.analysis.detector_horizon = *args.horizon;
            c.analysis.criterion_horizon = *args.horizon;
        }
        if (args.tol) c.analysis.detector_tol = *args.tol;
        if (args.seed) c.analysis.seed = *args.seed;
        if (!args.out.empty()) c.output.path = args.out;
        if (!args.format.empty()) c.output.format = args.format;
    }
    return out;
}

void print_record(const RunRecord& rec) {
    std::printf("%s: exit %d (config %s)\n", rec.instance.c_str(), rec.exit_status, rec.config_hash.c_str());
    if (!rec.error.empty()) std::printf("  error: %s\n", rec.error.c_str());
    for (const auto& c : rec.certificates) {
        std::printf("  admissibility %s: %s (worst ratio %.6g, %zu samples)\n", to_string(c.kind),
                    c.holds ? "holds" : "fails", c.worst_ratio, c.samples_checked);
    }
    if (rec.criterion) {
        std::printf("  criterion %s: %s (tol %g, horizon %g)\n", to_string(rec.criterion->criterion),
                    rec.criterion->holds ? "holds" : "fails", rec.criterion->tol, rec.criterion->horizon);
    }
    for (const auto& d : rec.detectors) {
        std::printf("  %s: %s, %zu witness times (tol %g, horizon %g%s)\n", d.label.c_str(),
                    to_string(d.report.verdict), d.report.witness_times.size(), d.report.tol, d.report.horizon,
                    d.report.truncated ? ", truncated" : "");
    }
    if (rec.construction) {
        for (const auto& s : rec.construction->stages) {
            std::printf("    stage t=%g eps=%.3g in_ball=%.3g return=%.3g\n", s.t, s.eps, s.in_ball_residual,
                        s.return_residual);
        }
    }
    for (const auto& r : rec.rigidity) {
        std::printf("  %s rigidity: %s, best t=%g residual %.6g (tol %g)\n",
                    r.kind == RigidityKind::Strong ? "strong" : "uniform", to_string(r.verdict), r.best_time,
                    r.best_residual, r.tol);
    }
    if (rec.spectrum) {
        std::printf("  spectral radius %.6g (%s after %d iterations)\n", rec.spectrum->r,
                    rec.spectrum->converged ? "converged" : "not converged", rec.spectrum->iterations);
    }
    for (const auto& c : rec.consistency) {
        std::printf("  cross-validation: %s%s%s\n", to_string(c.status), c.message.empty() ? "" : ": ",
                    c.message.c_str());
    }
    for (const auto& n : rec.notes) std::printf("  note: %s\n", n.c_str());
}

int run_all(const CommonArgs& args, const std::optional<std::vector<std::string>>& operations) {
    int status = 0;
    for (auto cfg : resolve(args)) {
        if (operations) cfg.analysis.operations = *operations;
        const RunRecord rec = run(cfg);
        print_record(rec);
        if (rec.exit_status == 2 || status == 2) status = 2;
        else status = std::max(status, rec.exit_status);
    }
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reclab: recurrence analysis of discretized C0-semigroups"};
    app.require_subcommand(1);
    app.set_version_flag("--version", software_version());

    CommonArgs check_args, analyze_args, construct_args, rigidity_args, spectrum_args;
    auto* check = app.add_subcommand("check-admissible", "certify weight and semiflow admissibility");
    add_common(check, check_args);
    auto* analyze = app.add_subcommand("analyze", "run the configured analyses");
    add_common(analyze, analyze_args);
    auto* construct = app.add_subcommand("construct-recurrent", "nested-ball construction of a recurrent vector");
    add_common(construct, construct_args);
    auto* rigid = app.add_subcommand("rigidity", "strong and uniform rigidity scans");
    add_common(rigid, rigidity_args);
    auto* spec = app.add_subcommand("spectrum", "spectral radius of T(t)");
    add_common(spec, spectrum_args);

    std::vector<std::string> suites;
    std::string tamper;
    auto* verify = app.add_subcommand("verify-theorems", "run the invariant suites");
    verify->add_option("suites", suites, "suite names or 'all'");
    verify->add_option("--tamper", tamper, "suite whose tolerance is replaced (failure fixture)");

    auto* list = app.add_subcommand("catalog", "list built-in instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*check) return run_all(check_args, std::vector<std::string>{"admissibility"});
        if (*analyze) return run_all(analyze_args, std::nullopt);
        if (*construct) return run_all(construct_args, std::vector<std::string>{"nested_ball"});
        if (*rigid) return run_all(rigidity_args, std::vector<std::string>{"rigidity", "uniform_rigidity"});
        if (*spec) return run_all(spectrum_args, std::vector<std::string>{"spectrum"});
        if (*verify) {
            const VerifySummary s = verify_theorems(suites, {tamper});
            std::fputs(format_summary(s).c_str(), stdout);
            return s.exit_status();
        }
        if (*list) {
            std::fputs(emit_catalog().c_str(), stdout);
            return 0;
        }
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
