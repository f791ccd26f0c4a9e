#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

using namespace cqm::cli;

namespace
{
    void shared_options(CLI::App *sub, RunConfig &cfg)
    {
        sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "summary", "csv"}));
        sub->add_flag("--timings", cfg.timings, "Include wall-clock timings (output is then not byte-stable)");
        sub->add_flag("!--no-cache", cfg.use_cache, "Bypass the on-disk cache");
    }

    int emit(const Outcome &o, const RunConfig &cfg)
    {
        if (!o.csv.empty() && cfg.out.empty() && (cfg.format == "csv" || cfg.format == "json"))
            std::cout << o.csv;
        else if (cfg.format == "summary")
            std::cout << summary(o.doc);
        else
            std::cout << o.doc.dump(2) << "\n";
        if (o.code != Ok && o.doc.contains("failure"))
            std::cerr << Json{{"failure", o.doc["failure"]}}.dump() << "\n";
        return o.code;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Exact Clifford groups, constructive states and mutually unbiased bases"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::uint32_t p = 0, l = 1;

    auto *group = app.add_subcommand("group", "Order of the Weyl-Heisenberg, Clifford or projective Clifford group");
    group->add_option("--dim", cfg.dim)->required();
    group->add_option("--which", cfg.which)->check(CLI::IsMember({"wh", "clifford", "projective"}));
    group->add_option("--max-closure", cfg.max_closure);
    group->add_option("--out", cfg.out, "Write the element table as JSON");

    auto *cqs = app.add_subcommand("cqs", "Generate constructive quantum states by interference and filtering");
    auto *cqs_dim = cqs->add_option("--dim", cfg.dim);
    auto *cqs_in = cqs->add_option("--in", cfg.input, "Resume from a saved state set")->check(CLI::ExistingFile);
    cqs_dim->excludes(cqs_in);
    cqs->add_option("--steps", cfg.steps);
    cqs->add_option("--out", cfg.out, "Write the state set as JSON");
    cqs->add_flag("!--no-calibration", cfg.calibrate, "Skip the comparison with the reference counts");

    auto *mub = app.add_subcommand("mub", "Complete set of mutually unbiased bases");
    mub->add_option("--dim", cfg.dim)->required();
    mub->add_flag("--from-orbit", cfg.from_orbit, "Also extract bases from the Clifford orbit of |0>");
    mub->add_option("--out", cfg.out, "Write the basis set as JSON");

    auto *crt = app.add_subcommand("crt", "Chinese-remainder decomposition and product check");
    crt->add_option("--dim", cfg.dim)->required();
    crt->add_flag("--full", cfg.full, "Run the full linear closure of CL(N) as well");
    crt->add_option("--max-closure", cfg.max_closure);
    crt->add_flag("--energy-only", cfg.energy_only, "Skip the Clifford product check");

    auto *verify = app.add_subcommand("verify", "Weyl, Fourier and displacement relations");
    verify->add_option("--dim", cfg.dim)->required();

    auto *bloch = app.add_subcommand("bloch-export", "Bloch coordinates of a dimension-2 state set as CSV");
    auto *bloch_dim = bloch->add_option("--dim", cfg.dim);
    auto *bloch_in = bloch->add_option("--in", cfg.input, "State set JSON")->check(CLI::ExistingFile);
    bloch_dim->excludes(bloch_in);
    bloch->add_option("--steps", cfg.steps);
    bloch->add_option("--out", cfg.out, "Write the CSV to a file");

    auto *galois = app.add_subcommand("galois", "Element and trace tables of a finite field");
    galois->add_option("--dim", cfg.dim, "Field order q = p^l");
    galois->add_option("-p", p, "Characteristic");
    galois->add_option("-l", l, "Degree");

    for (auto *sub : {group, cqs, mub, crt, verify, bloch, galois})
        shared_options(sub, cfg);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        int rc = app.exit(e);
        return rc == 0 ? Ok : BadUsage;
    }

    auto sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "bloch-export" && !sub->count("--steps"))
        cfg.steps = 0;
    if (name == "galois" && cfg.dim == 0 && p == 0)
    {
        std::cerr << "galois needs --dim or -p\n";
        return BadUsage;
    }

    Outcome o = run_guarded(name, [&]() -> Outcome {
        if (name == "group")
            return cmd_group(cfg);
        if (name == "cqs")
            return cmd_cqs(cfg);
        if (name == "mub")
            return cmd_mub(cfg);
        if (name == "crt")
            return cmd_crt(cfg);
        if (name == "verify")
            return cmd_verify(cfg);
        if (name == "bloch-export")
            return cmd_bloch_export(cfg);
        return cmd_galois(cfg, p, l);
    });
    return emit(o, cfg);
}
