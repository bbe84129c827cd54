// stochcap: stochastic capacity estimation and reliability studies.

#include <iostream>

#include <CLI11.hpp>

#include "cli_commands.hpp"

int main(int argc, char** argv) {
    using namespace stochcap::cli;

    CLI::App app{"Stochastic road-capacity estimation from censored traffic-flow records"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Fit a Weibull capacity distribution to a dataset CSV");
    c_est->add_option("--input", est.input, "CSV with intensity,records,breakdowns")->required();
    c_est->add_option("--fixed-shape", est.fixed_shape, "Hold the shape parameter fixed");
    c_est->add_option("--truth", est.truth, "True 'scale,shape'; adds error metrics");
    c_est->add_option("--multistart", est.multistart, "Number of optimiser starts")->check(CLI::PositiveNumber);
    c_est->add_option("--seed", est.seed, "Seed for multistart jitter");

    SynthArgs syn;
    auto* c_syn = app.add_subcommand("synth", "Generate a pseudo-empirical dataset CSV on standard output");
    c_syn->add_option("--profile", syn.profile, "Profile CSV with intensity,records");
    c_syn->add_option("--calibrate", syn.calibrate, "Synthetic profile, e.g. 'total=7447,target=52'");
    c_syn->add_option("--dist", syn.dist, "True capacity distribution 'scale,shape'")->required();
    c_syn->add_option("--seed", syn.seed, "Generator seed")->required();
    c_syn->add_option("--target-breakdowns", syn.target_breakdowns, "Rescale records to this expected total");

    StudyArgs stu;
    auto* c_stu = app.add_subcommand("study", "Run the Monte Carlo reliability study");
    c_stu->add_option("--config", stu.config, "Study configuration JSON (defaults apply when omitted)");
    c_stu->add_option("--out", stu.out, "Run-record CSV to write")->required();
    c_stu->add_option("--summary", stu.summary, "Cell summary JSON to write");
    c_stu->add_option("--jobs", stu.jobs, "Worker threads")->check(CLI::PositiveNumber);

    RegressArgs reg;
    auto* c_reg = app.add_subcommand("regress", "Fit OLS error models to study results");
    c_reg->add_option("--results", reg.results, "Run-record CSV from `study`")->required();
    c_reg->add_option("--response", reg.response, "cdf-awre or cfb-awre")->capture_default_str();
    c_reg->add_option("--models", reg.models, "Semicolon-separated regressor sets, e.g. 'x5;x3,x4'")
        ->capture_default_str();
    c_reg->add_option("--out", reg.out, "Write model JSON here and print the ranking table");

    PlotArgs plt;
    auto* c_plt = app.add_subcommand("plot", "Emit an SVG figure and a CSV of the plotted points");
    c_plt->add_option("--results", plt.results, "Run-record CSV from `study`")->required();
    c_plt->add_option("--out", plt.out, "SVG file to write")->required();
    c_plt->add_option("--kind", plt.kind, "awre-vs-breakdowns or cfb-curves")->capture_default_str();
    c_plt->add_option("--points", plt.points, "Companion CSV path (default: <out>.csv)");
    c_plt->add_option("--config", plt.config, "Study config that produced the results (cfb-curves)");
    c_plt->add_option("--run", plt.run, "Row index of the run to draw (cfb-curves)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (c_est->parsed()) return cmd_estimate(est, std::cout, std::cerr);
    if (c_syn->parsed()) return cmd_synth(syn, std::cout, std::cerr);
    if (c_stu->parsed()) return cmd_study(stu, std::cerr);
    if (c_reg->parsed()) return cmd_regress(reg, std::cout, std::cerr);
    if (c_plt->parsed()) return cmd_plot(plt, std::cerr);
    return kUsage;
}
