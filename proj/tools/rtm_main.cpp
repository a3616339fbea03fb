#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "rtm/errors.hpp"
#include "rtm/experiments.hpp"

namespace {

struct OutputOpts {
    std::string path;
    std::string format = "json";
};

void add_common(CLI::App* sub, rtm::CommonConfig& c, OutputOpts& out) {
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--threads", c.threads, "worker thread cap")->check(CLI::PositiveNumber);
    sub->add_option("--max-p", c.max_p, "dense-matrix dimension cap");
    sub->add_option("--out", out.path, "output path (default stdout)");
    sub->add_option("--format", out.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

void emit(const nlohmann::ordered_json& report, const OutputOpts& out) {
    const std::string text =
        out.format == "csv" ? rtm::to_csv(report) : report.dump(2) + "\n";
    if (out.path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out.path);
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random tensor covariance experiments"};
    app.require_subcommand(1);

    OutputOpts out;

    rtm::MpEsdConfig mp;
    auto* mp_cmd = app.add_subcommand("mp-esd", "eigenvalue distribution vs the limit law");
    mp_cmd->add_option("--n", mp.n, "base dimension")->required();
    mp_cmd->add_option("--d", mp.d, "tensor order")->required();
    mp_cmd->add_option("--N", mp.N, "number of samples")->required();
    mp_cmd->add_option("--dist", mp.dist, "entry distribution name[:param]");
    add_common(mp_cmd, mp.common, out);

    rtm::QformVarConfig qv;
    auto* qv_cmd = app.add_subcommand("qform-var", "quadratic-form variance vs bounds");
    qv_cmd->add_option("--n", qv.n, "base dimension")->required();
    qv_cmd->add_option("--d", qv.d, "tensor order")->required();
    qv_cmd->add_option("--dist", qv.dist, "entry distribution name[:param]");
    qv_cmd->add_option("--matrix", qv.matrices,
                       "matrix cases: identity, zero-diag-signs, projection:<frac>");
    qv_cmd->add_option("--reps", qv.reps, "Monte Carlo replicates");
    add_common(qv_cmd, qv.common, out);

    rtm::EspLlnConfig el;
    auto* el_cmd = app.add_subcommand("esp-lln", "symmetric-polynomial law of large numbers");
    el_cmd->add_option("--z-dist", el.z_dist, "Z law: const, exp, xsq:<entry dist>");
    el_cmd->add_option("--d-rule", el.d_rule, "d as a function of n: floor(n^a) or const:k");
    el_cmd->add_option("--n-grid", el.n_grid, "comma-separated n values")->delimiter(',');
    el_cmd->add_option("--reps", el.reps, "replicates per grid point");
    add_common(el_cmd, el.common, out);

    rtm::GammaConfig ga;
    auto* ga_cmd = app.add_subcommand("gamma", "overlap-count formula vs enumeration");
    ga_cmd->add_option("--n-max", ga.n_max, "sweep bound for n");
    ga_cmd->add_option("--d-max", ga.d_max, "sweep bound for d");
    add_common(ga_cmd, ga.common, out);

    rtm::ConditionsConfig co;
    auto* co_cmd = app.add_subcommand("conditions", "truncated-moment condition terms");
    co_cmd->add_option("--dist", co.dist, "entry distribution name[:param]");
    co_cmd->add_option("--d-rule", co.d_rule, "d as a function of n: floor(n^a) or const:k");
    co_cmd->add_option("--n-grid", co.n_grid, "comma-separated n values")->delimiter(',');
    co_cmd->add_option("--reps", co.reps, "Monte Carlo draws per grid point");
    add_common(co_cmd, co.common, out);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto t0 = std::chrono::steady_clock::now();
        nlohmann::ordered_json report;
        if (mp_cmd->parsed()) report = rtm::run_mp_esd(mp);
        if (qv_cmd->parsed()) report = rtm::run_qform_var(qv);
        if (el_cmd->parsed()) report = rtm::run_esp_lln(el);
        if (ga_cmd->parsed()) report = rtm::run_gamma(ga);
        if (co_cmd->parsed()) report = rtm::run_conditions(co);
        const auto t1 = std::chrono::steady_clock::now();
        emit(report, out);
        // Timing stays out of the report so reruns are byte-identical.
        std::fprintf(stderr, "wall_time_seconds=%.3f\n",
                     std::chrono::duration<double>(t1 - t0).count());
        return 0;
    } catch (const rtm::precondition_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const rtm::cap_exceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
