// tnf: truncated normal forms for analytic vector fields near an invariant
// torus. Subcommands: resonances, normalize, brjuno, iterate, verify.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "../src/dispatch.hpp"
#include "tnf/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tnf::validation_error("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated Fourier-Taylor normal forms on T^d x C^n"};
    app.require_subcommand(1);

    tnf::CommonOptions common;
    std::string input_path;
    std::string result_path;
    int order = -1;
    int maxP = -1, maxQ = -1;
    int steps = 1;
    int terms = 20;
    int kmax = -1;
    int split_maxQ = 0;
    tnf::ScheduleOptions sched;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", common.format, "report format: text|json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("--backend", common.backend_override, "override the file's backend")
            ->check(CLI::IsMember({"exact", "float"}));
        cmd->add_flag("--strict", common.strict, "exit 4 on bound violations");
        cmd->add_option("--tol", common.tol, "floating comparison/resonance tolerance");
    };
    auto add_schedule = [&](CLI::App* cmd) {
        cmd->add_option("--gform", sched.gform, "growth function as \"C*m^tau\"");
        cmd->add_option("--gtable", sched.gtable_path, "growth function table file (JSON [[m,g],...])");
        cmd->add_option("--mk", sched.mk, "m schedule: doubling|saturating|comma list");
        cmd->add_option("--eps", sched.eps, "epsilon sequence: aurouet|comma list");
        cmd->add_option("--rseq", sched.rseq, "width sequence as a comma list");
        cmd->add_option("--CS2", sched.cs2, "constant C''_S");
        cmd->add_option("--zeta0", sched.zeta0, "initial zeta_0");
        cmd->add_option("--delta0", sched.delta0, "initial delta_0");
    };

    CLI::App* resonances = app.add_subcommand("resonances", "divisor equivalence classes in a box");
    resonances->add_option("file", input_path, "system file")->required();
    resonances->add_option("--maxP", maxP, "Fourier box |P| <= maxP")->required();
    resonances->add_option("--maxQ", maxQ, "Taylor box |Q| <= maxQ")->required();
    add_common(resonances);

    CLI::App* normalize = app.add_subcommand("normalize", "formal normal form to a given order");
    normalize->add_option("file", input_path, "system file")->required();
    normalize->add_option("--order", order, "normalization order K (default: cap)");
    add_common(normalize);

    CLI::App* brjuno = app.add_subcommand("brjuno", "arithmetic condition report and schedules");
    brjuno->add_option("file", input_path, "system file (optional: enables divisor items)");
    brjuno->add_option("--terms", terms, "number of Brjuno sum terms");
    brjuno->add_option("--maxP", maxP, "divisor check box |P| <= maxP (default 6)");
    brjuno->add_option("--kmax", kmax, "check items through this step index (default 6)");
    add_schedule(brjuno);
    add_common(brjuno);

    CLI::App* iterate = app.add_subcommand("iterate", "Newton iteration with per-step checks");
    iterate->add_option("file", input_path, "system file")->required();
    iterate->add_option("--steps", steps, "number of Newton steps")->required();
    iterate->add_option("--maxQ", split_maxQ, "frequency-split enumeration cap (default cap+1)");
    add_schedule(iterate);
    add_common(iterate);

    CLI::App* verify = app.add_subcommand("verify", "re-check an emitted (Phi, NF) against the input");
    verify->add_option("file", input_path, "system file")->required();
    verify->add_option("--result", result_path, "JSON output of `normalize --format json`")->required();
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        tnf::CommandResult result;
        if (resonances->parsed()) {
            result = tnf::cmd_resonances(tnf::parse_system(read_file(input_path)), maxP, maxQ, common);
        } else if (normalize->parsed()) {
            result = tnf::cmd_normalize(tnf::parse_system(read_file(input_path)), order, common);
        } else if (brjuno->parsed()) {
            if (input_path.empty()) {
                result = tnf::cmd_brjuno(nullptr, sched, terms, maxP < 0 ? 6 : maxP, kmax, common);
            } else {
                auto spec = tnf::parse_system(read_file(input_path));
                result = tnf::cmd_brjuno(&spec, sched, terms, maxP < 0 ? 6 : maxP, kmax, common);
            }
        } else if (iterate->parsed()) {
            result = tnf::cmd_iterate(tnf::parse_system(read_file(input_path)), sched, steps,
                                      split_maxQ, common);
        } else if (verify->parsed()) {
            result = tnf::cmd_verify(tnf::parse_system(read_file(input_path)), read_file(result_path),
                                     common);
        }
        std::cout << result.output;
        return result.exit_code;
    } catch (const tnf::validation_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const tnf::math_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
}
