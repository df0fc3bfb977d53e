// orbitdeg: command-line front end.
//
//   orbitdeg <cmd> --config <path> [--format table|csv|jsonl] [--out <path>]
//            [--n-max N] [--epsilon E] [--tol T] [--seed S]
//   orbitdeg fixture <kind> [--seed S] [--out <path>]
//
// Exit codes: 0 ok, 1 a check failed, 2 config/input error, 3 computation error.

#include "orbitdeg/config.hpp"
#include "orbitdeg/errors.hpp"
#include "orbitdeg/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Args {
    std::string command;
    std::string config;
    std::string format = "table";
    std::string out;
    std::string fixture_kind;
    orbitdeg::RunOptions opts;
};

int report_error(const Args& a, const std::string& kind, const std::string& message, int code) {
    if (a.format == "jsonl") {
        const std::string line = orbitdeg::error_record(kind, message).dump();
        if (!a.out.empty()) {
            std::ofstream f(a.out);
            if (f) f << line << '\n';
        }
        std::cout << line << '\n';
    }
    std::cerr << "orbitdeg: " << message << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arithmetic degrees and canonical heights for systems of maps"};
    app.require_subcommand(1);
    Args a;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", a.config, "system configuration (JSON)")->required();
        sub->add_option("--format", a.format, "output format")->check(CLI::IsMember({"table", "csv", "jsonl"}));
        sub->add_option("--out", a.out, "write output here instead of stdout");
        sub->add_option("--n-max", a.opts.n_max, "orbit depth override");
        sub->add_option("--epsilon", a.opts.epsilon, "growth-bound slack override");
        sub->add_option("--tol", a.opts.tol, "canonical-height tolerance override");
        sub->add_option("--seed", a.opts.seed, "sampling seed");
    };
    for (const auto& name : orbitdeg::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub);
        sub->callback([&a, name] { a.command = name; });
    }
    CLI::App* fx = app.add_subcommand("fixture", "print a bundled fixture config");
    fx->add_option("kind", a.fixture_kind)->required()->check(CLI::IsMember(orbitdeg::fixture_kinds()));
    fx->add_option("--seed", a.opts.seed, "fixture seed");
    fx->add_option("--out", a.out, "write the config here instead of stdout");
    fx->callback([&a] { a.command = "fixture"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (a.command == "fixture") {
            const std::string text = orbitdeg::make_fixture(a.fixture_kind, a.opts.seed).source.dump(2) + "\n";
            if (a.out.empty()) {
                std::cout << text;
            } else {
                std::ofstream f(a.out);
                if (!f) throw orbitdeg::InputError(a.out + ": cannot open output file for writing");
                f << text;
            }
            return 0;
        }
        const orbitdeg::SystemConfig cfg = orbitdeg::load_config(a.config);
        const orbitdeg::RunReport report = orbitdeg::run_command(a.command, cfg, a.opts);
        orbitdeg::emit(report, a.format, a.out);
        return report.exit_code();
    } catch (const orbitdeg::InputError& e) {
        return report_error(a, "config", e.what(), 2);
    } catch (const orbitdeg::ComputationError& e) {
        return report_error(a, "computation", e.what(), 3);
    } catch (const std::exception& e) {
        return report_error(a, "computation", e.what(), 3);
    }
}
