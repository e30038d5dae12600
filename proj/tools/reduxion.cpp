// reduxion: run gauge-boson reduction scenarios from a JSON config.
//
//   reduxion run --config PATH [--seed N|auto] [--out PATH] [--format json|csv]
//   reduxion list
//   reduxion verify [--filter NAME] [--format json|csv]

#include "reduxion/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

using namespace reduxion;

namespace {

int emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "reduxion: cannot write '" << path << "'\n";
        return 2;
    }
    out << text;
    return 0;
}

OutputFormat format_from(const std::string& f) {
    return f == "csv" ? OutputFormat::Csv : OutputFormat::Json;
}

void list_variants() {
    for (const auto& v : scenario_variants()) {
        std::cout << v.name << "  " << v.summary << "\n";
        for (const auto& p : v.params) std::cout << "    " << describe(p) << "  " << p.doc << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gauge-boson state reduction simulator"};
    app.require_subcommand(1);

    std::string config_path, seed_arg, out_path, format, filter;
    auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--seed", seed_arg, "master seed (non-negative integer) or 'auto'");
    run->add_option("--out", out_path, "output file (default: config output.path, else stdout)");
    run->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));

    app.add_subcommand("list", "list scenario variants and their parameters");

    auto* verify = app.add_subcommand("verify", "check the closed-form table");
    verify->add_option("--filter", filter, "only groups whose name contains this");
    verify->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    verify->add_option("--out", out_path, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("list")) {
            list_variants();
            return 0;
        }
        if (app.got_subcommand("verify")) {
            const auto rows = verify_table(filter);
            const int failed = static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const VerifyRow& r) { return !r.pass; }));
            if (const int rc = emit(render_verify(rows, format_from(format)), out_path)) return rc;
            std::cerr << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size() << " rows pass\n";
            for (const auto& r : rows)
                if (!r.pass)
                    std::cerr << "FAIL " << r.group << ": " << r.name << " expected " << r.expected << " got "
                              << r.actual << "\n";
            return failed == 0 ? 0 : 1;
        }

        RunConfig cfg = load_config(config_path);
        if (!seed_arg.empty()) {
            if (seed_arg == "auto") {
                std::random_device rd;
                cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
                std::cerr << "reduxion: seed " << cfg.seed << "\n";
            } else {
                try {
                    std::size_t used = 0;
                    cfg.seed = std::stoull(seed_arg, &used);
                    if (used != seed_arg.size() || seed_arg.front() == '-') throw std::invalid_argument(seed_arg);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::ConfigInvalid, "--seed must be a non-negative integer or 'auto'");
                }
            }
        }
        if (!format.empty()) cfg.format = format_from(format);
        if (!out_path.empty()) cfg.output_path = out_path;

        const RunResult res = execute(cfg);
        if (const int rc = emit(res.text, cfg.output_path)) return rc;
        return res.exit_code;
    } catch (const Error& e) {
        std::cerr << "reduxion: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "reduxion: " << e.what() << "\n";
        return 2;
    }
}
