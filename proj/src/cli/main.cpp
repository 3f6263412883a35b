#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mhdbl/parallel.hpp"
#include "mhdbl/runner.hpp"

namespace {

// --threads, else MHD_BLAYER_THREADS, else the hardware count.
int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("MHD_BLAYER_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
        std::cerr << "mhd-blayer: ignoring MHD_BLAYER_THREADS=" << env << '\n';
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-layer MHD scenario runner"};
    app.require_subcommand(1);
    std::string config, out = "out";
    int threads = 0;
    for (const char* name : {"simulate", "instability", "eigen", "transform-check", "outflow-check"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "TOML scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--threads", threads, "worker threads (default: MHD_BLAYER_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    const auto command = mhdbl::parse_command(app.get_subcommands().front()->get_name());
    mhdbl::set_thread_count(resolve_threads(threads));
    try {
        const int code = mhdbl::run_from_file(*command, config, out);
        if (code != 0) std::cerr << "mhd-blayer: exit " << code << ", see " << out << "/report.json\n";
        return code;
    } catch (const std::exception& e) {
        std::cerr << "mhd-blayer: " << e.what() << '\n';
        return 1;
    }
}
