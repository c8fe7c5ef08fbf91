#include "sindarin/scenarios.hpp"
#include "sindarin/script.hpp"
#include "sindarin/service/protocol.hpp"
#include "sindarin/service/server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace sindarin;

namespace {

constexpr int kOk = 0, kGuestFailure = 1, kUsage = 2;
constexpr std::uint16_t kFallbackPort = 7420;

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream s;
        s << std::cin.rdbuf();
        return s.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError(path, "cannot read file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::uint16_t default_port() {
    if (const char* env = std::getenv("SINDARIN_PORT")) {
        try {
            int p = std::stoi(env);
            if (p > 0 && p < 65536) return static_cast<std::uint16_t>(p);
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring SINDARIN_PORT=" << env << "\n";
    }
    return kFallbackPort;
}

// Syntax and compile errors are usage errors; everything else the guest did is a guest failure.
int report(const Error& err) {
    std::cerr << to_string(err.code()) << ": " << err.what();
    if (err.span()) std::cerr << " at [" << err.span()->start << "," << err.span()->end << ")";
    std::cerr << "\n";
    if (!err.detail().empty()) std::cerr << err.detail();
    bool usage = err.code() == ErrorCode::SyntaxError || err.code() == ErrorCode::CompileError ||
                 err.code() == ErrorCode::UnknownScenario || err.code() == ErrorCode::BadArgs;
    return usage ? kUsage : kGuestFailure;
}

volatile std::sig_atomic_t stop_requested = 0;

void on_signal(int) { stop_requested = 1; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scriptable debugger for Lumen programs"};
    app.require_subcommand(1);
    std::int64_t seed = 42;
    app.add_option("--seed", seed, "seed for the guest Random")->capture_default_str();

    std::string run_file;
    auto* run = app.add_subcommand("run", "run a program to completion");
    run->add_option("file", run_file, "Lumen source, - for stdin")->required();

    std::string debug_file, script_file;
    bool debug_snapshot = false;
    auto* debug = app.add_subcommand("debug", "debug a program with a script");
    debug->add_option("file", debug_file, "debuggee source")->required();
    debug->add_option("--script", script_file, "debugging script (dbg is bound)")->required();
    debug->add_flag("--snapshot", debug_snapshot, "print the final session snapshot as JSON");

    std::string scenario_name;
    bool scenario_json = false, scenario_list = false;
    auto* scen = app.add_subcommand("scenarios", "run the shipped debugging scenarios");
    scen->add_option("name", scenario_name, "run only this scenario");
    scen->add_flag("--json", scenario_json, "print reports as JSON");
    scen->add_flag("--list", scenario_list, "list scenario names");

    std::uint16_t port = default_port();
    std::string ui_dir, host = "127.0.0.1";
    bool use_stdio = false;
    auto* serve = app.add_subcommand("serve", "serve the debugging protocol");
    serve->add_option("--port", port, "TCP port (default $SINDARIN_PORT or 7420)")->capture_default_str();
    serve->add_option("--host", host, "listen address")->capture_default_str();
    serve->add_option("--ui", ui_dir, "directory of static files for HTTP GETs")->check(CLI::ExistingDirectory);
    serve->add_flag("--stdio", use_stdio, "speak NDJSON on stdin/stdout instead of TCP");

    std::string dump_file;
    auto* dump = app.add_subcommand("dump-bytecode", "print the compiled bytecode with its node map");
    dump->add_option("file", dump_file, "Lumen source, - for stdin")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    lumen::ExecutionOptions options;
    options.seed = seed;

    try {
        if (*run) {
            lumen::FinalState st = lumen::run_source(slurp(run_file), options);
            std::cout << st.output << std::flush;
            if (st.status == lumen::ExecStatus::Failed) {
                std::cerr << "unhandled " << st.failure << "\n";
                return kGuestFailure;
            }
            return kOk;
        }

        if (*debug) {
            std::shared_ptr<DebugSession> session = DebugSession::debug(slurp(debug_file), options);
            script::ScriptResult r = script::eval_script(session, slurp(script_file));
            std::cout << r.output;
            std::cout << "=> " << r.print << "\n";
            if (debug_snapshot) std::cout << service::json(service::snapshot(*session)).dump(2) << "\n";
            return kOk;
        }

        if (*scen) {
            if (scenario_list) {
                for (const auto& s : script::scenario_list()) std::cout << s.name << "  " << s.title << "\n";
                return kOk;
            }
            std::vector<std::string> names;
            if (!scenario_name.empty()) names.push_back(script::scenario_info(scenario_name).name);
            else
                for (const auto& s : script::scenario_list()) names.push_back(s.name);
            script::ScenarioOptions so;
            so.seed = seed;
            bool all = true;
            service::json reports = service::json::array();
            for (const auto& name : names) {
                script::ScenarioReport r = script::run_scenario(name, so);
                all = all && r.passed;
                if (scenario_json) reports.push_back(service::report_json(r));
                else std::cout << r.render() << "\n";
            }
            if (scenario_json) std::cout << reports.dump(2) << "\n";
            return all ? kOk : kGuestFailure;
        }

        if (*serve) {
            service::Service svc(options);
            if (use_stdio) {
                service::serve_stdio(svc, std::cin, std::cout);
                return kOk;
            }
            service::Server server(svc, {port, host, ui_dir});
            std::uint16_t bound = server.start();
            std::cerr << "listening on " << host << ":" << bound << "\n";
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            while (!stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            server.stop();
            return kOk;
        }

        if (*dump) {
            std::cout << lumen::dump_bytecode(*lumen::compile_source(slurp(dump_file), dump_file));
            return kOk;
        }
    } catch (const Error& err) {
        return report(err);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kGuestFailure;
    }
    return kUsage;
}
