// normcase: command-line front end for norm models and the case service.

#include "normcase/lang/parser.hpp"
#include "normcase/lang/printer.hpp"
#include "normcase/lang/validate.hpp"
#include "normcase/reasoner/explain.hpp"
#include "normcase/reasoner/snapshot.hpp"
#include "normcase/service/http_api.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace normcase;
using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_diagnostics(const std::string& path, const lang::Diagnostics& diags) {
    for (const auto& d : diags) std::cerr << path << ":" << lang::format(d) << "\n";
}

int cmd_check(const std::string& path) {
    const auto result = lang::load(slurp(path));
    print_diagnostics(path, result.diagnostics);
    if (lang::has_errors(result.diagnostics)) return 1;
    std::cout << path << ": ok (" << result.spec->declarations.size() << " declarations, "
              << result.spec->statements.size() << " statements)\n";
    return 0;
}

int cmd_fmt(const std::string& path, bool check_only) {
    const std::string source = slurp(path);
    const auto parsed = lang::parse(source);
    print_diagnostics(path, parsed.diagnostics);
    if (!parsed.ok()) return 1;
    const std::string formatted = lang::to_source(parsed.spec);
    if (check_only) return formatted == source ? 0 : 1;
    std::cout << formatted;
    return 0;
}

// Events file: JSON array of reasoner inputs, e.g.
// [{"kind":"fact","instance":{"type":"applicant-income","arg":1000},"value":true},
//  {"kind":"act","act":"submit-application","actor":"alice","recipient":"clerk","confirmed":false}]
int cmd_run(const std::string& model_path, const std::string& events_path, bool explain, bool snapshot_only) {
    const auto compiled = reasoner::Model::compile(slurp(model_path));
    print_diagnostics(model_path, compiled.diagnostics);
    if (!compiled.model) return 1;

    auto state = reasoner::init_state(compiled.model);
    if (!events_path.empty()) {
        const json events = json::parse(slurp(events_path));
        for (const auto& e : events) {
            const auto input = reasoner::input_from_json(e);
            if (const auto* act = std::get_if<reasoner::ActInput>(&input)) {
                auto r = reasoner::execute_act(std::move(state), act->invocation, act->confirmed);
                if (r.report.requires_confirmation)
                    std::cerr << "skipped " << act->invocation.act << ": "
                              << reasoner::to_string(r.report.status.status) << ", needs confirmation\n";
                state = std::move(r.state);
            } else {
                state = reasoner::apply_input(std::move(state), input);
            }
        }
    }
    if (snapshot_only) {
        std::cout << reasoner::snapshot(state) << "\n";
        return 0;
    }
    if (explain) {
        for (const auto& e : reasoner::explain(state)) {
            std::cout << e.seq << ". " << e.summary << "\n";
            for (const auto& d : e.details) std::cout << "     " << d << "\n";
        }
        return 0;
    }
    std::cout << "acts:\n";
    for (const auto& s : reasoner::act_statuses(state)) {
        std::cout << "  " << s.act << " [" << reasoner::to_string(s.status) << "]\n";
        for (const auto& r : s.reasons) std::cout << "      " << r.clause << " = " << reasoner::to_string(r.value) << "\n";
    }
    std::cout << "duties:\n";
    for (const auto& d : reasoner::active_duties(state))
        std::cout << "  " << d.type << " holder " << reasoner::to_display(d.holder)
                  << (d.claimant ? " claimant " + reasoner::to_display(*d.claimant) : "")
                  << (d.violated ? " (violated)" : "") << "\n";
    std::cout << "violations:\n";
    for (const auto& v : state.violations)
        std::cout << "  " << reasoner::to_string(v.kind) << " " << v.subject << " by " << reasoner::to_display(v.party)
                  << "\n";
    return 0;
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(service::ServiceConfig config) {
    const auto colon = config.listen.rfind(':');
    if (colon == std::string::npos) throw std::runtime_error("listen address must be host:port");
    const std::string host = config.listen.substr(0, colon);
    int port = std::stoi(config.listen.substr(colon + 1));

    service::Application app(config);
    if (const std::size_t failed = app.boot())
        std::cerr << failed << " case(s) could not be started; they report as unavailable\n";

    httplib::Server server;
    service::install_routes(server, app);
    // Port 0 picks a free port; the chosen one is printed below.
    if (port == 0) port = server.bind_to_any_port(host);
    else if (!server.bind_to_port(host, port)) port = -1;
    if (port < 0) throw std::runtime_error("cannot listen on " + config.listen);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << host << ":" << port << std::endl;
    server.listen_after_bind();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Norm model tools and case service"};
    cli.require_subcommand(1);

    std::string path;
    auto* check = cli.add_subcommand("check", "Parse and validate a model");
    check->add_option("model", path, "Model file")->required();

    bool fmt_check = false;
    auto* fmt = cli.add_subcommand("fmt", "Print a model in canonical form");
    fmt->add_option("model", path, "Model file")->required();
    fmt->add_flag("--check", fmt_check, "Exit 1 if the file is not already canonical");

    std::string events;
    bool explain = false, snapshot_only = false;
    auto* run = cli.add_subcommand("run", "Apply an events file to a fresh state and report");
    run->add_option("model", path, "Model file")->required();
    run->add_option("--events", events, "JSON array of inputs");
    run->add_flag("--explain", explain, "Print the trace instead of statuses");
    run->add_flag("--snapshot", snapshot_only, "Print the canonical snapshot");

    auto config = service::ServiceConfig::from_env();
    std::string model_file, admin_token;
    bool lazy = false;
    auto* serve = cli.add_subcommand("serve", "Run the HTTP case service");
    serve->add_option("--store", config.store_dir, "Store directory (NORMCASE_STORE)");
    serve->add_option("--listen", config.listen, "host:port (NORMCASE_LISTEN)");
    serve->add_option("--model", model_file, "Bootstrap active model file (NORMCASE_MODEL)");
    serve->add_option("--admin-token", admin_token, "Admin bearer token (NORMCASE_ADMIN_TOKEN)");
    serve->add_flag("--lazy", lazy, "Start case reasoners on first access instead of at boot");

    CLI11_PARSE(cli, argc, argv);
    try {
        if (*check) return cmd_check(path);
        if (*fmt) return cmd_fmt(path, fmt_check);
        if (*run) return cmd_run(path, events, explain, snapshot_only);
        if (*serve) {
            if (!model_file.empty()) config.bootstrap_model = model_file;
            if (!admin_token.empty()) config.admin_token = admin_token;
            config.eager_start = !lazy;
            return cmd_serve(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
