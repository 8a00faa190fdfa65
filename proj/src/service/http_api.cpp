#include "normcase/service/http_api.hpp"

#include "normcase/reasoner/snapshot.hpp"

#include <httplib.h>

#include <cstdlib>

namespace normcase::service {

using nlohmann::json;

ServiceConfig ServiceConfig::from_env() {
    ServiceConfig c;
    if (const char* v = std::getenv("NORMCASE_STORE"); v && *v) c.store_dir = v;
    if (const char* v = std::getenv("NORMCASE_LISTEN"); v && *v) c.listen = v;
    if (const char* v = std::getenv("NORMCASE_MODEL"); v && *v) c.bootstrap_model = v;
    if (const char* v = std::getenv("NORMCASE_ADMIN_TOKEN"); v && *v) c.admin_token = v;
    return c;
}

Application::Application(const ServiceConfig& config, Clock clock)
    : config_(config),
      store_(config.store_dir),
      models_(store_, clock),
      directory_(store_, config.admin_token),
      cases_(store_, models_, directory_, clock) {}

std::size_t Application::boot() {
    if (config_.bootstrap_model) {
        std::ifstream in(*config_.bootstrap_model, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read model file " + config_.bootstrap_model->string());
        std::ostringstream ss;
        ss << in.rdbuf();
        models_.set_active(models_.register_model(ss.str()).version.version_id);
    }
    return config_.eager_start ? cases_.start_all() : 0;
}

int http_status(ServiceError::Code code) {
    using C = ServiceError::Code;
    switch (code) {
    case C::BadRequest: return 400;
    case C::Unauthenticated: return 401;
    case C::PermissionDenied: return 403;
    case C::NotFound: return 404;
    case C::Conflict: return 409;
    case C::NoActiveModel: return 409;
    case C::InvalidModel: return 422;
    case C::Unavailable: return 503;
    }
    return 500;
}

namespace {

json diagnostics_json(const lang::Diagnostics& diags) {
    json out = json::array();
    for (const auto& d : diags)
        out.push_back({{"severity", d.severity == lang::Severity::Error ? "error" : "warning"},
                       {"message", d.message},
                       {"line", d.span.begin.line},
                       {"column", d.span.begin.column},
                       {"endLine", d.span.end.line},
                       {"endColumn", d.span.end.column}});
    return out;
}

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ServiceError& e) {
    json body = {{"code", to_string(e.code())}, {"message", e.what()}};
    if (!e.diagnostics().empty()) body["diagnostics"] = diagnostics_json(e.diagnostics());
    send(res, http_status(e.code()), body);
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        json j = json::parse(req.body);
        if (!j.is_object()) throw ServiceError(ServiceError::Code::BadRequest, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ServiceError(ServiceError::Code::BadRequest, std::string("invalid JSON: ") + e.what());
    }
}

template <typename T>
T required(const json& body, const char* key) {
    if (!body.contains(key)) throw ServiceError(ServiceError::Code::BadRequest, std::string("missing '") + key + "'");
    try {
        return body.at(key).get<T>();
    } catch (const json::exception&) {
        throw ServiceError(ServiceError::Code::BadRequest, std::string("bad type for '") + key + "'");
    }
}

reasoner::Literal literal_field(const json& body, const char* key) {
    if (!body.contains(key)) throw ServiceError(ServiceError::Code::BadRequest, std::string("missing '") + key + "'");
    const json& v = body.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.get<std::int64_t>();
    throw ServiceError(ServiceError::Code::BadRequest, std::string("'") + key + "' must be a string or integer");
}

ActRequest act_request(const json& body) {
    ActRequest r;
    r.act = required<std::string>(body, "act");
    r.actor = literal_field(body, "actor");
    if (body.contains("recipient") && !body.at("recipient").is_null()) r.recipient = literal_field(body, "recipient");
    if (body.contains("confirm")) r.confirm = required<bool>(body, "confirm");
    if (body.contains("confirmViolation")) r.confirm = required<bool>(body, "confirmViolation");
    return r;
}

json user_json(const User& u, bool with_token) {
    json j = {{"userId", u.id}, {"displayName", u.display_name}, {"roles", u.roles}};
    if (with_token) j["token"] = u.token;
    return j;
}

CaseSort parse_sort(const std::string& text) {
    CaseSort sort;
    if (text.empty()) return sort;
    std::string field = text, dir = "asc";
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        field = text.substr(0, colon);
        dir = text.substr(colon + 1);
    } else if (text.front() == '-') {
        field = text.substr(1);
        dir = "desc";
    }
    if (field == "createdAt") sort.field = CaseSort::Field::CreatedAt;
    else if (field == "status") sort.field = CaseSort::Field::Status;
    else throw ServiceError(ServiceError::Code::BadRequest, "unknown sort field '" + field + "'");
    if (dir != "asc" && dir != "desc") throw ServiceError(ServiceError::Code::BadRequest, "sort direction must be asc or desc");
    sort.descending = dir == "desc";
    return sort;
}

class Routes : public std::enable_shared_from_this<Routes> {
public:
    explicit Routes(Application& app) : app_(app) {}

    using Handler = std::function<void(const httplib::Request&, httplib::Response&, const User&)>;

    httplib::Server::Handler authed(Handler h, bool admin_only = false) {
        return [this, self = shared_from_this(), h = std::move(h), admin_only](const httplib::Request& req,
                                                                               httplib::Response& res) {
            try {
                const User user = authenticate(req);
                if (admin_only && !app_.directory().is_admin(user))
                    throw ServiceError(ServiceError::Code::PermissionDenied, "administrator role required");
                h(req, res, user);
            } catch (const ServiceError& e) {
                send_error(res, e);
            } catch (const json::exception& e) {
                send_error(res, ServiceError(ServiceError::Code::BadRequest, e.what()));
            } catch (const std::exception& e) {
                send(res, 500, {{"code", "internal"}, {"message", e.what()}});
            }
        };
    }

    void install(httplib::Server& s) {
        s.Get("/health", [](const httplib::Request&, httplib::Response& res) { send(res, 200, {{"status", "ok"}}); });

        s.Post("/models", authed([this](auto& req, auto& res, auto&) { register_model(req, res); }, true));
        s.Get("/models", authed([this](auto&, auto& res, auto&) { list_models(res); }));
        s.Get(R"(/models/([0-9a-f]+))", authed([this](auto& req, auto& res, auto&) { get_model(req, res); }));
        s.Put("/config/active-model", authed([this](auto& req, auto& res, auto&) {
                  const json body = body_of(req);
                  app_.models().set_active(required<std::string>(body, "versionId"));
                  send(res, 200, {{"activeModel", *app_.models().active()}});
              }, true));
        s.Get("/config/active-model", authed([this](auto&, auto& res, auto&) {
                  const auto active = app_.models().active();
                  send(res, 200, {{"activeModel", active ? json(*active) : json(nullptr)}});
              }));
        s.Put("/config/four-eyes", authed([this](auto& req, auto& res, auto&) {
                  const json body = body_of(req);
                  app_.directory().set_four_eyes(required<std::set<std::string>>(body, "acts"));
                  send(res, 200, {{"acts", app_.directory().four_eyes()}});
              }, true));

        s.Post("/cases", authed([this](auto& req, auto& res, auto& user) {
                   const json body = body_of(req);
                   const std::string client = body.contains("clientRef") ? required<std::string>(body, "clientRef") : "";
                   send(res, 201, record_to_json(app_.cases().create_case(client, user)));
               }));
        s.Get("/cases", authed([this](auto& req, auto& res, auto&) { list_cases(req, res); }));
        s.Get(R"(/cases/([A-Za-z0-9-]+))", authed([this](auto& req, auto& res, auto& user) {
                  send(res, 200, app_.cases().view(req.matches[1], user));
              }));
        s.Patch(R"(/cases/([A-Za-z0-9-]+)/facts)", authed([this](auto& req, auto& res, auto& user) {
                    const json body = body_of(req);
                    FactUpdate u{required<std::string>(body, "type"), body.value("arg", json(nullptr)),
                                 body.contains("value") ? body.at("value") : json(nullptr)};
                    send(res, 200, app_.cases().update_fact(req.matches[1], u, user));
                }));
        s.Post(R"(/cases/([A-Za-z0-9-]+)/acts)", authed([this](auto& req, auto& res, auto& user) {
                   perform_act(req, res, user);
               }));
        s.Post(R"(/cases/([A-Za-z0-9-]+)/simulate)", authed([this](auto& req, auto& res, auto&) {
                   const auto report = app_.cases().simulate(req.matches[1], act_request(body_of(req)));
                   send(res, 200, reasoner::report_to_json(report));
               }));
        s.Get(R"(/cases/([A-Za-z0-9-]+)/trace)", authed([this](auto& req, auto& res, auto&) {
                  json entries = json::array();
                  for (const auto& e : app_.cases().trace(req.matches[1])) entries.push_back(trace_entry_to_json(e));
                  send(res, 200, {{"caseId", req.matches[1]}, {"entries", std::move(entries)}});
              }));
        s.Get(R"(/cases/([A-Za-z0-9-]+)/events)", authed([this](auto& req, auto& res, auto&) {
                  const std::string id = req.matches[1];
                  app_.cases().record(id);
                  json events = json::array();
                  for (const auto& e : app_.cases().events(id)) events.push_back(event_to_json(e));
                  send(res, 200, {{"caseId", id}, {"events", std::move(events)}});
              }));
        s.Post(R"(/cases/([A-Za-z0-9-]+)/close)", authed([this](auto& req, auto& res, auto& user) {
                   send(res, 200, record_to_json(app_.cases().close_case(req.matches[1], user)));
               }));

        s.Post("/users", authed([this](auto& req, auto& res, auto&) {
                   const json body = body_of(req);
                   std::optional<std::string> token;
                   if (body.contains("token")) token = required<std::string>(body, "token");
                   const User u = app_.directory().create_user(
                       required<std::string>(body, "userId"), body.value("displayName", std::string()),
                       body.value("roles", std::set<std::string>{}), token);
                   send(res, 201, user_json(u, true));
               }, true));
        s.Post(R"(/users/([^/]+)/roles)", authed([this](auto& req, auto& res, auto&) {
                   const json body = body_of(req);
                   auto add = body.value("add", std::set<std::string>{});
                   const auto roles = body.value("roles", std::set<std::string>{});
                   add.insert(roles.begin(), roles.end());
                   const User u = app_.directory().update_roles(req.matches[1], add,
                                                                body.value("remove", std::set<std::string>{}));
                   send(res, 200, user_json(u, false));
               }, true));
        s.Put(R"(/roles/([^/]+)/permissions)", authed([this](auto& req, auto& res, auto&) {
                  const json body = body_of(req);
                  RolePermissions p{required<std::set<std::string>>(body, "acts"), body.value("dataEntry", false)};
                  app_.directory().set_permissions(req.matches[1], p);
                  send(res, 200, {{"role", req.matches[1]}, {"acts", p.acts}, {"dataEntry", p.data_entry}});
              }, true));
    }

private:
    Application& app_;

    User authenticate(const httplib::Request& req) {
        const std::string header = req.get_header_value("Authorization");
        constexpr std::string_view prefix = "Bearer ";
        if (header.compare(0, prefix.size(), prefix) == 0)
            if (auto u = app_.directory().authenticate(std::string_view(header).substr(prefix.size()))) return *u;
        throw ServiceError(ServiceError::Code::Unauthenticated, "missing or invalid bearer token");
    }

    void register_model(const httplib::Request& req, httplib::Response& res) {
        std::string source = req.body;
        if (req.get_header_value("Content-Type").find("application/json") != std::string::npos)
            source = required<std::string>(body_of(req), "source");
        const auto r = app_.models().register_model(source);
        send(res, r.created ? 201 : 200,
             {{"versionId", r.version.version_id}, {"registeredAt", format_timestamp(r.version.registered_at)}});
    }

    void list_models(httplib::Response& res) {
        json out = json::array();
        const auto active = app_.models().active();
        for (const auto& v : app_.models().list())
            out.push_back({{"versionId", v.version_id},
                           {"registeredAt", format_timestamp(v.registered_at)},
                           {"active", active && *active == v.version_id}});
        send(res, 200, {{"models", out}});
    }

    void get_model(const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto v = app_.models().find(id);
        if (!v) throw ServiceError(ServiceError::Code::NotFound, "unknown model version '" + id + "'");
        send(res, 200,
             {{"versionId", id},
              {"registeredAt", format_timestamp(v->registered_at)},
              {"source", app_.models().source(id).value_or("")}});
    }

    void list_cases(const httplib::Request& req, httplib::Response& res) {
        CaseFilter filter;
        if (req.has_param("status") && !req.get_param_value("status").empty()) {
            filter.status = parse_case_status(req.get_param_value("status"));
            if (!filter.status) throw ServiceError(ServiceError::Code::BadRequest, "status must be Open or Closed");
        }
        if (req.has_param("client") && !req.get_param_value("client").empty())
            filter.client_ref = req.get_param_value("client");
        if (req.has_param("q") && !req.get_param_value("q").empty()) filter.text = req.get_param_value("q");
        const CaseSort sort = parse_sort(req.has_param("sort") ? req.get_param_value("sort") : "");
        json out = json::array();
        for (const auto& r : app_.cases().list_cases(filter, sort)) out.push_back(record_to_json(r));
        send(res, 200, {{"cases", out}});
    }

    void perform_act(const httplib::Request& req, httplib::Response& res, const User& user) {
        const auto outcome = app_.cases().perform_act(req.matches[1], act_request(body_of(req)), user);
        const json report = reasoner::report_to_json(outcome.report);
        switch (outcome.kind) {
        case ActOutcome::Kind::RequiresConfirmation:
            send(res, 409,
                 {{"code", "confirmation_required"},
                  {"message", "act is not enabled; confirm to perform it anyway"},
                  {"requiresConfirmation", true},
                  {"report", report}});
            return;
        case ActOutcome::Kind::PendingApproval:
            send(res, 202,
                 {{"outcome", "pendingApproval"},
                  {"pendingApproval", true},
                  {"requestedBy", user.id},
                  {"report", report},
                  {"view", outcome.view}});
            return;
        case ActOutcome::Kind::Executed: {
            json body = {{"outcome", "executed"}, {"report", report}, {"view", outcome.view}};
            if (outcome.approved_by) body["approvedBy"] = *outcome.approved_by;
            send(res, 200, body);
            return;
        }
        }
    }
};

} // namespace

void install_routes(httplib::Server& server, Application& app) {
    // Every handler holds a reference to the Routes object; `app` must outlive the server.
    std::make_shared<Routes>(app)->install(server);
}

} // namespace normcase::service
