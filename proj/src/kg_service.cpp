#include "webkg/kg_service.hpp"

#include <csignal>
#include <ostream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "webkg/app.hpp"
#include "webkg/error.hpp"

namespace webkg {

namespace {

ServiceResponse bad_request(const std::string& why) {
    return {400, nlohmann::json{{"error", why}}.dump()};
}

}  // namespace

ServiceResponse KgService::handle(const std::string& body) const {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) {
        return bad_request("body is not JSON");
    }
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
        return bad_request("expected an object with a string \"name\"");
    }
    KgFunctionCall call;
    call.name = j["name"].get<std::string>();
    if (auto it = j.find("params"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            return bad_request("\"params\" must be an object");
        }
        for (const auto& [key, value] : it->items()) {
            if (value.is_string()) {
                call.params[key] = value.get<std::string>();
            } else if (value.is_number() || value.is_boolean()) {
                call.params[key] = value.dump();
            } else {
                return bad_request("parameter \"" + key + "\" must be a scalar");
            }
        }
    }
    return {200, to_json(execute_call(store_, registry_, call)).dump()};
}

KgServer::KgServer(const KgStore& store, const FunctionRegistry& registry, bool log_calls)
    : service_(store, registry), server_(std::make_unique<httplib::Server>()) {
    server_->Post("/call", [this, log_calls](const httplib::Request& req, httplib::Response& res) {
        auto r = service_.handle(req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
        if (log_calls) {
            spdlog::info("POST /call {} -> {} {}", req.body, r.status, r.body.size());
        }
    });
}

KgServer::~KgServer() { stop(); }

int KgServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw BackendError("cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void KgServer::start() {
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void KgServer::serve() { server_->listen_after_bind(); }

void KgServer::stop() {
    server_->stop();
    if (thread_.joinable()) {
        thread_.join();
    }
}

std::pair<std::string, int> parse_bind_address(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw ConfigError("bind address must look like host:port, got '" + text + "'");
    }
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) {
            throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw ConfigError("bad port in bind address '" + text + "'");
    }
    if (port < 0 || port > 65535) {
        throw ConfigError("port out of range in bind address '" + text + "'");
    }
    return {text.substr(0, colon), port};
}

int cmd_kg_serve(const AppConfig& cfg, const std::string& bind_address, std::ostream& err) {
    try {
        auto [host, port] = parse_bind_address(bind_address);
        if (cfg.kg_store_path.empty()) {
            throw ConfigError("kg_store_path is not set");
        }
        auto store = KgStore::load(cfg.kg_store_path);
        auto registry = FunctionRegistry::with_defaults();

        // Block the stop signals before httplib spawns workers so only sigwait sees them.
        sigset_t signals;
        sigemptyset(&signals);
        sigaddset(&signals, SIGINT);
        sigaddset(&signals, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &signals, nullptr);

        KgServer server(store, registry);
        int bound = server.bind(host, port);
        spdlog::info("kg service on {}:{} ({} entities, {} relations)", host, bound,
                     store.entity_count(), store.relation_count());
        server.start();
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("signal {}, shutting down", sig);
        server.stop();
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const BackendError& e) {
        err << "backend error: " << e.what() << "\n";
        return kExitBackend;
    }
}

}  // namespace webkg
