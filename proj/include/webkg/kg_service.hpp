#pragma once

#include <memory>
#include <string>
#include <thread>

#include "webkg/config.hpp"
#include "webkg/kg_store.hpp"
#include "webkg/kg_workflow.hpp"

namespace httplib {
class Server;
}

namespace webkg {

struct ServiceResponse {
    int status = 200;
    std::string body;
};

// Request handling for POST /call, independent of the transport.
// {"name": "...", "params": {...}} -> KgResult JSON. Malformed bodies get 400;
// unknown functions and absent entities are 200 with found=false.
class KgService {
public:
    KgService(const KgStore& store, const FunctionRegistry& registry)
        : store_(store), registry_(registry) {}

    ServiceResponse handle(const std::string& body) const;

private:
    const KgStore& store_;
    const FunctionRegistry& registry_;
};

// HTTP front end over KgService. The store and registry must outlive it.
class KgServer {
public:
    KgServer(const KgStore& store, const FunctionRegistry& registry, bool log_calls = true);
    ~KgServer();
    KgServer(const KgServer&) = delete;
    KgServer& operator=(const KgServer&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws BackendError.
    int bind(const std::string& host, int port);
    // Serves on a background thread.
    void start();
    // Serves on the calling thread until stop().
    void serve();
    void stop();

private:
    KgService service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

// Splits "host:port". Throws ConfigError.
std::pair<std::string, int> parse_bind_address(const std::string& text);

// Loads the store, binds, and serves until SIGINT/SIGTERM. Returns an ExitCode.
int cmd_kg_serve(const AppConfig& cfg, const std::string& bind_address, std::ostream& err);

}  // namespace webkg
