#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lionets/app.hpp"

namespace lionets::app {

/// JSON API over a loaded workspace. Every handler is read-only.
class Service {
public:
    explicit Service(Workspace ws);

    struct Response {
        int status = 200;
        nlohmann::json body;
    };

    /// Routes one request; `body` is the raw request payload.
    Response handle(std::string_view method, std::string_view path, std::string_view body) const;

    const Workspace& workspace() const noexcept { return ws_; }

private:
    Response instances() const;
    Response instance(std::string_view id) const;
    Response predict(const nlohmann::json& req) const;
    Response explain(const nlohmann::json& req) const;
    Response whatif(const nlohmann::json& req) const;
    Response model_info() const;

    Workspace ws_;
};

/// Thin HTTP front end for a Service.
class HttpServer {
public:
    explicit HttpServer(const Service& service, std::optional<std::filesystem::path> static_dir = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// False when the port cannot be bound. Port 0 picks a free port.
    bool bind(const std::string& host, int port);
    int port() const noexcept { return port_; }
    /// Blocks until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace lionets::app
