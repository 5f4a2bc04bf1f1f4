#include "lionets/service.hpp"

#include <httplib.h>

#include <vector>

#include "lionets/errors.hpp"
#include "lionets/what_if.hpp"

namespace lionets::app {

using nlohmann::json;

namespace {

class RequestError : public Error {
public:
    RequestError(int status, const std::string& what) : Error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

Service::Response error_response(int status, const std::string& message) {
    return {status, json{{"error", message}}};
}

Vec read_vector(const json& value, const char* field) {
    if (!value.is_array()) throw RequestError(400, std::string(field) + " must be an array of numbers");
    Vec out;
    for (const auto& v : value) {
        if (!v.is_number()) throw RequestError(400, std::string(field) + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

template <typename T>
T field_or(const json& req, const char* name, T fallback) {
    if (!req.contains(name)) return fallback;
    try {
        return req.at(name).get<T>();
    } catch (const json::exception&) {
        throw RequestError(400, std::string("field '") + name + "' has the wrong type");
    }
}

template <typename T>
T required_field(const json& req, const char* name) {
    if (!req.contains(name)) throw RequestError(400, std::string("missing field '") + name + "'");
    return field_or<T>(req, name, T{});
}

std::string query_value(const std::string& query, const std::string& key) {
    std::size_t start = 0;
    while (start < query.size()) {
        std::size_t end = query.find('&', start);
        if (end == std::string::npos) end = query.size();
        const std::string pair = query.substr(start, end - start);
        const std::size_t eq = pair.find('=');
        if (eq != std::string::npos && pair.compare(0, eq, key) == 0 && eq == key.size()) {
            return pair.substr(eq + 1);
        }
        start = end + 1;
    }
    return {};
}

}  // namespace

Service::Service(Workspace ws) : ws_(std::move(ws)) {}

Service::Response Service::handle(std::string_view method, std::string_view target,
                                  std::string_view body) const {
    std::string_view path = target, query;
    if (const auto q = target.find('?'); q != std::string_view::npos) {
        path = target.substr(0, q);
        query = target.substr(q + 1);
    }
    try {
        json req;
        if (method == "POST") {
            try {
                req = body.empty() ? json::object() : json::parse(body);
            } catch (const json::parse_error& e) {
                throw RequestError(400, "request body is not valid JSON (byte " + std::to_string(e.byte) + ")");
            }
            if (!req.is_object()) throw RequestError(400, "request body must be a JSON object");
        }
        constexpr std::string_view instances_prefix = "/api/instances/";
        if (method == "GET" && path == "/api/instances") {
            const std::string split = query_value(std::string(query), "split");
            if (!split.empty() && split != "val") {
                Response r = instances();
                json filtered = json::array();
                for (const auto& item : ws_.split(split).ids) {
                    const auto ref = ws_.find(item);
                    filtered.push_back({{"id", item},
                                        {"split", split},
                                        {"label", ref.split->y[ref.index]},
                                        {"prediction", ws_.predict(ref.split->x.row(ref.index))}});
                }
                r.body = filtered;
                return r;
            }
            return instances();
        }
        if (method == "GET" && path.starts_with(instances_prefix)) {
            return instance(path.substr(instances_prefix.size()));
        }
        if (method == "GET" && path == "/api/model-info") return model_info();
        if (method == "POST" && path == "/api/predict") return predict(req);
        if (method == "POST" && path == "/api/explain") return explain(req);
        if (method == "POST" && path == "/api/whatif") return whatif(req);
        return error_response(404, "no route for " + std::string(method) + " " + std::string(path));
    } catch (const RequestError& e) {
        return error_response(e.status(), e.what());
    } catch (const ValidationError& e) {
        return error_response(400, e.what());
    } catch (const DomainError& e) {
        return error_response(422, e.what());
    } catch (const DimensionError& e) {
        return error_response(422, e.what());
    } catch (const DegenerateInputError& e) {
        return error_response(422, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

Service::Response Service::instances() const {
    json out = json::array();
    const Split& val = ws_.val();
    for (std::size_t i = 0; i < val.ids.size(); ++i) {
        json item{{"id", val.ids[i]},
                  {"split", val.name},
                  {"label", val.y[i]},
                  {"prediction", ws_.predict(val.x.row(i))}};
        if (!val.texts.empty()) item["text"] = val.texts[i];
        out.push_back(std::move(item));
    }
    return {200, out};
}

Service::Response Service::instance(std::string_view id) const {
    Workspace::InstanceRef ref;
    try {
        ref = ws_.find(id);
    } catch (const ValidationError& e) {
        throw RequestError(404, e.what());
    }
    const auto x = ref.split->x.row(ref.index);
    json out{{"id", std::string(id)},
             {"split", ref.split->name},
             {"label", ref.split->y[ref.index]},
             {"prediction", ws_.predict(x)},
             {"instance", Vec(x.begin(), x.end())}};
    if (!ref.split->texts.empty()) {
        const std::string& raw = ref.split->texts[ref.index];
        out["text"] = raw;
        out["tokens"] = data::tokenize(data::preprocess_text(raw));
    }
    if (ws_.manifest().kind == DataKind::timeseries) {
        out["window"] = ws_.manifest().window;
        out["sensors"] = ws_.manifest().sensors;
    }
    return {200, out};
}

Service::Response Service::predict(const json& req) const {
    Vec x;
    if (req.contains("instance_id")) {
        const auto ref = ws_.find(required_field<std::string>(req, "instance_id"));
        const auto row = ref.split->x.row(ref.index);
        x.assign(row.begin(), row.end());
    } else if (req.contains("text")) {
        x = data::vectorize(ws_.vocabulary(), required_field<std::string>(req, "text"));
    } else if (req.contains("instance")) {
        x = read_vector(req.at("instance"), "instance");
    } else {
        throw RequestError(400, "predict needs 'instance', 'text' or 'instance_id'");
    }
    if (x.size() != ws_.manifest().features) {
        throw RequestError(400, "instance has " + std::to_string(x.size()) + " features, expected " +
                                    std::to_string(ws_.manifest().features));
    }
    require_finite(x, "instance");
    return {200, json{{"prediction", ws_.predict(x)}}};
}

Service::Response Service::explain(const json& req) const {
    ExplainSettings settings;
    settings.explainer = parse_explainer(field_or<std::string>(req, "explainer", "lionets"));
    settings.seed = field_or<std::uint64_t>(req, "seed", ws_.manifest().seed);
    settings.neighbours = field_or<std::size_t>(req, "neighbours", settings.neighbours);
    settings.lime_samples = field_or<std::size_t>(req, "lime_samples", settings.lime_samples);
    settings.fast = field_or<bool>(req, "fast", false);
    const auto top_k = field_or<std::size_t>(req, "top_k", 10);
    if (settings.neighbours == 0 || settings.lime_samples == 0 || top_k == 0) {
        throw RequestError(400, "neighbours, lime_samples and top_k must be positive");
    }

    std::string id = "custom";
    Vec x;
    if (req.contains("instance_id")) {
        id = required_field<std::string>(req, "instance_id");
        const auto ref = ws_.find(id);
        const auto row = ref.split->x.row(ref.index);
        x.assign(row.begin(), row.end());
    } else if (req.contains("instance")) {
        x = read_vector(req.at("instance"), "instance");
    } else if (req.contains("text")) {
        x = data::vectorize(ws_.vocabulary(), required_field<std::string>(req, "text"));
    } else {
        throw RequestError(400, "explain needs 'instance_id', 'instance' or 'text'");
    }
    return {200, explanation_json(ws_, id, x, settings, top_k)};
}

Service::Response Service::whatif(const json& req) const {
    const std::string id = required_field<std::string>(req, "instance_id");
    const auto ref = ws_.find(id);
    const auto original = ref.split->x.row(ref.index);
    const json edits = req.contains("edits") ? req.at("edits") : json::array();
    if (!edits.is_array()) throw RequestError(400, "edits must be an array");

    WhatIfResult result;
    const Manifest& m = ws_.manifest();
    if (m.kind == DataKind::text) {
        std::vector<TokenEdit> token_edits;
        for (const auto& e : edits) {
            const auto op = required_field<std::string>(e, "op");
            TokenEdit edit;
            if (op == "remove") {
                edit.kind = TokenEdit::Kind::remove;
            } else if (op == "add") {
                edit.kind = TokenEdit::Kind::add;
            } else {
                throw RequestError(400, "unknown text edit op '" + op + "'");
            }
            edit.token = required_field<std::string>(e, "token");
            token_edits.push_back(std::move(edit));
        }
        result = what_if_text(ws_.predictor(), ws_.vocabulary(), ref.split->texts[ref.index], token_edits);
    } else {
        // Dense rows are treated as a window of one timestep with one "sensor" per feature.
        const bool series = m.kind == DataKind::timeseries;
        const std::size_t window = series ? m.window : 1;
        const std::size_t sensors = series ? m.sensors : m.features;
        const char* unit_field = series ? "sensor" : "feature";
        std::vector<SensorEdit> sensor_edits;
        for (const auto& e : edits) {
            const auto op = required_field<std::string>(e, "op");
            SensorEdit edit;
            const auto unit = required_field<long long>(e, unit_field);
            if (unit < 0) throw RequestError(422, std::string(unit_field) + " out of range");
            edit.sensor = static_cast<std::size_t>(unit);
            if (op == "set") {
                edit.kind = SensorEdit::Kind::set;
                const auto t = series ? required_field<long long>(e, "timestep") : 0;
                if (t < 0) throw RequestError(422, "timestep out of range");
                edit.first_timestep = edit.last_timestep = static_cast<std::size_t>(t);
                edit.value = required_field<double>(e, "value");
            } else if (op == "add_delta") {
                edit.kind = SensorEdit::Kind::add_delta;
                const auto from = series ? required_field<long long>(e, "from") : 0;
                const auto to = series ? required_field<long long>(e, "to") : 0;
                if (from < 0 || to < 0) throw RequestError(422, "timestep out of range");
                edit.first_timestep = static_cast<std::size_t>(from);
                edit.last_timestep = static_cast<std::size_t>(to);
                edit.value = required_field<double>(e, "delta");
            } else {
                throw RequestError(400, "unknown edit op '" + op + "'");
            }
            sensor_edits.push_back(edit);
        }
        result = what_if_series(ws_.predictor(), original, window, sensors, sensor_edits);
    }
    json out{{"instance_id", id},
             {"original_prediction", ws_.predict(original)},
             {"prediction", result.prediction},
             {"instance", result.instance},
             {"warnings", result.warnings}};
    if (m.kind == DataKind::text) out["text"] = result.text;
    return {200, out};
}

Service::Response Service::model_info() const {
    const Manifest& m = ws_.manifest();
    const MLPModel& p = ws_.predictor();
    json layers = json::array();
    for (const auto& l : p.layers) {
        layers.push_back({{"width", l.out_dim()}, {"activation", lionets::to_string(l.activation)}});
    }
    json out{{"kind", to_string(m.kind)},
             {"task", lionets::to_string(m.task)},
             {"seed", m.seed},
             {"input_dim", p.input_dim},
             {"latent_dim", p.latent_dim()},
             {"output_dim", p.output_dim()},
             {"layers", layers},
             {"explainers", m.kind == DataKind::toy ? json{"lionets", "gxi"} : json{"lionets", "lime", "gxi"}}};
    if (m.kind == DataKind::timeseries) {
        out["window"] = m.window;
        out["sensors"] = m.sensors;
    }
    if (m.kind == DataKind::text) out["vocabulary_size"] = ws_.vocabulary().size();
    return {200, out};
}

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(const Service& service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
    auto route = [&service](const httplib::Request& req, httplib::Response& res) {
        std::string target = req.path;
        if (!req.params.empty()) {
            target += '?';
            bool first = true;
            for (const auto& [k, v] : req.params) {
                if (!first) target += '&';
                target += k + "=" + v;
                first = false;
            }
        }
        const auto r = service.handle(req.method, target, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    // httplib's default enables SO_REUSEPORT, which lets a second server share a busy port.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    impl_->server.Get(R"(/api/.*)", route);
    impl_->server.Post(R"(/api/.*)", route);
    if (static_dir) impl_->server.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        return port_ > 0;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace lionets::app
