#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "lionets/app.hpp"
#include "lionets/errors.hpp"
#include "lionets/service.hpp"

using namespace lionets;
using namespace lionets::app;
using nlohmann::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "lionets_unit";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Run {
    int code = -1;
    std::string out, err;
};

Run lionex(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const fs::path out = kRoot / ("cli_" + std::to_string(counter) + ".out");
    const fs::path err = kRoot / ("cli_" + std::to_string(counter++) + ".err");
    fs::create_directories(kRoot);
    const std::string cmd = env + " " + LIONEX_PATH + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path build(const std::string& name, const GenerateOptions& gen, std::size_t pred_epochs,
               std::size_t dec_epochs) {
    const fs::path dir = kRoot / name;
    fs::remove_all(dir);
    std::ostringstream log;
    generate_data(dir, gen, log);
    TrainOptions p, d;
    p.epochs = pred_epochs;
    d.epochs = dec_epochs;
    train_predictor(dir, p, log);
    train_decoder(dir, d, log);
    compute_stats(dir, log);
    return dir;
}

const fs::path& text_workspace() {
    static const fs::path dir = [] {
        GenerateOptions g;
        g.kind = DataKind::text;
        g.samples = 80;
        g.max_features = 80;
        return build("text", g, 12, 40);
    }();
    return dir;
}

const fs::path& series_workspace() {
    static const fs::path dir = [] {
        GenerateOptions g;
        g.kind = DataKind::timeseries;
        g.samples = 4;
        g.sensors = 3;
        g.window = 5;
        return build("series", g, 2, 3);
    }();
    return dir;
}

const Service& text_service() {
    static const Service service(Workspace::load(text_workspace(), Stage::stats));
    return service;
}

json post(const Service& s, const std::string& path, const json& body, int expected = 200) {
    const auto r = s.handle("POST", path, body.dump());
    CHECK(r.status == expected);
    return r.body;
}

}  // namespace

TEST_CASE("cli: stage order and generated files") {
    const fs::path ws = kRoot / "cli_toy";
    fs::remove_all(ws);
    REQUIRE(lionex("-w " + ws.string() + " generate-data --kind toy --seed 7 --samples 40").code == 0);
    CHECK(fs::exists(ws / "manifest.json"));
    CHECK(fs::exists(ws / "train.csv"));
    CHECK(fs::exists(ws / "val.csv"));

    const auto early = lionex("-w " + ws.string() + " train-decoder");
    CHECK(early.code == 2);
    CHECK(early.err.find("predictor model not found") != std::string::npos);

    const auto trained = lionex("-w " + ws.string() + " train-predictor --epochs 3");
    CHECK(trained.code == 0);
    CHECK(trained.out.find("epoch 3 loss") != std::string::npos);
    REQUIRE(lionex("-w " + ws.string() + " train-decoder --epochs 5").code == 0);

    // the env var wins over the flag
    REQUIRE(lionex("-w " + (kRoot / "nowhere").string() + " compute-stats",
                   "LIONEX_WORKSPACE=" + ws.string())
                .code == 0);
    const auto stats = load_feature_stats(stats_path(ws));
    CHECK(stats.size() == load_model(predictor_path(ws)).latent_dim());

    const std::string explain = "-w " + ws.string() + " explain --instance val-1 --explainer lionets --seed 7 ";
    REQUIRE(lionex(explain + "--out " + (ws / "e1").string()).code == 0);
    REQUIRE(lionex(explain + "--out " + (ws / "e2").string()).code == 0);
    for (const char* f : {"val-1_lionets.json", "val-1_lionets_bars.csv"}) {
        CHECK(fs::exists(ws / "e1" / f));
        CHECK(slurp(ws / "e1" / f) == slurp(ws / "e2" / f));
    }

    REQUIRE(lionex("-w " + ws.string() + " explain --instance val-1 --explainer gxi --out " +
                   (ws / "e1").string())
                .code == 0);
    const auto gxi = json::parse(slurp(ws / "e1" / "val-1_gxi.json"));
    CHECK_FALSE(gxi.contains("fidelity_mae"));
    CHECK(gxi.at("importances").size() == 6);

    CHECK(lionex("-w " + ws.string() + " explain --instance val-1 --explainer lime").code == 2);
    CHECK(lionex("-w " + ws.string() + " explain --instance val-999").code == 2);
    CHECK(lionex("-w " + ws.string() + " explain").code == 2);

    REQUIRE(lionex("-w " + ws.string() + " evaluate --explainers gxi --instances 3").code == 0);
    const std::string csv = slurp(ws / "reports" / "report.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    const std::string md = slurp(ws / "reports" / "report.md");
    CHECK(std::count(md.begin(), md.end(), '\n') == 3);
    CHECK(md.find("| gxi |") != std::string::npos);
}

TEST_CASE("cli: windowed explanation writes per-sensor rows") {
    const fs::path& ws = series_workspace();
    REQUIRE(lionex("-w " + ws.string() + " explain --instance val-0 --neighbours 200 --out " +
                   (ws / "out").string())
                .code == 0);
    const std::string csv = slurp(ws / "out" / "val-0_lionets_sensors.csv");
    CHECK(csv.rfind("sensor,mean,std,min,max\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3);
    const auto doc = json::parse(slurp(ws / "out" / "val-0_lionets.json"));
    CHECK(doc.at("sensors").size() == 3);
    CHECK(doc.at("importances").size() == 15);
}

TEST_CASE("workspace validation") {
    CHECK_THROWS_AS(Workspace::load(kRoot / "missing", Stage::data), ValidationError);
    const auto ws = Workspace::load(text_workspace(), Stage::stats);
    CHECK(ws.sparse());
    CHECK(ws.feature_names().size() == ws.vocabulary().size());
    CHECK(ws.find("val-0").split == &ws.val());
    CHECK_THROWS_AS(ws.find("val-9999"), ValidationError);
    CHECK_THROWS_AS(ws.find("nonsense"), ValidationError);
    CHECK(evaluation_indices(10, 3) == std::vector<std::size_t>{0, 3, 6});
}

TEST_CASE("service: read endpoints") {
    const auto& s = text_service();
    const auto list = s.handle("GET", "/api/instances", "");
    CHECK(list.status == 200);
    REQUIRE(!list.body.empty());
    CHECK(list.body[0].at("id") == "val-0");
    CHECK(list.body[0].contains("text"));
    CHECK(s.handle("GET", "/api/instances?split=train", "").body[0].at("split") == "train");

    const auto one = s.handle("GET", "/api/instances/val-0", "");
    CHECK(one.status == 200);
    CHECK(one.body.at("instance").size() == s.workspace().vocabulary().size());
    CHECK(s.handle("GET", "/api/instances/val-9999", "").status == 404);

    const auto info = s.handle("GET", "/api/model-info", "");
    CHECK(info.status == 200);
    CHECK(info.body.dump().find("text") != std::string::npos);
}

TEST_CASE("service: predict, explain and what-if agree") {
    const auto& s = text_service();
    const double p = post(s, "/api/predict", {{"instance_id", "val-0"}}).at("prediction");
    const auto noop = post(s, "/api/whatif", {{"instance_id", "val-0"}, {"edits", json::array()}});
    CHECK(noop.at("prediction").get<double>() == p);
    CHECK(noop.at("original_prediction").get<double>() == p);

    const json req{{"instance_id", "val-0"}, {"explainer", "lionets"}, {"seed", 3}, {"neighbours", 300}};
    const auto e1 = post(s, "/api/explain", req);
    const auto e2 = post(s, "/api/explain", req);
    CHECK(e1 == e2);
    CHECK(e1.contains("counterfactuals"));
    CHECK(e1.at("explainer") == "lionets");

    const auto detail = s.handle("GET", "/api/instances/val-0", "").body;
    std::string token;
    for (const auto& t : detail.at("tokens")) {
        if (s.workspace().vocabulary().index_of(t.get<std::string>())) {
            token = t;
            break;
        }
    }
    REQUIRE(!token.empty());
    const auto removed = post(s, "/api/whatif",
                              {{"instance_id", "val-0"}, {"edits", {{{"op", "remove"}, {"token", token}}}}});
    CHECK(removed.at("prediction").get<double>() != p);
    const auto restored = post(s, "/api/whatif",
                               {{"instance_id", "val-0"},
                                {"edits", {{{"op", "remove"}, {"token", token}}, {{"op", "add"}, {"token", token}}}}});
    CHECK(restored.at("prediction").get<double>() == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("service: errors carry a message") {
    const auto& s = text_service();
    const auto check_error = [](const Service::Response& r, int status) {
        CHECK(r.status == status);
        CHECK(r.body.is_object());
        CHECK(r.body.contains("error"));
    };
    check_error(s.handle("POST", "/api/predict", "{not json"), 400);
    check_error(s.handle("POST", "/api/predict", "{}"), 400);
    check_error(s.handle("POST", "/api/predict", R"({"instance": [1, 2]})"), 400);
    check_error(s.handle("POST", "/api/explain", R"({"instance_id": "val-0", "explainer": "shap"})"), 400);
    check_error(s.handle("POST", "/api/explain", R"({"instance_id": "val-9999"})"), 400);
    check_error(s.handle("POST", "/api/whatif", R"({"instance_id": "val-0", "edits": [{"op": "swap"}]})"), 400);
    check_error(s.handle("GET", "/api/nothing", ""), 404);
}

TEST_CASE("service: sensor edits") {
    const Service s(Workspace::load(series_workspace(), Stage::stats));
    const double p = post(s, "/api/predict", {{"instance_id", "val-0"}}).at("prediction");
    const auto back = post(s, "/api/whatif",
                           {{"instance_id", "val-0"},
                            {"edits", {{{"op", "add_delta"}, {"sensor", 1}, {"from", 0}, {"to", 4}, {"delta", -0.1}},
                                       {{"op", "add_delta"}, {"sensor", 1}, {"from", 0}, {"to", 4}, {"delta", 0.1}}}}});
    CHECK(back.at("prediction").get<double>() == doctest::Approx(p).epsilon(1e-12));
    const auto bad = s.handle("POST", "/api/whatif",
                              json{{"instance_id", "val-0"},
                                   {"edits", {{{"op", "set"}, {"sensor", 7}, {"timestep", 0}, {"value", 1}}}}}
                                  .dump());
    CHECK(bad.status == 422);
    CHECK(bad.body.contains("error"));
}

TEST_CASE("http round trip and busy port") {
    HttpServer server(text_service());
    REQUIRE(server.bind("127.0.0.1", 0));
    const int port = server.port();
    std::thread loop([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    const auto list = client.Get("/api/instances");
    REQUIRE(list);
    CHECK(list->status == 200);
    CHECK(json::parse(list->body).is_array());
    const auto pred = client.Post("/api/predict", R"({"instance_id": "val-1"})", "application/json");
    REQUIRE(pred);
    CHECK(pred->status == 200);
    const auto missing = client.Get("/api/instances/val-9999");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body).contains("error"));

    const auto busy = lionex("-w " + text_workspace().string() + " serve --port " + std::to_string(port));
    CHECK(busy.code == 3);

    server.stop();
    loop.join();
}
