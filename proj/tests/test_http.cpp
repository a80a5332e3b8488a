#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "codenat/http.hpp"
#include "support/fixtures.hpp"

using namespace codenat;

namespace {

// in-process server fixture
struct LocalServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~LocalServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }

    std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port) + path;
    }
};

}  // namespace

TEST_CASE("remote victim round-trips classification outputs") {
    LocalServer ls;
    ls.server.Post("/predict", [](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        bool has_marker =
            body["code"].get<std::string>().find("total") != std::string::npos;
        nlohmann::json out;
        out["label"] = has_marker ? 1 : 0;
        out["probs"] = has_marker ? std::vector<double>{0.12, 0.88}
                                  : std::vector<double>{0.7, 0.3};
        res.set_content(out.dump(), "application/json");
    });
    ls.start();

    RemoteVictimConfig config;
    config.url = ls.url("/predict");
    RemoteVictim victim(config);

    auto hit = CodeSnippet::parse("int total = 4;", Lang::C);
    auto out = victim.query(hit);
    CHECK(out.label == 1);
    CHECK(out.probs[1] == Catch::Approx(0.88));
    CHECK(victim.query_count() == 1);

    auto miss = CodeSnippet::parse("int other = 4;", Lang::C);
    CHECK(victim.query(miss).label == 0);
    CHECK(victim.query_count() == 2);
}

TEST_CASE("remote victim pair and generation wire formats") {
    LocalServer ls;
    ls.server.Post("/pair", [](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        REQUIRE(body.contains("code1"));
        REQUIRE(body.contains("code2"));
        res.set_content(R"({"label":1,"probs":[0.25,0.75]})", "application/json");
    });
    ls.server.Post("/summarize", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"text":"adds two numbers"})", "application/json");
    });
    ls.start();

    RemoteVictimConfig pair_config;
    pair_config.url = ls.url("/pair");
    pair_config.task.kind = TaskKind::PairClassification;
    RemoteVictim pair_victim(pair_config);
    auto a = CodeSnippet::parse("int a;", Lang::C);
    auto b = CodeSnippet::parse("int b;", Lang::C);
    CHECK(pair_victim.query(a, b).label == 1);

    RemoteVictimConfig gen_config;
    gen_config.url = ls.url("/summarize");
    gen_config.task.kind = TaskKind::Generation;
    RemoteVictim gen_victim(gen_config);
    CHECK(gen_victim.query(a).text == "adds two numbers");
}

TEST_CASE("remote victim failure modes") {
    LocalServer ls;
    ls.server.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html>not json</html>", "text/html");
    });
    ls.server.Post("/flaky", [](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    ls.server.Post("/badprobs", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"label":0,"probs":[0.9,0.9]})", "application/json");
    });
    ls.start();

    RemoteVictimConfig config;
    config.url = ls.url("/garbage");
    config.max_retries = 1;
    RemoteVictim garbage(config);
    auto code = CodeSnippet::parse("int a;", Lang::C);
    try {
        garbage.query(code);
        FAIL("expected MalformedResponse");
    } catch (const MalformedResponse& e) {
        CHECK(std::string(e.what()).find("not json") != std::string::npos);
    }

    config.url = ls.url("/flaky");
    RemoteVictim flaky(config);
    CHECK_THROWS_AS(flaky.query(code), TransportError);

    config.url = ls.url("/badprobs");
    RemoteVictim badprobs(config);
    CHECK_THROWS_AS(badprobs.query(code), MalformedResponse);

    config.url = "";
    CHECK_THROWS_AS(RemoteVictim(config), ConfigError);
}

TEST_CASE("http chat client speaks the chat wire format") {
    LocalServer ls;
    ls.server.Post("/v1/chat/completions",
                   [](const httplib::Request& req, httplib::Response& res) {
                       auto body = nlohmann::json::parse(req.body);
                       REQUIRE(body["messages"].size() == 2);
                       REQUIRE(body["messages"][0]["role"] == "system");
                       REQUIRE(body["messages"][1]["role"] == "user");
                       REQUIRE(body["temperature"].get<double>() == 0.0);
                       REQUIRE(body["top_p"].get<double>() == 0.9);
                       nlohmann::json out;
                       out["choices"] = {{{"message",
                                           {{"content",
                                             R"({"Analysis":"ok","Score":3})"}}}}};
                       res.set_content(out.dump(), "application/json");
                   });
    ls.start();

    JudgeConfig config;
    config.endpoint = ls.url("/v1/chat/completions");
    HttpChatClient client(config);
    auto code = CodeSnippet::parse("int f(){return 1;}", Lang::C);
    auto outcome = judge_code(code, nullptr, client, config);
    CHECK(outcome.verdict.score == 3);
}

TEST_CASE("bearer token is taken from the environment") {
    LocalServer ls;
    std::string seen_auth;
    ls.server.Post("/chat", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        res.set_content(R"({"content":"Score: 5"})", "application/json");
    });
    ls.start();

    setenv("CODENAT_TEST_TOKEN", "sk-sandbox-123", 1);
    JudgeConfig config;
    config.endpoint = ls.url("/chat");
    HttpChatClient client(config, "CODENAT_TEST_TOKEN");
    CHECK(client.complete("sys", "user") == "Score: 5");
    CHECK(seen_auth == "Bearer sk-sandbox-123");
    unsetenv("CODENAT_TEST_TOKEN");
}
