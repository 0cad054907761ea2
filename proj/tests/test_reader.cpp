#include <atomic>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "tqa/reader.hpp"

using namespace tqa;
using nlohmann::json;

namespace {

Table wide_table(std::size_t rows) {
  Table t;
  t.column_names = {"Name", "Team", "Score"};
  for (std::size_t r = 0; r < rows; ++r) {
    t.rows.push_back({"item" + std::to_string(r), "team" + std::to_string(r % 3),
                      std::to_string((r * 7) % 100)});
  }
  t.id = "wide";
  return t;
}

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tqa-reader-tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("toy reader answers count questions from the truncated view") {
  Reader reader{ReaderConfig{}};
  Table t = wide_table(5);
  auto result = reader.predict("count rows", t, 4096);
  REQUIRE(result.ok());
  CHECK(result.value().answer_text == "5");
  CHECK_FALSE(result.value().truncated_input);
  CHECK(result.value().token_logprobs == std::vector<double>{-0.1});
}

TEST_CASE("toy reader degrades exactly when truncation removes needed rows") {
  Reader reader{ReaderConfig{}};
  Table t = wide_table(50);
  const std::string question = "value of Score where Name == item45";

  auto full = reader.predict(question, t, 100000);
  REQUIRE(full.ok());
  CHECK(full.value().answer_text == t.rows[45][2]);
  CHECK(full.value().token_logprobs.front() == -0.1);

  auto clipped = reader.predict(question, t, 60);  // item45 falls outside the view
  REQUIRE(clipped.ok());
  CHECK(clipped.value().truncated_input);
  CHECK(clipped.value().answer_text == "unknown");
  CHECK(clipped.value().token_logprobs.front() == -2.0);
}

TEST_CASE("toy reader count question goes low-confidence under truncation") {
  Reader reader{ReaderConfig{}};
  Table t = wide_table(60);
  auto result = reader.predict("count rows", t, 50);
  REQUIRE(result.ok());
  CHECK(result.value().truncated_input);
  CHECK(result.value().answer_text != "60");
  CHECK(result.value().token_logprobs.front() == -2.0);
}

TEST_CASE("seq_log_prob is the arithmetic mean") {
  ReaderPrediction p;
  p.token_logprobs = {0.0, 0.0, 0.0};
  CHECK(*seq_log_prob(p) == 0.0);
  p.token_logprobs = {-0.5, -1.5};
  CHECK(*seq_log_prob(p) == -1.0);
  p.token_logprobs = {-0.1, -0.1, -0.1};
  CHECK(*seq_log_prob(p) == doctest::Approx(-0.1).epsilon(1e-12));
  p.token_logprobs = {};
  CHECK_FALSE(seq_log_prob(p).has_value());
}

TEST_CASE("replay reader misses cleanly and replays identically after warming") {
  const std::string cache = temp_path("replay_cache.jsonl");
  std::remove(cache.c_str());

  Table t = wide_table(8);
  {
    ReaderConfig record_config;
    record_config.kind = ReaderKind::toy;
    record_config.record_path = cache;
    Reader warm{record_config};
    auto first = warm.predict("count rows", t, 4096);
    REQUIRE(first.ok());
  }

  ReaderConfig replay_config;
  replay_config.kind = ReaderKind::replay;
  replay_config.cache_path = cache;
  Reader replay{replay_config};
  CHECK(replay.cache_size() == 1);

  auto hit = replay.predict("count rows", t, 4096);
  REQUIRE(hit.ok());
  CHECK(hit.value().answer_text == "8");
  CHECK(hit.value().backend == "replay");

  auto second = replay.predict("count rows", t, 4096);
  REQUIRE(second.ok());
  CHECK(second.value().answer_text == hit.value().answer_text);
  CHECK(second.value().token_logprobs == hit.value().token_logprobs);

  auto miss = replay.predict("different question", t, 4096);
  REQUIRE_FALSE(miss.ok());
  CHECK(miss.error().kind == BackendError::Kind::cache_miss);

  // the same question over a differently truncated view keys separately
  auto other_budget = replay.predict("count rows", t, 20);
  REQUIRE_FALSE(other_budget.ok());
  CHECK(other_budget.error().kind == BackendError::Kind::cache_miss);
}

TEST_CASE("remote reader round-trips the scoring protocol and caches responses") {
  std::atomic<int> hits{0};
  json last_request;
  httplib::Server server;
  server.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    last_request = json::parse(req.body);
    json reply;
    reply["answer"] = "42";
    reply["token_logprobs"] = {-0.25, -0.75};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&]() { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string cache = temp_path("remote_cache.jsonl");
  std::remove(cache.c_str());

  ReaderConfig config;
  config.kind = ReaderKind::remote;
  config.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/score";
  config.cache_path = cache;
  Reader reader{config};

  Table t = wide_table(30);
  auto first = reader.predict("count rows", t, 64);
  REQUIRE(first.ok());
  CHECK(first.value().answer_text == "42");
  CHECK(first.value().token_logprobs == std::vector<double>{-0.25, -0.75});
  CHECK(first.value().truncated_input);  // budget 64 clips a 30-row table
  CHECK(hits == 1);

  // request shape: question, table {columns, rows}, max_tokens_context
  CHECK(last_request["question"] == "count rows");
  CHECK(last_request["max_tokens_context"] == 64);
  REQUIRE(last_request["table"].is_object());
  CHECK(last_request["table"]["columns"].size() == 3);
  // only the rows that survive truncation are sent
  CHECK(last_request["table"]["rows"].size() < 30);

  auto again = reader.predict("count rows", t, 64);
  REQUIRE(again.ok());
  CHECK(hits == 1);  // warmed cache, zero further network calls

  Reader rewarmed{config};
  auto from_disk = rewarmed.predict("count rows", t, 64);
  REQUIRE(from_disk.ok());
  CHECK(hits == 1);

  server.stop();
  server_thread.join();
}

TEST_CASE("remote reader adapts total-score responses and flags malformed ones") {
  httplib::Server server;
  server.Post("/total", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"answer":"x","total_logprob":-3.0,"token_count":3})",
                    "application/json");
  });
  server.Post("/broken", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"answer":"x"})", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&]() { server.listen_after_bind(); });
  server.wait_until_ready();

  Table t = wide_table(3);
  {
    ReaderConfig config;
    config.kind = ReaderKind::remote;
    config.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/total";
    Reader reader{config};
    auto result = reader.predict("q", t, 4096);
    REQUIRE(result.ok());
    CHECK(result.value().token_logprobs == std::vector<double>{-1.0, -1.0, -1.0});
  }
  {
    ReaderConfig config;
    config.kind = ReaderKind::remote;
    config.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/broken";
    Reader reader{config};
    auto result = reader.predict("q", t, 4096);
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().kind == BackendError::Kind::malformed_response);
  }

  server.stop();
  server_thread.join();
}

TEST_CASE("remote reader reports unreachable endpoints as network errors") {
  ReaderConfig config;
  config.kind = ReaderKind::remote;
  config.endpoint_url = "http://127.0.0.1:1/never";
  config.timeout_ms = 500;
  Reader reader{config};
  auto result = reader.predict("q", wide_table(2), 4096);
  REQUIRE_FALSE(result.ok());
  CHECK(result.error().kind == BackendError::Kind::network);
}
