// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <httplib.h>

#include <json.hpp>

#include "bigfive/annotation_server.hpp"
#include "oracles.hpp"

using namespace bigfive;
using json = nlohmann::json;

namespace {

std::string body(const std::string& annotator, const std::string& message, int rating = 7) {
  json j = {{"annotator_id", annotator}, {"message_id", message}, {"difficulty", 4}};
  for (const char* t : {"EXT", "AGR", "OPE", "CON", "NEU"}) j["ratings"][t] = rating;
  return j.dump();
}

struct Fixture {
  testing::TempDir dir;
  AnnotationService service{dir / "journal.jsonl", {}};
  AnnotationServer server{service};
  int port = 0;
  std::unique_ptr<httplib::Client> client;

  Fixture() {
    std::vector<LabeledMessage> ms;
    for (int i = 0; i < 3; ++i) {
      LabeledMessage m;
      m.id = "real-" + std::to_string(i);
      m.text = "text " + std::to_string(i);
      m.source = CorpusSource::MULTIWOZ;
      ms.push_back(m);
    }
    service.enqueue_tasks(ms);
    port = server.bind("127.0.0.1", 0);
    server.start();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
};

}  // namespace

TEST_SUITE("annotation_server") {
  TEST_CASE("task loop over HTTP") {
    Fixture f;
    CHECK(f.port > 0);
    auto r = f.client->Get("/api/tasks/next?annotator=ann1");
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto task = json::parse(r->body);
    CHECK(task["message_id"] == "real-0");
    CHECK(task["text"] == "text 0");
    CHECK(task["assigned_to"] == "ann1");

    auto post = f.client->Post("/api/annotations", body("ann1", "real-0"), "application/json");
    REQUIRE(post);
    CHECK(post->status == 201);
    CHECK(json::parse(post->body)["message_id"] == "real-0");

    auto dup = f.client->Post("/api/annotations", body("ann1", "real-0"), "application/json");
    CHECK(dup->status == 409);
    auto unknown = f.client->Post("/api/annotations", body("ann1", "nope"), "application/json");
    CHECK(unknown->status == 404);
    auto bad = f.client->Post("/api/annotations", body("ann1", "real-1", 12), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["fields"][0] == "ratings.EXT");
    auto garbage = f.client->Post("/api/annotations", "{", "application/json");
    CHECK(garbage->status == 400);

    auto progress = json::parse(f.client->Get("/api/progress")->body);
    CHECK(progress["done"] == 1);
    CHECK(progress["total"] == 3);
    CHECK(progress["annotations"] == 1);
  }

  TEST_CASE("204 when nothing is left; 400 without an annotator") {
    Fixture f;
    for (int i = 0; i < 3; ++i) {
      auto r = f.client->Get("/api/tasks/next?annotator=solo");
      REQUIRE(r->status == 200);
      const auto id = json::parse(r->body)["message_id"].get<std::string>();
      CHECK(f.client->Post("/api/annotations", body("solo", id), "application/json")->status == 201);
    }
    CHECK(f.client->Get("/api/tasks/next?annotator=solo")->status == 204);
    CHECK(f.client->Get("/api/tasks/next")->status == 400);
  }

  TEST_CASE("exports in both formats") {
    Fixture f;
    f.client->Get("/api/tasks/next?annotator=a");
    f.client->Post("/api/annotations", body("a", "real-0"), "application/json");
    auto jsonl = f.client->Get("/api/export?format=jsonl");
    CHECK(jsonl->status == 200);
    CHECK(jsonl->body == f.service.export_jsonl());
    auto csv = f.client->Get("/api/export?format=csv");
    CHECK(csv->status == 200);
    CHECK(csv->get_header_value("Content-Type") == "text/csv");
    CHECK(csv->body == f.service.export_csv());
    CHECK(f.client->Get("/api/export?format=xml")->status == 400);
  }
}
