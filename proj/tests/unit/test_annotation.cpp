// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <thread>

#include "bigfive/annotation.hpp"
#include "bigfive/error.hpp"
#include "oracles.hpp"

using namespace bigfive;

namespace {

std::vector<LabeledMessage> messages(std::size_t n) {
  std::vector<LabeledMessage> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledMessage m;
    m.id = "msg-" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    m.text = "message number " + std::to_string(i);
    m.source = CorpusSource::CONVAI;
    out.push_back(m);
  }
  return out;
}

AnnotationRecord answer(const std::string& annotator, const std::string& message, int r = 6) {
  AnnotationRecord a;
  a.annotator_id = annotator;
  a.message_id = message;
  a.ratings = TraitMap<int>(r);
  a.difficulty = TraitMap<int>(3);
  return a;
}

AnnotationServiceOptions fixed_clock(std::size_t redundancy = 1) {
  AnnotationServiceOptions o;
  o.redundancy = redundancy;
  o.clock = [] { return std::chrono::system_clock::time_point{std::chrono::seconds(1767225600)}; };
  return o;
}

}  // namespace

TEST_SUITE("annotation_record") {
  TEST_CASE("validation names every bad field") {
    auto a = answer("ann", "m");
    a.ratings[TraitDimension::OPE] = 11;
    a.difficulty[TraitDimension::EXT] = 0;
    try {
      validate(a);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.fields() == std::vector<std::string>{"ratings.OPE", "difficulty.EXT"});
    }
  }

  TEST_CASE("JSON schema round trip and scalar difficulty") {
    auto a = answer("ann", "m", 7);
    a.submitted_at = "2026-01-01T00:00:00Z";
    CHECK(to_json_line(a) ==
          R"({"annotator_id":"ann","message_id":"m",)"
          R"("ratings":{"EXT":7,"AGR":7,"OPE":7,"CON":7,"NEU":7},)"
          R"("difficulty":{"EXT":3,"AGR":3,"OPE":3,"CON":3,"NEU":3},)"
          R"("submitted_at":"2026-01-01T00:00:00Z"})");
    CHECK(annotation_from_json(to_json_line(a)) == a);
    const auto scalar = annotation_from_json(
        R"({"annotator_id":"x","message_id":"y","ratings":{"EXT":1,"AGR":2,"OPE":3,"CON":4,"NEU":5},"difficulty":9})");
    CHECK(scalar.difficulty[TraitDimension::NEU] == 9);
    CHECK(scalar.ratings[TraitDimension::CON] == 4);
  }

  TEST_CASE("malformed bodies") {
    CHECK_THROWS_AS(annotation_from_json("not json"), ValidationError);
    CHECK_THROWS_AS(annotation_from_json("[]"), ValidationError);
    try {
      annotation_from_json(R"({"annotator_id":"x","message_id":"y","ratings":{"EXT":1},"difficulty":2})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::find(e.fields().begin(), e.fields().end(), "ratings.NEU") != e.fields().end());
    }
    CHECK_THROWS_AS(annotation_from_json(
                        R"({"annotator_id":"x","message_id":"y","ratings":{"EXT":1.5,"AGR":2,"OPE":3,"CON":4,"NEU":5},"difficulty":2})"),
                    ValidationError);
  }
}

TEST_SUITE("annotation") {
  TEST_CASE("enqueue is idempotent per message id") {
    testing::TempDir dir;
    AnnotationService svc(dir / "j.jsonl", fixed_clock());
    const auto first = svc.enqueue_tasks(messages(15));
    CHECK(first.added == 15);
    const auto again = svc.enqueue_tasks(messages(15));
    CHECK(again.added == 0);
    CHECK(again.skipped == 15);
    CHECK(again.total == 15);
    CHECK(svc.progress().pending == 15);
  }

  TEST_CASE("assignment, submission and the status lifecycle") {
    testing::TempDir dir;
    AnnotationService svc(dir / "j.jsonl", fixed_clock());
    svc.enqueue_tasks(messages(2));
    auto t = svc.next_task("ann1");
    REQUIRE(t);
    CHECK(t->message_id == "msg-00");
    CHECK(svc.task("msg-00")->status == TaskStatus::ASSIGNED);
    CHECK(svc.next_task("ann2")->message_id == "msg-01");
    CHECK_FALSE(svc.next_task("ann3").has_value());

    const auto stored = svc.submit(answer("ann1", "msg-00"));
    CHECK(stored.submitted_at == "2026-01-01T00:00:00Z");
    CHECK(svc.task("msg-00")->status == TaskStatus::DONE);
    CHECK(svc.progress().done == 1);
    CHECK(svc.progress().assigned == 1);
  }

  TEST_CASE("submission errors") {
    testing::TempDir dir;
    AnnotationService svc(dir / "j.jsonl", fixed_clock());
    svc.enqueue_tasks(messages(2));
    svc.next_task("ann1");
    CHECK_THROWS_AS(svc.submit(answer("ann1", "nope")), NotFoundError);
    CHECK_THROWS_AS(svc.submit(answer("ann2", "msg-00")), ConflictError);  // not assigned
    auto bad = answer("ann1", "msg-00");
    bad.ratings[TraitDimension::AGR] = 0;
    CHECK_THROWS_AS(svc.submit(bad), ValidationError);
    svc.submit(answer("ann1", "msg-00"));
    CHECK_THROWS_AS(svc.submit(answer("ann1", "msg-00")), ConflictError);  // duplicate
    CHECK(svc.export_annotations().size() == 1);
  }

  TEST_CASE("redundancy spreads a message over distinct annotators") {
    testing::TempDir dir;
    AnnotationService svc(dir / "j.jsonl", fixed_clock(2));
    svc.enqueue_tasks(messages(3));
    std::map<std::string, std::set<std::string>> who;
    for (int round = 0; round < 10; ++round) {
      for (std::string a : {"a", "b", "c"}) {
        if (auto t = svc.next_task(a)) {
          CHECK_FALSE(who[t->message_id].contains(a));
          who[t->message_id].insert(a);
          svc.submit(answer(a, t->message_id));
        }
      }
    }
    for (const auto& [id, set] : who) CHECK(set.size() == 2);
    CHECK(svc.progress().done == 3);
    CHECK(svc.export_annotations().size() == 6);
  }

  TEST_CASE("journal replays after restart and a torn tail is dropped") {
    testing::TempDir dir;
    {
      AnnotationService svc(dir / "j.jsonl", fixed_clock());
      svc.enqueue_tasks(messages(3));
      for (int i = 0; i < 2; ++i) {
        auto t = svc.next_task("ann");
        svc.submit(answer("ann", t->message_id));
      }
    }
    std::ofstream(dir / "j.jsonl", std::ios::app) << R"({"annotator_id":"ann","mess)";
    AnnotationService svc(dir / "j.jsonl", fixed_clock());
    svc.enqueue_tasks(messages(3));
    CHECK(svc.progress().done == 2);
    CHECK(svc.next_task("ann")->message_id == "msg-02");
    svc.submit(answer("ann", "msg-02"));
    CHECK(load_annotations(dir / "j.jsonl").size() == 3);
  }

  TEST_CASE("a corrupt line in the middle of the journal is fatal") {
    testing::TempDir dir;
    std::ofstream(dir / "j.jsonl") << "garbage\n" << to_json_line(answer("a", "b")) << "\n";
    CHECK_THROWS_AS(AnnotationService(dir / "j.jsonl", fixed_clock()), ParseError);
  }

  TEST_CASE("exports are sorted and agree with each other") {
    testing::TempDir dir;
    AnnotationService svc(dir / "j.jsonl", fixed_clock(2));
    svc.enqueue_tasks(messages(4));
    for (int round = 0; round < 4; ++round) {
      for (std::string a : {"zed", "amy"}) {
        if (auto t = svc.next_task(a)) svc.submit(answer(a, t->message_id, 3 + round));
      }
    }
    const auto all = svc.export_annotations();
    REQUIRE(all.size() == 8);
    for (std::size_t i = 1; i < all.size(); ++i) {
      CHECK(std::tie(all[i - 1].message_id, all[i - 1].annotator_id) <
            std::tie(all[i].message_id, all[i].annotator_id));
    }
    const auto jsonl = svc.export_jsonl();
    std::ofstream(dir / "export.jsonl") << jsonl;
    CHECK(load_annotations(dir / "export.jsonl") == all);
    const auto csv = svc.export_csv();
    CHECK(csv.starts_with("message_id,annotator_id,rating_EXT,rating_AGR,rating_OPE,rating_CON,"
                          "rating_NEU,difficulty_EXT,difficulty_AGR,difficulty_OPE,difficulty_CON,"
                          "difficulty_NEU,submitted_at\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  }

  TEST_CASE("registered annotators only, when a list is configured") {
    testing::TempDir dir;
    auto o = fixed_clock();
    o.annotators = {"ann1"};
    AnnotationService svc(dir / "j.jsonl", o);
    svc.enqueue_tasks(messages(1));
    CHECK_THROWS_AS(svc.next_task("intruder"), NotFoundError);
    CHECK(svc.next_task("ann1").has_value());
    CHECK_THROWS_AS(svc.next_task(""), ValidationError);
  }

  TEST_CASE("concurrent annotators never share a task") {
    testing::TempDir dir;
    AnnotationService svc(dir / "j.jsonl", fixed_clock());
    svc.enqueue_tasks(messages(200));
    std::vector<std::vector<std::string>> got(4);
    {
      std::vector<std::jthread> workers;
      for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
          const std::string me = "w" + std::to_string(w);
          while (auto t = svc.next_task(me)) {
            svc.submit(answer(me, t->message_id));
            got[w].push_back(t->message_id);
          }
        });
      }
    }
    std::set<std::string> all;
    std::size_t total = 0;
    for (const auto& g : got) {
      all.insert(g.begin(), g.end());
      total += g.size();
    }
    CHECK(total == 200);
    CHECK(all.size() == 200);
    CHECK(load_annotations(dir / "j.jsonl").size() == 200);
  }
}
