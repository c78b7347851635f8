// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "bigfive/corpus_readers.hpp"
#include "bigfive/error.hpp"
#include "oracles.hpp"

using namespace bigfive;
using bigfive::testing::fixture;

TEST_SUITE("corpus_readers") {
  TEST_CASE("Cornell lines: both separators, Latin-1 transcoded") {
    const auto u = read_movie_dialogs(fixture("movie_lines.txt"));
    REQUIRE(u.size() == 12);
    CHECK(u[0].id == "movie-L1045");
    CHECK(u[0].text == "They do not!");
    CHECK(u[0].conversation_id == "m0");
    CHECK_FALSE(u[0].turn_index.has_value());
    CHECK(u[10].text == "Un caf\xc3\xa9, s'il vous pla\xc3\xaet.");
    CHECK(u[11].id == "movie-L400");
    CHECK(u[11].text == "Tabs work too.");
  }

  TEST_CASE("MultiWOZ 2.2 directory and 2.1 data.json") {
    const auto dir = read_multiwoz(fixture("multiwoz22"));
    REQUIRE(dir.size() == 7);
    // dev/ sorts before train/.
    CHECK(dir[0].id == "multiwoz-MUL0001.json-0");
    CHECK(dir[2].id == "multiwoz-PMUL4398.json-0");
    CHECK(dir[2].turn_index == 0);
    const auto v21 = read_multiwoz(fixture("multiwoz21_data.json"));
    REQUIRE(v21.size() == 3);
    CHECK(v21[0].conversation_id == "SNG01856.json");
  }

  TEST_CASE("ConvAI thread and dialog layouts") {
    const auto a = read_convai(fixture("convai2017.json"));
    REQUIRE(a.size() == 3);
    CHECK(a[0].id == "convai-1375302931-0");
    CHECK(a[2].text == "Volcanoes, mostly.");
    const auto b = read_convai(fixture("convai2.json"));
    REQUIRE(b.size() == 2);
    CHECK(b[1].conversation_id == "convai2-a");
  }

  TEST_CASE("wrong format is a parse error") {
    CHECK_THROWS_AS(read_convai(fixture("multiwoz21_data.json")), ParseError);
    CHECK_THROWS_AS(read_multiwoz(fixture("convai2017.json")), ParseError);
    CHECK_THROWS_AS(read_movie_dialogs(fixture("convai2.json")), ParseError);
  }

  TEST_CASE("ingest drops blanks, samples by seed and keeps corpus order") {
    const auto all = ingest_external(CorpusSource::MOVIE_DIALOGS, fixture("movie_lines.txt"), 11, 1);
    CHECK(all.size() == 11);  // the whitespace-only line is gone
    const auto a = ingest_external(CorpusSource::MOVIE_DIALOGS, fixture("movie_lines.txt"), 4, 1);
    const auto b = ingest_external(CorpusSource::MOVIE_DIALOGS, fixture("movie_lines.txt"), 4, 1);
    CHECK(a == b);
    REQUIRE(a.size() == 4);
    for (const auto& m : a) {
      CHECK_FALSE(m.labeled());
      CHECK(m.source == CorpusSource::MOVIE_DIALOGS);
    }
    std::vector<std::size_t> pos;
    for (const auto& m : a) {
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].id == m.id) pos.push_back(i);
      }
    }
    CHECK(std::is_sorted(pos.begin(), pos.end()));
    CHECK_THROWS_AS(
        ingest_external(CorpusSource::MOVIE_DIALOGS, fixture("movie_lines.txt"), 12, 1),
        ContractViolation);
  }
}
