// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bigfive/classifier.hpp"
#include "bigfive/corpus_generator.hpp"
#include "bigfive/encoder.hpp"
#include "bigfive/error.hpp"
#include "bigfive/mock_provider.hpp"
#include "oracles.hpp"

using namespace bigfive;

namespace {

const std::vector<LabeledMessage>& small_corpus() {
  static const auto corpus = [] {
    CorpusPlan plan;
    plan.n_scripts = 2;
    plan.n_exchanges = 5;
    auto provider = mock_provider(0);
    return generate_corpus(*provider, plan);
  }();
  return corpus;
}

HashedNgramEncoder small_encoder() {
  HashedNgramOptions o;
  o.buckets = 256;
  o.output_dim = 32;
  return HashedNgramEncoder(o);
}

TrainConfig quick(TrainingStrategy s, std::uint64_t seed = 1) {
  TrainConfig c;
  c.strategy = s;
  c.epochs = 3;
  c.batch_size = 16;
  c.seed = seed;
  return c;
}

void check_scores_equal(const TraitScores& a, const TraitScores& b, double tol) {
  for (auto t : kAllTraits) {
    CHECK(std::abs(a[t].positive - b[t].positive) <= tol);
    CHECK(std::abs(a[t].negative - b[t].negative) <= tol);
  }
}

constexpr std::array kStrategies = {TrainingStrategy::TOGETHER, TrainingStrategy::SEPARATE,
                                    TrainingStrategy::ADAPTER};

}  // namespace

TEST_SUITE("classifier") {
  TEST_CASE("TOGETHER is one model with a ten-way head") {
    const auto enc = small_encoder();
    const auto b = train(small_corpus(), enc, quick(TrainingStrategy::TOGETHER));
    CHECK(b.model_count() == 1);
    CHECK(b.head_width() == 10);
    CHECK(b.model_seeds().size() == 1);
    CHECK(&b.backbone(TraitDimension::EXT) == &b.backbone(TraitDimension::NEU));
  }

  TEST_CASE("SEPARATE is five binary models, each with its own encoder") {
    const auto enc = small_encoder();
    const auto b = train(small_corpus(), enc, quick(TrainingStrategy::SEPARATE));
    CHECK(b.model_count() == 5);
    CHECK(b.head_width() == 2);
    CHECK(b.model_seeds().size() == 5);
    CHECK(&b.backbone(TraitDimension::EXT) != &b.backbone(TraitDimension::AGR));
    // Fine-tuned, so each copy has moved away from the base weights.
    for (auto t : kAllTraits) {
      CHECK((b.backbone(t).encode("hello") - enc.encode("hello")).norm() > 0.0);
    }
  }

  TEST_CASE("ADAPTER leaves the backbone untouched and trains only adapters and heads") {
    const auto enc = small_encoder();
    const auto b = train(small_corpus(), enc, quick(TrainingStrategy::ADAPTER));
    CHECK(b.model_count() == 5);
    CHECK(b.head_width() == 2);
    CHECK(b.adapter_bottleneck() == 32 / 16);
    const auto& frozen = b.backbone(TraitDimension::OPE);
    CHECK_FALSE(frozen.trainable());
    const auto before = enc.parameters();
    const auto after = frozen.parameters();
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i]->value == after[i]->value);

    const std::size_t adapter = (32 * 2 + 2) + (2 * 32 + 32);
    const std::size_t head = 32 * 2 + 2;
    CHECK(b.trainable_parameter_count() == 5 * (adapter + head));
    CHECK(b.total_parameter_count() == b.trainable_parameter_count() + enc.parameter_count());
  }

  TEST_CASE("parallel scoring equals per-model sequential scoring") {
    const auto enc = small_encoder();
    for (auto s : kStrategies) {
      const auto b = train(small_corpus(), enc, quick(s));
      for (std::size_t i = 0; i < small_corpus().size(); i += 17) {
        const auto& text = small_corpus()[i].text;
        check_scores_equal(b.score(text), b.score_sequential(text), 1e-12);
      }
    }
  }

  TEST_CASE("training is deterministic and independent of worker count") {
    const auto enc = small_encoder();
    for (auto s : kStrategies) {
      auto c = quick(s);
      const auto a = train(small_corpus(), enc, c);
      c.workers = 3;
      const auto b = train(small_corpus(), enc, c);
      const auto& text = small_corpus()[5].text;
      check_scores_equal(a.score(text), b.score(text), 0.0);
    }
  }

  TEST_CASE("retraining one trait leaves the other four alone") {
    const auto enc = small_encoder();
    for (auto s : {TrainingStrategy::SEPARATE, TrainingStrategy::ADAPTER}) {
      const auto base = train(small_corpus(), enc, quick(s, 1));
      const auto redo = retrain_trait(base, TraitDimension::CON, small_corpus(), enc, quick(s, 99));
      const auto& text = small_corpus()[3].text;
      const auto before = base.score(text);
      const auto after = redo.score(text);
      for (auto t : kAllTraits) {
        if (t == TraitDimension::CON) {
          CHECK(before[t].positive != after[t].positive);
        } else {
          CHECK(before[t].positive == after[t].positive);
          CHECK(before[t].negative == after[t].negative);
        }
      }
      CHECK(redo.model_seeds()[3] != base.model_seeds()[3]);
      CHECK(redo.model_seeds()[0] == base.model_seeds()[0]);
    }
    const auto together = train(small_corpus(), enc, quick(TrainingStrategy::TOGETHER));
    CHECK_THROWS_AS(retrain_trait(together, TraitDimension::CON, small_corpus(), enc,
                                  quick(TrainingStrategy::TOGETHER)),
                    ContractViolation);
  }

  TEST_CASE("training set must cover all ten classes") {
    std::vector<LabeledMessage> partial;
    for (const auto& m : small_corpus()) {
      if (!(m.trait == TraitDimension::AGR && m.polarity == Polarity::NEGATIVE)) {
        partial.push_back(m);
      }
    }
    try {
      check_training_set(partial);
      FAIL("expected ContractViolation");
    } catch (const ContractViolation& e) {
      CHECK(std::string(e.what()).find("AGR") != std::string::npos);
    }
    CHECK_THROWS_AS(check_training_set({}), ContractViolation);
  }

  TEST_CASE("fingerprint ignores order but not content") {
    auto shuffled = small_corpus();
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(training_fingerprint(shuffled) == training_fingerprint(small_corpus()));
    CHECK(training_fingerprint(small_corpus()).size() == 16);
    shuffled[0].text += "!";
    CHECK(training_fingerprint(shuffled) != training_fingerprint(small_corpus()));
  }

  TEST_CASE("ties resolve to NEGATIVE") {
    CHECK(decide_polarity({0.4, 0.4}) == Polarity::NEGATIVE);
    CHECK(decide_polarity({0.5, 0.4}) == Polarity::POSITIVE);
    CHECK(decide_polarity({-0.5, -0.4}) == Polarity::NEGATIVE);
  }

  TEST_CASE("config validation") {
    TrainConfig c;
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), ContractViolation);
    c = {};
    c.learning_rate = -1;
    CHECK_THROWS_AS(c.validate(), ContractViolation);
    CHECK(parse_strategy("adapter") == TrainingStrategy::ADAPTER);
    CHECK(parse_strategy("Together") == TrainingStrategy::TOGETHER);
    CHECK_FALSE(parse_strategy("mixture").has_value());
  }
}

TEST_SUITE("bundle") {
  TEST_CASE("save then load reproduces scores bit for bit") {
    testing::TempDir dir;
    const auto enc = small_encoder();
    for (auto s : kStrategies) {
      const auto b = train(small_corpus(), enc, quick(s));
      save_bundle(b, dir / "m.bundle");
      const auto loaded = load_bundle(dir / "m.bundle");
      CHECK(loaded.strategy() == s);
      CHECK(loaded.fingerprint() == b.fingerprint());
      CHECK(loaded.model_seeds() == b.model_seeds());
      CHECK(loaded.config().epochs == 3);
      for (std::size_t i = 0; i < small_corpus().size(); i += 23) {
        check_scores_equal(loaded.score(small_corpus()[i].text), b.score(small_corpus()[i].text),
                           0.0);
      }
    }
  }

  TEST_CASE("clone is independent and equal") {
    const auto enc = small_encoder();
    const auto b = train(small_corpus(), enc, quick(TrainingStrategy::SEPARATE));
    const auto c = b.clone();
    check_scores_equal(b.score("anything"), c.score("anything"), 0.0);
  }

  TEST_CASE("corruption, truncation and foreign files are rejected") {
    testing::TempDir dir;
    const auto enc = small_encoder();
    save_bundle(train(small_corpus(), enc, quick(TrainingStrategy::ADAPTER)), dir / "m.bundle");
    std::string bytes = testing::slurp(dir / "m.bundle");

    auto write = [&](const std::string& name, const std::string& data) {
      std::ofstream(dir / name, std::ios::binary) << data;
      return dir / name;
    };
    std::string flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x01;
    CHECK_THROWS_AS(load_bundle(write("flip.bundle", flipped)), BundleLoadError);
    CHECK_THROWS_AS(load_bundle(write("short.bundle", bytes.substr(0, bytes.size() - 9))),
                    BundleLoadError);
    CHECK_THROWS_AS(load_bundle(write("text.bundle", "hello world, not a bundle")),
                    BundleLoadError);
    std::string future = bytes;
    future[8] = 9;  // version field follows the 8-byte magic
    CHECK_THROWS_AS(load_bundle(write("future.bundle", future)), BundleLoadError);
    CHECK_THROWS_AS(load_bundle(dir / "missing.bundle"), BundleLoadError);
  }
}
