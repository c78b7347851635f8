// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "bigfive/encoder.hpp"
#include "bigfive/error.hpp"

using namespace bigfive;

TEST_SUITE("encoder") {
  TEST_CASE("hashed features are unit length and deterministic") {
    HashedNgramEncoder enc;
    const auto a = enc.featurize("I love meeting new people at parties.");
    REQUIRE(a.index.size() == a.value.size());
    double sq = 0;
    for (std::size_t i = 0; i < a.index.size(); ++i) {
      CHECK(a.index[i] < 1024);
      if (i > 0) CHECK(a.index[i] > a.index[i - 1]);
      sq += a.value[i] * a.value[i];
    }
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    const auto again = enc.featurize("I love meeting new people at parties.");
    CHECK(again.index == a.index);
    CHECK(again.value == a.value);
    // Lower-cased before hashing.
    CHECK(enc.featurize("I LOVE meeting new people at parties.").value == a.value);
  }

  TEST_CASE("encoding has the configured width and depends on the seed") {
    HashedNgramOptions o;
    o.output_dim = 32;
    HashedNgramEncoder a(o);
    o.seed = 1;
    HashedNgramEncoder b(o);
    CHECK(a.encode("hello").size() == 32);
    CHECK((a.encode("hello") - b.encode("hello")).norm() > 0.0);
    CHECK(a.parameter_count() == 1024 * 32 + 32);
  }

  TEST_CASE("projection gradient matches finite differences") {
    HashedNgramOptions o;
    o.buckets = 64;
    o.output_dim = 4;
    HashedNgramEncoder enc(o);
    const auto prepared = enc.prepare("abc def");
    Eigen::VectorXd c(4);
    c << 0.3, -1.0, 2.0, 0.5;
    enc.backward(*prepared, c);
    auto* w = enc.parameters()[0];
    const Eigen::MatrixXd analytic = w->grad;
    for (Eigen::Index i = 0; i < w->value.size(); i += 7) {
      const double keep = w->value.data()[i];
      w->value.data()[i] = keep + 1e-6;
      const double up = c.dot(enc.forward(*prepared));
      w->value.data()[i] = keep - 1e-6;
      const double down = c.dot(enc.forward(*prepared));
      w->value.data()[i] = keep;
      CHECK(analytic.data()[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
    }
  }

  TEST_CASE("settings rebuild an identical encoder through the registry") {
    HashedNgramOptions o;
    o.output_dim = 16;
    o.seed = 5;
    o.init_std = 0.37;
    HashedNgramEncoder enc(o);
    const auto rebuilt = make_backbone(enc.name(), enc.settings());
    CHECK(rebuilt->dim() == 16);
    CHECK((rebuilt->encode("same text") - enc.encode("same text")).norm() == 0.0);
    CHECK_THROWS_AS(make_backbone("no-such-backbone", {}), NotFoundError);
  }

  TEST_CASE("clone is deep") {
    HashedNgramEncoder enc;
    auto copy = enc.clone();
    copy->parameters()[0]->value.setZero();
    CHECK(enc.encode("x").norm() > 0.0);
  }
}
