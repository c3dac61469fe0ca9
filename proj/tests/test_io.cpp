#include <gtest/gtest.h>

#include "mirrorkit/io.hpp"

using namespace mirrorkit;

TEST(Io, ComplexParsing) {
  EXPECT_EQ(parse_complex("1/2-3i"), cplx(0.5, -3));
  EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
  EXPECT_EQ(parse_complex("0.25"), cplx(0.25));
  EXPECT_EQ(parse_complex("3+4i"), cplx(3, 4));
  EXPECT_EQ(parse_complex_list("0.3,-0.7i").size(), 2u);
  EXPECT_THROW(parse_complex("abc"), Error);
}

TEST(Io, NumberFormatting) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_complex(cplx(1, -2)), "1-2i");
}

TEST(Io, ModelRoundTrip) {
  for (auto& name : catalog_names()) {
    auto m = catalog_model(name);
    auto back = validate_model(raw_model_from_json(model_to_json(m)));
    EXPECT_EQ(back.weights(), m.weights());
    EXPECT_EQ(back.chamber(), m.chamber());
    EXPECT_EQ(back.bundle_weights(), m.bundle_weights());
  }
}

TEST(Io, UnknownModelKeysRejected) {
  Json j = Json::parse(R"({"K":1,"N":2,"weights":[[1,1]],"colour":"blue"})");
  try {
    raw_model_from_json(j);
    ADD_FAILURE() << "accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
}

TEST(Io, RingTableRoundTrip) {
  for (auto [name, mode, eq] : {std::tuple{"P2", RingMode::k_theory, false}, std::tuple{"P1xP1", RingMode::cohomology, true}}) {
    auto m = catalog_model(name);
    auto R = catalog_ring(m, mode, eq);
    auto back = ring_from_json(ring_to_json(*R.ring));
    EXPECT_EQ(back->table(), R.ring->table());
    EXPECT_EQ(back->generator_coordinates(), R.ring->generator_coordinates());
    EXPECT_EQ(back->nilpotent_augmentation(), R.ring->nilpotent_augmentation());
  }
}

TEST(Io, RingTableFromText) {
  Json j = Json::parse(R"({"mode":"k_theory","basis":["1","h"],"table":{"h*h":[0,0]},"generators":{"P1":[1,-1]}})");
  auto m = catalog_model("P1");
  auto R = attach_model(m, ring_from_json(j));
  EXPECT_TRUE(verify(build_system_K(m, Representation::vector, &R), series_K(m, R, 4)).pass());
  Json bad = Json::parse(R"({"mode":"k_theory","basis":["1","h"],"table":{"h*x":[0,0]},"generators":{"P1":[1,-1]}})");
  EXPECT_THROW(ring_from_json(bad), Error);
}

TEST(Io, SeriesSerialization) {
  auto m = catalog_model("P1");
  auto s = series_H(m, catalog_ring(m, RingMode::cohomology, false), 1);
  EXPECT_EQ(series_to_json(s).dump(),
            R"([{"d":[-1],"coeff":{}},{"d":[0],"coeff":{"1":"1"}},{"d":[1],"coeff":{"1":"1/z^2","p1":"2/z^3"}}])");
}

TEST(Io, Envelope) {
  auto j = report_envelope("verify", catalog_model("P1"));
  EXPECT_EQ(j["schema"], "mirrorkit/1");
  EXPECT_EQ(j["model"]["name"], "P1");
  EXPECT_FALSE(j["notes"].empty());
}
