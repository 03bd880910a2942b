#include <random>

#include "ahem/serialize.hpp"
#include "doctest.h"

using namespace ahem;

TEST_CASE("ahf round trip is bit exact") {
  auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 10, 6);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Field a = Field::zeros(g, TensorKind::scalar, "wbar", 2.0);
  Field b = Field::zeros(g, TensorKind::sym2, "hbar", 2.0);
  for (auto* f : {&a, &b})
    for (auto& c : f->comps)
      for (int q = 0; q < c.size(); ++q) c(q) = nd(rng) * std::pow(10.0, nd(rng) * 50);

  const std::string bytes = serialize_state(g, {a, b}, {{"note", "x"}});
  const StateBundle back = deserialize_state(bytes);
  REQUIRE(back.fields.size() == 2);
  CHECK(back.grid->n_rho() == 10);
  CHECK(back.grid->n_theta() == 6);
  CHECK(back.metadata["note"] == "x");
  CHECK(back.fields[1].name == "hbar");
  CHECK(back.fields[1].weight == 2.0);
  for (int k = 0; k < 2; ++k) {
    const Field& x = k == 0 ? a : b;
    for (int c = 0; c < x.num_components(); ++c)
      CHECK(std::memcmp(x.comps[c].data(), back.fields[k].comps[c].data(), sizeof(double) * g->size()) == 0);
  }
  CHECK(serialize_state(back.grid, back.fields, back.metadata) == bytes);
}

TEST_CASE("ahf detects damage") {
  auto g = Grid::build(Chart{3, Symmetry::radial}, 12, 0);
  Field a = Field::scalar(g, Eigen::VectorXd::LinSpaced(12, 0, 1), "u");
  std::string bytes = serialize_state(g, {a});
  CHECK_THROWS_AS(deserialize_state(std::string_view(bytes).substr(0, bytes.size() - 3)), ChecksumError);
  std::string flipped = bytes;
  flipped.back() ^= 0x10;
  CHECK_THROWS_AS(deserialize_state(flipped), ChecksumError);
  std::string old = bytes;
  const auto pos = old.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  old.replace(pos, 11, "\"version\":9");
  CHECK_THROWS_AS(deserialize_state(old), VersionError);
}

TEST_CASE("ahf with no fields is a header-only file") {
  auto g = Grid::build(Chart{3, Symmetry::radial}, 8, 0);
  const std::string bytes = serialize_state(g, {});
  CHECK(bytes.back() == '\n');
  const StateBundle back = deserialize_state(bytes);
  CHECK(back.fields.empty());
  CHECK(back.grid->n_rho() == 8);
}
