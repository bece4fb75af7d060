#include <doctest.h>

#include <random>

#include "mceus/morphology.hpp"
#include "oracles.hpp"

using namespace mceus;

TEST_CASE("disk structuring element") {
  CHECK(StructuringElement::disk(0).offsets().size() == 1);
  CHECK(StructuringElement::disk(1).offsets().size() == 5);
  CHECK(StructuringElement::disk(2).offsets().size() == 13);
  const auto se = StructuringElement::disk(2);
  CHECK(se.half_width(0) == 2);
  CHECK(se.half_width(-1) == 1);
  CHECK(se.half_width(2) == 0);
}

TEST_CASE("dilate and erode examples") {
  const auto se = StructuringElement::disk(2);
  Image img = Image::Zero(9, 9);
  img(4, 4) = 1.0;
  const Frame d = dilate(Frame(img), se);
  CHECK(d.values().sum() == 13.0);
  CHECK(d.at(4, 2) == 1.0);
  CHECK(d.at(3, 2) == 0.0);  // 1 + 4 > 4

  const Frame ones(Image::Ones(7, 7));
  CHECK(erode(ones, se).at(3, 3) == 1.0);
  CHECK(erode(ones, se) == ones);  // border restriction, no zero padding

  std::mt19937_64 rng(1);
  const Frame f = oracle::random_frame(rng, 6, 5);
  CHECK(dilate(f, StructuringElement::disk(0)) == f);
  CHECK(erode(f, StructuringElement::disk(0)) == f);
}

TEST_CASE("close examples") {
  std::mt19937_64 rng(2);
  const Frame f = oracle::random_frame(rng, 10, 8);
  CHECK(close(f, 0) == f);
  CHECK(close(Frame(8, 8), 2) == Frame(8, 8));
  CHECK_THROWS(close(f, -1));

  SUBCASE("isolated bright pixel survives unchanged") {
    Image img = Image::Zero(11, 11);
    img(5, 5) = 1.0;
    CHECK((close(Frame(img), 2).values() == oracle::brute_close(img, 2)).all());
  }
  SUBCASE("two single pixels two apart match the brute-force oracle") {
    Image img = Image::Zero(16, 16);
    img(8, 5) = 1.0;
    img(8, 7) = 1.0;
    const Frame c = close(Frame(img), 2);
    CHECK((c.values() == oracle::brute_close(img, 2)).all());
    CHECK(c.at(6, 8) == 0.0);
    CHECK(c.values().sum() == 2.0);
  }
  SUBCASE("a one-pixel gap between two bright blocks is filled") {
    Image img = Image::Zero(16, 16);
    img.block(6, 3, 4, 3) = 1.0;  // columns 3..5
    img.block(6, 7, 4, 3) = 1.0;  // columns 7..9
    const Frame c = close(Frame(img), 2);
    CHECK((c.values() == oracle::brute_close(img, 2)).all());
    for (Eigen::Index y = 7; y <= 8; ++y) CHECK(c.at(6, y) == 1.0);
  }
}

TEST_CASE("closure properties on random frames") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dims(1, 20);
  std::uniform_int_distribution<int> radii(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 150; ++trial) {
    const int w = dims(rng), h = dims(rng), r = radii(rng);
    const Frame f = oracle::random_frame(rng, w, h);
    Image lifted = f.values();
    for (Eigen::Index i = 0; i < lifted.size(); ++i) lifted.data()[i] += (1.0 - lifted.data()[i]) * unit(rng);
    const Frame g(lifted);

    const Frame cf = close(f, r);
    CHECK((cf.values() >= f.values()).all());             // extensive
    CHECK(close(cf, r) == cf);                             // idempotent
    CHECK((close(g, r).values() >= cf.values()).all());    // ordering
  }
}

TEST_CASE("closure equals brute-force morphology on random 16x16 frames") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Frame f = oracle::random_frame(rng, 16, 16);
    for (int r : {1, 2, 3}) {
      CHECK((close(f, r).values() == oracle::brute_close(f.values(), r)).all());
      CHECK((dilate(f, StructuringElement::disk(r)).values() == oracle::brute_rank(f.values(), r, true)).all());
      CHECK((erode(f, StructuringElement::disk(r)).values() == oracle::brute_rank(f.values(), r, false)).all());
    }
  }
}
