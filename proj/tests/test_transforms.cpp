#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wmtk/image.hpp"
#include "wmtk/rng.hpp"
#include "wmtk/synth.hpp"
#include "wmtk/transforms.hpp"

using namespace wmtk;

namespace {

bool in_range(const ImageBuffer& img) {
  for (double v : img.px) {
    if (v < 0.0 || v > 1.0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("crop takes the centered window") {
  const ImageBuffer x = synthetic_image(512, 512, 40);
  const ImageBuffer c = apply_transform(x, TransformSpec::crop(0.25), 0);
  REQUIRE(c.height == 256);
  REQUIRE(c.width == 256);
  for (int y = 0; y < 256; ++y)
    for (int xx = 0; xx < 256; ++xx)
      for (int ch = 0; ch < 3; ++ch) CHECK(c.at(y, xx, ch) == x.at(128 + y, 128 + xx, ch));

  CHECK_THROWS_AS(apply_transform(ImageBuffer(16, 16, 0.5), TransformSpec::crop(0.04), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(TransformSpec::crop(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TransformSpec::crop(1.5), std::invalid_argument);
}

TEST_CASE("resize scales sides by sqrt(ratio) with floor rounding") {
  const ImageBuffer x = synthetic_image(100, 200, 41);
  const ImageBuffer r = apply_transform(x, TransformSpec::resize(0.5), 0);
  CHECK(r.height == static_cast<int>(std::floor(100 * std::sqrt(0.5))));
  CHECK(r.width == static_cast<int>(std::floor(200 * std::sqrt(0.5))));
  CHECK(in_range(r));
}

TEST_CASE("rotate90 four times is the identity, exactly") {
  const ImageBuffer x = synthetic_image(48, 64, 42);
  ImageBuffer cur = x;
  for (int i = 0; i < 4; ++i) cur = apply_transform(cur, TransformSpec::rotate90(), 0);
  CHECK(cur.px == x.px);
  const ImageBuffer once = apply_transform(x, TransformSpec::rotate90(), 0);
  CHECK(once.height == 64);
  CHECK(once.width == 48);
}

TEST_CASE("brightness") {
  const ImageBuffer x = synthetic_image(32, 32, 43);
  CHECK(apply_transform(x, TransformSpec::brightness(1.0), 0).px == x.px);

  ImageBuffer probe(8, 8, 0.4);
  const ImageBuffer doubled = apply_transform(probe, TransformSpec::brightness(2.0), 0);
  for (double v : doubled.px) CHECK(v == doctest::Approx(0.8).epsilon(1e-12));

  ImageBuffer hot(8, 8, 0.7);
  const ImageBuffer clamped = apply_transform(hot, TransformSpec::brightness(2.0), 0);
  for (double v : clamped.px) CHECK(v == 1.0);
}

TEST_CASE("contrast pivots on the scalar mean luminance") {
  const ImageBuffer x = synthetic_image(24, 24, 44);
  const Plane lum = luminance(x);
  double mean = 0.0;
  for (double v : lum.v) mean += v;
  mean /= static_cast<double>(lum.v.size());

  const double f = 1.7;
  const ImageBuffer out = apply_transform(x, TransformSpec::contrast(f), 0);
  for (size_t i = 0; i < x.px.size(); ++i) {
    CHECK(out.px[i] == doctest::Approx(clamp01(mean + f * (x.px[i] - mean))).epsilon(1e-12));
  }
  // f = 0 collapses everything onto the mean
  const ImageBuffer flat = apply_transform(x, TransformSpec::contrast(0.0), 0);
  for (double v : flat.px) CHECK(v == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("saturation pivots on per-pixel luminance") {
  const ImageBuffer x = synthetic_image(16, 16, 45);
  const ImageBuffer gray = apply_transform(x, TransformSpec::saturation(0.0), 0);
  for (int y = 0; y < 16; ++y) {
    for (int xx = 0; xx < 16; ++xx) {
      const double lp = kLumaR * x.at(y, xx, 0) + kLumaG * x.at(y, xx, 1) + kLumaB * x.at(y, xx, 2);
      for (int c = 0; c < 3; ++c) CHECK(gray.at(y, xx, c) == doctest::Approx(lp).epsilon(1e-12));
    }
  }
  CHECK(apply_transform(x, TransformSpec::saturation(1.0), 0).px == x.px);
}

TEST_CASE("sharpness blends between the 3x3 smooth and the original") {
  const ImageBuffer x = synthetic_image(20, 20, 46);
  CHECK(apply_transform(x, TransformSpec::sharpness(1.0), 0).px == x.px);

  // f = 0 is the smoothing kernel itself; spot-check an interior pixel
  const ImageBuffer smooth = apply_transform(x, TransformSpec::sharpness(0.0), 0);
  double acc = 0.0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      acc += (dy == 0 && dx == 0 ? 5.0 : 1.0) * x.at(10 + dy, 10 + dx, 1);
  CHECK(smooth.at(10, 10, 1) == doctest::Approx(acc / 13.0).epsilon(1e-12));
}

TEST_CASE("text overlay is seeded, opaque and small") {
  const ImageBuffer x = synthetic_image(256, 256, 47);
  const ImageBuffer a = apply_transform(x, TransformSpec::text_overlay(), 1234);
  const ImageBuffer b = apply_transform(x, TransformSpec::text_overlay(), 1234);
  CHECK(a.px == b.px);
  const ImageBuffer c = apply_transform(x, TransformSpec::text_overlay(), 999);
  CHECK(a.px != c.px);

  int64_t touched = 0;
  for (int y = 0; y < 256; ++y)
    for (int xx = 0; xx < 256; ++xx)
      if (a.at(y, xx, 0) != x.at(y, xx, 0) || a.at(y, xx, 1) != x.at(y, xx, 1) ||
          a.at(y, xx, 2) != x.at(y, xx, 2))
        ++touched;
  CHECK(touched > 0);
  CHECK(static_cast<double>(touched) <= 0.05 * 256 * 256);
}

TEST_CASE("combined applies steps in list order") {
  const ImageBuffer x = synthetic_image(128, 128, 48);
  const auto spec = TransformSpec::combined(
      {TransformSpec::crop(0.5), TransformSpec::brightness(1.5), TransformSpec::jpeg(80)});
  const ImageBuffer via_combined = apply_transform(x, spec, 77);

  ImageBuffer manual = apply_transform(x, TransformSpec::crop(0.5), mix_seed(77, 0));
  manual = apply_transform(manual, TransformSpec::brightness(1.5), mix_seed(77, 1));
  manual = apply_transform(manual, TransformSpec::jpeg(80), mix_seed(77, 2));
  CHECK(via_combined.px == manual.px);
  CHECK(via_combined.height == 90);  // floor(128 * sqrt(0.5))
}

TEST_CASE("transform parsing") {
  CHECK(TransformSpec::parse("crop:0.5").kind == TransformSpec::Kind::crop);
  CHECK(TransformSpec::parse("jpeg:80").quality == 80);
  CHECK(TransformSpec::parse("identity").kind == TransformSpec::Kind::identity);
  const auto chain = TransformSpec::parse("crop:0.5,brightness:1.5,jpeg:80");
  REQUIRE(chain.kind == TransformSpec::Kind::combined);
  REQUIRE(chain.steps.size() == 3);
  CHECK(chain.steps[1].value == doctest::Approx(1.5));
  CHECK(chain.name() == "combined[crop_0.5+brightness_1.5+jpeg_80]");
  CHECK_THROWS_AS(TransformSpec::parse("warp:2"), std::invalid_argument);
  CHECK_THROWS_AS(TransformSpec::parse("crop"), std::invalid_argument);
}

TEST_CASE("apply_transform is deterministic for a fixed seed") {
  const ImageBuffer x = synthetic_image(96, 96, 49);
  const auto spec = TransformSpec::parse("crop:0.8,jpeg:70,text");
  const ImageBuffer a = apply_transform(x, spec, 31337);
  const ImageBuffer b = apply_transform(x, spec, 31337);
  CHECK(a.px == b.px);
}

TEST_CASE("all transforms preserve buffer validity") {
  const ImageBuffer x = synthetic_image(64, 64, 50);
  const std::vector<TransformSpec> all = {
      TransformSpec::identity(),     TransformSpec::crop(0.5),
      TransformSpec::resize(0.7),    TransformSpec::rotate90(),
      TransformSpec::jpeg(50),       TransformSpec::brightness(2.0),
      TransformSpec::contrast(2.0),  TransformSpec::saturation(2.0),
      TransformSpec::sharpness(2.0), TransformSpec::text_overlay(),
  };
  for (const auto& t : all) {
    const ImageBuffer out = apply_transform(x, t, 5);
    CAPTURE(t.name());
    CHECK(in_range(out));
    CHECK(out.height >= 8);
    CHECK(out.width >= 8);
  }
}

TEST_CASE("jpeg quality scaling of the base tables") {
  // q = 50 uses the base tables as-is
  const auto q50 = jpeg_quant_table(50, false);
  CHECK(q50[0] == 16.0);
  CHECK(q50[63] == 99.0);
  // q = 80 scales by (200 - 160)/100 = 0.40
  const auto q80 = jpeg_quant_table(80, false);
  CHECK(q80[0] == std::floor((16 * 40 + 50) / 100.0));
  CHECK(q80[9] == std::floor((12 * 40 + 50) / 100.0));
  // q = 100 floors every entry at 1
  const auto q100 = jpeg_quant_table(100, true);
  for (double v : q100) CHECK(v == 1.0);
  // q = 10 scales by 5000/10 = 500%
  const auto q10 = jpeg_quant_table(10, false);
  CHECK(q10[0] == std::floor((16 * 500 + 50) / 100.0));
}

TEST_CASE("jpeg channel degradation") {
  const ImageBuffer x = synthetic_image(128, 128, 51);
  const double p100 = psnr(x, jpeg_roundtrip(x, 100));
  const double p90 = psnr(x, jpeg_roundtrip(x, 90));
  const double p30 = psnr(x, jpeg_roundtrip(x, 30));
  CHECK(p100 >= 40.0);
  CHECK(p90 > p30);

  // idempotence: recompressing at the same quality barely changes anything
  for (int q : {50, 80}) {
    const ImageBuffer once = jpeg_roundtrip(x, q);
    const ImageBuffer twice = jpeg_roundtrip(once, q);
    CHECK(psnr(once, twice) >= 45.0);
  }

  // non-multiple-of-16 sizes go through the padded path and come back exact
  const ImageBuffer odd = synthetic_image(37, 53, 52);
  const ImageBuffer out = jpeg_roundtrip(odd, 75);
  CHECK(out.height == 37);
  CHECK(out.width == 53);
  CHECK(in_range(out));

  CHECK_THROWS_AS(jpeg_roundtrip(x, 0), std::invalid_argument);
  CHECK_THROWS_AS(jpeg_roundtrip(x, 101), std::invalid_argument);
}

TEST_CASE("jnd mask") {
  // constant image: zero variance everywhere, mask pins to a = 0.5
  const ImageBuffer flat(32, 32, 0.6);
  const ImageBuffer m = jnd_mask(flat);
  for (double v : m.px) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

  // checkerboard region is strictly above a flat region
  ImageBuffer mixed(32, 32, 0.5);
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x)
      for (int c = 0; c < 3; ++c) mixed.at(y, x, c) = ((y + x) & 1) ? 0.8 : 0.2;
  const ImageBuffer mm = jnd_mask(mixed);
  CHECK(mm.at(16, 24, 0) > mm.at(16, 4, 0));

  // bounds hold by construction
  const ImageBuffer nat = synthetic_image(64, 64, 53);
  const ImageBuffer nm = jnd_mask(nat);
  double mean = 0.0;
  for (double v : nm.px) {
    CHECK(v >= 0.25);
    CHECK(v <= 2.0);
    mean += v;
  }
  mean /= static_cast<double>(nm.px.size());
  CHECK(mean >= 0.4);
  CHECK(mean <= 1.5);
}
