#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ame/errors.hpp"
#include "ame/presets.hpp"
#include "ame/render.hpp"

using namespace ame;

namespace {

EyeCamera small_eye(const EyeCamera& base, int px) {
  EyeCamera e = base;
  const double scale = static_cast<double>(base.sensor.width_px) / px;
  e.sensor = {px, px, base.sensor.pixel_pitch * scale};
  return e;
}

Image checkerboard(int w, int h, int cell) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = ((x / cell + y / cell) % 2) ? Rgb{1, 1, 1} : Rgb{};
  return img;
}

Image box_blur(const Image& src) {
  Image out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      Rgb sum;
      for (int dx = -1; dx <= 1; ++dx) sum += src.at(std::clamp(x + dx, 0, src.width() - 1), y);
      out.at(x, y) = sum * (1.0 / 3.0);
    }
  }
  return out;
}

// Mean spacing between luminance transitions along a row just off the
// middle one, which lies on a cell boundary.
double mean_transition_spacing(const Image& img) {
  const int y = img.height() / 2 + 5;
  double mean = 0.0;
  for (int x = 0; x < img.width(); ++x) mean += img.at(x, y).luminance();
  mean /= img.width();
  int first = -1, last = -1, count = 0;
  for (int x = 1; x < img.width(); ++x) {
    const bool a = img.at(x - 1, y).luminance() > mean;
    const bool b = img.at(x, y).luminance() > mean;
    if (a != b) {
      if (first < 0) first = x;
      last = x;
      ++count;
    }
  }
  return count > 1 ? static_cast<double>(last - first) / (count - 1) : 0.0;
}

}  // namespace

TEST(Render, UniformBackgroundGivesUniformImage) {
  const Screen bg = Screen::with_pattern(Pose::at({0, 0, -500}), {5000, 5000}, {PatternKind::uniform, 4, 4, 1, 0.7});
  const Scene s({}, default_eye(), bg);
  const Image img = render_view(s, small_eye(s.eye(), 16), {4, 1, 8});
  for (const Rgb& p : img.pixels()) {
    EXPECT_NEAR(p.r, 0.7, 1e-12);
    EXPECT_NEAR(p.g, 0.7, 1e-12);
    EXPECT_NEAR(p.b, 0.7, 1e-12);
  }
}

TEST(Render, AmeImageIsUpright) {
  TmdParams ideal;
  ideal.weights = {1, 0, 0};
  const Scene s = ame_preset(*find_hmd("dk2"), ideal, 40, 40);
  const Image img = render_view(s, small_eye(s.eye(), 64), {4, 42, 12});
  // About 23 degrees off axis; the plate's vertical reach ends near 31.
  const Rgb tl = img.at(24, 24), tr = img.at(40, 24), bl = img.at(24, 40), br = img.at(40, 40);
  // Quadrant pattern: red top-left, green top-right, blue bottom-left, white bottom-right.
  EXPECT_GT(tl.r, 0.5);
  EXPECT_LT(std::max(tl.g, tl.b), 0.05);
  EXPECT_GT(tr.g, 0.5);
  EXPECT_LT(std::max(tr.r, tr.b), 0.05);
  EXPECT_GT(bl.b, 0.5);
  EXPECT_LT(std::max(bl.r, bl.g), 0.05);
  EXPECT_GT(std::min({br.r, br.g, br.b}), 0.5);
}

TEST(Render, DeterministicAndGhostsFromSingleReflection) {
  const Scene s = *named_preset("tmd_see_through");
  const EyeCamera eye = small_eye(s.eye(), 32);
  const Image a = render_view(s, eye, {4, 3, 12});
  const Image b = render_view(s, eye, {4, 3, 12});
  EXPECT_TRUE(a == b);

  auto plate = std::get<TmdPlate>(s.find("tmd")->body);
  plate.polarizer = false;
  const Scene ghosty = s.with_element({"tmd", plate});
  EXPECT_FALSE(render_view(ghosty, eye, {4, 3, 12}) == a);
}

TEST(Sharpness, Basics) {
  EXPECT_EQ(sharpness_metric(Image(8, 8, {0.5, 0.5, 0.5})), 0.0);
  EXPECT_EQ(sharpness_metric(Image(8, 8)), 0.0);
  const Image sharp = checkerboard(16, 16, 2);
  EXPECT_GT(sharpness_metric(sharp), sharpness_metric(box_blur(sharp)));
  // Scale invariant.
  Image bright = sharp;
  for (Rgb& p : bright.pixels()) p = p * 3.0;
  EXPECT_NEAR(sharpness_metric(bright), sharpness_metric(sharp), 1e-12);
}

TEST(Sharpness, CheckerboardMaximalAmongBinaryImages) {
  const double best = sharpness_metric(checkerboard(4, 4, 1));
  for (unsigned bits = 0; bits < (1u << 16); ++bits) {
    if (__builtin_popcount(bits) != 8) continue;
    Image img(4, 4);
    for (int i = 0; i < 16; ++i)
      if (bits >> i & 1u) img.at(i % 4, i / 4) = {1, 1, 1};
    ASSERT_LE(sharpness_metric(img), best + 1e-12) << bits;
  }
}

TEST(Output, BlackPixelPpm) {
  const std::string expected = std::string("P6\n1 1\n255\n") + std::string(3, '\0');
  EXPECT_EQ(encode_ppm(Image(1, 1)), expected);
  EXPECT_EQ(expected.size(), 14u);
}

TEST(Output, ToneMapRounds) {
  Image img(2, 1);
  img.at(0, 0) = {2.0, 1.0, 0.0};
  img.at(1, 0) = {0.5, 1.999, 0.001};
  const auto bytes = tone_map(img);
  const std::vector<std::uint8_t> expected{255, 128, 0, 64, 255, 0};
  EXPECT_EQ(bytes, expected);
}

TEST(Output, PpmRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "ame_roundtrip.ppm";
  Image img(3, 2);
  img.at(0, 0) = {1, 0, 0};
  img.at(2, 1) = {0, 0.5, 1};
  write_ppm(img, path.string());
  const Image back = read_ppm(path.string());
  ASSERT_EQ(back.width(), 3);
  ASSERT_EQ(back.height(), 2);
  EXPECT_EQ(back.at(0, 0), (Rgb{1, 0, 0}));
  EXPECT_NEAR(back.at(2, 1).g, 128.0 / 255.0, 1e-12);
  std::filesystem::remove(path);
  EXPECT_THROW(write_ppm(img, "/proc/nope/x.ppm"), IoError);
  EXPECT_THROW(read_ppm("/nonexistent.ppm"), IoError);
}

TEST(Sweep, CsvAndSingleOffset) {
  const Scene s = *named_preset("experiment_no_eyepiece");
  const EyeCamera eye = small_eye(s.eye(), 32);
  const SweepResult r = defocus_sweep(s, eye, kDefaultSweepOffsets, {2, 1, 8});
  ASSERT_EQ(r.sharpness.size(), 4u);
  ASSERT_EQ(r.images.size(), 4u);
  std::istringstream csv(sweep_csv(r));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 5);
  EXPECT_EQ(sweep_csv(r).rfind("offset_mm,sharpness\n", 0), 0u);

  const SweepResult one = defocus_sweep(s, eye, {0.0}, {2, 1, 8}, false);
  EXPECT_EQ(one.argmax_offset(), 0.0);
  EXPECT_TRUE(one.images.empty());
  EXPECT_EQ(one.sharpness[0], r.sharpness[1]);
}

TEST(Sweep, EyepieceMagnifiesCheckerCells) {
  // Eyepiece at 50 mm with its virtual image at 60 mm: magnification 60 / (300/11) = 2.2.
  TmdParams ideal;
  ideal.weights = {1, 0, 0};
  const ExperimentSetup bare = experiment_preset(false, ideal);
  const ExperimentSetup lens = experiment_preset(true, ideal);
  const RenderOptions opt{4, 1, 12};
  const double w0 = mean_transition_spacing(render_view(bare.scene, bare.scene.eye(), opt));
  const double w1 = mean_transition_spacing(render_view(lens.scene, lens.scene.eye(), opt));
  ASSERT_GT(w0, 0.0);
  EXPECT_NEAR(w1 / w0, 2.2, 0.1);
}
