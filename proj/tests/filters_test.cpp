#include "cim/filters.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cim;

namespace {

GrayImage checkerboard(std::size_t size, std::size_t block, std::uint8_t lo = 0,
                       std::uint8_t hi = 255) {
  GrayImage img = make_image(size, size);
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c)
      img.at(r, c) = ((r / block + c / block) % 2 == 0) ? lo : hi;
  return img;
}

GrayImage add_gaussian_noise(const GrayImage& img, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  GrayImage out = img;
  for (auto& px : out.pixels)
    px = static_cast<std::uint8_t>(
        std::clamp(std::lround(static_cast<double>(px) + sigma * n01(rng)), 0l, 255l));
  return out;
}

GrayImage flip_salt_pepper(const GrayImage& img, double rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01;
  GrayImage out = img;
  for (auto& px : out.pixels)
    if (u01(rng) < rate) px = static_cast<std::uint8_t>(255 - px);
  return out;
}

double pixel_error_rate(const GrayImage& a, const GrayImage& b) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.pixels[i] != b.pixels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(a.size());
}

}  // namespace

TEST(AllFilters, ConstantImageIsFixedPoint) {
  const GrayImage img = make_image(20, 14, 131);
  EXPECT_EQ(median_filter(img, 1), img);
  EXPECT_EQ(majority_filter(img, 1), img);
  EXPECT_EQ(erode(img), img);
  EXPECT_EQ(dilate(img), img);
  EXPECT_EQ(morph_open(img), img);
  EXPECT_EQ(morph_close(img), img);
  EXPECT_EQ(morph_smooth(img), img);
  EXPECT_EQ(wiener_local(img, 3), img);
  EXPECT_EQ(wavelet_denoise(img), img);
  EXPECT_EQ(nlm_denoise(img), img);
  EXPECT_EQ(enhance_pipeline(img), img);
}

TEST(AllFilters, PreserveDimensionsAndRange) {
  std::mt19937_64 rng(3);
  GrayImage img = make_image(17, 11);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng());
  for (const GrayImage& out :
       {median_filter(img, 2), majority_filter(img, 2), erode(img), dilate(img), morph_open(img),
        morph_close(img), wiener_local(img, 5), wavelet_denoise(img), nlm_denoise(img, 1, 3, 8.0)}) {
    EXPECT_EQ(out.width, img.width);
    EXPECT_EQ(out.height, img.height);
  }
}

TEST(MedianFilter, RemovesIsolatedImpulse) {
  GrayImage img = make_image(9, 9, 0);
  img.at(4, 4) = 255;
  EXPECT_EQ(median_filter(img, 1), make_image(9, 9, 0));
}

TEST(MedianFilter, WindowMedianDefinition) {
  GrayImage img = make_image(3, 3);
  img.pixels = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(median_filter(img, 1).at(1, 1), 5);
}

TEST(MajorityFilter, RestoresFlippedPixel) {
  GrayImage img = checkerboard(8, 4);
  GrayImage noisy = img;
  noisy.at(1, 1) = 255 - noisy.at(1, 1);
  EXPECT_EQ(majority_filter(noisy, 1), img);
}

TEST(MajorityFilter, ModeOfNeighborhood) {
  // 3x3 window with five 0s and four 255s.
  GrayImage img = make_image(3, 3, 0);
  img.pixels = {0, 255, 0, 255, 0, 255, 0, 255, 0};
  EXPECT_EQ(majority_filter(img, 1).at(1, 1), 0);
}

TEST(MajorityFilter, TieKeepsCenterPixel) {
  // Interior window with a 4-4 split plus one odd value at the center.
  GrayImage img = make_image(5, 5, 7);
  int placed = 0;
  for (std::size_t r = 1; r <= 3 && placed < 8; ++r)
    for (std::size_t c = 1; c <= 3 && placed < 8; ++c) {
      if (r == 2 && c == 2) continue;
      img.at(r, c) = placed < 4 ? 10 : 200;
      ++placed;
    }
  img.at(2, 2) = 99;
  EXPECT_EQ(majority_filter(img, 1).at(2, 2), 99);
}

TEST(Morphology, OpeningRemovesSingleBrightPixel) {
  GrayImage img = make_image(9, 9, 10);
  img.at(4, 4) = 240;
  EXPECT_EQ(morph_open(img), make_image(9, 9, 10));
}

TEST(Morphology, MatchesNaiveMinMax) {
  std::mt19937_64 rng(8);
  GrayImage img = make_image(12, 10);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng());
  const GrayImage er = erode(img);
  const GrayImage di = dilate(img);
  for (std::size_t r = 0; r < img.height; ++r)
    for (std::size_t c = 0; c < img.width; ++c) {
      int mn = 255;
      int mx = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const std::size_t rr = std::min(img.height - 1,
                                          static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                              0, static_cast<std::ptrdiff_t>(r) + dr)));
          const std::size_t cc = std::min(img.width - 1,
                                          static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                              0, static_cast<std::ptrdiff_t>(c) + dc)));
          mn = std::min<int>(mn, img.at(rr, cc));
          mx = std::max<int>(mx, img.at(rr, cc));
        }
      EXPECT_EQ(er.at(r, c), mn);
      EXPECT_EQ(di.at(r, c), mx);
    }
}

TEST(Morphology, OpeningIsIdempotent) {
  std::mt19937_64 rng(15);
  GrayImage img = make_image(24, 24);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng());
  const GrayImage once = morph_open(img);
  EXPECT_EQ(morph_open(once), once);
  const GrayImage closed = morph_close(img);
  EXPECT_EQ(morph_close(closed), closed);
}

TEST(Morphology, ErosionDilationDuality) {
  std::mt19937_64 rng(16);
  GrayImage img = make_image(15, 13);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng());
  GrayImage complement = img;
  for (auto& px : complement.pixels) px = static_cast<std::uint8_t>(255 - px);
  GrayImage want = erode(img);
  for (auto& px : want.pixels) px = static_cast<std::uint8_t>(255 - px);
  EXPECT_EQ(dilate(complement), want);
}

TEST(Morphology, ErodeBelowIdentityBelowDilate) {
  std::mt19937_64 rng(17);
  GrayImage img = make_image(10, 10);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng());
  const GrayImage er = erode(img);
  const GrayImage di = dilate(img);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_LE(er.pixels[i], img.pixels[i]);
    EXPECT_GE(di.pixels[i], img.pixels[i]);
  }
}

TEST(SaltPepper, MedianAndMajorityRestoreBinaryPattern) {
  const GrayImage clean = checkerboard(64, 16);
  const GrayImage noisy = flip_salt_pepper(clean, 0.05, 99);
  ASSERT_GT(pixel_error_rate(clean, noisy), 0.03);
  EXPECT_LT(pixel_error_rate(clean, median_filter(noisy, 1)), 0.01);
  EXPECT_LT(pixel_error_rate(clean, majority_filter(noisy, 1)), 0.01);
}

TEST(WienerLocal, HighVarianceRegionsPassThrough) {
  // Mostly flat image with one high-contrast checker patch: the patch should
  // survive nearly untouched (gain ~ 1 where s2 >> v2).
  GrayImage img = make_image(64, 64, 120);
  for (std::size_t r = 28; r < 36; ++r)
    for (std::size_t c = 28; c < 36; ++c) img.at(r, c) = ((r + c) % 2 == 0) ? 20 : 220;
  const GrayImage out = wiener_local(img, 3);
  for (std::size_t r = 30; r < 34; ++r)
    for (std::size_t c = 30; c < 34; ++c)
      EXPECT_NEAR(out.at(r, c), img.at(r, c), 6.0);
}

TEST(WienerLocal, ReducesGaussianNoiseOnConstant) {
  const GrayImage clean = make_image(64, 64, 128);
  const GrayImage noisy = add_gaussian_noise(clean, 20.0, 7);
  const double before = mse(clean, noisy);
  const double after = mse(clean, wiener_local(noisy, 3));
  EXPECT_LT(after, 0.5 * before);
}

TEST(Wavelet, ZeroImageStaysZero) {
  const GrayImage img = make_image(16, 16, 0);
  EXPECT_EQ(wavelet_denoise(img), img);
}

TEST(Wavelet, PerfectReconstructionWhenThresholdIsZero) {
  // 2x2-block-constant image: the HH band is exactly zero, so sigma-hat = 0
  // and the transform must invert exactly.
  std::mt19937_64 rng(23);
  GrayImage img = make_image(16, 12);
  for (std::size_t r = 0; r < img.height; r += 2)
    for (std::size_t c = 0; c < img.width; c += 2) {
      const auto v = static_cast<std::uint8_t>(rng());
      img.at(r, c) = img.at(r, c + 1) = img.at(r + 1, c) = img.at(r + 1, c + 1) = v;
    }
  EXPECT_EQ(wavelet_denoise(img), img);
}

TEST(Wavelet, ReducesGaussianNoiseOnConstant) {
  const GrayImage clean = make_image(64, 64, 128);
  const GrayImage noisy = add_gaussian_noise(clean, 20.0, 8);
  const double before = mse(clean, noisy);
  const double after = mse(clean, wavelet_denoise(noisy));
  EXPECT_LT(after, 0.7 * before);
}

TEST(Wavelet, HandlesOddDimensions) {
  std::mt19937_64 rng(29);
  GrayImage img = make_image(15, 9);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng());
  const GrayImage out = wavelet_denoise(img);
  EXPECT_EQ(out.width, img.width);
  EXPECT_EQ(out.height, img.height);
}

TEST(Nlm, SmallStrengthKeepsStructuredImage) {
  // Linear ramp: HH is zero (noise estimate 0) and distinct patches have
  // strictly positive distances, so the self weight dominates as h -> 0+.
  GrayImage img = make_image(32, 32);
  for (std::size_t r = 0; r < img.height; ++r)
    for (std::size_t c = 0; c < img.width; ++c)
      img.at(r, c) = static_cast<std::uint8_t>(4 * r + 2 * c);
  const GrayImage out = nlm_denoise(img, 1, 3, 0.01);
  for (std::size_t i = 0; i < img.size(); ++i)
    EXPECT_NEAR(out.pixels[i], img.pixels[i], 1.0);
}

TEST(Nlm, ReducesGaussianNoiseOnConstant) {
  const GrayImage clean = make_image(64, 64, 128);
  const GrayImage noisy = add_gaussian_noise(clean, 20.0, 9);
  const double before = mse(clean, noisy);
  const double after = mse(clean, nlm_denoise(noisy));
  EXPECT_LT(after, 0.7 * before);
}

TEST(Nlm, RejectsBadParameters) {
  const GrayImage img = make_image(8, 8, 1);
  EXPECT_THROW(nlm_denoise(img, 0, 5, 10.0), std::invalid_argument);
  EXPECT_THROW(nlm_denoise(img, 1, 0, 10.0), std::invalid_argument);
  EXPECT_THROW(nlm_denoise(img, 1, 5, 0.0), std::invalid_argument);
}

TEST(NoiseSigma, TracksInjectedNoise) {
  const GrayImage clean = make_image(64, 64, 100);
  EXPECT_EQ(estimate_noise_sigma(clean), 0.0);
  const GrayImage noisy = add_gaussian_noise(clean, 20.0, 10);
  const double sigma = estimate_noise_sigma(noisy);
  EXPECT_GT(sigma, 12.0);
  EXPECT_LT(sigma, 28.0);
}

TEST(StructElem, RejectsEvenDimensions) {
  EXPECT_THROW(StructElem::rect(2, 3), std::invalid_argument);
  EXPECT_THROW(StructElem::rect(3, 0), std::invalid_argument);
}
