#pragma once

#include <cstdint>
#include <vector>

#include "ndc/imaging.hpp"

namespace ndc::synth {

struct SynthConfig {
  int width = 64;
  int height = 64;
  double noise_density = 0.02;   // fraction of lost pixels in noise images
  int defect_blob_count = 2;
  double blob_radius_px = 4.0;
  double blob_fill = 0.9;
  int background_level = 128;
  double texture_sigma = 6.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Textured background with a uniformly random subset of exactly
/// floor(density * M * N) pixels forced to zero.
GrayImage gen_noise_image(const SynthConfig& cfg);

/// Same background plus compact random-walk blobs of lost pixels and a
/// residual impulse sprinkle at density/4 so the classes overlap.
GrayImage gen_defect_image(const SynthConfig& cfg);

struct LabeledImage {
  GrayImage image;
  int label = 0;  // 0 noise, 1 defect
};

/// n noise + n defect images; per-image seeds derived from the master seed.
std::vector<LabeledImage> gen_dataset(int n_per_class, const SynthConfig& cfg,
                                      std::uint64_t seed);

}  // namespace ndc::synth
