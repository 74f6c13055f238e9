#pragma once

#include <cstdint>

#include "varicart/corpus.hpp"

namespace varicart {

// Two classes with disjoint marker vocabularies over a shared neutral
// vocabulary, plus common instances carrying markers of both classes.
// Commons are left unlabelled (run assign_single_labels). All instances
// are in the train split. Labels are ES-AR / ES-ES / ES.
struct PlantedConfig {
  std::size_t instances = 2000;
  double common_fraction = 0.4;
  std::size_t markers_per_class = 60;
  std::size_t neutral_words = 600;
  int min_words = 6;
  int max_words = 14;
  // Share of words in a non-common text drawn from its class markers.
  double marker_rate = 0.25;
  std::uint64_t seed = 1;
};

Dataset make_planted_dataset(const PlantedConfig& config);

}  // namespace varicart
