#pragma once

#include <cstdint>
#include <vector>

#include "clubench/dataset.hpp"

namespace clubench {

// Labeled synthetic datasets (gaussian blobs, concentric rings, anisotropic
// mixtures) so the whole pipeline runs with no external data.
Dataset make_blobs(int n, int k, int dim, double separation, double sigma, std::uint64_t seed,
                   const std::string& name = "blobs");

Dataset make_rings(int n, double inner_radius, double outer_radius, double noise,
                   std::uint64_t seed, const std::string& name = "rings");

Dataset make_anisotropic(int n, int k, std::uint64_t seed, const std::string& name = "aniso");

// Cycles through the generator family with varied shapes and K.
std::vector<Dataset> make_demo_datasets(int count, int n_per_dataset, std::uint64_t seed);

}  // namespace clubench
