#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "bni/analysis.hpp"
#include "bni/bipartite.hpp"
#include "bni/random.hpp"
#include "oracle.hpp"

namespace fixture {

// Complete bipartite toy: plants P0..P{J-1} with covariate w and a treatment,
// outcome units U0..U{n-1} with covariate x and an outcome.
struct SmallWorld {
  std::size_t J = 0;
  std::size_t n = 0;
  std::vector<bni::InfluenceTriplet> triplets;
  std::vector<oracle::Weight> weights;
  bni::UnitTable interventions;
  bni::UnitTable outcomes;
};

SmallWorld random_world(bni::Rng& rng, std::size_t J, std::size_t n);
bni::AnalysisDataset assemble(const SmallWorld& world);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace fixture
