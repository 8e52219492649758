#include "fixtures.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fixture {

SmallWorld random_world(bni::Rng& rng, std::size_t J, std::size_t n) {
  SmallWorld w;
  w.J = J;
  w.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      const double h = rng.uniform(0.01, 1.0);
      w.triplets.push_back({"P" + std::to_string(j), "U" + std::to_string(i), h});
      w.weights.push_back({j, i, h});
    }
  }
  w.interventions.columns = {"w"};
  w.interventions.covariates.resize(static_cast<Eigen::Index>(J), 1);
  std::vector<int> t(J);
  for (std::size_t j = 0; j < J; ++j) {
    w.interventions.ids.push_back("P" + std::to_string(j));
    w.interventions.covariates(static_cast<Eigen::Index>(j), 0) = rng.normal();
    t[j] = rng.bernoulli(0.5) ? 1 : 0;
  }
  w.interventions.treatment = t;
  w.outcomes.columns = {"x"};
  w.outcomes.covariates.resize(static_cast<Eigen::Index>(n), 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    w.outcomes.ids.push_back("U" + std::to_string(i));
    const double x = rng.normal();
    w.outcomes.covariates(static_cast<Eigen::Index>(i), 0) = x;
    y(static_cast<Eigen::Index>(i)) = 1.0 + 2.0 * x + rng.normal();
  }
  w.outcomes.outcome = y;
  return w;
}

bni::AnalysisDataset assemble(const SmallWorld& world) {
  auto net = bni::derive_exposure_structure(bni::load_network(world.triplets));
  return bni::assemble_dataset(std::move(net), world.interventions, world.outcomes);
}

std::filesystem::path temp_dir(const std::string& name) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("bni_test_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixture
