// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_TESTS_FIXTURES_HPP
#define CONEFAN_TESTS_FIXTURES_HPP

#include "conefan/conefan.hpp"

#include <filesystem>
#include <string>

namespace fixtures {

inline std::string data(const std::string& rel) { return std::string(CONEFAN_DATA_DIR) + "/" + rel; }

inline conefan::Fan fan(const std::string& name) { return conefan::io::load_fan(data("fans/" + name + ".json")); }

inline const std::vector<std::string>& bundled_fans() {
  static const std::vector<std::string> names{"coordinate2d", "narrow10", "three-lines", "three-rays",
                                              "two-planes-3d", "octant3d", "line1d"};
  return names;
}

// Index of the fan cone equal to the cone generated by `gens`.
inline conefan::ConeIndex index_of(const conefan::Fan& f, std::vector<conefan::Vec> gens) {
  const auto i = f.find(conefan::Cone::from_generators(gens, f.ambient_dim()));
  if (!i) throw std::runtime_error("cone not in fan");
  return *i;
}

inline std::filesystem::path scratch_dir() {
  auto p = std::filesystem::temp_directory_path() / "conefan-tests";
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures

#endif  // CONEFAN_TESTS_FIXTURES_HPP
