#pragma once

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <string>

#include "rtfnet/modal_sim.hpp"
#include "rtfnet/rng.hpp"

namespace testsupport {

inline rtfnet::RoomSpec reference_room(double t60 = 1.0) {
  rtfnet::RoomSpec r;
  r.lx = 4.8;
  r.ly = 5.4;
  r.lz = 2.4;
  r.t60 = t60;
  r.source = {2.1, 2.0, 1.2};
  r.z_plane = 1.2;
  return r;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  auto base = std::filesystem::temp_directory_path() /
              ("rtfnet_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base;
}

}  // namespace testsupport
