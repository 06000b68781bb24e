#pragma once

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <string>

#include <doctest.h>

#include "smcreg/error.hpp"

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("smcreg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline smcreg::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const smcreg::Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return smcreg::ErrorKind::InvariantFailure;
}
