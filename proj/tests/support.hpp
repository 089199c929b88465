#pragma once

#include <cmath>
#include <vector>

#include "doctest.h"
#include "gpmem/error.hpp"

// Expects a gpmem::Error carrying `expected_code`.
#define CHECK_GPMEM_ERROR(expr, expected_code)                     \
  do {                                                             \
    bool thrown_ = false;                                          \
    try {                                                          \
      (void)(expr);                                                \
    } catch (const gpmem::Error& e_) {                             \
      thrown_ = true;                                              \
      CHECK_MESSAGE(e_.code() == (expected_code), e_.what());      \
    }                                                              \
    CHECK_MESSAGE(thrown_, "expected " #expected_code);            \
  } while (0)

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}
