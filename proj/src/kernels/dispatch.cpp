// Copyright 2026 The Feller Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "feller/kernels.hpp"

namespace feller::kernels {

namespace {

struct Table {
  Backend backend;
  bool (*rhs)(std::span<const double>, std::span<const double>, std::span<const double>, double,
              std::span<double>);
  void (*combine)(std::span<const double>, double, std::span<const double* const>,
                  std::span<const double>, std::span<double>);
  double (*error)(std::span<const double>, std::span<const double>, double,
                  std::span<const double* const>, std::span<const double>, double, double);
  void (*em)(std::span<double>, std::span<const double>, double, double, double, double);
};

constexpr Table kScalar{Backend::scalar, scalar::lagrangian_rhs, scalar::stage_combine,
                        scalar::weighted_error, scalar::feller_em_step};
#if defined(FELLER_HAVE_AVX2)
constexpr Table kAvx2{Backend::avx2, avx2::lagrangian_rhs, avx2::stage_combine,
                      avx2::weighted_error, avx2::feller_em_step};
#endif

const Table& table_for(Backend b) {
#if defined(FELLER_HAVE_AVX2)
  if (b == Backend::avx2) return kAvx2;
#endif
  (void)b;
  return kScalar;
}

Backend initial_backend() {
  Backend best = available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("FELLER_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && available(Backend::avx2)) return Backend::avx2;
  }
  return best;
}

const Table*& current() {
  static const Table* t = &table_for(initial_backend());
  return t;
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

bool available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(FELLER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Backend active() { return current()->backend; }

void select(Backend b) {
  if (!available(b)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(to_string(b)));
  }
  current() = &table_for(b);
}

bool lagrangian_rhs(std::span<const double> y, std::span<const double> dp_half,
                    std::span<const double> dp_center, double factor, std::span<double> out) {
  return current()->rhs(y, dp_half, dp_center, factor, out);
}

void stage_combine(std::span<const double> y, double h, std::span<const double* const> stages,
                   std::span<const double> coeffs, std::span<double> out) {
  current()->combine(y, h, stages, coeffs, out);
}

double weighted_error(std::span<const double> y_old, std::span<const double> y_new, double h,
                      std::span<const double* const> stages, std::span<const double> coeffs,
                      double abstol, double reltol) {
  return current()->error(y_old, y_new, h, stages, coeffs, abstol, reltol);
}

void feller_em_step(std::span<double> x, std::span<const double> normals, double drift0,
                    double gamma, double two_eta, double dt) {
  current()->em(x, normals, drift0, gamma, two_eta, dt);
}

}  // namespace feller::kernels
