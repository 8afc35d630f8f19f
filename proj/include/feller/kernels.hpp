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

#pragma once

#include <span>
#include <string_view>

// Data-parallel inner loops of the solvers. Every kernel has a scalar reference
// implementation and an AVX2 variant; the variant is chosen once at startup
// from the CPU features (override with FELLER_SIMD=scalar|avx2) and must agree
// with the reference bit for bit, so no FMA contraction is used on either side.
namespace feller::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend b);
bool available(Backend b);
Backend active();
// Throws std::invalid_argument if the backend is not available on this machine.
void select(Backend b);

// dY/dt of the Lagrangian system with factor = eta * exp(gamma t):
//   out[0] = 0,
//   out[k] = -factor Y_k / dpc[k] (dph[k] / (Y_{k+1} - Y_k) - dph[k-1] / (Y_k - Y_{k-1})),
//   out[N] =  factor Y_N / dpc[N] (dph[N-1] / (Y_N - Y_{N-1})).
// Returns false if any gap is not strictly positive (out is filled regardless).
bool lagrangian_rhs(std::span<const double> y, std::span<const double> dp_half,
                    std::span<const double> dp_center, double factor, std::span<double> out);

// out = y + h * sum_j coeffs[j] * stages[j], skipping zero coefficients.
void stage_combine(std::span<const double> y, double h, std::span<const double* const> stages,
                   std::span<const double> coeffs, std::span<double> out);

// max_i |h sum_j coeffs[j] stages[j][i]| / (abstol + reltol max(|y_old_i|, |y_new_i|)).
double weighted_error(std::span<const double> y_old, std::span<const double> y_new, double h,
                      std::span<const double* const> stages, std::span<const double> coeffs,
                      double abstol, double reltol);

// One full-truncation Euler-Maruyama step for a batch of paths:
//   x <- max(0, x + (drift0 - gamma x) dt + sqrt(two_eta max(x, 0) dt) z).
void feller_em_step(std::span<double> x, std::span<const double> normals, double drift0,
                    double gamma, double two_eta, double dt);

namespace scalar {
bool lagrangian_rhs(std::span<const double> y, std::span<const double> dp_half,
                    std::span<const double> dp_center, double factor, std::span<double> out);
void stage_combine(std::span<const double> y, double h, std::span<const double* const> stages,
                   std::span<const double> coeffs, std::span<double> out);
double weighted_error(std::span<const double> y_old, std::span<const double> y_new, double h,
                      std::span<const double* const> stages, std::span<const double> coeffs,
                      double abstol, double reltol);
void feller_em_step(std::span<double> x, std::span<const double> normals, double drift0,
                    double gamma, double two_eta, double dt);
}  // namespace scalar

#if defined(FELLER_HAVE_AVX2)
namespace avx2 {
bool lagrangian_rhs(std::span<const double> y, std::span<const double> dp_half,
                    std::span<const double> dp_center, double factor, std::span<double> out);
void stage_combine(std::span<const double> y, double h, std::span<const double* const> stages,
                   std::span<const double> coeffs, std::span<double> out);
double weighted_error(std::span<const double> y_old, std::span<const double> y_new, double h,
                      std::span<const double* const> stages, std::span<const double> coeffs,
                      double abstol, double reltol);
void feller_em_step(std::span<double> x, std::span<const double> normals, double drift0,
                    double gamma, double two_eta, double dt);
}  // namespace avx2
#endif

}  // namespace feller::kernels
