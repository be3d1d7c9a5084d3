// Copyright 2026 The loccsim Authors
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

// Test helpers. The oracles here are written with explicit index loops so
// they share no code path with the library routines they check.

#include "loccsim/loccsim.hpp"

#include <random>

namespace testutil {

using loccsim::cplx;
using loccsim::Dims;
using loccsim::Matrix;
using loccsim::Vector;

inline constexpr double kTol = 1e-9;

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v.normalized();
}

inline loccsim::StateVector random_state(std::mt19937_64& rng, const Dims& dims) {
  return loccsim::StateVector(dims, random_vector(rng, static_cast<Eigen::Index>(loccsim::total_dim(dims))));
}

/// Haar-ish unitary from the QR of a complex Gaussian matrix.
inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

/// Digits of flat index `idx` in the mixed radix `dims`, most significant first.
inline std::vector<int> digits(std::size_t idx, const Dims& dims) {
  std::vector<int> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = static_cast<int>(idx % static_cast<std::size_t>(dims[k]));
    idx /= static_cast<std::size_t>(dims[k]);
  }
  return out;
}

inline std::size_t index_of(const std::vector<int>& dig, const Dims& dims) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(dig[k]);
  return idx;
}

/// rho_keep by summing |psi><psi| over matching traced-out digits.
inline Matrix naive_partial_trace(const Vector& psi, const Dims& dims, const std::vector<int>& keep) {
  Dims kd;
  for (int k : keep) kd.push_back(dims[static_cast<std::size_t>(k)]);
  const auto side = static_cast<Eigen::Index>(loccsim::total_dim(kd));
  Matrix rho = Matrix::Zero(side, side);
  const std::size_t n = loccsim::total_dim(dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto di = digits(i, dims);
      const auto dj = digits(j, dims);
      bool same_rest = true;
      for (std::size_t s = 0; s < dims.size(); ++s) {
        if (std::find(keep.begin(), keep.end(), static_cast<int>(s)) == keep.end() && di[s] != dj[s]) same_rest = false;
      }
      if (!same_rest) continue;
      std::vector<int> ki, kj;
      for (int k : keep) {
        ki.push_back(di[static_cast<std::size_t>(k)]);
        kj.push_back(dj[static_cast<std::size_t>(k)]);
      }
      rho(static_cast<Eigen::Index>(index_of(ki, kd)), static_cast<Eigen::Index>(index_of(kj, kd))) +=
          psi[static_cast<Eigen::Index>(i)] * std::conj(psi[static_cast<Eigen::Index>(j)]);
    }
  }
  return rho;
}

/// Squared overlap |<a|b>|^2.
inline double overlap2(const Vector& a, const Vector& b) { return std::norm(a.dot(b)); }

/// Literal two-qubit vector from the four amplitudes of |00>,|01>,|10>,|11>.
inline Vector qubits2(cplx a00, cplx a01, cplx a10, cplx a11) {
  Vector v(4);
  v << a00, a01, a10, a11;
  return v;
}

}  // namespace testutil
