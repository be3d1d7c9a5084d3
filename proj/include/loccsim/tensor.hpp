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

// Dense complex linear algebra on multipartite Hilbert spaces.
//
// Subsystem 0 is the most significant tensor index: for dims (d0, d1, ...)
// the basis state |i0 i1 ...> sits at flat index i0*d1*d2*... + i1*d2*... + ...

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace loccsim {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Dims = std::vector<int>;

/// Normalization, orthogonality and Hermiticity tolerance.
inline constexpr double kTolerance = 1e-9;

inline std::size_t total_dim(const Dims& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

inline void check_dims(const Dims& dims) {
  if (dims.empty()) throw std::invalid_argument("dims must be nonempty");
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument("subsystem dimension must be >= 2");
  }
}

/// Row-major strides: stride[i] = dims[i+1] * ... * dims[n-1].
inline std::vector<std::size_t> strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * static_cast<std::size_t>(dims[i]);
  return s;
}

inline Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

class StateVector {
 public:
  StateVector(Dims dims, Vector amps) : dims_(std::move(dims)), amps_(std::move(amps)) {
    check_dims(dims_);
    if (static_cast<std::size_t>(amps_.size()) != total_dim(dims_)) {
      throw std::invalid_argument("amplitude count does not match product of dims");
    }
    if (std::abs(amps_.norm() - 1.0) > kTolerance) {
      throw std::invalid_argument("state vector is not normalized (norm " +
                                  std::to_string(amps_.norm()) + ")");
    }
  }

  /// Normalizes `amps`; throws if it is (numerically) zero.
  static StateVector normalized(Dims dims, Vector amps) {
    const double n = amps.norm();
    if (n < 1e-14) throw std::invalid_argument("cannot normalize a zero vector");
    amps /= n;
    return StateVector(std::move(dims), std::move(amps));
  }

  static StateVector basis(Dims dims, std::size_t index) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(total_dim(dims)));
    if (index >= static_cast<std::size_t>(v.size())) throw std::out_of_range("basis index");
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(std::move(dims), std::move(v));
  }

  const Dims& dims() const { return dims_; }
  const Vector& amps() const { return amps_; }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }

  /// <this|other>
  cplx inner(const StateVector& other) const { return amps_.dot(other.amps_); }

  StateVector conjugate() const { return StateVector(dims_, amps_.conjugate()); }

 private:
  Dims dims_;
  Vector amps_;
};

class Operator {
 public:
  Operator(Dims dims, Matrix entries) : dims_(std::move(dims)), m_(std::move(entries)) {
    check_dims(dims_);
    const auto side = static_cast<Eigen::Index>(total_dim(dims_));
    if (m_.rows() != side || m_.cols() != side) {
      throw std::invalid_argument("operator side does not match product of dims");
    }
  }

  static Operator identity(Dims dims) {
    const auto side = static_cast<Eigen::Index>(total_dim(dims));
    return Operator(std::move(dims), Matrix::Identity(side, side));
  }

  static Operator projector(const StateVector& psi) {
    return Operator(psi.dims(), psi.amps() * psi.amps().adjoint());
  }

  const Dims& dims() const { return dims_; }
  const Matrix& matrix() const { return m_; }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }

  StateVector apply(const StateVector& psi) const {
    if (psi.dims() != dims_) throw std::invalid_argument("operator/state dims mismatch");
    return StateVector::normalized(dims_, m_ * psi.amps());
  }

 private:
  Dims dims_;
  Matrix m_;
};

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline StateVector kron(const StateVector& a, const StateVector& b) {
  return StateVector(concat(a.dims(), b.dims()), kron(a.amps(), b.amps()));
}

inline Operator kron(const Operator& a, const Operator& b) {
  return Operator(concat(a.dims(), b.dims()), kron(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// Index bookkeeping

namespace detail {

inline void check_subset(const std::vector<int>& set, int n, const char* what) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int i : set) {
    if (i < 0 || i >= n) throw std::out_of_range(std::string(what) + ": subsystem index out of range");
    if (seen[static_cast<std::size_t>(i)]) throw std::invalid_argument(std::string(what) + ": duplicate subsystem index");
    seen[static_cast<std::size_t>(i)] = true;
  }
}

inline std::vector<int> complement(const std::vector<int>& set, int n) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (int i : set) in[static_cast<std::size_t>(i)] = true;
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

inline Dims select(const Dims& dims, const std::vector<int>& idx) {
  Dims out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(dims[static_cast<std::size_t>(i)]);
  return out;
}

/// Flat global offsets of every local basis state of the subsystems `idx`
/// (first listed subsystem most significant), with all other digits zero.
inline std::vector<std::size_t> offsets(const Dims& dims, const std::vector<int>& idx) {
  const auto st = strides(dims);
  std::vector<std::size_t> out{0};
  for (int s : idx) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * static_cast<std::size_t>(dims[static_cast<std::size_t>(s)]));
    for (std::size_t base : out) {
      for (int k = 0; k < dims[static_cast<std::size_t>(s)]; ++k) {
        next.push_back(base + static_cast<std::size_t>(k) * st[static_cast<std::size_t>(s)]);
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Reorders subsystems: subsystem k of the result is subsystem perm[k] of the input.
inline StateVector permute_subsystems(const StateVector& psi, const std::vector<int>& perm) {
  if (perm.size() != psi.dims().size()) throw std::invalid_argument("permutation size mismatch");
  detail::check_subset(perm, psi.num_subsystems(), "permute_subsystems");
  const auto src = detail::offsets(psi.dims(), perm);
  Vector out(psi.amps().size());
  for (std::size_t i = 0; i < src.size(); ++i) out[static_cast<Eigen::Index>(i)] = psi.amps()[static_cast<Eigen::Index>(src[i])];
  return StateVector(detail::select(psi.dims(), perm), std::move(out));
}

/// Amplitude matrix with rows indexed by subsystems `a` and columns by `b`.
inline Matrix amplitude_matrix(const StateVector& psi, const std::vector<int>& a, const std::vector<int>& b) {
  const auto ra = detail::offsets(psi.dims(), a);
  const auto rb = detail::offsets(psi.dims(), b);
  Matrix m(static_cast<Eigen::Index>(ra.size()), static_cast<Eigen::Index>(rb.size()));
  for (std::size_t i = 0; i < ra.size(); ++i) {
    for (std::size_t j = 0; j < rb.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = psi.amps()[static_cast<Eigen::Index>(ra[i] + rb[j])];
    }
  }
  return m;
}

/// Applies a local operator on `targets` (in the listed order) to a full
/// amplitude vector over `dims`. The result is not renormalized.
inline Vector apply_local(const Matrix& op, const std::vector<int>& targets, const Dims& dims, const Vector& v) {
  const auto local = detail::offsets(dims, targets);
  if (static_cast<Eigen::Index>(local.size()) != op.rows() || op.rows() != op.cols()) {
    throw std::invalid_argument("local operator size does not match target dims");
  }
  const auto rest = detail::offsets(dims, detail::complement(targets, static_cast<int>(dims.size())));
  const auto k = static_cast<Eigen::Index>(local.size());
  Vector out(v.size());
  Vector buf(k);
  for (std::size_t base : rest) {
    for (Eigen::Index t = 0; t < k; ++t) buf[t] = v[static_cast<Eigen::Index>(base + local[static_cast<std::size_t>(t)])];
    const Vector res = op * buf;
    for (Eigen::Index t = 0; t < k; ++t) out[static_cast<Eigen::Index>(base + local[static_cast<std::size_t>(t)])] = res[t];
  }
  return out;
}

/// Full-space matrix of a local operator acting on `targets`.
inline Matrix embed(const Matrix& op, const std::vector<int>& targets, const Dims& dims) {
  const auto side = static_cast<Eigen::Index>(total_dim(dims));
  detail::check_subset(targets, static_cast<int>(dims.size()), "embed");
  Matrix out(side, side);
  for (Eigen::Index c = 0; c < side; ++c) {
    Vector e = Vector::Zero(side);
    e[c] = 1.0;
    out.col(c) = apply_local(op, targets, dims, e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partial trace

inline Operator partial_trace(const StateVector& psi, std::vector<int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  detail::check_subset(keep, psi.num_subsystems(), "partial_trace");
  std::sort(keep.begin(), keep.end());
  const auto rest = detail::complement(keep, psi.num_subsystems());
  const Matrix a = amplitude_matrix(psi, keep, rest);
  return Operator(detail::select(psi.dims(), keep), a * a.adjoint());
}

inline Operator partial_trace(const Operator& rho, std::vector<int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  detail::check_subset(keep, rho.num_subsystems(), "partial_trace");
  std::sort(keep.begin(), keep.end());
  const auto rest = detail::complement(keep, rho.num_subsystems());
  const auto rk = detail::offsets(rho.dims(), keep);
  const auto rr = detail::offsets(rho.dims(), rest);
  const auto side = static_cast<Eigen::Index>(rk.size());
  Matrix out = Matrix::Zero(side, side);
  for (std::size_t i = 0; i < rk.size(); ++i) {
    for (std::size_t j = 0; j < rk.size(); ++j) {
      cplx acc = 0.0;
      for (std::size_t r : rr) acc += rho.matrix()(static_cast<Eigen::Index>(rk[i] + r), static_cast<Eigen::Index>(rk[j] + r));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return Operator(detail::select(rho.dims(), keep), std::move(out));
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition with deterministic ordering

namespace detail {

/// Rotates `v` so its first entry with modulus above 1e-12 is real-positive.
inline void fix_phase(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > 1e-12) {
      v *= std::conj(v[i]) / m;
      return;
    }
  }
}

/// Canonical orthonormal basis for the span of the orthonormal columns of
/// `x`: Gram-Schmidt on the projections P e_0, P e_1, ... in index order.
inline std::vector<Vector> canonical_basis(const Matrix& x) {
  const auto g = x.cols();
  std::vector<Vector> out;
  if (g == 0) return out;
  for (Eigen::Index j = 0; j < x.rows() && static_cast<Eigen::Index>(out.size()) < g; ++j) {
    Vector v = x * x.row(j).adjoint();
    for (const auto& u : out) v -= u * u.dot(v);
    const double n = v.norm();
    if (n > 1e-6) {
      v /= n;
      fix_phase(v);
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace detail

struct HermitianEigen {
  std::vector<double> values;   // descending
  std::vector<Vector> vectors;  // orthonormal, canonical within degenerate clusters
};

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are sorted
/// descending; within a degenerate cluster the basis is canonicalized so the
/// first vector is the normalized projection of the lowest-index basis state
/// with nonzero overlap, with its first nonzero entry real-positive.
inline HermitianEigen eigh(const Matrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eigh: matrix not square");
  if ((h - h.adjoint()).norm() > kTolerance * std::max(1.0, h.norm())) {
    throw std::invalid_argument("eigh: matrix not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const auto n = h.rows();
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  HermitianEigen out;
  Eigen::Index hi = n;
  while (hi > 0) {
    Eigen::Index lo = hi - 1;
    while (lo > 0 && std::abs(ev[lo - 1] - ev[hi - 1]) <= kTolerance * scale) --lo;
    const Matrix cluster = es.eigenvectors().middleCols(lo, hi - lo);
    auto basis = detail::canonical_basis(cluster);
    double mean = ev.segment(lo, hi - lo).mean();
    for (auto& v : basis) {
      out.values.push_back(mean);
      out.vectors.push_back(std::move(v));
    }
    hi = lo;
  }
  return out;
}

/// Principal eigenvector with the deterministic tie-break of `eigh`.
inline Vector principal_eigenvector(const Matrix& h) { return eigh(h).vectors.front(); }

/// Principal eigenvector of rho = sum_i w_i |v_i><v_i|, computed through the
/// k x k Gram matrix so the cost does not scale with the ambient dimension
/// squared. Same tie-break as `eigh`. Returns e_0 when rho vanishes.
inline Vector principal_eigenvector_of_mixture(const std::vector<Vector>& vs, const std::vector<double>& weights) {
  if (vs.size() != weights.size()) throw std::invalid_argument("mixture: size mismatch");
  if (vs.empty()) throw std::invalid_argument("mixture: empty");
  const auto dim = vs.front().size();
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (weights[i] > 0.0) live.push_back(i);
  }
  Vector fallback = Vector::Zero(dim);
  fallback[0] = 1.0;
  if (live.empty()) return fallback;
  Matrix b(dim, static_cast<Eigen::Index>(live.size()));
  for (std::size_t c = 0; c < live.size(); ++c) b.col(static_cast<Eigen::Index>(c)) = std::sqrt(weights[live[c]]) * vs[live[c]];
  Eigen::SelfAdjointEigenSolver<Matrix> es(b.adjoint() * b);
  const Eigen::VectorXd& mu = es.eigenvalues();
  const auto k = mu.size();
  const double top = mu[k - 1];
  if (top < 1e-300) return fallback;
  Eigen::Index lo = k - 1;
  while (lo > 0 && std::abs(mu[lo - 1] - top) <= kTolerance * top) --lo;
  Matrix x(dim, k - lo);
  for (Eigen::Index c = lo; c < k; ++c) {
    x.col(c - lo) = b * es.eigenvectors().col(c) / std::sqrt(mu[c]);
  }
  // Re-orthonormalize against rounding in the lifted vectors.
  Eigen::HouseholderQR<Matrix> qr(x);
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, x.cols());
  return detail::canonical_basis(q).front();
}

// ---------------------------------------------------------------------------
// Schmidt decomposition and entanglement

/// Subsystem-level bipartition.
struct Cut {
  std::vector<int> a;
  std::vector<int> b;
};

struct SchmidtData {
  std::vector<double> coefficients;  // descending
  std::vector<Vector> left_vectors;
  std::vector<Vector> right_vectors;
  std::size_t rank = 0;
  Dims left_dims;
  Dims right_dims;

  std::vector<double> squared() const {
    std::vector<double> out;
    out.reserve(coefficients.size());
    for (double c : coefficients) out.push_back(c * c);
    return out;
  }
};

inline void check_cut(const Cut& cut, int n) {
  if (cut.a.empty() || cut.b.empty()) throw std::invalid_argument("bipartition has an empty side");
  std::vector<int> all = cut.a;
  all.insert(all.end(), cut.b.begin(), cut.b.end());
  detail::check_subset(all, n, "bipartition");
  if (static_cast<int>(all.size()) != n) throw std::invalid_argument("bipartition does not cover every subsystem");
}

inline SchmidtData schmidt(const StateVector& psi, const Cut& cut) {
  check_cut(cut, psi.num_subsystems());
  const Matrix m = amplitude_matrix(psi, cut.a, cut.b);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtData out;
  out.left_dims = detail::select(psi.dims(), cut.a);
  out.right_dims = detail::select(psi.dims(), cut.b);
  const auto& s = svd.singularValues();
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    Vector u = svd.matrixU().col(k);
    Vector v = svd.matrixV().col(k).conjugate();
    // Move the phase that makes u canonical onto v.
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double mag = std::abs(u[i]);
      if (mag > 1e-12) {
        const cplx ph = std::conj(u[i]) / mag;
        u *= ph;
        v /= ph;
        break;
      }
    }
    out.coefficients.push_back(s[k]);
    out.left_vectors.push_back(std::move(u));
    out.right_vectors.push_back(std::move(v));
    if (s[k] > kTolerance) ++out.rank;
  }
  return out;
}

/// Base-2 Shannon entropy of a probability list, with 0 log 0 = 0.
inline double shannon_entropy_bits(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// Von Neumann entropy (ebits) of the reduced state on side `a`.
inline double entanglement_entropy(const StateVector& psi, const Cut& cut) {
  return shannon_entropy_bits(schmidt(psi, cut).squared());
}

/// Every bipartition of `groups` (each group a set of subsystems), with the
/// first group always on side `a`.
inline std::vector<Cut> all_cuts(const std::vector<std::vector<int>>& groups) {
  std::vector<Cut> out;
  const std::size_t g = groups.size();
  if (g < 2) return out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << (g - 1)) - 1; ++mask) {
    // Group 0 always in a; bits of mask choose groups 1..g-1 for a.
    Cut c;
    c.a = groups[0];
    for (std::size_t i = 1; i < g; ++i) {
      auto& side = ((mask >> (i - 1)) & 1U) ? c.a : c.b;
      side.insert(side.end(), groups[i].begin(), groups[i].end());
    }
    out.push_back(std::move(c));
  }
  return out;
}

struct SchmidtMeasureBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool exact() const { return std::abs(upper - lower) < kTolerance; }
};

/// Lower bound: max over bipartitions of `groups` of log2(Schmidt rank).
/// Upper bound: log2 of the number of product terms in a known expansion.
inline SchmidtMeasureBounds schmidt_measure_bounds(const StateVector& psi, std::size_t decomposition_terms,
                                                   const std::vector<std::vector<int>>& groups) {
  if (decomposition_terms < 1) throw std::invalid_argument("decomposition_terms must be >= 1");
  SchmidtMeasureBounds b;
  for (const auto& cut : all_cuts(groups)) {
    b.lower = std::max(b.lower, std::log2(static_cast<double>(schmidt(psi, cut).rank)));
  }
  b.upper = std::log2(static_cast<double>(decomposition_terms));
  if (b.lower > b.upper + kTolerance) {
    throw std::invalid_argument("decomposition_terms is below the Schmidt-rank lower bound");
  }
  return b;
}

/// Same, treating every subsystem as its own party.
inline SchmidtMeasureBounds schmidt_measure_bounds(const StateVector& psi, std::size_t decomposition_terms) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < psi.num_subsystems(); ++i) groups.push_back({i});
  return schmidt_measure_bounds(psi, decomposition_terms, groups);
}

// ---------------------------------------------------------------------------
// Small fixed operators

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace loccsim
