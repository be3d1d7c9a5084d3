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

// One-way discrimination with a resource (I (x) Lambda^1/2)|Phi>: the matrix
// picture of a bipartite d x d ensemble, the orthogonality residual that
// vanishes iff the one-way necessary condition holds, and a multi-start
// Levenberg-Marquardt probe of its feasibility.
//
// Conjugation convention: M_i^* below is the adjoint M_i^dagger. With
// phi = (I (x) R)|Phi>,  <phi|Lambda (x) A|phi> = Tr(R Lambda R^dagger A) / d,
// so the conditions are trace-orthogonality against M_i^dagger M_j.

#include "loccsim/zoo.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <random>

namespace loccsim {

struct MatrixRep {
  int d = 0;
  std::vector<Matrix> matrices;

  /// (I (x) M_i)|Phi> with |Phi> = (1/sqrt d) sum_j |jj>.
  Vector member(std::size_t i) const {
    const Matrix& m = matrices.at(i);
    Vector v(d * d);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) v[j * d + k] = m(k, j) / std::sqrt(static_cast<double>(d));
    }
    return v;
  }
};

/// Amplitudes psi[j*d + k] as the matrix sqrt(d) * Psi^T.
inline Matrix to_matrix(const Vector& amps, int d) {
  if (amps.size() != static_cast<Eigen::Index>(d) * d) throw std::invalid_argument("to_matrix: vector is not d*d");
  Matrix m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) m(k, j) = std::sqrt(static_cast<double>(d)) * amps[j * d + k];
  }
  return m;
}

inline MatrixRep to_matrix_rep(const Ensemble& ens) {
  const auto& layout = ens.layout();
  if (layout.num_parties() != 2) throw std::invalid_argument("to_matrix_rep: ensemble must be bipartite");
  const auto& a = layout.parties()[0].subsystems;
  const auto& b = layout.parties()[1].subsystems;
  std::size_t da = 1, db = 1;
  for (int s : a) da *= static_cast<std::size_t>(ens.dims()[static_cast<std::size_t>(s)]);
  for (int s : b) db *= static_cast<std::size_t>(ens.dims()[static_cast<std::size_t>(s)]);
  if (da != db) throw std::invalid_argument("to_matrix_rep: unequal local dimensions " + std::to_string(da) + " and " + std::to_string(db));
  std::vector<int> perm = a;
  perm.insert(perm.end(), b.begin(), b.end());
  MatrixRep rep;
  rep.d = static_cast<int>(da);
  for (const auto& m : ens.members()) rep.matrices.push_back(to_matrix(permute_subsystems(m.state, perm).amps(), rep.d));
  return rep;
}

struct ResourceSpectrum {
  std::vector<double> lambdas;

  explicit ResourceSpectrum(std::vector<double> l) : lambdas(std::move(l)) {
    if (lambdas.empty()) throw std::invalid_argument("ResourceSpectrum: empty");
    double sum = 0.0;
    for (double x : lambdas) {
      if (x < 0.0) throw std::invalid_argument("ResourceSpectrum: negative eigenvalue");
      sum += x;
    }
    if (std::abs(sum - static_cast<double>(lambdas.size())) > 1e-9) {
      throw std::invalid_argument("ResourceSpectrum: trace must equal d");
    }
  }

  static ResourceSpectrum maximally_entangled(int d) { return ResourceSpectrum(std::vector<double>(static_cast<std::size_t>(d), 1.0)); }

  int d() const { return static_cast<int>(lambdas.size()); }

  Matrix matrix() const {
    Matrix m = Matrix::Zero(d(), d());
    for (int i = 0; i < d(); ++i) m(i, i) = lambdas[static_cast<std::size_t>(i)];
    return m;
  }
};

namespace detail {

/// Lambda (x) M_i^dagger M_j for every ordered pair i != j.
inline std::vector<Matrix> condition_operators(const MatrixRep& rep, const ResourceSpectrum& lambdas) {
  if (lambdas.d() != rep.d) throw std::invalid_argument("orthogonality_residual: spectrum length differs from d");
  const Matrix lam = lambdas.matrix();
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < rep.matrices.size(); ++i) {
    for (std::size_t j = 0; j < rep.matrices.size(); ++j) {
      if (i != j) ops.push_back(kron(lam, Matrix(rep.matrices[i].adjoint() * rep.matrices[j])));
    }
  }
  return ops;
}

}  // namespace detail

/// sum_k sum_{i != j} |<phi_k|Lambda (x) M_i^dagger M_j|phi_k>|^2
///   + || sum_k a_k |phi_k><phi_k| - I ||_F^2
inline double orthogonality_residual(const MatrixRep& rep, const ResourceSpectrum& lambdas, const std::vector<Vector>& phis,
                                     const std::vector<double>& weights) {
  if (phis.size() != weights.size()) throw std::invalid_argument("orthogonality_residual: one weight per vector required");
  const auto side = static_cast<Eigen::Index>(rep.d) * rep.d;
  const auto ops = detail::condition_operators(rep, lambdas);
  double cond = 0.0;
  Matrix sum = Matrix::Zero(side, side);
  for (std::size_t k = 0; k < phis.size(); ++k) {
    if (phis[k].size() != side) throw std::invalid_argument("orthogonality_residual: vector is not in C^{d^2}");
    if (!(weights[k] > 0.0)) throw std::invalid_argument("orthogonality_residual: weights must be positive");
    const Vector phi = phis[k].normalized();
    for (const auto& x : ops) cond += std::norm(phi.dot(x * phi));
    sum += weights[k] * phi * phi.adjoint();
  }
  return cond + (sum - Matrix::Identity(side, side)).squaredNorm();
}

/// phi_t = (I (x) W_t)|Phi>, a_t = 1: satisfies the conditions when Lambda = I
/// for any orthonormal ensemble.
struct OneWayCertificate {
  std::vector<Vector> phis;
  std::vector<double> weights;
};

inline OneWayCertificate teleportation_certificate(int d) {
  OneWayCertificate c;
  for (int t = 0; t < d * d; ++t) {
    c.phis.push_back(generalized_bell_state(d, t));
    c.weights.push_back(1.0);
  }
  return c;
}

struct FeasibilityResult {
  double best_residual = std::numeric_limits<double>::infinity();
  std::size_t best_restart = 0;
  std::vector<double> restart_residuals;
  OneWayCertificate certificate;
  std::size_t outcomes = 0;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// Parameters: K unnormalized vectors v_k (real and imaginary parts), with
// a_k = |v_k|^2 and phi_k = v_k / |v_k|.
struct OneWayFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::vector<Matrix> ops;
  Eigen::Index side = 0;
  std::size_t k = 0;

  int inputs() const { return static_cast<int>(2 * k * static_cast<std::size_t>(side)); }
  int values() const {
    const auto raw = 2 * k * ops.size() + 2 * static_cast<std::size_t>(side * side);
    return static_cast<int>(std::max<std::size_t>(raw, static_cast<std::size_t>(inputs())));
  }

  Vector vec(const Eigen::VectorXd& x, std::size_t j) const {
    Vector v(side);
    const auto base = static_cast<Eigen::Index>(2 * j) * side;
    for (Eigen::Index i = 0; i < side; ++i) v[i] = cplx(x[base + i], x[base + side + i]);
    return v;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    f.setZero(values());
    Eigen::Index at = 0;
    Matrix sum = -Matrix::Identity(side, side);
    for (std::size_t j = 0; j < k; ++j) {
      const Vector v = vec(x, j);
      const double n2 = std::max(v.squaredNorm(), 1e-30);
      for (const auto& op : ops) {
        const cplx c = v.dot(op * v) / n2;
        f[at++] = c.real();
        f[at++] = c.imag();
      }
      sum += v * v.adjoint();
    }
    for (Eigen::Index r = 0; r < side; ++r) {
      for (Eigen::Index c = 0; c < side; ++c) {
        f[at++] = sum(r, c).real();
        f[at++] = sum(r, c).imag();
      }
    }
    return 0;
  }

  // Row pairs (real, imag) match operator(); column pairs are (Re v_i, Im v_i)
  // blocks of each vector.
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    jac.setZero(values(), inputs());
    const cplx iu(0.0, 1.0);
    Eigen::Index row = 0;
    std::vector<Vector> vs;
    for (std::size_t j = 0; j < k; ++j) {
      const Vector v = vec(x, j);
      vs.push_back(v);
      const double n2 = std::max(v.squaredNorm(), 1e-30);
      const auto re0 = static_cast<Eigen::Index>(2 * j) * side;
      const auto im0 = re0 + side;
      for (const auto& op : ops) {
        const Vector xv = op * v;
        const Vector xdv = op.adjoint() * v;
        const cplx g = v.dot(xv);
        for (Eigen::Index i = 0; i < side; ++i) {
          const cplx dg_re = xv[i] + std::conj(xdv[i]);
          const cplx dg_im = -iu * xv[i] + iu * std::conj(xdv[i]);
          const cplx dc_re = (dg_re * n2 - g * 2.0 * v[i].real()) / (n2 * n2);
          const cplx dc_im = (dg_im * n2 - g * 2.0 * v[i].imag()) / (n2 * n2);
          jac(row, re0 + i) = dc_re.real();
          jac(row + 1, re0 + i) = dc_re.imag();
          jac(row, im0 + i) = dc_im.real();
          jac(row + 1, im0 + i) = dc_im.imag();
        }
        row += 2;
      }
    }
    // S = sum_j v_j v_j^dagger - I; dS_rc/dRe v_i = d_ri conj(v_c) + v_r d_ci,
    // dS_rc/dIm v_i = i d_ri conj(v_c) - i v_r d_ci.
    for (Eigen::Index r = 0; r < side; ++r) {
      for (Eigen::Index c = 0; c < side; ++c) {
        for (std::size_t j = 0; j < k; ++j) {
          const auto re0 = static_cast<Eigen::Index>(2 * j) * side;
          const auto im0 = re0 + side;
          const Vector& v = vs[j];
          auto put = [&](Eigen::Index col, cplx val) {
            jac(row, col) += val.real();
            jac(row + 1, col) += val.imag();
          };
          put(re0 + r, std::conj(v[c]));
          put(re0 + c, v[r]);
          put(im0 + r, iu * std::conj(v[c]));
          put(im0 + c, -iu * v[r]);
        }
        row += 2;
      }
    }
    return 0;
  }
};

}  // namespace detail

/// Multi-start local descent on orthogonality_residual. Restart r draws its
/// starting point from mt19937_64 seeded with (seed, r); the minimum wins,
/// ties going to the lower restart index. A small best residual is evidence
/// of feasibility, a large one evidence against; neither is a proof.
/// Infeasible instances sit in a flat valley, so each restart is capped at
/// `max_evaluations` residual evaluations.
inline FeasibilityResult feasibility_search(const MatrixRep& rep, const ResourceSpectrum& lambdas, std::size_t outcomes,
                                            std::size_t restarts, std::uint64_t seed, int max_evaluations = 200) {
  const auto side = static_cast<std::size_t>(rep.d) * static_cast<std::size_t>(rep.d);
  if (outcomes < side) throw std::invalid_argument("feasibility_search: need K >= d^2 outcomes");
  if (restarts < 1) throw std::invalid_argument("feasibility_search: need at least one restart");
  detail::OneWayFunctor fn;
  fn.ops = detail::condition_operators(rep, lambdas);
  fn.side = static_cast<Eigen::Index>(side);
  fn.k = outcomes;

  FeasibilityResult out;
  out.outcomes = outcomes;
  out.restarts = restarts;
  out.seed = seed;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(ss);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0 * static_cast<double>(outcomes)));
    Eigen::VectorXd x(fn.inputs());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = gauss(rng);

    Eigen::LevenbergMarquardt<detail::OneWayFunctor, double> lm(fn);
    lm.parameters.maxfev = max_evaluations;
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-16;
    lm.minimize(x);

    OneWayCertificate cert;
    for (std::size_t j = 0; j < outcomes; ++j) {
      const Vector v = fn.vec(x, j);
      const double n2 = v.squaredNorm();
      // A vanished vector carries no weight; drop it from the certificate.
      if (n2 < 1e-24) continue;
      cert.phis.push_back(v / std::sqrt(n2));
      cert.weights.push_back(n2);
    }
    const double res = cert.phis.empty() ? std::numeric_limits<double>::infinity()
                                         : orthogonality_residual(rep, lambdas, cert.phis, cert.weights);
    out.restart_residuals.push_back(res);
    if (res < out.best_residual) {
      out.best_residual = res;
      out.best_restart = r;
      out.certificate = std::move(cert);
    }
  }
  return out;
}

struct RkStructureReport {
  std::size_t full_rank_member = 0;
  Matrix r_lambda_r;  // R Lambda R^dagger
  double distance = 0.0;  // from the nearest multiple of the identity
};

/// Writes phi = (I (x) R)|Phi> and measures how far R Lambda R^dagger is from
/// a multiple of the identity. Zero iff phi meets the conditions against a
/// full-rank member, since {M_1^dagger M_j} then span the traceless matrices.
inline RkStructureReport rk_structure_check(const MatrixRep& rep, const ResourceSpectrum& lambdas, const Vector& phi) {
  if (lambdas.d() != rep.d) throw std::invalid_argument("rk_structure_check: spectrum length differs from d");
  RkStructureReport out;
  bool found = false;
  for (std::size_t i = 0; i < rep.matrices.size() && !found; ++i) {
    Eigen::ColPivHouseholderQR<Matrix> qr(rep.matrices[i]);
    qr.setThreshold(1e-9);
    if (qr.rank() == rep.d) {
      out.full_rank_member = i;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("rk_structure_check: no full-rank member");
  const Matrix r = to_matrix(phi.normalized(), rep.d);
  out.r_lambda_r = r * lambdas.matrix() * r.adjoint();
  const cplx mean = out.r_lambda_r.trace() / static_cast<double>(rep.d);
  out.distance = (out.r_lambda_r - mean * Matrix::Identity(rep.d, rep.d)).norm();
  return out;
}

/// Rank of the vectorized {M_i^dagger M_j}_{j != i} and the largest |trace|
/// among them.
struct SpanReport {
  Eigen::Index rank = 0;
  double max_abs_trace = 0.0;
};

inline SpanReport adjoint_product_span(const MatrixRep& rep, std::size_t i) {
  const auto side = static_cast<Eigen::Index>(rep.d) * rep.d;
  Matrix cols(side, static_cast<Eigen::Index>(rep.matrices.size()) - 1);
  SpanReport out;
  Eigen::Index c = 0;
  for (std::size_t j = 0; j < rep.matrices.size(); ++j) {
    if (j == i) continue;
    const Matrix p = rep.matrices[i].adjoint() * rep.matrices[j];
    out.max_abs_trace = std::max(out.max_abs_trace, std::abs(p.trace()));
    cols.col(c++) = p.reshaped();
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(cols);
  qr.setThreshold(1e-9);
  out.rank = qr.rank();
  return out;
}

}  // namespace loccsim
