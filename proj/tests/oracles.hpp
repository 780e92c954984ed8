#pragma once

// Reference computations written directly against raw storage, independent of
// the library routines they are compared with.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "shiftmod/grid.hpp"

namespace oracle {

using shiftmod::Complex;
using shiftmod::Matrix;

// <x, y> block i, entry (a, b) = sum over stacked rows r of conj(x_i(r, a)) y_i(r, b).
inline std::vector<Matrix> inner_product(const shiftmod::ModuleVector& x, const shiftmod::ModuleVector& y) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < x.signature().num_blocks(); ++i) {
    const Matrix& xb = x.block(i);
    const Matrix& yb = y.block(i);
    Matrix m = Matrix::Zero(xb.cols(), yb.cols());
    for (Eigen::Index a = 0; a < xb.cols(); ++a)
      for (Eigen::Index b = 0; b < yb.cols(); ++b) {
        Complex acc = 0.0;
        for (Eigen::Index r = 0; r < xb.rows(); ++r) acc += std::conj(xb(r, a)) * yb(r, b);
        m(a, b) = acc;
      }
    out.push_back(std::move(m));
  }
  return out;
}

// Largest eigenvalue of a Hermitian positive semidefinite matrix by power iteration.
inline double top_eigenvalue(const Matrix& h, int iterations = 2000) {
  const Eigen::Index n = h.rows();
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) += Complex(0.1 * static_cast<double>(k), 0.05);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd w = h * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    lambda = wn / v.norm();
    v = w / wn;
  }
  return lambda;
}

// ||x|| = sqrt(max over blocks of the top eigenvalue of <x, x>_i).
inline double norm(const shiftmod::ModuleVector& x) {
  double worst = 0.0;
  for (const auto& m : oracle::inner_product(x, x)) worst = std::max(worst, top_eigenvalue(m));
  return std::sqrt(worst);
}

// Slot table of a grid vector: slot -> stacked raw blocks.
using Slots = std::map<std::int64_t, shiftmod::ModuleVector>;

inline Slots slots(const shiftmod::GridVector& f) { return {f.entries().begin(), f.entries().end()}; }

// Right shift of the slot table by t, dropping slots below `floor`.
inline Slots shift(const Slots& f, std::int64_t t, std::int64_t floor) {
  Slots out;
  for (const auto& [j, v] : f)
    if (j + t >= floor) out.emplace(j + t, v);
  return out;
}

inline Slots restrict(const Slots& f, std::int64_t a, std::int64_t b) {
  Slots out;
  for (const auto& [j, v] : f)
    if (j >= a && j < b) out.emplace(j, v);
  return out;
}

// Largest raw entry difference between a grid vector and a slot table.
inline double distance(const shiftmod::GridVector& f, const Slots& g) {
  double worst = 0.0;
  auto diff = [&](const shiftmod::ModuleVector& a, const shiftmod::ModuleVector* b) {
    for (std::size_t i = 0; i < a.signature().num_blocks(); ++i) {
      const Matrix d = b ? Matrix(a.block(i) - b->block(i)) : a.block(i);
      worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
  };
  for (const auto& [j, v] : f.entries()) {
    auto it = g.find(j);
    diff(v, it == g.end() ? nullptr : &it->second);
  }
  for (const auto& [j, v] : g)
    if (!f.entries().count(j)) diff(v, nullptr);
  return worst;
}

// Grid inner product h * sum_j <f_j, g_j>, block by block.
inline std::vector<Matrix> grid_inner_product(const shiftmod::GridVector& f, const shiftmod::GridVector& g) {
  const double h = f.spec().step();
  const auto& sig = f.spec().signature();
  std::vector<Matrix> acc;
  for (std::size_t i = 0; i < sig.num_blocks(); ++i) acc.push_back(Matrix::Zero(sig.block_dim(i), sig.block_dim(i)));
  for (const auto& [j, v] : f.entries()) {
    auto it = g.entries().find(j);
    if (it == g.entries().end()) continue;
    const auto ip = oracle::inner_product(v, it->second);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += h * ip[i];
  }
  return acc;
}

inline double max_abs_difference(const std::vector<Matrix>& a, const shiftmod::AlgebraElement& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a[i] - b.block(i)).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace oracle
