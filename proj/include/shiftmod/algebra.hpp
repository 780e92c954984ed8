#pragma once

// Finite-dimensional C*-algebras B = M_{n_1} (+) ... (+) M_{n_k}, the free
// Hilbert B-modules B^n over them, and adjointable (matrix) operators.
//
// Every object is stored blockwise. A module vector x in B^n keeps, for block
// i, the (n * n_i) x n_i complex matrix obtained by stacking the i-th blocks
// of its n entries. A module operator B^m -> B^n keeps the (n * n_i) x
// (m * n_i) matrix per block. Inner products, adjoints and products are then
// plain per-block matrix algebra.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftmod/rng.hpp"

namespace shiftmod {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AlgebraSignature {
 public:
  explicit AlgebraSignature(std::vector<int> block_dims);

  static AlgebraSignature scalars() { return AlgebraSignature({1}); }
  // C^k realized as k blocks of size 1.
  static AlgebraSignature diagonal(int k);

  const std::vector<int>& block_dims() const { return dims_; }
  std::size_t num_blocks() const { return dims_.size(); }
  int block_dim(std::size_t i) const { return dims_[i]; }
  int total_dim() const;

  std::string to_string() const;

  friend bool operator==(const AlgebraSignature&, const AlgebraSignature&) = default;

 private:
  std::vector<int> dims_;
};

class AlgebraElement {
 public:
  AlgebraElement(AlgebraSignature signature, std::vector<Matrix> blocks);

  static AlgebraElement zero(const AlgebraSignature& signature);
  static AlgebraElement identity(const AlgebraSignature& signature);
  static AlgebraElement scalar(const AlgebraSignature& signature, Complex c);
  static AlgebraElement random(const AlgebraSignature& signature, Rng& rng);

  const AlgebraSignature& signature() const { return sig_; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  AlgebraElement star() const;
  // C*-norm: the largest block operator norm.
  double norm() const;
  // Smallest eigenvalue over blocks of the Hermitian part.
  double min_eigenvalue() const;
  bool is_positive(double tol) const { return min_eigenvalue() >= -tol; }

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);
  AlgebraElement& operator*=(Complex c);

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(AlgebraElement a, Complex c) { return a *= c; }
  friend AlgebraElement operator*(Complex c, AlgebraElement a) { return a *= c; }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);

 private:
  AlgebraSignature sig_;
  std::vector<Matrix> blocks_;
};

double distance(const AlgebraElement& a, const AlgebraElement& b);

class ModuleVector {
 public:
  // blocks[i] must be (rank * n_i) x n_i.
  ModuleVector(AlgebraSignature signature, int rank, std::vector<Matrix> blocks);

  static ModuleVector zero(const AlgebraSignature& signature, int rank);
  // Canonical generator e_k (x) 1.
  static ModuleVector basis(const AlgebraSignature& signature, int rank, int k);
  static ModuleVector from_entries(const std::vector<AlgebraElement>& entries);
  static ModuleVector random(const AlgebraSignature& signature, int rank, Rng& rng);

  const AlgebraSignature& signature() const { return sig_; }
  int rank() const { return rank_; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }
  Matrix& block(std::size_t i) { return blocks_[i]; }

  AlgebraElement entry(int k) const;
  std::vector<AlgebraElement> entries() const;
  bool is_zero() const;

  ModuleVector& operator+=(const ModuleVector& other);
  ModuleVector& operator-=(const ModuleVector& other);
  ModuleVector& operator*=(Complex c);

  friend ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
  friend ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }
  friend ModuleVector operator*(ModuleVector a, Complex c) { return a *= c; }
  friend ModuleVector operator*(Complex c, ModuleVector a) { return a *= c; }
  // Right module action x . b.
  friend ModuleVector operator*(const ModuleVector& x, const AlgebraElement& b);

 private:
  AlgebraSignature sig_;
  int rank_;
  std::vector<Matrix> blocks_;
};

// <x, y> = sum_k x_k^* y_k. Throws ShapeError on mismatched signature or rank.
AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y);

// ||x|| = ||<x, x>||^{1/2}.
double norm(const ModuleVector& x);

// Vertical concatenation: entries of `parts` in order.
ModuleVector stack(const std::vector<ModuleVector>& parts);
// Inverse of stack for equally sized parts of rank `part_rank`.
std::vector<ModuleVector> unstack(const ModuleVector& x, int part_rank);

class ModuleOperator {
 public:
  // blocks[i] must be (rows * n_i) x (cols * n_i).
  ModuleOperator(AlgebraSignature signature, int rows, int cols, std::vector<Matrix> blocks);

  static ModuleOperator identity(const AlgebraSignature& signature, int n);
  static ModuleOperator zero(const AlgebraSignature& signature, int rows, int cols);
  static ModuleOperator from_entries(const std::vector<std::vector<AlgebraElement>>& entries);
  static ModuleOperator random(const AlgebraSignature& signature, int rows, int cols, Rng& rng);
  // Haar-type unitary per block from the QR factorization of a Gaussian matrix.
  static ModuleOperator random_unitary(const AlgebraSignature& signature, int n, Rng& rng);
  // Diagonal operator keeping the listed coordinates of B^n.
  static ModuleOperator coordinate_projection(const AlgebraSignature& signature, int n,
                                              const std::vector<int>& kept);

  const AlgebraSignature& signature() const { return sig_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }

  AlgebraElement entry(int r, int c) const;
  ModuleOperator adjoint() const;
  // Norm in M_{rows x cols}(B): the largest blockwise spectral norm.
  double norm() const;

  ModuleVector apply(const ModuleVector& x) const;

  ModuleOperator& operator+=(const ModuleOperator& other);
  ModuleOperator& operator-=(const ModuleOperator& other);
  ModuleOperator& operator*=(Complex c);

  friend ModuleOperator operator+(ModuleOperator a, const ModuleOperator& b) { return a += b; }
  friend ModuleOperator operator-(ModuleOperator a, const ModuleOperator& b) { return a -= b; }
  friend ModuleOperator operator*(ModuleOperator a, Complex c) { return a *= c; }
  friend ModuleOperator operator*(Complex c, ModuleOperator a) { return a *= c; }
  friend ModuleOperator operator*(const ModuleOperator& a, const ModuleOperator& b);
  friend ModuleVector operator*(const ModuleOperator& a, const ModuleVector& x) { return a.apply(x); }

 private:
  AlgebraSignature sig_;
  int rows_;
  int cols_;
  std::vector<Matrix> blocks_;
};

inline ModuleOperator op_adjoint(const ModuleOperator& t) { return t.adjoint(); }

// True iff ||T^2 - T|| <= tol and ||T^* - T|| <= tol. T must be square.
bool is_projection(const ModuleOperator& t, double tol);

struct RangeFrame {
  std::vector<ModuleVector> frame;
  // <frame_k, frame_l>, a diagonal of block projections.
  ModuleOperator gram;
  // Complex dimension, per block, of the span's column space.
  std::vector<int> block_dims;
  // max over generators of ||x - P x|| with P the projection onto the span.
  double span_residual = 0.0;
};

// Reduced generating family of the right submodule spanned by `generators`.
//
// Block i of the span is the column space of the side-by-side generator
// blocks. It is computed by SVD; singular values at most
// rel_tol * (largest singular value over all blocks) are discarded. The
// orthonormal columns are packed n_i at a time into frame vectors, so the
// frame has max_i ceil(d_i / n_i) elements and a diagonal projection Gram.
RangeFrame range_frame(const std::vector<ModuleVector>& generators, double rel_tol = 1e-8);

// P = sum_k f_k <f_k, .> for a frame with projection Gram.
ModuleOperator frame_projection(const std::vector<ModuleVector>& frame, const AlgebraSignature& signature,
                                int rank);

}  // namespace shiftmod
