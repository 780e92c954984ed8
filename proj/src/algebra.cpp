#include "shiftmod/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace shiftmod {

namespace {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

void require(bool cond, const char* what) {
  if (!cond) throw ShapeError(what);
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  // Column-major fill order is part of the reproducible stream.
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.complex_normal();
  return m;
}

}  // namespace

// --- AlgebraSignature -------------------------------------------------------

AlgebraSignature::AlgebraSignature(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw ShapeError("algebra signature must have at least one block");
  for (int d : dims_)
    if (d < 1) throw ShapeError("algebra block dimensions must be positive");
}

AlgebraSignature AlgebraSignature::diagonal(int k) {
  if (k < 1) throw ShapeError("diagonal algebra needs at least one point");
  return AlgebraSignature(std::vector<int>(static_cast<std::size_t>(k), 1));
}

int AlgebraSignature::total_dim() const { return std::accumulate(dims_.begin(), dims_.end(), 0); }

std::string AlgebraSignature::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? " + " : "") << "M" << dims_[i];
  return os.str();
}

// --- AlgebraElement ---------------------------------------------------------

AlgebraElement::AlgebraElement(AlgebraSignature signature, std::vector<Matrix> blocks)
    : sig_(std::move(signature)), blocks_(std::move(blocks)) {
  require(blocks_.size() == sig_.num_blocks(), "algebra element: block count does not match signature");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int n = sig_.block_dim(i);
    require(blocks_[i].rows() == n && blocks_[i].cols() == n, "algebra element: block shape mismatch");
  }
}

AlgebraElement AlgebraElement::zero(const AlgebraSignature& signature) {
  std::vector<Matrix> blocks;
  for (int n : signature.block_dims()) blocks.push_back(Matrix::Zero(n, n));
  return AlgebraElement(signature, std::move(blocks));
}

AlgebraElement AlgebraElement::identity(const AlgebraSignature& signature) {
  return scalar(signature, 1.0);
}

AlgebraElement AlgebraElement::scalar(const AlgebraSignature& signature, Complex c) {
  std::vector<Matrix> blocks;
  for (int n : signature.block_dims()) blocks.push_back(c * Matrix::Identity(n, n));
  return AlgebraElement(signature, std::move(blocks));
}

AlgebraElement AlgebraElement::random(const AlgebraSignature& signature, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int n : signature.block_dims()) blocks.push_back(gaussian(n, n, rng));
  return AlgebraElement(signature, std::move(blocks));
}

AlgebraElement AlgebraElement::star() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) blocks.push_back(b.adjoint());
  return AlgebraElement(sig_, std::move(blocks));
}

double AlgebraElement::norm() const {
  double n = 0.0;
  for (const auto& b : blocks_) n = std::max(n, spectral_norm(b));
  return n;
}

double AlgebraElement::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks_) {
    const Matrix h = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  require(sig_ == other.sig_, "algebra element: signature mismatch");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) {
  require(sig_ == other.sig_, "algebra element: signature mismatch");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex c) {
  for (auto& b : blocks_) b *= c;
  return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  require(a.sig_ == b.sig_, "algebra element: signature mismatch");
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks_.size());
  for (std::size_t i = 0; i < a.blocks_.size(); ++i) blocks.push_back(a.blocks_[i] * b.blocks_[i]);
  return AlgebraElement(a.sig_, std::move(blocks));
}

double distance(const AlgebraElement& a, const AlgebraElement& b) { return (a - b).norm(); }

// --- ModuleVector -----------------------------------------------------------

ModuleVector::ModuleVector(AlgebraSignature signature, int rank, std::vector<Matrix> blocks)
    : sig_(std::move(signature)), rank_(rank), blocks_(std::move(blocks)) {
  require(rank_ >= 0, "module vector: negative rank");
  require(blocks_.size() == sig_.num_blocks(), "module vector: block count does not match signature");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int n = sig_.block_dim(i);
    require(blocks_[i].rows() == rank_ * n && blocks_[i].cols() == n, "module vector: block shape mismatch");
  }
}

ModuleVector ModuleVector::zero(const AlgebraSignature& signature, int rank) {
  std::vector<Matrix> blocks;
  for (int n : signature.block_dims()) blocks.push_back(Matrix::Zero(rank * n, n));
  return ModuleVector(signature, rank, std::move(blocks));
}

ModuleVector ModuleVector::basis(const AlgebraSignature& signature, int rank, int k) {
  require(k >= 0 && k < rank, "module vector: basis index out of range");
  ModuleVector v = zero(signature, rank);
  for (std::size_t i = 0; i < signature.num_blocks(); ++i) {
    const int n = signature.block_dim(i);
    v.blocks_[i].block(k * n, 0, n, n) = Matrix::Identity(n, n);
  }
  return v;
}

ModuleVector ModuleVector::from_entries(const std::vector<AlgebraElement>& entries) {
  require(!entries.empty(), "module vector: no entries");
  const AlgebraSignature& sig = entries.front().signature();
  const int rank = static_cast<int>(entries.size());
  ModuleVector v = zero(sig, rank);
  for (int k = 0; k < rank; ++k) {
    require(entries[k].signature() == sig, "module vector: entry signature mismatch");
    for (std::size_t i = 0; i < sig.num_blocks(); ++i) {
      const int n = sig.block_dim(i);
      v.blocks_[i].block(k * n, 0, n, n) = entries[k].block(i);
    }
  }
  return v;
}

ModuleVector ModuleVector::random(const AlgebraSignature& signature, int rank, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int n : signature.block_dims()) blocks.push_back(gaussian(rank * n, n, rng));
  return ModuleVector(signature, rank, std::move(blocks));
}

AlgebraElement ModuleVector::entry(int k) const {
  require(k >= 0 && k < rank_, "module vector: entry index out of range");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int n = sig_.block_dim(i);
    blocks.push_back(blocks_[i].block(k * n, 0, n, n));
  }
  return AlgebraElement(sig_, std::move(blocks));
}

std::vector<AlgebraElement> ModuleVector::entries() const {
  std::vector<AlgebraElement> out;
  out.reserve(static_cast<std::size_t>(rank_));
  for (int k = 0; k < rank_; ++k) out.push_back(entry(k));
  return out;
}

bool ModuleVector::is_zero() const {
  for (const auto& b : blocks_)
    if (!b.isZero(0.0)) return false;
  return true;
}

ModuleVector& ModuleVector::operator+=(const ModuleVector& other) {
  require(sig_ == other.sig_ && rank_ == other.rank_, "module vector: shape mismatch");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

ModuleVector& ModuleVector::operator-=(const ModuleVector& other) {
  require(sig_ == other.sig_ && rank_ == other.rank_, "module vector: shape mismatch");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

ModuleVector& ModuleVector::operator*=(Complex c) {
  for (auto& b : blocks_) b *= c;
  return *this;
}

ModuleVector operator*(const ModuleVector& x, const AlgebraElement& b) {
  require(x.sig_ == b.signature(), "module vector: signature mismatch in right action");
  std::vector<Matrix> blocks;
  blocks.reserve(x.blocks_.size());
  for (std::size_t i = 0; i < x.blocks_.size(); ++i) blocks.push_back(x.blocks_[i] * b.block(i));
  return ModuleVector(x.sig_, x.rank_, std::move(blocks));
}

AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y) {
  if (!(x.signature() == y.signature()) || x.rank() != y.rank())
    throw ShapeError("inner product: signature or rank mismatch");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < x.signature().num_blocks(); ++i) blocks.push_back(x.block(i).adjoint() * y.block(i));
  return AlgebraElement(x.signature(), std::move(blocks));
}

double norm(const ModuleVector& x) {
  // ||<x,x>||^{1/2}: block i of <x,x> is X_i^* X_i, so take its top eigenvalue.
  double top = 0.0;
  for (std::size_t i = 0; i < x.signature().num_blocks(); ++i) {
    const Matrix g = x.block(i).adjoint() * x.block(i);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    top = std::max(top, es.eigenvalues()(es.eigenvalues().size() - 1));
  }
  return std::sqrt(std::max(top, 0.0));
}

ModuleVector stack(const std::vector<ModuleVector>& parts) {
  require(!parts.empty(), "stack: no parts");
  const AlgebraSignature& sig = parts.front().signature();
  int rank = 0;
  for (const auto& p : parts) {
    require(p.signature() == sig, "stack: signature mismatch");
    rank += p.rank();
  }
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < sig.num_blocks(); ++i) {
    const int n = sig.block_dim(i);
    Matrix m(rank * n, n);
    Eigen::Index row = 0;
    for (const auto& p : parts) {
      m.middleRows(row, p.block(i).rows()) = p.block(i);
      row += p.block(i).rows();
    }
    blocks.push_back(std::move(m));
  }
  return ModuleVector(sig, rank, std::move(blocks));
}

std::vector<ModuleVector> unstack(const ModuleVector& x, int part_rank) {
  require(part_rank > 0 && x.rank() % part_rank == 0, "unstack: rank not divisible");
  const AlgebraSignature& sig = x.signature();
  std::vector<ModuleVector> out;
  for (int p = 0; p < x.rank() / part_rank; ++p) {
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i < sig.num_blocks(); ++i) {
      const int n = sig.block_dim(i);
      blocks.push_back(x.block(i).middleRows(p * part_rank * n, part_rank * n));
    }
    out.emplace_back(sig, part_rank, std::move(blocks));
  }
  return out;
}

// --- ModuleOperator ---------------------------------------------------------

ModuleOperator::ModuleOperator(AlgebraSignature signature, int rows, int cols, std::vector<Matrix> blocks)
    : sig_(std::move(signature)), rows_(rows), cols_(cols), blocks_(std::move(blocks)) {
  require(rows_ >= 0 && cols_ >= 0, "module operator: negative shape");
  require(blocks_.size() == sig_.num_blocks(), "module operator: block count does not match signature");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int n = sig_.block_dim(i);
    require(blocks_[i].rows() == rows_ * n && blocks_[i].cols() == cols_ * n,
            "module operator: block shape mismatch");
  }
}

ModuleOperator ModuleOperator::identity(const AlgebraSignature& signature, int n) {
  std::vector<Matrix> blocks;
  for (int d : signature.block_dims()) blocks.push_back(Matrix::Identity(n * d, n * d));
  return ModuleOperator(signature, n, n, std::move(blocks));
}

ModuleOperator ModuleOperator::zero(const AlgebraSignature& signature, int rows, int cols) {
  std::vector<Matrix> blocks;
  for (int d : signature.block_dims()) blocks.push_back(Matrix::Zero(rows * d, cols * d));
  return ModuleOperator(signature, rows, cols, std::move(blocks));
}

ModuleOperator ModuleOperator::from_entries(const std::vector<std::vector<AlgebraElement>>& entries) {
  require(!entries.empty() && !entries.front().empty(), "module operator: no entries");
  const AlgebraSignature& sig = entries.front().front().signature();
  const int rows = static_cast<int>(entries.size());
  const int cols = static_cast<int>(entries.front().size());
  ModuleOperator t = zero(sig, rows, cols);
  for (int r = 0; r < rows; ++r) {
    require(static_cast<int>(entries[r].size()) == cols, "module operator: ragged entry matrix");
    for (int c = 0; c < cols; ++c) {
      require(entries[r][c].signature() == sig, "module operator: entry signature mismatch");
      for (std::size_t i = 0; i < sig.num_blocks(); ++i) {
        const int n = sig.block_dim(i);
        t.blocks_[i].block(r * n, c * n, n, n) = entries[r][c].block(i);
      }
    }
  }
  return t;
}

ModuleOperator ModuleOperator::random(const AlgebraSignature& signature, int rows, int cols, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int d : signature.block_dims()) blocks.push_back(gaussian(rows * d, cols * d, rng));
  return ModuleOperator(signature, rows, cols, std::move(blocks));
}

ModuleOperator ModuleOperator::random_unitary(const AlgebraSignature& signature, int n, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int d : signature.block_dims()) {
    const Matrix g = gaussian(n * d, n * d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the column phases so the distribution does not depend on LAPACK sign conventions.
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      const Complex rkk = r(k, k);
      if (std::abs(rkk) > 0.0) q.col(k) *= rkk / std::abs(rkk);
    }
    blocks.push_back(std::move(q));
  }
  return ModuleOperator(signature, n, n, std::move(blocks));
}

ModuleOperator ModuleOperator::coordinate_projection(const AlgebraSignature& signature, int n,
                                                     const std::vector<int>& kept) {
  ModuleOperator p = zero(signature, n, n);
  for (int k : kept) {
    require(k >= 0 && k < n, "coordinate projection: index out of range");
    for (std::size_t i = 0; i < signature.num_blocks(); ++i) {
      const int d = signature.block_dim(i);
      p.blocks_[i].block(k * d, k * d, d, d) = Matrix::Identity(d, d);
    }
  }
  return p;
}

AlgebraElement ModuleOperator::entry(int r, int c) const {
  require(r >= 0 && r < rows_ && c >= 0 && c < cols_, "module operator: entry index out of range");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int n = sig_.block_dim(i);
    blocks.push_back(blocks_[i].block(r * n, c * n, n, n));
  }
  return AlgebraElement(sig_, std::move(blocks));
}

ModuleOperator ModuleOperator::adjoint() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) blocks.push_back(b.adjoint());
  return ModuleOperator(sig_, cols_, rows_, std::move(blocks));
}

double ModuleOperator::norm() const {
  double n = 0.0;
  for (const auto& b : blocks_) n = std::max(n, spectral_norm(b));
  return n;
}

ModuleVector ModuleOperator::apply(const ModuleVector& x) const {
  if (!(x.signature() == sig_) || x.rank() != cols_) throw ShapeError("module operator: apply shape mismatch");
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks.push_back(blocks_[i] * x.block(i));
  return ModuleVector(sig_, rows_, std::move(blocks));
}

ModuleOperator& ModuleOperator::operator+=(const ModuleOperator& other) {
  require(sig_ == other.sig_ && rows_ == other.rows_ && cols_ == other.cols_, "module operator: shape mismatch");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

ModuleOperator& ModuleOperator::operator-=(const ModuleOperator& other) {
  require(sig_ == other.sig_ && rows_ == other.rows_ && cols_ == other.cols_, "module operator: shape mismatch");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

ModuleOperator& ModuleOperator::operator*=(Complex c) {
  for (auto& b : blocks_) b *= c;
  return *this;
}

ModuleOperator operator*(const ModuleOperator& a, const ModuleOperator& b) {
  require(a.sig_ == b.sig_ && a.cols_ == b.rows_, "module operator: product shape mismatch");
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks_.size());
  for (std::size_t i = 0; i < a.blocks_.size(); ++i) blocks.push_back(a.blocks_[i] * b.blocks_[i]);
  return ModuleOperator(a.sig_, a.rows_, b.cols_, std::move(blocks));
}

bool is_projection(const ModuleOperator& t, double tol) {
  require(t.rows() == t.cols(), "is_projection: operator must be square");
  return (t * t - t).norm() <= tol && (t.adjoint() - t).norm() <= tol;
}

// --- range_frame ------------------------------------------------------------

RangeFrame range_frame(const std::vector<ModuleVector>& generators, double rel_tol) {
  if (generators.empty()) {
    return RangeFrame{{}, ModuleOperator(AlgebraSignature::scalars(), 0, 0, {Matrix(0, 0)}), {0}, 0.0};
  }
  const AlgebraSignature sig = generators.front().signature();
  const int rank = generators.front().rank();
  for (const auto& g : generators)
    require(g.signature() == sig && g.rank() == rank, "range_frame: generators must share signature and rank");

  const std::size_t nb = sig.num_blocks();
  std::vector<Matrix> left(nb);
  std::vector<Eigen::VectorXd> sv(nb);
  double sigma_max = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    const int n = sig.block_dim(i);
    Matrix side(rank * n, static_cast<Eigen::Index>(generators.size()) * n);
    for (std::size_t g = 0; g < generators.size(); ++g)
      side.middleCols(static_cast<Eigen::Index>(g) * n, n) = generators[g].block(i);
    Eigen::JacobiSVD<Matrix> svd(side, Eigen::ComputeThinU);
    left[i] = svd.matrixU();
    sv[i] = svd.singularValues();
    if (sv[i].size() > 0) sigma_max = std::max(sigma_max, sv[i](0));
  }

  const double cutoff = rel_tol * sigma_max;
  std::vector<int> dims(nb, 0);
  int frame_size = 0;
  for (std::size_t i = 0; i < nb; ++i) {
    if (sigma_max > 0.0)
      for (Eigen::Index k = 0; k < sv[i].size(); ++k)
        if (sv[i](k) > cutoff) ++dims[i];
    const int n = sig.block_dim(i);
    frame_size = std::max(frame_size, (dims[i] + n - 1) / n);
  }

  std::vector<ModuleVector> frame;
  for (int k = 0; k < frame_size; ++k) {
    ModuleVector f = ModuleVector::zero(sig, rank);
    for (std::size_t i = 0; i < nb; ++i) {
      const int n = sig.block_dim(i);
      for (int c = 0; c < n; ++c) {
        const int col = k * n + c;
        if (col < dims[i]) f.block(i).col(c) = left[i].col(col);
      }
    }
    frame.push_back(std::move(f));
  }

  std::vector<Matrix> gram_blocks;
  for (std::size_t i = 0; i < nb; ++i) {
    const int n = sig.block_dim(i);
    Matrix packed(rank * n, frame_size * n);
    for (int k = 0; k < frame_size; ++k) packed.middleCols(k * n, n) = frame[k].block(i);
    gram_blocks.push_back(packed.adjoint() * packed);
  }
  ModuleOperator gram(sig, frame_size, frame_size, std::move(gram_blocks));

  double residual = 0.0;
  if (frame_size > 0) {
    const ModuleOperator p = frame_projection(frame, sig, rank);
    for (const auto& g : generators) residual = std::max(residual, norm(g - p.apply(g)));
  } else {
    for (const auto& g : generators) residual = std::max(residual, norm(g));
  }
  return RangeFrame{std::move(frame), std::move(gram), std::move(dims), residual};
}

ModuleOperator frame_projection(const std::vector<ModuleVector>& frame, const AlgebraSignature& signature,
                                int rank) {
  ModuleOperator p = ModuleOperator::zero(signature, rank, rank);
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < signature.num_blocks(); ++i) {
    Matrix b = Matrix::Zero(p.block(i).rows(), p.block(i).cols());
    for (const auto& f : frame) b += f.block(i) * f.block(i).adjoint();
    blocks.push_back(std::move(b));
  }
  return ModuleOperator(signature, rank, rank, std::move(blocks));
}

}  // namespace shiftmod
