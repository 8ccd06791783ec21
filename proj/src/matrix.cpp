#include "mlandscape/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "mlandscape/rng.hpp"

namespace mlandscape {

namespace {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double smallest_eigenvalue(const SparseSymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return es.eigenvalues()(0);
}

}  // namespace

// -- Builder ------------------------------------------------------------------

SparseSymMatrix::Builder::Builder(std::size_t n) : n_(n), diag_(n, 0.0), diag_set_(n, false) {
  if (n == 0) throw InputError("matrix dimension must be positive");
}

SparseSymMatrix::Builder& SparseSymMatrix::Builder::set(Index i, Index j, double value) {
  if (i >= n_ || j >= n_) {
    throw InputError("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                     ") outside a " + std::to_string(n_) + "x" + std::to_string(n_) + " matrix");
  }
  if (!std::isfinite(value)) throw InputError("non-finite matrix entry");
  if (i > j) std::swap(i, j);
  if (i == j) {
    if (diag_set_[i]) throw InputError("duplicate diagonal entry " + std::to_string(i + 1));
    diag_set_[i] = true;
    diag_[i] = value;
  } else {
    off_.push_back({i, j, value});
  }
  return *this;
}

SparseSymMatrix SparseSymMatrix::Builder::build() && {
  std::sort(off_.begin(), off_.end(), [](const Entry& x, const Entry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  for (std::size_t k = 1; k < off_.size(); ++k) {
    if (off_[k].row == off_[k - 1].row && off_[k].col == off_[k - 1].col) {
      throw InputError("duplicate entry (" + std::to_string(off_[k].row + 1) + "," +
                       std::to_string(off_[k].col + 1) + ")");
    }
  }

  SparseSymMatrix m;
  m.diag_ = std::move(diag_);
  std::vector<std::size_t> counts(n_, 0);
  for (const auto& e : off_) {
    if (e.value == 0.0) continue;
    ++counts[e.row];
    ++counts[e.col];
  }
  m.row_ptr_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) m.row_ptr_[i + 1] = m.row_ptr_[i] + counts[i];
  m.cols_.resize(m.row_ptr_[n_]);
  std::vector<std::size_t> fill(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
  for (const auto& e : off_) {
    if (e.value == 0.0) continue;
    m.cols_[fill[e.row]++] = {e.col, e.value};
    m.cols_[fill[e.col]++] = {e.row, e.value};
  }
  for (std::size_t i = 0; i < n_; ++i) {
    std::sort(m.cols_.begin() + m.row_ptr_[i], m.cols_.begin() + m.row_ptr_[i + 1],
              [](const Coupling& x, const Coupling& y) { return x.col < y.col; });
  }
  return m;
}

// -- SparseSymMatrix ----------------------------------------------------------

SparseSymMatrix SparseSymMatrix::from_dense(const Matrix& dense) {
  if (dense.rows() != dense.cols()) throw InputError("matrix is not square");
  const auto n = static_cast<std::size_t>(dense.rows());
  Builder b(n);
  for (Index i = 0; i < n; ++i) {
    b.set(i, i, dense(i, i));
    for (Index j = i + 1; j < n; ++j) {
      if (dense(i, j) != dense(j, i)) throw InputError("matrix is not symmetric");
      if (dense(i, j) != 0.0) b.set(i, j, dense(i, j));
    }
  }
  return std::move(b).build();
}

SparseSymMatrix SparseSymMatrix::diagonal(const Vector& d) {
  Builder b(static_cast<std::size_t>(d.size()));
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) b.set(i, i, d(i));
  return std::move(b).build();
}

double SparseSymMatrix::operator()(Index i, Index j) const {
  if (i == j) return diag_.at(i);
  const auto r = row(i);
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Coupling& c, Index col) { return c.col < col; });
  return (it != r.end() && it->col == j) ? it->value : 0.0;
}

std::span<const Coupling> SparseSymMatrix::row(Index i) const {
  return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::vector<Entry> SparseSymMatrix::upper_entries() const {
  std::vector<Entry> out;
  out.reserve(size() + offdiag_nonzeros());
  for (Index i = 0; i < size(); ++i) {
    out.push_back({i, i, diag_[i]});
    for (const auto& c : row(i)) {
      if (c.col > i) out.push_back({i, c.col, c.value});
    }
  }
  return out;
}

std::size_t SparseSymMatrix::bandwidth() const {
  std::size_t w = 0;
  for (Index i = 0; i < size(); ++i) {
    for (const auto& c : row(i)) w = std::max(w, c.col > i ? c.col - i : i - c.col);
  }
  return w;
}

double SparseSymMatrix::max_abs() const {
  double m = 0.0;
  for (double d : diag_) m = std::max(m, std::abs(d));
  for (const auto& c : cols_) m = std::max(m, std::abs(c.value));
  return m;
}

double SparseSymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double d : diag_) s += d * d;
  for (const auto& c : cols_) s += c.value * c.value;
  return std::sqrt(s);
}

Vector SparseSymMatrix::multiply(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != size()) throw InputError("dimension mismatch");
  Vector y(x.size());
  for (Index i = 0; i < size(); ++i) {
    double s = diag_[i] * x(i);
    for (const auto& c : row(i)) s += c.value * x(c.col);
    y(i) = s;
  }
  return y;
}

Matrix SparseSymMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < size(); ++i) {
    m(i, i) = diag_[i];
    for (const auto& c : row(i)) m(i, c.col) = c.value;
  }
  return m;
}

SparseSymMatrix SparseSymMatrix::shifted(double shift) const {
  SparseSymMatrix m = *this;
  for (double& d : m.diag_) d += shift;
  return m;
}

bool operator==(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  if (a.diag_ != b.diag_ || a.row_ptr_ != b.row_ptr_ || a.cols_.size() != b.cols_.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.cols_.size(); ++k) {
    if (a.cols_[k].col != b.cols_[k].col || a.cols_[k].value != b.cols_[k].value) return false;
  }
  return true;
}

// -- classification and construction -----------------------------------------

void EnsembleConfig::validate() const {
  if (n == 0) throw InputError("ensemble dimension n must be positive");
  if (half_bandwidth == 0) throw InputError("half bandwidth must be positive");
  if (half_bandwidth >= n) throw InputError("half bandwidth must be smaller than n");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be positive");
}

std::size_t connectivity(const SparseSymMatrix& a) {
  std::size_t w = 0;
  for (Index i = 0; i < a.size(); ++i) w = std::max(w, a.row(i).size());
  return w;
}

MatrixClass classify(const SparseSymMatrix& a, bool compute_spectrum) {
  MatrixClass c;
  c.connectivity = connectivity(a);
  c.is_z = true;
  for (Index i = 0; i < a.size() && c.is_z; ++i) {
    for (const auto& e : a.row(i)) {
      if (e.value > 0.0) {
        c.is_z = false;
        break;
      }
    }
  }
  if (compute_spectrum) {
    const double lmin = smallest_eigenvalue(a);
    c.min_eigenvalue = lmin;
    c.near_singular = std::abs(lmin) <= 1e-12;
    c.is_m = c.is_z && lmin > 0.0 && !c.near_singular;
  }
  return c;
}

EnsembleSample band_ensemble_from_draws(const std::vector<double>& diag,
                                        const std::vector<std::vector<double>>& super,
                                        double epsilon) {
  const std::size_t n = diag.size();
  SparseSymMatrix::Builder b(n);
  for (Index i = 0; i < n; ++i) b.set(i, i, diag[i]);
  for (std::size_t d = 1; d <= super.size(); ++d) {
    const auto& draws = super[d - 1];
    if (draws.size() != n - std::min(n, d)) {
      throw InputError("superdiagonal " + std::to_string(d) + " has the wrong length");
    }
    for (Index i = 0; i + d < n; ++i) {
      // exact zero draws stay structural zeros
      if (draws[i] != 0.0) b.set(i, i + d, -std::abs(draws[i]));
    }
  }
  SparseSymMatrix a0 = std::move(b).build();

  EnsembleSample s;
  s.lambda0 = smallest_eigenvalue(a0);
  s.shift = epsilon - s.lambda0;
  s.matrix = a0.shifted(s.shift);
  return s;
}

EnsembleSample generate_band_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  std::vector<double> diag(cfg.n);
  NormalStream diag_stream(cfg.seed, 0);
  for (auto& x : diag) x = diag_stream.normal();

  std::vector<std::vector<double>> super(cfg.half_bandwidth);
  for (std::size_t d = 1; d <= cfg.half_bandwidth; ++d) {
    NormalStream stream(cfg.seed, d);
    super[d - 1].resize(cfg.n - d);
    for (auto& x : super[d - 1]) x = stream.normal();
  }
  return band_ensemble_from_draws(diag, super, cfg.epsilon);
}

SparseSymMatrix restrict_to(const SparseSymMatrix& a, const IndexSet& m) {
  const auto in = mask_of(m, a.size());
  SparseSymMatrix::Builder b(a.size());
  for (Index i = 0; i < a.size(); ++i) {
    b.set(i, i, in[i] ? a.diag(i) : 0.0);
    if (!in[i]) continue;
    for (const auto& c : a.row(i)) {
      if (c.col > i && in[c.col]) b.set(i, c.col, c.value);
    }
  }
  return std::move(b).build();
}

Matrix principal_submatrix(const SparseSymMatrix& a, const IndexSet& m) {
  std::vector<std::ptrdiff_t> local(a.size(), -1);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] >= a.size()) throw InputError("index " + std::to_string(m[k]) + " out of range");
    local[m[k]] = static_cast<std::ptrdiff_t>(k);
  }
  const auto sz = static_cast<Eigen::Index>(m.size());
  Matrix sub = Matrix::Zero(sz, sz);
  for (std::size_t k = 0; k < m.size(); ++k) {
    sub(k, k) = a.diag(m[k]);
    for (const auto& c : a.row(m[k])) {
      if (local[c.col] >= 0) sub(k, local[c.col]) = c.value;
    }
  }
  return sub;
}

// -- Matrix Market ------------------------------------------------------------

void write_matrix(const SparseSymMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  const auto entries = a.upper_entries();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.size() << ' ' << a.size() << ' ' << entries.size() << '\n';
  // lower triangle: emit (col, row) of each upper entry, column-major order
  std::vector<Entry> lower;
  lower.reserve(entries.size());
  for (const auto& e : entries) lower.push_back({e.col, e.row, e.value});
  std::sort(lower.begin(), lower.end(), [](const Entry& x, const Entry& y) {
    return x.col != y.col ? x.col < y.col : x.row < y.row;
  });
  for (const auto& e : lower) {
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << format_double(e.value) << '\n';
  }
  if (!out) throw InputError("write to " + path.string() + " failed");
}

SparseSymMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
  };
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw InputError(path.string() + ": not a Matrix Market coordinate file");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double") {
    throw InputError(path.string() + ": unsupported field '" + field + "'");
  }
  if (symmetry != "symmetric" && symmetry != "general") {
    throw InputError(path.string() + ": unsupported symmetry '" + symmetry + "'");
  }

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::size_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz)) throw InputError(path.string() + ": bad size line");
  }
  if (rows != cols) throw InputError(path.string() + ": matrix is not square");
  if (rows == 0) throw InputError(path.string() + ": empty matrix");

  std::map<std::pair<Index, Index>, double> seen;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(es >> i >> j >> v)) throw InputError(path.string() + ": malformed entry '" + line + "'");
    if (i == 0 || j == 0 || i > rows || j > cols) {
      throw InputError(path.string() + ": entry index out of range in '" + line + "'");
    }
    if (!std::isfinite(v)) throw InputError(path.string() + ": non-finite entry");
    ++count;
    const auto key = std::make_pair(i - 1, j - 1);
    if (!seen.emplace(key, v).second) throw InputError(path.string() + ": duplicate entry");
  }
  if (count != nnz) {
    throw InputError(path.string() + ": expected " + std::to_string(nnz) + " entries, found " +
                     std::to_string(count));
  }

  SparseSymMatrix::Builder b(rows);
  for (const auto& [key, v] : seen) {
    const auto [i, j] = key;
    if (symmetry == "general") {
      auto mirror = seen.find({j, i});
      const double other = mirror == seen.end() ? 0.0 : mirror->second;
      if (other != v) {
        throw InputError(path.string() + ": general matrix is not symmetric at (" +
                         std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
      if (i > j) continue;
    } else if (seen.count({j, i}) && i != j) {
      throw InputError(path.string() + ": symmetric file lists both (i,j) and (j,i)");
    }
    b.set(i, j, v);
  }
  return std::move(b).build();
}

}  // namespace mlandscape
