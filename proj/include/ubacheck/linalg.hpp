#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ubacheck/graph.hpp"

namespace ubacheck::linalg {

/// Square CSR matrix with positive entries.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// Duplicate columns within a row are summed; zeros are dropped.
  static SparseMatrix from_rows(const std::vector<std::vector<std::pair<std::uint32_t, double>>>& rows);

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  std::span<const std::uint32_t> cols(std::size_t i) const {
    return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
  }
  std::span<const double> vals(std::size_t i) const {
    return {vals_.data() + offsets_[i], vals_.data() + offsets_[i + 1]};
  }
  std::size_t nonzeros() const noexcept { return vals_.size(); }

  /// y = M x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<std::vector<double>> dense() const;

 private:
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
};

/// Largest system solved by dense elimination.
inline constexpr std::size_t kDenseLimit = 4096;

/// M restricted to the edges inside one component, indexed by position in
/// dag.components[component].
SparseMatrix scc_matrix(const product::ProductAutomaton& prod, const graph::SccDag& dag,
                        std::uint32_t component);

/// rank(M - I) < n, by Gaussian elimination with partial pivoting. Pivots
/// below tol * max|M - I| count as zero.
bool positivity_rank(const SparseMatrix& m, double tol = 1e-9);

/// A vector spanning the null space of M - I when rank(M - I) = n - 1,
/// scaled so that its largest entry is 1. Empty when M - I is regular.
std::optional<std::vector<double>> null_vector(const SparseMatrix& m, double tol = 1e-9);

enum class Verdict { Zero, Positive };

struct PowerResult {
  Verdict verdict = Verdict::Zero;
  std::vector<double> vector;  // set when Positive
  std::size_t iterations = 0;
  bool used_fallback = false;
};

struct PowerOptions {
  double eps = 1e-10;
  std::size_t max_iter = 1000000;
  double rank_tol = 1e-9;
};

/// Iterates v <- (I + M)/2 v from v = 1. Stops with Zero once every entry
/// shrinks by a factor (1 - eps), with Positive once ||v' - v|| <= eps/2 ||v||,
/// which gives ||Mv - v|| <= eps ||v||. Falls back to the rank test after max_iter.
PowerResult power_iterate(const SparseMatrix& m, const PowerOptions& opts = {});

/// Solves (M - I) z = 0 with the row of index 0 replaced by sum_{i in cut} z_i = 1.
std::vector<double> solve_normalized(const SparseMatrix& m, std::span<const std::uint32_t> cut);

struct AbsorbingOptions {
  double tol = 1e-12;
  std::size_t max_sweeps = 1000000;
};

struct AbsorbingResult {
  std::vector<double> x;
  double residual = 0.0;
  std::size_t sweeps = 0;
  bool used_dense = false;
};

/// Solves x = A x + b by Gauss-Seidel in index order, with a dense LU fallback.
AbsorbingResult solve_absorbing(const SparseMatrix& a, std::span<const double> b,
                                const AbsorbingOptions& opts = {});

/// Dense LU with partial pivoting; throws NumericError when singular.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b);

}  // namespace ubacheck::linalg
