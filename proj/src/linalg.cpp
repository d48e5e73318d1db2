#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ubacheck/linalg.hpp"

namespace ubacheck::linalg {

SparseMatrix SparseMatrix::from_rows(const std::vector<std::vector<std::pair<std::uint32_t, double>>>& rows) {
  SparseMatrix m;
  const std::size_t n = rows.size();
  for (const auto& row : rows) {
    std::map<std::uint32_t, double> merged;
    for (auto [j, w] : row) {
      if (j >= n) throw ValidationError("column index out of range");
      merged[j] += w;
    }
    for (auto [j, w] : merged) {
      if (w == 0.0) continue;
      m.cols_.push_back(j);
      m.vals_.push_back(w);
    }
    m.offsets_.push_back(static_cast<std::uint32_t>(m.cols_.size()));
  }
  return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) acc += vals_[k] * x[cols_[k]];
    y[i] = acc;
  }
}

std::vector<std::vector<double>> SparseMatrix::dense() const {
  const std::size_t n = size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) d[i][cols_[k]] += vals_[k];
  return d;
}

SparseMatrix scc_matrix(const product::ProductAutomaton& prod, const graph::SccDag& dag,
                        std::uint32_t component) {
  const auto& nodes = dag.components.at(component);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (const auto& e : prod.edges(nodes[i]))
      if (dag.component_of[e.target] == component && dag.alive(e.target))
        rows[i].emplace_back(dag.index_in_component[e.target], e.weight);
  return SparseMatrix::from_rows(rows);
}

namespace {

std::vector<std::vector<double>> minus_identity(const SparseMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) throw ValidationError("matrix of dimension 0");
  if (n > kDenseLimit)
    throw NumericError("dense elimination is limited to " + std::to_string(kDenseLimit) +
                       " rows; this component has " + std::to_string(n));
  auto d = m.dense();
  for (std::size_t i = 0; i < n; ++i) d[i][i] -= 1.0;
  return d;
}

struct Echelon {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> pivot_cols;
  std::vector<std::size_t> free_cols;
};

Echelon eliminate(std::vector<std::vector<double>> a, double tol) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double x : row) scale = std::max(scale, std::abs(x));
  const double threshold = tol * scale;

  Echelon e;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = r;
    double best_abs = 0.0;
    for (std::size_t i = r; i < n; ++i)
      if (std::abs(a[i][c]) > best_abs) {
        best_abs = std::abs(a[i][c]);
        best = i;
      }
    if (r >= n || best_abs <= threshold) {
      e.free_cols.push_back(c);
      continue;
    }
    std::swap(a[r], a[best]);
    const auto& pivot_row = a[r];
    for (std::size_t i = r + 1; i < n; ++i) {
      double f = a[i][c] / pivot_row[c];
      if (f == 0.0) continue;
      auto& row = a[i];
      row[c] = 0.0;
      for (std::size_t j = c + 1; j < n; ++j) row[j] -= f * pivot_row[j];
    }
    e.pivot_cols.push_back(c);
    ++r;
  }
  a.resize(r);
  e.rows = std::move(a);
  return e;
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double eigen_residual(const SparseMatrix& m, std::span<const double> v) {
  std::vector<double> mv(v.size());
  m.multiply(v, mv);
  double r = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(mv[i] - v[i]));
  return r;
}

enum class Step { Zero, Converged, Continue };

// One step of the (I + M)/2 iteration; overwrites v with the new iterate
// unless the iterate converged, in which case v is kept.
Step iterate_once(const SparseMatrix& m, std::vector<double>& v, std::vector<double>& w, double eps) {
  m.multiply(v, w);
  bool decreased = true;
  double diff = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    w[i] = 0.5 * (v[i] + w[i]);
    decreased &= w[i] <= (1.0 - eps) * v[i];
    diff = std::max(diff, std::abs(w[i] - v[i]));
    vmax = std::max(vmax, v[i]);
  }
  if (decreased) return Step::Zero;
  if (diff <= 0.5 * eps * vmax) return Step::Converged;
  v.swap(w);
  if (vmax < 1e-100)
    for (double& x : v) x /= vmax;
  return Step::Continue;
}

}  // namespace

bool positivity_rank(const SparseMatrix& m, double tol) {
  auto e = eliminate(minus_identity(m), tol);
  return e.pivot_cols.size() < m.size();
}

std::optional<std::vector<double>> null_vector(const SparseMatrix& m, double tol) {
  auto e = eliminate(minus_identity(m), tol);
  const std::size_t n = m.size();
  if (e.free_cols.size() != 1) return std::nullopt;
  std::vector<double> x(n, 0.0);
  x[e.free_cols.front()] = 1.0;
  for (std::size_t r = e.pivot_cols.size(); r-- > 0;) {
    std::size_t c = e.pivot_cols[r];
    double acc = 0.0;
    for (std::size_t j = c + 1; j < n; ++j) acc += e.rows[r][j] * x[j];
    x[c] = -acc / e.rows[r][c];
  }
  double sum = std::accumulate(x.begin(), x.end(), 0.0);
  double scale = max_norm(x);
  if (scale == 0.0) return std::nullopt;
  if (sum < 0) scale = -scale;
  for (double& xi : x) xi /= scale;
  return x;
}

PowerResult power_iterate(const SparseMatrix& m, const PowerOptions& opts) {
  if (m.size() == 0) throw ValidationError("matrix of dimension 0");
  if (!(opts.eps > 0)) throw ValidationError("eps must be positive");
  PowerResult result;
  const std::size_t n = m.size();
  std::vector<double> v(n, 1.0), w(n);
  for (std::size_t i = 1; i <= opts.max_iter; ++i) {
    Step s = iterate_once(m, v, w, opts.eps);
    if (s == Step::Continue) continue;
    result.iterations = i;
    result.verdict = s == Step::Zero ? Verdict::Zero : Verdict::Positive;
    if (s == Step::Converged) result.vector = std::move(v);
    return result;
  }

  result.iterations = opts.max_iter;
  result.used_fallback = true;
  if (n > kDenseLimit)
    throw NumericError("power iteration did not settle within " + std::to_string(opts.max_iter) +
                       " iterations on a component of size " + std::to_string(n) +
                       "; raise --max-iter");
  if (!positivity_rank(m, opts.rank_tol)) {
    result.verdict = Verdict::Zero;
    return result;
  }
  auto start = null_vector(m, opts.rank_tol);
  if (!start || std::any_of(start->begin(), start->end(), [](double x) { return x <= 0.0; }))
    throw NumericError("rank test reports a positive component but no positive eigenvector was found");
  v = std::move(*start);
  for (std::size_t i = 0; i <= opts.max_iter; ++i) {
    if (eigen_residual(m, v) <= opts.eps * max_norm(v)) {
      result.verdict = Verdict::Positive;
      result.vector = std::move(v);
      return result;
    }
    if (iterate_once(m, v, w, opts.eps) == Step::Zero)
      throw NumericError("power iteration and rank test disagree on positivity");
  }
  throw NumericError("eigenvector iteration from the rank solution did not converge");
}

std::vector<double> solve_normalized(const SparseMatrix& m, std::span<const std::uint32_t> cut) {
  auto a = minus_identity(m);
  const std::size_t n = m.size();
  std::vector<double> b(n, 0.0);
  std::fill(a[0].begin(), a[0].end(), 0.0);
  for (auto j : cut) {
    if (j >= n) throw ValidationError("cut index out of range");
    a[0][j] = 1.0;
  }
  b[0] = 1.0;
  return solve_dense(std::move(a), std::move(b));
}

std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double x : row) scale = std::max(scale, std::abs(x));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[best][c])) best = i;
    if (std::abs(a[best][c]) <= 1e-14 * scale) throw NumericError("singular linear system");
    std::swap(a[c], a[best]);
    std::swap(b[c], b[best]);
    for (std::size_t i = c + 1; i < n; ++i) {
      double f = a[i][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
      b[i] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

AbsorbingResult solve_absorbing(const SparseMatrix& a, std::span<const double> b, const AbsorbingOptions& opts) {
  const std::size_t n = a.size();
  if (b.size() != n) throw ValidationError("dimension mismatch in absorbing system");
  AbsorbingResult r;
  r.x.assign(b.begin(), b.end());
  if (n == 0) return r;

  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = a.cols(i);
    auto vals = a.vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] == i) diag[i] += vals[k];
    if (diag[i] >= 1.0) throw NumericError("absorbing system has a non-contracting self-loop");
  }
  auto residual = [&] {
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = b[i];
      auto cols = a.cols(i);
      auto vals = a.vals(i);
      for (std::size_t k = 0; k < cols.size(); ++k) acc += vals[k] * r.x[cols[k]];
      res = std::max(res, std::abs(acc - r.x[i]));
    }
    return res;
  };

  r.residual = residual();
  while (r.residual > opts.tol && r.sweeps < opts.max_sweeps) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = b[i];
      auto cols = a.cols(i);
      auto vals = a.vals(i);
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (cols[k] != i) acc += vals[k] * r.x[cols[k]];
      r.x[i] = acc / (1.0 - diag[i]);
    }
    ++r.sweeps;
    r.residual = residual();
  }
  if (r.residual <= opts.tol) return r;

  if (n > kDenseLimit)
    throw NumericError("Gauss-Seidel did not converge after " + std::to_string(r.sweeps) + " sweeps");
  auto d = a.dense();
  for (std::size_t i = 0; i < n; ++i) {
    for (double& x : d[i]) x = -x;
    d[i][i] += 1.0;
  }
  r.x = solve_dense(std::move(d), std::vector<double>(b.begin(), b.end()));
  r.used_dense = true;
  r.residual = residual();
  if (r.residual > 1e-9) throw NumericError("absorbing system has no stable solution");
  return r;
}

}  // namespace ubacheck::linalg
