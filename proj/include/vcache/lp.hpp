#pragma once

// Dense two-phase tableau simplex for small linear programs:
//
//   maximize c'x  subject to  A x <= b,  x >= 0
//
// Negative right-hand sides are handled by a phase-one auxiliary variable.
// Pricing is largest-coefficient with index tie-breaks; after a run of
// degenerate pivots the solver falls back to Bland's smallest-index rule,
// which cannot cycle, until the objective moves again.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vcache::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Result {
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

struct Options {
  double eps = 1e-9;
  std::size_t max_pivots = 200000;
  std::size_t degenerate_run_before_bland = 50;
  bool always_bland = false;
};

// Soft limit on the tableau size this solver is meant for.
inline constexpr std::size_t kMaxVariables = 5000;

class Problem {
 public:
  explicit Problem(std::size_t variables) : c_(variables, 0.0) {}

  std::size_t variables() const { return c_.size(); }
  std::size_t constraints() const { return b_.size(); }

  void set_objective(std::size_t j, double v) { c_.at(j) = v; }

  // Adds sum_j row[j] x_j <= rhs given sparse (index, coefficient) terms.
  void add_le(const std::vector<std::pair<std::size_t, double>>& terms, double rhs) {
    std::vector<double> row(c_.size(), 0.0);
    for (const auto& [j, a] : terms) row.at(j) += a;
    rows_.push_back(std::move(row));
    b_.push_back(rhs);
  }

  void add_ge(const std::vector<std::pair<std::size_t, double>>& terms, double rhs) {
    auto neg = terms;
    for (auto& t : neg) t.second = -t.second;
    add_le(neg, -rhs);
  }

  void add_eq(const std::vector<std::pair<std::size_t, double>>& terms, double rhs) {
    add_le(terms, rhs);
    add_ge(terms, rhs);
  }

  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& rhs() const { return b_; }
  const std::vector<double>& objective() const { return c_; }

 private:
  std::vector<double> c_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> b_;
};

namespace detail {

class Tableau {
 public:
  Tableau(const Problem& p, const Options& opt)
      : m_(p.constraints()), n_(p.variables()), opt_(opt), basic_(m_), nonbasic_(n_ + 1),
        d_((m_ + 2) * (n_ + 2), 0.0) {
    const auto& a = p.rows();
    const auto& b = p.rhs();
    const auto& c = p.objective();
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = a[i][j];
    for (std::size_t i = 0; i < m_; ++i) {
      basic_[i] = static_cast<long>(n_ + i);
      at(i, n_) = -1.0;
      at(i, n_ + 1) = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = static_cast<long>(j);
      at(m_, j) = -c[j];
    }
    nonbasic_[n_] = -1;
    at(m_ + 1, n_) = 1.0;
  }

  Result solve() {
    Result res;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
    if (m_ > 0 && at(r, n_ + 1) < -opt_.eps) {
      pivot(r, n_);
      const auto phase1 = run(2);
      if (phase1 == Status::iteration_limit) return finish(res, phase1);
      if (at(m_ + 1, n_ + 1) < -opt_.eps) return finish(res, Status::infeasible);
      for (std::size_t i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j)
          if (std::make_pair(at(i, j), nonbasic_[j]) < std::make_pair(at(i, s), nonbasic_[s])) s = j;
        pivot(i, s);
      }
    }
    const auto phase2 = run(1);
    return finish(res, phase2);
  }

 private:
  double& at(std::size_t i, std::size_t j) { return d_[i * (n_ + 2) + j]; }
  double at(std::size_t i, std::size_t j) const { return d_[i * (n_ + 2) + j]; }

  Result& finish(Result& res, Status st) {
    res.status = st;
    res.pivots = pivots_;
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && static_cast<std::size_t>(basic_[i]) < n_)
        res.x[static_cast<std::size_t>(basic_[i])] = at(i, n_ + 1);
    res.objective = at(m_, n_ + 1);
    return res;
  }

  void pivot(std::size_t r, std::size_t s) {
    const std::size_t w = n_ + 2;
    double* pr = &d_[r * w];
    const double inv = 1.0 / pr[s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      double* pi = &d_[i * w];
      if (std::fabs(pi[s]) <= opt_.eps) continue;
      const double f = pi[s] * inv;
      for (std::size_t j = 0; j < w; ++j) pi[j] -= pr[j] * f;
      pi[s] = pr[s] * f;
    }
    for (std::size_t j = 0; j < w; ++j)
      if (j != s) pr[j] *= inv;
    for (std::size_t i = 0; i < m_ + 2; ++i)
      if (i != r) d_[i * w + s] *= -inv;
    pr[s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
    ++pivots_;
  }

  Status run(int phase) {
    const std::size_t x = m_ + static_cast<std::size_t>(phase) - 1;
    std::size_t degenerate_run = 0;
    for (;;) {
      if (pivots_ >= opt_.max_pivots) return Status::iteration_limit;
      const bool bland = opt_.always_bland || degenerate_run >= opt_.degenerate_run_before_bland;
      long s = -1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;
        const double v = at(x, j);
        if (bland) {
          if (v < -opt_.eps && (s < 0 || nonbasic_[j] < nonbasic_[static_cast<std::size_t>(s)])) s = static_cast<long>(j);
        } else if (s < 0 || std::make_pair(v, nonbasic_[j]) <
                                std::make_pair(at(x, static_cast<std::size_t>(s)), nonbasic_[static_cast<std::size_t>(s)])) {
          s = static_cast<long>(j);
        }
      }
      if (s < 0 || at(x, static_cast<std::size_t>(s)) >= -opt_.eps) return Status::optimal;
      const auto sc = static_cast<std::size_t>(s);
      long r = -1;
      for (std::size_t i = 0; i < m_; ++i) {
        if (at(i, sc) <= opt_.eps) continue;
        if (r < 0) {
          r = static_cast<long>(i);
          continue;
        }
        const auto rr = static_cast<std::size_t>(r);
        const double ri = at(i, n_ + 1) / at(i, sc);
        const double rb = at(rr, n_ + 1) / at(rr, sc);
        if (ri < rb - opt_.eps || (std::fabs(ri - rb) <= opt_.eps && basic_[i] < basic_[rr])) r = static_cast<long>(i);
      }
      if (r < 0) return Status::unbounded;
      const auto rr = static_cast<std::size_t>(r);
      const bool degenerate = at(rr, n_ + 1) / at(rr, sc) <= opt_.eps;
      degenerate_run = degenerate ? degenerate_run + 1 : 0;
      pivot(rr, sc);
    }
  }

  std::size_t m_, n_;
  Options opt_;
  std::vector<long> basic_, nonbasic_;
  std::vector<double> d_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

inline Result solve(const Problem& p, const Options& opt = {}) {
  detail::Tableau t(p, opt);
  return t.solve();
}

}  // namespace vcache::lp
