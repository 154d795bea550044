#include <peerpay/lp_engine.hpp>

#include <peerpay/errors.hpp>

#include <cstddef>
#include <optional>
#include <utility>

namespace peerpay {

namespace {

void check_shape(const LinearProgram& lp) {
  if (lp.num_vars < 1) throw MalformedProgram("program has no variables");
  if (lp.objective.size() != static_cast<std::size_t>(lp.num_vars)) {
    throw MalformedProgram("objective length does not match num_vars");
  }
  for (const Constraint& row : lp.rows) {
    if (row.coeffs.size() != static_cast<std::size_t>(lp.num_vars)) {
      throw MalformedProgram("row length does not match num_vars");
    }
    if (row.rel == Rel::lt || row.rel == Rel::gt) {
      throw MalformedProgram("strict rows must be closed before solving");
    }
  }
}

// Dense simplex tableau over the columns [structural | slack | artificial],
// rows augmented with a rightmost rhs column.
class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp) : lp_(lp) {
    const std::size_t m = lp.rows.size();
    const auto n = static_cast<std::size_t>(lp.num_vars);

    // Count slack columns first so artificials land after them.
    std::size_t slacks = 0;
    for (const Constraint& row : lp.rows) {
      if (row.rel != Rel::eq) ++slacks;
    }
    num_cols_ = n + slacks;
    std::size_t next_slack = n;

    std::vector<std::size_t> artificial_of(m, SIZE_MAX);
    rows_.assign(m, std::vector<Rat>(num_cols_ + 1, Rat(0)));
    basis_.assign(m, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i) {
      const Constraint& row = lp.rows[i];
      Rat sign = row.rhs < 0 ? -1 : 1;
      for (std::size_t j = 0; j < n; ++j) rows_[i][j] = sign * row.coeffs[j];
      rows_[i][num_cols_] = sign * row.rhs;
      Rel rel = row.rel;
      if (sign < 0) {
        if (rel == Rel::le) rel = Rel::ge;
        else if (rel == Rel::ge) rel = Rel::le;
      }
      if (rel != Rel::eq) {
        rows_[i][next_slack] = rel == Rel::le ? 1 : -1;
        if (rel == Rel::le) {
          basis_[i] = next_slack;
        }
        ++next_slack;
      }
      if (basis_[i] == SIZE_MAX) artificial_of[i] = i;
    }

    // Append an artificial column per row still lacking a basic variable;
    // the rhs entry stays rightmost.
    for (std::size_t i = 0; i < m; ++i) {
      if (artificial_of[i] == SIZE_MAX) continue;
      for (auto& r : rows_) r.insert(r.end() - 1, Rat(0));
      rows_[i][num_cols_] = 1;
      basis_[i] = num_cols_;
      if (first_artificial_ == SIZE_MAX) first_artificial_ = num_cols_;
      ++num_cols_;
    }
  }

  SolveStatus run() {
    const std::size_t m = rows_.size();

    if (first_artificial_ != SIZE_MAX) {
      // Phase 1: minimize the sum of artificials.
      std::vector<Rat> cost(num_cols_, Rat(0));
      for (std::size_t j = first_artificial_; j < num_cols_; ++j) cost[j] = 1;
      if (pivot_loop(cost) == SolveStatus::unbounded) {
        throw InternalContradiction("phase 1 cannot be unbounded");
      }
      Rat residual = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (basis_[i] >= first_artificial_) residual += rows_[i][num_cols_];
      }
      if (residual != 0) return SolveStatus::infeasible;

      // Drive surviving artificials out of the basis; rows with no usable
      // pivot are redundant and get neutralized in place.
      for (std::size_t i = 0; i < m; ++i) {
        if (basis_[i] < first_artificial_) continue;
        std::size_t col = SIZE_MAX;
        for (std::size_t j = 0; j < first_artificial_; ++j) {
          if (rows_[i][j] != 0) {
            col = j;
            break;
          }
        }
        if (col == SIZE_MAX) {
          for (auto& v : rows_[i]) v = 0;
          redundant_.push_back(i);
          continue;
        }
        pivot(i, col);
      }
    }

    // Phase 2 with the real objective over structural columns only.
    std::vector<Rat> cost(num_cols_, Rat(0));
    for (std::size_t j = 0; j < lp_.objective.size(); ++j) {
      cost[j] = lp_.objective[j];
    }
    return pivot_loop(cost, first_artificial_);
  }

  std::vector<Rat> extract() const {
    std::vector<Rat> x(lp_.objective.size(), Rat(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (basis_[i] < x.size()) x[basis_[i]] = rows_[i][num_cols_];
    }
    return x;
  }

 private:
  // Bland's rule: entering = lowest-index column with negative reduced cost,
  // leaving = min-ratio row breaking ties by lowest basic column.
  SolveStatus pivot_loop(const std::vector<Rat>& cost,
                         std::size_t col_limit = SIZE_MAX) {
    const std::size_t m = rows_.size();
    const std::size_t jmax = std::min(col_limit, num_cols_);
    for (;;) {
      std::vector<Rat> reduced(jmax);
      for (std::size_t j = 0; j < jmax; ++j) reduced[j] = cost[j];
      for (std::size_t i = 0; i < m; ++i) {
        if (basis_[i] == SIZE_MAX) continue;
        const Rat cb = basis_[i] < cost.size() ? cost[basis_[i]] : Rat(0);
        if (cb == 0) continue;
        for (std::size_t j = 0; j < jmax; ++j) {
          if (rows_[i][j] != 0) reduced[j] -= cb * rows_[i][j];
        }
      }

      std::size_t enter = SIZE_MAX;
      for (std::size_t j = 0; j < jmax; ++j) {
        bool basic = false;
        for (std::size_t i = 0; i < m; ++i) {
          if (basis_[i] == j) {
            basic = true;
            break;
          }
        }
        if (!basic && reduced[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == SIZE_MAX) return SolveStatus::optimal;

      std::size_t leave = SIZE_MAX;
      Rat best_ratio = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (rows_[i][enter] <= 0) continue;
        const Rat ratio = rows_[i][num_cols_] / rows_[i][enter];
        if (leave == SIZE_MAX || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == SIZE_MAX) return SolveStatus::unbounded;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const Rat p = rows_[row][col];
    if (p == 0) throw InternalContradiction("pivot on zero element");
    for (auto& v : rows_[row]) v /= p;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == row || rows_[i][col] == 0) continue;
      const Rat f = rows_[i][col];
      for (std::size_t j = 0; j <= num_cols_; ++j) {
        if (rows_[row][j] != 0) rows_[i][j] -= f * rows_[row][j];
      }
    }
    basis_[row] = col;
  }

  const LinearProgram& lp_;
  std::vector<std::vector<Rat>> rows_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> redundant_;
  std::size_t num_cols_ = 0;
  std::size_t first_artificial_ = SIZE_MAX;
};

std::uint64_t selection_product(const DisjunctiveProgram& prog,
                                std::uint64_t guard) {
  std::uint64_t product = 1;
  for (const DisjunctGroup& g : prog.groups) {
    if (g.options.empty()) {
      throw MalformedProgram("disjunct group with no options");
    }
    if (product > guard / g.options.size() + 1) return guard + 1;
    product *= g.options.size();
    if (product > guard) return product;
  }
  return product;
}

void append_disjunct(LinearProgram& lp, const Disjunct& d) {
  for (const Constraint& row : d.rows) lp.rows.push_back(row);
}

void pop_disjunct(LinearProgram& lp, const Disjunct& d) {
  lp.rows.resize(lp.rows.size() - d.rows.size());
}

bool satisfies(const Constraint& row, const std::vector<Rat>& x) {
  Rat lhs = 0;
  for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
    if (row.coeffs[j] != 0) lhs += row.coeffs[j] * x[j];
  }
  switch (row.rel) {
    case Rel::le:
      return lhs <= row.rhs;
    case Rel::ge:
      return lhs >= row.rhs;
    case Rel::eq:
      return lhs == row.rhs;
    case Rel::lt:
    case Rel::gt:
      throw MalformedProgram("strict rows must be closed before solving");
  }
  throw InternalContradiction("unknown relation");
}

bool satisfies(const Disjunct& d, const std::vector<Rat>& x) {
  for (const Constraint& row : d.rows) {
    if (!satisfies(row, x)) return false;
  }
  return true;
}

}  // namespace

Constraint close_strict(const Constraint& row, const Rat& gap) {
  if (gap < 0) throw MalformedProgram("closure gap must be nonnegative");
  Constraint out = row;
  if (row.rel == Rel::gt) {
    out.rel = Rel::ge;
    out.rhs = row.rhs + gap;
  } else if (row.rel == Rel::lt) {
    out.rel = Rel::le;
    out.rhs = row.rhs - gap;
  }
  return out;
}

LinearProgram close_strict(const LinearProgram& lp, const Rat& gap) {
  LinearProgram out = lp;
  for (Constraint& row : out.rows) row = close_strict(row, gap);
  return out;
}

Solution solve_lp(const LinearProgram& lp) {
  check_shape(lp);
  Tableau tab(lp);
  Solution sol;
  sol.status = tab.run();
  if (sol.status != SolveStatus::optimal) return sol;
  sol.x = tab.extract();
  for (std::size_t j = 0; j < sol.x.size(); ++j) {
    sol.objective += lp.objective[j] * sol.x[j];
  }
  return sol;
}

Solution solve_disjunctive(const DisjunctiveProgram& prog, std::uint64_t guard) {
  check_shape(prog.base);
  for (const DisjunctGroup& g : prog.groups) {
    for (const Disjunct& d : g.options) {
      for (const Constraint& row : d.rows) {
        if (row.coeffs.size() != static_cast<std::size_t>(prog.base.num_vars)) {
          throw MalformedProgram("disjunct row length does not match num_vars");
        }
        if (row.rel == Rel::lt || row.rel == Rel::gt) {
          throw MalformedProgram("strict rows must be closed before solving");
        }
      }
    }
  }
  if (selection_product(prog, guard) > guard) {
    throw CombinatorialGuardExceeded(
        "disjunct selection count exceeds the guard of " +
        std::to_string(guard));
  }

  LinearProgram work = prog.base;
  std::vector<int> selection;
  std::optional<Solution> best;
  bool unbounded = false;

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (unbounded) return;
    const Solution node = solve_lp(work);
    if (node.status == SolveStatus::infeasible) return;
    const bool leaf = depth == prog.groups.size();
    if (node.status == SolveStatus::unbounded) {
      if (leaf) unbounded = true;
      // An unbounded relaxation cannot prune its completions.
    } else if (best && node.objective >= best->objective) {
      return;  // lexicographically earlier incumbent wins ties
    }
    if (leaf) {
      if (node.status == SolveStatus::optimal &&
          (!best || node.objective < best->objective)) {
        best = node;
        best->chosen_disjuncts = selection;
      }
      return;
    }
    const DisjunctGroup& group = prog.groups[depth];
    for (std::size_t k = 0; k < group.options.size(); ++k) {
      append_disjunct(work, group.options[k]);
      selection.push_back(static_cast<int>(k));
      self(self, depth + 1);
      selection.pop_back();
      pop_disjunct(work, group.options[k]);
      if (unbounded) return;
    }
  };
  recurse(recurse, 0);

  if (unbounded) {
    Solution sol;
    sol.status = SolveStatus::unbounded;
    return sol;
  }
  if (!best) {
    Solution sol;
    sol.status = SolveStatus::infeasible;
    return sol;
  }
  return *best;
}

Solution solve_disjunctive_guided(const DisjunctiveProgram& prog) {
  check_shape(prog.base);

  LinearProgram work = prog.base;
  std::vector<int> chosen(prog.groups.size(), -1);
  std::optional<Solution> best;
  bool unbounded = false;

  auto recurse = [&](auto&& self) -> void {
    if (unbounded) return;
    const Solution node = solve_lp(work);
    if (node.status == SolveStatus::infeasible) return;
    if (node.status == SolveStatus::unbounded) {
      unbounded = true;
      return;
    }
    if (best && node.objective >= best->objective) return;

    std::size_t branch_group = SIZE_MAX;
    std::vector<int> passive(chosen);
    for (std::size_t g = 0; g < prog.groups.size(); ++g) {
      if (chosen[g] >= 0) continue;
      int hit = -1;
      const auto& options = prog.groups[g].options;
      for (std::size_t k = 0; k < options.size(); ++k) {
        if (satisfies(options[k], node.x)) {
          hit = static_cast<int>(k);
          break;
        }
      }
      if (hit < 0) {
        branch_group = g;
        break;
      }
      passive[g] = hit;
    }

    if (branch_group == SIZE_MAX) {
      best = node;
      best->chosen_disjuncts = passive;
      return;
    }

    const auto& options = prog.groups[branch_group].options;
    for (std::size_t k = 0; k < options.size(); ++k) {
      append_disjunct(work, options[k]);
      chosen[branch_group] = static_cast<int>(k);
      self(self);
      chosen[branch_group] = -1;
      pop_disjunct(work, options[k]);
      if (unbounded) return;
    }
  };
  recurse(recurse);

  if (unbounded) {
    Solution sol;
    sol.status = SolveStatus::unbounded;
    return sol;
  }
  if (!best) {
    Solution sol;
    sol.status = SolveStatus::infeasible;
    return sol;
  }
  return *best;
}

}  // namespace peerpay
