#pragma once

#include <peerpay/rational.hpp>

#include <cstdint>
#include <vector>

namespace peerpay {

// lt/gt mark strict intent; they must be closed into le/ge via close_strict
// before a solve, which keeps the caller's choice of closure gap explicit.
enum class Rel { le, ge, eq, lt, gt };

struct Constraint {
  std::vector<Rat> coeffs;
  Rel rel = Rel::le;
  Rat rhs = 0;
};

// Minimize objective . x subject to the rows, with every variable >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<Rat> objective;
  std::vector<Constraint> rows;
};

enum class SolveStatus { optimal, infeasible, unbounded };

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<Rat> x;
  Rat objective = 0;
  // For disjunctive solves: the selected option index (0-based) per group.
  std::vector<int> chosen_disjuncts;
};

// One selectable conjunction of rows.
struct Disjunct {
  std::vector<Constraint> rows;
};

// At least one option per group must hold.
struct DisjunctGroup {
  std::vector<Disjunct> options;
};

struct DisjunctiveProgram {
  LinearProgram base;
  std::vector<DisjunctGroup> groups;
};

// a.x > b becomes a.x >= b + gap; a.x < b becomes a.x <= b - gap.  gap 0
// yields the weak closure.  Negative gaps are rejected.
Constraint close_strict(const Constraint& row, const Rat& gap);
LinearProgram close_strict(const LinearProgram& lp, const Rat& gap);

// Exact two-phase dense simplex with Bland's rule; deterministic.  Throws
// MalformedProgram on shape errors or un-closed strict rows.
Solution solve_lp(const LinearProgram& lp);

// Enumerates option selections in lexicographic order (depth-first, pruning
// dominated prefixes), so ties in the optimum go to the lexicographically
// smallest selection.  The product of group sizes is capped by `guard`.
Solution solve_disjunctive(const DisjunctiveProgram& prog,
                           std::uint64_t guard = 1000000);

// Branch-and-bound variant for programs whose selection product overflows
// any reasonable guard: solves the relaxation, branches on the first group
// the relaxed optimum violates.  Exact, deterministic; chosen_disjuncts picks
// the first satisfied option of every group never branched on.
Solution solve_disjunctive_guided(const DisjunctiveProgram& prog);

}  // namespace peerpay
