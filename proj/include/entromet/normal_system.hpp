#pragma once

#include <string>
#include <vector>

#include "entromet/state.hpp"

namespace entromet {

enum class Verdict { Derived, NotDerived };

// A scaled state with real-valued scale, used on the analytic path where
// scales come from a bisection and need not be rational.
struct AnalyticTerm {
  std::string space;
  Rational coord;     // state coordinate in its normal space
  double scale = 1.0;
};

// Decides X ≺ Y for composites whose parts all live in normal spaces:
// derived iff the per-space total scales match (matter conservation) and the
// scale-weighted entropy sum of A is <= that of B. Throws ContractError on
// generic parts.
Verdict analytic_precedes(const SpaceTable& spaces, const CompositeState& a,
                          const CompositeState& b);
Verdict analytic_precedes(const SpaceTable& spaces,
                          const std::vector<AnalyticTerm>& a,
                          const std::vector<AnalyticTerm>& b);

struct ReferencePair {
  StateRef x0;
  StateRef x1;
};

struct CanonicalEntropyResult {
  double lambda = 0.0;        // midpoint of the two variational forms
  double lambda_sup = 0.0;    // from the accessibility-from-references form
  double lambda_inf = 0.0;    // from the accessibility-to-references form
  bool forms_agree = false;   // |sup - inf| <= 2*tol
  int branch = 0;             // 0: lambda in [0,1); +1: beyond X1; -1: below X0
};

// Entropy of X normalized to (X0, X1), computed twice by independent
// bisections over the monotone accessibility predicates:
//   sup { l : ((1-l)X0, l X1) ≺ X }   and   inf { l : X ≺ ((1-l)X0, l X1) }.
// Outside [0,1] the mixed composite has a negative coefficient; the term is
// moved across the relation before evaluation, e.g. for l > 1 the predicate
// becomes l X1 ≺ ((l-1)X0, X).
CanonicalEntropyResult canonical_entropy(const SpaceTable& spaces,
                                         const std::string& space_id,
                                         const ReferencePair& refs,
                                         const StateRef& x, double tol,
                                         int max_iter = 60);

struct ComparabilityReport {
  int checked = 0;
  std::vector<std::string> failures;  // human-readable descriptions
  bool ok() const { return failures.empty(); }
};

// Regression guard on the analytic oracle: every sampled pair of mixed
// states ((1-l)u, l v) across the scale grid must be comparable.
ComparabilityReport verify_cp(const SpaceTable& spaces,
                              const std::string& space_id,
                              const std::vector<Rational>& scale_grid,
                              const std::vector<std::pair<StateRef, StateRef>>& sample);

// Sorted entropy values over the scan states, plus the largest adjacent gap
// (connected-range surrogate for declared gap bounds).
double max_entropy_gap(const SpaceTable& spaces, const std::string& space_id);

}  // namespace entromet
