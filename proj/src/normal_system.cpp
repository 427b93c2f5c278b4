#include "entromet/normal_system.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "entromet/errors.hpp"

namespace entromet {

namespace {

constexpr double kScaleEps = 1e-9;  // tolerance on per-space scale balance

struct SumView {
  std::map<std::string, double> scale_by_space;
  double entropy_sum = 0.0;
};

SumView summarize(const SpaceTable& spaces, const std::vector<AnalyticTerm>& terms) {
  SumView view;
  for (const auto& term : terms) {
    const SpaceDecl& space = spaces.at(term.space);
    if (space.kind != SpaceKind::Normal) {
      throw ContractError("analytic query with non-normal part in space " +
                          term.space);
    }
    if (term.scale == 0.0) continue;
    view.scale_by_space[term.space] += term.scale;
    view.entropy_sum += term.scale * space.entropy.eval(term.coord);
  }
  return view;
}

std::vector<AnalyticTerm> to_terms(const SpaceTable& spaces,
                                   const CompositeState& c) {
  std::vector<AnalyticTerm> terms;
  for (const auto& part : c.parts()) {
    terms.push_back({part.ref.space,
                     parse_rational(part.ref.state, spaces.max_denominator),
                     to_double(part.scale)});
  }
  return terms;
}

bool scales_match(const SumView& a, const SumView& b) {
  for (const auto& [space, scale] : a.scale_by_space) {
    const auto it = b.scale_by_space.find(space);
    const double other = it == b.scale_by_space.end() ? 0.0 : it->second;
    if (std::fabs(scale - other) > kScaleEps) return false;
  }
  for (const auto& [space, scale] : b.scale_by_space) {
    if (!a.scale_by_space.count(space) && std::fabs(scale) > kScaleEps) {
      return false;
    }
  }
  return true;
}

}  // namespace

Verdict analytic_precedes(const SpaceTable& spaces,
                          const std::vector<AnalyticTerm>& a,
                          const std::vector<AnalyticTerm>& b) {
  const SumView va = summarize(spaces, a);
  const SumView vb = summarize(spaces, b);
  if (!scales_match(va, vb)) return Verdict::NotDerived;
  return va.entropy_sum <= vb.entropy_sum ? Verdict::Derived
                                          : Verdict::NotDerived;
}

Verdict analytic_precedes(const SpaceTable& spaces, const CompositeState& a,
                          const CompositeState& b) {
  return analytic_precedes(spaces, to_terms(spaces, a), to_terms(spaces, b));
}

// ---------------------------------------------------------------------------
// Canonical entropy
// ---------------------------------------------------------------------------

namespace {

struct RefContext {
  const SpaceTable* spaces;
  std::string space;
  Rational u0, u1, ux;
};

// Mixed-reference accessibility predicates, each monotone in lambda. All
// composites are evaluated through analytic_precedes; negative coefficients
// are moved across the relation first.
bool pred_refs_to_x(const RefContext& c, double lambda) {
  if (lambda > 1.0) {
    return analytic_precedes(*c.spaces, {{c.space, c.u1, lambda}},
                             {{c.space, c.u0, lambda - 1.0},
                              {c.space, c.ux, 1.0}}) == Verdict::Derived;
  }
  if (lambda < 0.0) {
    return analytic_precedes(*c.spaces, {{c.space, c.u0, 1.0 - lambda}},
                             {{c.space, c.u1, -lambda},
                              {c.space, c.ux, 1.0}}) == Verdict::Derived;
  }
  return analytic_precedes(*c.spaces,
                           {{c.space, c.u0, 1.0 - lambda}, {c.space, c.u1, lambda}},
                           {{c.space, c.ux, 1.0}}) == Verdict::Derived;
}

bool pred_x_to_refs(const RefContext& c, double lambda) {
  if (lambda > 1.0) {
    return analytic_precedes(*c.spaces,
                             {{c.space, c.u0, lambda - 1.0}, {c.space, c.ux, 1.0}},
                             {{c.space, c.u1, lambda}}) == Verdict::Derived;
  }
  if (lambda < 0.0) {
    return analytic_precedes(*c.spaces,
                             {{c.space, c.u1, -lambda}, {c.space, c.ux, 1.0}},
                             {{c.space, c.u0, 1.0 - lambda}}) == Verdict::Derived;
  }
  return analytic_precedes(*c.spaces, {{c.space, c.ux, 1.0}},
                           {{c.space, c.u0, 1.0 - lambda},
                            {c.space, c.u1, lambda}}) == Verdict::Derived;
}

// Largest lambda with pred true (pred true on [lo, l*], false beyond).
double bisect_sup(const std::function<bool(double)>& pred, double lo, double hi,
                  double tol, int max_iter) {
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Smallest lambda with pred true (pred false on [lo, l*), true beyond).
double bisect_inf(const std::function<bool(double)>& pred, double lo, double hi,
                  double tol, int max_iter) {
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CanonicalEntropyResult canonical_entropy(const SpaceTable& spaces,
                                         const std::string& space_id,
                                         const ReferencePair& refs,
                                         const StateRef& x, double tol,
                                         int max_iter) {
  if (tol <= 0.0) throw ContractError("canonical_entropy: tol must be > 0");
  const SpaceDecl& space = spaces.at(space_id);
  if (space.kind != SpaceKind::Normal) {
    throw ContractError("canonical_entropy needs a normal space");
  }
  for (const StateRef* ref : {&refs.x0, &refs.x1, &x}) {
    if (ref->space != space_id) {
      throw ContractError("state " + ref->state + " not in space " + space_id);
    }
    if (!space.contains(ref->state, spaces.max_denominator)) {
      throw ConfigError("state '" + ref->state + "' outside space '" +
                        space_id + "'");
    }
  }

  RefContext ctx{&spaces, space_id,
                 parse_rational(refs.x0.state, spaces.max_denominator),
                 parse_rational(refs.x1.state, spaces.max_denominator),
                 parse_rational(x.state, spaces.max_denominator)};
  const double s0 = space.entropy.eval(ctx.u0);
  const double s1 = space.entropy.eval(ctx.u1);
  const double sx = space.entropy.eval(ctx.ux);
  if (!(s0 < s1)) {
    throw ConfigError("invalid reference pair: S(X0) must be < S(X1)");
  }

  CanonicalEntropyResult result;
  // Bisection endpoints are exact at the references themselves.
  if (sx == s0 || sx == s1) {
    result.lambda = result.lambda_sup = result.lambda_inf = sx == s0 ? 0.0 : 1.0;
    result.forms_agree = true;
    return result;
  }

  const auto sup_pred = [&](double l) { return pred_refs_to_x(ctx, l); };
  const auto inf_pred = [&](double l) { return pred_x_to_refs(ctx, l); };

  double lo = 0.0, hi = 1.0;
  if (sup_pred(1.0)) {
    result.branch = 1;  // X beyond X1: the mixture needs lambda > 1
    lo = 1.0;
    hi = 2.0;
    while (sup_pred(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) throw ContractError("canonical_entropy: unbounded lambda");
    }
  } else if (!sup_pred(0.0)) {
    result.branch = -1;  // X below X0: lambda < 0
    hi = 0.0;
    lo = -1.0;
    while (!sup_pred(lo)) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e12) throw ContractError("canonical_entropy: unbounded lambda");
    }
  }
  result.lambda_sup = bisect_sup(sup_pred, lo, hi, tol, max_iter);

  lo = 0.0;
  hi = 1.0;
  if (!inf_pred(1.0)) {
    lo = 1.0;
    hi = 2.0;
    while (!inf_pred(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) throw ContractError("canonical_entropy: unbounded lambda");
    }
  } else if (inf_pred(0.0)) {
    hi = 0.0;
    lo = -1.0;
    while (inf_pred(lo)) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e12) throw ContractError("canonical_entropy: unbounded lambda");
    }
  }
  result.lambda_inf = bisect_inf(inf_pred, lo, hi, tol, max_iter);

  result.lambda = 0.5 * (result.lambda_sup + result.lambda_inf);
  result.forms_agree = std::fabs(result.lambda_sup - result.lambda_inf) <= 2 * tol;
  return result;
}

// ---------------------------------------------------------------------------
// Comparison property check
// ---------------------------------------------------------------------------

ComparabilityReport verify_cp(const SpaceTable& spaces,
                              const std::string& space_id,
                              const std::vector<Rational>& scale_grid,
                              const std::vector<std::pair<StateRef, StateRef>>& sample) {
  ComparabilityReport report;
  const auto mixed = [&](const Rational& lambda, const StateRef& u,
                         const StateRef& v) {
    std::vector<AnalyticTerm> terms;
    const double l = to_double(lambda);
    if (l < 1.0) {
      terms.push_back({space_id, parse_rational(u.state, spaces.max_denominator),
                       1.0 - l});
    }
    if (l > 0.0) {
      terms.push_back({space_id, parse_rational(v.state, spaces.max_denominator),
                       l});
    }
    return terms;
  };

  for (const auto& lambda : scale_grid) {
    if (lambda < Rational(0) || lambda > Rational(1)) {
      throw ContractError("verify_cp: scale grid values must lie in [0,1]");
    }
    for (std::size_t i = 0; i + 1 < sample.size(); i += 2) {
      const auto a = mixed(lambda, sample[i].first, sample[i].second);
      const auto b = mixed(lambda, sample[i + 1].first, sample[i + 1].second);
      ++report.checked;
      const bool fwd = analytic_precedes(spaces, a, b) == Verdict::Derived;
      const bool bwd = analytic_precedes(spaces, b, a) == Verdict::Derived;
      if (!fwd && !bwd) {
        report.failures.push_back(
            "incomparable pair at scale " + format_rational(lambda) + ": (" +
            sample[i].first.state + "," + sample[i].second.state + ") vs (" +
            sample[i + 1].first.state + "," + sample[i + 1].second.state + ")");
      }
    }
  }
  return report;
}

double max_entropy_gap(const SpaceTable& spaces, const std::string& space_id) {
  const SpaceDecl& space = spaces.at(space_id);
  if (space.kind != SpaceKind::Normal) {
    throw ContractError("max_entropy_gap needs a normal space");
  }
  std::vector<double> values;
  for (const auto& id : space.scan_states(spaces.max_denominator)) {
    values.push_back(space.entropy_of(id, spaces.max_denominator));
  }
  std::sort(values.begin(), values.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    gap = std::max(gap, values[i] - values[i - 1]);
  }
  return gap;
}

}  // namespace entromet
