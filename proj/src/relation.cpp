#include "entromet/relation.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "entromet/errors.hpp"

namespace entromet {

namespace {

std::string pair_name(const CompositeState& a, const CompositeState& b) {
  return a.to_string() + " < " + b.to_string();
}

}  // namespace

AccessibilityModel::AccessibilityModel(SpaceTable spaces,
                                       UniverseOptions universe,
                                       ClosureOptions closure)
    : spaces_(std::move(spaces)),
      universe_opts_(universe),
      closure_(std::move(closure)) {
  for (std::size_t i = 1; i < closure_.stability_epsilons.size(); ++i) {
    if (!(closure_.stability_epsilons[i] < closure_.stability_epsilons[i - 1])) {
      throw ConfigError("stability epsilons must be strictly decreasing");
    }
  }
}

void AccessibilityModel::add_generator(GeneratorEdge edge) {
  if (closed_) throw ContractError("model already closed");
  generators_.push_back(std::move(edge));
}

void AccessibilityModel::add_family(PotentialFamily family) {
  if (closed_) throw ContractError("model already closed");
  for (const auto& id : family.spaces) spaces_.at(id);  // must exist
  families_.push_back(std::move(family));
}

void AccessibilityModel::register_composite(const CompositeState& c) {
  if (closed_) throw ContractError("model already closed");
  if (c.empty()) throw ConfigError("cannot register the empty composite");
  registered_.push_back(c);
}

void AccessibilityModel::register_singletons(const std::string& space_id) {
  const SpaceDecl& space = spaces_.at(space_id);
  for (const auto& state : space.scan_states(spaces_.max_denominator)) {
    register_composite(
        CompositeState::singleton({space_id, state}, spaces_));
  }
}

int AccessibilityModel::intern(const CompositeState& c) {
  const auto it = index_.find(c);
  if (it != index_.end()) return it->second;
  if (c.arity() > universe_opts_.arity_cap) {
    throw ConfigError("composite " + c.to_string() + " exceeds arity cap " +
                      std::to_string(universe_opts_.arity_cap));
  }
  if (universe_.size() >= universe_opts_.budget) {
    throw ResourceError("universe budget of " +
                        std::to_string(universe_opts_.budget) +
                        " composites exceeded");
  }
  const int id = static_cast<int>(universe_.size());
  universe_.push_back(c);
  index_.emplace(c, id);
  return id;
}

void AccessibilityModel::build_universe() {
  for (const auto& c : registered_) intern(c);
  for (const auto& edge : generators_) {
    intern(edge.from);
    intern(edge.to);
  }
  if (universe_opts_.pairwise_compose) {
    // Iterate pairwise composition to a fixed point, capped by arity.
    std::size_t frontier_start = 0;
    while (frontier_start < universe_.size()) {
      const std::size_t end = universe_.size();
      for (std::size_t i = frontier_start; i < end; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          const CompositeState w = universe_[i].compose(universe_[j]);
          if (w.arity() > universe_opts_.arity_cap) continue;
          intern(w);
        }
      }
      frontier_start = end;
    }
  }
}

void AccessibilityModel::build_decompositions() {
  const int n = static_cast<int>(universe_.size());
  decomps_by_left_.assign(n, {});
  for (int w = 0; w < n; ++w) {
    const CompositeState& whole = universe_[w];
    if (whole.parts().size() == 1 && whole.parts()[0].scale == Rational(1)) {
      continue;  // singletons have no proper split
    }
    for (int u = 0; u < n; ++u) {
      if (u == w) continue;
      const CompositeState& left = universe_[u];
      if ((left.key_mask() & ~whole.key_mask()) != 0) continue;
      if (!whole.contains_submultiset(left)) continue;
      const CompositeState rest = whole.subtract(left);
      if (rest.empty()) continue;
      const auto it = index_.find(rest);
      if (it == index_.end()) continue;
      decompositions_.push_back({u, it->second, w});
      decomps_by_left_[u].push_back(
          static_cast<int>(decompositions_.size()) - 1);
    }
  }
}

bool AccessibilityModel::set_pair(int a, int b) {
  if (reach_[a].test(b)) return false;
  reach_[a].set(b);
  return true;
}

void AccessibilityModel::seed() {
  const int n = static_cast<int>(universe_.size());
  reach_.assign(n, boost::dynamic_bitset<>(n));
  for (int i = 0; i < n; ++i) reach_[i].set(i);

  for (const auto& edge : generators_) {
    set_pair(index_.at(edge.from), index_.at(edge.to));
  }

  // Potential families: exact total-potential order within each amount
  // signature bucket.
  for (const auto& family : families_) {
    std::map<std::string, std::vector<int>> buckets;
    for (int i = 0; i < n; ++i) {
      if (family_covers(spaces_, family, universe_[i])) {
        buckets[pooled_signature(spaces_, &family, universe_[i])].push_back(i);
      }
    }
    for (const auto& [sig, ids] : buckets) {
      std::vector<Rational> pot(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        pot[i] = family_potential(spaces_, family, universe_[ids[i]]);
      }
      for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) {
          if (pot[i] <= pot[j]) reach_[ids[i]].set(ids[j]);
        }
      }
    }
  }

  // Normal systems characterize the relation on their own scaled products:
  // seed the entropy order between pure-normal composites of equal
  // signature. Exact when every part has a rational-valued entropy form.
  std::map<std::string, std::vector<int>> analytic_buckets;
  for (int i = 0; i < n; ++i) {
    bool pure_normal = true;
    for (const auto& part : universe_[i].parts()) {
      if (spaces_.at(part.ref.space).kind != SpaceKind::Normal) {
        pure_normal = false;
        break;
      }
    }
    if (pure_normal) {
      analytic_buckets[pooled_signature(spaces_, nullptr, universe_[i])]
          .push_back(i);
    }
  }
  for (const auto& [sig, ids] : analytic_buckets) {
    bool all_exact = true;
    std::vector<Rational> exact(ids.size());
    std::vector<double> approx(ids.size());
    for (std::size_t i = 0; i < ids.size() && all_exact; ++i) {
      Rational total{0};
      for (const auto& part : universe_[ids[i]].parts()) {
        const auto value = spaces_.at(part.ref.space)
                               .entropy_of_exact(part.ref.state,
                                                 spaces_.max_denominator);
        if (!value) {
          all_exact = false;
          break;
        }
        total += part.scale * *value;
      }
      exact[i] = total;
    }
    if (!all_exact) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        double total = 0.0;
        for (const auto& part : universe_[ids[i]].parts()) {
          total += to_double(part.scale) *
                   spaces_.at(part.ref.space)
                       .entropy_of(part.ref.state, spaces_.max_denominator);
        }
        approx[i] = total;
      }
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < ids.size(); ++j) {
        const bool le = all_exact ? exact[i] <= exact[j] : approx[i] <= approx[j];
        if (le) reach_[ids[i]].set(ids[j]);
      }
    }
  }
}

bool AccessibilityModel::transitivity_pass() {
  const int n = static_cast<int>(universe_.size());
  std::size_t before = 0;
  for (int i = 0; i < n; ++i) before += reach_[i].count();
  for (int k = 0; k < n; ++k) {
    const auto& row_k = reach_[k];
    for (int i = 0; i < n; ++i) {
      if (reach_[i].test(k)) reach_[i] |= row_k;
    }
  }
  std::size_t after = 0;
  for (int i = 0; i < n; ++i) after += reach_[i].count();
  return after != before;
}

bool AccessibilityModel::consistency_pass() {
  bool changed = false;
  for (const auto& d : decompositions_) {
    const auto& succ = reach_[d.left];
    for (std::size_t u2 = succ.find_first(); u2 != boost::dynamic_bitset<>::npos;
         u2 = succ.find_next(u2)) {
      for (const int idx : decomps_by_left_[u2]) {
        const auto& d2 = decompositions_[idx];
        if (reach_[d.right].test(d2.right) && set_pair(d.whole, d2.whole)) {
          changed = true;
        }
      }
    }
  }
  return changed;
}

bool AccessibilityModel::cancellation_pass() {
  const int n = static_cast<int>(universe_.size());
  bool changed = false;
  for (int i = 0; i < n; ++i) {
    const auto& row = reach_[i];
    const std::uint64_t mask_i = universe_[i].key_mask();
    for (std::size_t j = row.find_first(); j != boost::dynamic_bitset<>::npos;
         j = row.find_next(j)) {
      if (static_cast<int>(j) == i) continue;
      const CompositeState& b = universe_[j];
      if ((mask_i & b.key_mask()) == 0) continue;
      const CompositeState common = universe_[i].intersect(b);
      if (common.empty()) continue;
      const CompositeState left = universe_[i].subtract(common);
      if (left.empty()) continue;
      const CompositeState right = b.subtract(common);
      if (right.empty()) continue;
      const auto li = index_.find(left);
      if (li == index_.end()) continue;
      const auto ri = index_.find(right);
      if (ri == index_.end()) continue;
      if (set_pair(li->second, ri->second)) changed = true;
    }
  }
  return changed;
}

bool AccessibilityModel::run_core_rules() {
  bool any = false;
  bool changed = true;
  while (changed) {
    changed = false;
    changed |= transitivity_pass();
    changed |= consistency_pass();
    changed |= cancellation_pass();
    any |= changed;
  }
  return any;
}

bool AccessibilityModel::stability_pass() {
  if (closure_.stability_epsilons.empty()) return false;
  const int n = static_cast<int>(universe_.size());

  // Candidate extractions per composite: (epsilon index, meter part,
  // residual id), precomputed lazily on first use.
  struct Extraction {
    std::size_t eps;
    StateRef meter_state;
    int residual;
  };
  static_assert(sizeof(Extraction) > 0);
  std::vector<std::vector<Extraction>> extractions(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& part : universe_[i].parts()) {
      const SpaceDecl& space = spaces_.at(part.ref.space);
      if (space.kind != SpaceKind::Normal || !space.meter) continue;
      for (std::size_t e = 0; e < closure_.stability_epsilons.size(); ++e) {
        const Rational& eps = closure_.stability_epsilons[e];
        if (part.scale < eps) continue;
        CompositeState residual = universe_[i].subtract(
            CompositeState::canonical({ScaledPart{part.ref, eps}}, spaces_));
        if (residual.empty()) continue;
        const auto it = index_.find(residual);
        if (it == index_.end()) continue;
        extractions[i].push_back({e, part.ref, it->second});
      }
    }
  }

  // Premise table: (X, Y, Z0, Z1) -> set of epsilon indices for which
  // (X, eZ0) ≺ (Y, eZ1) is derived.
  std::map<std::tuple<int, int, std::string, std::string>, std::set<std::size_t>>
      hits;
  std::map<std::tuple<int, int, std::string, std::string>,
           std::pair<StateRef, StateRef>>
      meters;
  for (int i = 0; i < n; ++i) {
    if (extractions[i].empty()) continue;
    const auto& row = reach_[i];
    for (std::size_t j = row.find_first(); j != boost::dynamic_bitset<>::npos;
         j = row.find_next(j)) {
      if (extractions[j].empty()) continue;
      for (const auto& ea : extractions[i]) {
        for (const auto& eb : extractions[j]) {
          if (ea.eps != eb.eps) continue;
          const auto key = std::make_tuple(ea.residual, eb.residual,
                                           ea.meter_state.state,
                                           eb.meter_state.state);
          hits[key].insert(ea.eps);
          meters.emplace(key, std::make_pair(ea.meter_state, eb.meter_state));
        }
      }
    }
  }

  bool changed = false;
  for (const auto& [key, eps_set] : hits) {
    if (eps_set.size() != closure_.stability_epsilons.size()) continue;
    const auto [x, y, z0, z1] = key;
    if (set_pair(x, y)) {
      changed = true;
      stability_log_.push_back({universe_[x], universe_[y],
                                meters.at(key).first, meters.at(key).second,
                                closure_.stability_epsilons});
    }
  }
  return changed;
}

void AccessibilityModel::close() {
  if (closed_) return;
  build_universe();
  build_decompositions();
  seed();
  run_core_rules();
  exact_reach_ = reach_;
  while (stability_pass()) run_core_rules();
  closed_ = true;
}

Verdict AccessibilityModel::precedes(const CompositeState& a,
                                     const CompositeState& b) const {
  if (!closed_) throw ContractError("model not closed");
  const auto ia = index_.find(a);
  const auto ib = index_.find(b);
  if (ia != index_.end() && ib != index_.end()) {
    return reach_[ia->second].test(ib->second) ? Verdict::Derived
                                               : Verdict::NotDerived;
  }
  const auto pure_normal = [&](const CompositeState& c) {
    for (const auto& part : c.parts()) {
      if (spaces_.at(part.ref.space).kind != SpaceKind::Normal) return false;
    }
    return true;
  };
  if (pure_normal(a) && pure_normal(b)) {
    return analytic_precedes(spaces_, a, b);
  }
  throw QueryError("composite " +
                   (ia == index_.end() ? a : b).to_string() +
                   " is not in the model universe; extend the universe to "
                   "query it");
}

OrderClass AccessibilityModel::classify(const CompositeState& a,
                                        const CompositeState& b) const {
  const bool fwd = precedes(a, b) == Verdict::Derived;
  const bool bwd = precedes(b, a) == Verdict::Derived;
  if (fwd && bwd) return OrderClass::Equivalent;
  if (fwd) return OrderClass::Strict;
  if (bwd) return OrderClass::StrictReverse;
  return OrderClass::Incomparable;
}

bool AccessibilityModel::is_approximate(const CompositeState& a,
                                        const CompositeState& b) const {
  if (!closed_) throw ContractError("model not closed");
  const auto ia = index_.find(a);
  const auto ib = index_.find(b);
  if (ia == index_.end() || ib == index_.end()) return false;
  return reach_[ia->second].test(ib->second) &&
         !exact_reach_[ia->second].test(ib->second);
}

std::optional<int> AccessibilityModel::find(const CompositeState& c) const {
  const auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AccessibilityModel::pair_count() const {
  std::size_t total = 0;
  for (const auto& row : reach_) total += row.count();
  return total;
}

std::vector<std::pair<int, int>> AccessibilityModel::derived_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(pair_count());
  for (std::size_t i = 0; i < reach_.size(); ++i) {
    for (std::size_t j = reach_[i].find_first();
         j != boost::dynamic_bitset<>::npos; j = reach_[i].find_next(j)) {
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return pairs;
}

std::vector<std::pair<int, int>> AccessibilityModel::approximate_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < reach_.size(); ++i) {
    auto extra = reach_[i] & ~exact_reach_[i];
    for (std::size_t j = extra.find_first(); j != boost::dynamic_bitset<>::npos;
         j = extra.find_next(j)) {
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Axiom validation
// ---------------------------------------------------------------------------

bool ValidationReport::ok() const {
  for (const auto& check : checks) {
    if (!check.passed) return false;
  }
  return !intended_checked || (intended_not_derivable.empty() &&
                               intended_missing_derived.empty());
}

ValidationReport AccessibilityModel::validate_axioms(
    const std::vector<GeneratorEdge>* intended) const {
  if (!closed_) throw ContractError("model not closed");
  ValidationReport report;
  const int n = static_cast<int>(universe_.size());

  AxiomCheck reflexivity{"reflexivity"};
  for (int i = 0; i < n; ++i) {
    if (!reach_[i].test(i)) {
      reflexivity.passed = false;
      reflexivity.counterexamples.push_back(universe_[i].to_string());
    }
  }
  report.checks.push_back(std::move(reflexivity));

  AxiomCheck transitivity{"transitivity"};
  for (int i = 0; i < n && transitivity.counterexamples.size() < 5; ++i) {
    for (std::size_t k = reach_[i].find_first();
         k != boost::dynamic_bitset<>::npos; k = reach_[i].find_next(k)) {
      const auto gap = reach_[k] & ~reach_[i];
      if (gap.any()) {
        transitivity.passed = false;
        transitivity.counterexamples.push_back(
            pair_name(universe_[i], universe_[k]) + " but missing " +
            pair_name(universe_[i], universe_[gap.find_first()]));
        break;
      }
    }
  }
  report.checks.push_back(std::move(transitivity));

  AxiomCheck consistency{"consistency"};
  for (const auto& d : decompositions_) {
    if (!consistency.passed) break;
    const auto& succ = reach_[d.left];
    for (std::size_t u2 = succ.find_first(); u2 != boost::dynamic_bitset<>::npos;
         u2 = succ.find_next(u2)) {
      for (const int idx : decomps_by_left_[u2]) {
        const auto& d2 = decompositions_[idx];
        if (reach_[d.right].test(d2.right) && !reach_[d.whole].test(d2.whole)) {
          consistency.passed = false;
          consistency.counterexamples.push_back(
              pair_name(universe_[d.whole], universe_[d2.whole]) +
              " not derived from its factors");
          break;
        }
      }
      if (!consistency.passed) break;
    }
  }
  report.checks.push_back(std::move(consistency));

  AxiomCheck cancellation{"cancellation"};
  for (int i = 0; i < n && cancellation.passed; ++i) {
    for (std::size_t j = reach_[i].find_first();
         j != boost::dynamic_bitset<>::npos; j = reach_[i].find_next(j)) {
      if (static_cast<int>(j) == i) continue;
      const CompositeState common = universe_[i].intersect(universe_[j]);
      if (common.empty()) continue;
      const CompositeState left = universe_[i].subtract(common);
      const CompositeState right = universe_[j].subtract(common);
      if (left.empty() || right.empty()) continue;
      const auto li = index_.find(left);
      const auto ri = index_.find(right);
      if (li == index_.end() || ri == index_.end()) continue;
      if (!reach_[li->second].test(ri->second)) {
        cancellation.passed = false;
        cancellation.counterexamples.push_back(
            pair_name(left, right) + " missing despite " +
            pair_name(universe_[i], universe_[j]));
        break;
      }
    }
  }
  report.checks.push_back(std::move(cancellation));

  report.stability_inferences = stability_log_;

  if (intended != nullptr) {
    report.intended_checked = true;
    std::set<std::pair<int, int>> intended_ids;
    for (const auto& edge : *intended) {
      const auto a = find(edge.from);
      const auto b = find(edge.to);
      if (!a || !b || !reach_[*a].test(*b)) {
        report.intended_not_derivable.push_back(
            pair_name(edge.from, edge.to));
      }
      if (a && b) intended_ids.emplace(*a, *b);
    }
    for (int i = 0; i < n; ++i) {
      for (std::size_t j = reach_[i].find_first();
           j != boost::dynamic_bitset<>::npos; j = reach_[i].find_next(j)) {
        if (static_cast<int>(j) == i) continue;
        if (!intended_ids.count({i, static_cast<int>(j)})) {
          report.intended_missing_derived.push_back(
              pair_name(universe_[i], universe_[j]));
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Potential families
// ---------------------------------------------------------------------------

bool AccessibilityModel::family_covers(const SpaceTable& spaces,
                                       const PotentialFamily& family,
                                       const CompositeState& c) {
  (void)spaces;
  for (const auto& part : c.parts()) {
    if (std::find(family.spaces.begin(), family.spaces.end(),
                  part.ref.space) == family.spaces.end()) {
      return false;
    }
  }
  return !c.empty();
}

Rational AccessibilityModel::family_potential(const SpaceTable& spaces,
                                              const PotentialFamily& family,
                                              const CompositeState& c) {
  Rational total{0};
  for (const auto& part : c.parts()) {
    const SpaceDecl& space = spaces.at(part.ref.space);
    if (space.kind == SpaceKind::Normal) {
      const auto value =
          space.entropy_of_exact(part.ref.state, spaces.max_denominator);
      if (!value) {
        throw ConfigError("family '" + family.name + "': space " + space.id +
                          " has no exact rational entropy form");
      }
      total += part.scale * *value;
    } else {
      const auto it = space.potential.find(part.ref.state);
      if (it == space.potential.end()) {
        throw ConfigError("family '" + family.name + "': no potential for " +
                          part.ref.space + ":" + part.ref.state);
      }
      total += part.scale * it->second;
    }
  }
  return total;
}

std::string AccessibilityModel::pooled_signature(const SpaceTable& spaces,
                                                 const PotentialFamily* family,
                                                 const CompositeState& c) {
  (void)spaces;
  std::map<std::string, Rational> sig;
  for (const auto& part : c.parts()) {
    std::string key = part.ref.space;
    if (family != nullptr) {
      for (const auto& pool : family->pools) {
        if (std::find(pool.begin(), pool.end(), key) != pool.end()) {
          key = pool.front();
          break;
        }
      }
    }
    auto [it, inserted] = sig.emplace(key, part.scale);
    if (!inserted) it->second += part.scale;
  }
  std::ostringstream os;
  for (const auto& [key, scale] : sig) {
    os << key << "=" << format_rational(scale) << ";";
  }
  return os.str();
}

}  // namespace entromet
