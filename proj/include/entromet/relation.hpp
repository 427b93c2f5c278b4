#pragma once

#include <boost/dynamic_bitset.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entromet/normal_system.hpp"
#include "entromet/state.hpp"

namespace entromet {

struct GeneratorEdge {
  CompositeState from;
  CompositeState to;
  std::string label;
};

// Relation family induced by a scalar potential: two universe composites U, V
// whose parts all belong to the family's spaces are related U ≺ V iff their
// amount signatures agree and pot(U) <= pot(V), where pot sums scale-weighted
// potentials (generic spaces) or entropies (normal spaces). Potentials must
// be exactly rational-valued so that ties relate both ways.
struct PotentialFamily {
  std::string name;
  std::vector<std::string> spaces;
  // Spaces listed in one pool are treated as the same physical system when
  // matching amount signatures (e.g. an equilibrium subspace embedded in a
  // larger space of non-equilibrium states).
  std::vector<std::vector<std::string>> pools;
};

struct UniverseOptions {
  int arity_cap = 4;
  std::size_t budget = 10000;
  // Close the universe under pairwise composition of registered composites
  // (up to arity_cap). Feasible for small explicit models only; analyses
  // register the product composites they need instead.
  bool pairwise_compose = false;
};

struct ClosureOptions {
  // Decreasing scale factors for the stability inference rule: X ≺ Y is
  // inferred (and tagged approximate) when (X, eZ0) ≺ (Y, eZ1) is derived
  // for every e in the list, with Z0, Z1 in a declared meter space.
  std::vector<Rational> stability_epsilons;
};

enum class OrderClass { Equivalent, Strict, StrictReverse, Incomparable };

struct StabilityInference {
  CompositeState from, to;
  StateRef meter_lo, meter_hi;
  std::vector<Rational> epsilons;
};

struct AxiomCheck {
  std::string name;
  bool passed = true;
  std::vector<std::string> counterexamples;
};

struct ValidationReport {
  std::vector<AxiomCheck> checks;
  std::vector<StabilityInference> stability_inferences;
  // Pairs the user asserted that the closure cannot derive, and derived
  // pairs missing from the asserted relation.
  std::vector<std::string> intended_not_derivable;
  std::vector<std::string> intended_missing_derived;
  bool intended_checked = false;
  bool ok() const;
};

// Finite model of the accessibility relation: a universe of canonical
// composites plus the least relation containing the generators and closed
// under reflexivity, transitivity, consistency (restricted to compositions
// inside the universe), cancellation of common parts, and the stability
// rule. Closing is exclusive; a closed model is immutable and all queries
// are const and thread-safe.
class AccessibilityModel {
 public:
  AccessibilityModel(SpaceTable spaces, UniverseOptions universe = {},
                     ClosureOptions closure = {});

  const SpaceTable& spaces() const { return spaces_; }

  // --- construction (before close) ---
  void add_generator(GeneratorEdge edge);
  void add_family(PotentialFamily family);
  void register_composite(const CompositeState& c);
  void register_singletons(const std::string& space_id);

  void close();
  bool closed() const { return closed_; }

  // --- queries (after close) ---
  Verdict precedes(const CompositeState& a, const CompositeState& b) const;
  OrderClass classify(const CompositeState& a, const CompositeState& b) const;
  // Whether the pair was derived only through the stability rule.
  bool is_approximate(const CompositeState& a, const CompositeState& b) const;

  std::size_t universe_size() const { return universe_.size(); }
  const CompositeState& composite(int id) const { return universe_[id]; }
  std::optional<int> find(const CompositeState& c) const;
  const boost::dynamic_bitset<>& successors(int id) const { return reach_[id]; }
  std::size_t pair_count() const;
  std::vector<std::pair<int, int>> derived_pairs() const;
  std::vector<std::pair<int, int>> approximate_pairs() const;

  ValidationReport validate_axioms(
      const std::vector<GeneratorEdge>* intended = nullptr) const;

  const std::vector<GeneratorEdge>& generators() const { return generators_; }
  const std::vector<PotentialFamily>& families() const { return families_; }
  const ClosureOptions& closure_options() const { return closure_; }

  // Exact scale-weighted potential of a composite under a family; used by
  // fixtures and the brute-force reference implementation.
  static Rational family_potential(const SpaceTable& spaces,
                                   const PotentialFamily& family,
                                   const CompositeState& c);
  static bool family_covers(const SpaceTable& spaces,
                            const PotentialFamily& family,
                            const CompositeState& c);
  static std::string pooled_signature(const SpaceTable& spaces,
                                      const PotentialFamily* family,
                                      const CompositeState& c);

 private:
  int intern(const CompositeState& c);
  void build_universe();
  void build_decompositions();
  void seed();
  bool set_pair(int a, int b);
  bool transitivity_pass();
  bool consistency_pass();
  bool cancellation_pass();
  bool run_core_rules();
  bool stability_pass();

  SpaceTable spaces_;
  UniverseOptions universe_opts_;
  ClosureOptions closure_;

  std::vector<GeneratorEdge> generators_;
  std::vector<PotentialFamily> families_;
  std::vector<CompositeState> registered_;

  std::vector<CompositeState> universe_;
  std::map<CompositeState, int> index_;
  std::vector<boost::dynamic_bitset<>> reach_;
  std::vector<boost::dynamic_bitset<>> exact_reach_;  // before stability
  // (u, v, w) with compose(u, v) == w, all in the universe.
  struct Decomposition {
    int left, right, whole;
  };
  std::vector<Decomposition> decompositions_;
  std::vector<std::vector<int>> decomps_by_left_;  // id -> indices
  std::vector<StabilityInference> stability_log_;
  bool closed_ = false;
};

}  // namespace entromet
