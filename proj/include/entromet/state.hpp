#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entromet/rational.hpp"

namespace entromet {

// ---------------------------------------------------------------------------
// State spaces
// ---------------------------------------------------------------------------

enum class SpaceKind {
  // Finite set of named states; no scaling, no entropy function. Composites
  // may contain several copies of the same state (integer multiplicity).
  Generic,
  // Scalable equilibrium system with an explicit entropy function over a
  // 1-D coordinate. States are identified by their coordinate.
  Normal,
};

// Entropy function registry for normal systems. Closed forms evaluate in
// doubles; Linear and Table additionally evaluate exactly in rationals,
// which the relation engine needs for tie-free orderings.
struct EntropyForm {
  enum class Kind { Linear, Log1p, Power, Table };

  Kind kind = Kind::Linear;
  Rational a{0};  // Linear: a + b*u   Log1p: a*ln(1+u)   Power: a*u^p
  Rational b{1};
  Rational p{1};
  std::vector<std::pair<Rational, double>> table;  // sorted by coordinate

  double eval(const Rational& u) const;
  // Exact value when the form is rational-valued (Linear, Table with
  // rational-representable interpolation); nullopt otherwise.
  std::optional<Rational> eval_exact(const Rational& u) const;
};

struct SpaceDecl {
  std::string id;
  SpaceKind kind = SpaceKind::Generic;

  // Generic spaces.
  std::vector<std::string> states;
  // Optional potential values for generic states (used by potential-induced
  // relation families and by chart fixtures).
  std::map<std::string, Rational> potential;

  // Normal spaces: either a continuous interval with a scan step, or an
  // explicit finite coordinate list.
  bool is_interval = false;
  Rational lo{0}, hi{0}, step{1};
  std::vector<Rational> coords;

  EntropyForm entropy;
  std::string unit = "nat";
  // Eligible as an entropy meter (also gates the stability inference rule).
  bool meter = false;
  // Declared bound on gaps in the sorted entropy values (connected-range
  // surrogate); checked by validate when present.
  std::optional<double> gap_bound;
  // Whether all of this space's scan states join the relation universe.
  bool universe_singletons = true;

  bool contains(const std::string& state_id, long long max_den) const;
  // Finite scan states: grid points for interval spaces, the explicit
  // coordinate list, or the named states for generic spaces.
  std::vector<std::string> scan_states(long long max_den) const;
  double entropy_of(const std::string& state_id, long long max_den) const;
  std::optional<Rational> entropy_of_exact(const std::string& state_id,
                                           long long max_den) const;
};

class SpaceTable {
 public:
  void add(SpaceDecl decl);
  bool has(const std::string& id) const;
  const SpaceDecl& at(const std::string& id) const;
  const std::map<std::string, SpaceDecl>& all() const { return spaces_; }

  long long max_denominator = kDefaultMaxDenominator;

 private:
  std::map<std::string, SpaceDecl> spaces_;
};

// ---------------------------------------------------------------------------
// States and composites
// ---------------------------------------------------------------------------

struct StateRef {
  std::string space;
  std::string state;

  friend auto operator<=>(const StateRef&, const StateRef&) = default;
};

struct ScaledPart {
  StateRef ref;
  Rational scale{1};
};

// Canonical multiset of scaled parts: sorted by (space, state), one entry
// per (space, state), zero-scale parts removed, identical parts merged by
// scale addition. For generic spaces the merged scale is the copy count.
class CompositeState {
 public:
  CompositeState() = default;

  static CompositeState canonical(std::vector<ScaledPart> parts,
                                  const SpaceTable& spaces);
  static CompositeState singleton(StateRef ref, const SpaceTable& spaces);

  const std::vector<ScaledPart>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  // Number of constituent subsystems: sum of ceil(scale) over parts.
  int arity() const;

  CompositeState compose(const CompositeState& other) const;
  // Greatest common sub-multiset (per-key minimum scale).
  CompositeState intersect(const CompositeState& other) const;
  // Per-key scale difference; other must be a sub-multiset of *this.
  CompositeState subtract(const CompositeState& other) const;
  bool contains_submultiset(const CompositeState& other) const;

  // Total scale per space (the "amount of matter" signature).
  std::map<std::string, Rational> signature() const;

  // 64-bit part-key fingerprint for cheap disjointness tests.
  std::uint64_t key_mask() const { return key_mask_; }

  std::string to_string() const;

  friend bool operator==(const CompositeState& a, const CompositeState& b) {
    return a.parts_ == b.parts_;
  }
  friend bool operator<(const CompositeState& a, const CompositeState& b);

 private:
  static CompositeState from_canonical_parts(std::vector<ScaledPart> parts);
  void rebuild_mask();

  std::vector<ScaledPart> parts_;
  std::uint64_t key_mask_ = 0;
};

}  // namespace entromet
