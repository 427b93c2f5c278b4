#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entromet/relation.hpp"

namespace entromet {

struct EntropyEstimate {
  std::string state;
  double s_minus = 0.0;
  double s_plus = 0.0;
  std::string witness_lower;  // meter state attaining s_minus
  std::string witness_upper;  // meter state attaining s_plus
  double tol = 0.0;
  bool comparable = false;  // s_plus - s_minus <= 2*tol
  double gap() const { return s_plus - s_minus; }
  double mid() const { return 0.5 * (s_minus + s_plus); }
};

struct B1Entry {
  std::string state;
  bool lower_ok = false;
  bool upper_ok = false;
  bool ok() const { return lower_ok && upper_ok; }
};

struct B1Report {
  std::vector<B1Entry> entries;
  bool ok() const;
};

// A measurement context: named system composites measured against a meter
// scale through the closed relation. The base construction measures the
// states of a space against a normal meter with references (X1, Z0); the
// product constructions reuse the same machinery for pair systems.
// Immutable once built; measurements are independent const queries.
class MeterSetup {
 public:
  struct ScalePoint {
    CompositeState state;
    double value;
    std::string name;
  };

  MeterSetup(const AccessibilityModel& model,
             std::vector<std::pair<std::string, CompositeState>> system_states,
             CompositeState ref_system, CompositeState ref_meter,
             std::vector<ScalePoint> scale);

  static MeterSetup base(const AccessibilityModel& model,
                         const std::string& system_space,
                         const std::string& meter_space, const StateRef& x1,
                         const StateRef& z0);
  // Pair system Γ×Γ measured by the pair meter with references (X1,X1) and
  // (Z0,Z0). Used by the superadditivity/subadditivity checks.
  static MeterSetup product_pair(const AccessibilityModel& model,
                                 const MeterSetup& base_setup);
  // System Γ×Γ0 measured by Γ0 with references ((X1,Z0), Z0). Used by the
  // restriction identities and the sandwich bound.
  static MeterSetup product_with_meter(const AccessibilityModel& model,
                                       const MeterSetup& base_setup);

  const std::vector<std::pair<std::string, CompositeState>>& system_states()
      const {
    return system_states_;
  }
  const CompositeState& ref_system() const { return ref_system_; }
  const CompositeState& ref_meter() const { return ref_meter_; }
  const std::vector<ScalePoint>& scale() const { return scale_; }
  double tol() const { return tol_; }
  const AccessibilityModel& model() const { return *model_; }

  B1Report check_b1() const;
  EntropyEstimate measure(const std::string& state_name) const;
  EntropyEstimate measure_composite(const CompositeState& c,
                                    const std::string& display_name) const;
  std::vector<EntropyEstimate> measure_all() const;

  // Meter state adiabatically equivalent (within the scale resolution) to
  // the measured state; requires the comparability hypothesis at it.
  ScalePoint find_equivalent_meter_state(const std::string& state_name) const;

 private:
  const AccessibilityModel* model_;
  std::vector<std::pair<std::string, CompositeState>> system_states_;
  CompositeState ref_system_;
  CompositeState ref_meter_;
  std::vector<ScalePoint> scale_;  // sorted by (value, name)
  double tol_;
};

struct CheckResult {
  std::string name;
  bool applicable = true;
  bool passed = true;
  std::vector<std::string> failures;
  std::string note;
};

struct Theorem1Report {
  std::vector<EntropyEstimate> estimates;
  double max_gap = 0.0;
  bool b2_holds = false;
  CheckResult equality;         // S- = S+ within 2 tol everywhere
  CheckResult entropy_property; // X ≺ Y iff S(X) <= S(Y)
  CheckResult additivity;       // pair relation governed by entropy sums
  CheckResult reference_shift;  // alternate references shift S by a constant
  std::optional<double> shift;  // measured additive constant
  std::vector<EntropyEstimate> alt_estimates;
  bool ok() const;
};

struct AltReferences {
  StateRef x1;
  StateRef z0;
};

Theorem1Report verify_theorem1(const MeterSetup& setup,
                               const std::optional<AltReferences>& alt);

// A candidate monotone function on the system-with-meter product space,
// normalized to the meter entropy on reference slices.
struct MonotoneCandidate {
  std::string name;
  std::function<double(const std::string&)> value;  // by product-state name
};

struct PropositionReport {
  std::vector<EntropyEstimate> base;
  std::vector<EntropyEstimate> pair_products;
  std::vector<EntropyEstimate> meter_products;
  CheckResult monotone;        // part 1
  CheckResult access_from_gap; // part 2
  CheckResult additivity_bounds;  // part 3
  CheckResult restriction;     // part 4 identities
  CheckResult sandwich;        // part 4 bound for monotone candidates
  bool ok() const;
};

PropositionReport check_proposition(
    const MeterSetup& setup,
    const std::vector<MonotoneCandidate>& extra_candidates = {});

}  // namespace entromet
