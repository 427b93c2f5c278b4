#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "entromet/relation.hpp"

namespace entromet {

// Reference implementation of the closure, kept deliberately independent of
// AccessibilityModel: plain pair sets, full naive rule re-application each
// round, no bitsets and no derivation shortcuts. Single-threaded.
struct BruteModel {
  std::vector<CompositeState> universe;
  std::map<CompositeState, int> index;
  std::unordered_set<std::uint64_t> pairs;  // key = a * |universe| + b
  std::set<std::pair<int, int>> approximate;

  bool has(int a, int b) const {
    return pairs.count(static_cast<std::uint64_t>(a) * universe.size() + b) > 0;
  }
};

// Naive fixed-point closure over the given universe (same inputs as the
// engine: generators, families, stability epsilons). Throws ResourceError
// when the universe exceeds cap.
BruteModel brute_close(const SpaceTable& spaces,
                       const std::vector<CompositeState>& universe,
                       const std::vector<GeneratorEdge>& generators,
                       const std::vector<PotentialFamily>& families,
                       const ClosureOptions& closure,
                       std::size_t cap = 10000);

// Exhaustive double-variational scan: max entropy over meter states M with
// (ref_system, M) ≺ (x, ref_meter), and min over the reverse side. No
// monotonicity shortcuts. Values must equal the engine's measurement
// bit-for-bit. Returns {s_minus, s_plus}; throws ContractError when a side
// has no admissible meter state.
std::pair<double, double> brute_s(
    const BruteModel& model, const CompositeState& x,
    const CompositeState& ref_system, const CompositeState& ref_meter,
    const std::vector<std::pair<CompositeState, double>>& meter_states);

struct OracleDiff {
  std::size_t engine_pairs = 0;
  std::size_t brute_pairs = 0;
  bool pairs_equal = false;
  bool approx_equal = false;
  std::vector<std::string> sample_differences;
  bool ok() const { return pairs_equal && approx_equal; }
};

// Exact pair-set comparison between an engine closure and the naive closure
// rebuilt from the same inputs.
OracleDiff diff_against_engine(const AccessibilityModel& engine,
                               std::size_t cap = 10000);

}  // namespace entromet
