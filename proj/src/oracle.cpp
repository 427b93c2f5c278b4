#include "entromet/oracle.hpp"

#include <algorithm>

#include "entromet/errors.hpp"

namespace entromet {

namespace {

std::uint64_t key_of(int a, int b, std::size_t n) {
  return static_cast<std::uint64_t>(a) * n + b;
}

bool pure_normal(const SpaceTable& spaces, const CompositeState& c) {
  for (const auto& part : c.parts()) {
    if (spaces.at(part.ref.space).kind != SpaceKind::Normal) return false;
  }
  return true;
}

// Scale-weighted entropy of a pure-normal composite, exact when possible.
bool exact_entropy(const SpaceTable& spaces, const CompositeState& c,
                   Rational* out) {
  Rational total{0};
  for (const auto& part : c.parts()) {
    const auto value = spaces.at(part.ref.space)
                           .entropy_of_exact(part.ref.state, spaces.max_denominator);
    if (!value) return false;
    total += part.scale * *value;
  }
  *out = total;
  return true;
}

double approx_entropy(const SpaceTable& spaces, const CompositeState& c) {
  double total = 0.0;
  for (const auto& part : c.parts()) {
    total += to_double(part.scale) *
             spaces.at(part.ref.space).entropy_of(part.ref.state,
                                                  spaces.max_denominator);
  }
  return total;
}

}  // namespace

BruteModel brute_close(const SpaceTable& spaces,
                       const std::vector<CompositeState>& universe,
                       const std::vector<GeneratorEdge>& generators,
                       const std::vector<PotentialFamily>& families,
                       const ClosureOptions& closure, std::size_t cap) {
  if (universe.size() > cap) {
    throw ResourceError("brute-force cap of " + std::to_string(cap) +
                        " composites exceeded (" +
                        std::to_string(universe.size()) + ")");
  }
  BruteModel model;
  model.universe = universe;
  for (int i = 0; i < static_cast<int>(universe.size()); ++i) {
    model.index.emplace(universe[i], i);
  }
  const std::size_t n = universe.size();
  auto& pairs = model.pairs;
  pairs.reserve(n * 8);
  const auto add = [&](int a, int b) {
    return pairs.insert(key_of(a, b, n)).second;
  };

  // Seeds: reflexivity, generators, potential families, the entropy order
  // on pure-normal composites of equal signature.
  for (std::size_t i = 0; i < n; ++i) add(static_cast<int>(i), static_cast<int>(i));
  for (const auto& edge : generators) {
    add(model.index.at(edge.from), model.index.at(edge.to));
  }
  for (const auto& family : families) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!AccessibilityModel::family_covers(spaces, family, universe[i])) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!AccessibilityModel::family_covers(spaces, family, universe[j])) continue;
        if (AccessibilityModel::pooled_signature(spaces, &family, universe[i]) !=
            AccessibilityModel::pooled_signature(spaces, &family, universe[j])) {
          continue;
        }
        if (AccessibilityModel::family_potential(spaces, family, universe[i]) <=
            AccessibilityModel::family_potential(spaces, family, universe[j])) {
          add(static_cast<int>(i), static_cast<int>(j));
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!pure_normal(spaces, universe[i])) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!pure_normal(spaces, universe[j])) continue;
      if (AccessibilityModel::pooled_signature(spaces, nullptr, universe[i]) !=
          AccessibilityModel::pooled_signature(spaces, nullptr, universe[j])) {
        continue;
      }
      Rational ei, ej;
      if (exact_entropy(spaces, universe[i], &ei) &&
          exact_entropy(spaces, universe[j], &ej)) {
        if (ei <= ej) add(static_cast<int>(i), static_cast<int>(j));
      } else if (approx_entropy(spaces, universe[i]) <=
                 approx_entropy(spaces, universe[j])) {
        add(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }

  // Proper splits (u, v, w) with compose(u, v) == w inside the universe.
  struct Split {
    int left, right, whole;
  };
  std::vector<Split> splits;
  std::vector<std::vector<int>> splits_by_left(n);
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t u = 0; u < n; ++u) {
      if (u == w) continue;
      if (!universe[w].contains_submultiset(universe[u])) continue;
      const CompositeState rest = universe[w].subtract(universe[u]);
      if (rest.empty()) continue;
      const auto it = model.index.find(rest);
      if (it == model.index.end()) continue;
      splits.push_back({static_cast<int>(u), it->second, static_cast<int>(w)});
      splits_by_left[u].push_back(static_cast<int>(splits.size()) - 1);
    }
  }

  const std::set<Rational> eps_set(closure.stability_epsilons.begin(),
                                   closure.stability_epsilons.end());

  // Full naive re-application of every rule until nothing new appears. The
  // stability rule runs on the exact fixed point first, so inferred pairs
  // can be told apart afterwards.
  const auto run_core = [&]() {
    bool changed = true;
    while (changed) {
      changed = false;
      // transitivity
      std::vector<std::vector<int>> out(n);
      for (const auto key : pairs) {
        out[key / n].push_back(static_cast<int>(key % n));
      }
      for (std::size_t a = 0; a < n; ++a) {
        for (const int b : out[a]) {
          for (const int c : out[b]) {
            if (add(static_cast<int>(a), c)) changed = true;
          }
        }
      }
      // consistency: u ≺ u' and v ≺ v' gives (u,v) ≺ (u',v')
      for (const auto& s : splits) {
        for (std::size_t u2 = 0; u2 < n; ++u2) {
          if (!model.has(s.left, static_cast<int>(u2))) continue;
          for (const int idx : splits_by_left[u2]) {
            const auto& s2 = splits[idx];
            if (model.has(s.right, s2.right)) {
              if (add(s.whole, s2.whole)) changed = true;
            }
          }
        }
      }
      // cancellation of the greatest common part
      const std::vector<std::uint64_t> snapshot(pairs.begin(), pairs.end());
      for (const auto key : snapshot) {
        const int a = static_cast<int>(key / n);
        const int b = static_cast<int>(key % n);
        if (a == b) continue;
        const CompositeState common = universe[a].intersect(universe[b]);
        if (common.empty()) continue;
        const CompositeState left = universe[a].subtract(common);
        const CompositeState right = universe[b].subtract(common);
        if (left.empty() || right.empty()) continue;
        const auto li = model.index.find(left);
        const auto ri = model.index.find(right);
        if (li == model.index.end() || ri == model.index.end()) continue;
        if (add(li->second, ri->second)) changed = true;
      }
    }
  };

  run_core();
  const std::unordered_set<std::uint64_t> exact = pairs;

  if (!eps_set.empty()) {
    bool inferred = true;
    while (inferred) {
      inferred = false;
      std::map<std::tuple<int, int, std::string, std::string>,
               std::set<Rational>>
          hits;
      const std::vector<std::uint64_t> snapshot(pairs.begin(), pairs.end());
      for (const auto key : snapshot) {
        const int a = static_cast<int>(key / n);
        const int b = static_cast<int>(key % n);
        for (const auto& pa : universe[a].parts()) {
          const SpaceDecl& sa = spaces.at(pa.ref.space);
          if (sa.kind != SpaceKind::Normal || !sa.meter) continue;
          for (const auto& eps : eps_set) {
            if (pa.scale < eps) continue;
            CompositeState ra;
            try {
              ra = universe[a].subtract(CompositeState::canonical(
                  {ScaledPart{pa.ref, eps}}, spaces));
            } catch (const ContractError&) {
              continue;
            }
            if (ra.empty()) continue;
            const auto ia = model.index.find(ra);
            if (ia == model.index.end()) continue;
            for (const auto& pb : universe[b].parts()) {
              const SpaceDecl& sb = spaces.at(pb.ref.space);
              if (sb.kind != SpaceKind::Normal || !sb.meter) continue;
              if (pb.scale < eps) continue;
              CompositeState rb = universe[b].subtract(
                  CompositeState::canonical({ScaledPart{pb.ref, eps}}, spaces));
              if (rb.empty()) continue;
              const auto ib = model.index.find(rb);
              if (ib == model.index.end()) continue;
              hits[{ia->second, ib->second, pa.ref.state, pb.ref.state}]
                  .insert(eps);
            }
          }
        }
      }
      for (const auto& [hit_key, eps_hits] : hits) {
        if (eps_hits.size() != eps_set.size()) continue;
        if (add(std::get<0>(hit_key), std::get<1>(hit_key))) inferred = true;
      }
      if (inferred) run_core();
    }
  }

  for (const auto key : pairs) {
    if (!exact.count(key)) {
      model.approximate.emplace(static_cast<int>(key / n),
                                static_cast<int>(key % n));
    }
  }
  return model;
}

std::pair<double, double> brute_s(
    const BruteModel& model, const CompositeState& x,
    const CompositeState& ref_system, const CompositeState& ref_meter,
    const std::vector<std::pair<CompositeState, double>>& meter_states) {
  const CompositeState lhs_target = x.compose(ref_meter);
  const auto target = model.index.find(lhs_target);
  if (target == model.index.end()) {
    throw ContractError("brute_s: composite " + lhs_target.to_string() +
                        " not in the brute universe");
  }
  bool have_lower = false, have_upper = false;
  double s_minus = 0.0, s_plus = 0.0;
  for (const auto& [meter_state, value] : meter_states) {
    const auto probe = model.index.find(ref_system.compose(meter_state));
    if (probe == model.index.end()) continue;
    if (model.has(probe->second, target->second)) {
      if (!have_lower || value > s_minus) s_minus = value;
      have_lower = true;
    }
    if (model.has(target->second, probe->second)) {
      if (!have_upper || value < s_plus) s_plus = value;
      have_upper = true;
    }
  }
  if (!have_lower || !have_upper) {
    throw ContractError(std::string("brute_s: no admissible meter state on the ") +
                        (!have_lower ? "lower" : "upper") + " side for " +
                        x.to_string());
  }
  return {s_minus, s_plus};
}

OracleDiff diff_against_engine(const AccessibilityModel& engine,
                               std::size_t cap) {
  std::vector<CompositeState> universe;
  universe.reserve(engine.universe_size());
  for (std::size_t i = 0; i < engine.universe_size(); ++i) {
    universe.push_back(engine.composite(static_cast<int>(i)));
  }
  const BruteModel brute =
      brute_close(engine.spaces(), universe, engine.generators(),
                  engine.families(), engine.closure_options(), cap);

  OracleDiff diff;
  diff.engine_pairs = engine.pair_count();
  diff.brute_pairs = brute.pairs.size();
  diff.pairs_equal = diff.engine_pairs == diff.brute_pairs;
  const std::size_t n = universe.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = engine.successors(static_cast<int>(i));
    for (std::size_t j = 0; j < n; ++j) {
      const bool e = row.test(j);
      const bool b = brute.has(static_cast<int>(i), static_cast<int>(j));
      if (e != b) {
        diff.pairs_equal = false;
        if (diff.sample_differences.size() < 10) {
          diff.sample_differences.push_back(
              universe[i].to_string() + " < " + universe[j].to_string() +
              (e ? " derived by engine only" : " derived by oracle only"));
        }
      }
    }
  }
  const auto engine_approx = engine.approximate_pairs();
  diff.approx_equal =
      std::set<std::pair<int, int>>(engine_approx.begin(), engine_approx.end()) ==
      brute.approximate;
  return diff;
}

}  // namespace entromet
