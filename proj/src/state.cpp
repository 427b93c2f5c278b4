#include "entromet/state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "entromet/errors.hpp"

namespace entromet {

// ---------------------------------------------------------------------------
// EntropyForm
// ---------------------------------------------------------------------------

double EntropyForm::eval(const Rational& u) const {
  const double x = to_double(u);
  switch (kind) {
    case Kind::Linear:
      return to_double(a) + to_double(b) * x;
    case Kind::Log1p:
      if (x <= -1.0) throw ConfigError("log1p entropy needs u > -1");
      return to_double(a) * std::log1p(x);
    case Kind::Power:
      return to_double(a) * std::pow(x, to_double(p));
    case Kind::Table: {
      if (table.empty()) throw ConfigError("empty entropy table");
      if (u <= table.front().first) return table.front().second;
      if (u >= table.back().first) return table.back().second;
      for (std::size_t i = 1; i < table.size(); ++i) {
        if (u <= table[i].first) {
          const double t = to_double(u - table[i - 1].first) /
                           to_double(table[i].first - table[i - 1].first);
          return table[i - 1].second +
                 t * (table[i].second - table[i - 1].second);
        }
      }
      return table.back().second;
    }
  }
  return 0.0;
}

std::optional<Rational> EntropyForm::eval_exact(const Rational& u) const {
  if (kind == Kind::Linear) return a + b * u;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SpaceDecl
// ---------------------------------------------------------------------------

bool SpaceDecl::contains(const std::string& state_id, long long max_den) const {
  if (kind == SpaceKind::Generic) {
    return std::find(states.begin(), states.end(), state_id) != states.end();
  }
  Rational u;
  try {
    u = parse_rational(state_id, max_den);
  } catch (const ConfigError&) {
    return false;
  }
  if (is_interval) return u >= lo && u <= hi;
  return std::find(coords.begin(), coords.end(), u) != coords.end();
}

std::vector<std::string> SpaceDecl::scan_states(long long max_den) const {
  std::vector<std::string> out;
  if (kind == SpaceKind::Generic) return states;
  if (is_interval) {
    if (step <= Rational(0)) throw ConfigError("space " + id + ": step must be > 0");
    for (Rational u = lo; u <= hi; u += step) out.push_back(format_rational(u));
  } else {
    for (const auto& u : coords) out.push_back(format_rational(u));
  }
  (void)max_den;
  return out;
}

double SpaceDecl::entropy_of(const std::string& state_id,
                             long long max_den) const {
  if (kind != SpaceKind::Normal) {
    throw ContractError("space " + id + " has no entropy function");
  }
  return entropy.eval(parse_rational(state_id, max_den));
}

std::optional<Rational> SpaceDecl::entropy_of_exact(const std::string& state_id,
                                                    long long max_den) const {
  if (kind != SpaceKind::Normal) return std::nullopt;
  return entropy.eval_exact(parse_rational(state_id, max_den));
}

// ---------------------------------------------------------------------------
// SpaceTable
// ---------------------------------------------------------------------------

void SpaceTable::add(SpaceDecl decl) {
  if (decl.id.empty()) throw ConfigError("space with empty id");
  if (spaces_.count(decl.id)) throw ConfigError("duplicate space " + decl.id);
  spaces_.emplace(decl.id, std::move(decl));
}

bool SpaceTable::has(const std::string& id) const { return spaces_.count(id) > 0; }

const SpaceDecl& SpaceTable::at(const std::string& id) const {
  const auto it = spaces_.find(id);
  if (it == spaces_.end()) throw ConfigError("unknown space " + id);
  return it->second;
}

// ---------------------------------------------------------------------------
// CompositeState
// ---------------------------------------------------------------------------

namespace {

bool part_key_less(const ScaledPart& a, const ScaledPart& b) {
  if (a.ref.space != b.ref.space) return a.ref.space < b.ref.space;
  return a.ref.state < b.ref.state;
}

std::uint64_t part_key_hash(const StateRef& ref) {
  const std::size_t h =
      std::hash<std::string>{}(ref.space) * 1315423911u ^
      std::hash<std::string>{}(ref.state);
  return 1ULL << (h % 64);
}

}  // namespace

CompositeState CompositeState::canonical(std::vector<ScaledPart> parts,
                                         const SpaceTable& spaces) {
  for (const auto& part : parts) {
    const SpaceDecl& space = spaces.at(part.ref.space);
    if (!space.contains(part.ref.state, spaces.max_denominator)) {
      throw ConfigError("state '" + part.ref.state + "' is not a member of space '" +
                        part.ref.space + "'");
    }
    if (part.scale < Rational(0)) {
      throw ConfigError("negative scale on state " + part.ref.state);
    }
    if (space.kind == SpaceKind::Generic && part.scale != Rational(0) &&
        part.scale != Rational(1)) {
      throw ConfigError("space '" + part.ref.space +
                        "' is not scalable; parts must have scale 0 or 1");
    }
  }
  return from_canonical_parts(std::move(parts));
}

CompositeState CompositeState::singleton(StateRef ref, const SpaceTable& spaces) {
  return canonical({ScaledPart{std::move(ref), Rational(1)}}, spaces);
}

CompositeState CompositeState::from_canonical_parts(std::vector<ScaledPart> parts) {
  std::sort(parts.begin(), parts.end(), part_key_less);
  std::vector<ScaledPart> merged;
  for (auto& part : parts) {
    if (part.scale == Rational(0)) continue;
    if (!merged.empty() && merged.back().ref == part.ref) {
      merged.back().scale += part.scale;
    } else {
      merged.push_back(std::move(part));
    }
  }
  CompositeState out;
  out.parts_ = std::move(merged);
  out.rebuild_mask();
  return out;
}

void CompositeState::rebuild_mask() {
  key_mask_ = 0;
  for (const auto& part : parts_) key_mask_ |= part_key_hash(part.ref);
}

int CompositeState::arity() const {
  int n = 0;
  for (const auto& part : parts_) {
    const long long num = part.scale.numerator();
    const long long den = part.scale.denominator();
    n += static_cast<int>((num + den - 1) / den);  // ceil
  }
  return n;
}

CompositeState CompositeState::compose(const CompositeState& other) const {
  std::vector<ScaledPart> parts = parts_;
  parts.insert(parts.end(), other.parts_.begin(), other.parts_.end());
  return from_canonical_parts(std::move(parts));
}

CompositeState CompositeState::intersect(const CompositeState& other) const {
  std::vector<ScaledPart> out;
  auto it = other.parts_.begin();
  for (const auto& part : parts_) {
    while (it != other.parts_.end() && part_key_less(*it, part)) ++it;
    if (it != other.parts_.end() && it->ref == part.ref) {
      out.push_back({part.ref, std::min(part.scale, it->scale)});
    }
  }
  return from_canonical_parts(std::move(out));
}

CompositeState CompositeState::subtract(const CompositeState& other) const {
  std::vector<ScaledPart> out;
  auto it = other.parts_.begin();
  for (const auto& part : parts_) {
    Rational remaining = part.scale;
    while (it != other.parts_.end() && part_key_less(*it, part)) ++it;
    if (it != other.parts_.end() && it->ref == part.ref) {
      if (it->scale > remaining) {
        throw ContractError("subtract: not a sub-multiset");
      }
      remaining -= it->scale;
    }
    if (remaining != Rational(0)) out.push_back({part.ref, remaining});
  }
  return from_canonical_parts(std::move(out));
}

bool CompositeState::contains_submultiset(const CompositeState& other) const {
  auto it = parts_.begin();
  for (const auto& part : other.parts_) {
    while (it != parts_.end() && part_key_less(*it, part)) ++it;
    if (it == parts_.end() || !(it->ref == part.ref) || it->scale < part.scale) {
      return false;
    }
  }
  return true;
}

std::map<std::string, Rational> CompositeState::signature() const {
  std::map<std::string, Rational> sig;
  for (const auto& part : parts_) {
    auto [it, inserted] = sig.emplace(part.ref.space, part.scale);
    if (!inserted) it->second += part.scale;
  }
  return sig;
}

std::string CompositeState::to_string() const {
  if (parts_.empty()) return "()";
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (const auto& part : parts_) {
    if (!first) os << ", ";
    first = false;
    if (part.scale != Rational(1)) os << format_rational(part.scale) << "*";
    os << part.ref.space << ":" << part.ref.state;
  }
  os << ")";
  return os.str();
}

bool operator<(const CompositeState& a, const CompositeState& b) {
  const auto& pa = a.parts_;
  const auto& pb = b.parts_;
  for (std::size_t i = 0; i < pa.size() && i < pb.size(); ++i) {
    if (pa[i].ref != pb[i].ref) return pa[i].ref < pb[i].ref;
    if (pa[i].scale != pb[i].scale) return pa[i].scale < pb[i].scale;
  }
  return pa.size() < pb.size();
}

}  // namespace entromet
