#include "mixpl/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mixpl/errors.hpp"

namespace mixpl {
namespace {

void require_distinct(const std::vector<int>& items, const char* what) {
  std::vector<int> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvariantError(std::string(what) + " contains duplicate alternatives");
  }
}

void require_in_range(std::span<const int> items, int m, const char* what) {
  for (int a : items) {
    if (a < 0 || a >= m) {
      throw InvariantError(std::string(what) + " references alternative " +
                           std::to_string(a + 1) + " outside 1.." + std::to_string(m));
    }
  }
}

std::string join_one_based(std::span<const int> items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(items[i] + 1);
  }
  return out;
}

}  // namespace

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Top:
      return "top";
    case StructureKind::Way:
      return "way";
    case StructureKind::Choice:
      return "choice";
  }
  return "?";
}

StructureKind structure_kind_from_string(const std::string& name) {
  if (name == "top") return StructureKind::Top;
  if (name == "way") return StructureKind::Way;
  if (name == "choice") return StructureKind::Choice;
  throw InvariantError("unknown structure kind '" + name + "'");
}

StructureId StructureId::top(int l) { return {StructureKind::Top, l, {}}; }

StructureId StructureId::way(std::vector<int> subset) {
  std::sort(subset.begin(), subset.end());
  const int l = static_cast<int>(subset.size());
  return {StructureKind::Way, l, std::move(subset)};
}

StructureId StructureId::choice(std::vector<int> subset) {
  std::sort(subset.begin(), subset.end());
  const int l = static_cast<int>(subset.size());
  return {StructureKind::Choice, l, std::move(subset)};
}

void StructureId::validate(int m) const {
  if (kind == StructureKind::Top) {
    if (l < 1 || l > m - 1) {
      throw InvariantError("top-" + std::to_string(l) + " requires 1 <= l <= m-1 (m=" +
                           std::to_string(m) + ")");
    }
    if (!subset.empty()) throw InvariantError("top-l structure carries no subset");
    return;
  }
  if (l < 1 || l > m || static_cast<int>(subset.size()) != l) {
    throw InvariantError("structure " + structure_key(*this) + " has invalid size");
  }
  require_distinct(subset, "structure subset");
  require_in_range(subset, m, "structure subset");
}

std::string structure_key(const StructureId& s) {
  std::string key = to_string(s.kind) + "-" + std::to_string(s.l);
  if (s.kind != StructureKind::Top) key += ":" + join_one_based(s.subset);
  return key;
}

StructureId parse_structure_key(const std::string& key) {
  const auto dash = key.find('-');
  if (dash == std::string::npos) throw InvariantError("malformed structure key '" + key + "'");
  const StructureKind kind = structure_kind_from_string(key.substr(0, dash));
  const auto colon = key.find(':', dash);
  int l = 0;
  try {
    l = std::stoi(key.substr(dash + 1, colon == std::string::npos ? std::string::npos
                                                                  : colon - dash - 1));
  } catch (const std::exception&) {
    throw InvariantError("malformed structure size in '" + key + "'");
  }
  if (kind == StructureKind::Top) {
    if (colon != std::string::npos) throw InvariantError("top-l key takes no subset: '" + key + "'");
    return StructureId::top(l);
  }
  if (colon == std::string::npos) throw InvariantError("missing subset in '" + key + "'");
  std::vector<int> subset;
  std::stringstream ss(key.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      subset.push_back(std::stoi(item) - 1);
    } catch (const std::exception&) {
      throw InvariantError("malformed subset entry in '" + key + "'");
    }
  }
  StructureId s = kind == StructureKind::Way ? StructureId::way(subset) : StructureId::choice(subset);
  if (s.l != l) throw InvariantError("size mismatch in structure key '" + key + "'");
  return s;
}

LinearOrder::LinearOrder(std::vector<int> ranking) : ranking_(std::move(ranking)) {
  require_distinct(ranking_, "linear order");
}

void LinearOrder::validate(int m) const {
  if (size() != m) {
    throw InvariantError("linear order has " + std::to_string(size()) + " entries, expected " +
                         std::to_string(m));
  }
  require_in_range(ranking_, m, "linear order");
}

std::vector<int> LinearOrder::positions() const {
  std::vector<int> pos(ranking_.size());
  for (std::size_t p = 0; p < ranking_.size(); ++p) pos[ranking_[p]] = static_cast<int>(p);
  return pos;
}

PartialOrder PartialOrder::top(std::vector<int> ranked) {
  require_distinct(ranked, "top-l order");
  return PartialOrder(StructureKind::Top, std::move(ranked), -1);
}

PartialOrder PartialOrder::way(std::vector<int> ranked) {
  require_distinct(ranked, "l-way order");
  return PartialOrder(StructureKind::Way, std::move(ranked), -1);
}

PartialOrder PartialOrder::choice(std::vector<int> subset, int chosen) {
  require_distinct(subset, "choice subset");
  std::sort(subset.begin(), subset.end());
  if (!std::binary_search(subset.begin(), subset.end(), chosen)) {
    throw InvariantError("chosen alternative " + std::to_string(chosen + 1) +
                         " is not in the choice subset");
  }
  return PartialOrder(StructureKind::Choice, std::move(subset), chosen);
}

StructureId PartialOrder::structure() const {
  switch (kind_) {
    case StructureKind::Top:
      return StructureId::top(size());
    case StructureKind::Way:
      return StructureId::way(items_);
    case StructureKind::Choice:
      return StructureId{StructureKind::Choice, size(), items_};
  }
  return {};
}

void PartialOrder::validate(int m) const {
  require_in_range(items_, m, "partial order");
  const int l = size();
  if (kind_ == StructureKind::Top && (l < 1 || l > m - 1)) {
    throw InvariantError("top-l order requires 1 <= l <= m-1, got l=" + std::to_string(l));
  }
  if (kind_ != StructureKind::Top && (l < 1 || l > m)) {
    throw InvariantError("order requires 1 <= l <= m, got l=" + std::to_string(l));
  }
}

std::string to_string(const PartialOrder& o) {
  std::string out;
  if (o.kind() == StructureKind::Choice) {
    out = "({" + join_one_based(o.items()) + "}, a" + std::to_string(o.chosen() + 1) + ")";
    return out;
  }
  for (int p = 0; p < o.size(); ++p) {
    if (p) out += " > ";
    out += "a" + std::to_string(o.items()[p] + 1);
  }
  if (o.kind() == StructureKind::Top) out += " > others";
  return out;
}

void StructureDistribution::add(const StructureId& s, double probability) {
  entries_[s] += probability;
}

double StructureDistribution::probability(const StructureId& s) const {
  const auto it = entries_.find(s);
  return it == entries_.end() ? 0.0 : it->second;
}

double StructureDistribution::total() const {
  double sum = 0.0;
  for (const auto& [s, p] : entries_) sum += p;
  return sum;
}

void StructureValidation::throw_if_invalid() const {
  if (ok()) return;
  const StructureViolation& v = violations.front();
  switch (v.rule) {
    case StructureViolation::Rule::Overlap:
      throw OverlapError(v.message);
    case StructureViolation::Rule::Sum:
      throw SumError(v.message);
    case StructureViolation::Rule::NonPositive:
      throw NonPositiveError(v.message);
    case StructureViolation::Rule::Invalid:
      throw InvariantError(v.message);
  }
}

StructureValidation validate_structure_set(const StructureDistribution& phi, int m) {
  using Rule = StructureViolation::Rule;
  StructureValidation result;
  auto report = [&](Rule rule, std::string message) {
    result.violations.push_back({rule, std::move(message)});
  };

  for (const auto& [s, p] : phi.entries()) {
    try {
      s.validate(m);
    } catch (const InvariantError& e) {
      report(Rule::Invalid, e.what());
    }
    if (!(p > 0.0)) {
      report(Rule::NonPositive, "structure " + structure_key(s) + " has non-positive probability " +
                                    std::to_string(p));
    }
  }

  const double deviation = phi.total() - 1.0;
  if (!(std::abs(deviation) <= kSumTolerance)) {
    std::ostringstream msg;
    msg << "structure probabilities sum to 1" << std::showpos << deviation;
    report(Rule::Sum, msg.str());
  }

  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  if (m >= 2 && phi.contains(StructureId::top(m - 1)) && phi.contains(StructureId::way(all))) {
    report(Rule::Overlap, "overlapping structures " + structure_key(StructureId::top(m - 1)) +
                              " and " + structure_key(StructureId::way(all)));
  }
  for (const auto& [s, p] : phi.entries()) {
    if (s.kind != StructureKind::Way || s.l != 2) continue;
    const StructureId twin = StructureId::choice(s.subset);
    if (phi.contains(twin)) {
      report(Rule::Overlap,
             "overlapping structures " + structure_key(s) + " and " + structure_key(twin));
    }
  }
  return result;
}

void validate_pl_params(const PLParams& theta, double floor) {
  if (theta.size() < 2) throw DimensionError("Plackett-Luce parameter needs m >= 2 entries");
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double v = theta[i];
    if (!std::isfinite(v) || v <= 0.0 || v < floor || v >= 1.0) {
      throw InvariantError("theta entry " + std::to_string(i + 1) + " = " + std::to_string(v) +
                           " outside the open unit interval (floor " + std::to_string(floor) + ")");
    }
  }
  if (std::abs(theta.sum() - 1.0) > kSumTolerance) {
    throw InvariantError("theta entries sum to " + std::to_string(theta.sum()));
  }
}

void MixtureParams::validate(double floor) const {
  if (k() < 1) throw DimensionError("mixture needs at least one component");
  if (components.cols() != k()) {
    throw DimensionError("alpha has " + std::to_string(k()) + " entries but there are " +
                         std::to_string(components.cols()) + " components");
  }
  for (int r = 0; r < k(); ++r) {
    if (!std::isfinite(alpha[r]) || alpha[r] <= 0.0 || alpha[r] < floor) {
      throw InvariantError("mixing coefficient " + std::to_string(r + 1) + " = " +
                           std::to_string(alpha[r]) + " is not positive");
    }
  }
  if (std::abs(alpha.sum() - 1.0) > kSumTolerance) {
    throw InvariantError("mixing coefficients sum to " + std::to_string(alpha.sum()));
  }
  for (int r = 0; r < k(); ++r) validate_pl_params(components.col(r), floor);
  if (phi) validate_structure_set(*phi, m()).throw_if_invalid();
}

MixtureParams single_pl(const PLParams& theta) {
  MixtureParams params;
  params.alpha = Eigen::VectorXd::Ones(1);
  params.components = theta;
  return params;
}

void Profile::validate() const {
  if (m < 2) throw DimensionError("profile needs m >= 2");
  for (const PartialOrder& o : orders) o.validate(m);
}

}  // namespace mixpl
