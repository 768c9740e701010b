#pragma once

// Domain types shared by every module. Alternatives are 0-based internally
// and 1-based in every external format (JSON, CLI, CSV).

#include <Eigen/Dense>

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixpl {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// A single Plackett-Luce parameter vector: positive entries summing to one.
using PLParams = Eigen::VectorXd;

inline constexpr double kSumTolerance = 1e-9;

enum class StructureKind { Top, Way, Choice };

std::string to_string(StructureKind kind);
StructureKind structure_kind_from_string(const std::string& name);

// (s, A'): the structure of a partial order. For Top the subset is implicitly
// the whole alternative set and is stored empty.
struct StructureId {
  StructureKind kind = StructureKind::Top;
  int l = 1;
  std::vector<int> subset;  // sorted, 0-based

  static StructureId top(int l);
  static StructureId way(std::vector<int> subset);
  static StructureId choice(std::vector<int> subset);

  // Throws InvariantError when the structure cannot exist over m alternatives.
  void validate(int m) const;

  auto operator<=>(const StructureId&) const = default;
  bool operator==(const StructureId&) const = default;
};

// Stable textual key: "top-2", "way-3:1,3,4", "choice-2:1,2" (1-based).
std::string structure_key(const StructureId& s);
StructureId parse_structure_key(const std::string& key);

class LinearOrder {
 public:
  LinearOrder() = default;
  explicit LinearOrder(std::vector<int> ranking);

  // Throws InvariantError unless the ranking is a permutation of 0..m-1.
  void validate(int m) const;

  int size() const { return static_cast<int>(ranking_.size()); }
  std::span<const int> ranking() const { return ranking_; }
  int operator[](int position) const { return ranking_[position]; }

  // positions()[a] is the rank (0 = best) of alternative a.
  std::vector<int> positions() const;

  bool operator==(const LinearOrder&) const = default;

 private:
  std::vector<int> ranking_;
};

// One observation: a ranked top-l prefix, an l-way ranking of a subset, or a
// choice from a subset. Value type; ordered so it can key maps.
class PartialOrder {
 public:
  static PartialOrder top(std::vector<int> ranked);
  static PartialOrder way(std::vector<int> ranked);
  static PartialOrder choice(std::vector<int> subset, int chosen);

  StructureKind kind() const { return kind_; }
  int size() const { return static_cast<int>(items_.size()); }

  // Ranked alternatives for Top/Way, the sorted subset for Choice.
  std::span<const int> items() const { return items_; }
  int chosen() const { return chosen_; }

  StructureId structure() const;

  // Range and length checks against m; distinctness is enforced on
  // construction. Throws InvariantError.
  void validate(int m) const;

  auto operator<=>(const PartialOrder&) const = default;
  bool operator==(const PartialOrder&) const = default;

 private:
  PartialOrder(StructureKind kind, std::vector<int> items, int chosen)
      : kind_(kind), items_(std::move(items)), chosen_(chosen) {}

  StructureKind kind_ = StructureKind::Top;
  std::vector<int> items_;
  int chosen_ = -1;
};

std::string to_string(const PartialOrder& o);

// Phi: allowed structures with their sampling probabilities.
class StructureDistribution {
 public:
  using Map = std::map<StructureId, double>;

  StructureDistribution() = default;
  explicit StructureDistribution(Map entries) : entries_(std::move(entries)) {}

  // Accumulates into an existing entry.
  void add(const StructureId& s, double probability);

  const Map& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool contains(const StructureId& s) const { return entries_.count(s) != 0; }
  double probability(const StructureId& s) const;  // 0 when absent
  double total() const;

 private:
  Map entries_;
};

struct StructureViolation {
  enum class Rule { Overlap, Sum, NonPositive, Invalid };
  Rule rule;
  std::string message;
};

struct StructureValidation {
  std::vector<StructureViolation> violations;

  bool ok() const { return violations.empty(); }
  // Throws the error type matching the first violation.
  void throw_if_invalid() const;
};

StructureValidation validate_structure_set(const StructureDistribution& phi, int m);

// (alpha, theta^(1..k), optional phi). Column r of `components` is theta^(r).
struct MixtureParams {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd components;
  std::optional<StructureDistribution> phi;

  int k() const { return static_cast<int>(alpha.size()); }
  int m() const { return static_cast<int>(components.rows()); }

  // Throws InvariantError or DimensionError; every alpha and theta entry must
  // be >= floor (and > 0 when floor == 0).
  void validate(double floor = 0.0) const;
};

MixtureParams single_pl(const PLParams& theta);

void validate_pl_params(const PLParams& theta, double floor = 0.0);

struct Profile {
  int m = 0;
  std::vector<PartialOrder> orders;

  void validate() const;
};

}  // namespace mixpl
