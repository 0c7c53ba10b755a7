#pragma once

// Explicit finite groups given by a full multiplication table over ids
// 0..order-1 (id 0 is always the identity), the parameterized catalog they
// are built from, and the table-side tools the verifier needs: subgroup
// closure, normal subgroup enumeration, cube generating sets and canonical
// cube decompositions.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qcma/rng.hpp"

namespace qcma::group {

using Element = std::uint32_t;

inline constexpr std::uint32_t kMaxGroupOrder = 2000;

enum class Family {
  kCyclic,       // Z_n, params {n}
  kDihedral,     // D_n of order 2n, params {n}; id a + n b is r^a s^b
  kSymmetric,    // S_n, params {n}; ids are lexicographic permutation ranks
  kAlternating,  // A_n, params {n}; ids rank the even permutations lexicographically
  kProduct,      // Z_a x Z_b, params {a, b}; id i + a j is (i, j)
  kQuaternion,   // Q_8, no params; ids 1, -1, i, -i, j, -j, k, -k
};

struct GroupDescriptor {
  Family family = Family::kCyclic;
  std::vector<int> params;

  /// Short catalog id: "Z", "D", "S", "A", "ZxZ", "Q8".
  std::string catalog_id() const;
  /// e.g. "S4", "Z2xZ4", "D8", "Q8".
  std::string name() const;
  static GroupDescriptor parse(const std::string& catalog_id, const std::vector<int>& params);
  /// Accepts the output of name().
  static GroupDescriptor from_name(const std::string& name);

  friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;
};

/// A subgroup as a membership mask over element ids.
using ElementSet = std::vector<bool>;

class ExplicitGroup {
 public:
  /// Builds the table; throws ValidationError on unsupported parameters or
  /// orders above kMaxGroupOrder.
  static std::shared_ptr<const ExplicitGroup> make(const GroupDescriptor& descriptor);
  static std::shared_ptr<const ExplicitGroup> cyclic(int n);
  static std::shared_ptr<const ExplicitGroup> dihedral(int n);
  static std::shared_ptr<const ExplicitGroup> symmetric(int n);
  static std::shared_ptr<const ExplicitGroup> alternating(int n);
  static std::shared_ptr<const ExplicitGroup> product(int a, int b);
  static std::shared_ptr<const ExplicitGroup> quaternion();

  const GroupDescriptor& descriptor() const { return descriptor_; }
  std::uint32_t order() const { return order_; }
  static constexpr Element identity() { return 0; }

  Element multiply(Element a, Element b) const { return table_[std::size_t(a) * order_ + b]; }
  Element inverse(Element a) const { return inverse_[a]; }
  Element power(Element a, std::uint64_t e) const;
  /// a b a^-1.
  Element conjugate(Element a, Element b) const { return multiply(multiply(a, b), inverse(a)); }
  bool contains(Element a) const { return a < order_; }

  /// Permutation image list for symmetric/alternating ids, for display.
  std::string element_name(Element a) const;

  /// Checks closure, identity, inverses and associativity (exhaustively up to
  /// order 200, on 10^5 random triples above). Throws ValidationError.
  void verify_axioms(RngSeed seed = RngSeed{7}) const;

  /// Subgroup generated by `gens` (breadth-first closure).
  ElementSet closure(const std::vector<Element>& gens) const;

  /// All normal subgroups, sorted by size then lexicographically; computed
  /// once and cached.
  const std::vector<ElementSet>& normal_subgroups() const;

 private:
  ExplicitGroup(GroupDescriptor descriptor, std::uint32_t order, std::vector<std::uint16_t> table);

  GroupDescriptor descriptor_;
  std::uint32_t order_;
  std::vector<std::uint16_t> table_;
  std::vector<Element> inverse_;
  mutable std::once_flag normals_once_;
  mutable std::vector<ElementSet> normals_;
};

std::size_t subgroup_size(const ElementSet& s);
std::vector<Element> members(const ElementSet& s);

/// Membership of z in <lambdas> computed on the table; no oracle involved.
bool model_membership(const ExplicitGroup& group, const std::vector<Element>& lambdas, Element z);

/// max(1, 4 ceil(log2 order)).
std::size_t generating_set_bound(std::uint32_t order);

/// True when every element is gamma_1^e_1 ... gamma_k^e_k for some bits and
/// k respects generating_set_bound (exhaustive cube expansion).
bool is_efficient_generating_set(const ExplicitGroup& group, const std::vector<Element>& gens);

/// Random cube doubling: append a uniform element whenever it enlarges the
/// cube, restarting when k would exceed the bound. Throws ValidationError
/// after 100 failed rounds.
std::vector<Element> efficient_generating_set(const ExplicitGroup& group, RngSeed seed);

/// Lexicographically least exponent bits (e_1 first, 0 before 1) whose
/// ordered product of generators equals each element; built once over the cube.
class CubeDecomposer {
 public:
  CubeDecomposer(std::shared_ptr<const ExplicitGroup> group, std::vector<Element> gens);

  const std::vector<Element>& gens() const { return gens_; }
  /// Throws ValidationError when gamma is not in the cube.
  std::vector<bool> decompose(Element gamma) const;
  /// Ordered product of the selected generators.
  Element compose(const std::vector<bool>& bits) const;

 private:
  std::shared_ptr<const ExplicitGroup> group_;
  std::vector<Element> gens_;
  std::vector<ElementSet> suffix_;  // suffix_[i]: products of gens i..k-1
};

inline std::vector<bool> canonical_decomposition(std::shared_ptr<const ExplicitGroup> group,
                                                 const std::vector<Element>& gens, Element gamma) {
  return CubeDecomposer(std::move(group), gens).decompose(gamma);
}

}  // namespace qcma::group
