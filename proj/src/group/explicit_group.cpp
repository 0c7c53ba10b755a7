#include "qcma/group/explicit_group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "qcma/errors.hpp"

namespace qcma::group {

namespace {

std::uint32_t checked_order(long long order) {
  if (order < 1 || order > kMaxGroupOrder) {
    throw ValidationError("group order " + std::to_string(order) + " outside [1, " +
                          std::to_string(kMaxGroupOrder) + "]");
  }
  return std::uint32_t(order);
}

int require_param(const std::vector<int>& params, std::size_t count, const char* family) {
  if (params.size() != count) throw ValidationError(std::string(family) + " expects " + std::to_string(count) + " parameter(s)");
  for (int p : params) {
    if (p < 1) throw ValidationError(std::string(family) + " parameters must be positive");
  }
  return count > 0 ? params[0] : 0;
}

/// Permutations of {0..n-1} in lexicographic order, optionally only the even ones.
std::vector<std::vector<int>> permutations(int n, bool even_only) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    if (even_only) {
      int inversions = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) inversions += p[std::size_t(i)] > p[std::size_t(j)];
      }
      if (inversions % 2) continue;
    }
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<std::uint16_t> permutation_table(const std::vector<std::vector<int>>& perms) {
  std::map<std::vector<int>, std::uint16_t> rank;
  for (std::size_t i = 0; i < perms.size(); ++i) rank.emplace(perms[i], std::uint16_t(i));
  const std::size_t order = perms.size();
  std::vector<std::uint16_t> table(order * order);
  std::vector<int> c(perms.empty() ? 0 : perms[0].size());
  for (std::size_t a = 0; a < order; ++a) {
    for (std::size_t b = 0; b < order; ++b) {
      // (ab)(i) = a(b(i))
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = perms[a][std::size_t(perms[b][i])];
      table[a * order + b] = rank.at(c);
    }
  }
  return table;
}

}  // namespace

std::string GroupDescriptor::catalog_id() const {
  switch (family) {
    case Family::kCyclic: return "Z";
    case Family::kDihedral: return "D";
    case Family::kSymmetric: return "S";
    case Family::kAlternating: return "A";
    case Family::kProduct: return "ZxZ";
    case Family::kQuaternion: return "Q8";
  }
  return "?";
}

std::string GroupDescriptor::name() const {
  switch (family) {
    case Family::kProduct: return "Z" + std::to_string(params.at(0)) + "xZ" + std::to_string(params.at(1));
    case Family::kQuaternion: return "Q8";
    default: return catalog_id() + std::to_string(params.at(0));
  }
}

GroupDescriptor GroupDescriptor::parse(const std::string& id, const std::vector<int>& params) {
  GroupDescriptor d;
  d.params = params;
  if (id == "Z") {
    d.family = Family::kCyclic;
  } else if (id == "D") {
    d.family = Family::kDihedral;
  } else if (id == "S") {
    d.family = Family::kSymmetric;
  } else if (id == "A") {
    d.family = Family::kAlternating;
  } else if (id == "ZxZ") {
    d.family = Family::kProduct;
  } else if (id == "Q8") {
    d.family = Family::kQuaternion;
  } else {
    throw ValidationError("unknown catalog id '" + id + "'");
  }
  return d;
}

GroupDescriptor GroupDescriptor::from_name(const std::string& name) {
  auto number = [&](const std::string& digits) {
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 6) {
      throw ValidationError("malformed group name '" + name + "'");
    }
    return std::stoi(digits);
  };
  if (name == "Q8") return parse("Q8", {});
  if (name.empty()) throw ValidationError("empty group name");
  if (name[0] == 'Z') {
    const auto x = name.find("xZ");
    if (x != std::string::npos) return parse("ZxZ", {number(name.substr(1, x - 1)), number(name.substr(x + 2))});
  }
  return parse(name.substr(0, 1), {number(name.substr(1))});
}

ExplicitGroup::ExplicitGroup(GroupDescriptor descriptor, std::uint32_t order, std::vector<std::uint16_t> table)
    : descriptor_(std::move(descriptor)), order_(order), table_(std::move(table)), inverse_(order) {
  for (Element a = 0; a < order_; ++a) {
    for (Element b = 0; b < order_; ++b) {
      if (multiply(a, b) == identity()) {
        inverse_[a] = b;
        break;
      }
    }
  }
}

std::shared_ptr<const ExplicitGroup> ExplicitGroup::make(const GroupDescriptor& d) {
  std::shared_ptr<const ExplicitGroup> g;
  switch (d.family) {
    case Family::kCyclic: {
      const std::uint32_t n = checked_order(require_param(d.params, 1, "Z"));
      std::vector<std::uint16_t> t(std::size_t(n) * n);
      for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = 0; b < n; ++b) t[std::size_t(a) * n + b] = std::uint16_t((a + b) % n);
      }
      g.reset(new ExplicitGroup(d, n, std::move(t)));
      break;
    }
    case Family::kDihedral: {
      const int n = require_param(d.params, 1, "D");
      const std::uint32_t order = checked_order(2LL * n);
      std::vector<std::uint16_t> t(std::size_t(order) * order);
      for (std::uint32_t x = 0; x < order; ++x) {
        for (std::uint32_t y = 0; y < order; ++y) {
          const int a = int(x) % n, b = int(x) / n, c = int(y) % n, e = int(y) / n;
          // r^a s^b r^c s^e = r^(a + (-1)^b c) s^(b + e)
          const int rot = ((a + (b ? -c : c)) % n + n) % n;
          t[std::size_t(x) * order + y] = std::uint16_t(rot + n * ((b + e) % 2));
        }
      }
      g.reset(new ExplicitGroup(d, order, std::move(t)));
      break;
    }
    case Family::kSymmetric:
    case Family::kAlternating: {
      const int n = require_param(d.params, 1, d.family == Family::kSymmetric ? "S" : "A");
      if (n > 6) throw ValidationError("permutation groups are limited to degree 6");
      const auto perms = permutations(n, d.family == Family::kAlternating);
      const std::uint32_t order = checked_order(static_cast<long long>(perms.size()));
      g.reset(new ExplicitGroup(d, order, permutation_table(perms)));
      break;
    }
    case Family::kProduct: {
      require_param(d.params, 2, "ZxZ");
      const int a = d.params[0], b = d.params[1];
      const std::uint32_t order = checked_order(static_cast<long long>(a) * b);
      std::vector<std::uint16_t> t(std::size_t(order) * order);
      for (std::uint32_t x = 0; x < order; ++x) {
        for (std::uint32_t y = 0; y < order; ++y) {
          const int i = (int(x) % a + int(y) % a) % a;
          const int j = (int(x) / a + int(y) / a) % b;
          t[std::size_t(x) * order + y] = std::uint16_t(i + a * j);
        }
      }
      g.reset(new ExplicitGroup(d, order, std::move(t)));
      break;
    }
    case Family::kQuaternion: {
      require_param(d.params, 0, "Q8");
      // Basis unit u in {1, i, j, k} as 0..3 and sign s; id = 2 u + s.
      static constexpr int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
      static constexpr int sign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
      std::vector<std::uint16_t> t(64);
      for (int x = 0; x < 8; ++x) {
        for (int y = 0; y < 8; ++y) {
          const int ux = x / 2, uy = y / 2;
          const int s = (x % 2 + y % 2 + sign[ux][uy]) % 2;
          t[std::size_t(x * 8 + y)] = std::uint16_t(2 * unit[ux][uy] + s);
        }
      }
      g.reset(new ExplicitGroup(d, 8, std::move(t)));
      break;
    }
  }
  return g;
}

std::shared_ptr<const ExplicitGroup> ExplicitGroup::cyclic(int n) { return make({Family::kCyclic, {n}}); }
std::shared_ptr<const ExplicitGroup> ExplicitGroup::dihedral(int n) { return make({Family::kDihedral, {n}}); }
std::shared_ptr<const ExplicitGroup> ExplicitGroup::symmetric(int n) { return make({Family::kSymmetric, {n}}); }
std::shared_ptr<const ExplicitGroup> ExplicitGroup::alternating(int n) { return make({Family::kAlternating, {n}}); }
std::shared_ptr<const ExplicitGroup> ExplicitGroup::product(int a, int b) { return make({Family::kProduct, {a, b}}); }
std::shared_ptr<const ExplicitGroup> ExplicitGroup::quaternion() { return make({Family::kQuaternion, {}}); }

Element ExplicitGroup::power(Element a, std::uint64_t e) const {
  Element result = identity();
  Element base = a;
  while (e > 0) {
    if (e & 1U) result = multiply(result, base);
    base = multiply(base, base);
    e >>= 1;
  }
  return result;
}

std::string ExplicitGroup::element_name(Element a) const {
  if (!contains(a)) return "?";
  switch (descriptor_.family) {
    case Family::kDihedral: {
      const int n = descriptor_.params[0];
      return "r" + std::to_string(int(a) % n) + (int(a) / n ? "s" : "");
    }
    case Family::kProduct: {
      const int x = descriptor_.params[0];
      return "(" + std::to_string(int(a) % x) + "," + std::to_string(int(a) / x) + ")";
    }
    case Family::kQuaternion: {
      static const char* names[] = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
      return names[a];
    }
    case Family::kSymmetric:
    case Family::kAlternating: {
      const auto perms = permutations(descriptor_.params[0], descriptor_.family == Family::kAlternating);
      std::string s = "[";
      for (int v : perms[a]) s += std::to_string(v);
      return s + "]";
    }
    default: return std::to_string(a);
  }
}

void ExplicitGroup::verify_axioms(RngSeed seed) const {
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i] >= order_) throw ValidationError("table entry out of range");
  }
  for (Element a = 0; a < order_; ++a) {
    if (multiply(identity(), a) != a || multiply(a, identity()) != a) throw ValidationError("identity law fails");
    if (multiply(a, inverse(a)) != identity() || multiply(inverse(a), a) != identity()) {
      throw ValidationError("inverse law fails");
    }
  }
  auto assoc = [&](Element a, Element b, Element c) {
    if (multiply(multiply(a, b), c) != multiply(a, multiply(b, c))) {
      throw ValidationError("associativity fails");
    }
  };
  if (order_ <= 200) {
    for (Element a = 0; a < order_; ++a) {
      for (Element b = 0; b < order_; ++b) {
        for (Element c = 0; c < order_; ++c) assoc(a, b, c);
      }
    }
  } else {
    CounterRng rng(seed);
    for (int t = 0; t < 100000; ++t) {
      const auto a = Element(rng.below(order_)), b = Element(rng.below(order_)), c = Element(rng.below(order_));
      assoc(a, b, c);
    }
  }
}

ElementSet ExplicitGroup::closure(const std::vector<Element>& gens) const {
  ElementSet in(order_, false);
  in[identity()] = true;
  std::deque<Element> queue{identity()};
  while (!queue.empty()) {
    const Element a = queue.front();
    queue.pop_front();
    for (Element g : gens) {
      if (!contains(g)) throw ValidationError("generator id out of range");
      const Element b = multiply(a, g);
      if (!in[b]) {
        in[b] = true;
        queue.push_back(b);
      }
    }
  }
  return in;
}

const std::vector<ElementSet>& ExplicitGroup::normal_subgroups() const {
  std::call_once(normals_once_, [this] {
    // Conjugacy class of every element, as a representative list.
    std::vector<std::vector<Element>> classes;
    std::vector<bool> seen(order_, false);
    for (Element a = 0; a < order_; ++a) {
      if (seen[a]) continue;
      std::vector<Element> cls;
      for (Element g = 0; g < order_; ++g) {
        const Element c = conjugate(g, a);
        if (!seen[c]) {
          seen[c] = true;
          cls.push_back(c);
        }
      }
      classes.push_back(std::move(cls));
    }
    // Normal subgroups are exactly the closures of unions of classes; grow
    // from the trivial subgroup one class at a time.
    std::set<ElementSet> found;
    std::vector<std::pair<ElementSet, std::vector<Element>>> frontier;
    ElementSet trivial(order_, false);
    trivial[identity()] = true;
    found.insert(trivial);
    frontier.push_back({trivial, {}});
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      for (const auto& cls : classes) {
        if (frontier[f].first[cls.front()]) continue;
        std::vector<Element> gens = frontier[f].second;
        gens.insert(gens.end(), cls.begin(), cls.end());
        ElementSet next = closure(gens);
        if (found.insert(next).second) frontier.push_back({std::move(next), std::move(gens)});
      }
    }
    normals_.assign(found.begin(), found.end());
    std::stable_sort(normals_.begin(), normals_.end(), [](const ElementSet& a, const ElementSet& b) {
      return subgroup_size(a) < subgroup_size(b);
    });
  });
  return normals_;
}

std::size_t subgroup_size(const ElementSet& s) { return std::size_t(std::count(s.begin(), s.end(), true)); }

std::vector<Element> members(const ElementSet& s) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i]) out.push_back(Element(i));
  }
  return out;
}

bool model_membership(const ExplicitGroup& group, const std::vector<Element>& lambdas, Element z) {
  if (!group.contains(z)) throw ValidationError("element id out of range");
  return group.closure(lambdas)[z];
}

std::size_t generating_set_bound(std::uint32_t order) {
  std::size_t l = 0;
  while ((std::uint64_t(1) << l) < order) ++l;
  return std::max<std::size_t>(1, 4 * l);
}

namespace {

ElementSet extend_cube(const ExplicitGroup& group, const ElementSet& cube, Element g) {
  ElementSet next = cube;
  for (Element a = 0; a < group.order(); ++a) {
    if (cube[a]) next[group.multiply(a, g)] = true;
  }
  return next;
}

}  // namespace

bool is_efficient_generating_set(const ExplicitGroup& group, const std::vector<Element>& gens) {
  if (gens.size() > generating_set_bound(group.order())) return false;
  ElementSet cube(group.order(), false);
  cube[group.identity()] = true;
  for (Element g : gens) {
    if (!group.contains(g)) return false;
    cube = extend_cube(group, cube, g);
  }
  return subgroup_size(cube) == group.order();
}

std::vector<Element> efficient_generating_set(const ExplicitGroup& group, RngSeed seed) {
  const std::size_t bound = generating_set_bound(group.order());
  for (std::uint64_t round = 0; round < 100; ++round) {
    CounterRng rng = CounterRng::stream(seed, {0x676e73ULL, round});
    ElementSet cube(group.order(), false);
    cube[group.identity()] = true;
    std::size_t size = 1;
    std::vector<Element> gens;
    std::uint64_t draws = 0;
    while (size < group.order() && gens.size() < bound && draws < 64ULL * group.order()) {
      ++draws;
      const auto g = Element(rng.below(group.order()));
      ElementSet next = extend_cube(group, cube, g);
      const std::size_t next_size = subgroup_size(next);
      if (next_size > size) {
        cube = std::move(next);
        size = next_size;
        gens.push_back(g);
      }
    }
    if (size == group.order()) return gens;
  }
  throw ValidationError("no efficient generating set found within 100 rounds");
}

CubeDecomposer::CubeDecomposer(std::shared_ptr<const ExplicitGroup> group, std::vector<Element> gens)
    : group_(std::move(group)), gens_(std::move(gens)) {
  const std::size_t k = gens_.size();
  suffix_.assign(k + 1, ElementSet(group_->order(), false));
  suffix_[k][group_->identity()] = true;
  for (std::size_t i = k; i-- > 0;) {
    if (!group_->contains(gens_[i])) throw ValidationError("generator id out of range");
    suffix_[i] = suffix_[i + 1];
    for (Element a = 0; a < group_->order(); ++a) {
      if (suffix_[i + 1][a]) suffix_[i][group_->multiply(gens_[i], a)] = true;
    }
  }
}

std::vector<bool> CubeDecomposer::decompose(Element gamma) const {
  if (!group_->contains(gamma) || !suffix_[0][gamma]) {
    throw ValidationError("element " + std::to_string(gamma) + " is not reachable from the generating set");
  }
  std::vector<bool> bits(gens_.size(), false);
  Element prefix = group_->identity();
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    const Element rest = group_->multiply(group_->inverse(prefix), gamma);
    if (suffix_[i + 1][rest]) continue;
    bits[i] = true;
    prefix = group_->multiply(prefix, gens_[i]);
  }
  return bits;
}

Element CubeDecomposer::compose(const std::vector<bool>& bits) const {
  if (bits.size() != gens_.size()) throw ValidationError("one exponent bit per generator");
  Element out = group_->identity();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out = group_->multiply(out, gens_[i]);
  }
  return out;
}

}  // namespace qcma::group
