#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "qcma/group/explicit_group.hpp"
#include "qcma/group/group_oracle.hpp"
#include "qcma/group/homomorphism.hpp"
#include "qcma/errors.hpp"

namespace qcma::group {
namespace {

// Permutations of {0..n-1} in lexicographic order, built without the group table.
std::vector<std::vector<int>> all_perms(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[std::size_t(i)] = i;
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

int parity(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j];
  return inv % 2;
}

Element find_transposition(const ExplicitGroup& s4) {
  const auto perms = all_perms(4);
  for (Element a = 0; a < perms.size(); ++a) {
    int moved = 0;
    for (int i = 0; i < 4; ++i) moved += perms[a][std::size_t(i)] != i;
    if (moved == 2) return a;
  }
  return s4.identity();
}

TEST(ExplicitGroup, AxiomsAcrossCatalog) {
  for (const auto& d : std::vector<GroupDescriptor>{{Family::kCyclic, {1}},
                                                    {Family::kCyclic, {12}},
                                                    {Family::kDihedral, {7}},
                                                    {Family::kSymmetric, {4}},
                                                    {Family::kAlternating, {4}},
                                                    {Family::kProduct, {2, 4}},
                                                    {Family::kQuaternion, {}},
                                                    {Family::kSymmetric, {6}}}) {
    const auto g = ExplicitGroup::make(d);
    EXPECT_NO_THROW(g->verify_axioms()) << d.name();
    EXPECT_EQ(GroupDescriptor::from_name(d.name()), d);
  }
  EXPECT_EQ(ExplicitGroup::symmetric(6)->order(), 720u);
  EXPECT_EQ(ExplicitGroup::alternating(5)->order(), 60u);
  EXPECT_EQ(ExplicitGroup::dihedral(5)->order(), 10u);
  EXPECT_THROW(ExplicitGroup::cyclic(2001), ValidationError);
  EXPECT_THROW(ExplicitGroup::symmetric(7), ValidationError);
  EXPECT_THROW(GroupDescriptor::parse("W", {3}), ValidationError);
  EXPECT_THROW(GroupDescriptor::from_name("Zx"), ValidationError);
}

TEST(ExplicitGroup, TablesMatchDefinitions) {
  const auto z = ExplicitGroup::cyclic(9);
  for (Element a = 0; a < 9; ++a)
    for (Element b = 0; b < 9; ++b) EXPECT_EQ(z->multiply(a, b), (a + b) % 9);

  const auto p = ExplicitGroup::product(3, 4);
  for (Element a = 0; a < 12; ++a)
    for (Element b = 0; b < 12; ++b) {
      const Element c = p->multiply(a, b);
      EXPECT_EQ(c % 3, (a % 3 + b % 3) % 3);
      EXPECT_EQ(c / 3, (a / 3 + b / 3) % 4);
    }

  // D_n: r^a s^b with s r s = r^-1.
  const int n = 6;
  const auto d = ExplicitGroup::dihedral(n);
  const Element r = 1, s = Element(n);
  EXPECT_EQ(d->power(r, n), d->identity());
  EXPECT_EQ(d->multiply(s, s), d->identity());
  EXPECT_EQ(d->multiply(d->multiply(s, r), s), d->inverse(r));

  // Sign is a homomorphism under either composition order.
  const auto s4 = ExplicitGroup::symmetric(4);
  const auto perms = all_perms(4);
  for (Element a = 0; a < 24; ++a)
    for (Element b = 0; b < 24; ++b)
      EXPECT_EQ(parity(perms[s4->multiply(a, b)]), (parity(perms[a]) + parity(perms[b])) % 2);

  const auto q = ExplicitGroup::quaternion();
  // i^2 = j^2 = k^2 = ijk = -1.
  const Element minus_one = 1, i = 2, j = 4, k = 6;
  EXPECT_EQ(q->multiply(i, i), minus_one);
  EXPECT_EQ(q->multiply(j, j), minus_one);
  EXPECT_EQ(q->multiply(k, k), minus_one);
  EXPECT_EQ(q->multiply(q->multiply(i, j), k), minus_one);
}

TEST(ExplicitGroup, NormalSubgroups) {
  const auto s4 = ExplicitGroup::symmetric(4);
  std::multiset<std::size_t> sizes;
  for (const auto& n : s4->normal_subgroups()) sizes.insert(subgroup_size(n));
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{1, 4, 12, 24}));
  EXPECT_EQ(ExplicitGroup::cyclic(12)->normal_subgroups().size(), 6u);  // one per divisor
  EXPECT_EQ(ExplicitGroup::quaternion()->normal_subgroups().size(), 6u);
  EXPECT_EQ(ExplicitGroup::dihedral(4)->normal_subgroups().size(), 6u);
}

TEST(Membership, Examples) {
  const auto z6 = ExplicitGroup::cyclic(6);
  EXPECT_TRUE(model_membership(*z6, {2}, 0));
  EXPECT_TRUE(model_membership(*z6, {}, 0));
  EXPECT_FALSE(model_membership(*z6, {2}, 3));
  EXPECT_TRUE(model_membership(*z6, {2}, 4));

  const auto s4 = ExplicitGroup::symmetric(4);
  const ElementSet* a4 = nullptr;
  for (const auto& n : s4->normal_subgroups())
    if (subgroup_size(n) == 12) a4 = &n;
  ASSERT_NE(a4, nullptr);
  const auto perms = all_perms(4);
  for (Element a = 0; a < 24; ++a) EXPECT_EQ((*a4)[a], parity(perms[a]) == 0);
  EXPECT_FALSE(model_membership(*s4, members(*a4), find_transposition(*s4)));
  EXPECT_THROW(model_membership(*s4, {1}, 24), ValidationError);
}

TEST(GeneratingSet, Examples) {
  const auto z2 = ExplicitGroup::cyclic(2);
  EXPECT_EQ(efficient_generating_set(*z2, RngSeed{1}), (std::vector<Element>{1}));

  const auto z8 = ExplicitGroup::cyclic(8);
  EXPECT_TRUE(is_efficient_generating_set(*z8, {1, 2, 4}));
  std::set<Element> sums;
  for (int mask = 0; mask < 8; ++mask) sums.insert(Element(((mask & 1) + (mask & 2) + (mask & 4)) % 8));
  EXPECT_EQ(sums.size(), 8u);
  EXPECT_FALSE(is_efficient_generating_set(*z8, {2, 4}));
  EXPECT_EQ(canonical_decomposition(z8, {1, 2, 4}, 5), (std::vector<bool>{true, false, true}));
  EXPECT_EQ(canonical_decomposition(z8, {1, 2, 4}, 0), (std::vector<bool>{false, false, false}));

  const auto s4 = ExplicitGroup::symmetric(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto gens = efficient_generating_set(*s4, RngSeed{seed});
    EXPECT_LE(gens.size(), 20u);
    EXPECT_TRUE(is_efficient_generating_set(*s4, gens));
  }
  EXPECT_EQ(generating_set_bound(24), 20u);
  EXPECT_EQ(generating_set_bound(1), 1u);
}

TEST(GeneratingSet, CubeDecompositionRoundTripsAndIsLexLeast) {
  const auto s4 = ExplicitGroup::symmetric(4);
  const auto gens = efficient_generating_set(*s4, RngSeed{3});
  const CubeDecomposer dec(s4, gens);
  const std::size_t k = gens.size();
  for (Element g = 0; g < 24; ++g) {
    const auto bits = dec.decompose(g);
    EXPECT_EQ(dec.compose(bits), g);
    // Brute-force lexicographic minimum over the whole cube (e_1 most significant).
    std::vector<bool> best;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
      std::vector<bool> cand(k);
      for (std::size_t i = 0; i < k; ++i) cand[i] = (mask >> (k - 1 - i)) & 1U;
      if (dec.compose(cand) == g) {
        best = cand;
        break;
      }
    }
    EXPECT_EQ(bits, best);
  }
  const CubeDecomposer partial(ExplicitGroup::cyclic(8), {2});
  EXPECT_THROW(partial.decompose(1), ValidationError);
}

TEST(GroupOracle, Examples) {
  const auto z1 = ExplicitGroup::cyclic(1);
  GroupOracle o1(z1, 2, RngSeed{1});
  const Label e = o1.label_of(0);
  EXPECT_EQ(o1.query(e, e), std::make_pair(e, e));

  const auto z6 = ExplicitGroup::cyclic(6);
  GroupOracle o6(z6, default_label_bits(6), RngSeed{2});
  EXPECT_EQ(o6.query(o6.label_of(2), o6.label_of(5)).second, o6.label_of(3));
  EXPECT_EQ(o6.queries(), 1u);
  EXPECT_EQ(default_label_bits(6), 5);
  EXPECT_THROW(GroupOracle(z6, 4, RngSeed{1}), ValidationError);
}

TEST(GroupOracle, LabelsAreInjectiveAndAvoidTheInvalidString) {
  const auto g = ExplicitGroup::symmetric(5);
  GroupOracle o(g, 9, RngSeed{3});
  std::set<Label> seen;
  for (Element a = 0; a < g->order(); ++a) {
    const Label l = o.label_of(a);
    EXPECT_LT(l, o.invalid_label());
    EXPECT_TRUE(seen.insert(l).second);
    EXPECT_EQ(o.element_of(l), a);
  }
  EXPECT_FALSE(o.element_of(o.invalid_label()).has_value());
}

TEST(GroupOracle, InvalidLabelsTaint) {
  const auto g = ExplicitGroup::cyclic(5);
  GroupOracle o(g, 5, RngSeed{4});
  const auto out = o.query(o.label_of(1), o.invalid_label());
  EXPECT_EQ(out.first, o.label_of(1));
  EXPECT_EQ(out.second, o.invalid_label());
  EXPECT_TRUE(o.tainted());
}

TEST(GroupOracle, SecondSlotRoundTrip) {
  // Two applications with the same x give x y x^-1: y itself exactly when
  // the group is abelian.
  for (const auto& g : {ExplicitGroup::cyclic(24), ExplicitGroup::symmetric(4), ExplicitGroup::dihedral(6)}) {
    GroupOracle o(g, default_label_bits(g->order()), RngSeed{5});
    const bool abelian = g->descriptor().family == Family::kCyclic;
    int fixed = 0;
    for (Element x = 0; x < g->order(); ++x)
      for (Element y = 0; y < g->order(); ++y) {
        const Label lx = o.label_of(x), ly = o.label_of(y);
        const Label twice = o.simulate(lx, o.simulate(lx, ly).second).second;
        EXPECT_EQ(twice, o.label_of(g->conjugate(x, y)));
        fixed += twice == ly;
      }
    const int pairs = int(g->order() * g->order());
    if (abelian) {
      EXPECT_EQ(fixed, pairs);
    } else {
      EXPECT_LT(fixed, pairs);
    }
  }
}

TEST(GroupOracle, RelabelingIsAnIsomorphism) {
  const auto g = ExplicitGroup::symmetric(4);
  GroupOracle a(g, 7, RngSeed{6}), b(g, 7, RngSeed{7});
  for (Element x = 0; x < 24; ++x)
    for (Element y = 0; y < 24; ++y) {
      const Label out_a = a.simulate(a.label_of(x), a.label_of(y)).second;
      const Label out_b = b.simulate(b.label_of(x), b.label_of(y)).second;
      EXPECT_EQ(a.element_of(out_a), b.element_of(out_b));
    }
}

TEST(OracleOps, CostsAndExamples) {
  const auto s4 = ExplicitGroup::symmetric(4);
  GroupOracle o(s4, 7, RngSeed{8});
  OracleOps ops(o, o.label_of(5));
  EXPECT_EQ(ops.identity(), o.label_of(0));
  EXPECT_EQ(o.queries(), 1u);
  EXPECT_EQ(oracle_inverse(ops, ops.identity()), ops.identity());
  EXPECT_EQ(o.queries(), 2u);
  CounterRng rng(RngSeed{9});
  for (int t = 0; t < 50; ++t) {
    const auto a = Element(rng.below(24));
    const std::uint64_t before = o.queries();
    EXPECT_EQ(oracle_multiply(ops, o.label_of(a), o.label_of(s4->inverse(a))), ops.identity());
    EXPECT_EQ(o.queries() - before, 2u);
    const auto b = Element(rng.below(24));
    EXPECT_EQ(ops.multiply(o.label_of(a), o.label_of(b)), o.label_of(s4->multiply(a, b)));
    EXPECT_EQ(ops.inverse(o.label_of(a)), o.label_of(s4->inverse(a)));
  }
  {
    OracleOps::UncountedScope scope(ops);
    const std::uint64_t before = o.queries();
    ops.multiply(o.label_of(1), o.label_of(2));
    EXPECT_EQ(o.queries(), before);
  }
  EXPECT_EQ(parse_hex_label(hex_label(0xabc123)), 0xabc123u);
  EXPECT_EQ(parse_hex_label("0x1F"), 31u);
  EXPECT_THROW(parse_hex_label("zz"), ValidationError);
}

TEST(RawHom, HonestWitnessIsTheLabeling) {
  const auto z6 = ExplicitGroup::cyclic(6);
  GroupOracle o(z6, 5, RngSeed{10});
  OracleOps ops(o, o.label_of(1));
  const auto gens = efficient_generating_set(*z6, RngSeed{11});
  std::vector<Label> labels;
  for (Element g : gens) labels.push_back(o.label_of(g));
  RawHom f(z6, gens, labels, ops);
  for (Element g = 0; g < 6; ++g) EXPECT_EQ(f(g), o.label_of(g));
  EXPECT_EQ(f(0), ops.identity());
  EXPECT_THROW(RawHom(z6, gens, {}, ops), ValidationError);
}

TEST(RawHom, EvaluationCostBound) {
  const auto s4 = ExplicitGroup::symmetric(4);
  GroupOracle o(s4, 7, RngSeed{12});
  OracleOps ops(o, o.label_of(1));
  const auto gens = efficient_generating_set(*s4, RngSeed{13});
  std::vector<Label> labels;
  for (Element g : gens) labels.push_back(o.label_of(g));
  RawHom f(s4, gens, labels, ops);
  for (Element g = 0; g < 24; ++g) {
    const std::uint64_t before = o.queries();
    EXPECT_EQ(f(g), o.label_of(g));
    EXPECT_LE(o.queries() - before, f.max_eval_cost());
  }
}

TEST(HomomorphismTest, RandomImagesFail) {
  const auto s4 = ExplicitGroup::symmetric(4);
  int rejected = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    GroupOracle o(s4, 7, RngSeed{100 + t});
    OracleOps ops(o, o.label_of(1));
    CounterRng rng(RngSeed{t});
    const auto gens = efficient_generating_set(*s4, RngSeed{t});
    std::vector<Label> labels;
    for (std::size_t i = 0; i < gens.size(); ++i) labels.push_back(o.label_of(Element(rng.below(24))));
    RawHom f(s4, gens, labels, ops);
    rejected += !homomorphism_test([&](Element g) { return f(g); }, *s4, ops, kHomTestTrials, rng).accepted;
  }
  EXPECT_GE(rejected, 95);
}

TEST(HomomorphismTest, HonestAndTrivialMapsPass) {
  const auto s4 = ExplicitGroup::symmetric(4);
  GroupOracle o(s4, 7, RngSeed{14});
  OracleOps ops(o, o.label_of(1));
  CounterRng rng(RngSeed{15});
  for (int t = 0; t < 50; ++t) {
    EXPECT_TRUE(homomorphism_test([&](Element g) { return o.label_of(g); }, *s4, ops, kHomTestTrials, rng).accepted);
  }
  const Label e = ops.identity();
  EXPECT_TRUE(homomorphism_test([&](Element) { return e; }, *s4, ops, kHomTestTrials, rng).accepted);
}

TEST(HomomorphismTest, ThirtyPercentCorruptionIsRejected) {
  const auto z12 = ExplicitGroup::cyclic(12);
  int rejected = 0;
  double disagreement = 0.0;
  for (std::uint64_t run = 0; run < 200; ++run) {
    GroupOracle o(z12, 6, RngSeed{200 + run});
    OracleOps ops(o, o.label_of(1));
    CounterRng rng(RngSeed{run});
    std::vector<Label> table(12);
    for (Element g = 0; g < 12; ++g) table[g] = o.label_of(g);
    // Corrupt 4 of 12 values (about 30%) with labels of other elements.
    std::vector<Element> idx(12);
    for (Element g = 0; g < 12; ++g) idx[g] = g;
    for (std::size_t i = 0; i < 4; ++i) {
      std::swap(idx[i], idx[i + rng.below(12 - i)]);
      table[idx[i]] = o.label_of(Element((idx[i] + 1 + rng.below(11)) % 12));
    }
    std::vector<Element> el(12);
    for (Element g = 0; g < 12; ++g) el[g] = *o.element_of(table[g]);
    int bad = 0;
    for (Element x = 0; x < 12; ++x)
      for (Element y = 0; y < 12; ++y) bad += el[(x + y) % 12] != (el[x] + el[y]) % 12;
    disagreement += bad / 144.0;
    rejected += !homomorphism_test([&](Element g) { return table[g]; }, *z12, ops, kHomTestTrials, rng).accepted;
  }
  EXPECT_GE(disagreement / 200, 0.2);
  EXPECT_GE(rejected, 198);
}

TEST(CorrectedHom, UncorruptedMapIsUnchanged) {
  const auto z12 = ExplicitGroup::cyclic(12);
  GroupOracle o(z12, 6, RngSeed{16});
  OracleOps ops(o, o.label_of(1));
  RawHom f(z12, {1, 2, 4, 8}, {o.label_of(1), o.label_of(2), o.label_of(4), o.label_of(8)}, ops);
  CorrectedHom fc(f);
  CounterRng rng(RngSeed{17});
  for (Element g = 0; g < 12; ++g) EXPECT_EQ(fc(g, rng), o.label_of(g));
  EXPECT_EQ(fc.evaluations(), 12u);
  EXPECT_THROW(fc(12, rng), ValidationError);
  EXPECT_THROW(CorrectedHom(f, 0), ValidationError);
}

TEST(CorrectedHom, FifteenPercentCorruptionIsCorrected) {
  const auto z12 = ExplicitGroup::cyclic(12);
  int all_correct = 0;
  constexpr int kRuns = 500;
  for (std::uint64_t run = 0; run < kRuns; ++run) {
    GroupOracle o(z12, 6, RngSeed{300 + run});
    OracleOps ops(o, o.label_of(1));
    RawHom f(z12, {1, 2, 4, 8}, {o.label_of(1), o.label_of(2), o.label_of(4), o.label_of(8)}, ops);
    CounterRng rng(RngSeed{run});
    // Two of twelve values (about 15%) replaced by random valid labels.
    const auto a = Element(rng.below(12));
    const auto b = Element((a + 1 + rng.below(11)) % 12);
    f.pin(a, o.label_of(Element((a + 1 + rng.below(11)) % 12)));
    f.pin(b, o.label_of(Element((b + 1 + rng.below(11)) % 12)));
    CorrectedHom fc(f, 6);
    bool ok = true;
    for (Element g = 0; g < 12; ++g) ok = ok && fc(g, rng) == o.label_of(g);
    all_correct += ok;
  }
  EXPECT_GE(all_correct, kRuns * 99 / 100);
}

TEST(CorrectedHom, IndependentSeedsAgree) {
  const auto s4 = ExplicitGroup::symmetric(4);
  GroupOracle o(s4, 7, RngSeed{18});
  OracleOps ops(o, o.label_of(1));
  const auto gens = efficient_generating_set(*s4, RngSeed{19});
  std::vector<Label> labels;
  for (Element g : gens) labels.push_back(o.label_of(g));
  RawHom f(s4, gens, labels, ops);
  f.pin(7, o.label_of(3));
  CorrectedHom fc(f);
  CounterRng r1(RngSeed{20}), r2(RngSeed{21});
  for (Element g = 0; g < 24; ++g) EXPECT_EQ(fc(g, r1), fc(g, r2));
}

TEST(Kernel, IdentityEmbeddingIsTrivialInBothModes) {
  const auto z4 = ExplicitGroup::cyclic(4);
  GroupOracle o(z4, 4, RngSeed{22});
  OracleOps ops(o, o.label_of(1));
  RawHom f(z4, {1, 2}, {o.label_of(1), o.label_of(2)}, ops);
  CorrectedHom fc(f);
  CounterRng rng(RngSeed{23});
  for (auto mode : {KernelMode::kCosetSampling, KernelMode::kExhaustive}) {
    const auto r = kernel_triviality(fc, mode, rng);
    EXPECT_TRUE(r.trivial);
    EXPECT_EQ(subgroup_size(r.kernel), 1u);
  }
}

TEST(Kernel, ReductionModTwoHasKernelZeroTwo) {
  const auto z4 = ExplicitGroup::cyclic(4);
  const auto z2 = ExplicitGroup::cyclic(2);
  GroupOracle o(z2, 3, RngSeed{24});
  OracleOps ops(o, o.label_of(1));
  RawHom f(z4, {1, 2}, {o.label_of(1), o.label_of(0)}, ops);
  for (Element g = 0; g < 4; ++g) ASSERT_EQ(f(g), o.label_of(g % 2));
  CorrectedHom fc(f);
  CounterRng rng(RngSeed{25});
  const ElementSet want = {true, false, true, false};
  for (auto mode : {KernelMode::kCosetSampling, KernelMode::kExhaustive}) {
    for (int t = 0; t < 20; ++t) {
      const auto r = kernel_triviality(fc, mode, rng);
      EXPECT_FALSE(r.trivial);
      EXPECT_EQ(r.kernel, want);
    }
  }
}

TEST(Kernel, CosetSamplingChargesPolylogBudget) {
  for (const auto& g : {ExplicitGroup::cyclic(64), ExplicitGroup::symmetric(5), ExplicitGroup::dihedral(16)}) {
    GroupOracle o(g, default_label_bits(g->order()), RngSeed{26});
    OracleOps ops(o, o.label_of(1));
    const auto gens = efficient_generating_set(*g, RngSeed{27});
    std::vector<Label> labels;
    for (Element x : gens) labels.push_back(o.label_of(x));
    RawHom f(g, gens, labels, ops);
    CorrectedHom fc(f);
    CounterRng rng(RngSeed{28});
    const std::uint64_t before = o.queries();
    const auto r = kernel_triviality(fc, KernelMode::kCosetSampling, rng);
    EXPECT_TRUE(r.trivial);
    std::size_t l = 0;
    while ((1U << l) < g->order()) ++l;
    EXPECT_LE(r.corrected_evaluations, 50 * l * l);
    EXPECT_EQ(o.queries() - before, r.charged_queries);
    EXPECT_EQ(r.charged_queries, r.samples * fc.max_eval_cost());
  }
}

}  // namespace
}  // namespace qcma::group
