#pragma once

// Black-box access to a group through random labels. The verifier side only
// ever sees BlackBoxOracle and OracleOps; GroupOracle additionally exposes the
// label assignment for instance construction and tests.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qcma/group/explicit_group.hpp"
#include "qcma/rng.hpp"

namespace qcma::group {

using Label = std::uint64_t;

class BlackBoxOracle {
 public:
  virtual ~BlackBoxOracle() = default;

  virtual int label_bits() const = 0;
  /// All-ones n-bit string; never assigned to an element.
  Label invalid_label() const { return (Label(1) << label_bits()) - 1; }

  /// (l(x), l(y)) -> (l(x), l(x y^-1)); one query. Any invalid input yields
  /// (x, invalid_label()) and taints the oracle.
  std::pair<Label, Label> query(Label x, Label y) const;
  /// The same map without touching the counter, for simulating a
  /// superposition query whose cost the caller charges explicitly.
  virtual std::pair<Label, Label> simulate(Label x, Label y) const = 0;
  void charge(std::uint64_t queries) const { queries_.fetch_add(queries, std::memory_order_relaxed); }

  std::uint64_t queries() const { return queries_.load(std::memory_order_relaxed); }
  bool tainted() const { return tainted_.load(std::memory_order_relaxed); }

 protected:
  void taint() const { tainted_.store(true, std::memory_order_relaxed); }

 private:
  mutable std::atomic<std::uint64_t> queries_{0};
  mutable std::atomic<bool> tainted_{false};
};

class GroupOracle final : public BlackBoxOracle {
 public:
  /// Labels drawn uniformly without replacement from [0, 2^n - 1). Throws
  /// ValidationError unless 2^n >= 4 order and n <= 62.
  GroupOracle(std::shared_ptr<const ExplicitGroup> group, int label_bits, RngSeed seed);

  int label_bits() const override { return bits_; }
  std::pair<Label, Label> simulate(Label x, Label y) const override;

  /// Instance construction and tests only.
  Label label_of(Element e) const { return labels_.at(e); }
  std::optional<Element> element_of(Label l) const;
  const ExplicitGroup& hidden_group() const { return *group_; }

 private:
  std::shared_ptr<const ExplicitGroup> group_;
  int bits_;
  std::vector<Label> labels_;
  std::unordered_map<Label, Element> reverse_;
};

/// Smallest n with 2^n >= 4 order (at least 2).
int default_label_bits(std::uint32_t order);

inline std::shared_ptr<GroupOracle> make_group_oracle(std::shared_ptr<const ExplicitGroup> group, int label_bits,
                                                      RngSeed seed) {
  return std::make_shared<GroupOracle>(std::move(group), label_bits, seed);
}

struct TranscriptEntry {
  std::string step;
  std::string op;
  Label a = 0;
  Label b = 0;
  Label result = 0;
  std::uint64_t counter = 0;
};

/// Group operations built from oracle calls. The identity label is obtained
/// once at construction as the second output of O(l(a), l(a)) for a known
/// label a (one query); afterwards inverse costs one query and multiply two.
class OracleOps {
 public:
  OracleOps(const BlackBoxOracle& oracle, Label known_label);

  const BlackBoxOracle& oracle() const { return oracle_; }
  Label identity() const { return identity_; }
  Label invalid() const { return oracle_.invalid_label(); }

  Label inverse(Label a);
  Label multiply(Label a, Label b);
  /// l(a b^-1); one query.
  Label divide(Label a, Label b);

  /// Oracle calls issued through this object (counted or not).
  std::uint64_t calls() const { return calls_; }

  void set_step(std::string step) { step_ = std::move(step); }
  void record_transcript(bool on) { recording_ = on; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  /// CSV with header step,op,a,b,result,counter (labels in hex).
  std::string transcript_csv() const;

  /// While alive, calls go through BlackBoxOracle::simulate.
  class UncountedScope {
   public:
    explicit UncountedScope(OracleOps& ops) : ops_(ops), previous_(ops.counting_) { ops_.counting_ = false; }
    ~UncountedScope() { ops_.counting_ = previous_; }
    UncountedScope(const UncountedScope&) = delete;
    UncountedScope& operator=(const UncountedScope&) = delete;

   private:
    OracleOps& ops_;
    bool previous_;
  };

 private:
  std::pair<Label, Label> call(const char* op, Label x, Label y);

  const BlackBoxOracle& oracle_;
  Label identity_ = 0;
  std::uint64_t calls_ = 0;
  bool counting_ = true;
  bool recording_ = false;
  std::string step_ = "setup";
  std::vector<TranscriptEntry> transcript_;
};

inline Label oracle_inverse(OracleOps& ops, Label a) { return ops.inverse(a); }
inline Label oracle_multiply(OracleOps& ops, Label a, Label b) { return ops.multiply(a, b); }

std::string hex_label(Label l);
/// Parses hex (optionally 0x-prefixed); throws ValidationError.
Label parse_hex_label(const std::string& text);

}  // namespace qcma::group
