#include "qcma/group/group_oracle.hpp"

#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "qcma/errors.hpp"

namespace qcma::group {

std::pair<Label, Label> BlackBoxOracle::query(Label x, Label y) const {
  queries_.fetch_add(1, std::memory_order_relaxed);
  return simulate(x, y);
}

GroupOracle::GroupOracle(std::shared_ptr<const ExplicitGroup> group, int label_bits, RngSeed seed)
    : group_(std::move(group)), bits_(label_bits) {
  if (!group_) throw ValidationError("group oracle needs a group");
  if (label_bits < 2 || label_bits > 62) throw ValidationError("label width must lie in [2, 62]");
  if ((std::uint64_t(1) << label_bits) < 4ULL * group_->order()) {
    throw ValidationError("label width too small: need 2^n >= 4 * order");
  }
  CounterRng rng = CounterRng::stream(seed, {0x6c61626cULL, std::uint64_t(label_bits), group_->order()});
  const Label space = invalid_label();  // labels live in [0, 2^n - 1)
  labels_.resize(group_->order());
  reverse_.reserve(group_->order());
  for (Element e = 0; e < group_->order(); ++e) {
    Label l;
    do {
      l = rng.below(space);
    } while (reverse_.count(l));
    labels_[e] = l;
    reverse_.emplace(l, e);
  }
}

std::optional<Element> GroupOracle::element_of(Label l) const {
  auto it = reverse_.find(l);
  if (it == reverse_.end()) return std::nullopt;
  return it->second;
}

std::pair<Label, Label> GroupOracle::simulate(Label x, Label y) const {
  const auto ex = element_of(x);
  const auto ey = element_of(y);
  if (!ex || !ey) {
    taint();
    return {x, invalid_label()};
  }
  return {x, labels_[group_->multiply(*ex, group_->inverse(*ey))]};
}

int default_label_bits(std::uint32_t order) {
  int n = 2;
  while ((std::uint64_t(1) << n) < 4ULL * order) ++n;
  return n;
}

OracleOps::OracleOps(const BlackBoxOracle& oracle, Label known_label) : oracle_(oracle) {
  identity_ = call("identity", known_label, known_label).second;
}

std::pair<Label, Label> OracleOps::call(const char* op, Label x, Label y) {
  ++calls_;
  const auto out = counting_ ? oracle_.query(x, y) : oracle_.simulate(x, y);
  if (recording_) transcript_.push_back({step_, op, x, y, out.second, oracle_.queries()});
  return out;
}

Label OracleOps::inverse(Label a) { return call("inverse", identity_, a).second; }

Label OracleOps::divide(Label a, Label b) { return call("divide", a, b).second; }

Label OracleOps::multiply(Label a, Label b) {
  const Label b_inv = inverse(b);
  return call("multiply", a, b_inv).second;
}

std::string OracleOps::transcript_csv() const {
  std::ostringstream out;
  out << "step,op,a,b,result,counter\n";
  for (const auto& e : transcript_) {
    out << e.step << ',' << e.op << ',' << hex_label(e.a) << ',' << hex_label(e.b) << ',' << hex_label(e.result)
        << ',' << e.counter << '\n';
  }
  return out.str();
}

std::string hex_label(Label l) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(l));
  return buf;
}

Label parse_hex_label(const std::string& text) {
  std::string s = text;
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
  if (s.empty() || s.size() > 16) throw ValidationError("malformed hex label '" + text + "'");
  Label v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      throw ValidationError("malformed hex label '" + text + "'");
    }
    v = (v << 4) | Label(d);
  }
  return v;
}

}  // namespace qcma::group
