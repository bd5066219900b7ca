#include "k2/oracle.hpp"

#include <utility>

#include "k2/errors.hpp"
#include "k2/seq_code.hpp"

namespace k2 {

Oracle::Oracle(std::shared_ptr<const OracleImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw ValidationError("null oracle");
}

Nat Oracle::on_sequence(std::span<const Nat> seq) const {
  if (auto fast = impl_->at_sequence(seq)) return *std::move(fast);
  return impl_->at(encode_sequence(seq));
}

std::vector<Nat> Oracle::prefix(std::size_t n) const {
  std::vector<Nat> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back((*this)(i));
  return out;
}

namespace {

class ConstantOracle final : public OracleImpl {
 public:
  explicit ConstantOracle(Nat v) : value_(std::move(v)) {}
  Nat at(const Nat&) const override { return value_; }
  std::optional<Nat> at_sequence(std::span<const Nat>) const override { return value_; }
  std::string describe() const override { return "const:" + value_.get_str(); }

 private:
  Nat value_;
};

class IdentityOracle final : public OracleImpl {
 public:
  Nat at(const Nat& k) const override { return k; }
  std::string describe() const override { return "identity"; }
};

class TableOracle final : public OracleImpl {
 public:
  TableOracle(std::map<Nat, Nat> table, Oracle tail) : table_(std::move(table)), tail_(std::move(tail)) {}

  Nat at(const Nat& k) const override {
    auto it = table_.find(k);
    return it != table_.end() ? it->second : tail_(k);
  }

  std::optional<Nat> at_sequence(std::span<const Nat> seq) const override {
    if (!table_.empty()) return std::nullopt;
    return tail_.on_sequence(seq);
  }

  std::string describe() const override {
    return "table[" + std::to_string(table_.size()) + "]+" + tail_.describe();
  }

 private:
  std::map<Nat, Nat> table_;
  Oracle tail_;
};

class FunctionOracle final : public OracleImpl {
 public:
  FunctionOracle(std::function<Nat(const Nat&)> fn, std::string description)
      : fn_(std::move(fn)), description_(std::move(description)) {}
  Nat at(const Nat& k) const override { return fn_(k); }
  std::string describe() const override { return description_; }

 private:
  std::function<Nat(const Nat&)> fn_;
  std::string description_;
};

class SequenceOracle final : public OracleImpl {
 public:
  SequenceOracle(std::function<Nat(std::span<const Nat>)> fn, std::string description)
      : fn_(std::move(fn)), description_(std::move(description)) {}
  Nat at(const Nat& k) const override {
    auto seq = decode_sequence(k);
    return fn_(seq);
  }
  std::optional<Nat> at_sequence(std::span<const Nat> seq) const override { return fn_(seq); }
  std::string describe() const override { return description_; }

 private:
  std::function<Nat(std::span<const Nat>)> fn_;
  std::string description_;
};

class TrackingOracle final : public OracleImpl {
 public:
  TrackingOracle(Oracle inner, std::shared_ptr<UsageMeter> meter)
      : inner_(std::move(inner)), meter_(std::move(meter)) {}

  Nat at(const Nat& k) const override {
    Nat v = inner_(k);
    meter_->note(k, v);
    return v;
  }

  std::optional<Nat> at_sequence(std::span<const Nat> seq) const override {
    Nat v = inner_.on_sequence(seq);
    meter_->note(encode_sequence(seq), v);
    return v;
  }

  std::string describe() const override { return "tracked(" + inner_.describe() + ")"; }

 private:
  Oracle inner_;
  std::shared_ptr<UsageMeter> meter_;
};

}  // namespace

Oracle constant_oracle(const Nat& value) { return Oracle(std::make_shared<ConstantOracle>(value)); }

Oracle identity_oracle() { return Oracle(std::make_shared<IdentityOracle>()); }

Oracle table_oracle(std::map<Nat, Nat> table, Oracle tail) {
  return Oracle(std::make_shared<TableOracle>(std::move(table), std::move(tail)));
}

Oracle function_oracle(std::function<Nat(const Nat&)> fn, std::string description) {
  return Oracle(std::make_shared<FunctionOracle>(std::move(fn), std::move(description)));
}

Oracle sequence_oracle(std::function<Nat(std::span<const Nat>)> fn, std::string description) {
  return Oracle(std::make_shared<SequenceOracle>(std::move(fn), std::move(description)));
}

void UsageMeter::note(const Nat& index, const Nat& value) {
  if (queries == 0 || index > max_index) max_index = index;
  ++queries;
  transcript.emplace(index, value);
}

TrackedOracle with_usage_tracking(Oracle f) {
  auto meter = std::make_shared<UsageMeter>();
  Oracle wrapped(std::make_shared<TrackingOracle>(std::move(f), meter));
  return {std::move(wrapped), std::move(meter)};
}

}  // namespace k2
