#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace logiclab {

// Unbounded natural. Negative values are never constructed; helpers throw if one shows up.
using Nat = mpz_class;

struct CodingError : std::runtime_error {
  explicit CodingError(const std::string& what) : std::runtime_error(what) {}
};

// Cantor pairing (a+b)(a+b+1)/2 + b, a bijection N^2 -> N. pair(0,0)=0, pair(2,1)=7.
Nat pair(const Nat& a, const Nat& b);
std::pair<Nat, Nat> unpair(const Nat& z);

// Token streams, coding v1: each token t contributes Elias-gamma(t+1); the stream value
// is the concatenated bit string behind a leading sentinel 1. Empty stream = 1.
// Linear growth in total token bits, and cons/uncons touch only the front.
inline const Nat kEmptyStream = 1;

bool stream_empty(const Nat& s);
Nat stream_cons(const Nat& token, const Nat& stream);
// Pre: stream nonempty and well formed.
std::pair<Nat, Nat> stream_uncons(const Nat& stream);
Nat tokens_to_stream(const std::vector<Nat>& tokens);
std::vector<Nat> stream_to_tokens(Nat stream);

// Throws CodingError when n does not fit.
std::uint64_t to_u64(const Nat& n);

std::size_t nat_hash(const Nat& n);

struct NatHash {
  std::size_t operator()(const Nat& n) const { return nat_hash(n); }
};

}  // namespace logiclab
