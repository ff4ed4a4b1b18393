#include "logiclab/nat.hpp"

namespace logiclab {

Nat pair(const Nat& a, const Nat& b) {
  Nat s = a + b;
  return s * (s + 1) / 2 + b;
}

std::pair<Nat, Nat> unpair(const Nat& z) {
  if (z < 0) throw CodingError("unpair: negative");
  Nat w = (sqrt(8 * z + 1) - 1) / 2;
  Nat b = z - w * (w + 1) / 2;
  return {w - b, b};
}

static size_t bitlen(const Nat& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

bool stream_empty(const Nat& s) {
  if (s < 1) throw CodingError("stream: bad value");
  return s == 1;
}

Nat stream_cons(const Nat& token, const Nat& stream) {
  if (stream < 1 || token < 0) throw CodingError("stream_cons: bad input");
  Nat m = token + 1;
  size_t L = bitlen(m);          // gamma(m) occupies 2L-1 bits, value m
  size_t payload_len = bitlen(stream) - 1;
  Nat payload = stream;
  mpz_clrbit(payload.get_mpz_t(), payload_len);  // strip sentinel
  Nat out = m;
  mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), payload_len);
  out += payload;
  mpz_setbit(out.get_mpz_t(), payload_len + 2 * L - 1);  // new sentinel
  return out;
}

std::pair<Nat, Nat> stream_uncons(const Nat& stream) {
  if (stream <= 1) throw CodingError("stream_uncons: empty");
  size_t payload_len = bitlen(stream) - 1;
  Nat payload = stream;
  mpz_clrbit(payload.get_mpz_t(), payload_len);
  if (payload == 0) throw CodingError("stream_uncons: zero-run payload");
  size_t h = bitlen(payload) - 1;      // first 1 bit from the front
  size_t zeros = payload_len - 1 - h;
  size_t L = zeros + 1;
  size_t enc_len = 2 * L - 1;
  if (enc_len > payload_len) throw CodingError("stream_uncons: truncated token");
  size_t rest_len = payload_len - enc_len;
  Nat m = payload;
  mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), rest_len);
  Nat rest = payload;
  mpz_fdiv_r_2exp(rest.get_mpz_t(), rest.get_mpz_t(), rest_len);
  mpz_setbit(rest.get_mpz_t(), rest_len);
  return {m - 1, rest};
}

Nat tokens_to_stream(const std::vector<Nat>& tokens) {
  // One pass over a bit buffer instead of repeated cons: folding would shift
  // the whole accumulator once per token, which is quadratic in the result.
  size_t total = 1;
  for (const Nat& t : tokens) {
    if (t < 0) throw CodingError("stream_cons: bad input");
    total += 2 * bitlen(t + 1) - 1;
  }
  const size_t nbytes = (total + 7) / 8;
  std::vector<unsigned char> buf(nbytes, 0);
  const size_t pad = nbytes * 8 - total;
  auto set_bit = [&](size_t k) {  // k-th bit counted from the top
    const size_t p = pad + k;
    buf[p / 8] |= static_cast<unsigned char>(1u << (7 - p % 8));
  };
  set_bit(0);  // sentinel
  size_t at = 1;
  for (const Nat& t : tokens) {
    const Nat m = t + 1;
    const size_t L = bitlen(m);
    const size_t fl = 2 * L - 1;
    for (size_t i = 0; i < L; ++i)
      if (mpz_tstbit(m.get_mpz_t(), L - 1 - i)) set_bit(at + (fl - L) + i);
    at += fl;
  }
  Nat out;
  mpz_import(out.get_mpz_t(), nbytes, 1, 1, 0, 0, buf.data());
  return out;
}

std::vector<Nat> stream_to_tokens(Nat stream) {
  if (stream < 1) throw CodingError("stream: bad value");
  const size_t total = bitlen(stream);
  auto bit_at = [&](size_t i) {  // i-th bit counted from the top
    return mpz_tstbit(stream.get_mpz_t(), total - 1 - i) != 0;
  };
  std::vector<Nat> out;
  size_t k = 1;
  while (k < total) {
    size_t zeros = 0;
    while (k + zeros < total && !bit_at(k + zeros)) ++zeros;
    if (k + zeros == total) throw CodingError("stream_uncons: zero-run payload");
    const size_t L = zeros + 1;
    const size_t fl = 2 * L - 1;
    if (k + fl > total) throw CodingError("stream_uncons: truncated token");
    Nat m = 0;
    for (size_t i = 0; i < L; ++i) {
      m <<= 1;
      if (bit_at(k + zeros + i)) m += 1;
    }
    out.push_back(m - 1);
    k += fl;
  }
  return out;
}

std::uint64_t to_u64(const Nat& n) {
  if (n < 0 || !n.fits_ulong_p()) {
    if (n < 0 || bitlen(n) > 64) throw CodingError("to_u64: out of range");
  }
  std::uint64_t out = 0;
  Nat v = n;
  for (int i = 0; i < 64 && v != 0; i += 32) {
    out |= static_cast<std::uint64_t>(mpz_get_ui(v.get_mpz_t()) & 0xffffffffu) << i;
    mpz_fdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), 32);
  }
  return out;
}

std::size_t nat_hash(const Nat& n) {
  // FNV-1a over the limb bytes; stable within a run, which is all callers need.
  std::size_t h = 1469598103934665603ull;
  size_t count = 0;
  const void* raw = mpz_export(nullptr, &count, -1, 1, 0, 0, n.get_mpz_t());
  const unsigned char* bytes = static_cast<const unsigned char*>(raw);
  for (size_t i = 0; i < count; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  void (*freefn)(void*, size_t) = nullptr;
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  if (raw) freefn(const_cast<void*>(raw), count);
  return h;
}

}  // namespace logiclab
