#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace divht {

using ZMatrix = std::vector<std::vector<mpz_class>>;

// fraction-free elimination; good when entries are few but large
mpz_class det_bareiss(ZMatrix a);

// multimodular with a rigorous row-norm bound; good for many small entries
mpz_class det_crt(const ZMatrix& a);

mpz_class det_auto(const ZMatrix& a);

// ceil(log2(L1 norm of the row)) + 1, used to size CRT moduli
unsigned long row_bound_bits(const std::vector<mpz_class>& row);

namespace modp {

// primes just below 2^62, generated on demand and cached
uint64_t prime(std::size_t index);

uint64_t reduce(const mpz_class& z, uint64_t p);  // representative in [0, p)
uint64_t add(uint64_t a, uint64_t b, uint64_t p);
uint64_t sub(uint64_t a, uint64_t b, uint64_t p);
uint64_t mul(uint64_t a, uint64_t b, uint64_t p);
uint64_t pow(uint64_t a, uint64_t e, uint64_t p);
uint64_t inv(uint64_t a, uint64_t p);

// precomputed factor for repeated multiplication by w mod p (p < 2^63)
struct FixedMul {
  uint64_t w = 0;
  uint64_t wshoup = 0;
  FixedMul() = default;
  FixedMul(uint64_t w_, uint64_t p);
  uint64_t apply(uint64_t a, uint64_t p) const;
};

// in-place elimination; returns det mod p
uint64_t det_mod(std::vector<std::vector<uint64_t>>& a, uint64_t p);

}  // namespace modp

// incremental Chinese remaindering with symmetric lift
struct CrtAccumulator {
  mpz_class modulus = 1;
  mpz_class value = 0;
  void absorb(uint64_t residue, uint64_t p);
  mpz_class symmetric() const;  // representative in (-modulus/2, modulus/2]
};

}  // namespace divht
