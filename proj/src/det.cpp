#include "divht/det.hpp"

#include <mutex>

#include "divht/errors.hpp"

namespace divht {

mpz_class det_bareiss(ZMatrix a) {
  std::size_t n = a.size();
  if (n == 0) return 1;
  for (const auto& row : a)
    if (row.size() != n) throw InternalError("det of non-square matrix");
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; k++) {
    // choose the smallest nonzero pivot in the column to limit growth
    std::size_t best = n;
    std::size_t best_bits = 0;
    for (std::size_t i = k; i < n; i++) {
      if (a[i][k] == 0) continue;
      std::size_t bits = mpz_sizeinbase(a[i][k].get_mpz_t(), 2);
      if (best == n || bits < best_bits) {
        best = i;
        best_bits = bits;
      }
    }
    if (best == n) return 0;
    if (best != k) {
      std::swap(a[best], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; i++) {
      for (std::size_t j = k + 1; j < n; j++) {
        a[i][j] = a[k][k] * a[i][j] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(),
                     prev.get_mpz_t());
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign > 0 ? a[n - 1][n - 1] : mpz_class(-a[n - 1][n - 1]);
}

unsigned long row_bound_bits(const std::vector<mpz_class>& row) {
  mpz_class l1 = 0;
  for (const auto& e : row) l1 += abs(e);
  if (l1 <= 1) return 1;
  return mpz_sizeinbase(l1.get_mpz_t(), 2) + 1;
}

namespace modp {

namespace {
std::vector<uint64_t>& prime_cache() {
  static std::vector<uint64_t> cache;
  return cache;
}
std::mutex prime_mutex;
}  // namespace

uint64_t prime(std::size_t index) {
  std::lock_guard<std::mutex> lock(prime_mutex);
  auto& cache = prime_cache();
  while (cache.size() <= index) {
    mpz_class p = cache.empty() ? mpz_class(mpz_class(1) << 62)
                                : mpz_class(cache.back());
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    cache.push_back(mpz_get_ui(p.get_mpz_t()));
  }
  return cache[index];
}

uint64_t reduce(const mpz_class& z, uint64_t p) {
  return mpz_fdiv_ui(z.get_mpz_t(), p);
}

uint64_t add(uint64_t a, uint64_t b, uint64_t p) {
  uint64_t r = a + b;
  return r >= p ? r - p : r;
}

uint64_t sub(uint64_t a, uint64_t b, uint64_t p) {
  return a >= b ? a - b : a + p - b;
}

uint64_t mul(uint64_t a, uint64_t b, uint64_t p) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

uint64_t pow(uint64_t a, uint64_t e, uint64_t p) {
  uint64_t r = 1;
  uint64_t base = a % p;
  while (e > 0) {
    if (e & 1) r = mul(r, base, p);
    base = mul(base, base, p);
    e >>= 1;
  }
  return r;
}

uint64_t inv(uint64_t a, uint64_t p) {
  if (a % p == 0) throw InternalError("inverse of zero residue");
  return pow(a, p - 2, p);
}

FixedMul::FixedMul(uint64_t w_, uint64_t p) : w(w_) {
  wshoup = static_cast<uint64_t>(
      (static_cast<unsigned __int128>(w) << 64) / p);
}

uint64_t FixedMul::apply(uint64_t a, uint64_t p) const {
  uint64_t q = static_cast<uint64_t>(
      (static_cast<unsigned __int128>(wshoup) * a) >> 64);
  uint64_t r = w * a - q * p;  // in [0, 2p) for p < 2^63
  return r >= p ? r - p : r;
}

uint64_t det_mod(std::vector<std::vector<uint64_t>>& a, uint64_t p) {
  std::size_t n = a.size();
  if (n == 0) return 1;
  uint64_t det = 1;
  bool neg = false;
  for (std::size_t k = 0; k + 1 < n; k++) {
    std::size_t piv = n;
    for (std::size_t i = k; i < n; i++)
      if (a[i][k] % p != 0) {
        piv = i;
        break;
      }
    if (piv == n) return 0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      neg = !neg;
    }
    uint64_t pk = a[k][k] % p;
    det = mul(det, pk, p);
    uint64_t pk_inv = inv(pk, p);
    for (std::size_t i = k + 1; i < n; i++) {
      uint64_t lead = a[i][k] % p;
      if (lead == 0) continue;
      FixedMul f(mul(lead, pk_inv, p), p);
      uint64_t* ri = a[i].data();
      const uint64_t* rk = a[k].data();
      for (std::size_t j = k; j < n; j++)
        ri[j] = sub(ri[j], f.apply(rk[j], p), p);
    }
  }
  det = mul(det, a[n - 1][n - 1] % p, p);
  return neg ? (p - det) % p : det;
}

}  // namespace modp

void CrtAccumulator::absorb(uint64_t residue, uint64_t p) {
  uint64_t cur = modp::reduce(value, p);
  uint64_t minv = modp::inv(modp::reduce(modulus, p), p);
  uint64_t delta = modp::mul(modp::sub(residue, cur, p), minv, p);
  value += modulus * mpz_class(delta);
  modulus *= p;
}

mpz_class CrtAccumulator::symmetric() const {
  mpz_class half = modulus / 2;
  if (value > half) return value - modulus;
  return value;
}

mpz_class det_crt(const ZMatrix& a) {
  std::size_t n = a.size();
  if (n == 0) return 1;
  for (const auto& row : a)
    if (row.size() != n) throw InternalError("det of non-square matrix");
  // Hadamard-type bound: |det| <= product of row L1 norms
  unsigned long bits = 2;
  for (const auto& row : a) {
    mpz_class l1 = 0;
    for (const auto& e : row) l1 += abs(e);
    if (l1 == 0) return 0;
    bits += mpz_sizeinbase(l1.get_mpz_t(), 2) + 1;
  }
  CrtAccumulator acc;
  std::vector<std::vector<uint64_t>> work(n, std::vector<uint64_t>(n));
  for (std::size_t idx = 0;; idx++) {
    uint64_t p = modp::prime(idx);
    for (std::size_t i = 0; i < n; i++)
      for (std::size_t j = 0; j < n; j++)
        work[i][j] = modp::reduce(a[i][j], p);
    acc.absorb(modp::det_mod(work, p), p);
    if (mpz_sizeinbase(acc.modulus.get_mpz_t(), 2) > bits + 1) break;
  }
  return acc.symmetric();
}

mpz_class det_auto(const ZMatrix& a) {
  std::size_t n = a.size();
  if (n <= 4) return det_bareiss(a);
  // large entries favor fraction-free elimination, many small ones CRT
  std::size_t max_bits = 0;
  for (const auto& row : a)
    for (const auto& e : row) {
      if (e == 0) continue;
      std::size_t b = mpz_sizeinbase(e.get_mpz_t(), 2);
      if (b > max_bits) max_bits = b;
    }
  if (max_bits > 512 && n <= 12) return det_bareiss(a);
  return det_crt(a);
}

}  // namespace divht
