"""Sieves and elementary arithmetic shared by every other module.

The central object is :class:`FactorSieve`, a one-pass smallest-prime-factor
sieve from which the prime-factor count table (with multiplicity), the Euler
totient table and the Moebius table are derived.  All tables are plain numpy
arrays indexed by n itself (index 0 is a filler), immutable by convention
after construction, and safe for shared concurrent reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

__all__ = ["FactorSieve", "build_sieve", "gcd", "is_prime"]


@dataclass
class FactorSieve:
    """Precomputed factorization tables for 1..limit.

    Attributes
    ----------
    limit : int
        Largest n covered by the tables.
    omega : np.ndarray
        omega[n] = number of prime factors of n counted with multiplicity
        (omega[1] = 0).
    spf : np.ndarray
        spf[n] = smallest prime factor of n for n >= 2; spf[1] = 1.
    phi : np.ndarray
        phi[n] = Euler totient of n.
    """

    limit: int
    omega: np.ndarray
    spf: np.ndarray
    phi: np.ndarray
    _mobius: np.ndarray | None = field(default=None, repr=False)

    @property
    def primes(self) -> np.ndarray:
        n = np.arange(2, self.limit + 1)
        return n[self.spf[2:] == n]

    def level_support(self, n_max: int, k: int) -> np.ndarray:
        """Integers m <= n_max with exactly k prime factors (multiplicity)."""
        if n_max > self.limit:
            raise InvalidArgumentError(f"n_max={n_max} exceeds sieve limit {self.limit}")
        return np.nonzero(self.omega[1 : n_max + 1] == k)[0] + 1

    def mobius(self) -> np.ndarray:
        """Moebius table mu[0..limit], built lazily and cached."""
        if self._mobius is None:
            mu = np.ones(self.limit + 1, dtype=np.int64)
            mu[0] = 0
            for p in self.primes:
                mu[p::p] *= -1
                pp = p * p
                if pp <= self.limit:
                    mu[pp::pp] = 0
            self._mobius = mu
        return self._mobius


def build_sieve(limit: int) -> FactorSieve:
    """Build all tables up to ``limit`` in O(limit log log limit).

    Raises InvalidArgumentError for limit < 1.
    """
    if limit < 1:
        raise InvalidArgumentError("sieve limit must be >= 1")
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    untouched = np.nonzero(spf[2:] == 0)[0] + 2  # primes > sqrt(limit) and small primes
    spf[untouched] = untouched
    if limit >= 1:
        spf[1] = 1

    omega = np.zeros(limit + 1, dtype=np.int64)
    for n in range(2, limit + 1):
        omega[n] = omega[n // spf[n]] + 1

    phi = np.arange(limit + 1, dtype=np.int64)
    n = np.arange(2, limit + 1)
    for p in n[spf[2:] == n]:
        phi[p::p] -= phi[p::p] // p

    return FactorSieve(limit=limit, omega=omega, spf=spf, phi=phi)


def gcd(a: int, b: int) -> int:
    """Greatest common divisor of two positive integers."""
    if a < 1 or b < 1:
        raise InvalidArgumentError("gcd arguments must be >= 1")
    return math.gcd(a, b)


# Witness set proven sufficient for every n < 3.3e24, well past 2**63.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test, correct for all n <= 2**63."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
