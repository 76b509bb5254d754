"""
Exact arithmetic in F_q, q = p^m <= 2^16.

Elements are plain ints in [0, q). For prime fields the encoding is the residue;
for extension fields it is the integer whose base-p digits are the polynomial
coefficients over the field's Conway polynomial, which is exactly the integer
representation used by galois. Hence an int and a galois.FieldArray element with
the same value denote the same field element, and `<` on encodings is the total
order used for tie-breaking.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Any, Iterator

import galois
import numpy as np

from code_basis_reduction import settings
from code_basis_reduction.exceptions import DomainError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FieldSpec:
    """
    Description of F_q. `poly` lists the coefficients of the defining irreducible
    polynomial from the constant term up; prime fields use the placeholder (0, 1).
    """

    p: int
    m: int
    poly: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 1 or not galois.is_prime(self.p):
            raise UsageError(f"Unsupported field characteristic/degree: p={self.p}, m={self.m}")
        if self.p**self.m > settings.MAX_FIELD_ORDER:
            raise UsageError(f"Unsupported field order: {self.p**self.m}")
        if len(self.poly) != self.m + 1 or self.poly[-1] != 1:
            raise UsageError(f"Unsupported defining polynomial: {self.poly}")

    @classmethod
    def from_order(cls, q: int) -> FieldSpec:
        if q < 2 or q > settings.MAX_FIELD_ORDER or not galois.is_prime_power(q):
            raise UsageError(f"Unsupported field order: {q}")
        return _field_for_order(q)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> FieldSpec:
        return cls(p=int(data["p"]), m=int(data["m"]), poly=tuple(int(c) for c in data["poly"]))

    def to_json(self) -> dict[str, Any]:
        return {"p": self.p, "m": self.m, "poly": list(self.poly)}

    def __getstate__(self) -> dict[str, Any]:
        # cached tables and the galois class are rebuilt lazily after unpickling
        return {"p": self.p, "m": self.m, "poly": self.poly}

    def __setstate__(self, state: dict[str, Any]) -> None:
        self.__dict__.update(state)

    def __str__(self) -> str:
        return f"GF({self.q})"

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def is_binary(self) -> bool:
        return self.q == 2

    @property
    def is_prime(self) -> bool:
        return self.m == 1

    @functools.cached_property
    def array_type(self) -> type[galois.FieldArray]:
        if self.is_prime:
            return galois.GF(self.p)
        poly = galois.Poly(list(reversed(self.poly)), field=galois.GF(self.p))
        return galois.GF(self.q, irreducible_poly=poly)

    @functools.cached_property
    def _tables(self) -> tuple[list[int], list[int]]:
        """
        exp/log tables of the multiplicative group, generated from the primitive element
        """
        field = self.array_type
        exponents = np.arange(self.q - 1)
        exp = [int(x) for x in (field.primitive_element**exponents).view(np.ndarray)]
        log = [0] * self.q
        for i, x in enumerate(exp):
            log[x] = i
        logger.debug("built exp/log tables for %s", self)
        return exp, log

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise UsageError(f"Unsupported element encoding {a} for {self}")
        return a

    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def add(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        if self.is_prime:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        result, place = 0, 1
        while a or b:
            result += ((a % self.p + b % self.p) % self.p) * place
            a, b, place = a // self.p, b // self.p, place * self.p
        return result

    def neg(self, a: int) -> int:
        self.check(a)
        if self.is_prime:
            return (-a) % self.p
        if self.p == 2:
            return a
        result, place = 0, 1
        while a:
            result += ((-(a % self.p)) % self.p) * place
            a, place = a // self.p, place * self.p
        return result

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        if self.is_prime:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        exp, log = self._tables
        return exp[(log[a] + log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        self.check(a)
        if a == 0:
            raise DomainError(f"Zero has no inverse in {self}")
        if self.is_prime:
            return pow(a, -1, self.p)
        exp, log = self._tables
        return exp[(-log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def check_same(self, other: FieldSpec) -> None:
        if self != other:
            raise UsageError(f"Mismatched fields: {self} and {other}")


@functools.lru_cache(maxsize=None)
def _field_for_order(q: int) -> FieldSpec:
    primes, multiplicities = galois.factors(q)
    p, m = int(primes[0]), int(multiplicities[0])
    if m == 1:
        return FieldSpec(p=p, m=1, poly=(0, 1))
    # galois defaults to the Conway polynomial; coeffs come highest degree first
    coeffs = [int(c) for c in galois.GF(q).irreducible_poly.coeffs]
    return FieldSpec(p=p, m=m, poly=tuple(reversed(coeffs)))


GF2 = FieldSpec(p=2, m=1, poly=(0, 1))
