"""Symmetric polynomials in ``k`` variables, stored in the monomial basis.

``SymPoly(k, {mu: c})`` represents ``sum_mu c * m_mu`` where ``m_mu`` is the
monomial symmetric polynomial: the sum of ``z**e`` over the distinct
permutations ``e`` of ``mu`` padded with zeros to length ``k``.

Coefficients may be ``float`` (default), :class:`fractions.Fraction` for exact
arithmetic, or ``mpmath.mpf`` for extended precision; the arithmetic here is
written to work with any of them.
"""

from __future__ import annotations

import json
from functools import lru_cache
from itertools import product
from math import comb
from typing import Mapping

import numpy as np

from .partitions import Partition, partitions_of, sort_key

#: Product degree cap; monomial-basis products grow combinatorially.
MAX_PRODUCT_DEGREE = 12


@lru_cache(maxsize=None)
def distinct_permutations(exps: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    if len(exps) <= 1:
        return (exps,)
    out = []
    for v in sorted(set(exps), reverse=True):
        i = exps.index(v)
        rest = exps[:i] + exps[i + 1:]
        out.extend((v,) + tail for tail in distinct_permutations(rest))
    return tuple(out)


@lru_cache(maxsize=None)
def num_distinct_permutations(mu: Partition, k: int) -> int:
    return len(distinct_permutations(mu.padded(k)))


def _canonical(exps) -> Partition:
    return Partition(sorted(exps, reverse=True))


class SymPoly:
    """Symmetric polynomial ``sum_mu c_mu m_mu`` in ``k`` variables."""

    __slots__ = ("k", "coeffs")

    def __init__(self, k: int, coeffs: Mapping | None = None):
        if k < 1:
            raise ValueError("number of variables must be positive")
        self.k = int(k)
        clean = {}
        for mu, c in (coeffs or {}).items():
            mu = mu if isinstance(mu, Partition) else Partition(mu)
            if len(mu) > k:
                raise ValueError(f"{mu} has more than {k} parts")
            if c != 0:
                clean[mu] = c
        self.coeffs: dict[Partition, object] = dict(sorted(clean.items(), key=lambda t: sort_key(t[0])))

    # -- constructors ------------------------------------------------------
    @classmethod
    def monomial(cls, k: int, mu, c=1.0) -> "SymPoly":
        return cls(k, {Partition(mu): c})

    @classmethod
    def constant(cls, k: int, c=1.0) -> "SymPoly":
        return cls(k, {Partition(): c})

    @classmethod
    def zero(cls, k: int) -> "SymPoly":
        return cls(k)

    @classmethod
    def from_dense(cls, k: int, terms: Mapping[tuple, object], tol: float = 0.0, check: bool = True) -> "SymPoly":
        """Collect a dense ``{exponent tuple: coeff}`` polynomial.

        Raises ``ValueError`` if the input is not symmetric (beyond ``tol``,
        relative to the largest coefficient). With ``check=False`` only the
        coefficients at weakly decreasing exponents are read.
        """
        coeffs: dict[Partition, object] = {}
        for e, c in terms.items():
            if len(e) != k:
                raise ValueError("exponent tuple length does not match k")
            if all(a >= b for a, b in zip(e, e[1:])):
                mu = Partition(e)
                coeffs[mu] = coeffs.get(mu, 0) + c
        poly = cls(k, coeffs)
        if not check:
            return poly
        scale = max((abs(c) for c in terms.values()), default=0)
        for e, c in terms.items():
            if abs(c - poly.coeff(_canonical(e))) > tol * scale:
                raise ValueError(f"polynomial is not symmetric at exponent {e}")
        for mu, c in poly.coeffs.items():
            for e in distinct_permutations(mu.padded(k)):
                if abs(c - terms.get(e, 0)) > tol * scale:
                    raise ValueError(f"polynomial is not symmetric at exponent {e}")
        return poly

    # -- inspection --------------------------------------------------------
    def coeff(self, mu) -> object:
        return self.coeffs.get(Partition(mu), 0)

    def __iter__(self):
        return iter(self.coeffs.items())

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def degree(self) -> int:
        return max((mu.weight for mu in self.coeffs), default=-1)

    def homogeneous(self, d: int) -> "SymPoly":
        return SymPoly(self.k, {mu: c for mu, c in self.coeffs.items() if mu.weight == d})

    def norm(self) -> float:
        """Largest absolute coefficient."""
        return float(max((abs(c) for c in self.coeffs.values()), default=0.0))

    def prune(self, tol: float) -> "SymPoly":
        return SymPoly(self.k, {mu: c for mu, c in self.coeffs.items() if abs(c) > tol})

    def allclose(self, other: "SymPoly", atol: float = 0.0, rtol: float = 1e-12) -> bool:
        self._check(other)
        scale = max(self.norm(), other.norm())
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeff(mu) - other.coeff(mu)) <= atol + rtol * scale for mu in keys)

    def __repr__(self) -> str:
        terms = " + ".join(f"{c!r}*m{mu}" for mu, c in self.coeffs.items()) or "0"
        return f"SymPoly(k={self.k}: {terms})"

    # -- ring operations ---------------------------------------------------
    def _check(self, other: "SymPoly"):
        if self.k != other.k:
            raise ValueError(f"variable count mismatch: {self.k} != {other.k}")

    def __add__(self, other: "SymPoly") -> "SymPoly":
        self._check(other)
        out = dict(self.coeffs)
        for mu, c in other.coeffs.items():
            out[mu] = out.get(mu, 0) + c
        return SymPoly(self.k, out)

    def __neg__(self) -> "SymPoly":
        return SymPoly(self.k, {mu: -c for mu, c in self.coeffs.items()})

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        return self + (-other)

    def scale(self, a) -> "SymPoly":
        return SymPoly(self.k, {mu: a * c for mu, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, SymPoly):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    # -- dense form --------------------------------------------------------
    def expand(self) -> dict[tuple[int, ...], object]:
        """Dense ``{exponent tuple: coeff}`` form (every distinct permutation)."""
        out = {}
        for mu, c in self.coeffs.items():
            for e in distinct_permutations(mu.padded(self.k)):
                out[e] = c
        return out

    # -- evaluation --------------------------------------------------------
    def eval(self, x):
        """Evaluate at ``x`` of shape ``(k,)`` or ``(..., k)`` (vectorised)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.k,):
            raise ValueError(f"expected trailing dimension {self.k}, got shape {x.shape}")
        total = np.zeros(x.shape[:-1])
        if not self.coeffs:
            return total if total.ndim else 0.0
        top = max(max(mu, default=0) for mu in self.coeffs)
        powers = [np.ones_like(x)]
        for _ in range(top):
            powers.append(powers[-1] * x)
        cols = range(self.k)
        for mu, c in self.coeffs.items():
            m = np.zeros(x.shape[:-1])
            for e in distinct_permutations(mu.padded(self.k)):
                term = np.ones(x.shape[:-1])
                for i in cols:
                    if e[i]:
                        term = term * powers[e[i]][..., i]
                m = m + term
            total = total + float(c) * m
        return total if total.ndim else float(total)

    def __call__(self, x):
        return self.eval(x)

    def eval_at_ones(self):
        """Value at ``(1, ..., 1)``, counted combinatorially (exact for exact coefficients)."""
        return sum((c * num_distinct_permutations(mu, self.k) for mu, c in self.coeffs.items()), 0)

    def shift_by_ones(self) -> "SymPoly":
        """The polynomial ``z -> self(1_k + z)``, back in the monomial basis."""
        out: dict[Partition, object] = {}
        for e, c in self.expand().items():
            for r in product(*(range(ei + 1) for ei in e)):
                if any(a < b for a, b in zip(r, r[1:])):
                    continue
                w = 1
                for ei, ri in zip(e, r):
                    w *= comb(ei, ri)
                nu = Partition(r)
                out[nu] = out.get(nu, 0) + w * c
        return SymPoly(self.k, out)

    # -- serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        return {"k": self.k, "terms": [{"mu": list(mu), "c": float(c)} for mu, c in self.coeffs.items()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SymPoly":
        coeffs: dict[Partition, float] = {}
        for term in data["terms"]:
            mu = Partition(term["mu"])
            coeffs[mu] = coeffs.get(mu, 0.0) + float(term["c"])
        return cls(int(data["k"]), coeffs)

    @classmethod
    def from_json(cls, text: str) -> "SymPoly":
        return cls.from_dict(json.loads(text))


def multiply(p: SymPoly, q: SymPoly, max_degree: int | None = None) -> SymPoly:
    """Product in the monomial basis.

    The coefficient of ``m_nu`` is the coefficient of ``z**nu`` in ``p*q``,
    i.e. ``sum_{e <= nu} p_e q_{nu - e}`` over exponents ``e`` of ``p``.
    """
    p._check(q)
    cap = MAX_PRODUCT_DEGREE if max_degree is None else max_degree
    if not p or not q:
        return SymPoly.zero(p.k)
    if p.degree + q.degree > cap:
        raise ValueError(f"product degree {p.degree + q.degree} exceeds cap {cap}")
    dense_p = p.expand()
    degrees = {a.weight + b.weight for a in p.coeffs for b in q.coeffs}
    max_part = max(max(mu, default=0) for mu in p.coeffs) + max(max(mu, default=0) for mu in q.coeffs)
    out: dict[Partition, object] = {}
    for d in degrees:
        for nu in partitions_of(d, max_length=p.k, max_part=max_part):
            target = nu.padded(p.k)
            acc = 0
            for e, c in dense_p.items():
                if all(a <= b for a, b in zip(e, target)):
                    cq = q.coeffs.get(_canonical(b - a for a, b in zip(e, target)), 0)
                    if cq:
                        acc = acc + c * cq
            if acc:
                out[nu] = acc
    return SymPoly(p.k, out)
