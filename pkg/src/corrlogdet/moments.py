"""Joint even moments of exchangeable coordinates and their sphere identities.

A moment table maps a sorted multiset of even exponents ``(2k1 >= ... >=
2kr)`` to ``E[Z_1^{2k1} * ... * Z_r^{2kr}]`` for exchangeable random
variables ``Z_1, ..., Z_n``.  When the coordinates are constrained to the
unit sphere (``sum Z_k^2 = 1``) the entries obey a family of polynomial
identities: normalizations obtained by expanding ``(sum Z^2)^k = 1``,
lift recursions obtained by multiplying a monomial by ``1 = sum Z^2``,
and closed-form completions that express every entry of total
half-degree <= 4 through the pair, triple and quadruple moments plus the
``(4,4)`` entry.

On top of the tables sit exact formulas for moments of weighted sums of
squared coordinates, the zero-sum coefficient decomposition of the fourth
moment of ``sum a_k (n Z_k^2 - 1)``, and trace formulas for third moments
of quadratic forms under sign-symmetric exchangeable laws.

All evaluators are generic over the number type: run them on
``fractions.Fraction`` inputs for exact certification, on floats for
production.  Brute-force enumeration oracles over (signed) coordinate
permutations of a fixed vector provide the independent ground truth.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateInputError,
    IncompleteTableError,
    InconsistentTableError,
    ParameterDomainError,
    ResourceError,
)
from .sampling import RngStream, TailLaw, _draws_per_entry, _transform

Number = float | Fraction

# Enumeration caps: n! * 2^n stays desk-scale.
_MAX_ORACLE_N = 8
_MAX_ORACLE_DEGREE = 6
_SPHERE_TOL = 1e-8

_LOW_KEYS = ((2,), (4,), (2, 2))
_DEGREE3_KEYS = ((6,), (4, 2), (2, 2, 2))
_DEGREE4_KEYS = ((8,), (6, 2), (4, 4), (4, 2, 2), (2, 2, 2, 2))
ALL_KEYS = _LOW_KEYS + _DEGREE3_KEYS + _DEGREE4_KEYS


def moment_key(*exponents: int) -> tuple[int, ...]:
    """Canonical (descending) key for a multiset of positive even exponents."""
    key = tuple(sorted((int(e) for e in exponents), reverse=True))
    if not key or any(e < 2 or e % 2 for e in key):
        raise ParameterDomainError(f"moment exponents must be positive even: {exponents}")
    return key


def _one_like(values: Iterable[Number]) -> Number:
    for v in values:
        if isinstance(v, Fraction):
            return Fraction(1)
    return 1.0


@dataclass(frozen=True)
class MomentTable:
    """Immutable map from canonical exponent keys to moment values.

    Keys are stored sorted descending, which makes the permutation
    invariance of the underlying moments structural.  ``se`` optionally
    holds standard errors for Monte Carlo estimated tables.
    """

    n: int
    moments: dict[tuple[int, ...], Number]
    se: dict[tuple[int, ...], float] | None = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ParameterDomainError("table needs n >= 1")
        canonical = {moment_key(*k): v for k, v in self.moments.items()}
        object.__setattr__(self, "moments", canonical)
        if self.se is not None:
            object.__setattr__(self, "se", {moment_key(*k): float(v) for k, v in self.se.items()})

    def get(self, *exponents: int) -> Number:
        key = moment_key(*exponents)
        try:
            return self.moments[key]
        except KeyError:
            raise IncompleteTableError(f"moment table is missing {key}") from None

    def has(self, *exponents: int) -> bool:
        return moment_key(*exponents) in self.moments

    def require(self, keys: Iterable[tuple[int, ...]]) -> None:
        missing = [k for k in keys if k not in self.moments]
        if missing:
            raise IncompleteTableError(f"moment table is missing {missing}")

    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.moments.values())

    def to_json(self) -> str:
        def encode(v: Number):
            return str(v) if isinstance(v, Fraction) else float(v)

        payload: dict = {
            "n": self.n,
            "moments": {",".join(map(str, k)): encode(v) for k, v in sorted(self.moments.items())},
        }
        if self.se is not None:
            payload["se"] = {",".join(map(str, k)): v for k, v in sorted(self.se.items())}
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MomentTable":
        payload = json.loads(text)

        def decode(v):
            return Fraction(v) if isinstance(v, str) else float(v)

        moments = {
            tuple(int(t) for t in k.split(",")): decode(v)
            for k, v in payload["moments"].items()
        }
        se = None
        if "se" in payload:
            se = {tuple(int(t) for t in k.split(",")): float(v) for k, v in payload["se"].items()}
        return cls(n=int(payload["n"]), moments=moments, se=se)


def complete_table(partial: MomentTable) -> MomentTable:
    """Fill all half-degree <= 4 entries of a unit-sphere table.

    Requires the pair, triple and quadruple moments ``(2,2), (2,2,2),
    (2,2,2,2)`` and the ``(4,4)`` entry; every other entry then has a
    closed form.  After completion the multinomial normalizations hold
    identically.
    """
    partial.require([(2, 2), (2, 2, 2), (2, 2, 2, 2), (4, 4)])
    n = partial.n
    b22 = partial.get(2, 2)
    b222 = partial.get(2, 2, 2)
    b2222 = partial.get(2, 2, 2, 2)
    b44 = partial.get(4, 4)
    one = _one_like([b22, b222, b2222, b44])

    b2 = one / n
    b4 = one / n - (n - 1) * b22
    b42 = b22 / 2 - (n - 2) * b222 / 2
    b6 = one / n - 3 * (n - 1) * b22 / 2 + (n - 1) * (n - 2) * b222 / 2
    b62 = b22 / 2 - 5 * (n - 2) * b222 / 6 + (n - 2) * (n - 3) * b2222 / 3 - b44
    b422 = b222 / 3 + (3 - n) * b2222 / 3
    b8 = (
        one / n
        + 2 * (1 - n) * b22
        + (4 * n * n * one / 3 - 4 * n + 8 * one / 3) * b222
        + (-(n**3) * one / 3 + 2 * n * n - 11 * n * one / 3 + 2) * b2222
        + (n - 1) * b44
    )
    moments = dict(partial.moments)
    moments.update(
        {
            (2,): b2,
            (4,): b4,
            (4, 2): b42,
            (6,): b6,
            (6, 2): b62,
            (4, 2, 2): b422,
            (8,): b8,
        }
    )
    return MomentTable(n=n, moments=moments)


def sphere_identity_residuals(table: MomentTable) -> dict[str, Number]:
    """Residuals of every unit-sphere identity a full table must satisfy.

    All residuals are exactly zero for a consistent table in rational
    mode.  Names: ``fill_*`` are the closed-form completions, ``norm_k``
    the multinomial normalizations of degree k, ``lift_*`` the recursions
    from multiplying a monomial by ``1 = sum Z^2``.
    """
    table.require(ALL_KEYS)
    n = table.n
    g = table.get
    one = _one_like(table.moments.values())
    b2, b4, b22 = g(2), g(4), g(2, 2)
    b6, b42, b222 = g(6), g(4, 2), g(2, 2, 2)
    b8, b62, b44, b422, b2222 = g(8), g(6, 2), g(4, 4), g(4, 2, 2), g(2, 2, 2, 2)

    return {
        "fill_2": b2 - one / n,
        "fill_4": b4 - (one / n - (n - 1) * b22),
        "fill_42": b42 - (b22 / 2 - (n - 2) * b222 / 2),
        "fill_6": b6 - (one / n - 3 * (n - 1) * b22 / 2 + (n - 1) * (n - 2) * b222 / 2),
        "fill_62": b62
        - (b22 / 2 - 5 * (n - 2) * b222 / 6 + (n - 2) * (n - 3) * b2222 / 3 - b44),
        "fill_422": b422 - (b222 / 3 + (3 - n) * b2222 / 3),
        "fill_8": b8
        - (
            one / n
            + 2 * (1 - n) * b22
            + (4 * n * n * one / 3 - 4 * n + 8 * one / 3) * b222
            + (-(n**3) * one / 3 + 2 * n * n - 11 * n * one / 3 + 2) * b2222
            + (n - 1) * b44
        ),
        "norm_2": n * b4 + n * (n - 1) * b22 - 1,
        "norm_3": n * b6 + 3 * n * (n - 1) * b42 + n * (n - 1) * (n - 2) * b222 - 1,
        "norm_4": (
            n * b8
            + 4 * n * (n - 1) * b62
            + 3 * n * (n - 1) * b44
            + 6 * n * (n - 1) * (n - 2) * b422
            + n * (n - 1) * (n - 2) * (n - 3) * b2222
            - 1
        ),
        "lift_2": b2 - (b4 + (n - 1) * b22),
        "lift_4": b4 - (b6 + (n - 1) * b42),
        "lift_6": b6 - (b8 + (n - 1) * b62),
        "lift_22": b22 - (b42 + b42 + (n - 2) * b222),
        "lift_42": b42 - (b62 + b44 + (n - 2) * b422),
        "lift_222": b222 - (3 * b422 + (n - 3) * b2222),
    }


def uniform_sphere_table(n: int, exact: bool = True) -> MomentTable:
    """Moments of a uniform point on the sphere (normalized Gaussian row).

    The squared coordinates are jointly Dirichlet(1/2, ..., 1/2), so
    ``E[prod (Z_i^2)^{k_i}] = prod rising(1/2, k_i) / rising(n/2, sum k)``.
    """
    if n < 4:
        raise ParameterDomainError("need n >= 4 for all half-degree 4 moments")

    def rising(x: Fraction, k: int) -> Fraction:
        out = Fraction(1)
        for j in range(k):
            out *= x + j
        return out

    moments: dict[tuple[int, ...], Number] = {}
    for key in ALL_KEYS:
        halves = [e // 2 for e in key]
        value = Fraction(1)
        for k in halves:
            value *= rising(Fraction(1, 2), k)
        value /= rising(Fraction(n, 2), sum(halves))
        moments[key] = value if exact else float(value)
    return MomentTable(n=n, moments=moments)


@dataclass(frozen=True)
class WeightVector:
    """Weights summing to one, with cached power sums ``S_j = sum a_k^j``."""

    a: tuple[Number, ...]
    s1: Number = field(init=False)
    s2: Number = field(init=False)
    s3: Number = field(init=False)
    s4: Number = field(init=False)

    def __post_init__(self):
        vals = tuple(self.a)
        if not vals:
            raise ParameterDomainError("weight vector must be nonempty")
        object.__setattr__(self, "a", vals)
        sums = [sum(v**j for v in vals) for j in (1, 2, 3, 4)]
        for name, s in zip(("s1", "s2", "s3", "s4"), sums):
            object.__setattr__(self, name, s)
        if abs(float(self.s1) - 1.0) > 1e-12:
            raise ParameterDomainError("weights must sum to 1")

    @property
    def n(self) -> int:
        return len(self.a)

    @classmethod
    def normalized(cls, values: Sequence[Number]) -> "WeightVector":
        total = sum(values)
        if total == 0:
            raise ParameterDomainError("cannot normalize weights with zero sum")
        return cls(tuple(v / total for v in values))


class KCoefficients(NamedTuple):
    """Polynomial-in-power-sums weights of the sphere fourth-moment formula.

    The five coefficients always sum to zero.
    """

    constant: Number
    c44: Number
    c22: Number
    c222: Number
    c2222: Number

    def total(self) -> Number:
        return self.constant + self.c44 + self.c22 + self.c222 + self.c2222


def k_coefficients(s2: Number, s3: Number, s4: Number, n: int) -> KCoefficients:
    """Coefficients multiplying ``(n^4 b44, n^2 b22, n^3 b222, n^4 b2222, 1)``
    in the exact fourth moment of ``sum a_k (n Z_k^2 - 1)`` on the sphere."""
    one = _one_like([s2, s3, s4])
    constant = 6 * n * s2 - 4 * n * n * s3 + n**3 * s4 - 3 * one
    c44 = 3 * s2 * s2 - 4 * s3 + n * s4
    c22 = -12 * n * s2 + 8 * n * n * s3 - 2 * n**3 * s4 + 6 * one
    c222 = (
        8 * n * s2
        - 2 * n * s2 * s2
        + (8 * n * (1 - 2 * n) * one / 3) * s3
        + (2 * n * n * (2 * n - 1) * one / 3) * s4
        - 4 * one
    )
    c2222 = (
        -2 * n * s2
        + (2 * n - 3) * s2 * s2
        + (4 * (n * n - 2 * n + 3) * one / 3) * s3
        - (n * (n * n - 2 * n + 3) * one / 3) * s4
        + one
    )
    return KCoefficients(constant, c44, c22, c222, c2222)


def second_moment_raw(w: WeightVector, t: MomentTable) -> Number:
    """``E[(sum a_k Z_k^2)^2]`` for exchangeable Z and weights summing to 1."""
    return t.get(4) * w.s2 + t.get(2, 2) * (1 - w.s2)


def third_moment_raw(w: WeightVector, t: MomentTable) -> Number:
    """``E[(sum a_k Z_k^2)^3]``, expanded over index coincidence patterns."""
    b6, b42, b222 = t.get(6), t.get(4, 2), t.get(2, 2, 2)
    s2, s3 = w.s2, w.s3
    return (
        b222 * (1 + 6 * s2 + 8 * s3)
        + (b6 - 15 * b42 + 30 * b222) * s3
        + (b42 - 3 * b222) * (3 * s2 + 12 * s3)
    )


def fourth_moment_raw(w: WeightVector, t: MomentTable) -> Number:
    """``E[(sum a_k Z_k^2)^4]``, expanded over index coincidence patterns."""
    t.require(_DEGREE4_KEYS)
    s2, s3, s4 = w.s2, w.s3, w.s4
    return (
        w.s4 * t.get(8)
        + 4 * (s3 - s4) * t.get(6, 2)
        + 6 * (s2 - s2 * s2 - 2 * s3 + 2 * s4) * t.get(4, 2, 2)
        + 3 * (s2 * s2 - s4) * t.get(4, 4)
        + (1 - 6 * s2 + 3 * s2 * s2 + 8 * s3 - 6 * s4) * t.get(2, 2, 2, 2)
    )


def fourth_moment_centered(w: WeightVector, t: MomentTable) -> Number:
    """``E[(sum a_k (Z_k^2 - E Z_k^2))^4]`` for exchangeable Z.

    Needs every table entry of half-degree <= 4; holds with or without
    the sphere constraint.
    """
    t.require(ALL_KEYS)
    s2, s3, s4 = w.s2, w.s3, w.s4
    b2 = t.get(2)
    return (
        s4 * t.get(8)
        + 4 * (s3 - s4) * t.get(6, 2)
        - 4 * s3 * b2 * t.get(6)
        + 3 * (s2 * s2 - s4) * t.get(4, 4)
        + 6 * (s2 - s2 * s2 - 2 * s3 + 2 * s4) * t.get(4, 2, 2)
        + 12 * (-s2 + s3) * b2 * t.get(4, 2)
        + 4 * (3 * s2 - 2 * s3 - 1) * b2 * t.get(2, 2, 2)
        + (-6 * s2 + 3 * s2 * s2 + 8 * s3 - 6 * s4 + 1) * t.get(2, 2, 2, 2)
        + 6 * (1 - s2) * b2 * b2 * t.get(2, 2)
        + 6 * s2 * b2 * b2 * t.get(4)
        - 3 * b2**4
    )


def fourth_moment_sphere(w: WeightVector, t: MomentTable, check: bool = True) -> Number:
    """``E[(sum a_k (n Z_k^2 - 1))^4]`` via the zero-sum coefficient form.

    Only valid for unit-sphere tables; by default the table is checked
    against the sphere identities first.
    """
    if check:
        residuals = sphere_identity_residuals(t)
        worst = max(abs(float(v)) for v in residuals.values())
        if worst > _SPHERE_TOL:
            raise InconsistentTableError(
                f"table violates sphere identities (residual {worst:.3e})"
            )
    n = t.n
    k = k_coefficients(w.s2, w.s3, w.s4, n)
    return (
        k.c44 * n**4 * t.get(4, 4)
        + k.c22 * n**2 * t.get(2, 2)
        + k.c222 * n**3 * t.get(2, 2, 2)
        + k.c2222 * n**4 * t.get(2, 2, 2, 2)
        + k.constant
    )


class QuadraticFormMoments(NamedTuple):
    third_central: Number
    third_raw: Number
    cross_second: Number


def _symmetric_object_array(m, name: str) -> np.ndarray:
    arr = np.asarray(m, dtype=object)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParameterDomainError(f"{name} must be square")
    if not (arr == arr.T).all():
        raise ParameterDomainError(f"{name} must be symmetric")
    return arr


def quadratic_form_moments(
    a_mat, b_mat, t: MomentTable
) -> QuadraticFormMoments:
    """Trace formulas for moments of ``z' A z`` under a sign-symmetric
    exchangeable law with moment table ``t``.

    Returns the centered and raw third moments of ``z' A z`` and the mixed
    second moment ``E[z' A z * z' B z]`` (``b_mat=None`` uses ``B = A``).
    Only traces of products and Hadamard (entrywise) products enter, so
    the evaluation is exact for rational inputs.
    """
    a = _symmetric_object_array(a_mat, "A")
    b = a if b_mat is None else _symmetric_object_array(b_mat, "B")
    if b.shape != a.shape:
        raise ParameterDomainError("A and B must have equal shapes")
    t.require([(2,), (4,), (6,), (2, 2), (4, 2), (2, 2, 2)])
    b2, b4, b6 = t.get(2), t.get(4), t.get(6)
    b22, b42, b222 = t.get(2, 2), t.get(4, 2), t.get(2, 2, 2)

    diag_a = np.diag(a)
    a2 = np.dot(a, a)
    tr_a = diag_a.sum()
    tr_a2 = np.diag(a2).sum()
    tr_a3 = (a2 * a).sum()
    tr_ada = (diag_a * diag_a).sum()
    tr_ada2 = (diag_a * np.diag(a2)).sum()
    tr_adada = (diag_a * diag_a * diag_a).sum()

    third_central = (
        8 * b222 * tr_a3
        + (b222 + 2 * b2**3 - 3 * b2 * b22) * tr_a**3
        + 6 * (b222 - b2 * b22) * tr_a * tr_a2
        + 3 * (b42 - b4 * b2 + 3 * b22 * b2 - 3 * b222) * tr_a * tr_ada
        + 12 * (b42 - 3 * b222) * tr_ada2
        + (b6 - 15 * b42 + 30 * b222) * tr_adada
    )
    third_raw = (
        b222 * (tr_a**3 + 6 * tr_a * tr_a2 + 8 * tr_a3)
        + (b6 - 15 * b42 + 30 * b222) * tr_adada
        + (b42 - 3 * b222) * (3 * tr_a * tr_ada + 12 * tr_ada2)
    )
    tr_ab = (a * b).sum()
    tr_adb = (np.diag(a) * np.diag(b)).sum()
    cross_second = b22 * (tr_a * b.diagonal().sum() + 2 * tr_ab) + (b4 - 3 * b22) * tr_adb
    return QuadraticFormMoments(third_central, third_raw, cross_second)


def _partition_keys(degree: int, max_parts: int) -> list[tuple[int, ...]]:
    keys: list[tuple[int, ...]] = []

    def extend(prefix: list[int], remaining: int, cap: int):
        if prefix:
            keys.append(tuple(2 * k for k in prefix))
        if len(prefix) == max_parts:
            return
        for k in range(min(cap, remaining), 0, -1):
            extend(prefix + [k], remaining - k, k)

    extend([], degree, degree)
    return keys


def permutation_oracle(
    z: Sequence[Number], signed: bool = True, degree: int = 4
) -> MomentTable:
    """Exact moment table of Z uniform over (signed) permutations of ``z``.

    The law is exchangeable and sign-symmetric with
    ``sum Z_k^2 = |z|^2``; normalize ``z`` to unit norm to obtain a
    sphere table.  Even moments do not depend on the signs, so the
    enumeration runs over the n! permutations; values are exact when the
    entries of ``z`` are rational.  ``degree`` caps the total half-degree
    of tabulated keys.  Keys with more distinct indices than coordinates
    have empty support and are stored as exact zeros (every identity
    multiplies them by a coefficient that vanishes there).
    """
    n = len(z)
    if n < 1 or n > _MAX_ORACLE_N:
        raise ResourceError(f"enumeration oracle supports 1 <= n <= {_MAX_ORACLE_N}")
    if not 1 <= degree <= _MAX_ORACLE_DEGREE:
        raise ResourceError(f"oracle degree must be in [1, {_MAX_ORACLE_DEGREE}]")
    del signed  # even moments are invariant under sign flips
    z2 = [v * v for v in z]
    one = _one_like(z2)
    pows = [[one] + [v**k for k in range(1, degree + 1)] for v in z2]
    all_keys = _partition_keys(degree, degree)
    keys = [k for k in all_keys if len(k) <= n]
    halves = {key: tuple(e // 2 for e in key) for key in keys}
    totals = {key: 0 * one for key in keys}
    count = 0
    for perm in itertools.permutations(range(n)):
        count += 1
        for key in keys:
            value = one
            for slot, k in enumerate(halves[key]):
                value = value * pows[perm[slot]][k]
            totals[key] += value
    moments = {key: totals[key] / count for key in keys}
    for key in all_keys:
        if len(key) > n:
            moments[key] = 0 * one
    return MomentTable(n=n, moments=moments)


def enumerated_weighted_power(
    a: Sequence[Number],
    z: Sequence[Number],
    power: int,
    shift: Number = 0,
    factor: Number = 1,
) -> Number:
    """Brute-force ``E[(factor * sum_k a_k Z_k^2 + shift)^power]`` where Z
    runs over the permutations of ``z``.  Exact for rational inputs."""
    n = len(z)
    if n != len(a):
        raise ParameterDomainError("weights and support vector must have equal length")
    if n > _MAX_ORACLE_N or power > _MAX_ORACLE_DEGREE:
        raise ResourceError("enumeration exceeds the oracle size caps")
    z2 = [v * v for v in z]
    total = 0 * _one_like(z2)
    count = 0
    for perm in itertools.permutations(range(n)):
        s = sum(a[k] * z2[perm[k]] for k in range(n))
        total += (factor * s + shift) ** power
        count += 1
    return total / count


def enumerated_quadratic_form_moments(a_mat, b_mat, z: Sequence[Number]) -> QuadraticFormMoments:
    """Brute-force quadratic-form moments over all sign-permutation pairs.

    Enumerates the full ``2^n * n!`` support of Z (uniform over signed
    permutations of ``z``) and reduces the raw moments of ``z' A z``; this
    is the independent ground truth for :func:`quadratic_form_moments`.
    """
    n = len(z)
    if n > 6:
        raise ResourceError("signed enumeration supports n <= 6")
    a = _symmetric_object_array(a_mat, "A")
    b = a if b_mat is None else _symmetric_object_array(b_mat, "B")
    one = _one_like(list(z))
    m1 = m2 = m3 = cross = 0 * one
    count = 0
    for perm in itertools.permutations(range(n)):
        base = [z[perm[k]] for k in range(n)]
        for signs in itertools.product((1, -1), repeat=n):
            v = [s * x for s, x in zip(signs, base)]
            qa = sum(a[i][j] * v[i] * v[j] for i in range(n) for j in range(n))
            qb = (
                qa
                if b is a
                else sum(b[i][j] * v[i] * v[j] for i in range(n) for j in range(n))
            )
            m1 += qa
            m2 += qa * qa
            m3 += qa * qa * qa
            cross += qa * qb
            count += 1
    m1 /= count
    m2 /= count
    m3 /= count
    cross /= count
    third_central = m3 - 3 * m2 * m1 + 2 * m1**3
    return QuadraticFormMoments(third_central, m3, cross)


def rational_unit_vector(n: int, rng: np.random.Generator, span: int = 9) -> tuple[Fraction, ...]:
    """Random rational point on the unit sphere, exact norm one.

    Stereographic image of a random rational vector: for v in Q^{n-1},
    ``(2v, |v|^2 - 1) / (|v|^2 + 1)`` lies on the sphere exactly.
    """
    if n < 2:
        raise ParameterDomainError("need n >= 2")
    v = [
        Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 7)))
        for _ in range(n - 1)
    ]
    s = sum(x * x for x in v)
    denom = s + 1
    return tuple([2 * x / denom for x in v] + [(s - 1) / denom])


def rational_weights(n: int, rng: np.random.Generator, span: int = 9) -> WeightVector:
    """Random rational weights summing to one, exact."""
    raw = [Fraction(int(rng.integers(1, span + 1)), int(rng.integers(1, 7))) for _ in range(n)]
    return WeightVector.normalized(raw)


# ---------------------------------------------------------------------------
# Monte Carlo estimation of sphere tables from self-normalized rows
# ---------------------------------------------------------------------------

_FALLING_KEYS = ALL_KEYS


def _row_estimates(y2: np.ndarray, n: int) -> dict[tuple[int, ...], np.ndarray]:
    """Per-row unbiased estimates of every half-degree <= 4 moment.

    Averages the monomial over all distinct index tuples of one
    exchangeable row; with ``p_j = sum_k Y_k^(2j)`` (and ``p_1 = 1`` by the
    sphere constraint) each estimate is a polynomial in the power sums.
    """
    y4 = y2 * y2
    p2 = y4.sum(axis=1)
    p3 = (y4 * y2).sum(axis=1)
    p4 = (y4 * y4).sum(axis=1)
    d2 = float(n * (n - 1))
    d3 = d2 * (n - 2)
    d4 = d3 * (n - 3)
    ones = np.ones_like(p2)
    return {
        (2,): ones / n,
        (4,): p2 / n,
        (6,): p3 / n,
        (8,): p4 / n,
        (2, 2): (1.0 - p2) / d2,
        (4, 2): (p2 - p3) / d2,
        (6, 2): (p3 - p4) / d2,
        (4, 4): (p2 * p2 - p4) / d2,
        (2, 2, 2): (1.0 - 3.0 * p2 + 2.0 * p3) / d3,
        (4, 2, 2): (p2 - p2 * p2 - 2.0 * p3 + 2.0 * p4) / d3,
        (2, 2, 2, 2): (1.0 - 6.0 * p2 + 3.0 * p2 * p2 + 8.0 * p3 - 6.0 * p4) / d4,
    }


def mc_moment_batches(
    law: TailLaw,
    n: int,
    reps: int,
    rng: RngStream,
    batches: int = 16,
    max_chunk_entries: int = 1 << 23,
) -> dict[tuple[int, ...], np.ndarray]:
    """Batch means of the sphere-moment estimators over ``reps`` rows.

    Rows are self-normalized draws ``Y = X / |X|`` with ``X`` i.i.d. from
    ``law``; batch ``b`` uses the derived substream ``rng.generator(b)``.
    Returns, per moment key, the array of ``batches`` batch means.
    """
    if n < 4:
        raise ParameterDomainError("need n >= 4 for the quadruple moments")
    if reps < batches:
        raise ParameterDomainError("need at least one replication per batch")
    draws = _draws_per_entry(law)
    rows_per_chunk = max(1, max_chunk_entries // n)
    out = {key: np.empty(batches) for key in _FALLING_KEYS}
    base = reps // batches
    extra = reps % batches
    for b in range(batches):
        m_batch = base + (1 if b < extra else 0)
        gen = rng.generator(b)
        sums = {key: 0.0 for key in _FALLING_KEYS}
        done = 0
        while done < m_batch:
            m = min(rows_per_chunk, m_batch - done)
            u = gen.random((draws, m, n))
            x = _transform(law, u)
            norms_sq = np.einsum("ij,ij->i", x, x)
            if not np.all(norms_sq > 0.0):
                raise DegenerateInputError("zero row encountered in Monte Carlo draw")
            y2 = x * x / norms_sq[:, None]
            for key, vals in _row_estimates(y2, n).items():
                sums[key] += float(vals.sum())
            done += m
        for key in _FALLING_KEYS:
            out[key][b] = sums[key] / m_batch
    return out


def mc_moment_table(
    law: TailLaw, n: int, reps: int, rng: RngStream, batches: int = 16
) -> MomentTable:
    """Monte Carlo sphere table with batch-means standard errors.

    ``(2,)`` is pinned to exactly ``1/n`` (the sphere constraint makes the
    estimator deterministic).  Requires ``reps >= 1000``.
    """
    if reps < 1000:
        raise ParameterDomainError("moment estimation needs reps >= 1000")
    batch_means = mc_moment_batches(law, n, reps, rng, batches=batches)
    moments: dict[tuple[int, ...], Number] = {}
    se: dict[tuple[int, ...], float] = {}
    for key, means in batch_means.items():
        moments[key] = float(np.mean(means))
        se[key] = float(np.std(means, ddof=1) / math.sqrt(batches))
    moments[(2,)] = 1.0 / n
    se[(2,)] = 0.0
    return MomentTable(n=n, moments=moments, se=se)
