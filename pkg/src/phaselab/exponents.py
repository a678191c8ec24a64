"""Exact arithmetic over extended Lebesgue exponents.

Exponents ``p`` range over ``(0, infinity]`` and are stored through their
reciprocals, so that ``p = infinity`` is the ordinary number ``0`` and all the
functionals below become affine/min expressions in the reciprocal vector.
Whenever the inputs are rational the whole calculus stays in
:class:`fractions.Fraction`; the boundary cases of the boundedness conditions
(several of which hold exactly at equality) are then decided without rounding.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[Fraction, int, float]

CRITERIA = ("bilinear-base", "cotowa-2.5", "prop-A", "thm-B", "twist", "prop2-pattern")

#: fixed rational search grid for the interpolation parameter ``v``
V_GRID: tuple[Fraction, ...] = tuple(
    [Fraction(64 + k, 64) for k in range(64)]
    + [Fraction(64, k) for k in range(1, 65)]
    + [Fraction(0)]  # stands for v = infinity (reciprocal 0)
)


def _coerce(x: Scalar) -> Fraction | float:
    """Return ``x`` as Fraction when exactly representable, else float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # floats are binary rationals; keep them exact so comparisons at
        # equality (the interesting cases) never depend on epsilons
        return Fraction(x) if x == x and abs(x) != float("inf") else x
    raise TypeError(f"cannot interpret {x!r} as a reciprocal")


class ExponentError(ValueError):
    """Raised on malformed exponents, tuples or rejected inputs."""


@dataclass(frozen=True, order=False)
class Exponent:
    """Extended Lebesgue exponent in ``(0, infinity]`` stored as a reciprocal."""

    reciprocal: Fraction

    def __post_init__(self):
        r = _coerce(self.reciprocal)
        if not isinstance(r, Fraction):
            raise ExponentError(f"reciprocal must be a finite rational, got {r!r}")
        if r < 0:
            raise ExponentError(f"reciprocal must be nonnegative, got {r}")
        object.__setattr__(self, "reciprocal", r)

    @classmethod
    def from_value(cls, value) -> "Exponent":
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            return parse_exponent(value)
        if value == float("inf"):
            return cls(Fraction(0))
        v = _coerce(value)
        if v <= 0:
            raise ExponentError(f"exponent value must be positive, got {value}")
        return cls(1 / v)

    @property
    def is_infinite(self) -> bool:
        return self.reciprocal == 0

    @property
    def value(self) -> float:
        return float("inf") if self.is_infinite else float(1 / self.reciprocal)

    @property
    def exact_value(self) -> Fraction | None:
        return None if self.is_infinite else 1 / self.reciprocal

    @property
    def in_banach_range(self) -> bool:
        return 0 <= self.reciprocal <= 1

    def conjugate(self) -> "Exponent":
        r = self.reciprocal
        if r >= 1:  # p in (0, 1] -> infinity
            return Exponent(Fraction(0))
        if r == 0:  # p = infinity -> 1
            return Exponent(Fraction(1))
        return Exponent(1 - r)

    def __str__(self) -> str:
        return "inf" if self.is_infinite else str(1 / self.reciprocal)


def parse_exponent(text: str) -> Exponent:
    """Parse ``"2"``, ``"4/3"``, ``"2.5"`` or ``"inf"`` into an Exponent."""
    t = text.strip().lower()
    if t in ("inf", "infty", "infinity", "oo"):
        return Exponent(Fraction(0))
    try:
        return Exponent.from_value(Fraction(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise ExponentError(f"cannot parse exponent literal {text!r}") from exc


@dataclass(frozen=True)
class ExponentTuple:
    """``(N+1)``-tuple of exponents indexed ``0..N``."""

    entries: tuple[Exponent, ...]

    def __post_init__(self):
        entries = tuple(Exponent.from_value(e) for e in self.entries)
        if len(entries) < 2:
            raise ExponentError("an exponent tuple needs at least two entries")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def parse(cls, text: str) -> "ExponentTuple":
        return cls(tuple(parse_exponent(part) for part in text.split(",")))

    @classmethod
    def from_reciprocals(cls, recips: Iterable[Scalar]) -> "ExponentTuple":
        return cls(tuple(Exponent(_coerce(r)) for r in recips))

    @property
    def n_factors(self) -> int:
        return len(self.entries) - 1

    def reciprocals(self) -> tuple[Fraction, ...]:
        return tuple(e.reciprocal for e in self.entries)

    def conjugate(self) -> "ExponentTuple":
        return ExponentTuple(tuple(e.conjugate() for e in self.entries))

    def in_banach_range(self) -> bool:
        return all(e.in_banach_range for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, j: int) -> Exponent:
        return self.entries[j]

    def __str__(self) -> str:
        return ",".join(str(e) for e in self.entries)


def conjugate_reciprocals(x: Sequence[Scalar]) -> tuple[Fraction, ...]:
    """Reciprocals of the conjugate exponents for reciprocals in ``[0, 1]``."""
    out = []
    for r in x:
        r = _coerce(r)
        if not 0 <= r <= 1:
            raise ExponentError(f"reciprocal {r} outside [0,1]; conjugate undefined here")
        out.append(1 - r)
    return tuple(out)


def holder_excess(x: Sequence[Scalar]) -> Fraction:
    """Normalized excess of a reciprocal vector over the Hoelder budget.

    For an ``(N+1)``-vector this is ``(sum x_j - 1) / (N - 1)``; the sign
    decides whether an ``N``-fold product of the corresponding spaces can
    stay within the scale at all.  Requires ``N >= 2``.
    """
    x = [_coerce(v) for v in x]
    n_factors = len(x) - 1
    if n_factors < 2:
        raise ExponentError(f"excess functional needs N >= 2, got N = {n_factors}")
    return (sum(x) - 1) / Fraction(n_factors - 1)


@functools.lru_cache(maxsize=None)
def _odd_pairs(m: int):
    """Ordered index pairs (j, k), 0 <= j,k <= m, with j + k odd."""
    return tuple((j, k) for j in range(m + 1) for k in range(m + 1) if (j + k) % 2 == 1)


def oddpair_minima(x: Sequence[Scalar], y: Sequence[Scalar] | None = None):
    """Minima of pair means over opposite-parity index pairs.

    Returns ``(plain, balanced, argmin)`` where ``plain`` is the minimum of
    ``(x_j + y_k)/2`` over ordered pairs with ``j + k`` odd, ``balanced``
    additionally takes ``1 - (x_j + y_k)/2`` into account, and ``argmin``
    is the pair realizing the balanced minimum.
    """
    x = [_coerce(v) for v in x]
    y = x if y is None else [_coerce(v) for v in y]
    if len(x) != len(y):
        raise ExponentError("mismatched reciprocal vector lengths")
    n_factors = len(x) - 1
    if n_factors < 1:
        raise ExponentError("pair functional needs N >= 1")
    plain = None
    balanced = None
    argmin = None
    for j, k in _odd_pairs(n_factors):
        mean = (x[j] + y[k]) / 2
        if plain is None or mean < plain:
            plain = mean
        cand = min(mean, 1 - mean)
        if balanced is None or cand < balanced:
            balanced = cand
            argmin = (j, k)
    return plain, balanced, argmin


@dataclass(frozen=True)
class ConditionReport:
    """Structured verdict of a boundedness-condition check.

    Float reciprocals are coerced to exact binary rationals on entry, so
    every comparison is exact and the rational-input slack is identically
    zero; ``lhs``/``rhs`` are float renderings of exact quantities kept in
    ``detail``.
    """

    criterion: str
    holds: bool
    lhs: float
    rhs: float
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "holds": self.holds,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def _require_same_shape(p: ExponentTuple, q: ExponentTuple):
    if p.n_factors != q.n_factors:
        raise ExponentError("p and q must have the same length")


def _require_odd(criterion: str, n_factors: int):
    if n_factors < 3 or n_factors % 2 == 0:
        raise ExponentError(f"criterion {criterion!r} needs odd N >= 3, got N = {n_factors}")


def _scaled_ints(vals: Sequence[Fraction], common: int) -> list[int]:
    return [v.numerator * (common // v.denominator) for v in vals]


def _int_pair_min(x: list[int], y: list[int], n: int, scale_q: int, full: int):
    """Minima over ordered opposite-parity pairs in scaled-integer arithmetic.

    ``scale_q`` multiplies the pair sum so that everything lives at one common
    scale; ``full`` is the scaled value of 1.  Returns (plain, balanced, argmin).
    """
    plain = None
    balanced = None
    argmin = None
    for j, k in _odd_pairs(n):
        mean = scale_q * (x[j] + y[k])
        if plain is None or mean < plain:
            plain = mean
        cand = min(mean, full - mean)
        if balanced is None or cand < balanced:
            balanced = cand
            argmin = (j, k)
    return plain, balanced, argmin


def check_conditions(criterion: str, p: ExponentTuple, q: ExponentTuple) -> ConditionReport:
    """Evaluate one of the named exponent conditions exactly as displayed.

    ``bilinear-base``  two-sided sign condition on the excess functionals;
    ``cotowa-2.5``     the always-sufficient entrywise condition;
    ``prop-A``         balanced pair minima of ``1/p``, ``1/q'`` and the mixed pair;
    ``thm-B``          as prop-A but with the plain (unbalanced) ``1/q'`` minimum;
    ``twist``          thm-B with the roles of ``p`` and ``q`` exchanged;
    ``prop2-pattern``  membership test for the endpoint exponent patterns.

    All reciprocals are exact rationals, so the whole evaluation runs in
    common-denominator integer arithmetic and verdicts at equality (which
    several worked instances hit) are reliable.
    """
    if criterion not in CRITERIA:
        raise ExponentError(f"unknown criterion {criterion!r}")
    _require_same_shape(p, q)
    n = p.n_factors
    if not (p.in_banach_range() and q.in_banach_range()):
        raise ExponentError("condition predicates need exponents in [1, infinity]")

    if criterion == "prop2-pattern":
        return _check_prop2_pattern(p, q)

    rp = p.reciprocals()
    rq = q.reciprocals()
    den = 1
    for v in itertools.chain(rp, rq):
        den = den * v.denominator // math.gcd(den, v.denominator)
    # common scale for every functional: pair means carry 1/(2 den), the
    # excess functionals 1/((n-1) den)
    scale = 2 * (n - 1) * den if n >= 2 else 2 * den
    np_ = _scaled_ints(rp, den)
    nq_ = _scaled_ints(rq, den)
    npc = [den - v for v in np_]
    nqc = [den - v for v in nq_]

    def excess(nums):  # value of the excess functional at the common scale
        return 2 * (sum(nums) - den)

    def frac(x):
        return Fraction(x, scale)

    detail: dict = {}
    if criterion == "bilinear-base":
        r_qc, r_p = excess(nqc), excess(np_)
        lhs = max(r_qc, 0)
        rhs = min(0, r_p)
        detail = {"R(1/q')": frac(r_qc), "R(1/p)": frac(r_p)}
    elif criterion == "cotowa-2.5":
        r_qc, r_p = excess(nqc), excess(np_)
        lhs = max(r_qc, 0)
        entrywise = 2 * (n - 1) * min(min(np_), min(npc), min(nq_), min(nqc))
        rhs = min(entrywise, r_p)
        detail = {"R(1/q')": frac(r_qc), "R(1/p)": frac(r_p),
                  "entrywise_min": frac(entrywise)}
    elif criterion in ("prop-A", "thm-B"):
        _require_odd(criterion, n)
        r_qc, r_p = excess(nqc), excess(np_)
        _, q_p, arg_p = _int_pair_min(np_, np_, n, n - 1, scale)
        plain_qc, q_qc, arg_qc = _int_pair_min(nqc, nqc, n, n - 1, scale)
        _, q_pq, arg_pq = _int_pair_min(np_, nq_, n, n - 1, scale)
        lhs = max(r_qc, 0)
        qc_term = q_qc if criterion == "prop-A" else plain_qc
        rhs = min(q_p, qc_term, q_pq, r_p)
        detail = {
            "R(1/q')": frac(r_qc),
            "R(1/p)": frac(r_p),
            "Q(1/p)": frac(q_p),
            "Q(1/q')": frac(q_qc),
            "Q0(1/q')": frac(plain_qc),
            "Q(1/p,1/q)": frac(q_pq),
            "argmin(1/p)": arg_p,
            "argmin(1/q')": arg_qc,
            "argmin(1/p,1/q)": arg_pq,
        }
    else:  # twist: p and q change roles
        _require_odd(criterion, n)
        r_pc, r_q = excess(npc), excess(nq_)
        _, q_q, _ = _int_pair_min(nq_, nq_, n, n - 1, scale)
        plain_pc, _, _ = _int_pair_min(npc, npc, n, n - 1, scale)
        _, q_pq, arg_pq = _int_pair_min(np_, nq_, n, n - 1, scale)
        lhs = max(r_pc, 0)
        rhs = min(q_q, plain_pc, q_pq, r_q)
        detail = {
            "R(1/p')": frac(r_pc),
            "R(1/q)": frac(r_q),
            "Q(1/q)": frac(q_q),
            "Q0(1/p')": frac(plain_pc),
            "Q(1/p,1/q)": frac(q_pq),
            "argmin(1/p,1/q)": arg_pq,
        }

    holds = lhs <= rhs  # exact integer comparison at the common scale
    return ConditionReport(criterion, bool(holds), float(frac(lhs)), float(frac(rhs)), detail)


def _check_prop2_pattern(p: ExponentTuple, q: ExponentTuple) -> ConditionReport:
    """Does ``(p, q)`` match one of the endpoint exponent patterns?

    The endpoint results only involve diagonal spaces, so ``q`` must equal
    ``p`` and ``p`` itself must match ``pattern_exponents`` for some variant
    with base exponent read from entry 0.
    """
    n = p.n_factors
    _require_odd("prop2-pattern", n)
    base = p.entries[0]
    best = None
    matched = None
    for variant in (1, 2):
        pattern = pattern_exponents(n, base, variant)
        dev = max(
            max(abs(a.reciprocal - b.reciprocal) for a, b in zip(p.entries, pattern.entries)),
            max(abs(a.reciprocal - b.reciprocal) for a, b in zip(q.entries, pattern.entries)),
        )
        if best is None or dev < best:
            best, matched = dev, variant
    holds = best == 0
    return ConditionReport(
        "prop2-pattern", bool(holds), float(best), 0.0, {"variant": matched, "base": str(base)}
    )


def pattern_exponents(n_factors: int, p: Exponent, variant: int) -> ExponentTuple:
    """Endpoint exponent patterns of the diagonal-space propositions.

    Variant 1 pins both end entries to ``p`` and alternates the interior,
    ``max(1, p)`` on even slots and ``p'`` on odd ones; variant 2 is the pure
    alternation ``p`` on even slots, ``p'`` on odd slots.  Quasi-range ``p``
    (reciprocal above 1) is allowed.
    """
    if n_factors < 3 or n_factors % 2 == 0:
        raise ExponentError(f"patterns need odd N >= 3, got {n_factors}")
    if variant not in (1, 2):
        raise ExponentError(f"variant must be 1 or 2, got {variant}")
    p = Exponent.from_value(p)
    conj = p.conjugate()
    clipped = Exponent(min(p.reciprocal, Fraction(1)))  # max(1, p) as an exponent
    entries = []
    for j in range(n_factors + 1):
        if variant == 1:
            if j in (0, n_factors):
                entries.append(p)
            elif j % 2 == 0:
                entries.append(clipped)
            else:
                entries.append(conj)
        else:
            entries.append(p if j % 2 == 0 else conj)
    return ExponentTuple(tuple(entries))


def implication_chain(x: Sequence[Scalar], mode: str = "odd-pairs"):
    """Evaluate the three chained inequalities on a reciprocal vector.

    ``odd-pairs`` uses pair means ``(x_j + x_k)/2`` over opposite-parity
    pairs; ``all-pairs`` uses the entrywise form over all pairs.  Returns the
    boolean triple ``(c1, c2, c3)``; on any admissible vector ``c1`` implies
    ``c2`` implies ``c3``.
    """
    x = [_coerce(v) for v in x]
    n = len(x) - 1
    excess = holder_excess(x)
    if mode == "odd-pairs":
        if n < 3 or n % 2 == 0:
            raise ExponentError(f"odd-pairs mode needs odd N >= 3, got {n}")
        means = [(x[j] + x[k]) / 2 for j, k in _odd_pairs(n)]
        c1 = excess <= min(means)
        c2 = all(m <= Fraction(1, 2) for m in means)
        c3 = excess <= min(1 - m for m in means)
    elif mode == "all-pairs":
        if n < 2:
            raise ExponentError(f"all-pairs mode needs N >= 2, got {n}")
        c1 = excess <= min(x)
        c2 = all(x[j] + x[k] <= 1 for j in range(n + 1) for k in range(n + 1) if j != k)
        c3 = excess <= min(1 - v for v in x)
    else:
        raise ExponentError(f"unknown mode {mode!r}")
    return bool(c1), bool(c2), bool(c3)


@dataclass(frozen=True)
class InterpolationCertificate:
    """Outcome of the constructive interpolation-parameter search."""

    theta: Fraction
    v: Exponent
    r: ExponentTuple
    s: ExponentTuple
    feasible: bool
    residual: float
    branch: str
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "theta": str(self.theta),
            "v": str(self.v),
            "r": str(self.r),
            "s": str(self.s),
            "feasible": self.feasible,
            "residual": self.residual,
            "branch": self.branch,
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
        }


def _mix_target(recip: Fraction, theta: Fraction, v_recip: Fraction, even: bool):
    """Solve (1-theta)/r + theta/u = recip for 1/r; u is v' on even, v on odd slots."""
    u = (1 - v_recip) if even else v_recip
    return (recip - theta * u) / (1 - theta)


def _certificate_residual(
    p: ExponentTuple,
    q: ExponentTuple,
    theta: Fraction,
    v_recip: Fraction,
    r_recips: Sequence[Fraction],
    s_recips: Sequence[Fraction],
) -> Fraction:
    """Exact maximal violation of the mixing equations and the endpoint budget."""
    worst = Fraction(0)
    for j, (rp, rq) in enumerate(zip(p.reciprocals(), q.reciprocals())):
        u = (1 - v_recip) if j % 2 == 0 else v_recip
        worst = max(worst, abs((1 - theta) * r_recips[j] + theta * u - rp))
        worst = max(worst, abs((1 - theta) * s_recips[j] + theta * u - rq))
    sum_s_conj = sum(1 - rs for rs in s_recips)
    sum_r = sum(r_recips)
    worst = max(worst, max(Fraction(0), sum_s_conj - 1), max(Fraction(0), 1 - sum_r))
    for val in itertools.chain(r_recips, s_recips):
        worst = max(worst, max(Fraction(0), -val), max(Fraction(0), val - 1))
    return worst


def construct_interpolation(p: ExponentTuple, q: ExponentTuple) -> InterpolationCertificate:
    """Search for interpolation parameters reproducing ``(p, q)``.

    Requires the ``prop-A`` condition to hold; raises :class:`ExponentError`
    otherwise.  The returned certificate never claims feasibility unless the
    mixing equations, the endpoint budget and the reciprocal ranges verify
    exactly; when no admissible ``v`` exists the best violation found over
    the search grid is reported instead.
    """
    precheck = check_conditions("prop-A", p, q)
    if not precheck.holds:
        raise ExponentError("rejected input: prop-A condition fails for (p, q)")
    n = p.n_factors
    rp = p.reciprocals()
    rq = q.reciprocals()
    r_qc = holder_excess(conjugate_reciprocals(rq))
    theta = 2 * max(r_qc, Fraction(0))

    if theta == 0:
        resid = _certificate_residual(p, q, theta, Fraction(1, 2), rp, rq)
        return InterpolationCertificate(
            theta=theta,
            v=Exponent(Fraction(1, 2)),
            r=p,
            s=q,
            feasible=resid == 0,
            residual=float(resid),
            branch="theta-zero",
            detail={"R(1/q')": r_qc},
        )

    min_recip = min(min(rp), min(rq))
    delegated = min_recip > theta / 2

    if delegated:
        # the entrywise regime: the fixed self-conjugate v always verifies
        cotowa = check_conditions("cotowa-2.5", p, q)
        v_recip = Fraction(1, 2)
        r_recips = [_mix_target(x, theta, v_recip, j % 2 == 0) for j, x in enumerate(rp)]
        s_recips = [_mix_target(x, theta, v_recip, j % 2 == 0) for j, x in enumerate(rq)]
        resid = _certificate_residual(p, q, theta, v_recip, r_recips, s_recips)
        feasible = resid == 0
        return InterpolationCertificate(
            theta=theta,
            v=Exponent(v_recip),
            r=ExponentTuple.from_reciprocals(r_recips),
            s=ExponentTuple.from_reciprocals(s_recips),
            feasible=feasible,
            residual=float(resid),
            branch="delegated-2.5",
            detail={"cotowa-2.5": cotowa.holds, "min_reciprocal": min_recip},
        )

    # general case: scan v candidates; the proof's own choice first
    candidates: list[Fraction] = []
    if min_recip > 0:
        natural = min_recip / theta  # 1/v from 1/p_0 = theta/v
        if 0 <= natural <= 1:
            candidates.append(natural)
    else:
        candidates.append(Fraction(0))  # v = infinity
    for g in V_GRID:
        v_recip = Fraction(1) / g if g > 0 else Fraction(0)
        if v_recip not in candidates:
            candidates.append(v_recip)

    best_resid = None
    best = None
    for v_recip in candidates:
        if theta == 1:
            # mixing weights collapse: p and q must equal the alternating
            # pattern themselves and the base tuples are unconstrained; the
            # all-ones choice satisfies the endpoint budget trivially
            r_recips = [Fraction(1)] * (n + 1)
            s_recips = [Fraction(1)] * (n + 1)
            resid = _certificate_residual(p, q, theta, v_recip, r_recips, s_recips)
        else:
            r_recips = [_mix_target(x, theta, v_recip, j % 2 == 0) for j, x in enumerate(rp)]
            s_recips = [_mix_target(x, theta, v_recip, j % 2 == 0) for j, x in enumerate(rq)]
            resid = _certificate_residual(p, q, theta, v_recip, r_recips, s_recips)
        if best_resid is None or resid < best_resid:
            best_resid = resid
            best = (v_recip, r_recips, s_recips)
        if resid == 0:
            break

    v_recip, r_recips, s_recips = best
    feasible = best_resid == 0
    return InterpolationCertificate(
        theta=theta,
        v=Exponent(v_recip),
        r=ExponentTuple.from_reciprocals([min(max(x, Fraction(0)), Fraction(1)) for x in r_recips])
        if not feasible
        else ExponentTuple.from_reciprocals(r_recips),
        s=ExponentTuple.from_reciprocals([min(max(x, Fraction(0)), Fraction(1)) for x in s_recips])
        if not feasible
        else ExponentTuple.from_reciprocals(s_recips),
        feasible=feasible,
        residual=float(best_resid),
        branch="endpoint-mix" if feasible else "infeasible",
        detail={"candidates_tried": len(candidates), "min_reciprocal": min_recip},
    )
