"""Moderate weight functions on phase space and multilinear weight conditions.

Weights are strictly positive and at most exponential; the built-in kinds are

* ``unit``                     constant one,
* ``poly:s=<s>``               ``(1 + |x|^2)^(s/2)``,
* ``exp:c=<c>``                ``e^(c |x|)`` with ``|c| <= 1``,
* ``split:<inner>@X`` / ``@Y`` inner weight acting on one half of a
                               two-block argument, unit on the other,
* products of the above.

The "bounded below" reading of the multilinear conditions is operational:
a sampled infimum over random tuples plus deterministic escape rays must
stay above ``1e-6``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

EXP_RATE_CAP = 1.0
INF_THRESHOLD = 1e-6
DEFAULT_SAMPLES = 10_000


class WeightError(ValueError):
    """Raised on malformed weights or arity mismatches."""


@dataclass(frozen=True)
class WeightSpec:
    """Declarative weight; evaluation happens in :meth:`__call__`."""

    kind: str  # unit | poly | exp | split | product
    param: float = 0.0
    inner: tuple["WeightSpec", ...] = ()
    block: str = ""  # "X" or "Y" for split

    def __post_init__(self):
        if self.kind not in ("unit", "poly", "exp", "split", "product"):
            raise WeightError(f"unknown weight kind {self.kind!r}")
        if self.kind == "exp" and abs(self.param) > EXP_RATE_CAP:
            raise WeightError(f"exponential rate |c| must be <= {EXP_RATE_CAP}")
        if self.kind == "split":
            if self.block not in ("X", "Y") or len(self.inner) != 1:
                raise WeightError("split weight needs one inner weight and a block X or Y")
        if self.kind == "product" and len(self.inner) < 1:
            raise WeightError("product weight needs at least one factor")

    def __call__(self, point: Sequence[float]) -> float:
        return float(self.evaluate_blocks(np.asarray(point, dtype=float)))

    def evaluate_blocks(self, point: np.ndarray) -> float:
        if self.kind == "unit":
            return 1.0
        if self.kind == "poly":
            return float((1.0 + np.dot(point, point)) ** (self.param / 2))
        if self.kind == "exp":
            return float(math.exp(self.param * math.sqrt(np.dot(point, point))))
        if self.kind == "split":
            if len(point) % 2:
                raise WeightError("split weight needs an even-dimensional argument")
            half = len(point) // 2
            part = point[:half] if self.block == "X" else point[half:]
            return self.inner[0].evaluate_blocks(part)
        return float(np.prod([w.evaluate_blocks(point) for w in self.inner]))

    def log_evaluate(self, point: np.ndarray) -> float:
        """Natural log of the weight; keeps escape-ray probes inside float range."""
        point = np.asarray(point, dtype=float)
        if self.kind == "unit":
            return 0.0
        if self.kind == "poly":
            return float(self.param / 2 * math.log1p(np.dot(point, point)))
        if self.kind == "exp":
            return float(self.param * math.sqrt(np.dot(point, point)))
        if self.kind == "split":
            half = len(point) // 2
            part = point[:half] if self.block == "X" else point[half:]
            return self.inner[0].log_evaluate(part)
        return float(sum(w.log_evaluate(point) for w in self.inner))

    def evaluate_grid(self, coords: Sequence[np.ndarray]) -> np.ndarray:
        """Broadcast evaluation over per-axis coordinate arrays."""
        if self.kind == "unit":
            return np.ones(1)
        if self.kind == "poly":
            sq = sum(c**2 for c in coords)
            return (1.0 + sq) ** (self.param / 2)
        if self.kind == "exp":
            sq = sum(c**2 for c in coords)
            return np.exp(self.param * np.sqrt(sq))
        if self.kind == "split":
            half = len(coords) // 2
            part = coords[:half] if self.block == "X" else coords[half:]
            return self.inner[0].evaluate_grid(part)
        out = np.ones(1)
        for w in self.inner:
            out = out * w.evaluate_grid(coords)
        return out

    def moderator(self) -> "WeightSpec":
        """A submultiplicative weight moderating this one."""
        if self.kind == "unit":
            return unit_weight()
        if self.kind == "poly":
            return WeightSpec("poly", abs(self.param))
        if self.kind == "exp":
            return WeightSpec("exp", abs(self.param))
        if self.kind == "split":
            return WeightSpec("split", 0.0, (self.inner[0].moderator(),), self.block)
        return WeightSpec("product", 0.0, tuple(w.moderator() for w in self.inner))

    def reciprocal(self) -> "WeightSpec":
        if self.kind == "unit":
            return unit_weight()
        if self.kind in ("poly", "exp"):
            return WeightSpec(self.kind, -self.param)
        if self.kind == "split":
            return WeightSpec("split", 0.0, (self.inner[0].reciprocal(),), self.block)
        return WeightSpec("product", 0.0, tuple(w.reciprocal() for w in self.inner))

    def literal(self) -> str:
        if self.kind == "unit":
            return "unit"
        if self.kind == "poly":
            return f"poly:s={_fmt(self.param)}"
        if self.kind == "exp":
            return f"exp:c={_fmt(self.param)}"
        if self.kind == "split":
            return f"split:{self.inner[0].literal()}@{self.block}"
        return "*".join(w.literal() for w in self.inner)


def _fmt(x: float) -> str:
    return f"{x:g}"


def unit_weight() -> WeightSpec:
    return WeightSpec("unit")


def poly_weight(s: float) -> WeightSpec:
    return WeightSpec("poly", float(s))


def exp_weight(c: float) -> WeightSpec:
    return WeightSpec("exp", float(c))


def split_weight(inner: WeightSpec, block: str) -> WeightSpec:
    return WeightSpec("split", 0.0, (inner,), block)


def parse_weight(text: str) -> WeightSpec:
    """Parse the CLI weight grammar (``unit``, ``poly:s=1.5``, ``exp:c=0.25``,
    ``split:poly:s=1@Y`` and ``*``-joined products)."""
    text = text.strip()
    if "*" in text:
        return WeightSpec("product", 0.0, tuple(parse_weight(p) for p in text.split("*")))
    if text == "unit":
        return unit_weight()
    if text.startswith("split:"):
        body = text[len("split:"):]
        if "@" not in body:
            raise WeightError(f"split weight needs a block marker: {text!r}")
        inner_text, block = body.rsplit("@", 1)
        return split_weight(parse_weight(inner_text), block.strip())
    if text.startswith("poly:s="):
        return poly_weight(float(text[len("poly:s="):]))
    if text.startswith("exp:c="):
        return exp_weight(float(text[len("exp:c="):]))
    raise WeightError(f"cannot parse weight literal {text!r}")


def parse_weight_list(text: str, expected: int | None = None) -> tuple[WeightSpec, ...]:
    parts = [parse_weight(p) for p in text.split(",")]
    if expected is not None and len(parts) != expected:
        raise WeightError(f"expected {expected} weights, got {len(parts)}")
    return tuple(parts)


def verify_moderate(w: WeightSpec, v: WeightSpec, samples: np.ndarray) -> tuple[bool, float]:
    """Check ``w(x + y) <= C * w(x) v(y)`` over sample pairs.

    ``samples`` has shape ``(count, 2, dim)``; returns ``(ok, worst_ratio)``
    where ``worst_ratio`` is the smallest admissible ``C`` on the samples and
    ``ok`` flags it as finite.
    """
    worst = 0.0
    for x, y in samples:
        ratio = w(x + y) / (w(x) * v(y))
        worst = max(worst, ratio)
    return bool(np.isfinite(worst)), worst


def _tuple_arguments(kind: str, points: np.ndarray, A: np.ndarray | None, d: int) -> np.ndarray:
    """Arguments fed to each weight for one sampled tuple ``(X_0..X_N)``.

    Returns an array of shape ``(N + 1, 4d)``: row 0 is the output-slot
    argument, row j >= 1 belongs to the j-th factor.
    """
    n_plus_1 = points.shape[0]
    out = np.empty((n_plus_1, 4 * d))
    pairs = [(points[-1], points[0])] + [(points[j], points[j - 1]) for j in range(1, n_plus_1)]
    for row, (X, Y) in enumerate(pairs):
        if kind == "weyl":
            out[row] = np.concatenate([X + Y, X - Y])
        elif kind == "twist":
            out[row] = np.concatenate([X - Y, X + Y])
        elif kind == "a-calculus":
            x, xi = X[:d], X[d:]
            y, eta = Y[:d], Y[d:]
            out[row] = np.concatenate([y + A @ (x - y), xi + A.T @ (eta - xi), eta - xi, x - y])
        else:
            raise WeightError(f"unknown condition kind {kind!r}")
    return out


#: geometric ray ladder; the far end is what catches slowly decaying products
RAY_RADII = (1.0, 1e1, 1e2, 1e4, 1e6, 1e8)


def _escape_tuples(n_factors: int, d: int) -> list[np.ndarray]:
    """Deterministic rays probing the generic failure directions.

    Sends single points, the two end points in opposite directions, and the
    whole tuple off along each coordinate axis, over a geometric radius
    ladder; log-space evaluation keeps even the far rays finite.
    """
    tuples = []
    dim = 2 * d
    for t in RAY_RADII:
        for axis in range(dim):
            e = np.zeros(dim)
            e[axis] = t
            for j in range(n_factors + 1):
                pts = np.zeros((n_factors + 1, dim))
                pts[j] = e
                tuples.append(pts)
            pts = np.zeros((n_factors + 1, dim))
            pts[-1], pts[0] = e, -e
            tuples.append(pts)
            tuples.append(np.tile(e, (n_factors + 1, 1)))
    return tuples


def product_weight_condition(
    kind: str,
    weights: Sequence[WeightSpec],
    A: np.ndarray | float | None = None,
    sample_count: int = DEFAULT_SAMPLES,
    seed: int = 0,
    d: int = 1,
    radius: float = 32.0,
) -> tuple[bool, float]:
    """Estimate the infimum of the multilinear weight product.

    ``kind`` selects the coordinate pattern: ``weyl`` pairs sums with
    differences, ``twist`` swaps the two blocks, ``a-calculus`` runs the
    sheared pattern for the quantization matrix ``A``.  The estimate combines
    ``sample_count`` uniform random tuples with deterministic escape rays;
    the condition counts as satisfied when the sampled infimum stays above
    ``1e-6``.
    """
    n_factors = len(weights) - 1
    if n_factors < 1:
        raise WeightError("need at least two weights (output slot plus factors)")
    if kind == "a-calculus":
        if A is None:
            raise WeightError("a-calculus condition needs the matrix A")
        A = np.atleast_2d(np.asarray(A, dtype=float))
    else:
        A = None
    rng = np.random.default_rng(seed)
    log_inf = math.inf
    tuples = _escape_tuples(n_factors, d)
    for k in range(sample_count):
        pts = rng.uniform(-radius, radius, size=(n_factors + 1, 2 * d))
        tuples.append(pts)
    for pts in tuples:
        args = _tuple_arguments(kind, pts, A, d)
        log_prod = sum(w.log_evaluate(args[row]) for row, w in enumerate(weights))
        log_inf = min(log_inf, log_prod)
    inf_estimate = math.exp(log_inf) if log_inf > -745 else 0.0
    return bool(inf_estimate >= INF_THRESHOLD), float(inf_estimate)
