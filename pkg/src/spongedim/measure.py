"""Bernoulli (self-affine) measures on a sponge and their cube/ball masses.

A Bernoulli measure assigns an exact rational weight p_i > 0 to every digit
tuple, summing to one; cylinder sets multiply weights.  The mass of an
approximate cube factors over coordinates into conditional one-step
probabilities, and that product is what the scanning diagnostics compare
against power-law bounds.  Exact values are kept as fractions while a
parallel log-space value is always available, so deep scans never overflow
and shallow computations stay exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    DigitOutOfRange,
    EnumerationTooLarge,
    PrefixNotInSponge,
    ScaleOutOfRange,
    SpongeFileError,
    ZeroMeasure,
)
from .cubes import DEFAULT_CAP, ScaleLike, as_scale, scale_exponents, _checked_word
from .model import DigitTuple, Prefix, Sponge

# Above this many factors cube masses are reported in log space only.
EXACT_FACTOR_BUDGET = 512


@dataclass(frozen=True)
class RationalLog:
    """A positive quantity carried exactly when cheap, in log space always.

    ``exact`` is None when the exact product was skipped for size reasons;
    ``log_value`` is the natural log (``-inf`` for an exact zero).
    """

    exact: Fraction | None
    log_value: float

    def __float__(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        return math.exp(self.log_value)


@dataclass(frozen=True)
class BernoulliMeasure:
    """Exact product measure on the symbolic space of a sponge."""

    sponge: Sponge
    weights: Mapping[DigitTuple, Fraction]
    _prefix_mass: tuple[dict[Prefix, Fraction], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        s = self.sponge
        w = {tuple(k): Fraction(v) for k, v in self.weights.items()}
        if set(w) != set(s.digits):
            missing = set(s.digits) - set(w)
            extra = set(w) - set(s.digits)
            raise DigitOutOfRange(
                f"weights must cover the digit set exactly "
                f"(missing {sorted(missing)}, extraneous {sorted(extra)})"
            )
        for k, v in w.items():
            if v <= 0:
                raise ZeroMeasure(f"weight of {k} must be positive, got {v}")
        total = sum(w.values())
        if total != 1:
            raise ScaleOutOfRange(f"weights must sum to exactly 1, got {total}")
        # mass of every projected prefix, per level 0..d
        tables: list[dict[Prefix, Fraction]] = []
        for l in range(s.d + 1):
            table: dict[Prefix, Fraction] = {}
            for t, v in w.items():
                p = t[:l]
                table[p] = table.get(p, Fraction(0)) + v
            tables.append(table)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_prefix_mass", tuple(tables))

    def prefix_mass(self, p: Prefix) -> Fraction:
        """Total weight of digit tuples starting with p (0 when none do)."""
        l = len(p)
        if not 0 <= l <= self.sponge.d:
            raise DigitOutOfRange(f"prefix length {l} is outside [0, {self.sponge.d}]")
        return self._prefix_mass[l].get(tuple(p), Fraction(0))


def coordinate_uniform(s: Sponge) -> BernoulliMeasure:
    """The measure that splits mass evenly at every coordinate refinement.

    Digit i gets weight 1/(N * prod_l N(i_1..i_{l-1})): uniform over the
    first-coordinate projection, then uniform over each successive fibre.
    """
    n_first = len(s.level_sets[1])
    weights: dict[DigitTuple, Fraction] = {}
    for t in s.digits:
        w = Fraction(1, n_first)
        for l in range(2, s.d + 1):
            w /= s.fibre_count(t[: l - 1])
        weights[t] = w
    return BernoulliMeasure(s, weights)


def conditional_prob(m: BernoulliMeasure, p: Sequence[int], nxt: int) -> Fraction:
    """P(coordinate len(p)+1 digit = nxt | prefix p), an exact fraction.

    Zero when the extended prefix is not a projection of any digit tuple.
    """
    prefix = tuple(p)
    denom = m.prefix_mass(prefix)
    if denom == 0:
        raise PrefixNotInSponge(f"prefix {prefix} carries no mass")
    return m.prefix_mass(prefix + (int(nxt),)) / denom


def cube_measure(
    m: BernoulliMeasure,
    w: Sequence[Sequence[int]],
    r: ScaleLike,
    exact_budget: int = EXACT_FACTOR_BUDGET,
) -> RationalLog:
    """Mass of the scale-r approximate cube around the word w.

    The cube pins coordinate l for the first k_l(r) positions, and its mass
    is the product over those positions of the one-step conditional
    probabilities p(i_{t,l} | i_{t,1}..i_{t,l-1}).  The exact product is
    carried only while the factor count stays within ``exact_budget``.
    """
    s = m.sponge
    ks = scale_exponents(s, r)
    word = _checked_word(s, w, ks.k[0])
    total_factors = sum(ks.k)
    exact: Fraction | None = Fraction(1) if total_factors <= exact_budget else None
    log_value = 0.0
    for l in range(s.d):
        for t in range(ks.k[l]):
            c = conditional_prob(m, word[t][:l], word[t][l])
            if c == 0:
                raise ZeroMeasure(
                    f"word entry {t} leaves the support at coordinate {l + 1}"
                )
            log_value += math.log(c)
            if exact is not None:
                exact *= c
    return RationalLog(exact, log_value)


def _interval_sq_bounds(
    c: Fraction, lo: Fraction, hi: Fraction
) -> tuple[Fraction, Fraction]:
    """(min, max) squared distance from a point coordinate to an interval."""
    if c < lo:
        near = lo - c
    elif c > hi:
        near = c - hi
    else:
        near = Fraction(0)
    far = max(c - lo, hi - c)
    return near * near, far * far


def ball_measure_bounds(
    m: BernoulliMeasure,
    center: Sequence[ScaleLike],
    radius: ScaleLike,
    depth: int,
    cap: int = DEFAULT_CAP,
) -> tuple[RationalLog, RationalLog]:
    """Exact lower/upper brackets for the mass of a Euclidean ball.

    The lower bracket sums depth-``depth`` cylinders whose covering boxes sit
    entirely inside the closed ball; the upper bracket sums those whose boxes
    meet the open ball.  Sub-trees fully inside or fully outside are resolved
    without descending, so the enumeration usually stays far below |D|^depth.
    Both brackets are monotone in ``depth``: deeper runs can only tighten.
    A radius of zero degenerates to (0, mass of cylinders through the point).
    """
    s = m.sponge
    if depth < 0:
        raise ScaleOutOfRange(f"depth must be >= 0, got {depth}")
    c = tuple(Fraction(x) if isinstance(x, (int, Fraction)) else as_scale(x) for x in center)
    if len(c) != s.d:
        raise DigitOutOfRange(f"center has {len(c)} coordinates, expected {s.d}")
    rad = Fraction(radius) if isinstance(radius, (int, Fraction)) else as_scale(radius)
    if rad < 0:
        raise ScaleOutOfRange(f"radius must be >= 0, got {rad}")
    r2 = rad * rad

    lower = Fraction(0)
    upper = Fraction(0)
    visited = 0

    def descend(level: int, nums: tuple[int, ...], mass: Fraction) -> None:
        nonlocal lower, upper, visited
        visited += 1
        if visited > cap:
            raise EnumerationTooLarge(f"ball bracket enumeration exceeded cap {cap}")
        min_sq = Fraction(0)
        max_sq = Fraction(0)
        for l in range(s.d):
            den = s.bases[l] ** level
            lo = Fraction(nums[l], den)
            hi = Fraction(nums[l] + 1, den)
            near, far = _interval_sq_bounds(c[l], lo, hi)
            min_sq += near
            max_sq += far
        meets_ball = min_sq < r2 if rad > 0 else min_sq == 0
        if not meets_ball:
            return
        if rad > 0 and max_sq <= r2:
            lower += mass
            upper += mass
            return
        if level == depth:
            upper += mass
            return
        for t in s.digits:
            child = tuple(nums[l] * s.bases[l] + t[l] for l in range(s.d))
            descend(level + 1, child, mass * m.weights[t])

    descend(0, (0,) * s.d, Fraction(1))

    def wrap(x: Fraction) -> RationalLog:
        return RationalLog(x, math.log(x) if x > 0 else -math.inf)

    return wrap(lower), wrap(upper)


def weights_to_json(m: BernoulliMeasure) -> str:
    """Serialize weights as a JSON map 'i1,i2,...' -> 'p/q' in digit order."""
    out = {
        ",".join(str(e) for e in t): f"{w.numerator}/{w.denominator}"
        for t, w in sorted(m.weights.items())
    }
    return json.dumps(out, indent=2)


def measure_from_json(s: Sponge, text: str) -> BernoulliMeasure:
    """Parse a probability vector file for the given sponge.

    The document must be a JSON object mapping digit-tuple strings
    'i1,i2,...,id' to rational strings 'p/q' (or decimal strings, which are
    converted exactly); the weights must sum to exactly one.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpongeFileError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise SpongeFileError("weight file must be a JSON object")
    if "weights" in doc and isinstance(doc["weights"], dict):
        doc = doc["weights"]
    weights: dict[DigitTuple, Fraction] = {}
    for key, value in doc.items():
        try:
            t = tuple(int(part) for part in key.split(","))
        except ValueError:
            raise SpongeFileError(f"bad digit key {key!r}") from None
        try:
            weights[t] = Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            raise SpongeFileError(f"bad weight {value!r} for key {key!r}") from None
    return BernoulliMeasure(s, weights)


def load_measure(s: Sponge, path: str) -> BernoulliMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return measure_from_json(s, text)
    except SpongeFileError as e:
        raise SpongeFileError(f"{path}: {e}") from None


def positive_weight_grid(s: Sponge, step: ScaleLike):
    """Every strictly positive weight vector on the step-grid simplex.

    ``step`` must be 1/q for an integer q >= |D|.  Yields one measure per
    assignment of multiples a/q (a >= 1) to the sorted digits summing to 1,
    in lexicographic order, so downstream sweeps are deterministic.
    """
    h = as_scale(step)
    if h.numerator != 1 or h.denominator < 2:
        raise ScaleOutOfRange(f"grid step must be 1/q with q >= 2, got {h}")
    q = h.denominator
    digits = sorted(s.digit_set)
    m = len(digits)
    if q < m:
        raise ScaleOutOfRange(
            f"grid step 1/{q} leaves no positive vector for {m} digits"
        )

    def splits(i: int, remaining: int):
        if i == m - 1:
            yield (remaining,)
            return
        for a in range(1, remaining - (m - 1 - i) + 1):
            for rest in splits(i + 1, remaining - a):
                yield (a,) + rest

    for combo in splits(0, q):
        yield BernoulliMeasure(
            s, {t: Fraction(a, q) for t, a in zip(digits, combo)}
        )
