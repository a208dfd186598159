"""Property harness over sponges and measures.

Everything here checks a quantitative claim numerically instead of proving
it: measure-ratio sandwiches over random cube samples, ball-ratio scaling
with the sharp constants under the separation condition, adjacent-cube
ratio growth as a non-doubling certificate, rescaled-piece convergence to
the product tangent set, and the equal-or-all-distinct audit.  Every scan
is deterministic given its seed, and reports serialize to JSON with fixed
key order so golden tests stay byte-stable.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    EnumerationTooLarge,
    NonStrictBases,
    ScaleOutOfRange,
    UnsupportedBoundaryTangent,
    VsscNotSatisfied,
)
from .cubes import (
    DEFAULT_CAP,
    ApproximateCube,
    Box,
    BoxSet,
    ScaleLike,
    approximate_cube,
    count_cubes,
    geometric_box,
    scale_exponents,
)
from .dims import Dichotomy, assouad_dim, dichotomy, lower_dim
from .measure import (
    BernoulliMeasure,
    ball_measure_bounds,
    coordinate_uniform,
    cube_measure,
)
from .model import DigitTuple, Prefix, Sponge, satisfies_vssc

# Slack for float comparisons of quantities that are exact in principle.
_EPS = 1e-9

# A growth rate must exceed 1 by this much before non-doubling is declared.
GROWTH_TOL = 1e-6


class Mode(enum.Enum):
    """Which extremal branching the tangent construction follows."""

    MAX = "max"
    MIN = "min"


# ---------------------------------------------------------------------------
# extremal witnesses and the tangent word


def extremal_witnesses(s: Sponge, mode: Mode) -> dict[int, DigitTuple]:
    """One digit tuple per level l = 2..d attaining the extremal fibre count.

    Ties are broken lexicographically, first on the level-(l-1) prefix and
    then on the completing digits, so the choice is deterministic.
    """
    pick = max if mode is Mode.MAX else min
    out: dict[int, DigitTuple] = {}
    for l in range(2, s.d + 1):
        target = pick(s.fibre_count(p) for p in s.level_sets[l - 1])
        prefix = min(p for p in s.level_sets[l - 1] if s.fibre_count(p) == target)
        out[l] = min(t for t in s.digits if t[: l - 1] == prefix)
    return out


def tangent_word(s: Sponge, R: ScaleLike, mode: Mode) -> tuple[DigitTuple, ...]:
    """The length-k_1(R) word whose rescaled cube approaches the product set.

    Positions up to k_d(R) hold the lexicographically smallest digit; the
    block of positions (k_l(R), k_{l-1}(R)] repeats the level-l witness.
    Needs strictly increasing bases, otherwise the blocks are empty and the
    construction collapses.
    """
    if not s.strict_bases:
        raise NonStrictBases(
            f"tangent words require strictly increasing bases, got {s.bases}"
        )
    ks = scale_exponents(s, R).k
    witnesses = extremal_witnesses(s, mode)
    lead = min(s.digits)
    word: list[DigitTuple] = [lead] * ks[s.d - 1]
    for l in range(s.d, 1, -1):
        word.extend([witnesses[l]] * (ks[l - 2] - ks[l - 1]))
    return tuple(word)


# ---------------------------------------------------------------------------
# tangent maps


@dataclass(frozen=True)
class TangentMap:
    """Per-coordinate rescaling that sends a cube's bounding box to [0,1]^d.

    Coordinate l is translated by the box corner and scaled by n_l^{k_l},
    so the Lipschitz band [a, b] is the range of those scale factors and
    b/a is at most the largest base.
    """

    cube: ApproximateCube
    scales: tuple[int, ...]
    offsets: tuple[Fraction, ...]
    a: int
    b: int

    @classmethod
    def from_cube(cls, s: Sponge, q: ApproximateCube) -> "TangentMap":
        scales = tuple(
            s.bases[l] ** q.exponents.k[l] for l in range(s.d)
        )
        offsets = tuple(lo for lo, _ in geometric_box(s, q))
        return cls(q, scales, offsets, min(scales), max(scales))

    def apply_point(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(
            self.scales[l] * (Fraction(x[l]) - self.offsets[l])
            for l in range(len(self.scales))
        )

    def apply_box(self, box: Box) -> Box:
        return tuple(
            (
                self.scales[l] * (box[l][0] - self.offsets[l]),
                self.scales[l] * (box[l][1] - self.offsets[l]),
            )
            for l in range(len(self.scales))
        )


def tangent_map(s: Sponge, R: ScaleLike, mode: Mode) -> TangentMap:
    word = tangent_word(s, R, mode)
    return TangentMap.from_cube(s, approximate_cube(s, word, R))


# ---------------------------------------------------------------------------
# the product tangent set and its pre-fractals


def hat_digit_alphabets(s: Sponge, mode: Mode) -> tuple[tuple[int, ...], ...]:
    """Per-coordinate digit alphabets of the product tangent set.

    Coordinate 1 uses the first-coordinate projection of the digit set;
    coordinate l >= 2 uses the fibre over the level-l witness prefix.
    """
    witnesses = extremal_witnesses(s, mode)
    alphabets = [tuple(p[0] for p in s.level_sets[1])]
    for l in range(2, s.d + 1):
        alphabets.append(s.fibre(witnesses[l][: l - 1]))
    return tuple(alphabets)


def _require_interior(s: Sponge, alphabets: Sequence[Sequence[int]]) -> None:
    # A single boundary digit pins that coordinate factor to {0} or {1},
    # pushing the whole product set onto the boundary of the unit cube.
    for l, alpha in enumerate(alphabets):
        if len(alpha) == 1 and alpha[0] in (0, s.bases[l] - 1):
            raise UnsupportedBoundaryTangent(
                f"coordinate {l + 1} tangent factor is the boundary point "
                f"{alpha[0]}/{s.bases[l] - 1}; the product set misses the "
                f"open unit cube and this construction does not apply"
            )


def _factor_intervals(
    base: int, alphabet: Sequence[int], level: int
) -> list[tuple[Fraction, Fraction]]:
    """Level-`level` pre-fractal of a one-dimensional digit IFS, in order."""
    width = Fraction(1, base**level)
    out: list[tuple[Fraction, Fraction]] = []
    for digits in itertools.product(sorted(alphabet), repeat=level):
        lo = Fraction(0)
        for t, j in enumerate(digits, start=1):
            lo += Fraction(j, base**t)
        out.append((lo, lo + width))
    return out


def hat_set_prefractal(
    s: Sponge, mode: Mode, level: int, cap: int = DEFAULT_CAP
) -> BoxSet:
    """Level-`level` cover of the product tangent set as a box set.

    A coordinate whose alphabet is the full digit range contributes the
    single interval [0,1] (its factor is the whole interval); every other
    coordinate contributes its one-dimensional pre-fractal intervals.
    """
    if level < 0:
        raise ScaleOutOfRange(f"level must be >= 0, got {level}")
    alphabets = hat_digit_alphabets(s, mode)
    _require_interior(s, alphabets)
    one = Fraction(1)
    lists: list[list[tuple[Fraction, Fraction]]] = []
    total = 1
    for l, alpha in enumerate(alphabets):
        if len(alpha) == s.bases[l]:
            lists.append([(Fraction(0), one)])
        else:
            total *= len(alpha) ** level
            if total > cap:
                raise EnumerationTooLarge(
                    f"tangent-set cover needs more than {cap} boxes"
                )
            lists.append(_factor_intervals(s.bases[l], alpha, level))
    boxes = tuple(box for box in itertools.product(*lists))
    return BoxSet(boxes)


# ---------------------------------------------------------------------------
# rescaled cube pieces


def _image_position_choices(
    s: Sponge, word: tuple[DigitTuple, ...], ks: Sequence[int], level: int
) -> list[tuple[DigitTuple, ...]]:
    """Admissible digits per position for words refining the tangent cube."""
    digits = sorted(s.digit_set)
    choices: list[tuple[DigitTuple, ...]] = []
    for t in range(1, level + 1):
        pinned = [l for l in range(s.d) if ks[l] >= t]
        if not pinned:
            choices.append(tuple(digits))
            continue
        fixed = word[t - 1]
        choices.append(
            tuple(j for j in digits if all(j[l] == fixed[l] for l in pinned))
        )
    return choices


def tangent_image(
    s: Sponge, R: ScaleLike, mode: Mode, level: int, cap: int = DEFAULT_CAP
) -> BoxSet:
    """Rescale the level-`level` cover of the tangent cube to the unit cube.

    Enumerates the words of length `level` lying in the cube of the tangent
    word, takes their covering boxes, and pushes them through the cube's
    rescaling map.  All corners stay exact rationals.
    """
    _, boxes = _tangent_pieces(s, R, mode, level, cap)
    return boxes


def _tangent_pieces(
    s: Sponge, R: ScaleLike, mode: Mode, level: int, cap: int
) -> tuple[TangentMap, BoxSet]:
    word = tangent_word(s, R, mode)
    ks = scale_exponents(s, R).k
    if level < ks[0]:
        raise ScaleOutOfRange(
            f"cover level {level} is coarser than the cube depth {ks[0]}"
        )
    q = approximate_cube(s, word, R)
    tmap = TangentMap.from_cube(s, q)
    choices = _image_position_choices(s, word, ks, level)
    total = 1
    for c in choices:
        total *= len(c)
        if total > cap:
            raise EnumerationTooLarge(
                f"rescaled cover needs more than {cap} boxes"
            )
    sides = tuple(Fraction(1, s.bases[l] ** (level - ks[l])) for l in range(s.d))
    boxes: list[Box] = []
    lo = [Fraction(0)] * s.d

    def rec(t: int) -> None:
        if t == level:
            boxes.append(
                tuple(
                    (
                        (lo[l] - tmap.offsets[l]) * tmap.scales[l],
                        (lo[l] - tmap.offsets[l]) * tmap.scales[l] + sides[l],
                    )
                    for l in range(s.d)
                )
            )
            return
        saved = tuple(lo)
        for j in choices[t]:
            for l in range(s.d):
                lo[l] = saved[l] + Fraction(j[l], s.bases[l] ** (t + 1))
            rec(t + 1)
        for l in range(s.d):
            lo[l] = saved[l]

    rec(0)
    return tmap, BoxSet(tuple(boxes))


def _image_boxes_float(
    s: Sponge, R: ScaleLike, mode: Mode, level: int, cap: int
) -> list["FloatBox"]:
    """Same cover as tangent_image but with float corners, for metric work."""
    word = tangent_word(s, R, mode)
    ks = scale_exponents(s, R).k
    if level < ks[0]:
        raise ScaleOutOfRange(
            f"cover level {level} is coarser than the cube depth {ks[0]}"
        )
    q = approximate_cube(s, word, R)
    tmap = TangentMap.from_cube(s, q)
    choices = _image_position_choices(s, word, ks, level)
    total = 1
    for c in choices:
        total *= len(c)
        if total > cap:
            raise EnumerationTooLarge(
                f"rescaled cover needs more than {cap} boxes"
            )
    scales = [float(v) for v in tmap.scales]
    offsets = [float(v) for v in tmap.offsets]
    sides = [s.bases[l] ** (ks[l] - level) for l in range(s.d)]
    steps = [
        [[j[l] / s.bases[l] ** (t + 1) for l in range(s.d)] for j in choices[t]]
        for t in range(level)
    ]
    out: list[FloatBox] = []
    lo = [0.0] * s.d

    def rec(t: int) -> None:
        if t == level:
            out.append(
                tuple(
                    (
                        (lo[l] - offsets[l]) * scales[l],
                        (lo[l] - offsets[l]) * scales[l] + sides[l],
                    )
                    for l in range(s.d)
                )
            )
            return
        saved = tuple(lo)
        for deltas in steps[t]:
            for l in range(s.d):
                lo[l] = saved[l] + deltas[l]
            rec(t + 1)
        for l in range(s.d):
            lo[l] = saved[l]

    rec(0)
    return out


# ---------------------------------------------------------------------------
# Hausdorff-type distances between box sets


def _corner_dist(x: float, lo: float, hi: float) -> float:
    if x < lo:
        return lo - x
    if x > hi:
        return x - hi
    return 0.0


def _box_pair_sup(a: Box, b: Box) -> float:
    """max over points of a of the distance to b (corner closed form)."""
    total = 0.0
    for (alo, ahi), (blo, bhi) in zip(a, b):
        c = max(_corner_dist(float(alo), float(blo), float(bhi)),
                _corner_dist(float(ahi), float(blo), float(bhi)))
        total += c * c
    return math.sqrt(total)


def box_set_hausdorff(a: BoxSet, b: BoxSet) -> float:
    """Conservative symmetric distance between two box unions.

    For each box of one set, take the smallest worst-point distance to a
    single box of the other set, and maximize; then symmetrize.  This never
    underestimates the true Hausdorff distance between the unions, and is
    exact when each box of one set sits inside some box of the other.
    """
    if len(a) == 0 or len(b) == 0:
        raise ScaleOutOfRange("box sets must be non-empty")

    def directed(src: BoxSet, dst: BoxSet) -> float:
        worst = 0.0
        for box in src.boxes:
            best = math.inf
            for other in dst.boxes:
                v = _box_pair_sup(box, other)
                if v < best:
                    best = v
                    if best == 0.0:
                        break
            worst = max(worst, best)
        return worst

    return max(directed(a, b), directed(b, a))


def _merged_union(intervals: Iterable[tuple[Fraction, Fraction]]) -> tuple[list[float], list[float]]:
    """Sorted merged interval union as parallel float start/end lists."""
    starts: list[float] = []
    ends: list[float] = []
    for lo, hi in sorted(intervals):
        flo, fhi = float(lo), float(hi)
        if starts and flo <= ends[-1]:
            ends[-1] = max(ends[-1], fhi)
        else:
            starts.append(flo)
            ends.append(fhi)
    return starts, ends


def _point_union_dist(x: float, starts: list[float], ends: list[float]) -> float:
    i = bisect_right(starts, x) - 1
    best = math.inf
    if i >= 0:
        if x <= ends[i]:
            return 0.0
        best = x - ends[i]
    if i + 1 < len(starts):
        best = min(best, starts[i + 1] - x)
    return best


def _interval_sup_dist(u: float, v: float, starts: list[float], ends: list[float]) -> float:
    """sup over x in [u,v] of the distance from x to the interval union."""
    best = max(_point_union_dist(u, starts, ends), _point_union_dist(v, starts, ends))
    # interior maxima sit at midpoints of coverage gaps inside [u, v]
    i = max(bisect_right(starts, u) - 1, 0)
    while i + 1 < len(starts) and starts[i + 1] < v:
        gap_lo, gap_hi = ends[i], starts[i + 1]
        mid = (gap_lo + gap_hi) / 2.0
        if u <= mid <= v:
            best = max(best, (gap_hi - gap_lo) / 2.0)
        i += 1
    return best


FloatBox = tuple[tuple[float, float], ...]


def _directed_boxes_to_product(
    boxes: Sequence[FloatBox], factors: list[tuple[list[float], list[float]]]
) -> float:
    worst = 0.0
    for box in boxes:
        total = 0.0
        for (lo, hi), (starts, ends) in zip(box, factors):
            c = _interval_sup_dist(lo, hi, starts, ends)
            total += c * c
        worst = max(worst, total)
    return math.sqrt(worst)


def _directed_product_to_boxes(
    s: Sponge,
    alphabets: Sequence[Sequence[int]],
    level: int,
    boxes: Sequence[FloatBox],
) -> float:
    """Worst distance from the product cover's cell corners to the box union.

    The product cover at this refinement is a union of grid-aligned cells,
    so its corner set is the product of the per-coordinate cell endpoints.
    Each corner's exact distance to the union is found by hashing boxes
    into the regular grid and searching outward ring by ring.  Interior
    points of a cell can sit at most half a cell diagonal farther out,
    which the caller's resolution slack absorbs.
    """
    d = s.d
    res = [s.bases[l] ** level for l in range(d)]
    min_side = min(1.0 / r for r in res)

    bucket: dict[tuple[int, ...], list[FloatBox]] = {}
    for box in boxes:
        key = tuple(
            min(int(((box[l][0] + box[l][1]) / 2) * res[l]), res[l] - 1)
            for l in range(d)
        )
        bucket.setdefault(key, []).append(box)

    def endpoint_values(l: int) -> list[float]:
        alpha = sorted(alphabets[l])
        vals = [0]
        for _ in range(level):
            vals = [v * s.bases[l] + j for v in vals for j in alpha]
        points = sorted({v for v in vals} | {v + 1 for v in vals})
        return [p / res[l] for p in points]

    corners = [endpoint_values(l) for l in range(d)]
    worst = 0.0
    max_ring = max(res) + 1
    for x in itertools.product(*corners):
        idx = tuple(min(int(x[l] * res[l]), res[l] - 1) for l in range(d))
        best = math.inf
        for ring in range(0, max_ring + 1):
            if ring > 1 and (ring - 1) * min_side >= best:
                break
            for off in itertools.product(range(-ring, ring + 1), repeat=d):
                if max(abs(o) for o in off) != ring:
                    continue
                key = tuple(idx[l] + off[l] for l in range(d))
                for other in bucket.get(key, ()):
                    total = 0.0
                    for l in range(d):
                        c = _corner_dist(x[l], other[l][0], other[l][1])
                        total += c * c
                    v = math.sqrt(total)
                    if v < best:
                        best = v
        worst = max(worst, best)
    return worst


@dataclass(frozen=True)
class TangentConvergence:
    """Distance between a rescaled cube cover and the product-set cover."""

    scale: Fraction
    level: int
    refinement: int
    distance: float
    base_term: float
    slack_term: float
    bound: float
    ok: bool


def check_tangent_convergence(
    s: Sponge, R: ScaleLike, mode: Mode, level: int, cap: int = DEFAULT_CAP
) -> TangentConvergence:
    """Compare the rescaled cube piece at scale R against the product cover.

    The product cover is taken at refinement level - k_1(R), matching the
    rescaled boxes' coarsest coordinate.  The reported bound has two parts:
    the block-length term sqrt(d) max_l n_l^{-(k_{l-1}-k_l)} coming from the
    construction, and a resolution slack 2 sqrt(d) max_l n_l^{-refinement}
    because finite covers stand in for the limit sets on both sides.
    """
    ks = scale_exponents(s, R)
    k1 = ks.k[0]
    if level <= k1:
        raise ScaleOutOfRange(
            f"need cover level > {k1} to refine the cube at this scale"
        )
    refinement = level - k1
    alphabets = hat_digit_alphabets(s, mode)
    _require_interior(s, alphabets)
    image = _image_boxes_float(s, R, mode, level, cap)

    factors = [
        _merged_union(_factor_intervals(s.bases[l], alphabets[l], refinement))
        for l in range(s.d)
    ]
    away = _directed_boxes_to_product(image, factors)
    toward = _directed_product_to_boxes(s, alphabets, refinement, image)
    distance = max(away, toward)

    rd = math.sqrt(s.d)
    base = rd * max(
        s.bases[l - 1] ** -(ks.k[l - 2] - ks.k[l - 1]) for l in range(2, s.d + 1)
    )
    slack = 2 * rd * max(s.bases[l] ** -refinement for l in range(s.d))
    bound = base + slack
    return TangentConvergence(
        scale=ks.scale,
        level=level,
        refinement=refinement,
        distance=distance,
        base_term=base,
        slack_term=slack,
        bound=bound,
        ok=distance <= bound + _EPS,
    )


# ---------------------------------------------------------------------------
# measure-ratio scans


@dataclass(frozen=True)
class ScanViolation:
    word: tuple[tuple[int, ...], ...]
    r: Fraction
    R: Fraction
    ratio: float
    bound: float
    side: str


@dataclass(frozen=True)
class ScanReport:
    """Outcome of a seeded sandwich scan.

    Slacks are log-space margins (bound minus observed, oriented so that
    non-negative means satisfied); the worst slack over all samples is
    reported per side, and every sample with a negative margin appears in
    ``violations``.
    """

    kind: str
    samples: int
    worst_lower_slack: float
    worst_upper_slack: float
    violations: tuple[ScanViolation, ...]
    constants_used: tuple[float, float]
    exponents: tuple[float, float]
    coordinate_uniform_measure: bool
    rows: tuple[tuple[str, Fraction, Fraction, float, float, float], ...]


def _is_coordinate_uniform(s: Sponge, m: BernoulliMeasure) -> bool:
    return m.weights == coordinate_uniform(s).weights


def _word_label(word: Sequence[Sequence[int]]) -> str:
    return ";".join(",".join(str(e) for e in t) for t in word)


def scan_cube_ratios(
    s: Sponge,
    m: BernoulliMeasure,
    samples: int,
    seed: int,
    depth: int = 40,
) -> ScanReport:
    """Check the two-sided cube-mass sandwich over seeded random samples.

    Draws a random word and a scale pair (R, r) = (n_1^-a, n_1^-b) with
    a < b <= depth, and checks
    n_d^-d (R/r)^lower <= mass(R)/mass(r) <= n_d^d (R/r)^assouad
    in log space.  Scales align to powers of the first base so the masses
    stay inside the exact-arithmetic budget.
    """
    if not s.strict_bases:
        raise NonStrictBases(
            f"the sandwich exponents need strictly increasing bases, got {s.bases}"
        )
    if samples < 1 or depth < 1:
        raise ScaleOutOfRange("samples and depth must be positive")
    dim_hi = assouad_dim(s)
    dim_lo = lower_dim(s)
    nd = s.bases[-1]
    c1 = float(nd**s.d)
    c0 = float(Fraction(1, nd**s.d))
    log_n1 = math.log(s.bases[0])
    digits = sorted(s.digit_set)
    rng = random.Random(seed)

    worst_lo = math.inf
    worst_hi = math.inf
    violations: list[ScanViolation] = []
    rows: list[tuple[str, Fraction, Fraction, float, float, float]] = []
    for _ in range(samples):
        a = rng.randrange(0, depth)
        b = rng.randrange(a + 1, depth + 1)
        word = tuple(rng.choice(digits) for _ in range(b))
        big = Fraction(1, s.bases[0] ** a)
        small = Fraction(1, s.bases[0] ** b)
        log_ratio = (
            cube_measure(m, word, big).log_value
            - cube_measure(m, word, small).log_value
        )
        gap = (b - a) * log_n1
        log_upper = math.log(c1) + dim_hi * gap
        log_lower = math.log(c0) + dim_lo * gap
        up_slack = log_upper - log_ratio
        lo_slack = log_ratio - log_lower
        worst_hi = min(worst_hi, up_slack)
        worst_lo = min(worst_lo, lo_slack)
        ratio = math.exp(log_ratio)
        rows.append(
            (_word_label(word), small, big, ratio,
             math.exp(log_lower), math.exp(log_upper))
        )
        if up_slack < -_EPS:
            violations.append(
                ScanViolation(word, small, big, ratio, math.exp(log_upper), "upper")
            )
        if lo_slack < -_EPS:
            violations.append(
                ScanViolation(word, small, big, ratio, math.exp(log_lower), "lower")
            )
    return ScanReport(
        kind="cube-ratio",
        samples=samples,
        worst_lower_slack=worst_lo,
        worst_upper_slack=worst_hi,
        violations=tuple(violations),
        constants_used=(c0, c1),
        exponents=(dim_lo, dim_hi),
        coordinate_uniform_measure=_is_coordinate_uniform(s, m),
        rows=tuple(rows),
    )


def _tau_point(
    s: Sponge, prefix: Sequence[DigitTuple], tail: DigitTuple
) -> tuple[Fraction, ...]:
    """Exact image of the word prefix followed by the constant tail."""
    depth = len(prefix)
    point = []
    for l in range(s.d):
        n = s.bases[l]
        x = Fraction(0)
        for t, digit in enumerate(prefix, start=1):
            x += Fraction(digit[l], n**t)
        x += Fraction(tail[l], n**depth * (n - 1))
        point.append(x)
    return tuple(point)


def scan_ball_ratios_vssc(
    s: Sponge,
    samples: int,
    seed: int,
    depth: int = 8,
    cap: int = DEFAULT_CAP,
) -> ScanReport:
    """Ball-mass scaling scan with the sharp constants, under separation.

    Centers are exact images of eventually-constant words; radii come in
    pairs (n_1^-a / 2, n_1^-b / 2) with a < b < depth.  Ball masses are
    known only as brackets, so each side is tested conservatively: a
    violation is recorded only when even the favorable ends of the brackets
    break the bound.
    """
    if not satisfies_vssc(s):
        raise VsscNotSatisfied(
            "ball-ratio scaling needs the separation condition: some pair of "
            "digits agreeing before a coordinate differs there by exactly 1"
        )
    if samples < 1 or depth < 2:
        raise ScaleOutOfRange("need samples >= 1 and depth >= 2")
    m = coordinate_uniform(s)
    dim_hi = assouad_dim(s)
    dim_lo = lower_dim(s)
    nd = s.bases[-1]
    spread = 2 * sum(s.bases) * s.bases[0] ** 2
    c1 = float(nd**s.d) * spread**dim_hi
    c0 = float(Fraction(1, nd**s.d)) * spread**-dim_lo
    log_n1 = math.log(s.bases[0])
    digits = sorted(s.digit_set)
    rng = random.Random(seed)

    worst_lo = math.inf
    worst_hi = math.inf
    violations: list[ScanViolation] = []
    rows: list[tuple[str, Fraction, Fraction, float, float, float]] = []
    for _ in range(samples):
        a = rng.randrange(0, depth - 1)
        b = rng.randrange(a + 1, depth)
        word = tuple(rng.choice(digits) for _ in range(depth))
        tail = rng.choice(digits)
        center = _tau_point(s, word, tail)
        big = Fraction(1, 2 * s.bases[0] ** a)
        small = Fraction(1, 2 * s.bases[0] ** b)
        blo, bhi = ball_measure_bounds(m, center, big, b + 3, cap)
        slo, shi = ball_measure_bounds(m, center, small, b + 3, cap)
        gap = (b - a) * log_n1
        log_upper = math.log(c1) + dim_hi * gap
        log_lower = math.log(c0) + dim_lo * gap

        # conservative: test the bracket end least likely to violate
        low_ratio = blo.log_value - shi.log_value  # -inf when blo is 0
        high_ratio = bhi.log_value - slo.log_value  # +inf when slo is 0
        up_slack = log_upper - low_ratio
        lo_slack = high_ratio - log_lower
        worst_hi = min(worst_hi, up_slack)
        worst_lo = min(worst_lo, lo_slack)
        label = _word_label(word) + "|" + _word_label([tail])
        rows.append(
            (label, small, big, math.exp(min(high_ratio, 700.0)),
             math.exp(log_lower), math.exp(log_upper))
        )
        if up_slack < -_EPS:
            violations.append(
                ScanViolation(word, small, big, math.exp(low_ratio),
                              math.exp(log_upper), "upper")
            )
        if lo_slack < -_EPS:
            violations.append(
                ScanViolation(word, small, big, math.exp(min(high_ratio, 700.0)),
                              math.exp(log_lower), "lower")
            )
    return ScanReport(
        kind="ball-ratio",
        samples=samples,
        worst_lower_slack=worst_lo,
        worst_upper_slack=worst_hi,
        violations=tuple(violations),
        constants_used=(c0, c1),
        exponents=(dim_lo, dim_hi),
        coordinate_uniform_measure=True,
        rows=tuple(rows),
    )


def scan_samples_csv(report: ScanReport) -> str:
    """Per-sample dump: word, r, R, ratio, lower_bound, upper_bound."""
    lines = ["word,r,R,ratio,lower_bound,upper_bound"]
    for label, r, R, ratio, lo, hi in report.rows:
        lines.append(
            f"{label},{r.numerator}/{r.denominator},"
            f"{R.numerator}/{R.denominator},{ratio!r},{lo!r},{hi!r}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# doubling detection


class DoublingVerdict(enum.Enum):
    DOUBLING = "DoublingUpToDepth"
    NON_DOUBLING = "NonDoublingCertificate"


@dataclass(frozen=True)
class DepthRatioRow:
    depth: int
    pair_count: int
    max_ratio: float | None
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None


@dataclass(frozen=True)
class DoublingReport:
    max_depth: int
    per_depth: tuple[DepthRatioRow, ...]
    growth_rate: float
    verdict: DoublingVerdict
    window_start: int | None


def _depth_cube_masses(
    s: Sponge, m: BernoulliMeasure, k: int, cap: int
) -> dict[tuple[int, ...], float]:
    """Mass of every scale-(n_1^-k) cube keyed by its grid coordinates."""
    r = Fraction(1, s.bases[0] ** k)
    if count_cubes(s, r) > cap:
        raise EnumerationTooLarge(
            f"depth {k} needs {count_cubes(s, r)} cubes, over the cap {cap}"
        )
    ks = scale_exponents(s, r).k
    k1 = ks[0]
    # position t contributes one level-m_t prefix; cube mass is the product
    # of those prefixes' masses and the grid index accumulates per coordinate
    per_position: list[list[tuple[Prefix, float]]] = []
    for t in range(1, k1 + 1):
        m_t = sum(1 for v in ks if v >= t)
        per_position.append(
            [(p, float(m.prefix_mass(p))) for p in s.level_sets[m_t]]
        )
    out: dict[tuple[int, ...], float] = {}
    grid = [0] * s.d

    def rec(t: int, mass: float) -> None:
        if t == k1:
            out[tuple(grid)] = mass
            return
        saved = tuple(grid)
        for p, w in per_position[t]:
            for l in range(len(p)):
                grid[l] = saved[l] * s.bases[l] + p[l]
            rec(t + 1, mass * w)
            for l in range(s.d):
                grid[l] = saved[l]

    rec(0, 1.0)
    return out


def _slope(points: list[tuple[float, float]]) -> float:
    n = len(points)
    mx = sum(x for x, _ in points) / n
    my = sum(y for _, y in points) / n
    sxx = sum((x - mx) ** 2 for x, _ in points)
    if sxx == 0:
        return 0.0
    sxy = sum((x - mx) * (y - my) for x, y in points)
    return sxy / sxx


def doubling_report(
    s: Sponge, m: BernoulliMeasure, max_depth: int, cap: int = DEFAULT_CAP
) -> DoublingReport:
    """Adjacent-cube mass ratios per depth and their geometric growth.

    At each depth k the scale-(n_1^-k) cubes are enumerated with their
    masses; two cubes are adjacent when their covering boxes share a
    (d-1)-dimensional face, i.e. the integer grid coordinates differ by one
    in exactly one coordinate.  The growth rate is fitted over buckets of
    depths sharing the finest-coordinate refinement count, using each
    bucket's maximum ratio; the non-doubling verdict additionally requires
    the per-depth maxima to rise monotonically across three consecutive
    depths with a strict net gain, so transient bumps are not flagged.
    """
    if max_depth < 1:
        raise ScaleOutOfRange(f"max_depth must be >= 1, got {max_depth}")
    rows: list[DepthRatioRow] = []
    bucket_best: dict[int, float] = {}
    for k in range(1, max_depth + 1):
        masses = _depth_cube_masses(s, m, k, cap)
        best: float | None = None
        witness = None
        pairs = 0
        for g in sorted(masses):
            mg = masses[g]
            for l in range(s.d):
                nb = g[:l] + (g[l] + 1,) + g[l + 1 :]
                other = masses.get(nb)
                if other is None:
                    continue
                pairs += 1
                ratio = mg / other if mg >= other else other / mg
                if best is None or ratio > best:
                    best = ratio
                    witness = (g, nb)
        rows.append(DepthRatioRow(k, pairs, best, witness))
        if best is not None:
            v = scale_exponents(s, Fraction(1, s.bases[0] ** k)).k[-1]
            bucket_best[v] = max(bucket_best.get(v, 0.0), best)

    last_bucket = scale_exponents(s, Fraction(1, s.bases[0] ** max_depth)).k[-1]
    points = [
        (float(v), math.log(r))
        for v, r in sorted(bucket_best.items())
        if v < last_bucket and r > 0
    ]
    growth = math.exp(_slope(points)) if len(points) >= 2 else 1.0

    window = None
    ratios = [row.max_ratio for row in rows]
    for i in range(len(ratios) - 2):
        a, b, c = ratios[i], ratios[i + 1], ratios[i + 2]
        if a is None or b is None or c is None:
            continue
        if b >= a and c >= b and c > a * (1 + _EPS):
            window = rows[i].depth
            break

    non_doubling = growth > 1 + GROWTH_TOL and window is not None
    return DoublingReport(
        max_depth=max_depth,
        per_depth=tuple(rows),
        growth_rate=growth,
        verdict=(
            DoublingVerdict.NON_DOUBLING if non_doubling else DoublingVerdict.DOUBLING
        ),
        window_start=window if non_doubling else None,
    )


# ---------------------------------------------------------------------------
# dichotomy audit


@dataclass(frozen=True)
class LevelGrowthRow:
    level: int
    size: int
    previous_size: int
    max_fibre: int
    growth_within_max: bool


@dataclass(frozen=True)
class DichotomyAudit:
    verdict: Dichotomy
    break_level: int | None
    levels: tuple[LevelGrowthRow, ...]


def dichotomy_audit(s: Sponge) -> DichotomyAudit:
    """Audit the all-equal-or-all-distinct claim and its supporting chain.

    Checks |D_l| / |D_{l-1}| <= max fibre count at every level, and reports
    the largest level at which fibre counts fail to be constant (the level
    where the primed and unprimed recursions separate); None when fibres
    are uniform.
    """
    verdict = dichotomy(s)
    levels = []
    for l in range(2, s.d + 1):
        size = len(s.level_sets[l])
        prev = len(s.level_sets[l - 1])
        max_fibre = s.fibre_count_range(l)[1]
        levels.append(
            LevelGrowthRow(l, size, prev, max_fibre, size <= prev * max_fibre)
        )
    break_level = None
    for t in range(1, s.d):
        lo, hi = s.fibre_count_range(t + 1)
        if lo != hi:
            break_level = t
    return DichotomyAudit(verdict, break_level, tuple(levels))


# ---------------------------------------------------------------------------
# serialization


def scan_report_to_json(report: ScanReport) -> str:
    doc = {
        "schema_version": 1,
        "kind": report.kind,
        "samples": report.samples,
        "worst_lower_slack": report.worst_lower_slack,
        "worst_upper_slack": report.worst_upper_slack,
        "violation_count": len(report.violations),
        "violations": [
            {
                "word": _word_label(v.word),
                "r": f"{v.r.numerator}/{v.r.denominator}",
                "R": f"{v.R.numerator}/{v.R.denominator}",
                "ratio": v.ratio,
                "bound": v.bound,
                "side": v.side,
            }
            for v in report.violations
        ],
        "constants_used": list(report.constants_used),
        "exponents": list(report.exponents),
        "coordinate_uniform_measure": report.coordinate_uniform_measure,
    }
    return json.dumps(doc, indent=2)


def scan_report_to_text(report: ScanReport) -> str:
    c0, c1 = report.constants_used
    lo, hi = report.exponents
    lines = [
        f"{report.kind} scan: {report.samples} samples",
        f"bounds: {c0:.6g} (R/r)^{lo:.12g} <= ratio <= {c1:.6g} (R/r)^{hi:.12g}",
        f"worst lower slack (log): {report.worst_lower_slack:.6g}",
        f"worst upper slack (log): {report.worst_upper_slack:.6g}",
        f"violations: {len(report.violations)}",
    ]
    if not report.coordinate_uniform_measure:
        lines.append(
            "note: measure is not the coordinate uniform one; the sandwich "
            "exponents are not guaranteed for it"
        )
    return "\n".join(lines) + "\n"


def doubling_report_to_json(report: DoublingReport) -> str:
    doc = {
        "schema_version": 1,
        "max_depth": report.max_depth,
        "per_depth": [
            {
                "depth": row.depth,
                "pair_count": row.pair_count,
                "max_ratio": row.max_ratio,
                "witness": (
                    [list(row.witness[0]), list(row.witness[1])]
                    if row.witness is not None
                    else None
                ),
            }
            for row in report.per_depth
        ],
        "growth_rate": report.growth_rate,
        "verdict": report.verdict.value,
        "window_start": report.window_start,
    }
    return json.dumps(doc, indent=2)


def doubling_report_to_text(report: DoublingReport) -> str:
    lines = [f"adjacent-cube ratio growth to depth {report.max_depth}"]
    for row in report.per_depth:
        shown = "none" if row.max_ratio is None else f"{row.max_ratio:.6g}"
        lines.append(
            f"  depth {row.depth:>3}: pairs {row.pair_count:>8}  max ratio {shown}"
        )
    lines.append(f"fitted growth rate: {report.growth_rate:.9g}")
    lines.append(f"verdict: {report.verdict.value}")
    if report.window_start is not None:
        lines.append(f"monotone growth window starts at depth {report.window_start}")
    return "\n".join(lines) + "\n"


def convergence_to_json(
    rep: TangentConvergence, tmap: TangentMap | None = None
) -> str:
    doc: dict[str, object] = {
        "schema_version": 1,
        "scale": f"{rep.scale.numerator}/{rep.scale.denominator}",
        "level": rep.level,
        "refinement": rep.refinement,
        "distance": rep.distance,
        "base_term": rep.base_term,
        "slack_term": rep.slack_term,
        "bound": rep.bound,
        "ok": rep.ok,
    }
    if tmap is not None:
        doc["map_scales"] = list(tmap.scales)
        doc["map_band"] = [tmap.a, tmap.b]
    return json.dumps(doc, indent=2)


def audit_to_json(audit: DichotomyAudit) -> str:
    doc = {
        "schema_version": 1,
        "verdict": audit.verdict.value,
        "break_level": audit.break_level,
        "levels": [
            {
                "level": row.level,
                "size": row.size,
                "previous_size": row.previous_size,
                "max_fibre": row.max_fibre,
                "growth_within_max": row.growth_within_max,
            }
            for row in audit.levels
        ],
    }
    return json.dumps(doc, indent=2)
