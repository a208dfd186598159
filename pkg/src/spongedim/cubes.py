"""Approximate cubes: the symbolic balls of a sponge.

At scale r each coordinate l refines to its own depth k_l(r), the unique
integer with n_l^-(k_l+1) < r <= n_l^-k_l.  The approximate cube of a
symbolic word at scale r pins coordinate l of the first k_l(r) word entries;
geometrically it is a box whose side in coordinate l lies in [r, n_l * r).
Everything here is computed in exact rational arithmetic: scales are
fractions and depth thresholds are decided by integer comparisons, never by
floating point logarithms, so boundary scales such as r = n_l^-k land on the
correct side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    DigitOutOfRange,
    EnumerationTooLarge,
    ScaleOutOfRange,
    SpongeError,
    WordTooShort,
)
from .model import DigitTuple, Prefix, Sponge

ScaleLike = Union[Fraction, int, float, str]

DEFAULT_CAP = 10**7

Interval = tuple[Fraction, Fraction]
Box = tuple[Interval, ...]


def as_scale(r: ScaleLike) -> Fraction:
    """Coerce a scale to an exact Fraction.

    Strings accept 'p/q' or decimal notation and convert exactly; floats are
    taken at their exact binary value, so prefer fractions or strings when a
    boundary scale like 1/27 is intended.
    """
    if isinstance(r, Fraction):
        return r
    if isinstance(r, (int, str)):
        return Fraction(r)
    if isinstance(r, float):
        return Fraction(r)
    raise TypeError(f"cannot interpret {r!r} as a scale")


@dataclass(frozen=True)
class ScaleExponents:
    """Per-coordinate refinement depths k_1 >= ... >= k_d for one scale."""

    k: tuple[int, ...]
    scale: Fraction


@dataclass(frozen=True)
class ApproximateCube:
    """A scale-r cube: coordinate l is pinned for the first k_l(r) positions.

    ``constraints[l-1]`` is the tuple of pinned coordinate-l digits, length
    k_l(r).  Two cubes with equal exponents and constraints describe the same
    symbolic set regardless of the exact scale within the depth bracket.
    """

    scale: Fraction
    exponents: ScaleExponents
    constraints: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class BoxSet:
    """An ordered collection of closed axis-aligned boxes in [0,1]^d."""

    boxes: tuple[Box, ...]

    def __len__(self) -> int:
        return len(self.boxes)

    def __iter__(self):
        return iter(self.boxes)

    @property
    def d(self) -> int:
        return len(self.boxes[0]) if self.boxes else 0


def scale_exponents(s: Sponge, r: ScaleLike) -> ScaleExponents:
    """Depths k_l(r) found by exact integer search, for 0 < r <= 1."""
    scale = as_scale(r)
    if not 0 < scale <= 1:
        raise ScaleOutOfRange(f"scale must lie in (0, 1], got {scale}")
    ks: list[int] = []
    for n in s.bases:
        # largest k with scale * n^k <= 1, i.e. scale <= n^-k
        k = 0
        acc = scale
        while acc * n <= 1:
            acc *= n
            k += 1
        ks.append(k)
    for a, b in zip(ks, ks[1:]):
        assert a >= b, "depths must fall as bases grow"
    return ScaleExponents(tuple(ks), scale)


def _checked_word(s: Sponge, w: Sequence[Sequence[int]], need: int) -> tuple[DigitTuple, ...]:
    word = tuple(tuple(entry) for entry in w)
    if len(word) < need:
        raise WordTooShort(f"word of length {len(word)} does not reach depth {need}")
    for idx, entry in enumerate(word):
        if entry not in s.digit_set:
            raise DigitOutOfRange(f"word entry {idx} = {entry} is not a digit of the sponge")
    return word


def approximate_cube(s: Sponge, w: Sequence[Sequence[int]], r: ScaleLike) -> ApproximateCube:
    """The scale-r cube around the symbolic word w (w must reach depth k_1(r))."""
    ks = scale_exponents(s, r)
    word = _checked_word(s, w, ks.k[0])
    constraints = tuple(
        tuple(word[t][l] for t in range(ks.k[l])) for l in range(s.d)
    )
    return ApproximateCube(ks.scale, ks, constraints)


def geometric_box(s: Sponge, q: ApproximateCube) -> Box:
    """Exact corner coordinates of the box containing the cube.

    Side l has length n_l^-k_l(r), so it lies in [r, n_l * r).
    """
    out: list[Interval] = []
    for n, k, cons in zip(s.bases, q.exponents.k, q.constraints):
        num = 0
        for digit in cons:
            num = num * n + digit
        den = n**k
        lo = Fraction(num, den)
        out.append((lo, lo + Fraction(1, den)))
    return tuple(out)


def _column_width(ks: Sequence[int], t: int) -> int:
    """Number of coordinates pinned at position t (1-based) for depths ks."""
    return sum(1 for k in ks if k >= t)


def count_cubes(s: Sponge, r: ScaleLike) -> int:
    """Number of distinct scale-r cubes, as an exact integer.

    Position t of a word is pinned in exactly its first m_t coordinates,
    where m_t counts the depths still >= t; the pinned block must be a valid
    level-m_t projection and the positions choose independently, giving
    prod_l |D_l|^(k_l - k_(l+1)) with k_(d+1) = 0.
    """
    ks = scale_exponents(s, r).k
    total = 1
    for l in range(s.d):
        nxt = ks[l + 1] if l + 1 < s.d else 0
        total *= len(s.level_sets[l + 1]) ** (ks[l] - nxt)
    return total


def subcubes(
    s: Sponge, q: ApproximateCube, r: ScaleLike, cap: int = DEFAULT_CAP
) -> list[ApproximateCube]:
    """All scale-r cubes whose symbolic set lies inside q, in canonical order.

    Positions are extended outermost first and the candidates at each
    position run lexicographically, so the output order is deterministic.
    Raises EnumerationTooLarge when the exact count exceeds ``cap``.
    """
    ks_r = scale_exponents(s, r)
    if ks_r.scale >= q.scale:
        raise ScaleOutOfRange(
            f"refinement scale {ks_r.scale} must be smaller than the cube scale {q.scale}"
        )
    k_old = q.exponents.k
    k_new = ks_r.k
    candidates: list[list[Prefix]] = []
    for t in range(1, k_new[0] + 1):
        m_new = _column_width(k_new, t)
        m_old = _column_width(k_old, t)
        fixed = tuple(q.constraints[l][t - 1] for l in range(m_old))
        options = [p for p in s.level_sets[m_new] if p[:m_old] == fixed]
        candidates.append(options)

    total = 1
    for options in candidates:
        total *= len(options)
    if total > cap:
        raise EnumerationTooLarge(f"{total} sub-cubes exceed the cap of {cap}")

    out: list[ApproximateCube] = []
    for combo in itertools.product(*candidates):
        constraints = tuple(
            tuple(combo[t][l] for t in range(k_new[l])) for l in range(s.d)
        )
        out.append(ApproximateCube(ks_r.scale, ks_r, constraints))
    return out


def box_dim_slope(s: Sponge, depth: int) -> float:
    """Box-counting slope log(count) / log(1/r) at r = n_1^-depth."""
    if depth < 1:
        raise ScaleOutOfRange(f"depth must be >= 1, got {depth}")
    count = count_cubes(s, Fraction(1, s.bases[0] ** depth))
    return math.log(count) / (depth * math.log(s.bases[0]))


def prefractal(s: Sponge, level: int, cap: int = DEFAULT_CAP) -> BoxSet:
    """The level-m cover of the sponge: one box per length-m word.

    Boxes are images of the unit cube under m-fold map compositions; they are
    ordered by word (lexicographically) and have side n_l^-m in coordinate l.
    """
    if level < 0:
        raise ScaleOutOfRange(f"pre-fractal level must be >= 0, got {level}")
    total = len(s.digits) ** level
    if total > cap:
        raise EnumerationTooLarge(f"{total} boxes exceed the cap of {cap}")
    dens = [n**level for n in s.bases]
    boxes: list[Box] = []
    for w in itertools.product(s.digits, repeat=level):
        nums = [0] * s.d
        for entry in w:
            for l in range(s.d):
                nums[l] = nums[l] * s.bases[l] + entry[l]
        boxes.append(
            tuple(
                (Fraction(nums[l], dens[l]), Fraction(nums[l] + 1, dens[l]))
                for l in range(s.d)
            )
        )
    return BoxSet(tuple(boxes))


def boxes_to_csv(bs: BoxSet) -> str:
    """CSV dump with exact rational corners, columns lo_1,hi_1,...,lo_d,hi_d."""
    d = bs.d
    header = ",".join(f"lo_{l+1},hi_{l+1}" for l in range(d))
    lines = [header]
    for box in bs:
        cells: list[str] = []
        for lo, hi in box:
            cells.append(f"{lo.numerator}/{lo.denominator}")
            cells.append(f"{hi.numerator}/{hi.denominator}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def boxes_to_svg(bs: BoxSet) -> str:
    """Plain SVG rendering of a planar box set on the unit square.

    Only defined for d = 2.  The vertical axis is flipped so the origin sits
    at the bottom-left, and no external styling is referenced.
    """
    if bs.d != 2:
        raise SpongeError(f"SVG rendering needs a planar set, got d = {bs.d}")
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1" '
        'width="640" height="640">',
        '<rect x="0" y="0" width="1" height="1" fill="#ffffff"/>',
    ]
    for (x_lo, x_hi), (y_lo, y_hi) in bs:
        x = float(x_lo)
        y = 1.0 - float(y_hi)
        w = float(x_hi - x_lo)
        h = float(y_hi - y_lo)
        parts.append(
            f'<rect x="{x:.12g}" y="{y:.12g}" width="{w:.12g}" height="{h:.12g}" '
            'fill="#1f3a5f" fill-opacity="0.85"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
