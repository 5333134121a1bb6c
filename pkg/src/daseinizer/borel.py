"""Finite unions of real intervals, standing in for Borel subsets of the line.

Finite-dimensional operators have finite spectra, so nothing beyond finite
interval unions is ever needed to select a spectral projector.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import ParseError


class Interval(NamedTuple):
    lower: float
    upper: float
    lower_closed: bool = True
    upper_closed: bool = True

    def is_empty(self) -> bool:
        if self.lower > self.upper:
            return True
        if self.lower == self.upper:
            return not (self.lower_closed and self.upper_closed)
        return False

    def contains(self, x: float) -> bool:
        if x < self.lower or x > self.upper:
            return False
        if x == self.lower and not self.lower_closed:
            return False
        if x == self.upper and not self.upper_closed:
            return False
        return True


def _normalise(iv: Interval) -> Interval:
    lo, hi, lc, uc = iv
    if math.isnan(lo) or math.isnan(hi):
        raise ValueError("interval endpoints must not be NaN")
    # infinite endpoints are never attained
    if math.isinf(lo):
        lc = False
    if math.isinf(hi):
        uc = False
    return Interval(float(lo), float(hi), bool(lc), bool(uc))


def _touch(a: Interval, b: Interval) -> bool:
    """True if b (starting no earlier than a) overlaps or abuts a."""
    if b.lower < a.upper:
        return True
    if b.lower == a.upper:
        return a.upper_closed or b.lower_closed
    return False


@dataclass(frozen=True)
class BorelSet:
    """A canonical finite union of disjoint, sorted, non-empty intervals."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _canonical(self.intervals))

    @classmethod
    def interval(cls, lower, upper, lower_closed=True, upper_closed=True) -> "BorelSet":
        return cls((Interval(lower, upper, lower_closed, upper_closed),))

    @classmethod
    def closed(cls, lower, upper) -> "BorelSet":
        return cls.interval(lower, upper)

    @classmethod
    def point(cls, x) -> "BorelSet":
        return cls.interval(x, x)

    @classmethod
    def points(cls, xs: Iterable[float]) -> "BorelSet":
        return cls(tuple(Interval(x, x) for x in xs))

    @classmethod
    def empty(cls) -> "BorelSet":
        return cls(())

    @classmethod
    def real_line(cls) -> "BorelSet":
        return cls.interval(-math.inf, math.inf, False, False)

    @classmethod
    def parse(cls, text: str) -> "BorelSet":
        result, end = parse_borel(text, 0)
        end = _skip_ws(text, end)
        if end != len(text):
            raise ParseError("unexpected trailing input in interval set", text, end)
        return result

    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, x: float, snap: float = 0.0) -> bool:
        """Membership test; ``x`` is first snapped onto any endpoint within ``snap``."""
        for iv in self.intervals:
            y = x
            if snap > 0:
                if abs(x - iv.lower) <= snap:
                    y = iv.lower
                elif abs(x - iv.upper) <= snap:
                    y = iv.upper
            if iv.contains(y):
                return True
        return False

    __contains__ = contains

    def union(self, other: "BorelSet") -> "BorelSet":
        return BorelSet(self.intervals + other.intervals)

    def intersection(self, other: "BorelSet") -> "BorelSet":
        out = []
        for a in self.intervals:
            for b in other.intervals:
                if a.lower > b.lower or (a.lower == b.lower and not a.lower_closed):
                    lo, lc = a.lower, a.lower_closed
                else:
                    lo, lc = b.lower, b.lower_closed
                if a.upper < b.upper or (a.upper == b.upper and not a.upper_closed):
                    hi, uc = a.upper, a.upper_closed
                else:
                    hi, uc = b.upper, b.upper_closed
                out.append(Interval(lo, hi, lc, uc))
        return BorelSet(tuple(out))

    def complement(self) -> "BorelSet":
        out = []
        lo, lc = -math.inf, False
        for iv in self.intervals:
            out.append(Interval(lo, iv.lower, lc, not iv.lower_closed))
            lo, lc = iv.upper, not iv.upper_closed
        out.append(Interval(lo, math.inf, lc, False))
        return BorelSet(tuple(out))

    __or__ = union
    __and__ = intersection

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        parts = []
        for iv in self.intervals:
            parts.append(
                ("[" if iv.lower_closed else "(")
                + f"{format_number(iv.lower)},{format_number(iv.upper)}"
                + ("]" if iv.upper_closed else ")")
            )
        return "u".join(parts)

    def __repr__(self) -> str:
        return f"BorelSet({str(self)!r})"


def _canonical(intervals) -> tuple[Interval, ...]:
    ivs = [_normalise(Interval(*iv)) for iv in intervals]
    ivs = [iv for iv in ivs if not iv.is_empty()]
    ivs.sort(key=lambda iv: (iv.lower, not iv.lower_closed))
    merged: list[Interval] = []
    for iv in ivs:
        if merged and _touch(merged[-1], iv):
            last = merged[-1]
            if iv.upper > last.upper:
                hi, uc = iv.upper, iv.upper_closed
            elif iv.upper == last.upper:
                hi, uc = last.upper, last.upper_closed or iv.upper_closed
            else:
                hi, uc = last.upper, last.upper_closed
            merged[-1] = Interval(last.lower, hi, last.lower_closed, uc)
        else:
            merged.append(iv)
    return tuple(merged)


def format_number(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


_NUMBER = re.compile(r"[+-]?(?:inf|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")
_UNION = ("u", "U", "∪")
_EMPTY = ("{}", "∅")


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _number(text: str, pos: int) -> tuple[float, int]:
    pos = _skip_ws(text, pos)
    m = _NUMBER.match(text, pos)
    if not m:
        raise ParseError("expected a number", text, pos)
    return float(m.group()), m.end()


def _one_interval(text: str, pos: int) -> tuple[Interval, int]:
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] not in "[(":
        raise ParseError("expected '[' or '(' to open an interval", text, pos)
    lower_closed = text[pos] == "["
    start = pos
    lo, pos = _number(text, pos + 1)
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != ",":
        raise ParseError("expected ',' between interval endpoints", text, pos)
    hi, pos = _number(text, pos + 1)
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] not in "])":
        raise ParseError("expected ']' or ')' to close an interval", text, pos)
    upper_closed = text[pos] == "]"
    if lo > hi:
        raise ParseError(f"malformed interval: lower bound {lo} exceeds upper bound {hi}", text, start)
    return Interval(lo, hi, lower_closed, upper_closed), pos + 1


def parse_borel(text: str, pos: int = 0) -> tuple[BorelSet, int]:
    """Parse an interval set starting at ``pos``; return it and the end position.

    Accepts ``[a,b]``, ``(a,b)``, mixed brackets, unions joined by ``u`` and
    the empty set written ``{}``. Endpoints may be ``inf``/``-inf``.
    """
    pos = _skip_ws(text, pos)
    for token in _EMPTY:
        if text.startswith(token, pos):
            return BorelSet.empty(), pos + len(token)
    intervals = []
    iv, pos = _one_interval(text, pos)
    intervals.append(iv)
    while True:
        nxt = _skip_ws(text, pos)
        if nxt < len(text) and text[nxt] in _UNION:
            iv, pos = _one_interval(text, nxt + 1)
            intervals.append(iv)
        else:
            break
    return BorelSet(tuple(intervals)), pos
