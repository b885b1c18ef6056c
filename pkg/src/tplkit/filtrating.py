"""Filtrating neighborhoods as combinatorial attachment data.

A filtrating neighborhood of a template's basic set is obtained from the
thickened template by attaching ``Sigma_{g,k} x [0,1]`` along each block of a
partition of the dividing curves (``k`` = block size, ``g`` = genus of the
attached surface).  Which patterns can occur in a closed 3-manifold
``M = M' # m S^1xS^2`` is constrained by

* ``g <= m + 1``;
* ``k <= 4m - 3g + 3`` when ``g <= m``;
* ``k <= m + 1`` when ``g = m + 1``.

These are necessary conditions only: everything here is "bounds-only" and
says nothing about which patterns are realised geometrically.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormatError, InfeasibleLedger, PatternError
from .thicken import ThickenedBoundary

__all__ = [
    "AttachmentPattern",
    "ManifoldContext",
    "BoundCheck",
    "BoundaryLedger",
    "NFormula",
    "Accounting",
    "PermutationGroup",
    "curve_sort_key",
    "model_of_germ",
    "block_bound",
    "bounds_ok",
    "set_partitions",
    "enumerate_patterns",
    "assemble_boundary",
    "euler_feasible",
    "realization_accounting",
]

DISCLAIMER = "bounds-only: necessary conditions, not geometric realizability"


def curve_sort_key(cid: str):
    """Natural order on curve ids, so ``c2 < c10``."""
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in re.split(r"(\d+)", cid) if p)


@dataclass(frozen=True)
class ManifoldContext:
    m: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise PatternError(f"m must be >= 0 (got {self.m})")


@dataclass(frozen=True)
class AttachmentPattern:
    """Blocks of dividing curves, each capped by a surface of the given genus.

    Stored canonically: curves sorted within a block, blocks sorted by least
    curve.
    """

    blocks: tuple[tuple[str, ...], ...]
    genera: tuple[int, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.genera):
            raise PatternError("one genus per block is required")
        pairs = []
        seen: set[str] = set()
        for blk, g in zip(self.blocks, self.genera):
            blk = tuple(sorted(set(blk), key=curve_sort_key))
            if not blk:
                raise PatternError("blocks must be nonempty")
            if seen & set(blk):
                raise PatternError(f"curve(s) {sorted(seen & set(blk))} appear in two blocks")
            seen |= set(blk)
            if int(g) < 0:
                raise PatternError(f"genus must be >= 0 (got {g})")
            pairs.append((blk, int(g)))
        pairs.sort(key=lambda bg: curve_sort_key(bg[0][0]))
        object.__setattr__(self, "blocks", tuple(b for b, _ in pairs))
        object.__setattr__(self, "genera", tuple(g for _, g in pairs))

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def curves(self) -> tuple[str, ...]:
        return tuple(sorted((c for b in self.blocks for c in b), key=curve_sort_key))

    def relabel(self, perm: dict[str, str]) -> "AttachmentPattern":
        return AttachmentPattern(
            tuple(tuple(perm.get(c, c) for c in b) for b in self.blocks), self.genera
        )

    def sort_key(self):
        return tuple((tuple(map(curve_sort_key, b)), g) for b, g in zip(self.blocks, self.genera))

    def to_json(self, ctx: "ManifoldContext | None" = None) -> dict:
        out = {
            "blocks": [{"curves": list(b), "genus": g} for b, g in zip(self.blocks, self.genera)],
        }
        if ctx is not None:
            out["m"] = ctx.m
            out["bounds_ok"] = bool(bounds_ok(self, ctx))
            out["disclaimer"] = DISCLAIMER
        return out

    @classmethod
    def from_json(cls, data: dict) -> "AttachmentPattern":
        try:
            blocks = data["blocks"]
            return cls(
                tuple(tuple(str(c) for c in b["curves"]) for b in blocks),
                tuple(int(b["genus"]) for b in blocks),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad pattern JSON: {exc}") from None

    @classmethod
    def parse(cls, text: str) -> "AttachmentPattern":
        """Read ``{a,b}:0 {c}:1`` (whitespace separated ``{curves}:genus``)."""
        blocks, genera = [], []
        for tok in text.split():
            m = re.fullmatch(r"\{([^{}]*)\}:(\d+)", tok)
            if not m:
                raise FormatError(f"bad pattern block {tok!r}; expected {{a,b}}:g")
            blocks.append(tuple(c.strip() for c in m.group(1).split(",") if c.strip()))
            genera.append(int(m.group(2)))
        return cls(tuple(blocks), tuple(genera))

    def __str__(self):
        return " ".join(f"{{{','.join(b)}}}:{g}" for b, g in zip(self.blocks, self.genera))


@dataclass(frozen=True)
class BoundCheck:
    ok: bool
    violation: str = ""

    def __bool__(self):
        return self.ok


def block_bound(g: int, k: int, m: int) -> BoundCheck:
    if g > m + 1:
        return BoundCheck(False, f"g={g} exceeds m+1={m + 1}")
    if g <= m and k > 4 * m - 3 * g + 3:
        return BoundCheck(False, f"k={k} exceeds 4m-3g+3={4 * m - 3 * g + 3} (g={g})")
    if g == m + 1 and k > m + 1:
        return BoundCheck(False, f"k={k} exceeds m+1={m + 1} (g=m+1={g})")
    return BoundCheck(True)


def bounds_ok(p: AttachmentPattern, ctx: ManifoldContext) -> BoundCheck:
    """Whether every block satisfies the genus/puncture bounds; else the first violation."""
    for blk, g in zip(p.blocks, p.genera):
        chk = block_bound(g, len(blk), ctx.m)
        if not chk:
            return BoundCheck(False, f"block {{{','.join(blk)}}}: {chk.violation}")
    return BoundCheck(True)


def model_of_germ(b: ThickenedBoundary | Sequence[str]) -> AttachmentPattern:
    """A 2-handle (a disk times an interval) on every dividing curve."""
    ids = b.curve_ids if isinstance(b, ThickenedBoundary) else tuple(b)
    return AttachmentPattern(tuple((c,) for c in ids), tuple(0 for _ in ids))


def set_partitions(items: Sequence[str]) -> Iterable[tuple[tuple[str, ...], ...]]:
    """All set partitions, via restricted growth strings (deterministic order)."""
    items = list(items)
    n = len(items)
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i, mx):
        if i == n:
            blocks: list[list[str]] = [[] for _ in range(mx + 1)]
            for x, r in zip(items, rgs):
                blocks[r].append(x)
            yield tuple(map(tuple, blocks))
            return
        for r in range(mx + 2):
            rgs[i] = r
            yield from rec(i + 1, max(mx, r))

    rgs[0] = 0
    yield from rec(1, 0)


class PermutationGroup:
    """A group of permutations of curve ids, given by generators.

    File format: one generator per line in cycle notation, e.g. ``(a b)`` or
    ``(c1 c3)(c2 c4)``; ``#`` starts a comment; an empty file is the trivial
    group.
    """

    def __init__(self, points: Sequence[str], generators: Iterable[dict[str, str]] = ()):
        self.points = tuple(points)
        pts = set(self.points)
        gens = []
        for g in generators:
            if not set(g) <= pts or not set(g.values()) <= pts:
                raise PatternError(f"permutation moves unknown curve(s): {sorted(set(g) - pts)}")
            if len(set(g.values())) != len(g):
                raise PatternError("not a permutation")
            full = tuple(g.get(p, p) for p in self.points)
            if sorted(full) != sorted(self.points):
                raise PatternError("not a permutation")
            gens.append(full)
        self.generators = tuple(gens)
        self._elements = None

    @classmethod
    def symmetric(cls, points: Sequence[str]) -> "PermutationGroup":
        pts = list(points)
        gens = []
        if len(pts) >= 2:
            gens.append({pts[0]: pts[1], pts[1]: pts[0]})
            gens.append({pts[i]: pts[(i + 1) % len(pts)] for i in range(len(pts))})
        return cls(pts, gens)

    @classmethod
    def parse(cls, text: str, points: Sequence[str]) -> "PermutationGroup":
        gens = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if not re.fullmatch(r"(\([^()]*\)\s*)+", line):
                raise FormatError(f"line {lineno}: expected cycle notation like (a b)(c d)")
            g: dict[str, str] = {}
            for cyc in re.findall(r"\(([^()]*)\)", line):
                pts = cyc.replace(",", " ").split()
                for x, y in zip(pts, pts[1:] + pts[:1]):
                    if x in g:
                        raise FormatError(f"line {lineno}: {x!r} appears twice")
                    g[x] = y
            gens.append(g)
        return cls(points, gens)

    def elements(self) -> list[tuple[str, ...]]:
        """Closure of the generators (images of ``points``), in discovery order."""
        if self._elements is None:
            ident = self.points
            idx = {p: i for i, p in enumerate(self.points)}
            seen = {ident}
            out = [ident]
            frontier = [ident]
            while frontier:
                nxt = []
                for e in frontier:
                    for g in self.generators:
                        # composite: first e, then g
                        h = tuple(g[idx[x]] for x in e)
                        if h not in seen:
                            seen.add(h)
                            out.append(h)
                            nxt.append(h)
                frontier = nxt
            self._elements = out
        return self._elements

    def mappings(self) -> list[dict[str, str]]:
        return [dict(zip(self.points, e)) for e in self.elements()]

    def canonical(self, p: AttachmentPattern) -> AttachmentPattern:
        return min((p.relabel(g) for g in self.mappings()), key=AttachmentPattern.sort_key)


def enumerate_patterns(
    curves: Sequence[str],
    ctx: ManifoldContext,
    symmetry: PermutationGroup | None = None,
) -> list[AttachmentPattern]:
    """Every attachment pattern on ``curves`` satisfying the bounds.

    Labeled by default.  With ``symmetry``, one representative per orbit:
    the least pattern (in :meth:`AttachmentPattern.sort_key` order) of its
    orbit.  Output is sorted by that key.
    """
    curves = sorted(dict.fromkeys(curves), key=curve_sort_key)
    m = ctx.m
    allowed = {
        k: [g for g in range(m + 2) if block_bound(g, k, m)] for k in range(1, len(curves) + 1)
    }
    out = []
    for blocks in set_partitions(curves):
        choices = [allowed[len(b)] for b in blocks]
        for genera in itertools.product(*choices):
            out.append(AttachmentPattern(blocks, tuple(genera)))
    if symmetry is not None:
        if set(symmetry.points) != set(curves):
            raise PatternError("symmetry group must act on exactly the curve set")
        maps = symmetry.mappings()
        out = [
            p for p in out
            if min((p.relabel(g) for g in maps), key=AttachmentPattern.sort_key) == p
        ]
    out.sort(key=AttachmentPattern.sort_key)
    return out


# ---------------------------------------------------------------------------
# boundary bookkeeping


@dataclass(frozen=True)
class BoundaryLedger:
    """Genera of the closed entrance (``+``) and exit (``-``) boundary surfaces."""

    entrance: tuple[int, ...]
    exit: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entrance", tuple(int(g) for g in self.entrance))
        object.__setattr__(self, "exit", tuple(int(g) for g in self.exit))
        if any(g < 0 for g in self.entrance + self.exit):
            raise PatternError("genera must be >= 0")

    @property
    def t(self):
        return len(self.entrance)

    @property
    def t1(self):
        return sum(1 for g in self.entrance if g > 1)

    @property
    def t2(self):
        return sum(1 for g in self.entrance if g == 0)

    @property
    def s(self):
        return len(self.exit)

    @property
    def s1(self):
        return sum(1 for g in self.exit if g > 1)

    @property
    def s2(self):
        return sum(1 for g in self.exit if g == 0)

    @property
    def euler_entrance(self) -> int:
        return sum(2 - 2 * g for g in self.entrance)

    @property
    def euler_exit(self) -> int:
        return sum(2 - 2 * g for g in self.exit)

    def to_json(self) -> dict:
        return {
            "entrance": list(self.entrance),
            "exit": list(self.exit),
            "t": self.t, "t1": self.t1, "t2": self.t2,
            "s": self.s, "s1": self.s1, "s2": self.s2,
        }

    @classmethod
    def parse(cls, text: str) -> "BoundaryLedger":
        """``entrance: 2 0`` / ``exit: 1`` lines (order free, ``#`` comments)."""
        sides: dict[str, tuple[int, ...]] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, rest = line.partition(":")
            key = key.strip()
            if not sep or key not in ("entrance", "exit") or key in sides:
                raise FormatError(f"line {lineno}: expected 'entrance: g ...' or 'exit: g ...'")
            try:
                sides[key] = tuple(int(x) for x in rest.replace(",", " ").split())
            except ValueError:
                raise FormatError(f"line {lineno}: genera must be integers") from None
        if set(sides) != {"entrance", "exit"}:
            raise FormatError("ledger needs both 'entrance:' and 'exit:' lines")
        return cls(sides["entrance"], sides["exit"])

    def format(self) -> str:
        return (
            "entrance: " + " ".join(map(str, self.entrance)) + "\n"
            "exit: " + " ".join(map(str, self.exit)) + "\n"
        )


def assemble_boundary(b: ThickenedBoundary, p: AttachmentPattern) -> BoundaryLedger:
    """Close up the entrance and exit surfaces by the attached ``Sigma x {0}``
    and ``Sigma x {1}`` caps; report the genus of each closed component."""
    if set(p.curves) != set(b.curve_ids) or len(p.curves) != len(b.curve_ids):
        raise PatternError(
            f"pattern curves {list(p.curves)} do not partition the dividing curves "
            f"{list(b.curve_ids)}"
        )

    def side(comps, which: str):
        parent = list(range(len(comps) + p.t))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for n, blk in enumerate(p.blocks):
            for cid in blk:
                c = getattr(b.curve(cid), which)
                ra, rb = find(c), find(len(comps) + n)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        chi: dict[int, int] = {}
        for i, comp in enumerate(comps):
            chi[find(i)] = chi.get(find(i), 0) + comp.euler
        for n, (blk, g) in enumerate(zip(p.blocks, p.genera)):
            r = find(len(comps) + n)
            chi[r] = chi.get(r, 0) + 2 - 2 * g - len(blk)
        genera = []
        for r in sorted(chi):
            if chi[r] > 2 or chi[r] % 2:  # pragma: no cover - orientable closed surfaces only
                raise PatternError(f"assembled component has impossible chi={chi[r]}")
            genera.append((2 - chi[r]) // 2)
        return tuple(genera)

    return BoundaryLedger(side(b.entrance, "entrance"), side(b.exit, "exit"))


def euler_feasible(l: BoundaryLedger) -> bool:
    """Entrance/exit Euler balance ``sum(2 - 2g+) == sum(2 - 2g-)``."""
    return l.euler_entrance == l.euler_exit


@dataclass(frozen=True)
class NFormula:
    """``n = m_1 + ... + m_t1 + n_1 + ... + n_s1 + r`` with the ``m_i``, ``n_j``
    left as unknown nonnegative integers."""

    m_terms: tuple[str, ...]
    n_terms: tuple[str, ...]
    r: int

    def evaluate(self, m_values: Sequence[int], n_values: Sequence[int]) -> int:
        if len(m_values) != len(self.m_terms) or len(n_values) != len(self.n_terms):
            raise ValueError("wrong number of values")
        return sum(m_values) + sum(n_values) + self.r

    def to_json(self) -> dict:
        return {"m_terms": list(self.m_terms), "n_terms": list(self.n_terms), "r": self.r,
                "text": str(self)}

    def __str__(self):
        terms = list(self.m_terms) + list(self.n_terms) + [str(self.r)]
        return "n = " + " + ".join(terms)


@dataclass(frozen=True)
class Accounting:
    r: int
    r_entrance: int
    r_exit: int
    n_formula: NFormula

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "r_entrance": self.r_entrance,
            "r_exit": self.r_exit,
            "n_formula": self.n_formula.to_json(),
        }


def r_expressions(l: BoundaryLedger) -> tuple[int, int]:
    """``sum_{g+>1} g+ - t1 + s2`` and ``sum_{g->1} g- - s1 + t2``."""
    ra = sum(g for g in l.entrance if g > 1) - l.t1 + l.s2
    rb = sum(g for g in l.exit if g > 1) - l.s1 + l.t2
    return ra, rb


def realization_accounting(l: BoundaryLedger) -> Accounting:
    ra, rb = r_expressions(l)
    if ra != rb:
        raise InfeasibleLedger(
            f"infeasible ledger: r-expressions disagree ({ra} vs {rb}); "
            f"chi(entrance)={l.euler_entrance}, chi(exit)={l.euler_exit}"
        )
    formula = NFormula(
        tuple(f"m_{i}" for i in range(1, l.t1 + 1)),
        tuple(f"n_{j}" for j in range(1, l.s1 + 1)),
        ra,
    )
    return Accounting(ra, ra, rb, formula)
