"""Flow-equivalence invariants of edge shifts: the Parry-Sullivan number
``det(I - A)`` and the Bowen-Franks group ``coker(I - A)``.

Exact integer arithmetic only (Python ints); no floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .shift import AdjacencyMatrix, EdgeGraph, VertexGraph

__all__ = [
    "SmithForm",
    "AbelianGroup",
    "Verdict",
    "smith_normal_form",
    "bareiss_det",
    "parry_sullivan",
    "bowen_franks",
    "flow_equivalence_certificate",
]

# Flip on in tests to re-verify U*M*V == D after every reduction.
VERIFY_TRANSFORMS = False


@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple[int, ...]
    rank: int
    free_rank: int
    U: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())
    V: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^free_rank + Z/t1 + ... + Z/tk`` with ``t1 | t2 | ... | tk`` and all ``ti >= 2``."""

    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    @classmethod
    def from_diagonal(cls, diag: Sequence[int]) -> "AbelianGroup":
        torsion = tuple(sorted(abs(d) for d in diag if abs(d) > 1))
        free = sum(1 for d in diag if d == 0)
        return cls(torsion, free).canonical()

    def canonical(self) -> "AbelianGroup":
        # re-run invariant factor decomposition on the torsion list so that any
        # list of cyclic orders comes out in divisibility order
        if not self.torsion:
            return AbelianGroup((), self.free_rank)
        n = len(self.torsion)
        diag = [[self.torsion[i] if i == j else 0 for j in range(n)] for i in range(n)]
        snf = smith_normal_form(diag)
        torsion = tuple(d for d in snf.diagonal if d > 1)
        return AbelianGroup(torsion, self.free_rank)

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def order(self) -> int | None:
        """Group order, or ``None`` when infinite."""
        if self.free_rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def to_json(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def _as_rows(m) -> list[list[int]]:
    if isinstance(m, EdgeGraph):
        m = m.transition
    elif isinstance(m, VertexGraph):
        m = m.matrix().entries
    elif isinstance(m, AdjacencyMatrix):
        m = m.entries
    elif hasattr(m, "tolist"):
        m = m.tolist()
    return [[int(x) for x in row] for row in m]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def smith_normal_form(m) -> SmithForm:
    """Smith normal form with unimodular ``U``, ``V`` such that ``U M V = D``.

    Pivot is the smallest nonzero absolute value in the active block (ties:
    lowest row, then lowest column).  Diagonal entries are nonnegative and
    each divides the next.
    """
    a = _as_rows(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    U = _identity(rows)
    V = _identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    t = 0
    while t < min(rows, cols):
        # pivot search
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = abs(a[i][j])
                if x and (best is None or x < best[0]):
                    best = (x, i, j)
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            dirty = False
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        dirty = True
            if dirty:
                # a remainder smaller than the pivot appeared; move it in
                best = None
                for i in range(t, rows):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), i, "r")
                for j in range(t, cols):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), j, "c")
                _, k, kind = best
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            # row and column cleared; enforce divisibility on the rest
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    diag = tuple(a[i][i] for i in range(min(rows, cols)))
    if VERIFY_TRANSFORMS:
        D = _matmul(_matmul(U, _as_rows(m)), V)
        assert D == a, "U*M*V != D"
        assert all(D[i][j] == 0 for i in range(rows) for j in range(cols) if i != j)
    rank = sum(1 for d in diag if d)
    return SmithForm(
        diagonal=diag,
        rank=rank,
        free_rank=rows - rank,
        U=tuple(map(tuple, U)),
        V=tuple(map(tuple, V)),
    )


def bareiss_det(m) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    a = _as_rows(m)
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _i_minus(a) -> list[list[int]]:
    rows = _as_rows(a)
    n = len(rows)
    return [[int(i == j) - rows[i][j] for j in range(n)] for i in range(n)]


def parry_sullivan(a) -> int:
    """Signed Parry-Sullivan number ``det(I - A)``."""
    return bareiss_det(_i_minus(a))


def bowen_franks(a) -> AbelianGroup:
    """Bowen-Franks group: cokernel of ``I - A`` in canonical form."""
    snf = smith_normal_form(_i_minus(a))
    return AbelianGroup.from_diagonal(snf.diagonal)


@dataclass(frozen=True)
class Verdict:
    """``DISTINGUISHED`` with a witness, or ``INCONCLUSIVE``."""

    kind: str
    witness: str = ""
    ps: tuple[int, int] | None = None
    bf: tuple[AbelianGroup, AbelianGroup] | None = None

    @property
    def distinguished(self) -> bool:
        return self.kind == "DISTINGUISHED"

    def to_json(self) -> dict:
        return {
            "verdict": self.kind,
            "witness": self.witness,
            "ps": list(self.ps) if self.ps else None,
            "bf": [g.to_json() for g in self.bf] if self.bf else None,
        }


def flow_equivalence_certificate(a, b) -> Verdict:
    """Compare PS and BF invariants.

    Only the sound direction is reported: a mismatch proves the two shifts
    are not flow equivalent; agreement is ``INCONCLUSIVE``.
    """
    psa, psb = parry_sullivan(a), parry_sullivan(b)
    bfa, bfb = bowen_franks(a), bowen_franks(b)
    if psa != psb:
        return Verdict("DISTINGUISHED", f"PS: {psa} != {psb}", (psa, psb), (bfa, bfb))
    if bfa != bfb:
        return Verdict("DISTINGUISHED", f"BF: {bfa} != {bfb}", (psa, psb), (bfa, bfb))
    return Verdict("INCONCLUSIVE", "", (psa, psb), (bfa, bfb))
