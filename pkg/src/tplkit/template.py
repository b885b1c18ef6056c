"""Templates in branch-line normal form.

A branch line has ``n_in`` incoming slots, stacked front to back, and
``n_out`` outgoing slots, laid left to right; the gaps between consecutive
outgoing slots are exit windows.  Each incoming strip covers the whole
branch line.  A strip runs from an outgoing slot of one branch line to an
incoming slot of another (possibly the same) and carries an integer number
of half twists; only the parity matters for the thickened boundary.

Indices in TPL v1 files and in move sites are 0-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import FormatError, SurgeryError, TemplateError
from .shift import EdgeGraph, PeriodicWord, _fresh, _merge_name

__all__ = [
    "BranchLine",
    "Strip",
    "Template",
    "validate",
    "crush_to_edge_graph",
    "genus",
    "slide_move",
    "split_move",
    "unsplit_move",
    "slide_sites",
    "split_sites",
    "unsplit_sites",
    "symbolic_orbits",
    "lorenz",
    "annulus",
]


@dataclass(frozen=True)
class BranchLine:
    id: str
    n_in: int
    n_out: int


@dataclass(frozen=True)
class Strip:
    id: str
    src: str
    out_index: int
    dst: str
    in_index: int
    twists: int = 0


@dataclass(frozen=True)
class Template:
    branch_lines: tuple[BranchLine, ...]
    strips: tuple[Strip, ...]

    def __post_init__(self):
        object.__setattr__(self, "branch_lines", tuple(self.branch_lines))
        object.__setattr__(self, "strips", tuple(self.strips))

    # lookups ----------------------------------------------------------------

    @cached_property
    def _bl(self) -> dict[str, BranchLine]:
        return {b.id: b for b in self.branch_lines}

    @cached_property
    def _st(self) -> dict[str, Strip]:
        return {s.id: s for s in self.strips}

    @cached_property
    def _slots(self):
        ins: dict[str, list] = {b.id: [None] * max(b.n_in, 0) for b in self.branch_lines}
        outs: dict[str, list] = {b.id: [None] * max(b.n_out, 0) for b in self.branch_lines}
        for s in self.strips:
            if s.dst in ins and 0 <= s.in_index < len(ins[s.dst]):
                ins[s.dst][s.in_index] = s.id
            if s.src in outs and 0 <= s.out_index < len(outs[s.src]):
                outs[s.src][s.out_index] = s.id
        return ins, outs

    def branch(self, q: str) -> BranchLine:
        try:
            return self._bl[q]
        except KeyError:
            raise SurgeryError(f"no branch line {q!r}") from None

    def strip(self, s: str) -> Strip:
        try:
            return self._st[s]
        except KeyError:
            raise SurgeryError(f"no strip {s!r}") from None

    def ins(self, q: str) -> tuple[str, ...]:
        """Strip ids at the incoming slots of ``q``, front to back."""
        self.branch(q)
        return tuple(self._slots[0][q])

    def outs(self, q: str) -> tuple[str, ...]:
        """Strip ids at the outgoing slots of ``q``, left to right."""
        self.branch(q)
        return tuple(self._slots[1][q])

    @property
    def branch_ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.branch_lines)

    @property
    def strip_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.strips)

    @property
    def degenerate(self) -> bool:
        """No branching at all: a single twisted or untwisted band."""
        return all(b.n_in == 1 and b.n_out == 1 for b in self.branch_lines)

    # construction -----------------------------------------------------------

    @classmethod
    def from_lists(
        cls,
        order: Sequence[str],
        ins: Mapping[str, Sequence[str]],
        outs: Mapping[str, Sequence[str]],
        strip_order: Sequence[str],
        twists: Mapping[str, int],
    ) -> "Template":
        """Assemble from per-branch-line slot lists."""
        src: dict[str, tuple[str, int]] = {}
        dst: dict[str, tuple[str, int]] = {}
        for q in order:
            for j, s in enumerate(outs[q]):
                src[s] = (q, j)
            for k, s in enumerate(ins[q]):
                dst[s] = (q, k)
        bls = tuple(BranchLine(q, len(ins[q]), len(outs[q])) for q in order)
        strips = tuple(
            Strip(s, src[s][0], src[s][1], dst[s][0], dst[s][1], int(twists[s]))
            for s in strip_order
        )
        return cls(bls, strips)

    def lists(self):
        ins = {q: list(self.ins(q)) for q in self.branch_ids}
        outs = {q: list(self.outs(q)) for q in self.branch_ids}
        twists = {s.id: s.twists for s in self.strips}
        return list(self.branch_ids), ins, outs, list(self.strip_ids), twists

    # TPL v1 -------------------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "Template":
        bls: list[BranchLine] = []
        strips: list[Strip] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            try:
                if tok[0] == "branchline" and len(tok) == 4:
                    kv = dict(t.split("=", 1) for t in tok[2:])
                    bls.append(BranchLine(tok[1], int(kv["in"]), int(kv["out"])))
                elif tok[0] == "strip" and len(tok) in (5, 6) and tok[3] == "->":
                    src, oi = tok[2].rsplit(".", 1)
                    dst, ii = tok[4].rsplit(".", 1)
                    tw = 0
                    if len(tok) == 6:
                        key, val = tok[5].split("=", 1)
                        if key != "twists":
                            raise ValueError(f"unknown field {key!r}")
                        tw = int(val)
                    strips.append(Strip(tok[1], src, int(oi), dst, int(ii), tw))
                else:
                    raise ValueError("unrecognised line")
            except (ValueError, KeyError) as exc:
                raise FormatError(f"TPL v1 line {lineno}: {exc}: {raw.strip()!r}") from None
        return cls(tuple(bls), tuple(strips))

    def format(self) -> str:
        out = ["# TPL v1"]
        for b in self.branch_lines:
            out.append(f"branchline {b.id} in={b.n_in} out={b.n_out}")
        for s in self.strips:
            out.append(
                f"strip {s.id} {s.src}.{s.out_index} -> {s.dst}.{s.in_index} twists={s.twists}"
            )
        return "\n".join(out) + "\n"

    def to_json(self) -> dict:
        return {
            "branch_lines": [
                {"id": b.id, "in": list(self.ins(b.id)), "out": list(self.outs(b.id))}
                for b in self.branch_lines
            ],
            "strips": [
                {"id": s.id, "from": [s.src, s.out_index], "to": [s.dst, s.in_index],
                 "twists": s.twists}
                for s in self.strips
            ],
        }


# ---------------------------------------------------------------------------
# validation


def validate(t: Template) -> list[str]:
    """Every violated template invariant, as human-readable strings."""
    problems: list[str] = []
    seen: set[str] = set()
    for b in t.branch_lines:
        if b.id in seen:
            problems.append(f"duplicate branch line id {b.id!r}")
        seen.add(b.id)
        if b.n_in < 1:
            problems.append(f"branch line {b.id!r}: needs >= 1 incoming slot")
        if b.n_out < 1:
            problems.append(f"branch line {b.id!r}: needs >= 1 outgoing slot")
    if not t.branch_lines:
        problems.append("template has no branch lines")
    bl = {b.id: b for b in t.branch_lines}
    used_in: dict[tuple[str, int], str] = {}
    used_out: dict[tuple[str, int], str] = {}
    sids: set[str] = set()
    for s in t.strips:
        if s.id in sids:
            problems.append(f"duplicate strip id {s.id!r}")
        sids.add(s.id)
        for end, q, idx, cap, used in (
            ("source", s.src, s.out_index, "n_out", used_out),
            ("target", s.dst, s.in_index, "n_in", used_in),
        ):
            if q not in bl:
                problems.append(f"strip {s.id!r}: {end} branch line {q!r} does not exist")
                continue
            if not 0 <= idx < getattr(bl[q], cap):
                problems.append(f"strip {s.id!r}: {end} slot {q}.{idx} does not exist")
                continue
            if (q, idx) in used:
                problems.append(
                    f"strip {s.id!r}: {end} slot {q}.{idx} already used by {used[(q, idx)]!r}"
                )
            used[(q, idx)] = s.id
    for b in t.branch_lines:
        for k in range(max(b.n_in, 0)):
            if (b.id, k) not in used_in:
                problems.append(f"incoming slot {b.id}.{k} is not used by any strip")
        for j in range(max(b.n_out, 0)):
            if (b.id, j) not in used_out:
                problems.append(f"outgoing slot {b.id}.{j} is not used by any strip")
    # connectivity of the spine (branch lines joined by strips)
    if bl:
        adj: dict[str, set[str]] = {q: set() for q in bl}
        for s in t.strips:
            if s.src in bl and s.dst in bl:
                adj[s.src].add(s.dst)
                adj[s.dst].add(s.src)
        start = next(iter(bl))
        reach = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in reach:
                    reach.add(w)
                    stack.append(w)
        if len(reach) != len(bl):
            problems.append(
                f"template is disconnected ({len(reach)} of {len(bl)} branch lines reachable)"
            )
    return problems


def check(t: Template) -> Template:
    problems = validate(t)
    if problems:
        raise TemplateError(problems)
    return t


# ---------------------------------------------------------------------------
# crush, genus, orbits


def crush_to_edge_graph(t: Template) -> EdgeGraph:
    """Collapse the stable direction: strips become vertices, and ``s -> s'``
    whenever ``s`` ends on the branch line that ``s'`` leaves."""
    check(t)
    ids = t.strip_ids
    rows = [
        tuple(int(s.dst == r.src) for r in t.strips)
        for s in t.strips
    ]
    return EdgeGraph(ids, tuple(rows))


def genus(t: Template) -> int:
    """Handlebody genus of the thickened template: first Betti number of the
    spine graph, ``#strips - #branch lines + 1``."""
    check(t)
    return len(t.strips) - len(t.branch_lines) + 1


def symbolic_orbits(t: Template | EdgeGraph, k: int) -> list[PeriodicWord]:
    """All periodic orbits of period ``<= k`` of the crushed edge shift.

    Each orbit is reported once, as the least rotation of a primitive closed
    path (least in vertex order).  Sorted by period, then by that rotation.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = t if isinstance(t, EdgeGraph) else crush_to_edge_graph(t)
    n = g.n
    succ = [[j for j in range(n) if g.transition[i][j]] for i in range(n)]
    found: list[tuple[int, ...]] = []

    def extend(path):
        if len(path) <= k and g.transition[path[-1]][path[0]]:
            word = tuple(path)
            if _is_least_primitive_rotation(word):
                found.append(word)
        if len(path) == k:
            return
        for w in succ[path[-1]]:
            if w >= path[0]:  # least rotation starts with the least symbol
                path.append(w)
                extend(path)
                path.pop()

    for start in range(n):
        extend([start])
    found.sort(key=lambda w: (len(w), w))
    return [PeriodicWord(tuple(g.vertices[i] for i in w)) for w in found]


def _is_least_primitive_rotation(w: tuple[int, ...]) -> bool:
    p = len(w)
    for r in range(1, p):
        rot = w[r:] + w[:r]
        if rot <= w:  # equal rotation means w is a proper power
            return False
    return True


# ---------------------------------------------------------------------------
# moves


def _require_valid(t: Template):
    check(t)


def slide_sites(t: Template) -> list[str]:
    return [b.id for b in t.branch_lines if b.n_in >= 2]


def slide_move(t: Template, site: str) -> Template:
    """Half-turn of the branch line ``site`` about the flow direction.

    Reverses the front-to-back order of its incoming sheets and the
    left-to-right order of its outgoing strips.  Incoming strips gain a half
    twist and outgoing strips lose one (a strip that both leaves and returns
    to ``site`` is unchanged).  The crushed edge graph is unchanged and the
    thickened template is carried to itself by an isotopy, so genus and the
    entrance/exit/dividing-curve data are preserved.  Requires at least two
    incoming sheets (otherwise there is no branching order to reassociate).
    """
    _require_valid(t)
    b = t.branch(site)
    if b.n_in < 2:
        raise SurgeryError(f"slide needs >= 2 incoming slots at {site!r} (has {b.n_in})")
    order, ins, outs, sorder, tw = t.lists()
    ins[site] = ins[site][::-1]
    outs[site] = outs[site][::-1]
    for s in t.strips:
        if s.dst == site:
            tw[s.id] += 1
        if s.src == site:
            tw[s.id] -= 1
    return Template.from_lists(order, ins, outs, sorder, tw)


def split_sites(t: Template) -> list[tuple[str, int]]:
    return [(b.id, j) for b in t.branch_lines for j in range(1, b.n_out)]


def split_move(t: Template, site: str, gap: int) -> Template:
    """Cut the template backward from exit window ``gap`` of branch line ``site``.

    ``gap = j`` is the window between outgoing slots ``j-1`` and ``j``.  The
    branch line becomes ``site+'a'`` (outgoing slots ``< j``) and ``site+'b'``
    (the rest).  Every incoming strip ``s`` of ``site`` is cut lengthwise into
    ``s+'a'`` (ending on the new left line) and ``s+'b'`` (ending on the right
    one); at its source the two halves occupy adjacent slots, left half first
    for an even number of half twists and right half first for an odd number.
    On crushed graphs this is one out-split per incoming strip.
    """
    _require_valid(t)
    b = t.branch(site)
    if not 1 <= gap < b.n_out:
        raise SurgeryError(
            f"split gap must lie in 1..{b.n_out - 1} at {site!r} (got {gap})"
        )
    order, ins, outs, sorder, tw = t.lists()
    taken_b = set(order) - {site}
    qa = _fresh(site + "a", taken_b)
    qb = _fresh(site + "b", taken_b | {qa})
    cut = ins[site]
    taken_s = set(sorder) - set(cut)
    halves: dict[str, tuple[str, str]] = {}
    for s in cut:
        sa = _fresh(s + "a", taken_s)
        taken_s.add(sa)
        sb = _fresh(s + "b", taken_s)
        taken_s.add(sb)
        halves[s] = (sa, sb)

    def replace(lst):
        out = []
        for s in lst:
            if s in halves:
                sa, sb = halves[s]
                out += [sa, sb] if tw[s] % 2 == 0 else [sb, sa]
            else:
                out.append(s)
        return out

    new_order: list[str] = []
    new_ins: dict[str, list[str]] = {}
    new_outs: dict[str, list[str]] = {}
    for q in order:
        if q == site:
            new_order += [qa, qb]
            new_outs[qa] = replace(outs[q][:gap])
            new_outs[qb] = replace(outs[q][gap:])
            new_ins[qa] = [halves[s][0] for s in cut]
            new_ins[qb] = [halves[s][1] for s in cut]
        else:
            new_order.append(q)
            new_outs[q] = replace(outs[q])
            new_ins[q] = list(ins[q])
    new_sorder: list[str] = []
    new_tw: dict[str, int] = {}
    for s in sorder:
        if s in halves:
            new_sorder += list(halves[s])
            new_tw[halves[s][0]] = new_tw[halves[s][1]] = tw[s]
        else:
            new_sorder.append(s)
            new_tw[s] = tw[s]
    return Template.from_lists(new_order, new_ins, new_outs, new_sorder, new_tw)


def _unsplit_pairs(t: Template, qa: str, qb: str):
    if qa == qb:
        raise SurgeryError("unsplit needs two distinct branch lines")
    ba, bb = t.branch(qa), t.branch(qb)
    if ba.n_in != bb.n_in:
        raise SurgeryError(f"{qa!r} and {qb!r} have different numbers of incoming slots")
    pairs = []
    for ra, rb in zip(t.ins(qa), t.ins(qb)):
        sa, sb = t.strip(ra), t.strip(rb)
        if sa.twists != sb.twists:
            raise SurgeryError(f"strips {ra!r} and {rb!r} carry different twists")
        if sa.src != sb.src:
            raise SurgeryError(f"strips {ra!r} and {rb!r} start on different branch lines")
        left, right = (sa, sb) if sa.twists % 2 == 0 else (sb, sa)
        if right.out_index != left.out_index + 1:
            raise SurgeryError(f"strips {ra!r} and {rb!r} do not leave from adjacent slots")
        pairs.append((ra, rb))
    return pairs


def unsplit_sites(t: Template) -> list[tuple[str, str]]:
    out = []
    for qa, qb in itertools.permutations(t.branch_ids, 2):
        try:
            _unsplit_pairs(t, qa, qb)
        except SurgeryError:
            continue
        out.append((qa, qb))
    return out


def unsplit_move(t: Template, left: str, right: str) -> Template:
    """Converse of :func:`split_move`: glue ``left`` and ``right`` back into
    one branch line whose outgoing slots are those of ``left`` then ``right``."""
    _require_valid(t)
    pairs = _unsplit_pairs(t, left, right)
    order, ins, outs, sorder, tw = t.lists()
    q = _merge_name(left, right, set(order) - {left, right})
    taken_s = set(sorder) - {s for p in pairs for s in p}
    merged: dict[str, str] = {}
    for ra, rb in pairs:
        r = _merge_name(ra, rb, taken_s)
        taken_s.add(r)
        merged[ra] = merged[rb] = r

    def collapse(lst):
        out = []
        for s in lst:
            r = merged.get(s, s)
            if out and s in merged and out[-1] == r:
                continue
            out.append(r)
        return out

    first = min(order.index(left), order.index(right))
    new_order, new_ins, new_outs = [], {}, {}
    for idx, p in enumerate(order):
        if p in (left, right):
            if idx == first:
                new_order.append(q)
                new_outs[q] = collapse(outs[left]) + collapse(outs[right])
                new_ins[q] = [merged[ra] for ra, _ in pairs]
            continue
        new_order.append(p)
        new_outs[p] = collapse(outs[p])
        new_ins[p] = list(ins[p])
    new_sorder, new_tw = [], {}
    for s in sorder:
        r = merged.get(s, s)
        if r not in new_tw:
            new_sorder.append(r)
            new_tw[r] = tw[s]
    return Template.from_lists(new_order, new_ins, new_outs, new_sorder, new_tw)


# ---------------------------------------------------------------------------
# stock templates


def lorenz(m: int = 0, n: int = 0) -> Template:
    """Lorenz-like template L(m, n): one branch line, left strip ``x`` with
    ``m`` half twists returning in front, right strip ``y`` with ``n`` behind."""
    return Template(
        (BranchLine("q", 2, 2),),
        (Strip("x", "q", 0, "q", 0, m), Strip("y", "q", 1, "q", 1, n)),
    )


def annulus(twists: int = 0) -> Template:
    """Single band closing up on one branch line (degenerate template)."""
    return Template((BranchLine("q", 1, 1),), (Strip("x", "q", 0, "q", 0, twists),))


def from_slot_lists(spec: Iterable[tuple[str, Sequence[str], Sequence[str]]], twists=None):
    """Convenience constructor: ``[(branch_id, ins, outs), ...]``."""
    spec = list(spec)
    order = [q for q, _, _ in spec]
    ins = {q: list(i) for q, i, _ in spec}
    outs = {q: list(o) for q, _, o in spec}
    sorder = [s for _, _, o in spec for s in o]
    tw = {s: 0 for s in sorder}
    tw.update(twists or {})
    return Template.from_lists(order, ins, outs, sorder, tw)
