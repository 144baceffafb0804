"""PD-code link diagrams and the admissibility checks run on them.

Each crossing is a 4-tuple of arc labels listed counterclockwise, starting
at the incoming under-strand (the KnotAtlas convention).  Positions 0 and 2
are therefore the under-strand and positions 1 and 3 the over-strand.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field

from .planar_map import CombinatorialMap, MapError

_LINE = re.compile(r"X\s*\[?\s*([^\]]*?)\s*\]?\s*$")


class PDSyntaxError(ValueError):
    """Malformed PD text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class LinkDiagram:
    crossings: tuple[tuple[int, int, int, int], ...]

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    @property
    def arc_count(self) -> int:
        return len({a for x in self.crossings for a in x})

    def arcs(self) -> list[int]:
        return sorted({a for x in self.crossings for a in x})

    def occurrences(self) -> dict[int, list[tuple[int, int]]]:
        """Arc label -> the two (crossing, position) slots it occupies."""
        occ: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for x, tup in enumerate(self.crossings):
            for i, a in enumerate(tup):
                occ[a].append((x, i))
        return dict(occ)

    def strand_components(self) -> list[list[int]]:
        """Arc labels grouped by link component, in traversal order."""
        occ = self.occurrences()
        seen: set[int] = set()
        comps = []
        for start in sorted(occ):
            if start in seen:
                continue
            comp = []
            arc = start
            x, i = occ[arc][1]
            while arc not in seen:
                seen.add(arc)
                comp.append(arc)
                # the arc enters crossing x at slot i and leaves opposite
                j = (i + 2) % 4
                arc = self.crossings[x][j]
                ends = occ[arc]
                x, i = ends[0] if ends[1] == (x, j) else ends[1]
                if ends[0] == ends[1]:
                    break
            comps.append(comp)
        return comps


def parse_pd_code(text: str) -> LinkDiagram:
    """Parse PD text (``X a,b,c,d`` per line, ``/`` or newline separated)."""
    if not text or not text.strip():
        raise PDSyntaxError("empty input")
    crossings = []
    slots: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        offset = 0
        for chunk in raw.split("/"):
            col = offset + 1
            offset += len(chunk) + 1
            body = chunk.split("#", 1)[0]
            if not body.strip():
                if "#" in chunk:
                    break
                continue
            lead = len(body) - len(body.lstrip())
            col += lead
            m = _LINE.match(body.strip())
            if not m:
                raise PDSyntaxError(f"expected 'X a,b,c,d', got {body.strip()!r}",
                                    lineno, col)
            parts = [p.strip() for p in m.group(1).split(",")]
            if len(parts) != 4:
                raise PDSyntaxError(f"crossing needs 4 arcs, got {len(parts)}",
                                    lineno, col)
            labels = []
            for p in parts:
                if not p.isdigit() or int(p) < 1:
                    raise PDSyntaxError(f"arc label {p!r} is not a positive integer",
                                        lineno, col)
                labels.append(int(p))
            for a in labels:
                slots[a].append((lineno, col))
            crossings.append(tuple(labels))
            if "#" in chunk:
                break
    if not crossings:
        raise PDSyntaxError("no crossings found")
    for arc, where in sorted(slots.items()):
        if len(where) != 2:
            line, col = where[-1]
            raise PDSyntaxError(f"arc {arc} used {len(where)} times (expected 2)",
                                line, col)
    return LinkDiagram(tuple(crossings))


def emit_pd(diagram: LinkDiagram) -> str:
    lines = [f"X {','.join(map(str, x))}" for x in sorted(diagram.crossings)]
    return "\n".join(lines) + "\n"


def build_planar_map(diagram: LinkDiagram) -> CombinatorialMap:
    """4-valent map of the projection; dart ``4*x + i`` leaves crossing ``x``
    along slot ``i``.  Faces are labelled by their smallest boundary arc."""
    occ = diagram.occurrences()
    n = 4 * diagram.crossing_count
    twin = [0] * n
    for arc, ends in occ.items():
        if len(ends) != 2:
            raise MapError(f"arc {arc} does not have two ends")
        (x, i), (y, j) = ends
        twin[4 * x + i] = 4 * y + j
        twin[4 * y + j] = 4 * x + i

    def rot_inv(d: int) -> int:
        return 4 * (d // 4) + (d - 1) % 4

    succ = [rot_inv(twin[d]) for d in range(n)]
    cmap = CombinatorialMap(twin, succ)
    chi = cmap.euler_characteristic()
    comps = len(cmap.components())
    if chi != 2 * comps:
        raise MapError(f"PD code is not planar (Euler characteristic {chi} "
                       f"over {comps} component(s))")
    labels = [min(arc_of_dart(diagram, d) for d in f) for f in cmap.faces]
    return cmap.with_face_labels(labels)


def arc_of_dart(diagram: LinkDiagram, d: int) -> int:
    return diagram.crossings[d // 4][d % 4]


@dataclass(frozen=True)
class ValidationReport:
    alternating: bool
    reduced: bool
    prime: bool
    non_split: bool
    witnesses: dict[str, object] = field(default_factory=dict)
    components: int = 1

    @property
    def admissible(self) -> bool:
        return self.alternating and self.reduced and self.prime and self.non_split

    def lines(self) -> list[str]:
        out = []
        for name in ("alternating", "reduced", "prime", "non_split"):
            ok = getattr(self, name)
            line = f"{name}: {str(ok).lower()}"
            if not ok:
                line += f" (witness: {self.witnesses[name]})"
            out.append(line)
        out.append(f"components: {self.components}")
        return out


def validate(diagram: LinkDiagram, cmap: CombinatorialMap) -> ValidationReport:
    witnesses: dict[str, object] = {}

    alternating = True
    for arc, ends in sorted(diagram.occurrences().items()):
        if ends[0][1] % 2 == ends[1][1] % 2:
            alternating = False
            witnesses["alternating"] = {"arc": arc, "slots": ends}
            break

    reduced = True
    for x in range(diagram.crossing_count):
        faces = [cmap.face_of[4 * x + i] for i in range(4)]
        if len(set(faces)) < 4:
            reduced = False
            witnesses["reduced"] = {"crossing": x, "tuple": diagram.crossings[x]}
            break

    prime = True
    shared: dict[tuple[int, int], list[int]] = defaultdict(list)
    for d, t in cmap.edges():
        f, g = sorted((cmap.face_of[d], cmap.face_of[t]))
        shared[f, g].append(arc_of_dart(diagram, d))
    for (f, g), arcs in sorted(shared.items()):
        if len(arcs) >= 2:
            prime = False
            witnesses["prime"] = {"faces": (f, g), "shared_edges": len(arcs),
                                  "arcs": sorted(arcs)}
            break

    comps = cmap.components()
    non_split = len(comps) == 1
    if not non_split:
        witnesses["non_split"] = {
            "components": [sorted({arc_of_dart(diagram, d) for d in c}) for c in comps]}

    return ValidationReport(alternating, reduced, prime, non_split, witnesses,
                            len(diagram.strand_components()))


def diagrams_isomorphic(a: LinkDiagram, b: LinkDiagram) -> bool:
    """Equality up to relabelling arcs and reordering crossings.

    Tuples are never rotated: slot 0 carries the under-strand.
    """
    if a.crossing_count != b.crossing_count or a.arc_count != b.arc_count:
        return False
    if a.crossing_count == 0:
        return True
    occ_a, occ_b = a.occurrences(), b.occurrences()
    for start in range(b.crossing_count):
        cross_map = {0: start}
        arc_map: dict[int, int] = {}
        queue = [0]
        ok = True
        while queue and ok:
            x = queue.pop()
            y = cross_map[x]
            for i in range(4):
                arc_a, arc_b = a.crossings[x][i], b.crossings[y][i]
                if arc_map.setdefault(arc_a, arc_b) != arc_b:
                    ok = False
                    break
                (x2, i2), = [s for s in occ_a[arc_a] if s != (x, i)] or [(x, i)]
                (y2, j2), = [s for s in occ_b[arc_b] if s != (y, i)] or [(y, i)]
                if i2 != j2:
                    ok = False
                    break
                if x2 not in cross_map:
                    cross_map[x2] = y2
                    queue.append(x2)
                elif cross_map[x2] != y2:
                    ok = False
                    break
        if ok and len(cross_map) == a.crossing_count and \
                len(set(cross_map.values())) == a.crossing_count and \
                len(set(arc_map.values())) == len(arc_map):
            return True
    return False


def braid_closure_pd(word: list[int], strands: int) -> LinkDiagram:
    """Diagram of the closure of a braid word.

    Generator ``k`` (1-based) crosses positions ``k`` and ``k+1``; a
    positive letter takes the strand starting at the left position over.
    Strands run upward and the closure returns them on the right.
    """
    if strands < 2:
        raise ValueError("need at least two strands")
    labels = list(range(strands))  # current open arc id at each position
    next_id = strands
    crossings = []
    for letter in word:
        k = abs(letter) - 1
        if not 0 <= k < strands - 1:
            raise ValueError(f"generator {letter} out of range")
        bl, br = labels[k], labels[k + 1]
        tl, tr = next_id, next_id + 1
        next_id += 2
        # left strand runs bottom-left -> top-right, right strand bottom-right -> top-left
        if letter > 0:
            crossings.append((br, tr, tl, bl))   # right strand passes under
        else:
            crossings.append((bl, br, tr, tl))   # left strand passes under
        labels[k], labels[k + 1] = tl, tr
    # closure: top arc at each position is the bottom arc at that position
    alias = {labels[p]: p for p in range(strands)}
    rename: dict[int, int] = {}

    def canon(a: int) -> int:
        a = alias.get(a, a)
        if a not in rename:
            rename[a] = len(rename) + 1
        return rename[a]

    return LinkDiagram(tuple(tuple(canon(a) for a in x) for x in crossings))
