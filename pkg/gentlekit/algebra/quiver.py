"""
Quivers, paths and monomial bound quivers.

Paths compose left to right: the path (a, b) traverses a and then b.
The order in which vertices and arrows are declared fixes the canonical
ordering used by every report.
"""
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from gentlekit.core.logging import get_logger
from gentlekit.exceptions import (
    NotAdmissibleError,
    ParseError,
    PreconditionError,
    ValidationError,
)

logger = get_logger(__name__)

ArrowPath = Tuple[str, ...]

_IDENTIFIER = re.compile(r"^[!-~]+$")


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class Path:
    """A path in a quiver; a trivial path carries only its vertex."""
    source: str
    target: str
    arrows: ArrowPath = ()

    @classmethod
    def trivial(cls, vertex: str) -> 'Path':
        return cls(source=vertex, target=vertex)

    @property
    def is_trivial(self) -> bool:
        return not self.arrows

    def __len__(self) -> int:
        return len(self.arrows)

    def __str__(self) -> str:
        return " ".join(self.arrows) if self.arrows else f"@{self.source}"


@dataclass(frozen=True)
class Quiver:
    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("Vertex identifiers must be unique",
                                  details={"vertices": list(self.vertices)})
        seen = set()
        declared = set(self.vertices)
        for arrow in self.arrows:
            if arrow.id in seen:
                raise ValidationError(f"Duplicate arrow identifier '{arrow.id}'")
            seen.add(arrow.id)
            if arrow.source not in declared or arrow.target not in declared:
                raise ValidationError(
                    f"Arrow '{arrow.id}' uses an undeclared vertex",
                    details={"arrow": arrow.id, "source": arrow.source, "target": arrow.target},
                )

    @cached_property
    def _arrow_map(self) -> Dict[str, Arrow]:
        return {arrow.id: arrow for arrow in self.arrows}

    @cached_property
    def arrow_order(self) -> Dict[str, int]:
        return {arrow.id: index for index, arrow in enumerate(self.arrows)}

    @cached_property
    def vertex_order(self) -> Dict[str, int]:
        return {vertex: index for index, vertex in enumerate(self.vertices)}

    @cached_property
    def _outgoing(self) -> Dict[str, Tuple[Arrow, ...]]:
        out: Dict[str, List[Arrow]] = {v: [] for v in self.vertices}
        for arrow in self.arrows:
            out[arrow.source].append(arrow)
        return {v: tuple(arrows) for v, arrows in out.items()}

    @cached_property
    def _incoming(self) -> Dict[str, Tuple[Arrow, ...]]:
        inc: Dict[str, List[Arrow]] = {v: [] for v in self.vertices}
        for arrow in self.arrows:
            inc[arrow.target].append(arrow)
        return {v: tuple(arrows) for v, arrows in inc.items()}

    def arrow(self, arrow_id: str) -> Arrow:
        try:
            return self._arrow_map[arrow_id]
        except KeyError:
            raise ValidationError(f"Unknown arrow '{arrow_id}'") from None

    def has_arrow(self, arrow_id: str) -> bool:
        return arrow_id in self._arrow_map

    def outgoing(self, vertex: str) -> Tuple[Arrow, ...]:
        return self._outgoing[vertex]

    def incoming(self, vertex: str) -> Tuple[Arrow, ...]:
        return self._incoming[vertex]

    def is_composable(self, arrows: Sequence[str]) -> bool:
        return all(self.arrow(a).target == self.arrow(b).source
                   for a, b in zip(arrows, arrows[1:]))

    def path(self, arrows: Sequence[str]) -> Path:
        arrows = tuple(arrows)
        if not arrows:
            raise ValidationError("A trivial path needs a vertex; use Path.trivial")
        if not self.is_composable(arrows):
            raise ValidationError(f"Arrows {' '.join(arrows)} do not compose")
        return Path(self.arrow(arrows[0]).source, self.arrow(arrows[-1]).target, arrows)


def _is_subpath(short: ArrowPath, long: ArrowPath) -> bool:
    n = len(short)
    return any(long[i:i + n] == short for i in range(len(long) - n + 1))


@dataclass(frozen=True)
class BoundQuiver:
    """A finite quiver with a minimal set of monomial relations (paths of length >= 2)."""
    name: str
    quiver: Quiver
    relations: Tuple[ArrowPath, ...] = field(default=())

    def __post_init__(self):
        checked: List[ArrowPath] = []
        for relation in self.relations:
            relation = tuple(relation)
            if len(relation) < 2:
                raise ValidationError(f"Relation '{' '.join(relation)}' has length < 2")
            for arrow_id in relation:
                self.quiver.arrow(arrow_id)
            if not self.quiver.is_composable(relation):
                raise ValidationError(f"Relation '{' '.join(relation)}' is not composable")
            if relation not in checked:
                checked.append(relation)
        reduced = tuple(
            rel for rel in checked
            if not any(other != rel and _is_subpath(other, rel) for other in checked)
        )
        if len(reduced) != len(checked):
            dropped = [" ".join(rel) for rel in checked if rel not in reduced]
            logger.warning(f"Dropped non-minimal relations from {self.name}: {dropped}")
        object.__setattr__(self, "relations", reduced)

    @cached_property
    def relation_set(self) -> FrozenSet[ArrowPath]:
        return frozenset(self.relations)

    @cached_property
    def quadratic_relations(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset(rel for rel in self.relations if len(rel) == 2)

    @cached_property
    def max_relation_length(self) -> int:
        return max((len(rel) for rel in self.relations), default=0)

    @cached_property
    def _relations_by_last(self) -> Dict[str, Tuple[ArrowPath, ...]]:
        grouped: Dict[str, List[ArrowPath]] = {}
        for rel in self.relations:
            grouped.setdefault(rel[-1], []).append(rel)
        return {k: tuple(v) for k, v in grouped.items()}

    @cached_property
    def _relations_by_first(self) -> Dict[str, Tuple[ArrowPath, ...]]:
        grouped: Dict[str, List[ArrowPath]] = {}
        for rel in self.relations:
            grouped.setdefault(rel[0], []).append(rel)
        return {k: tuple(v) for k, v in grouped.items()}

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.quiver.vertices

    @property
    def arrows(self) -> Tuple[Arrow, ...]:
        return self.quiver.arrows

    def is_relation(self, first: str, second: str) -> bool:
        return (first, second) in self.quadratic_relations

    def ends_in_relation(self, arrows: ArrowPath) -> bool:
        """True if some relation is a suffix of the given path."""
        if not arrows:
            return False
        return any(arrows[-len(rel):] == rel
                   for rel in self._relations_by_last.get(arrows[-1], ()))

    def starts_with_relation(self, arrows: ArrowPath) -> bool:
        if not arrows:
            return False
        return any(arrows[:len(rel)] == rel
                   for rel in self._relations_by_first.get(arrows[0], ()))

    def contains_relation(self, arrows: ArrowPath) -> bool:
        return any(self.ends_in_relation(arrows[:end]) for end in range(2, len(arrows) + 1))

    def is_nonzero(self, arrows: ArrowPath) -> bool:
        """A composable path is nonzero in kQ/I iff no relation is a subpath."""
        return self.quiver.is_composable(arrows) and not self.contains_relation(arrows)


# --- .bq format ---

def parse_bound_quiver(text: str) -> BoundQuiver:
    """
    Parse the line-oriented .bq format.

    Args:
        text: Source with `quiver`, `vertex`, `arrow` and `rel` lines; '#' starts a comment

    Returns:
        The bound quiver; relations that contain another relation are dropped with a warning

    Raises:
        ParseError: On malformed lines, unknown or duplicate identifiers, short or
            non-composable relations
    """
    name: Optional[str] = None
    vertices: List[str] = []
    arrows: List[Arrow] = []
    relations: List[ArrowPath] = []
    arrow_ends: Dict[str, Tuple[str, str]] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = _tokenize(line)
        if not tokens:
            continue
        (keyword, key_col), args = tokens[0], tokens[1:]

        if name is None:
            if keyword != "quiver" or len(args) != 1:
                raise ParseError("Expected 'quiver <name>' as the first declaration", line_no, key_col)
            name = args[0][0]
            continue

        if keyword == "vertex":
            if not args:
                raise ParseError("'vertex' needs at least one identifier", line_no, key_col)
            for ident, col in args:
                _check_identifier(ident, line_no, col)
                if ident in vertices:
                    raise ParseError(f"Duplicate vertex '{ident}'", line_no, col)
                vertices.append(ident)
        elif keyword == "arrow":
            if len(args) != 3:
                raise ParseError("Expected 'arrow <id> <source> <target>'", line_no, key_col)
            (ident, col), (src, src_col), (tgt, tgt_col) = args
            _check_identifier(ident, line_no, col)
            if ident in arrow_ends:
                raise ParseError(f"Duplicate arrow '{ident}'", line_no, col)
            for vertex, vcol in ((src, src_col), (tgt, tgt_col)):
                if vertex not in vertices:
                    raise ParseError(f"Undeclared vertex '{vertex}'", line_no, vcol)
            arrow_ends[ident] = (src, tgt)
            arrows.append(Arrow(ident, src, tgt))
        elif keyword == "rel":
            if len(args) < 2:
                raise ParseError("A relation needs length >= 2", line_no, key_col)
            for (ident, col) in args:
                if ident not in arrow_ends:
                    raise ParseError(f"Unknown arrow '{ident}' in relation", line_no, col)
            for (first, _), (second, col) in zip(args, args[1:]):
                if arrow_ends[first][1] != arrow_ends[second][0]:
                    raise ParseError(
                        f"Relation is not composable: target({first}) != source({second})",
                        line_no, col,
                    )
            relations.append(tuple(ident for ident, _ in args))
        else:
            raise ParseError(f"Unknown declaration '{keyword}'", line_no, key_col)

    if name is None:
        raise ParseError("Empty bound-quiver source", 1, 1)
    return BoundQuiver(name=name, quiver=Quiver(tuple(vertices), tuple(arrows)),
                       relations=tuple(relations))


def format_bound_quiver(bq: BoundQuiver) -> str:
    lines = [f"quiver {bq.name}"]
    if bq.vertices:
        lines.append("vertex " + " ".join(bq.vertices))
    lines.extend(f"arrow {a.id} {a.source} {a.target}" for a in bq.arrows)
    lines.extend("rel " + " ".join(rel) for rel in bq.relations)
    return "\n".join(lines) + "\n"


def _tokenize(line: str) -> List[Tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _check_identifier(ident: str, line_no: int, col: int) -> None:
    # '~' and '@' are reserved by the string syntax
    if not _IDENTIFIER.match(ident) or "~" in ident or ident.startswith("@"):
        raise ParseError(f"Invalid identifier '{ident}'", line_no, col)


# --- admissibility and the path basis ---

@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    max_length: Optional[int] = None
    witness: ArrowPath = ()


@lru_cache(maxsize=128)
def validate_admissible(bq: BoundQuiver) -> AdmissibilityReport:
    """Decide whether kQ/I is finite-dimensional.

    Relation membership of an extension only depends on the last
    max_relation_length - 1 arrows, so relation-free paths of that length
    form a finite state graph; a cycle in it is an infinite family of
    nonzero paths.
    """
    window = max(1, bq.max_relation_length - 1)
    states: List[ArrowPath] = []
    stack: List[ArrowPath] = [(a.id,) for a in bq.arrows]
    while stack:
        current = stack.pop()
        if len(current) == window:
            states.append(current)
            continue
        tail = bq.quiver.arrow(current[-1]).target
        for arrow in bq.quiver.outgoing(tail):
            extended = current + (arrow.id,)
            if not bq.ends_in_relation(extended):
                stack.append(extended)

    graph = nx.DiGraph()
    graph.add_nodes_from(states)
    for state in states:
        tail = bq.quiver.arrow(state[-1]).target
        for arrow in bq.quiver.outgoing(tail):
            if not bq.ends_in_relation(state + (arrow.id,)):
                graph.add_edge(state, state[1:] + (arrow.id,))

    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        witness = tuple(edge[1][-1] for edge in cycle)
        logger.debug(f"{bq.name} is not admissible; relation-free cycle {witness}")
        return AdmissibilityReport(admissible=False, witness=witness)

    longest = max((len(p) for v in bq.vertices for p in _paths_from(bq, v)), default=0)
    return AdmissibilityReport(admissible=True, max_length=longest)


def _require_admissible(bq: BoundQuiver) -> None:
    report = validate_admissible(bq)
    if not report.admissible:
        raise NotAdmissibleError(
            f"{bq.name} is not admissible: relation-free cycle {' '.join(report.witness)}",
            details={"witness": list(report.witness)},
        )


def _paths_from(bq: BoundQuiver, vertex: str) -> List[Path]:
    found = [Path.trivial(vertex)]

    def extend(path: ArrowPath, tail: str) -> None:
        for arrow in bq.quiver.outgoing(tail):
            candidate = path + (arrow.id,)
            if bq.ends_in_relation(candidate):
                continue
            found.append(Path(vertex, arrow.target, candidate))
            extend(candidate, arrow.target)

    extend((), vertex)
    return found


def _paths_to(bq: BoundQuiver, vertex: str) -> List[Path]:
    found = [Path.trivial(vertex)]

    def extend(path: ArrowPath, head: str) -> None:
        for arrow in bq.quiver.incoming(head):
            candidate = (arrow.id,) + path
            if bq.starts_with_relation(candidate):
                continue
            found.append(Path(arrow.source, vertex, candidate))
            extend(candidate, arrow.source)

    extend((), vertex)
    return found


def paths_from(bq: BoundQuiver, vertex: str) -> List[Path]:
    """Relation-free paths starting at vertex: the basis of P(vertex)."""
    _require_admissible(bq)
    return _paths_from(bq, vertex)


def paths_to(bq: BoundQuiver, vertex: str) -> List[Path]:
    """Relation-free paths ending at vertex: the basis of I(vertex)."""
    _require_admissible(bq)
    return _paths_to(bq, vertex)


def nonzero_paths(bq: BoundQuiver) -> List[Path]:
    """The path basis of kQ/I; its length is dim kQ/I."""
    _require_admissible(bq)
    return [p for v in bq.vertices for p in _paths_from(bq, v)]


def maximal_path_starting_with(bq: BoundQuiver, arrow_id: str) -> ArrowPath:
    """The longest relation-free path whose first arrow is arrow_id (string algebras)."""
    path: ArrowPath = (arrow_id,)
    for _ in range(len(bq.arrows) * max(2, bq.max_relation_length) + 1):
        tail = bq.quiver.arrow(path[-1]).target
        options = [a.id for a in bq.quiver.outgoing(tail)
                   if not bq.ends_in_relation(path + (a.id,))]
        if not options:
            return path
        if len(options) > 1:
            raise PreconditionError(
                f"{bq.name} is not a string algebra: path {' '.join(path)} continues along "
                f"{' and '.join(options)}"
            )
        path = path + (options[0],)
    raise NotAdmissibleError(f"Relation-free path starting with {arrow_id} does not terminate")


def maximal_path_ending_with(bq: BoundQuiver, arrow_id: str) -> ArrowPath:
    path: ArrowPath = (arrow_id,)
    for _ in range(len(bq.arrows) * max(2, bq.max_relation_length) + 1):
        head = bq.quiver.arrow(path[0]).source
        options = [a.id for a in bq.quiver.incoming(head)
                   if not bq.starts_with_relation((a.id,) + path)]
        if not options:
            return path
        if len(options) > 1:
            raise PreconditionError(
                f"{bq.name} is not a string algebra: path {' '.join(path)} is preceded by "
                f"{' and '.join(options)}"
            )
        path = (options[0],) + path
    raise NotAdmissibleError(f"Relation-free path ending with {arrow_id} does not terminate")


# --- classification ---

@dataclass(frozen=True)
class Violation:
    tag: str
    witness: Tuple[str, ...]


@dataclass(frozen=True)
class ClassificationReport:
    is_monomial_admissible: bool
    is_string: bool
    is_gentle: bool
    violations: Tuple[Violation, ...] = ()

    def tags(self) -> FrozenSet[str]:
        return frozenset(v.tag for v in self.violations)


@lru_cache(maxsize=128)
def classify(bq: BoundQuiver) -> ClassificationReport:
    violations: List[Violation] = []
    admissibility = validate_admissible(bq)
    if not admissibility.admissible:
        violations.append(Violation("admissible", admissibility.witness))

    q = bq.quiver
    for vertex in bq.vertices:
        if len(q.incoming(vertex)) > 2:
            violations.append(Violation("G1", (vertex,) + tuple(a.id for a in q.incoming(vertex))))
        if len(q.outgoing(vertex)) > 2:
            violations.append(Violation("G1", (vertex,) + tuple(a.id for a in q.outgoing(vertex))))

    for rel in bq.relations:
        if len(rel) != 2:
            violations.append(Violation("G2", rel))

    for arrow in bq.arrows:
        before = q.incoming(arrow.source)
        after = q.outgoing(arrow.target)
        zero_before = [a.id for a in before if bq.is_relation(a.id, arrow.id)]
        zero_after = [c.id for c in after if bq.is_relation(arrow.id, c.id)]
        free_before = [a.id for a in before if not bq.is_relation(a.id, arrow.id)]
        free_after = [c.id for c in after if not bq.is_relation(arrow.id, c.id)]
        if len(zero_before) > 1:
            violations.append(Violation("G3", tuple(zero_before) + (arrow.id,)))
        if len(zero_after) > 1:
            violations.append(Violation("G3", (arrow.id,) + tuple(zero_after)))
        if len(free_before) > 1:
            violations.append(Violation("G4", tuple(free_before) + (arrow.id,)))
        if len(free_after) > 1:
            violations.append(Violation("G4", (arrow.id,) + tuple(free_after)))

    tags = {v.tag for v in violations}
    is_admissible = admissibility.admissible
    is_string = is_admissible and not ({"G1", "G4"} & tags)
    is_gentle = is_string and not ({"G2", "G3"} & tags)
    return ClassificationReport(is_admissible, is_string, is_gentle, tuple(violations))


def require_gentle(bq: BoundQuiver) -> None:
    report = classify(bq)
    if not report.is_gentle:
        raise PreconditionError(f"{bq.name} is not gentle",
                                details={"violations": sorted(report.tags())})


def require_string(bq: BoundQuiver) -> None:
    report = classify(bq)
    if not report.is_string:
        raise PreconditionError(f"{bq.name} is not a string algebra",
                                details={"violations": sorted(report.tags())})


# --- saturated cycles, gentle arrows, critical paths ---

@dataclass(frozen=True)
class SaturatedCycle:
    """Arrows a_1 ... a_n with a_i a_{i+1} a relation for every i modulo n."""
    arrows: ArrowPath
    vertices: Tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __str__(self) -> str:
        return "(" + " ".join(self.arrows) + ")"


def canonical_rotation(arrows: Sequence[str]) -> ArrowPath:
    rotations = [tuple(arrows[i:]) + tuple(arrows[:i]) for i in range(len(arrows))]
    return min(rotations)


def saturated_cycles(bq: BoundQuiver) -> List[SaturatedCycle]:
    graph = nx.DiGraph()
    graph.add_nodes_from(a.id for a in bq.arrows)
    graph.add_edges_from(bq.quadratic_relations)
    cycles = set()
    for cycle in nx.simple_cycles(graph):
        cycles.add(canonical_rotation(cycle))
    return [
        SaturatedCycle(arrows, tuple(bq.quiver.arrow(a).source for a in arrows))
        for arrows in sorted(cycles)
    ]


def gentle_arrows(bq: BoundQuiver) -> Tuple[str, ...]:
    """Arrows b with no arrow a such that ab is a relation."""
    q = bq.quiver
    return tuple(
        arrow.id for arrow in bq.arrows
        if not any(bq.is_relation(a.id, arrow.id) for a in q.incoming(arrow.source))
    )


def critical_paths(bq: BoundQuiver) -> Tuple[List[Path], int]:
    """
    Maximal chains of consecutive relations starting at a gentle arrow.

    A gentle arrow with no relation after it is a critical path of length 1.

    Returns:
        The critical paths and n, the maximal length (0 without gentle arrows)
    """
    require_gentle(bq)
    found: List[Path] = []
    for start in gentle_arrows(bq):
        chain = [start]
        while True:
            tail = bq.quiver.arrow(chain[-1]).target
            following = [c.id for c in bq.quiver.outgoing(tail) if bq.is_relation(chain[-1], c.id)]
            if not following or following[0] in chain:
                break
            chain.append(following[0])
        found.append(bq.quiver.path(chain))
    n_lambda = max((len(p) for p in found), default=0)
    return found, n_lambda


def gorenstein_dimension_gentle(bq: BoundQuiver) -> Tuple[int, int]:
    """Bounds (lower, upper) on the Gorenstein dimension from critical paths."""
    _, n_lambda = critical_paths(bq)
    if n_lambda > 0:
        return n_lambda, n_lambda
    return 0, 1


def relation_chains_outside_cycles(bq: BoundQuiver) -> int:
    """Largest number of consecutive quadratic relations none of which lies on a saturated cycle."""
    on_cycles = set()
    for cycle in saturated_cycles(bq):
        n = cycle.length
        for i in range(n):
            on_cycles.add((cycle.arrows[i], cycle.arrows[(i + 1) % n]))
    graph = nx.DiGraph()
    graph.add_edges_from(rel for rel in bq.quadratic_relations if rel not in on_cycles)
    if graph.number_of_edges() == 0:
        return 0
    return nx.dag_longest_path_length(graph)
