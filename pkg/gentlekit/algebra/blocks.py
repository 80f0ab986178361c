"""
Gentle block decompositions and Jacobian potentials.

Blocks of type I are single arrows, blocks of type II are 3-cycles with all
three compositions zero, Loop blocks are loops d with dd = 0. Gluing
identifies outlets in pairs.
"""
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match
from networkx.utils import UnionFind
from sympy import Rational, SympifyError

from gentlekit.algebra.linalg import make_field
from gentlekit.algebra.quiver import (
    Arrow,
    ArrowPath,
    BoundQuiver,
    Quiver,
    canonical_rotation,
    classify,
    saturated_cycles,
    validate_admissible,
)
from gentlekit.core.logging import get_logger
from gentlekit.exceptions import BlockRuleError, ComputationError, ConsistencyError, FieldError, ParseError

logger = get_logger(__name__)


class BlockKind(str, Enum):
    I = "I"
    II = "II"
    LOOP = "Loop"

    @property
    def outlet_count(self) -> int:
        return {BlockKind.I: 2, BlockKind.II: 3, BlockKind.LOOP: 1}[self]


@dataclass(frozen=True)
class Outlet:
    block: int
    index: int

    def __str__(self) -> str:
        return f"{self.block}.{self.index}"


@dataclass(frozen=True)
class Block:
    """Arrows and outlet vertices of a block inside a bound quiver.

    Type I: arrow s -> t with outlets (s, t). Type II: arrows a, b, c around
    outlets o0 -> o1 -> o2 -> o0. Loop: one arrow on one outlet.
    """
    kind: BlockKind
    arrows: Tuple[str, ...]
    outlets: Tuple[str, ...]


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: Tuple[Block, ...]
    matching: Tuple[Tuple[Outlet, Outlet], ...]

    def counts(self) -> Dict[str, int]:
        counts = {kind.value: 0 for kind in BlockKind}
        for block in self.blocks:
            counts[block.kind.value] += 1
        return counts

    def kinds(self) -> Tuple[BlockKind, ...]:
        return tuple(b.kind for b in self.blocks)


@dataclass(frozen=True)
class DecompositionResult:
    decomposition: Optional[BlockDecomposition] = None
    rule: Optional[str] = None
    witness: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.decomposition is not None


def _check_matching(kinds: Sequence[BlockKind], matching: Sequence[Tuple[Outlet, Outlet]]) -> None:
    used = set()
    for first, second in matching:
        if first == second:
            raise BlockRuleError("self matching", f"outlet {first} is matched to itself")
        for outlet in (first, second):
            if not 0 <= outlet.block < len(kinds) or not 0 <= outlet.index < kinds[outlet.block].outlet_count:
                raise BlockRuleError("unknown outlet", f"outlet {outlet} does not exist")
            if outlet in used:
                raise BlockRuleError("partial matching", f"outlet {outlet} is matched twice")
            used.add(outlet)
        if first.block == second.block:
            raise BlockRuleError("same-block matching", f"outlets {first} and {second} belong to one block")
        if kinds[first.block] == BlockKind.LOOP and kinds[second.block] == BlockKind.LOOP:
            raise BlockRuleError("loop-loop matching", f"outlets {first} and {second} are both loop outlets")


def _antiparallel(quiver: Quiver) -> Optional[Tuple[str, str]]:
    ends = {}
    for arrow in quiver.arrows:
        if arrow.source != arrow.target:
            ends.setdefault((arrow.source, arrow.target), arrow.id)
    for (s, t), arrow_id in ends.items():
        if (t, s) in ends:
            return arrow_id, ends[(t, s)]
    return None


def glue(kinds: Sequence[BlockKind], matching: Sequence[Tuple[Outlet, Outlet]],
         name: str = "glued") -> Tuple[BoundQuiver, BlockDecomposition]:
    """
    Glue blocks along a matching of outlets.

    Raises:
        BlockRuleError: Naming the violated rule; "admissible" when the result
            has a relation-free oriented cycle
    """
    kinds = [BlockKind(k) for k in kinds]
    matching = [tuple(pair) for pair in matching]
    _check_matching(kinds, matching)

    classes = UnionFind()
    outlets = [Outlet(b, i) for b, kind in enumerate(kinds) for i in range(kind.outlet_count)]
    for outlet in outlets:
        classes[outlet]  # register unmatched outlets
    for first, second in matching:
        classes.union(first, second)

    vertex_of: Dict[Outlet, str] = {}
    names: Dict[Outlet, str] = {}
    for outlet in outlets:
        root = classes[outlet]
        if root not in names:
            names[root] = f"v{len(names) + 1}"
        vertex_of[outlet] = names[root]

    arrows: List[Arrow] = []
    relations: List[ArrowPath] = []
    blocks: List[Block] = []
    for j, kind in enumerate(kinds):
        vs = tuple(vertex_of[Outlet(j, i)] for i in range(kind.outlet_count))
        if kind == BlockKind.I:
            ids = (f"x{j}",)
            arrows.append(Arrow(ids[0], vs[0], vs[1]))
        elif kind == BlockKind.II:
            ids = (f"a{j}", f"b{j}", f"c{j}")
            arrows.extend(Arrow(ids[i], vs[i], vs[(i + 1) % 3]) for i in range(3))
            relations.extend((ids[i], ids[(i + 1) % 3]) for i in range(3))
        else:
            ids = (f"d{j}",)
            arrows.append(Arrow(ids[0], vs[0], vs[0]))
            relations.append((ids[0], ids[0]))
        blocks.append(Block(kind, ids, vs))

    vertices = tuple(dict.fromkeys(vertex_of[o] for o in outlets))
    quiver = Quiver(vertices, tuple(arrows))
    pair = _antiparallel(quiver)
    if pair:
        raise BlockRuleError("antiparallel arrows", f"arrows {pair[0]} and {pair[1]} go in opposite directions")
    bq = BoundQuiver(name, quiver, tuple(relations))
    admissibility = validate_admissible(bq)
    if not admissibility.admissible:
        raise BlockRuleError("admissible", f"relation-free cycle {' '.join(admissibility.witness)}")
    if not classify(bq).is_gentle:
        raise ConsistencyError(f"Glued quiver {name} is not gentle")
    return bq, BlockDecomposition(tuple(blocks), tuple(sorted(matching, key=lambda p: (p[0].block, p[0].index))))


def decompose_blocks(bq: BoundQuiver) -> DecompositionResult:
    """Recover the blocks and matching of a gentle algebra, or name the condition that fails."""
    # local import: cohen_macaulay depends on the representation oracle
    from gentlekit.algebra.cohen_macaulay import verify_2cy_necessary

    report = classify(bq)
    if not report.is_gentle:
        return DecompositionResult(rule="gentle", witness=tuple(sorted(report.tags())))
    necessary = verify_2cy_necessary(bq)
    if not necessary.gorenstein_at_most_one:
        return DecompositionResult(rule="critical path of length > 1",
                                   witness=tuple(necessary.witnesses["gorenstein"]))
    if not necessary.relations_on_cycles:
        return DecompositionResult(rule="relation outside saturated cycles",
                                   witness=tuple(necessary.witnesses["relations"]))
    if not necessary.cycles_are_triangles_or_loops:
        return DecompositionResult(rule="saturated cycle that is neither a triangle nor a loop",
                                   witness=tuple(necessary.witnesses["cycles"]))

    blocks: List[Block] = []
    covered = set()
    for cycle in saturated_cycles(bq):
        kind = BlockKind.LOOP if cycle.length == 1 else BlockKind.II
        blocks.append(Block(kind, cycle.arrows, cycle.vertices))
        covered.update(cycle.arrows)
    for arrow in bq.arrows:
        if arrow.id not in covered:
            blocks.append(Block(BlockKind.I, (arrow.id,), (arrow.source, arrow.target)))

    at_vertex: Dict[str, List[Outlet]] = {}
    for b, block in enumerate(blocks):
        for i, vertex in enumerate(block.outlets):
            at_vertex.setdefault(vertex, []).append(Outlet(b, i))
    matching = []
    for vertex, outlets in at_vertex.items():
        if len(outlets) > 2:
            return DecompositionResult(rule="partial matching",
                                       witness=(vertex,) + tuple(str(o) for o in outlets))
        if len(outlets) == 2:
            matching.append((outlets[0], outlets[1]))
    try:
        _check_matching([b.kind for b in blocks], matching)
    except BlockRuleError as exc:
        return DecompositionResult(rule=exc.rule, witness=(exc.message,))
    pair = _antiparallel(bq.quiver)
    if pair:
        return DecompositionResult(rule="antiparallel arrows", witness=pair)
    return DecompositionResult(BlockDecomposition(tuple(blocks), tuple(matching)))


def random_block_instance(seed: int, max_blocks: int = 6,
                          retries: int = 200) -> Tuple[List[BlockKind], List[Tuple[Outlet, Outlet]], BoundQuiver]:
    """A random valid block gluing; deterministic per seed."""
    rng = random.Random(seed)
    for attempt in range(retries):
        kinds = [rng.choice(list(BlockKind)) for _ in range(rng.randint(1, max_blocks))]
        outlets = [Outlet(b, i) for b, kind in enumerate(kinds) for i in range(kind.outlet_count)]
        rng.shuffle(outlets)
        matching = []
        free = list(outlets)
        while len(free) >= 2:
            first = free.pop()
            partners = [o for o in free if o.block != first.block
                        and not (kinds[o.block] == BlockKind.LOOP and kinds[first.block] == BlockKind.LOOP)]
            if partners and rng.random() < 0.7:
                second = rng.choice(partners)
                free.remove(second)
                matching.append((first, second))
        try:
            bq, _ = glue(kinds, matching, name=f"random-{seed}")
        except BlockRuleError as exc:
            logger.debug(f"Seed {seed} attempt {attempt}: {exc.message}")
            continue
        return kinds, matching, bq
    raise ComputationError(f"No valid block gluing for seed {seed} within {retries} attempts")


def _structure_graph(dec: BlockDecomposition) -> nx.DiGraph:
    graph = nx.DiGraph()
    for b, block in enumerate(dec.blocks):
        graph.add_node(("block", b), label=block.kind.value)
        for i in range(block.kind.outlet_count):
            role = "st"[i] if block.kind == BlockKind.I else ("c" if block.kind == BlockKind.II else "l")
            graph.add_node(("outlet", b, i), label=role)
            graph.add_edge(("block", b), ("outlet", b, i), label="has")
        if block.kind == BlockKind.II:
            for i in range(3):
                graph.add_edge(("outlet", b, i), ("outlet", b, (i + 1) % 3), label="next")
    for first, second in dec.matching:
        u, v = ("outlet", first.block, first.index), ("outlet", second.block, second.index)
        graph.add_edge(u, v, label="glued")
        graph.add_edge(v, u, label="glued")
    return graph


def block_structure_isomorphic(first: BlockDecomposition, second: BlockDecomposition) -> bool:
    """Same block multiset and matching up to relabeling."""
    if sorted(first.counts().items()) != sorted(second.counts().items()):
        return False
    return nx.is_isomorphic(
        _structure_graph(first), _structure_graph(second),
        node_match=categorical_node_match("label", None),
        edge_match=categorical_edge_match("label", None),
    )


# --- potentials ---

@dataclass
class Potential:
    """Finite sum of cycles, each stored once in canonical rotation."""
    terms: Dict[ArrowPath, Rational] = field(default_factory=dict)

    def add_term(self, cycle: Sequence[str], coefficient) -> None:
        key = canonical_rotation(cycle)
        total = self.terms.get(key, Rational(0)) + Rational(coefficient)
        if total == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    def __add__(self, other: 'Potential') -> 'Potential':
        result = Potential(dict(self.terms))
        for cycle, c in other.terms.items():
            result.add_term(cycle, c)
        return result

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{'.'.join(cycle)}" if c != 1 else ".".join(cycle)
                          for cycle, c in sorted(self.terms.items()))


@dataclass
class PathCombination:
    terms: Dict[ArrowPath, Rational] = field(default_factory=dict)

    def add(self, path: ArrowPath, coefficient) -> None:
        total = self.terms.get(path, Rational(0)) + Rational(coefficient)
        if total == 0:
            self.terms.pop(path, None)
        else:
            self.terms[path] = total

    def __add__(self, other: 'PathCombination') -> 'PathCombination':
        result = PathCombination(dict(self.terms))
        for path, c in other.terms.items():
            result.add(path, c)
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, PathCombination) and self.terms == other.terms

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        return " + ".join(f"{c}*{' '.join(p) or 'e'}" for p, c in sorted(self.terms.items())) or "0"


def potential_from_decomposition(dec: BlockDecomposition) -> Potential:
    """One 3-cycle per block of type II and one cube per Loop, coefficient 1."""
    potential = Potential()
    for block in dec.blocks:
        if block.kind == BlockKind.II:
            potential.add_term(block.arrows, 1)
        elif block.kind == BlockKind.LOOP:
            potential.add_term(block.arrows * 3, 1)
    return potential


def cyclic_derivative(potential: Potential, arrow_id: str) -> PathCombination:
    """Sum over every position of arrow_id in every cycle of the rest of the rotated cycle."""
    result = PathCombination()
    for cycle, coefficient in potential.terms.items():
        for k, letter in enumerate(cycle):
            if letter == arrow_id:
                result.add(cycle[k + 1:] + cycle[:k], coefficient)
    return result


@dataclass
class JacobianRelation:
    arrow: str
    terms: Dict[ArrowPath, int]
    vanished: bool = False

    def __str__(self) -> str:
        body = " + ".join(f"{c}*{' '.join(p)}" for p, c in sorted(self.terms.items())) or "0"
        return f"d/d{self.arrow}: {body}" + (" (vanishes)" if self.vanished else "")


def _reduce(coefficient: Rational, characteristic: int):
    if characteristic == 0:
        return coefficient
    if coefficient.q % characteristic == 0:
        raise FieldError(f"Coefficient {coefficient} is not defined in characteristic {characteristic}")
    gf = make_field(characteristic)
    value = gf.element(int(coefficient.p)) / gf.element(int(coefficient.q))
    return gf.to_python(value)


def jacobian_relations(bq: BoundQuiver, potential: Potential, characteristic: int) -> List[JacobianRelation]:
    """The cyclic derivatives along every arrow, coefficients reduced in the characteristic."""
    relations = []
    for arrow in bq.arrows:
        derivative = cyclic_derivative(potential, arrow.id)
        reduced = {p: _reduce(c, characteristic) for p, c in derivative.terms.items()}
        nonzero = {p: c for p, c in reduced.items() if c != 0}
        relations.append(JacobianRelation(arrow.id, nonzero, vanished=bool(derivative.terms) and not nonzero))
    return relations


@dataclass
class JacobianVerdict:
    equal: bool
    characteristic: int
    missing: List[str] = field(default_factory=list)
    extra: List[str] = field(default_factory=list)
    vanished: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.equal


def verify_jacobian_equals(bq: BoundQuiver, potential: Potential, characteristic: int) -> JacobianVerdict:
    """Do the nonzero cyclic derivatives, as monomials, generate exactly the relations of bq?"""
    derived = set()
    extra = []
    relations = jacobian_relations(bq, potential, characteristic)
    for relation in relations:
        if len(relation.terms) > 1:
            extra.append(str(relation))
            continue
        derived.update(relation.terms)
    minimal = {p for p in derived if not any(q != p and _contains(p, q) for q in derived)}
    expected = set(bq.relations)
    missing = sorted(" ".join(p) for p in expected - minimal)
    extra.extend(sorted(" ".join(p) or "trivial path" for p in minimal - expected))
    vanished = [str(r) for r in relations if r.vanished]
    return JacobianVerdict(not missing and not extra, characteristic, missing, extra, vanished)


def jacobian_quiver(bq: BoundQuiver, potential: Potential, characteristic: int) -> Optional[BoundQuiver]:
    """
    The quiver of bq bound by the nonzero cyclic derivatives.

    None when a derivative is not a single path of length >= 2: the Jacobian
    ideal is then not a monomial ideal of the kind BoundQuiver holds.
    """
    paths = []
    for relation in jacobian_relations(bq, potential, characteristic):
        if len(relation.terms) > 1 or any(len(p) < 2 for p in relation.terms):
            return None
        paths.extend(relation.terms)
    return BoundQuiver(f"{bq.name}-jacobian", bq.quiver, tuple(paths))


def _contains(long: ArrowPath, short: ArrowPath) -> bool:
    n = len(short)
    return any(long[i:i + n] == short for i in range(len(long) - n + 1))


def parse_potential(bq: BoundQuiver, text: str) -> Potential:
    """Parse `term <coeff> <arrow> ...` lines; '#' starts a comment."""
    potential = Potential()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]
        if not tokens:
            continue
        if tokens[0][0] != "term" or len(tokens) < 3:
            raise ParseError("Expected 'term <coeff> <arrow> ...'", line_no, tokens[0][1])
        try:
            coefficient = Rational(tokens[1][0])
        except (SympifyError, TypeError, ValueError):
            raise ParseError(f"Invalid coefficient '{tokens[1][0]}'", line_no, tokens[1][1]) from None
        cycle = []
        for token, col in tokens[2:]:
            if not bq.quiver.has_arrow(token):
                raise ParseError(f"Unknown arrow '{token}'", line_no, col)
            cycle.append(token)
        closed = cycle + cycle[:1]
        if not bq.quiver.is_composable(closed):
            raise ParseError("Potential term is not a closed cycle", line_no, tokens[2][1])
        potential.add_term(cycle, coefficient)
    return potential


def format_potential(potential: Potential) -> str:
    return "".join(f"term {c} {' '.join(cycle)}\n" for cycle, c in sorted(potential.terms.items()))
