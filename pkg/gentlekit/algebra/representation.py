"""
Quiver representations over an exact field.

This is the linear-algebra ground truth for everything the string calculus
computes combinatorially: Hom spaces, projective covers and resolutions,
the Nakayama functor, the Auslander-Reiten translate, Ext into the regular
module and homological dimensions.

An arrow a: x -> y acts by a (dim y x dim x) matrix, so the path a1 ... al
acts by M_al ... M_a1.
"""
import random
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from gentlekit.algebra import linalg
from gentlekit.algebra.linalg import ExactField, make_field
from gentlekit.algebra.quiver import ArrowPath, BoundQuiver, nonzero_paths, paths_from, paths_to, require_string
from gentlekit.algebra.strings import (
    ModuleSum,
    StringWord,
    dim_vector,
    enumerate_strings,
    format_string,
    module_sum,
    require_string_word,
    string_entry,
    syzygy,
    vertex_sequence,
)
from gentlekit.config import get_settings
from gentlekit.core.logging import get_logger
from gentlekit.exceptions import (
    ConsistencyError,
    CutoffExceededError,
    DecompositionError,
    ValidationError,
)

logger = get_logger(__name__)

# basis label of a path module: (summand index, path)
Label = Tuple[int, ArrowPath]


def default_field() -> ExactField:
    return make_field(get_settings().field_char)


def oracle_options(field: ExactField, trials: Optional[int], seed: Optional[int]) -> Tuple[int, random.Random]:
    """Trial count and rng: explicit arguments, then the field's options, then the settings."""
    settings = get_settings()
    trials = next(v for v in (trials, field.trials, settings.trials) if v is not None)
    seed = next(v for v in (seed, field.seed, settings.seed) if v is not None)
    return trials, random.Random(seed)


def default_cutoff(bq: BoundQuiver) -> int:
    return 2 * len(nonzero_paths(bq))


@dataclass(eq=False)
class Representation:
    bq: BoundQuiver
    field: ExactField
    dims: Dict[str, int]
    maps: Dict[str, DomainMatrix] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.dims) - set(self.bq.vertices)
        if unknown:
            raise ValidationError(f"Unknown vertices in representation: {sorted(unknown)}")
        dims = {v: int(self.dims.get(v, 0)) for v in self.bq.vertices}
        maps = {}
        for arrow in self.bq.arrows:
            shape = (dims[arrow.target], dims[arrow.source])
            mat = self.maps.get(arrow.id)
            if mat is None:
                mat = linalg.zeros(self.field, *shape)
            if mat.shape != shape:
                raise ValidationError(f"Matrix of {arrow.id} has shape {mat.shape}, expected {shape}")
            maps[arrow.id] = mat
        self.dims = dims
        self.maps = maps
        for relation in self.bq.relations:
            if not linalg.is_zero(self.path_matrix(relation)):
                raise ValidationError(f"Relation {' '.join(relation)} does not vanish on the representation")

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dim_vector(self) -> Counter:
        return Counter({v: d for v, d in self.dims.items() if d})

    def path_matrix(self, arrows: Sequence[str]) -> DomainMatrix:
        result = self.maps[arrows[0]]
        for arrow_id in arrows[1:]:
            result = linalg.matmul(self.maps[arrow_id], result)
        return result

    def __repr__(self) -> str:
        return f"Representation({self.bq.name}, dims={dict(self.dim_vector())})"


@dataclass(eq=False)
class Morphism:
    source: Representation
    target: Representation
    components: Dict[str, DomainMatrix]

    def __post_init__(self):
        for v in self.source.bq.vertices:
            shape = (self.target.dims[v], self.source.dims[v])
            if v not in self.components:
                self.components[v] = linalg.zeros(self.source.field, *shape)
            if self.components[v].shape != shape:
                raise ValidationError(f"Component at {v} has shape {self.components[v].shape}, expected {shape}")

    def commutes(self) -> bool:
        for arrow in self.source.bq.arrows:
            left = linalg.matmul(self.target.maps[arrow.id], self.components[arrow.source])
            right = linalg.matmul(self.components[arrow.target], self.source.maps[arrow.id])
            if linalg.entries(left) != linalg.entries(right):
                return False
        return True

    def is_iso(self) -> bool:
        return all(linalg.is_invertible(c) for c in self.components.values())


def compose(g: Morphism, f: Morphism) -> Morphism:
    return Morphism(f.source, g.target,
                    {v: linalg.matmul(g.components[v], f.components[v]) for v in f.source.bq.vertices})


def combine(coefficients: Sequence[Any], basis: Sequence[Morphism]) -> Morphism:
    first = basis[0]
    return Morphism(first.source, first.target, {
        v: linalg.linear_combination(coefficients, [b.components[v] for b in basis])
        for v in first.source.bq.vertices
    })


# --- construction ---

def rep_of_string(bq: BoundQuiver, word: StringWord, field: Optional[ExactField] = None) -> Representation:
    """The string module M(word), one basis vector per walk position."""
    field = field or default_field()
    require_string_word(bq, word)
    vertices = vertex_sequence(bq, word)
    index, counts = [], Counter()
    for v in vertices:
        index.append(counts[v])
        counts[v] += 1
    entries: Dict[str, Dict[Tuple[int, int], Any]] = {a.id: {} for a in bq.arrows}
    for k, letter in enumerate(word.letters, start=1):
        if letter.inverse:
            entries[letter.arrow][(index[k - 1], index[k])] = field.one
        else:
            entries[letter.arrow][(index[k], index[k - 1])] = field.one
    maps = {}
    for arrow in bq.arrows:
        shape = (counts[arrow.target], counts[arrow.source])
        rows = [[entries[arrow.id].get((i, j), field.zero) for j in range(shape[1])] for i in range(shape[0])]
        maps[arrow.id] = linalg.matrix(field, rows, *shape)
    return Representation(bq, field, dict(counts), maps)


def simple_rep(bq: BoundQuiver, vertex: str, field: Optional[ExactField] = None) -> Representation:
    return rep_of_string(bq, StringWord(vertex), field)


def zero_rep(bq: BoundQuiver, field: ExactField) -> Representation:
    return Representation(bq, field, {})


@dataclass(eq=False)
class PathModule:
    """A sum of indecomposable projectives or injectives with its path basis."""
    vertices: Tuple[str, ...]
    injective: bool
    rep: Representation
    basis: Dict[str, List[Label]]
    index: Dict[str, Dict[Label, int]]


def path_module(bq: BoundQuiver, field: ExactField, vertices: Sequence[str],
                injective: bool = False) -> PathModule:
    """
    P(x_1) + ... + P(x_k), or the injectives I(x_j) when injective is set.

    A projective has the paths starting at x as basis, acted on by extension.
    An injective has the functionals dual to paths ending at x, located at
    their starting vertex; an arrow strips itself off the front of the path.
    """
    vertices = tuple(vertices)
    basis: Dict[str, List[Label]] = {v: [] for v in bq.vertices}
    for j, x in enumerate(vertices):
        paths = paths_to(bq, x) if injective else paths_from(bq, x)
        for p in paths:
            basis[p.source if injective else p.target].append((j, p.arrows))
    index = {v: {label: i for i, label in enumerate(labels)} for v, labels in basis.items()}

    maps = {}
    for arrow in bq.arrows:
        s, t = arrow.source, arrow.target
        sparse = {}
        for (j, arrows), col in index[s].items():
            if injective:
                if not arrows or arrows[0] != arrow.id:
                    continue
                image = (j, arrows[1:])
            else:
                extended = arrows + (arrow.id,)
                if bq.ends_in_relation(extended):
                    continue
                image = (j, extended)
            sparse.setdefault(index[t][image], {})[col] = field.one
        maps[arrow.id] = DomainMatrix(sparse, (len(basis[t]), len(basis[s])), field.domain).to_dense()
    rep = Representation(bq, field, {v: len(labels) for v, labels in basis.items()}, maps)
    return PathModule(vertices, injective, rep, basis, index)


def projective_rep(bq: BoundQuiver, vertex: str, field: Optional[ExactField] = None) -> Representation:
    return path_module(bq, field or default_field(), [vertex]).rep


def injective_rep(bq: BoundQuiver, vertex: str, field: Optional[ExactField] = None) -> Representation:
    return path_module(bq, field or default_field(), [vertex], injective=True).rep


def regular_representation(bq: BoundQuiver, field: Optional[ExactField] = None) -> Representation:
    return path_module(bq, field or default_field(), bq.vertices).rep


# --- Hom spaces and isomorphism ---

def hom_basis(m: Representation, n: Representation) -> List[Morphism]:
    """Basis of Hom(M, N) as the solutions of the commutation equations."""
    bq, field = m.bq, m.field
    offsets, total = {}, 0
    for v in bq.vertices:
        offsets[v] = total
        total += n.dims[v] * m.dims[v]
    if total == 0:
        return []

    def var(v: str, i: int, j: int) -> int:
        return offsets[v] + i * m.dims[v] + j

    rows = []
    for arrow in bq.arrows:
        s, t = arrow.source, arrow.target
        n_a = linalg.entries(n.maps[arrow.id])
        m_a = linalg.entries(m.maps[arrow.id])
        # N_a f_s - f_t M_a = 0
        for r in range(n.dims[t]):
            for c in range(m.dims[s]):
                row = [field.zero] * total
                for k in range(n.dims[s]):
                    if n_a[r][k]:
                        row[var(s, k, c)] += n_a[r][k]
                for k in range(m.dims[t]):
                    if m_a[k][c]:
                        row[var(t, r, k)] -= m_a[k][c]
                rows.append(row)

    solutions = linalg.nullspace(linalg.matrix(field, rows, len(rows), total), field)
    basis = []
    for column in linalg.columns_of(solutions):
        components = {}
        for v in bq.vertices:
            shape = (n.dims[v], m.dims[v])
            block = [[column[var(v, i, j)] for j in range(shape[1])] for i in range(shape[0])]
            components[v] = linalg.matrix(field, block, *shape)
        basis.append(Morphism(m, n, components))
    return basis


class IsoVerdict(str, Enum):
    ISO = "iso"
    PROVEN_NON_ISO = "proven-non-iso"
    PROBABLY_NON_ISO = "probably-non-iso"


@dataclass(eq=False)
class IsoResult:
    verdict: IsoVerdict
    isomorphism: Optional[Morphism] = None

    def __bool__(self) -> bool:
        return self.verdict == IsoVerdict.ISO


def _random_combinations(basis: Sequence[Morphism], trials: int, rng: random.Random):
    field = basis[0].source.field
    for _ in range(trials):
        yield combine([field.random_element(rng) for _ in basis], basis)
    # deterministic fallback: basis elements and pairwise sums
    for f in basis:
        yield f
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            yield combine([field.one, field.one], [basis[i], basis[j]])


def is_iso_rep(m: Representation, n: Representation, trials: Optional[int] = None,
               seed: Optional[int] = None) -> IsoResult:
    """
    Decide M = N by searching Hom(M, N) for a map invertible at every vertex.

    A mismatch of dimension vectors or of Hom dimensions proves non-isomorphism;
    an unsuccessful search only makes it probable.
    """
    trials, rng = oracle_options(m.field, trials, seed)
    if m.dims != n.dims:
        return IsoResult(IsoVerdict.PROVEN_NON_ISO)
    if m.total_dim == 0:
        return IsoResult(IsoVerdict.ISO, Morphism(m, n, {}))

    basis = hom_basis(m, n)
    if basis:
        for candidate in _random_combinations(basis, trials, rng):
            if candidate.is_iso():
                return IsoResult(IsoVerdict.ISO, candidate)

    end_m, end_n = len(hom_basis(m, m)), len(hom_basis(n, n))
    if len(basis) != end_m or end_m != end_n or len(hom_basis(n, m)) != end_n:
        return IsoResult(IsoVerdict.PROVEN_NON_ISO)
    logger.warning(f"No isomorphism found after {trials} trials; reporting probably-non-iso")
    return IsoResult(IsoVerdict.PROBABLY_NON_ISO)


def is_self_injective(bq: BoundQuiver, field: Optional[ExactField] = None) -> bool:
    """True iff every indecomposable projective is injective."""
    field = field or default_field()
    injectives = [injective_rep(bq, y, field) for y in bq.vertices]
    for x in bq.vertices:
        projective = projective_rep(bq, x, field)
        if not any(inj.dims == projective.dims and is_iso_rep(projective, inj) for inj in injectives):
            return False
    return True


# --- kernels, covers and resolutions ---

def kernel_of(f: Morphism) -> Tuple[Representation, Dict[str, DomainMatrix]]:
    """The kernel of f with its inclusion, given per vertex by basis columns."""
    source, field = f.source, f.source.field
    inclusion = {v: linalg.nullspace(f.components[v], field) for v in source.bq.vertices}
    maps = {}
    for arrow in source.bq.arrows:
        moved = linalg.matmul(source.maps[arrow.id], inclusion[arrow.source])
        restricted = linalg.solve(inclusion[arrow.target], moved, field)
        if restricted is None:
            raise ConsistencyError(f"Kernel is not closed under {arrow.id}")
        maps[arrow.id] = restricted
    dims = {v: inclusion[v].shape[1] for v in source.bq.vertices}
    return Representation(source.bq, field, dims, maps), inclusion


@dataclass(eq=False)
class SyzygyStep:
    module: Representation
    tops: List[Tuple[str, List[Any]]]
    cover: PathModule
    cover_map: Morphism
    kernel: Representation
    inclusion: Dict[str, DomainMatrix]

    @property
    def cover_vertices(self) -> Tuple[str, ...]:
        return self.cover.vertices


def top_vectors(m: Representation) -> List[Tuple[str, List[Any]]]:
    """Vectors spanning a complement of the radical, vertex by vertex."""
    tops = []
    for v in m.bq.vertices:
        if not m.dims[v]:
            continue
        images = [m.maps[a.id] for a in m.bq.quiver.incoming(v)]
        radical = linalg.hstack(m.field, m.dims[v], *images)
        for column in linalg.columns_of(linalg.complement_basis(radical, m.field)):
            tops.append((v, column))
    return tops


def cover_and_syzygy(m: Representation) -> SyzygyStep:
    field, bq = m.field, m.bq
    tops = top_vectors(m)
    cover = path_module(bq, field, [v for v, _ in tops])
    components = {}
    for w in bq.vertices:
        columns = []
        for j, arrows in cover.basis[w]:
            generator = linalg.from_columns(field, [tops[j][1]], m.dims[tops[j][0]])
            image = linalg.matmul(m.path_matrix(arrows), generator) if arrows else generator
            columns.append(linalg.columns_of(image)[0])
        components[w] = linalg.from_columns(field, columns, m.dims[w])
    cover_map = Morphism(cover.rep, m, components)
    kernel, inclusion = kernel_of(cover_map)
    if cover.rep.total_dim != m.total_dim + kernel.total_dim:
        raise ConsistencyError(f"Projective cover of {m} is not onto")
    return SyzygyStep(m, tops, cover, cover_map, kernel, inclusion)


@dataclass(eq=False)
class ProjectiveMap:
    """A map between sums of indecomposable projectives.

    generators[k] is the image of the top of the k-th source summand, a
    combination of basis labels of the target at the source summand's vertex.
    """
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    generators: List[Dict[Label, Any]]


@dataclass(eq=False)
class Resolution:
    module: Representation
    terms: List[Tuple[str, ...]]
    differentials: List[ProjectiveMap]
    syzygies: List[Representation]

    def term(self, i: int) -> Tuple[str, ...]:
        return self.terms[i] if i < len(self.terms) else ()

    @property
    def is_finite(self) -> bool:
        return self.syzygies[-1].total_dim == 0

    @property
    def length(self) -> Optional[int]:
        return len(self.terms) - 1 if self.is_finite else None


def minimal_resolution(m: Representation, steps: int) -> Resolution:
    """The terms P_0 ... P_steps of a minimal projective resolution (fewer if it stops)."""
    step = cover_and_syzygy(m)
    resolution = Resolution(m, [step.cover_vertices], [], [step.kernel])
    previous = step
    for i in range(1, steps + 1):
        kernel = previous.kernel
        if kernel.total_dim == 0:
            break
        step = cover_and_syzygy(kernel)
        generators = []
        for vertex, vector in step.tops:
            column = linalg.from_columns(m.field, [vector], kernel.dims[vertex])
            image = linalg.columns_of(linalg.matmul(previous.inclusion[vertex], column))[0]
            labels = previous.cover.basis[vertex]
            generators.append({labels[r]: c for r, c in enumerate(image) if c})
        resolution.differentials.append(ProjectiveMap(step.cover_vertices, previous.cover_vertices, generators))
        resolution.terms.append(step.cover_vertices)
        resolution.syzygies.append(step.kernel)
        logger.debug(f"P_{i} of {m}: {step.cover_vertices}")
        previous = step
    return resolution


# --- Nakayama functor and the translate ---

def nakayama(bq: BoundQuiver, vertices: Sequence[str], field: Optional[ExactField] = None) -> Representation:
    """nu(P(x_1) + ... + P(x_k)) = I(x_1) + ... + I(x_k)."""
    return path_module(bq, field or default_field(), vertices, injective=True).rep


def nakayama_map(bq: BoundQuiver, f: ProjectiveMap, field: Optional[ExactField] = None) -> Morphism:
    """
    nu of a map between projectives.

    If the k-th source summand goes to sum c_p (j, p), the functional of a path
    r ending at y_k is sent to sum c_p times the functional of r', where r = r' p.
    """
    field = field or default_field()
    source = path_module(bq, field, f.source, injective=True)
    target = path_module(bq, field, f.target, injective=True)
    components = {}
    for v in bq.vertices:
        rows = [[field.zero] * len(source.basis[v]) for _ in target.basis[v]]
        for col, (k, r) in enumerate(source.basis[v]):
            for (j, p), c in f.generators[k].items():
                if len(p) > len(r) or (p and r[len(r) - len(p):] != p):
                    continue
                row = target.index[v][(j, r[:len(r) - len(p)])]
                rows[row][col] += c
        components[v] = linalg.matrix(field, rows, len(target.basis[v]), len(source.basis[v]))
    return Morphism(source.rep, target.rep, components)


def tau_rep(m: Representation) -> Representation:
    """tau M as the kernel of nu applied to a minimal projective presentation."""
    presentation = minimal_resolution(m, 1)
    if not presentation.differentials:
        return zero_rep(m.bq, m.field)
    translate, _ = kernel_of(nakayama_map(m.bq, presentation.differentials[0], m.field))
    return translate


# --- Ext into the regular module ---

def _hom_to_regular(bq: BoundQuiver, term: Sequence[str]) -> List[Label]:
    return [(k, q.arrows) for k, x in enumerate(term) for q in paths_to(bq, x)]


def _dual_differential(bq: BoundQuiver, field: ExactField, resolution: Resolution, i: int) -> DomainMatrix:
    """Hom(d_i, Lambda): Hom(P_{i-1}, Lambda) -> Hom(P_i, Lambda), by precomposition."""
    source = _hom_to_regular(bq, resolution.term(i - 1))
    target = _hom_to_regular(bq, resolution.term(i))
    if i > len(resolution.differentials):
        return linalg.zeros(field, len(target), len(source))
    target_index = {label: r for r, label in enumerate(target)}
    rows = [[field.zero] * len(source) for _ in target]
    for col, (summand, q) in enumerate(source):
        for k, generator in enumerate(resolution.differentials[i - 1].generators):
            for (j, p), c in generator.items():
                if j != summand:
                    continue
                composite = q + p
                if bq.contains_relation(composite):
                    continue
                rows[target_index[(k, composite)]][col] += c
    return linalg.matrix(field, rows, len(target), len(source))


def ext_dim(m: Representation, i: int, cutoff: Optional[int] = None) -> int:
    """dim Ext^i(M, Lambda) from a minimal resolution."""
    if i < 1:
        raise ValidationError(f"Ext degree must be >= 1, got {i}")
    cutoff = default_cutoff(m.bq) if cutoff is None else cutoff
    if i > cutoff:
        raise CutoffExceededError(f"Ext^{i} requested beyond cutoff {cutoff}", details={"cutoff": cutoff})
    resolution = minimal_resolution(m, i + 1)
    hom_i = len(_hom_to_regular(m.bq, resolution.term(i)))
    if hom_i == 0:
        return 0
    return (hom_i
            - linalg.rank(_dual_differential(m.bq, m.field, resolution, i + 1))
            - linalg.rank(_dual_differential(m.bq, m.field, resolution, i)))


# --- dimensions ---

class DimensionKind(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class DimensionResult:
    kind: DimensionKind
    value: Optional[int] = None
    period: Optional[int] = None
    start: Optional[int] = None

    @classmethod
    def finite(cls, value: int) -> 'DimensionResult':
        return cls(DimensionKind.FINITE, value=value)

    @classmethod
    def infinite(cls, period: int, start: int) -> 'DimensionResult':
        return cls(DimensionKind.INFINITE, period=period, start=start)

    @classmethod
    def unresolved(cls) -> 'DimensionResult':
        return cls(DimensionKind.UNRESOLVED)

    @property
    def is_finite(self) -> bool:
        return self.kind == DimensionKind.FINITE

    def __str__(self) -> str:
        return str(self.value) if self.is_finite else self.kind.value


def max_dimension(results: Sequence[DimensionResult]) -> DimensionResult:
    """Infinite dominates, then unresolved, then the largest finite value."""
    infinite = [r for r in results if r.kind == DimensionKind.INFINITE]
    if infinite:
        return infinite[0]
    if any(r.kind == DimensionKind.UNRESOLVED for r in results):
        return DimensionResult.unresolved()
    return DimensionResult.finite(max((r.value for r in results), default=0))


def proj_dim(m: Representation, cutoff: Optional[int] = None) -> DimensionResult:
    """
    Projective dimension by iterated covers.

    A syzygy whose dimension vector repeats an earlier one and which is
    isomorphic to it witnesses infinite projective dimension.
    """
    cutoff = default_cutoff(m.bq) if cutoff is None else cutoff
    seen: Dict[Tuple, List[Tuple[int, Representation]]] = {}
    current = m
    for n in range(cutoff + 1):
        kernel = cover_and_syzygy(current).kernel
        if kernel.total_dim == 0:
            return DimensionResult.finite(n)
        key = tuple(sorted(kernel.dim_vector().items()))
        for earlier_step, earlier in seen.get(key, []):
            if is_iso_rep(earlier, kernel):
                return DimensionResult.infinite(period=n + 1 - earlier_step, start=earlier_step)
        seen.setdefault(key, []).append((n + 1, kernel))
        current = kernel
    logger.warning(f"Projective dimension of {m} unresolved at cutoff {cutoff}")
    return DimensionResult.unresolved()


def proj_dim_of_strings(bq: BoundQuiver, entries: ModuleSum, cutoff: Optional[int] = None) -> DimensionResult:
    """Projective dimension of a sum of string modules from the combinatorial syzygy."""
    cutoff = default_cutoff(bq) if cutoff is None else cutoff
    seen: Dict[Tuple, int] = {}
    current = entries.non_projective()
    for n in range(cutoff + 1):
        if current.is_zero:
            return DimensionResult.finite(n)
        state = current.words()
        if state in seen:
            return DimensionResult.infinite(period=n - seen[state], start=seen[state])
        seen[state] = n
        current = syzygy(bq, current, stable=True)
    return DimensionResult.unresolved()


def gorenstein_dimension_oracle(bq: BoundQuiver, cutoff: Optional[int] = None,
                                field: Optional[ExactField] = None) -> DimensionResult:
    """Largest projective dimension of an indecomposable injective."""
    field = field or default_field()
    return max_dimension([proj_dim(injective_rep(bq, x, field), cutoff) for x in bq.vertices])


def global_dim(bq: BoundQuiver, cutoff: Optional[int] = None,
               field: Optional[ExactField] = None) -> DimensionResult:
    field = field or default_field()
    return max_dimension([proj_dim(simple_rep(bq, x, field), cutoff) for x in bq.vertices])


# --- decomposition into string modules ---

def _split_summand(m: Representation, n: Representation, trials: int,
                   rng: random.Random) -> Optional[Representation]:
    """If N is a direct summand of M, return a complement (the kernel of a retraction)."""
    into = hom_basis(n, m)
    back = hom_basis(m, n)
    if not into or not back:
        return None
    for f in _random_combinations(into, trials, rng):
        for g in _random_combinations(back, 1, rng):
            if compose(g, f).is_iso():
                complement, _ = kernel_of(g)
                return complement
    return None


@lru_cache(maxsize=32)
def _candidate_words(bq: BoundQuiver, max_letters: int) -> Tuple[StringWord, ...]:
    words = enumerate_strings(bq, max_letters)
    return tuple(sorted(words, key=lambda w: -len(w)))


def decompose(m: Representation, trials: Optional[int] = None, seed: Optional[int] = None) -> ModuleSum:
    """
    Split M into string modules.

    A single string with the same dimension vector is tried first; otherwise
    string summands are peeled off one at a time through a split
    monomorphism, largest candidates first.

    Raises:
        DecompositionError: If no string summand splits off (e.g. a band summand)
    """
    trials, rng = oracle_options(m.field, trials, seed)
    bq = m.bq
    require_string(bq)

    found = []
    current = m
    while current.total_dim:
        target = current.dim_vector()
        candidates = [w for w in _candidate_words(bq, current.total_dim - 1)
                      if not dim_vector(bq, w) - target]
        exact = [w for w in candidates if dim_vector(bq, w) == target]
        match = next((w for w in exact if is_iso_rep(rep_of_string(bq, w, m.field), current, trials)), None)
        if match is not None:
            found.append(match)
            break
        for word in candidates:
            if word in exact:
                continue
            complement = _split_summand(current, rep_of_string(bq, word, m.field), trials, rng)
            if complement is not None:
                logger.debug(f"Split {format_string(word)} off {current}")
                found.append(word)
                current = complement
                break
        else:
            raise DecompositionError(f"No string summand splits off {current}",
                                     details={"dims": dict(current.dim_vector())})
    return module_sum(bq, [string_entry(bq, w) for w in found])


# --- serialization ---

def representation_to_dict(m: Representation) -> Dict[str, Any]:
    return {
        "field": m.field.name,
        "dims": {v: m.dims[v] for v in m.bq.vertices},
        "maps": {a: [[m.field.to_python(x) for x in row] for row in linalg.entries(mat)]
                 for a, mat in m.maps.items()},
    }


def field_from_name(name: str) -> ExactField:
    if name == "QQ":
        return make_field(0)
    if name.startswith("GF(") and name.endswith(")"):
        return make_field(int(name[3:-1]))
    raise ValidationError(f"Unknown field descriptor '{name}'")


def representation_from_dict(bq: BoundQuiver, data: Dict[str, Any]) -> Representation:
    field = field_from_name(data["field"])
    dims = {v: int(d) for v, d in data["dims"].items()}
    maps = {}
    for arrow in bq.arrows:
        rows = data.get("maps", {}).get(arrow.id)
        shape = (dims.get(arrow.target, 0), dims.get(arrow.source, 0))
        if rows is None:
            continue
        maps[arrow.id] = linalg.matrix(field, [[field.from_python(x) for x in row] for row in rows], *shape)
    return Representation(bq, field, dims, maps)
