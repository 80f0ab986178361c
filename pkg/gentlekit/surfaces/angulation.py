"""
(m+2)-angulations of disks and annuli and their gentle algebras.

Disk marked points are labelled 0..nm+1 clockwise. The annulus is drawn in
its universal cover, a horizontal strip: the outer boundary B_p runs along the
top with labels modulo mp, the inner boundary B_q along the bottom with labels
modulo mq increasing right to left, and one deck translation moves every point
one unit to the right. Transjective arcs carry a winding that shifts their
lower endpoint by whole deck translations.
"""
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from math import prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from sympy import Rational, binomial, ceiling

from gentlekit.algebra.linalg import ExactField
from gentlekit.algebra.quiver import (
    Arrow,
    BoundQuiver,
    Quiver,
    classify,
    relation_chains_outside_cycles,
    saturated_cycles,
)
from gentlekit.algebra.representation import DimensionResult, gorenstein_dimension_oracle, global_dim
from gentlekit.config import get_settings
from gentlekit.core.logging import get_logger
from gentlekit.exceptions import AngulationError, ConsistencyError, ParseError

logger = get_logger(__name__)


@dataclass(frozen=True)
class DiskModel:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 2 or self.m < 1:
            raise AngulationError(f"Disk model needs n >= 2 and m >= 1, got n={self.n}, m={self.m}")

    @property
    def points(self) -> int:
        return self.n * self.m + 2

    def __str__(self) -> str:
        return f"disk n={self.n} m={self.m}"


@dataclass(frozen=True)
class AnnulusModel:
    p: int
    q: int
    m: int

    def __post_init__(self):
        if min(self.p, self.q, self.m) < 1:
            raise AngulationError(f"Annulus model needs p, q, m >= 1, got p={self.p}, q={self.q}, m={self.m}")

    @property
    def upper(self) -> int:
        """Marked points on B_p."""
        return self.m * self.p

    @property
    def lower(self) -> int:
        return self.m * self.q

    def __str__(self) -> str:
        return f"annulus p={self.p} q={self.q} m={self.m}"


SurfaceModel = Union[DiskModel, AnnulusModel]


class ArcKind(str, Enum):
    DISK = "diag"
    TRANSJECTIVE = "trans"
    REGULAR_P = "regp"
    REGULAR_Q = "regq"


@dataclass(frozen=True, order=True)
class MDiagonal:
    """
    An arc of a surface model.

    diag: endpoints a < b. trans: a on B_p, b on B_q, with a winding.
    regp / regq: start label a and size b = k, ending at a + km + 1.
    """
    kind: ArcKind
    a: int
    b: int
    winding: int = 0

    @classmethod
    def disk(cls, a: int, b: int) -> 'MDiagonal':
        return cls(ArcKind.DISK, min(a, b), max(a, b))

    @classmethod
    def transjective(cls, x: int, y: int, winding: int = 0) -> 'MDiagonal':
        return cls(ArcKind.TRANSJECTIVE, x, y, winding)

    @classmethod
    def regular_p(cls, u: int, k: int) -> 'MDiagonal':
        return cls(ArcKind.REGULAR_P, u, k)

    @classmethod
    def regular_q(cls, u: int, k: int) -> 'MDiagonal':
        return cls(ArcKind.REGULAR_Q, u, k)

    @property
    def vertex_id(self) -> str:
        """Name of the quiver vertex of this arc."""
        if self.kind == ArcKind.DISK:
            return f"d{self.a}_{self.b}"
        if self.kind == ArcKind.TRANSJECTIVE:
            winding = f"n{-self.winding}" if self.winding < 0 else str(self.winding)
            return f"t{self.a}_{self.b}_{winding}"
        prefix = "p" if self.kind == ArcKind.REGULAR_P else "q"
        return f"{prefix}{self.a}_{self.b}"

    def __str__(self) -> str:
        if self.kind == ArcKind.TRANSJECTIVE:
            return f"trans {self.a} {self.b} {self.winding}"
        return f"{self.kind.value} {self.a} {self.b}"


@dataclass(frozen=True)
class Angulation:
    model: SurfaceModel
    diagonals: Tuple[MDiagonal, ...]

    def __post_init__(self):
        object.__setattr__(self, "diagonals", tuple(sorted(set(self.diagonals))))


@dataclass(frozen=True)
class Face:
    """Polygon corners in clockwise order and the arc on each side (None on the boundary)."""
    corners: Tuple[int, ...]
    sides: Tuple[Optional[MDiagonal], ...]

    @property
    def size(self) -> int:
        return len(self.corners)


@dataclass(frozen=True)
class AngulationCheck:
    ok: bool
    faces: Tuple[Face, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


# --- validity ---

def _check_range(model: SurfaceModel, diag: MDiagonal) -> None:
    if isinstance(model, DiskModel):
        if diag.kind == ArcKind.DISK and not (0 <= diag.a < model.points and 0 <= diag.b < model.points):
            raise AngulationError(f"Diagonal '{diag}' has labels outside 0..{model.points - 1}")
        return
    bounds = {
        ArcKind.TRANSJECTIVE: (model.upper, model.lower),
        ArcKind.REGULAR_P: (model.upper, None),
        ArcKind.REGULAR_Q: (model.lower, None),
    }.get(diag.kind)
    if bounds is None:
        return
    first, second = bounds
    if not 0 <= diag.a < first or (second is not None and not 0 <= diag.b < second):
        raise AngulationError(f"Arc '{diag}' has labels outside the boundary ranges of {model}")


def is_m_diagonal(model: SurfaceModel, diag: MDiagonal) -> bool:
    """
    Check that an arc cuts the surface into pieces made of (m+2)-gons.

    Raises:
        AngulationError: If a label is outside the model's range
    """
    _check_range(model, diag)
    m = model.m
    if isinstance(model, DiskModel):
        if diag.kind != ArcKind.DISK:
            return False
        gap = diag.b - diag.a
        return 2 <= gap <= model.n * m and gap % m == 1 % m
    if diag.kind == ArcKind.TRANSJECTIVE:
        return (diag.a - diag.b) % m == 0
    if diag.kind == ArcKind.REGULAR_P:
        return diag.b >= 1 and diag.b * m + 1 <= model.upper
    if diag.kind == ArcKind.REGULAR_Q:
        return diag.b >= 1 and diag.b * m + 1 <= model.lower
    return False


# --- crossing ---

def _interleaved(a: Rational, b: Rational, c: Rational, d: Rational) -> bool:
    return a < c < b < d or c < a < d < b


def _upper_position(model: AnnulusModel, label: int) -> Rational:
    return Rational(label, model.upper)


def _lower_position(model: AnnulusModel, label: int) -> Rational:
    # lower labels increase right to left
    return Rational(-label, model.lower)


def _lift(model: AnnulusModel, diag: MDiagonal) -> Tuple[Rational, Rational]:
    """Endpoint positions of the lift through the fundamental domain at zero."""
    if diag.kind == ArcKind.TRANSJECTIVE:
        return _upper_position(model, diag.a), _lower_position(model, diag.b) + diag.winding
    length = diag.b * model.m + 1
    if diag.kind == ArcKind.REGULAR_P:
        return _upper_position(model, diag.a), _upper_position(model, diag.a + length)
    return _lower_position(model, diag.a + length), _lower_position(model, diag.a)


def _lifts_cross(model: AnnulusModel, first: MDiagonal, second: MDiagonal, shift: int) -> bool:
    f0, f1 = _lift(model, first)
    s0, s1 = (x + shift for x in _lift(model, second))
    kinds = (first.kind, second.kind)
    if kinds == (ArcKind.TRANSJECTIVE, ArcKind.TRANSJECTIVE):
        return (f0 - s0) * (f1 - s1) < 0
    if first.kind == second.kind:
        return _interleaved(f0, f1, s0, s1)
    if ArcKind.TRANSJECTIVE not in kinds:
        return False
    (t_upper, t_lower), (r0, r1), regular = (
        ((f0, f1), (s0, s1), second) if first.kind == ArcKind.TRANSJECTIVE else ((s0, s1), (f0, f1), first))
    end = t_upper if regular.kind == ArcKind.REGULAR_P else t_lower
    return r0 < end < r1


def cross(model: SurfaceModel, first: MDiagonal, second: MDiagonal) -> bool:
    """Do the interiors of two arcs meet? Shared endpoints do not count."""
    if first == second:
        return False
    if isinstance(model, DiskModel):
        return _interleaved(first.a, first.b, second.a, second.b)
    radius = abs(first.winding) + abs(second.winding) + 2
    return any(_lifts_cross(model, first, second, shift) for shift in range(-radius, radius + 1))


# --- faces ---

def _polygon_faces(size: int, chords: Sequence[Tuple[int, int]]) -> Optional[List[Tuple[int, ...]]]:
    """Cut a polygon with corners 0..size-1 along pairwise noncrossing chords."""
    faces = [tuple(range(size))]
    for a, b in sorted(chords):
        for idx, face in enumerate(faces):
            if a in face and b in face:
                i, j = face.index(a), face.index(b)
                if j - i in (1, len(face) - 1):
                    return None
                faces[idx:idx + 1] = [face[i:j + 1], tuple(sorted(face[j:] + face[:i + 1]))]
                break
        else:
            return None
    return faces


def _faces_with_sides(corner_faces: Sequence[Tuple[int, ...]],
                      sides: Dict[Tuple[int, int], MDiagonal]) -> Tuple[Face, ...]:
    faces = []
    for corners in corner_faces:
        edges = tuple(sides.get(tuple(sorted((corners[i], corners[(i + 1) % len(corners)]))))
                      for i in range(len(corners)))
        faces.append(Face(corners, edges))
    return tuple(faces)


def _annulus_polygon(model: AnnulusModel, diagonals: Sequence[MDiagonal]):
    """
    Cut the annulus along its first transjective arc.

    Corners 0..mp follow B_p left to right, corners mp+1..N-1 follow B_q right
    to left; the cut arc is both the side (0, N-1) and the side (mp, mp+1).
    Returns (N, chords, sides) or None when an arc has no lift inside the domain.
    """
    base = next(d for d in diagonals if d.kind == ArcKind.TRANSJECTIVE)
    u0, l0 = _lift(model, base)
    size = model.upper + model.lower + 2
    sides = {(0, size - 1): base, (model.upper, model.upper + 1): base}

    def top(x: Rational) -> Optional[int]:
        index = (x - u0) * model.upper
        return int(index) if index.is_integer and 0 <= index <= model.upper else None

    def bottom(y: Rational) -> Optional[int]:
        index = (l0 + 1 - y) * model.lower
        return model.upper + 1 + int(index) if index.is_integer and 0 <= index <= model.lower else None

    chords = []
    for diag in diagonals:
        if diag == base:
            continue
        e0, e1 = _lift(model, diag)
        anchor = l0 if diag.kind == ArcKind.REGULAR_Q else u0
        start = int(ceiling(anchor - e0))
        for shift in (start, start + 1):
            if diag.kind == ArcKind.TRANSJECTIVE:
                corners = (top(e0 + shift), bottom(e1 + shift))
            elif diag.kind == ArcKind.REGULAR_P:
                corners = (top(e0 + shift), top(e1 + shift))
            else:
                corners = (bottom(e0 + shift), bottom(e1 + shift))
            if None not in corners:
                break
        else:
            return None
        chord = tuple(sorted(corners))
        chords.append(chord)
        sides[chord] = diag
    return size, chords, sides


def is_angulation(model: SurfaceModel, diagonals: Sequence[MDiagonal]) -> AngulationCheck:
    """Noncrossing m-diagonals whose complement consists of (m+2)-gons; returns the faces."""
    diagonals = sorted(set(diagonals))
    for diag in diagonals:
        if not is_m_diagonal(model, diag):
            return AngulationCheck(False, reason=f"'{diag}' is not an m-diagonal of {model}")
    for i, first in enumerate(diagonals):
        for second in diagonals[i + 1:]:
            if cross(model, first, second):
                return AngulationCheck(False, reason=f"'{first}' crosses '{second}'")

    if isinstance(model, DiskModel):
        size = model.points
        sides = {(d.a, d.b): d for d in diagonals}
        chords = list(sides)
    else:
        if not any(d.kind == ArcKind.TRANSJECTIVE for d in diagonals):
            return AngulationCheck(False, reason="no transjective arc, the complement is not a union of polygons")
        cut = _annulus_polygon(model, diagonals)
        if cut is None:
            return AngulationCheck(False, reason="an arc has no lift between consecutive lifts of the cut arc")
        size, chords, sides = cut

    corner_faces = _polygon_faces(size, chords)
    if corner_faces is None:
        return AngulationCheck(False, reason="two arcs coincide after cutting")
    faces = _faces_with_sides(corner_faces, sides)
    for face in faces:
        if face.size != model.m + 2:
            return AngulationCheck(False, faces, reason=f"face {face.corners} has {face.size} sides")
    if isinstance(model, DiskModel) and len(faces) != model.n:
        return AngulationCheck(False, faces, reason=f"{len(faces)} faces, expected {model.n}")
    return AngulationCheck(True, faces)


def quiver_from_angulation(ang: Angulation, name: Optional[str] = None) -> BoundQuiver:
    """
    One vertex per arc; inside every face an arrow from each arc to the arc
    following it clockwise, and a relation for every two consecutive arrows
    of the same face.

    Raises:
        AngulationError: If the arcs do not form an angulation
    """
    check = is_angulation(ang.model, ang.diagonals)
    if not check:
        raise AngulationError(f"Not an angulation of {ang.model}: {check.reason}")
    arrows: List[Arrow] = []
    relations = []
    for face in check.faces:
        k = face.size
        in_face: Dict[int, str] = {}
        for i in range(k):
            here, after = face.sides[i], face.sides[(i + 1) % k]
            if here is not None and after is not None:
                arrow_id = f"x{len(arrows) + 1}"
                arrows.append(Arrow(arrow_id, here.vertex_id, after.vertex_id))
                in_face[i] = arrow_id
        for i, arrow_id in in_face.items():
            following = in_face.get((i + 1) % k)
            if following is not None:
                relations.append((arrow_id, following))
    vertices = tuple(d.vertex_id for d in ang.diagonals)
    bq = BoundQuiver(name or str(ang.model).replace(" ", "_"), Quiver(vertices, tuple(arrows)), tuple(relations))
    logger.debug(f"{ang.model}: {len(vertices)} arcs, {len(arrows)} arrows, {len(relations)} relations")
    return bq


# --- counting and sampling ---

def count_angulations(n: int, m: int) -> int:
    """(m+2)-angulations of an (nm+2)-gon."""
    if n < 1:
        return 1
    return int(binomial((m + 1) * n, n)) // (m * n + 1)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _face_corners(parts: Sequence[int], m: int) -> List[int]:
    corners = [0]
    for j in parts:
        corners.append(corners[-1] + j * m + 1)
    return corners


def _split_choices(faces: int, m: int) -> List[Tuple[int, ...]]:
    """Face counts of the m+1 pieces left over by the face on the closing edge."""
    return list(_compositions(faces - 1, m + 1))


def _sample_polygon(polygon: Sequence[int], m: int, rng: random.Random, out: List[Tuple[int, int]]) -> None:
    faces = (len(polygon) - 2) // m
    if faces <= 1:
        return
    choices = _split_choices(faces, m)
    weights = [prod(count_angulations(j, m) for j in parts) for parts in choices]
    parts = rng.choices(choices, weights=weights)[0]
    corners = _face_corners(parts, m)
    for (s, e), j in zip(zip(corners, corners[1:]), parts):
        if j > 0:
            out.append((polygon[s], polygon[e]))
            _sample_polygon(polygon[s:e + 1], m, rng, out)


def _all_polygon(polygon: Sequence[int], m: int) -> List[List[Tuple[int, int]]]:
    faces = (len(polygon) - 2) // m
    if faces <= 1:
        return [[]]
    results = []
    for parts in _split_choices(faces, m):
        corners = _face_corners(parts, m)
        pieces = [[]]
        for (s, e), j in zip(zip(corners, corners[1:]), parts):
            if j == 0:
                continue
            chord = (polygon[s], polygon[e])
            pieces = [done + [chord] + sub for done in pieces for sub in _all_polygon(polygon[s:e + 1], m)]
        results.extend(pieces)
    return results


def enumerate_angulations(model: DiskModel) -> List[Angulation]:
    angulations = [Angulation(model, tuple(MDiagonal.disk(a, b) for a, b in chords))
                   for chords in _all_polygon(range(model.points), model.m)]
    return sorted(angulations, key=lambda ang: ang.diagonals)


def _chord_to_arc(model: AnnulusModel, base: MDiagonal, i: int, j: int) -> MDiagonal:
    """The annulus arc of a chord of the polygon obtained by cutting along base."""
    upper, lower = model.upper, model.lower
    _, l0 = _lift(model, base)

    def lower_label(corner: int) -> int:
        # corner mp+1+j sits at position l0 + 1 - j/mq
        return int(-(l0 + 1 - Rational(corner - upper - 1, lower)) * lower)

    if j <= upper:
        return MDiagonal.regular_p((base.a + i) % upper, (j - i - 1) // model.m)
    if i > upper:
        return MDiagonal.regular_q(lower_label(i) % lower, (j - i - 1) // model.m)
    # both ends move back by the deck translations the upper corner wrapped past
    wraps = (base.a + i) // upper
    y_lifted = lower_label(j)
    y = y_lifted % lower
    return MDiagonal.transjective((base.a + i) % upper, y, (y - y_lifted) // lower - wraps)


def random_angulation(model: SurfaceModel, seed: int, retries: Optional[int] = None,
                      winding_bound: Optional[int] = None) -> Angulation:
    """
    A random angulation, deterministic per seed.

    Disk angulations are uniform. Annulus angulations cut along a random
    transjective arc, angulate the resulting polygon uniformly and reject
    arcs whose winding exceeds the bound.

    Raises:
        AngulationError: If no annulus angulation is found within the retry budget
    """
    settings = get_settings()
    rng = random.Random(seed)
    if isinstance(model, DiskModel):
        chords: List[Tuple[int, int]] = []
        _sample_polygon(list(range(model.points)), model.m, rng, chords)
        return Angulation(model, tuple(MDiagonal.disk(a, b) for a, b in chords))

    retries = settings.annulus_retries if retries is None else retries
    bound = settings.winding_bound if winding_bound is None else winding_bound
    size = model.upper + model.lower + 2
    for attempt in range(retries):
        x = rng.randrange(model.upper)
        y = rng.choice([y for y in range(model.lower) if (x - y) % model.m == 0])
        base = MDiagonal.transjective(x, y, rng.randint(-bound, bound))
        chords = []
        _sample_polygon(list(range(size)), model.m, rng, chords)
        arcs = [base] + [_chord_to_arc(model, base, i, j) for i, j in chords]
        if any(abs(a.winding) > bound for a in arcs):
            logger.debug(f"Seed {seed} attempt {attempt}: winding bound {bound} exceeded")
            continue
        check = is_angulation(model, arcs)
        if not check:
            raise ConsistencyError(f"Sampled arcs do not form an angulation of {model}: {check.reason}")
        return Angulation(model, tuple(arcs))
    raise AngulationError(f"No angulation of {model} with winding <= {bound} within {retries} attempts")


# --- structural properties ---

@dataclass
class AngulationProperties:
    m: int
    gentle: bool
    cycles_have_length_m_plus_2: bool
    chains_at_most_m_minus_1: bool
    gorenstein_at_most_m: bool
    gorenstein: DimensionResult
    global_dimension: DimensionResult
    witnesses: Dict[str, List[str]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (self.gentle and self.cycles_have_length_m_plus_2
                and self.chains_at_most_m_minus_1 and self.gorenstein_at_most_m)


def verify_angulation_properties(ang: Angulation, bq: BoundQuiver, cutoff: Optional[int] = None,
                                 field: Optional[ExactField] = None) -> AngulationProperties:
    """Gentleness, saturated cycle lengths, relation chains and the Gorenstein bound of an angulation algebra."""
    m = ang.model.m
    witnesses: Dict[str, List[str]] = {}
    report = classify(bq)
    if not report.is_gentle:
        witnesses["gentle"] = sorted(report.tags())
    bad_cycles = [str(c) for c in saturated_cycles(bq) if c.length != m + 2]
    if bad_cycles:
        witnesses["cycles"] = bad_cycles
    chain = relation_chains_outside_cycles(bq)
    if chain > m - 1:
        witnesses["chains"] = [f"{chain} consecutive relations outside saturated cycles"]
    gorenstein = gorenstein_dimension_oracle(bq, cutoff, field)
    gorenstein_ok = gorenstein.is_finite and gorenstein.value <= m
    if not gorenstein_ok:
        witnesses["gorenstein"] = [str(gorenstein)]
    return AngulationProperties(
        m=m,
        gentle=report.is_gentle,
        cycles_have_length_m_plus_2=not bad_cycles,
        chains_at_most_m_minus_1=chain <= m - 1,
        gorenstein_at_most_m=gorenstein_ok,
        gorenstein=gorenstein,
        global_dimension=global_dim(bq, cutoff, field),
        witnesses=witnesses,
    )


# --- .ang format ---

_HEADER = re.compile(r"^(disk|annulus)$")
_ARITY = {"diag": 2, "trans": 3, "regp": 2, "regq": 2}


def _tokens(line: str) -> List[Tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _int(token: str, line_no: int, col: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"Expected an integer, got '{token}'", line_no, col) from None


def _parse_header(tokens: List[Tuple[str, int]], line_no: int) -> SurfaceModel:
    kind, col = tokens[0]
    if not _HEADER.match(kind):
        raise ParseError("Expected 'disk n=<n> m=<m>' or 'annulus p=<p> q=<q> m=<m>'", line_no, col)
    expected = ("n", "m") if kind == "disk" else ("p", "q", "m")
    values: Dict[str, int] = {}
    for token, col in tokens[1:]:
        key, sep, value = token.partition("=")
        if not sep or key not in expected or key in values:
            raise ParseError(f"Unexpected parameter '{token}'", line_no, col)
        values[key] = _int(value, line_no, col + len(key) + 1)
    missing = [k for k in expected if k not in values]
    if missing:
        raise ParseError(f"Missing parameter(s) {', '.join(missing)}", line_no, tokens[-1][1])
    if kind == "disk":
        return DiskModel(values["n"], values["m"])
    return AnnulusModel(values["p"], values["q"], values["m"])


def parse_angulation(text: str) -> Angulation:
    """Parse the .ang format; '#' starts a comment."""
    model: Optional[SurfaceModel] = None
    diagonals = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokens(raw.split("#", 1)[0])
        if not tokens:
            continue
        if model is None:
            model = _parse_header(tokens, line_no)
            continue
        keyword, col = tokens[0]
        if keyword not in _ARITY:
            raise ParseError(f"Unknown arc kind '{keyword}'", line_no, col)
        if (keyword == "diag") != isinstance(model, DiskModel):
            raise ParseError(f"'{keyword}' arcs do not belong to a {model}", line_no, col)
        if len(tokens) != _ARITY[keyword] + 1:
            raise ParseError(f"'{keyword}' takes {_ARITY[keyword]} integers", line_no, col)
        values = [_int(token, line_no, c) for token, c in tokens[1:]]
        if keyword == "diag":
            diagonals.append(MDiagonal.disk(*values))
        elif keyword == "trans":
            diagonals.append(MDiagonal.transjective(*values))
        elif keyword == "regp":
            diagonals.append(MDiagonal.regular_p(*values))
        else:
            diagonals.append(MDiagonal.regular_q(*values))
    if model is None:
        raise ParseError("Missing model header", 1, 1)
    return Angulation(model, tuple(diagonals))


def format_angulation(ang: Angulation) -> str:
    return "".join([f"{ang.model}\n"] + [f"{d}\n" for d in ang.diagonals])
