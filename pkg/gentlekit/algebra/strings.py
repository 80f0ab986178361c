"""
Strings, bands and the combinatorial homological calculus of string algebras.

A direct letter walks an arrow from its source to its target, an inverse
letter walks it backwards. In the string module M(w) the basis vector of
position k maps along a direct letter to position k+1; along an inverse
letter position k+1 maps to position k.
"""
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from gentlekit.algebra.quiver import (
    ArrowPath,
    BoundQuiver,
    Path,
    SaturatedCycle,
    maximal_path_ending_with,
    maximal_path_starting_with,
    require_gentle,
)
from gentlekit.core.logging import get_logger
from gentlekit.exceptions import ConsistencyError, ParseError, PreconditionError, ValidationError

logger = get_logger(__name__)

DimVector = Counter


@dataclass(frozen=True)
class Letter:
    arrow: str
    inverse: bool = False

    def flipped(self) -> 'Letter':
        return Letter(self.arrow, not self.inverse)

    def __str__(self) -> str:
        return f"{self.arrow}~" if self.inverse else self.arrow


@dataclass(frozen=True)
class StringWord:
    """A walk; trivial words carry only their vertex."""
    start: str
    letters: Tuple[Letter, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_string(self)


@dataclass(frozen=True)
class BandWord:
    letters: Tuple[Letter, ...]

    def __str__(self) -> str:
        return " ".join(str(letter) for letter in self.letters)


@dataclass(frozen=True)
class ModuleEntry:
    """A string module, tagged with its vertex when it is an indecomposable projective."""
    word: StringWord
    projective_at: Optional[str] = None

    @property
    def is_projective(self) -> bool:
        return self.projective_at is not None

    def __str__(self) -> str:
        text = format_string(self.word)
        return f"P({self.projective_at})={text}" if self.is_projective else text


@dataclass(frozen=True)
class ModuleSum:
    """A direct sum of string modules, entries kept in canonical order."""
    entries: Tuple[ModuleEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def words(self) -> Tuple[StringWord, ...]:
        return tuple(entry.word for entry in self.entries)

    def non_projective(self) -> 'ModuleSum':
        return ModuleSum(tuple(e for e in self.entries if not e.is_projective))

    def __str__(self) -> str:
        return " + ".join(str(e) for e in self.entries) if self.entries else "0"


# --- walks ---

def letter_ends(bq: BoundQuiver, letter: Letter) -> Tuple[str, str]:
    arrow = bq.quiver.arrow(letter.arrow)
    return (arrow.target, arrow.source) if letter.inverse else (arrow.source, arrow.target)


def vertex_sequence(bq: BoundQuiver, word: StringWord) -> List[str]:
    vertices = [word.start]
    for letter in word.letters:
        origin, end = letter_ends(bq, letter)
        if origin != vertices[-1]:
            raise ValidationError(f"Letter {letter} does not continue the walk at {vertices[-1]}")
        vertices.append(end)
    return vertices


def make_word(bq: BoundQuiver, letters: Sequence[Letter], start: Optional[str] = None) -> StringWord:
    letters = tuple(letters)
    if not letters:
        if start is None:
            raise ValidationError("A trivial word needs a vertex")
        return StringWord(start)
    return StringWord(letter_ends(bq, letters[0])[0], letters)


def direct_word(bq: BoundQuiver, path: Sequence[str], start: Optional[str] = None) -> StringWord:
    return make_word(bq, [Letter(a) for a in path], start)


def inverse_word(bq: BoundQuiver, word: StringWord) -> StringWord:
    if word.is_trivial:
        return word
    return make_word(bq, [letter.flipped() for letter in reversed(word.letters)])


# --- the .bq-independent text syntax ---

def format_string(word: StringWord) -> str:
    if word.is_trivial:
        return f"@{word.start}"
    return " ".join(str(letter) for letter in word.letters)


def parse_string(bq: BoundQuiver, text: str) -> StringWord:
    """Parse 'e~ l' style words and '@v' trivial words; the result is not checked to be a string."""
    tokens = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", text)]
    if not tokens:
        raise ParseError("Empty string word", 1, 1)
    if tokens[0][0].startswith("@"):
        if len(tokens) != 1:
            raise ParseError("A trivial word has a single token", 1, tokens[1][1])
        vertex = tokens[0][0][1:]
        if vertex not in bq.quiver.vertex_order:
            raise ParseError(f"Unknown vertex '{vertex}'", 1, tokens[0][1] + 1)
        return StringWord(vertex)

    letters = []
    current: Optional[str] = None
    for token, col in tokens:
        inverse = token.endswith("~")
        arrow_id = token[:-1] if inverse else token
        if not bq.quiver.has_arrow(arrow_id):
            raise ParseError(f"Unknown arrow '{arrow_id}'", 1, col)
        letter = Letter(arrow_id, inverse)
        origin, end = letter_ends(bq, letter)
        if current is not None and origin != current:
            raise ParseError(f"Letter '{token}' does not continue the walk at {current}", 1, col)
        current = end
        letters.append(letter)
    return make_word(bq, letters)


# --- validity and canonical forms ---

@dataclass(frozen=True)
class StringCheck:
    ok: bool
    reason: Optional[str] = None
    position: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


def _runs(word: StringWord) -> List[Tuple[int, bool, ArrowPath]]:
    """Maximal same-direction runs as (first position, inverse, path in arrow order)."""
    runs: List[Tuple[int, bool, List[str]]] = []
    for position, letter in enumerate(word.letters, start=1):
        if runs and runs[-1][1] == letter.inverse:
            runs[-1][2].append(letter.arrow)
        else:
            runs.append((position, letter.inverse, [letter.arrow]))
    return [(pos, inv, tuple(reversed(arrows)) if inv else tuple(arrows)) for pos, inv, arrows in runs]


def is_string(bq: BoundQuiver, word: StringWord) -> StringCheck:
    if word.is_trivial:
        if word.start not in bq.quiver.vertex_order:
            raise ValidationError(f"Unknown vertex '{word.start}'")
        return StringCheck(True)
    current = word.start
    for position, letter in enumerate(word.letters, start=1):
        origin, end = letter_ends(bq, letter)
        if origin != current:
            return StringCheck(False, "walk is not composable", position)
        current = end
    for position, (first, second) in enumerate(zip(word.letters, word.letters[1:]), start=1):
        if second == first.flipped():
            return StringCheck(False, f"letter {second} cancels {first}", position)
    for position, inverse, path in _runs(word):
        for offset in range(len(path)):
            for end in range(offset + 2, len(path) + 1):
                if path[offset:end] in bq.relation_set:
                    relation = " ".join(path[offset:end])
                    at = position + (len(path) - end if inverse else offset)
                    return StringCheck(False, f"contains relation {relation}", at)
    return StringCheck(True)


def require_string_word(bq: BoundQuiver, word: StringWord) -> None:
    check = is_string(bq, word)
    if not check:
        raise ValidationError(f"'{format_string(word)}' is not a string: {check.reason}",
                              details={"position": check.position})


def _letter_key(bq: BoundQuiver, letter: Letter) -> Tuple[int, int]:
    return (1 if letter.inverse else 0, bq.quiver.arrow_order[letter.arrow])


def word_key(bq: BoundQuiver, word: StringWord) -> Tuple:
    return tuple(_letter_key(bq, letter) for letter in word.letters)


def canonical(bq: BoundQuiver, word: StringWord) -> StringWord:
    """The smaller of a word and its inverse: direct < inverse, then arrow declaration order."""
    if word.is_trivial:
        return word
    inverse = inverse_word(bq, word)
    return word if word_key(bq, word) <= word_key(bq, inverse) else inverse


def entry_key(bq: BoundQuiver, entry: ModuleEntry) -> Tuple:
    word = entry.word
    return (len(word), word_key(bq, word), bq.quiver.vertex_order[word.start])


def module_sum(bq: BoundQuiver, entries: Iterable[ModuleEntry]) -> ModuleSum:
    normalized = [ModuleEntry(canonical(bq, e.word), e.projective_at) for e in entries]
    return ModuleSum(tuple(sorted(normalized, key=lambda e: entry_key(bq, e))))


def string_entry(bq: BoundQuiver, word: StringWord) -> ModuleEntry:
    """Entry for a word, tagged when M(word) is projective."""
    word = canonical(bq, word)
    return ModuleEntry(word, _projective_words(bq).get(word))


def iso(a: ModuleSum, b: ModuleSum) -> bool:
    return Counter(a.words()) == Counter(b.words())


def dim_vector(bq: BoundQuiver, word: StringWord) -> DimVector:
    return Counter(vertex_sequence(bq, word))


def sum_dim_vector(bq: BoundQuiver, entries: ModuleSum) -> DimVector:
    total: DimVector = Counter()
    for entry in entries:
        total.update(dim_vector(bq, entry.word))
    return total


def _peaks_and_valleys(word: StringWord) -> Tuple[List[int], List[int]]:
    n = len(word.letters)
    peaks, valleys = [], []
    for k in range(n + 1):
        left = word.letters[k - 1] if k > 0 else None
        right = word.letters[k] if k < n else None
        left_direct = left is not None and not left.inverse
        left_inverse = left is not None and left.inverse
        right_direct = right is not None and not right.inverse
        right_inverse = right is not None and right.inverse
        if not left_direct and not right_inverse:
            peaks.append(k)
        if not left_inverse and not right_direct:
            valleys.append(k)
    return peaks, valleys


def top_socle(bq: BoundQuiver, word: StringWord) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    vertices = vertex_sequence(bq, word)
    peaks, valleys = _peaks_and_valleys(word)
    return tuple(vertices[k] for k in peaks), tuple(vertices[k] for k in valleys)


# --- projectives and injectives ---

def _out_paths(bq: BoundQuiver, vertex: str) -> List[ArrowPath]:
    arrows = bq.quiver.outgoing(vertex)
    if len(arrows) > 2:
        raise PreconditionError(f"{len(arrows)} arrows leave {vertex}: not a string algebra")
    return [maximal_path_starting_with(bq, a.id) for a in arrows]


def _in_paths(bq: BoundQuiver, vertex: str) -> List[ArrowPath]:
    arrows = bq.quiver.incoming(vertex)
    if len(arrows) > 2:
        raise PreconditionError(f"{len(arrows)} arrows enter {vertex}: not a string algebra")
    return [maximal_path_ending_with(bq, a.id) for a in arrows]


def projective_word(bq: BoundQuiver, vertex: str) -> StringWord:
    branches = _out_paths(bq, vertex)
    letters: List[Letter] = []
    if len(branches) == 2:
        letters.extend(Letter(a, True) for a in reversed(branches[0]))
        letters.extend(Letter(a) for a in branches[1])
    elif branches:
        letters.extend(Letter(a) for a in branches[0])
    return canonical(bq, make_word(bq, letters, vertex))


def injective_word(bq: BoundQuiver, vertex: str) -> StringWord:
    branches = _in_paths(bq, vertex)
    letters: List[Letter] = []
    if branches:
        letters.extend(Letter(a) for a in branches[0])
    if len(branches) == 2:
        letters.extend(Letter(a, True) for a in reversed(branches[1]))
    return canonical(bq, make_word(bq, letters, vertex))


def projective_string(bq: BoundQuiver, vertex: str) -> ModuleEntry:
    return ModuleEntry(projective_word(bq, vertex), vertex)


def injective_string(bq: BoundQuiver, vertex: str) -> ModuleEntry:
    word = injective_word(bq, vertex)
    return ModuleEntry(word, _projective_words(bq).get(word))


@lru_cache(maxsize=64)
def _projective_words(bq: BoundQuiver) -> Dict[StringWord, str]:
    return {projective_word(bq, v): v for v in bq.vertices}


@lru_cache(maxsize=64)
def _injective_words(bq: BoundQuiver) -> Dict[StringWord, str]:
    return {injective_word(bq, v): v for v in bq.vertices}


def is_projective_entry(bq: BoundQuiver, word: StringWord) -> bool:
    return canonical(bq, word) in _projective_words(bq)


def is_injective_entry(bq: BoundQuiver, word: StringWord) -> bool:
    return canonical(bq, word) in _injective_words(bq)


def maximal_paths_uv(bq: BoundQuiver, cycle: SaturatedCycle) -> List[Tuple[Path, Path]]:
    """
    Local data of a saturated cycle.

    u_i is the maximal path leaving x_i along the arrow that is not a_i,
    v_i the maximal path entering x_i along the arrow that is not a_{i-1};
    either is trivial when no such arrow exists.
    """
    require_gentle(bq)
    n = cycle.length
    data = []
    for i, vertex in enumerate(cycle.vertices):
        other_out = [a.id for a in bq.quiver.outgoing(vertex) if a.id != cycle.arrows[i]]
        other_in = [a.id for a in bq.quiver.incoming(vertex) if a.id != cycle.arrows[(i - 1) % n]]
        u = bq.quiver.path(maximal_path_starting_with(bq, other_out[0])) if other_out else Path.trivial(vertex)
        v = bq.quiver.path(maximal_path_ending_with(bq, other_in[0])) if other_in else Path.trivial(vertex)
        data.append((u, v))
    return data


def path_word(bq: BoundQuiver, path: Path) -> StringWord:
    return canonical(bq, direct_word(bq, path.arrows, path.source))


# --- projective cover and syzygy ---

def _tail_module(bq: BoundQuiver, tail: ArrowPath) -> Optional[StringWord]:
    """The uniserial kernel piece below the first arrow of a tail."""
    if not tail:
        return None
    return direct_word(bq, tail[1:], bq.quiver.arrow(tail[0]).target)


def _cover_word(bq: BoundQuiver, word: StringWord) -> Tuple[List[str], List[StringWord]]:
    vertices = vertex_sequence(bq, word)
    letters = word.letters
    n = len(letters)
    peaks, _ = _peaks_and_valleys(word)

    cover: List[str] = []
    kernel: List[StringWord] = []
    # hanging tails by valley position, from the peak on each side
    left_tail_at: Dict[int, ArrowPath] = {}
    right_tail_at: Dict[int, ArrowPath] = {}

    for k in peaks:
        vertex = vertices[k]
        cover.append(vertex)
        left_seg: List[str] = []
        j = k
        while j > 0 and letters[j - 1].inverse:
            left_seg.append(letters[j - 1].arrow)
            j -= 1
        left_end = j
        right_seg: List[str] = []
        j = k
        while j < n and not letters[j].inverse:
            right_seg.append(letters[j].arrow)
            j += 1
        right_end = j

        used = {}
        if left_seg:
            used[left_seg[0]] = ("left", tuple(left_seg), left_end)
        if right_seg:
            used[right_seg[0]] = ("right", tuple(right_seg), right_end)

        for arrow in bq.quiver.outgoing(vertex):
            branch = maximal_path_starting_with(bq, arrow.id)
            if arrow.id not in used:
                piece = _tail_module(bq, branch)
                if piece is not None:
                    kernel.append(piece)
                continue
            side, segment, end = used[arrow.id]
            if branch[:len(segment)] != segment:
                raise ConsistencyError(
                    f"Segment {' '.join(segment)} of '{format_string(word)}' is not relation-free"
                )
            tail = branch[len(segment):]
            interior = 0 < end < n
            if not interior:
                piece = _tail_module(bq, tail)
                if piece is not None:
                    kernel.append(piece)
            elif side == "left":
                left_tail_at[end] = tail
            else:
                right_tail_at[end] = tail

    for position, first in right_tail_at.items():
        second = left_tail_at.pop(position)
        glued = [Letter(a, True) for a in reversed(first)] + [Letter(a) for a in second]
        kernel.append(make_word(bq, glued, vertices[position]))
    return cover, kernel


@dataclass(frozen=True)
class CoverResult:
    cover: Tuple[str, ...]
    kernel: ModuleSum


def projective_cover_string(bq: BoundQuiver, entries: ModuleSum) -> CoverResult:
    """
    Projective cover of a sum of string modules and its kernel.

    Each peak of a walk contributes the projective at its vertex. The kernel
    collects the tails of the projective strings hanging below each valley
    (glued in pairs at interior valleys) and the branches the walk does not use.
    """
    cover: List[str] = []
    kernel: List[ModuleEntry] = []
    for entry in entries:
        if entry.is_projective:
            cover.append(entry.projective_at)
            continue
        tops, pieces = _cover_word(bq, entry.word)
        cover.extend(tops)
        kernel.extend(string_entry(bq, piece) for piece in pieces)

    result = CoverResult(tuple(cover), module_sum(bq, kernel))
    covered = Counter()
    for vertex in cover:
        covered.update(dim_vector(bq, projective_word(bq, vertex)))
    if covered != sum_dim_vector(bq, entries) + sum_dim_vector(bq, result.kernel):
        raise ConsistencyError(f"Syzygy dimension law fails for {entries}")
    return result


def syzygy(bq: BoundQuiver, entries: ModuleSum, stable: bool = True) -> ModuleSum:
    kernel = projective_cover_string(bq, entries).kernel
    return kernel.non_projective() if stable else kernel


def syzygy_orbit(bq: BoundQuiver, entry: ModuleEntry, steps: int) -> List[ModuleSum]:
    """Stable syzygies Omega^0 ... Omega^steps of a single entry."""
    current = module_sum(bq, [entry]).non_projective()
    orbit = [current]
    for step in range(steps):
        current = syzygy(bq, current, stable=True)
        logger.debug(f"Omega^{step + 1} {entry} = {current}")
        orbit.append(current)
    return orbit


def tau_on_cycle(bq: BoundQuiver, cycle: SaturatedCycle, i: int) -> ModuleSum:
    """tau M(u_i) = M(v_{i+1}) on a saturated cycle of a gentle algebra."""
    data = maximal_paths_uv(bq, cycle)
    _, v_next = data[(i + 1) % cycle.length]
    return module_sum(bq, [string_entry(bq, path_word(bq, v_next))])


# --- enumeration ---

def _extensions(bq: BoundQuiver, word: StringWord, end: str) -> Iterable[Letter]:
    last = word.letters[-1] if word.letters else None
    run: List[str] = []
    if last is not None:
        for letter in reversed(word.letters):
            if letter.inverse != last.inverse:
                break
            run.append(letter.arrow)
    for arrow in bq.quiver.outgoing(end):
        letter = Letter(arrow.id)
        if last is not None and letter == last.flipped():
            continue
        if last is not None and not last.inverse and bq.ends_in_relation(tuple(reversed(run)) + (arrow.id,)):
            continue
        yield letter
    for arrow in bq.quiver.incoming(end):
        letter = Letter(arrow.id, True)
        if last is not None and letter == last.flipped():
            continue
        # the inverse run spells a path read from its newest letter
        if last is not None and last.inverse and bq.starts_with_relation((arrow.id,) + tuple(run)):
            continue
        yield letter


def enumerate_strings(bq: BoundQuiver, max_letters: int) -> List[StringWord]:
    """All strings with at most max_letters letters, once each in canonical form."""
    found = set()

    def walk(word: StringWord, end: str) -> None:
        found.add(canonical(bq, word))
        if len(word) >= max_letters:
            return
        for letter in _extensions(bq, word, end):
            walk(StringWord(word.start, word.letters + (letter,)), letter_ends(bq, letter)[1])

    for vertex in bq.vertices:
        walk(StringWord(vertex), vertex)
    return sorted(found, key=lambda w: entry_key(bq, ModuleEntry(w)))


def _rotations(letters: Tuple[Letter, ...]) -> List[Tuple[Letter, ...]]:
    return [letters[i:] + letters[:i] for i in range(len(letters))]


def _is_proper_power(letters: Tuple[Letter, ...]) -> bool:
    n = len(letters)
    return any(n % d == 0 and letters == letters[:d] * (n // d) for d in range(1, n))


def detect_bands(bq: BoundQuiver, max_letters: int) -> List[BandWord]:
    """Bands with at most max_letters letters, up to rotation and inversion."""
    found = set()

    def walk(word: StringWord, end: str) -> None:
        letters = word.letters
        if letters and end == word.start and _is_band(bq, word):
            candidates = _rotations(letters)
            candidates += _rotations(tuple(l.flipped() for l in reversed(letters)))
            best = min(candidates, key=lambda c: tuple(_letter_key(bq, l) for l in c))
            found.add(best)
        if len(letters) >= max_letters:
            return
        for letter in _extensions(bq, word, end):
            walk(StringWord(word.start, letters + (letter,)), letter_ends(bq, letter)[1])

    for vertex in bq.vertices:
        walk(StringWord(vertex), vertex)
    bands = sorted(found, key=lambda c: (len(c), tuple(_letter_key(bq, l) for l in c)))
    return [BandWord(c) for c in bands]


def _is_band(bq: BoundQuiver, word: StringWord) -> bool:
    letters = word.letters
    if all(l.inverse for l in letters) or not any(l.inverse for l in letters):
        return False
    if _is_proper_power(letters):
        return False
    # every power is a string once the square is
    return bool(is_string(bq, StringWord(word.start, letters + letters)))
