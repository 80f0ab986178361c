"""
Exact linear algebra over QQ and prime fields.

Thin wrappers around sympy's DomainMatrix. Every helper accepts matrices
with a zero dimension, which DomainMatrix itself handles unevenly.
"""
import random
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

from sympy import GF, QQ, isprime
from sympy.polys.matrices import DomainMatrix

from gentlekit.exceptions import FieldError


@dataclass(frozen=True)
class ExactField:
    """A coefficient field, with the trial count and seed of the randomized iso search run over it."""
    characteristic: int
    domain: Any
    trials: Optional[int] = None
    seed: Optional[int] = None

    @property
    def name(self) -> str:
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def element(self, value: int):
        return self.domain(value)

    def random_element(self, rng: random.Random):
        if self.characteristic == 0:
            return self.domain(rng.randint(-50, 50))
        return self.domain(rng.randrange(self.characteristic))

    def to_python(self, value):
        """Integer for field elements of GF(p) and integral rationals, 'a/b' otherwise."""
        as_sympy = self.domain.to_sympy(value)
        if as_sympy.is_Integer:
            return int(as_sympy) % self.characteristic if self.characteristic else int(as_sympy)
        return str(as_sympy)

    def from_python(self, value):
        if isinstance(value, str):
            numerator, _, denominator = value.partition("/")
            return self.domain(int(numerator)) / self.domain(int(denominator or 1))
        return self.domain(int(value))


def make_field(characteristic: int, jacobian: bool = False, trials: Optional[int] = None,
               seed: Optional[int] = None) -> ExactField:
    """
    Build QQ (characteristic 0) or GF(p).

    Raises:
        FieldError: If p is not prime, or p = 3 for a Jacobian workflow
    """
    if characteristic == 0:
        return ExactField(0, QQ, trials, seed)
    if characteristic < 0 or not isprime(characteristic):
        raise FieldError(f"Field characteristic must be 0 or a prime, got {characteristic}")
    if jacobian and characteristic == 3:
        raise FieldError(
            "Characteristic 3 is refused for Jacobian computations: the cyclic derivative "
            "of a loop cube is 3 times a square and vanishes",
            details={"characteristic": 3},
        )
    return ExactField(characteristic, GF(characteristic, symmetric=False), trials, seed)


def matrix(field: ExactField, rows: Sequence[Sequence[Any]], nrows: int, ncols: int) -> DomainMatrix:
    sparse = {i: {j: v for j, v in enumerate(row) if v} for i, row in enumerate(rows)}
    sparse = {i: row for i, row in sparse.items() if row}
    return DomainMatrix(sparse, (nrows, ncols), field.domain).to_dense()


def zeros(field: ExactField, nrows: int, ncols: int) -> DomainMatrix:
    return DomainMatrix({}, (nrows, ncols), field.domain).to_dense()


def identity(field: ExactField, n: int) -> DomainMatrix:
    return DomainMatrix({i: {i: field.one} for i in range(n)}, (n, n), field.domain).to_dense()


def entries(mat: DomainMatrix) -> List[List[Any]]:
    nrows, ncols = mat.shape
    if nrows == 0:
        return []
    if ncols == 0:
        return [[] for _ in range(nrows)]
    return mat.to_list()


def matmul(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"Shape mismatch {a.shape} x {b.shape}")
    if 0 in a.shape or 0 in b.shape:
        return DomainMatrix({}, (a.shape[0], b.shape[1]), a.domain).to_dense()
    return a.matmul(b)


def add(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    if 0 in a.shape:
        return a
    return a + b


def scale(mat: DomainMatrix, scalar) -> DomainMatrix:
    if 0 in mat.shape:
        return mat
    return mat.scalarmul(scalar)


def linear_combination(coefficients: Sequence[Any], mats: Sequence[DomainMatrix]) -> DomainMatrix:
    result = None
    for c, mat in zip(coefficients, mats):
        term = scale(mat, c)
        result = term if result is None else add(result, term)
    return result


def is_zero(mat: DomainMatrix) -> bool:
    return all(not v for row in entries(mat) for v in row)


def rref(mat: DomainMatrix) -> Tuple[List[List[Any]], Tuple[int, ...]]:
    nrows, ncols = mat.shape
    if nrows == 0 or ncols == 0:
        return entries(mat), ()
    reduced, pivots = mat.rref()
    return reduced.to_list(), tuple(pivots)


def rank(mat: DomainMatrix) -> int:
    return len(rref(mat)[1])


def nullspace(mat: DomainMatrix, field: ExactField) -> DomainMatrix:
    """Basis of the kernel as the columns of an (ncols x k) matrix."""
    ncols = mat.shape[1]
    rows, pivots = rref(mat)
    free = [j for j in range(ncols) if j not in pivots]
    columns = []
    for f in free:
        vector = [field.zero] * ncols
        vector[f] = field.one
        for i, p in enumerate(pivots):
            vector[p] = -rows[i][f]
        columns.append(vector)
    return from_columns(field, columns, ncols)


def from_columns(field: ExactField, columns: Sequence[Sequence[Any]], nrows: int) -> DomainMatrix:
    rows = [[col[i] for col in columns] for i in range(nrows)]
    return matrix(field, rows, nrows, len(columns))


def columns_of(mat: DomainMatrix) -> List[List[Any]]:
    rows = entries(mat)
    return [[row[j] for row in rows] for j in range(mat.shape[1])]


def hstack(field: ExactField, nrows: int, *mats: DomainMatrix) -> DomainMatrix:
    columns = [col for mat in mats for col in columns_of(mat)]
    return from_columns(field, columns, nrows)


def vstack(field: ExactField, ncols: int, *mats: DomainMatrix) -> DomainMatrix:
    rows = [row for mat in mats for row in entries(mat)]
    return matrix(field, rows, len(rows), ncols)


def block_diagonal(field: ExactField, *mats: DomainMatrix) -> DomainMatrix:
    nrows = sum(m.shape[0] for m in mats)
    ncols = sum(m.shape[1] for m in mats)
    sparse = {}
    r0 = c0 = 0
    for mat in mats:
        for i, row in enumerate(entries(mat)):
            for j, v in enumerate(row):
                if v:
                    sparse.setdefault(r0 + i, {})[c0 + j] = v
        r0 += mat.shape[0]
        c0 += mat.shape[1]
    return DomainMatrix(sparse, (nrows, ncols), field.domain).to_dense()


def solve(basis: DomainMatrix, targets: DomainMatrix, field: ExactField) -> Optional[DomainMatrix]:
    """Return X with basis * X = targets, or None if some target column is outside the span."""
    nrows, k = basis.shape
    t = targets.shape[1]
    if t == 0:
        return zeros(field, k, 0)
    augmented = hstack(field, nrows, basis, targets)
    rows, pivots = rref(augmented)
    if any(p >= k for p in pivots):
        return None
    solution = [[field.zero] * t for _ in range(k)]
    for i, p in enumerate(pivots):
        for j in range(t):
            solution[p][j] = rows[i][k + j]
    return matrix(field, solution, k, t)


def column_space_basis(mat: DomainMatrix, field: ExactField) -> DomainMatrix:
    _, pivots = rref(mat)
    columns = columns_of(mat)
    return from_columns(field, [columns[p] for p in pivots], mat.shape[0])


def complement_basis(mat: DomainMatrix, field: ExactField) -> DomainMatrix:
    """Standard basis vectors completing the column space of mat to the whole space."""
    n = mat.shape[0]
    augmented = hstack(field, n, mat, identity(field, n))
    _, pivots = rref(augmented)
    k = mat.shape[1]
    unit_columns = columns_of(identity(field, n))
    return from_columns(field, [unit_columns[p - k] for p in pivots if p >= k], n)


def is_invertible(mat: DomainMatrix) -> bool:
    nrows, ncols = mat.shape
    return nrows == ncols and rank(mat) == nrows
