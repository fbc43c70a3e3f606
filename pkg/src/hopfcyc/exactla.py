"""Exact rational sparse linear algebra.

Everything downstream (cocyclic modules, Weil-algebra quotients, pairings)
reduces to ranks, kernels, canonical solves and quotient spaces over Q.
All arithmetic is exact (`fractions.Fraction`); all outputs are canonical,
so identical inputs give identical results no matter how work is scheduled.

Vectors are sparse dicts ``{index: Fraction}`` with no stored zeros.
Matrices are sparse coordinate maps ``{(row, col): Fraction}``.
Subspaces are kept in reduced column echelon form: each basis vector is
monic at its pivot (the smallest nonzero index), pivots are strictly
increasing, and every basis vector vanishes at every other pivot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

Scalar = Fraction
Vector = Dict[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


class ShapeError(ValueError):
    """Raised when operand dimensions are incompatible (INPUT_SHAPE)."""


class _Inconsistent:
    """Sentinel returned by :func:`solve` for unsolvable systems."""

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "INCONSISTENT"

    def __bool__(self) -> bool:
        return False


INCONSISTENT = _Inconsistent()


# ---------------------------------------------------------------------------
# sparse vectors
# ---------------------------------------------------------------------------

def vec_add(u: Vector, v: Vector) -> Vector:
    out = dict(u)
    for i, c in v.items():
        s = out.get(i, ZERO) + c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out

def vec_sub(u: Vector, v: Vector) -> Vector:
    out = dict(u)
    for i, c in v.items():
        s = out.get(i, ZERO) - c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out

def vec_scale(u: Vector, c: Fraction) -> Vector:
    if not c:
        return {}
    return {i: c * x for i, x in u.items()}

def vec_axpy(u: Vector, c: Fraction, v: Vector) -> Vector:
    """Return u + c*v."""
    if not c:
        return dict(u)
    out = dict(u)
    for i, x in v.items():
        s = out.get(i, ZERO) + c * x
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out

def vec_from_list(xs: Iterable[Scalar]) -> Vector:
    return {i: Fraction(x) for i, x in enumerate(xs) if x}

def vec_to_list(v: Vector, n: int) -> List[Fraction]:
    out = [ZERO] * n
    for i, c in v.items():
        out[i] = c
    return out


# ---------------------------------------------------------------------------
# sparse matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseMatrix:
    """Immutable sparse matrix over Q with no stored zeros."""

    rows: int
    cols: int
    entries: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for (r, c), x in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ShapeError(f"entry ({r},{c}) outside {self.rows}x{self.cols}")
            x = Fraction(x)
            if x:
                clean[(r, c)] = x
        object.__setattr__(self, "entries", clean)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(rows: int, cols: int) -> "SparseMatrix":
        return SparseMatrix(rows, cols, {})

    @staticmethod
    def identity(n: int) -> "SparseMatrix":
        return SparseMatrix(n, n, {(i, i): ONE for i in range(n)})

    @staticmethod
    def from_rows(rows: List[List[Scalar]]) -> "SparseMatrix":
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        ent = {}
        for r, row in enumerate(rows):
            if len(row) != nc:
                raise ShapeError("ragged rows")
            for c, x in enumerate(row):
                if x:
                    ent[(r, c)] = Fraction(x)
        return SparseMatrix(nr, nc, ent)

    @staticmethod
    def from_columns(ambient: int, cols: List[Vector]) -> "SparseMatrix":
        ent = {}
        for j, v in enumerate(cols):
            for i, x in v.items():
                if x:
                    ent[(i, j)] = Fraction(x)
        return SparseMatrix(ambient, len(cols), ent)

    # -- access -------------------------------------------------------------

    def column(self, j: int) -> Vector:
        return {r: x for (r, c), x in self.entries.items() if c == j}

    def columns(self) -> List[Vector]:
        out: List[Vector] = [{} for _ in range(self.cols)]
        for (r, c), x in self.entries.items():
            out[c][r] = x
        return out

    def to_dense(self) -> List[List[Fraction]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (r, c), x in self.entries.items():
            out[r][c] = x
        return out

    def is_zero(self) -> bool:
        return not self.entries

    # -- arithmetic ---------------------------------------------------------

    def apply(self, v: Vector) -> Vector:
        """Matrix-vector product on a sparse vector."""
        out: Vector = {}
        for (r, c), x in self.entries.items():
            vc = v.get(c)
            if vc:
                s = out.get(r, ZERO) + x * vc
                if s:
                    out[r] = s
                else:
                    del out[r]
        return out

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in add")
        ent = dict(self.entries)
        for k, x in other.entries.items():
            s = ent.get(k, ZERO) + x
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return SparseMatrix(self.rows, self.cols, ent)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scale(Fraction(-1))

    def scale(self, c: Scalar) -> "SparseMatrix":
        c = Fraction(c)
        if not c:
            return SparseMatrix.zero(self.rows, self.cols)
        return SparseMatrix(self.rows, self.cols,
                            {k: c * x for k, x in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ShapeError("shape mismatch in matmul")
        # group left entries by column for sparse product
        by_col: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), x in self.entries.items():
            by_col.setdefault(c, []).append((r, x))
        ent: Dict[Tuple[int, int], Fraction] = {}
        for (k, j), y in other.entries.items():
            for r, x in by_col.get(k, ()):
                key = (r, j)
                s = ent.get(key, ZERO) + x * y
                if s:
                    ent[key] = s
                else:
                    del ent[key]
        return SparseMatrix(self.rows, other.cols, ent)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows,
                            {(c, r): x for (r, c), x in self.entries.items()})

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SparseMatrix)
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))


# ---------------------------------------------------------------------------
# incremental reduced echelon form
# ---------------------------------------------------------------------------

class Echelon:
    """Maintains a reduced echelon basis of a growing span.

    Pivot = smallest nonzero index of each stored vector; stored vectors are
    monic at their pivot and mutually reduced, so the basis (sorted by pivot)
    is the canonical reduced column echelon basis of the span.
    """

    def __init__(self) -> None:
        self.pivots: Dict[int, Vector] = {}

    def reduce(self, v: Vector) -> Vector:
        """Reduce v against the current basis; return the residual."""
        v = {i: c for i, c in v.items() if c}
        # basis vectors are mutually reduced, so one pass per pivot suffices
        for q in sorted(set(v) & self.pivots.keys()):
            c = v.get(q)
            if c:
                v = vec_axpy(v, -c, self.pivots[q])
        return v

    def add(self, v: Vector) -> Optional[int]:
        """Insert v into the span. Returns the new pivot, or None if dependent."""
        v = self.reduce(v)
        if not v:
            return None
        p = min(v)
        v = vec_scale(v, ONE / v[p])
        # back-substitute into existing vectors to keep the basis reduced
        for q, u in self.pivots.items():
            c = u.get(p)
            if c:
                self.pivots[q] = vec_axpy(u, -c, v)
        self.pivots[p] = v
        return p

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def basis_vectors(self) -> List[Vector]:
        return [self.pivots[p] for p in sorted(self.pivots)]

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient_dim with canonical echelon basis."""

    ambient_dim: int
    basis: SparseMatrix  # reduced column echelon form

    @staticmethod
    def from_vectors(ambient_dim: int, vectors: Iterable[Vector]) -> "Subspace":
        ech = Echelon()
        for v in vectors:
            for i in v:
                if not 0 <= i < ambient_dim:
                    raise ShapeError(f"index {i} outside ambient dim {ambient_dim}")
            ech.add(v)
        return Subspace(ambient_dim, SparseMatrix.from_columns(
            ambient_dim, ech.basis_vectors()))

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, SparseMatrix.zero(ambient_dim, 0))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, SparseMatrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.cols

    def echelon(self) -> Echelon:
        ech = Echelon()
        for v in self.basis.columns():
            ech.add(v)
        return ech

    def contains(self, v: Vector) -> bool:
        return self.echelon().contains(v)

    def contains_subspace(self, other: "Subspace") -> bool:
        ech = self.echelon()
        return all(ech.contains(v) for v in other.basis.columns())

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ShapeError("ambient mismatch in subspace sum")
        return Subspace.from_vectors(
            self.ambient_dim, self.basis.columns() + other.basis.columns())

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Subspace)
                and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))


def span_dim(ambient_dim: int, vectors: Iterable[Vector]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.dim


# ---------------------------------------------------------------------------
# rank / kernel / solve
# ---------------------------------------------------------------------------

def rank(m: SparseMatrix) -> int:
    ech = Echelon()
    for v in m.columns():
        ech.add(v)
    return ech.dim


def _row_reduce(m: SparseMatrix, rhs: Optional[Vector] = None):
    """Row-reduce to RREF, tracking the rhs if given.

    Returns (pivot_col -> reduced row vector, transformed rhs dict keyed by
    pivot column, inconsistent flag).
    """
    rows: List[Vector] = [{} for _ in range(m.rows)]
    for (r, c), x in m.entries.items():
        rows[r][c] = x
    b = vec_to_list(rhs or {}, m.rows)
    pivots: Dict[int, Vector] = {}
    pivot_rhs: Dict[int, Fraction] = {}
    inconsistent = False
    for r in range(m.rows):
        v = rows[r]
        t = b[r]
        # eliminate every existing pivot column from this row; pivot rows are
        # kept mutually reduced, so one pass over each suffices
        for q in sorted(set(v) & pivots.keys()):
            coef = v.get(q)
            if coef:
                v = vec_axpy(v, -coef, pivots[q])
                t -= coef * pivot_rhs[q]
        if v:
            p = min(v)
            inv = ONE / v[p]
            v = vec_scale(v, inv)
            t *= inv
            # back-substitution keeps earlier pivot rows reduced (RREF)
            for q in list(pivots):
                cq = pivots[q].get(p)
                if cq:
                    pivots[q] = vec_axpy(pivots[q], -cq, v)
                    pivot_rhs[q] -= cq * t
            pivots[p] = v
            pivot_rhs[p] = t
        elif t:
            inconsistent = True
    return pivots, pivot_rhs, inconsistent


def kernel_basis(m: SparseMatrix) -> Subspace:
    pivots, _, _ = _row_reduce(m)
    free = [c for c in range(m.cols) if c not in pivots]
    vectors = []
    for f in free:
        v: Vector = {f: ONE}
        for p, row in pivots.items():
            c = row.get(f)
            if c:
                v[p] = -c
        vectors.append(v)
    return Subspace.from_vectors(m.cols, vectors)


def solve(m: SparseMatrix, b):
    """Solve m·x = b with canonical choice (free variables zero).

    ``b`` may be a list of scalars or a sparse vector dict. Returns the
    solution as a list of Fractions, or :data:`INCONSISTENT`.
    """
    if isinstance(b, dict):
        bv = {i: Fraction(x) for i, x in b.items() if x}
        if bv and max(bv) >= m.rows:
            raise ShapeError("rhs longer than matrix rows")
    else:
        if len(b) != m.rows:
            raise ShapeError(f"rhs length {len(b)} != rows {m.rows}")
        bv = vec_from_list(b)
    pivots, pivot_rhs, inconsistent = _row_reduce(m, bv)
    if inconsistent:
        return INCONSISTENT
    x = [ZERO] * m.cols
    for p, t in pivot_rhs.items():
        x[p] = t
    return x


# ---------------------------------------------------------------------------
# quotient spaces
# ---------------------------------------------------------------------------

class DescentFailure(ValueError):
    """An operator does not preserve the relation subspace.

    ``witness`` is a relation vector whose image falls outside the relations.
    """

    def __init__(self, witness: Vector):
        super().__init__(f"operator does not descend; witness {sorted(witness.items())}")
        self.witness = witness


@dataclass(frozen=True)
class QuotientSpace:
    """Ambient space modulo a relation subspace.

    ``projection`` (dim x ambient) sends an ambient vector to quotient
    coordinates; ``section`` (ambient x dim) picks the canonical
    representative supported on non-pivot coordinates of the relations.
    """

    ambient_dim: int
    relations: Subspace
    projection: SparseMatrix
    section: SparseMatrix

    @property
    def dim(self) -> int:
        return self.projection.rows

    def project(self, v: Vector) -> Vector:
        return self.projection.apply(v)

    def lift(self, v: Vector) -> Vector:
        return self.section.apply(v)

    def induced_map(self, op: SparseMatrix) -> SparseMatrix:
        """Descend an ambient operator to the quotient.

        Raises :class:`DescentFailure` if the operator does not map the
        relation span into itself.
        """
        if op.rows != self.ambient_dim or op.cols != self.ambient_dim:
            raise ShapeError("operator must be square on the ambient space")
        ech = self.relations.echelon()
        for v in self.relations.basis.columns():
            if not ech.contains(op.apply(v)):
                raise DescentFailure(v)
        return self.projection @ op @ self.section

    def induced_map_between(self, target: "QuotientSpace", op: SparseMatrix) -> SparseMatrix:
        """Descend ``op: self.ambient -> target.ambient`` to the quotients."""
        if op.cols != self.ambient_dim or op.rows != target.ambient_dim:
            raise ShapeError("operator shape mismatch")
        ech = target.relations.echelon()
        for v in self.relations.basis.columns():
            if not ech.contains(op.apply(v)):
                raise DescentFailure(v)
        return target.projection @ op @ self.section


def quotient(ambient_dim: int, relations: Subspace) -> QuotientSpace:
    if relations.ambient_dim != ambient_dim:
        raise ShapeError("relation ambient dim mismatch")
    ech = relations.echelon()
    pivot_set = set(ech.pivots)
    free = [i for i in range(ambient_dim) if i not in pivot_set]
    pos = {f: j for j, f in enumerate(free)}
    proj_entries: Dict[Tuple[int, int], Fraction] = {}
    for f in free:
        proj_entries[(pos[f], f)] = ONE
    for p, v in ech.pivots.items():
        # e_p = -(sum of free components of the relation vector) mod relations
        for i, c in v.items():
            if i != p:
                proj_entries[(pos[i], p)] = -c
    projection = SparseMatrix(len(free), ambient_dim, proj_entries)
    section = SparseMatrix(ambient_dim, len(free),
                           {(f, j): ONE for j, f in enumerate(free)})
    return QuotientSpace(ambient_dim, relations, projection, section)
