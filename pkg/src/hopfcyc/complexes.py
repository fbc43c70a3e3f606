"""Graded complexes, cohomology harvesting, and bicomplex totalization.

A GradedComplex is the universal carrier for every (co)chain complex in the
package: per-degree dimensions plus degree-homogeneous differentials, with
an optional second differential of opposite direction (mixed complex).

Cohomology is "harvested": each degree gets a deterministic echelon basis of
cocycle representatives together with projection data, so induced maps on
cohomology (S-operations, cup products, comparison scalars) are honest
matrices on reproducible bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exactla import (
    INCONSISTENT,
    Echelon,
    SparseMatrix,
    Subspace,
    Vector,
    kernel_basis,
    solve,
    vec_axpy,
    vec_scale,
)

F = Fraction


# ---------------------------------------------------------------------------
# tensor index bookkeeping
# ---------------------------------------------------------------------------

class TensorSpace:
    """Ordered basis of a tensor product of small spaces (row-major)."""

    def __init__(self, dims: Sequence[int]):
        self.dims = tuple(dims)
        self.size = 1
        for d in self.dims:
            self.size *= d
        self._strides = []
        s = 1
        for d in reversed(self.dims):
            self._strides.append(s)
            s *= d
        self._strides.reverse()

    def index(self, multi: Sequence[int]) -> int:
        return sum(m * s for m, s in zip(multi, self._strides))

    def multi(self, index: int) -> Tuple[int, ...]:
        out = []
        for s in self._strides:
            out.append(index // s)
            index %= s
        return tuple(out)

    def basis(self) -> Iterable[Tuple[int, ...]]:
        for idx in range(self.size):
            yield self.multi(idx)


def build_operator(src: TensorSpace, dst: TensorSpace,
                   fn: Callable[[Tuple[int, ...]], Dict[Tuple[int, ...], Fraction]]
                   ) -> SparseMatrix:
    """Assemble the matrix of a linear map given elementwise on basis tensors."""
    entries: Dict[Tuple[int, int], Fraction] = {}
    for j in range(src.size):
        for out_multi, c in fn(src.multi(j)).items():
            if c:
                i = dst.index(out_multi)
                entries[(i, j)] = entries.get((i, j), F(0)) + c
    return SparseMatrix(dst.size, src.size, entries)


# ---------------------------------------------------------------------------
# graded complexes
# ---------------------------------------------------------------------------

class IdentityFailure(AssertionError):
    """A required operator identity fails; carries the offending relation."""


@dataclass
class GradedComplex:
    """dims[n] with differential diff[n]: degree n -> n + direction."""

    dims: Dict[int, int]
    diff: Dict[int, SparseMatrix]
    direction: int = 1
    secondary: Optional[Dict[int, SparseMatrix]] = None  # opposite direction

    def degrees(self) -> List[int]:
        return sorted(self.dims)

    def verify(self) -> None:
        d = self.direction
        for n, m in self.diff.items():
            nxt = self.diff.get(n + d)
            if nxt is not None and m.cols == self.dims.get(n):
                if not (nxt @ m).is_zero():
                    raise IdentityFailure(f"d.d != 0 out of degree {n}")
        if self.secondary:
            for n, bmat in self.secondary.items():
                b2 = self.secondary.get(n - d)
                if b2 is not None and not (b2 @ bmat).is_zero():
                    raise IdentityFailure(f"B.B != 0 out of degree {n}")
            for n in self.dims:
                # anticommutation where all four maps are represented
                bn = self.secondary.get(n)
                dn = self.diff.get(n)
                if bn is None or dn is None:
                    continue
                d_prev = self.diff.get(n - d)
                b_next = self.secondary.get(n + d)
                if d_prev is None or b_next is None:
                    continue
                if not (d_prev @ bn + b_next @ dn).is_zero():
                    raise IdentityFailure(f"dB + Bd != 0 at degree {n}")

    # -- cohomology --------------------------------------------------------

    def safe_degrees(self) -> List[int]:
        """Degrees where both incoming and outgoing differentials exist."""
        out = []
        for n in self.dims:
            if self.diff.get(n) is not None and (
                    n - self.direction not in self.dims
                    or self.diff.get(n - self.direction) is not None):
                out.append(n)
        return sorted(out)

    def cohomology(self, n: int) -> "HarvestedCohomology":
        dn = self.diff[n]
        cocycles = kernel_basis(dn)
        incoming = self.diff.get(n - self.direction)
        image_vectors: List[Vector] = []
        if incoming is not None:
            image_vectors = incoming.columns()
        return harvest(self.dims[n], cocycles, image_vectors)

    def cohomology_dims(self, degrees: Optional[Iterable[int]] = None) -> Dict[int, int]:
        out = {}
        for n in degrees if degrees is not None else self.safe_degrees():
            out[n] = self.cohomology(n).dim
        return out


# ---------------------------------------------------------------------------
# harvested cohomology
# ---------------------------------------------------------------------------

class PairedEchelon:
    """Echelon on 'key' vectors while the same row operations are applied to
    paired payload vectors (used to keep honest cocycle representatives)."""

    def __init__(self) -> None:
        self.pivots: Dict[int, Tuple[Vector, Vector]] = {}

    def add(self, key: Vector, payload: Vector) -> bool:
        key = {i: c for i, c in key.items() if c}
        for q in sorted(set(key) & self.pivots.keys()):
            c = key.get(q)
            if c:
                bk, bp = self.pivots[q]
                key = vec_axpy(key, -c, bk)
                payload = vec_axpy(payload, -c, bp)
        if not key:
            return False
        p = min(key)
        inv = F(1) / key[p]
        key = vec_scale(key, inv)
        payload = vec_scale(payload, inv)
        for q, (bk, bp) in self.pivots.items():
            c = bk.get(p)
            if c:
                self.pivots[q] = (vec_axpy(bk, -c, key), vec_axpy(bp, -c, payload))
        self.pivots[p] = (key, payload)
        return True

    def items(self) -> List[Tuple[Vector, Vector]]:
        return [self.pivots[p] for p in sorted(self.pivots)]


@dataclass
class HarvestedCohomology:
    """Cohomology at one degree with explicit representatives.

    ``reps[j]`` is an ambient cocycle; ``coords(v)`` expresses the class of an
    ambient cocycle v in this basis (INCONSISTENT signals v is not a cocycle
    class of this space, which callers treat as a bug).
    """

    ambient_dim: int
    boundary_echelon: Echelon
    class_basis: SparseMatrix       # columns: classes in reduced coordinates
    reps: List[Vector]

    @property
    def dim(self) -> int:
        return self.class_basis.cols

    def reduce_mod_boundaries(self, v: Vector) -> Vector:
        return self.boundary_echelon.reduce(v)

    def is_coboundary(self, v: Vector) -> bool:
        return not self.reduce_mod_boundaries(v)

    def coords(self, v: Vector):
        reduced = self.reduce_mod_boundaries(v)
        if not reduced:
            return [F(0)] * self.dim
        return solve(self.class_basis, reduced)


def harvest(ambient_dim: int, cocycles: Subspace,
            image_vectors: List[Vector]) -> HarvestedCohomology:
    bech = Echelon()
    for v in image_vectors:
        bech.add(v)
    pe = PairedEchelon()
    for v in cocycles.basis.columns():
        pe.add(bech.reduce(v), v)
    pairs = pe.items()
    basis = SparseMatrix.from_columns(ambient_dim, [k for k, _ in pairs])
    return HarvestedCohomology(ambient_dim, bech, basis, [p for _, p in pairs])


def induced_on_cohomology(src: HarvestedCohomology, dst: HarvestedCohomology,
                          op: SparseMatrix) -> SparseMatrix:
    """Matrix of the map induced by ``op`` on harvested cohomology bases."""
    cols = []
    for r in src.reps:
        c = dst.coords(op.apply(r))
        if c is INCONSISTENT:
            raise IdentityFailure("operator does not send cocycles to cocycles")
        cols.append({i: x for i, x in enumerate(c) if x})
    return SparseMatrix.from_columns(dst.dim, cols)


# ---------------------------------------------------------------------------
# restriction to subcomplexes
# ---------------------------------------------------------------------------

def restrict_complex(diff: Dict[int, SparseMatrix],
                     inclusions: Dict[int, SparseMatrix],
                     direction: int = 1) -> GradedComplex:
    """Restrict differentials to subspaces given by inclusion matrices.

    inclusions[n]: ambient_dim x sub_dim; the differential must map each
    subspace into the next one (checked via exact solve).
    """
    dims = {n: inc.cols for n, inc in inclusions.items()}
    rdiff: Dict[int, SparseMatrix] = {}
    for n, inc in inclusions.items():
        dn = diff.get(n)
        tgt = inclusions.get(n + direction)
        if dn is None:
            continue
        if tgt is None:
            if dn.rows == 0:
                # terminal zero map of a bounded-below chain complex
                rdiff[n] = SparseMatrix.zero(0, inc.cols)
            continue
        cols = []
        for v in inc.columns():
            image = dn.apply(v)
            x = solve(tgt, image)
            if x is INCONSISTENT:
                raise IdentityFailure(
                    f"differential does not preserve subspace at degree {n}")
            cols.append({i: c for i, c in enumerate(x) if c})
        rdiff[n] = SparseMatrix.from_columns(tgt.cols, cols)
    return GradedComplex(dims, rdiff, direction)


# ---------------------------------------------------------------------------
# (b, B) bicomplex totalization
# ---------------------------------------------------------------------------

def totalize_mixed(dims: Dict[int, int], b: Dict[int, SparseMatrix],
                   B: Dict[int, SparseMatrix], direction: int = 1
                   ) -> GradedComplex:
    """Total complex of the (b, B) bicomplex.

    Tot^t = (+)_{s >= 0} C^{t - 2s}; D = b on each summand plus B mapping the
    s-summand of Tot^t to the (s+1)-summand of Tot^{t+direction}... i.e. the
    standard two-column-periodic totalization in the given direction.
    """
    degrees = sorted(dims)
    lo, hi = degrees[0], degrees[-1]

    def summands(t: int) -> List[int]:
        # Tot_t = (+)_{s>=0} C_{t-2s} in both the chain and cochain case
        out = []
        m = t
        while m >= lo:
            if m in dims:
                out.append(m)
            m -= 2
        return out

    tot_dims: Dict[int, int] = {}
    offsets: Dict[int, Dict[int, int]] = {}
    for t in range(lo, hi + 1):
        offs: Dict[int, int] = {}
        total = 0
        for m in summands(t):
            offs[m] = total
            total += dims[m]
        tot_dims[t] = total
        offsets[t] = offs
    tot_diff: Dict[int, SparseMatrix] = {}
    ts = sorted(tot_dims)
    for t in ts:
        t2 = t + direction
        if t2 not in tot_dims:
            continue
        entries: Dict[Tuple[int, int], Fraction] = {}
        ok = True
        for m, off in offsets[t].items():
            bm = b.get(m)
            m_tgt = m + direction
            if m_tgt in offsets[t2]:
                if bm is None:
                    ok = False
                    break
                o2 = offsets[t2][m_tgt]
                for (r, c), x in bm.entries.items():
                    entries[(o2 + r, off + c)] = x
            Bm = B.get(m)
            mB = m - direction
            if mB in offsets[t2]:
                if Bm is None:
                    ok = False
                    break
                o2 = offsets[t2][mB]
                for (r, c), x in Bm.entries.items():
                    entries[(o2 + r, off + c)] = x
        if ok:
            tot_diff[t] = SparseMatrix(tot_dims[t2], tot_dims[t], entries)
    if direction == -1 and lo == 0:
        # chain complexes end at degree 0; record the terminal zero boundary
        tot_diff[0] = SparseMatrix.zero(0, tot_dims[0])
    return GradedComplex(tot_dims, tot_diff, direction)
