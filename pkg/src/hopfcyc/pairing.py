"""Pairings between coalgebra-type and algebra-type cyclic classes.

Given a coalgebra C acting on an algebra A, classes in the truncation
tower of the free differential graded algebra on C pair with traces on a
thickened extension of A to produce ordinary cyclic cocycles on A.  This
module builds the three ingredients and the maps between them:

* :class:`UniversalExtension` -- the even-form thickening R of A whose
  product carries a curvature correction ``x * y = xy + dx dy``; its
  augmentation ideal I filters R and ``R / I^{n+1}`` is the order-n
  thickening.  Trace functionals on ``M (x)_H R / I^{n+1}`` (even order)
  and on ``M (x)_H I^{n+1}`` (odd order) are found as kernels of the
  relation spans.
* :class:`RhoSharp` -- the evaluation of generator words on bar tensors:
  a degree-1 letter eats one tensor leg through the C-action, a degree-2
  letter eats two legs and lands in the ideal (its degree-zero part must
  cancel; if not, :class:`CurvatureEscape` is raised).
* :func:`cup_even` / :func:`cup_odd` -- pairing a tower (resp. ideal
  tail) cocycle with a trace to get a cyclic cochain on A.
* :func:`khalkhali_cup` -- the direct pairing of a cotrace on C with a
  closed trace on forms over A, through the evaluation of the odd
  transgression word.
* :func:`compare_pairings` -- both routes to the cyclic cohomology of C
  compared on classes, including the rational normalization factor
  (m + 1) / (m + n + 1).
* :func:`s_compare` -- the periodicity shift realized on the tower side
  (truncation projection between consecutive levels) against the shift
  operator of the cocyclic module, with the relating scalar measured.

Everything is exact over the rationals; validation failures raise typed
errors carrying a witness rather than returning approximate answers.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .complexes import (GradedComplex, TensorSpace, IdentityFailure,
                        induced_on_cohomology, restrict_complex,
                        totalize_mixed)
from .exactla import (INCONSISTENT, SparseMatrix, Subspace, Vector,
                      kernel_basis, quotient, solve)
from .structures import (Coalgebra, Element, HopfAlgebra, ModuleAlgebra,
                         ModuleCoalgebra, SAYDModule)
from .forms import BarBundle, OmegaBundle, build_omega
from .cyclic import CocyclicModuleData, diagonal_h_relations
from . import weil as wl
from .weil import WeilBundle, QuotientComplex

F = Fraction


class ActionExtensionFailure(RuntimeError):
    """The coalgebra action does not extend diagonally to the thickening."""

    def __init__(self, witness):
        super().__init__(f"coalgebra action is incompatible with the "
                         f"curvature product at {witness!r}")
        self.witness = witness


class CurvatureEscape(RuntimeError):
    """A degree-2 letter evaluates outside the augmentation ideal."""

    def __init__(self, witness):
        super().__init__(f"curvature has a nonzero degree-zero part "
                         f"at {witness!r}")
        self.witness = witness


class NotACocycle(RuntimeError):
    """The input class representative fails the cocycle condition."""


class TraceInvalid(RuntimeError):
    """The functional does not vanish on the required relation span."""


class CotraceInvalid(RuntimeError):
    """The coalgebra-side chain fails a cotrace condition."""


# ---------------------------------------------------------------------------
# the thickened algebra
# ---------------------------------------------------------------------------

@dataclass
class UniversalExtension:
    """Even-degree forms over A with the curvature-corrected product.

    The underlying space is the direct sum of the reduced form spaces in
    even degrees 0, 2, ..., 2 * (n_max + 1); block i holds degree 2i.
    The product of x in block i and y in block j contributes ``x y`` to
    block i + j and ``dx dy`` to block i + j + 1, with blocks above the
    top silently truncated (degrees only ever grow, so the truncation is
    exact for every computation that stays inside the window).
    """

    algebra: ModuleAlgebra
    hopf: Optional[HopfAlgebra]
    coalgebra: Optional[Coalgebra]
    omega: OmegaBundle
    n_max: int
    offsets: List[int] = field(default_factory=list)
    dim: int = 0
    _keys: Dict[int, list] = field(default_factory=dict, repr=False)
    _prod: Dict[tuple, Vector] = field(default_factory=dict, repr=False)
    _hmats: Dict[tuple, SparseMatrix] = field(default_factory=dict,
                                              repr=False)

    def __post_init__(self):
        self.offsets = [0]
        for i in range(self.top_block + 1):
            self.offsets.append(self.offsets[-1] + self.omega.dim(2 * i))
        self.dim = self.offsets[-1]

    @property
    def top_block(self) -> int:
        return self.n_max + 1

    def block_dim(self, i: int) -> int:
        return self.omega.dim(2 * i)

    def keys(self, i: int) -> list:
        """Basis form keys (slot, legs) of block i, in coordinate order."""
        if i not in self._keys:
            self._keys[i] = [(a0, legs)
                             for (_, a0, legs) in self.omega.basis(2 * i)]
        return self._keys[i]

    def coord(self, i: int, local: int) -> int:
        return self.offsets[i] + local

    def decode(self, coord: int) -> Tuple[int, int]:
        for i in range(self.top_block + 1):
            if coord < self.offsets[i + 1]:
                return i, coord - self.offsets[i]
        raise IndexError(coord)

    def form_coord(self, i: int, key: Tuple[int, Tuple[int, ...]]) -> int:
        return self.coord(i, self.omega.coord((0,) + key))

    def iota(self, x: Element) -> Vector:
        """The inclusion of A as block zero."""
        return {self.coord(0, self.omega.coord((0, a, ()))): c
                for a, c in x.items() if c}

    def min_block(self, v: Vector) -> Optional[int]:
        blocks = [self.decode(c)[0] for c, x in v.items() if x]
        return min(blocks) if blocks else None

    def in_ideal_power(self, v: Vector, k: int) -> bool:
        mb = self.min_block(v)
        return mb is None or mb >= k

    def truncate(self, v: Vector, n: int) -> Vector:
        """Image in the order-n quotient: drop blocks above n."""
        cut = self.offsets[n + 1]
        return {c: x for c, x in v.items() if c < cut and x}

    # -- the curvature-corrected product ------------------------------------

    def _basis_prod(self, i: int, a: int, j: int, b: int) -> Vector:
        memo = (i, a, j, b)
        if memo in self._prod:
            return self._prod[memo]
        om = self.omega
        f1 = self.keys(i)[a]
        f2 = self.keys(j)[b]
        out: Vector = {}
        if i + j <= self.top_block:
            for (s, ls), c in om.form_mul(f1, f2).items():
                if c:
                    cc = self.form_coord(i + j, (s, ls))
                    out[cc] = out.get(cc, F(0)) + c
        if i + j + 1 <= self.top_block:
            d1 = om.d_elem((0,) + f1)
            d2 = om.d_elem((0,) + f2)
            for (_, s1, l1), c1 in d1.items():
                for (_, s2, l2), c2 in d2.items():
                    for (s, ls), c in om.form_mul((s1, l1), (s2, l2)).items():
                        if c:
                            cc = self.form_coord(i + j + 1, (s, ls))
                            out[cc] = out.get(cc, F(0)) + c1 * c2 * c
        out = {c: x for c, x in out.items() if x}
        self._prod[memo] = out
        return out

    def mul(self, v1: Vector, v2: Vector) -> Vector:
        out: Vector = {}
        for c1, x1 in v1.items():
            i, a = self.decode(c1)
            for c2, x2 in v2.items():
                j, b = self.decode(c2)
                for cc, c in self._basis_prod(i, a, j, b).items():
                    out[cc] = out.get(cc, F(0)) + x1 * x2 * c
        return {c: x for c, x in out.items() if x}

    # -- Hopf and coalgebra actions -----------------------------------------

    def h_mat(self, h_idx: int, block: int) -> SparseMatrix:
        memo = (h_idx, block)
        if memo not in self._hmats:
            om = self.omega

            def fn(key):
                return {(0, s, ls): c for (s, ls), c in
                        om._form_action(h_idx, key[1], key[2]).items()}

            self._hmats[memo] = om._matrix(2 * block, 2 * block, fn)
        return self._hmats[memo]

    def h_act(self, h_elem: Element, v: Vector) -> Vector:
        out: Vector = {}
        for c, x in v.items():
            i, a = self.decode(c)
            for hi, hc in h_elem.items():
                for r, mc in self.h_mat(hi, i).column(a).items():
                    cc = self.coord(i, r)
                    out[cc] = out.get(cc, F(0)) + hc * x * mc
        return {c: x for c, x in out.items() if x}

    def c_act_key(self, c_elem: Element, i: int,
                  key: Tuple[int, Tuple[int, ...]]) -> Vector:
        """Diagonal coalgebra action: split c over the slot and the legs."""
        a0, legs = key
        cd = self.coalgebra
        alg = self.algebra
        out: Vector = {}
        for parts, pc in _split(cd, c_elem, len(legs) + 1).items():
            for s, sc in alg.c_act({parts[0]: F(1)}, {a0: F(1)}).items():
                terms: List[Tuple[Tuple[int, ...], Fraction]] = [((), sc)]
                for ct, leg in zip(parts[1:], legs):
                    nxt = []
                    for pref, coeff in terms:
                        moved = self.omega._project_leg(
                            alg.c_act({ct: F(1)}, {leg: F(1)}))
                        for lo, lc in moved.items():
                            nxt.append((pref + (lo,), coeff * lc))
                    terms = nxt
                for ls, coeff in terms:
                    cc = self.form_coord(i, (s, ls))
                    out[cc] = out.get(cc, F(0)) + pc * coeff
        return {c: x for c, x in out.items() if x}

    def c_act(self, c_elem: Element, v: Vector) -> Vector:
        out: Vector = {}
        for c, x in v.items():
            i, a = self.decode(c)
            for cc, mc in self.c_act_key(c_elem, i, self.keys(i)[a]).items():
                out[cc] = out.get(cc, F(0)) + x * mc
        return {c: x for c, x in out.items() if x}


def _split(cd: Coalgebra, elem: Element, parts: int) -> Dict[tuple, Fraction]:
    """Iterated coproduct with tuple keys of the requested length."""
    if parts == 1:
        return {(k,): v for k, v in elem.items()}
    out = cd.iterated_coproduct(elem, parts - 1)
    return {(k if isinstance(k, tuple) else (k,)): v for k, v in out.items()}


def _vec_sub(u: Vector, v: Vector) -> Vector:
    out = dict(u)
    for c, x in v.items():
        out[c] = out.get(c, F(0)) - x
    return {c: x for c, x in out.items() if x}


def build_extension(a: ModuleAlgebra, n_max: int,
                    h: Optional[HopfAlgebra] = None,
                    c=None) -> UniversalExtension:
    """Build and validate the order-n_max thickening of A.

    Checks, exactly and on every basis element: associativity of the
    curvature-corrected product inside the truncation window, neutrality
    of the unit, membership of the multiplicativity defect of the
    block-zero inclusion in the ideal, and (when a coalgebra action is
    supplied) compatibility of the diagonal action with the product --
    the last failure raises :class:`ActionExtensionFailure`.
    """
    cd = c.coalgebra if isinstance(c, ModuleCoalgebra) else c
    omega = build_omega(a, h, None, max_degree=2 * (n_max + 1), reduced=True)
    ext = UniversalExtension(algebra=a, hopf=h, coalgebra=cd, omega=omega,
                             n_max=n_max)
    one = ext.iota(a.unit_element())
    basis = [(i, loc) for i in range(ext.top_block + 1)
             for loc in range(ext.block_dim(i))]
    units = []
    for i, loc in basis:
        e = {ext.coord(i, loc): F(1)}
        if ext.mul(one, e) != e or ext.mul(e, one) != e:
            units.append((i, loc))
    if units:
        raise IdentityFailure(f"unit fails on {units[:3]}")
    for bi in basis:
        x = {ext.coord(*bi): F(1)}
        for bj in basis:
            y = {ext.coord(*bj): F(1)}
            xy = ext.mul(x, y)
            for bk in basis:
                z = {ext.coord(*bk): F(1)}
                if ext.mul(xy, z) != ext.mul(x, ext.mul(y, z)):
                    raise IdentityFailure(
                        f"product not associative at {(bi, bj, bk)}")
    for ai in range(a.dim):
        for aj in range(a.dim):
            defect = _vec_sub(
                ext.mul(ext.iota({ai: F(1)}), ext.iota({aj: F(1)})),
                ext.iota(a.mul({ai: F(1)}, {aj: F(1)})))
            if not ext.in_ideal_power(defect, 1):
                raise IdentityFailure(
                    f"inclusion defect escapes the ideal at {(ai, aj)}")
    if cd is not None and a.c_action is not None:
        for ci in range(cd.dim):
            for bi in basis:
                x = {ext.coord(*bi): F(1)}
                for bj in basis:
                    y = {ext.coord(*bj): F(1)}
                    lhs = ext.c_act({ci: F(1)}, ext.mul(x, y))
                    rhs: Vector = {}
                    for (c1, c2), dc in cd.delta_elem({ci: F(1)}).items():
                        part = ext.mul(ext.c_act({c1: F(1)}, x),
                                       ext.c_act({c2: F(1)}, y))
                        for cc, v in part.items():
                            rhs[cc] = rhs.get(cc, F(0)) + dc * v
                    rhs = {cc: v for cc, v in rhs.items() if v}
                    if lhs != rhs:
                        raise ActionExtensionFailure((ci, bi, bj))
    return ext


# ---------------------------------------------------------------------------
# traces on the thickening
# ---------------------------------------------------------------------------

def _twist_vec(ext: UniversalExtension, m: Optional[SAYDModule],
               mi: int, v: Vector) -> List[Tuple[int, Vector, Fraction]]:
    """m (x) . -> (m^{(0)}, antipode-inverse twisted vector, coeff)."""
    if m is None:
        return [(mi, v, F(1))]
    out = []
    for (hm, m0), cm in m.coact({mi: F(1)}).items():
        sh = ext.hopf.apply_antipode_inv({hm: F(1)})
        moved = ext.h_act(sh, v)
        if moved:
            out.append((m0, moved, cm))
    return out


def _trace_relations(ext: UniversalExtension, coords: List[int],
                     left_blocks: Sequence[int],
                     h: Optional[HopfAlgebra],
                     m: Optional[SAYDModule]) -> Tuple[int, List[Vector]]:
    """Relation span for trace functionals on M (x)_H (selected coords).

    ``coords`` lists the retained thickening coordinates (a quotient or
    ideal window); ``left_blocks`` restricts the left factor of the
    commutators.  Products are computed in the full thickening and then
    restricted to the window, which is exact because block degrees only
    grow.
    """
    sel = {c: i for i, c in enumerate(coords)}
    mdim = m.dim if m is not None else 1
    amb = mdim * len(coords)

    def place(mi: int, v: Vector, out: Vector, scale: Fraction) -> None:
        for c, x in v.items():
            if c in sel:
                cc = mi * len(coords) + sel[c]
                out[cc] = out.get(cc, F(0)) + scale * x

    rels: List[Vector] = []
    if m is not None:
        for hi in range(h.dim):
            for mi in range(mdim):
                mh = m.act({mi: F(1)}, {hi: F(1)})
                for c in coords:
                    i, a = ext.decode(c)
                    rel: Vector = {}
                    for mk, mc in mh.items():
                        place(mk, {c: F(1)}, rel, mc)
                    place(mi, ext.h_act({hi: F(1)}, {c: F(1)}), rel, F(-1))
                    rel = {k: v for k, v in rel.items() if v}
                    if rel:
                        rels.append(rel)
    all_coords = list(range(ext.dim))
    for mi in range(mdim):
        for cx in all_coords:
            if ext.decode(cx)[0] not in left_blocks:
                continue
            x = {cx: F(1)}
            for cr in all_coords:
                r = {cr: F(1)}
                rel = {}
                place(mi, ext.mul(x, r), rel, F(1))
                for m0, moved, cm in _twist_vec(ext, m, mi, r):
                    place(m0, ext.mul(moved, x), rel, -cm)
                rel = {k: v for k, v in rel.items() if v}
                if rel:
                    rels.append(rel)
    return amb, rels


def even_trace_relations(ext: UniversalExtension, n: int,
                         h: Optional[HopfAlgebra] = None,
                         m: Optional[SAYDModule] = None
                         ) -> Tuple[int, List[Vector]]:
    """Relations for order-n traces on M (x)_H R / I^{n+1}."""
    coords = list(range(ext.offsets[n + 1]))
    return _trace_relations(ext, coords, range(ext.top_block + 1), h, m)


def odd_trace_relations(ext: UniversalExtension, n: int,
                        h: Optional[HopfAlgebra] = None,
                        m: Optional[SAYDModule] = None
                        ) -> Tuple[int, List[Vector]]:
    """Relations for order-n traces on M (x)_H I^{n+1}."""
    coords = list(range(ext.offsets[n + 1], ext.dim))
    return _trace_relations(ext, coords, range(ext.top_block + 1), h, m)


def _functional_basis(amb: int, rels: List[Vector]) -> Subspace:
    rows = [{(i, c): v for c, v in rel.items()}
            for i, rel in enumerate(rels)]
    entries: Dict[Tuple[int, int], Fraction] = {}
    for row in rows:
        entries.update(row)
    return kernel_basis(SparseMatrix(len(rels), amb, entries))


def even_trace_basis(ext: UniversalExtension, n: int,
                     h: Optional[HopfAlgebra] = None,
                     m: Optional[SAYDModule] = None) -> Subspace:
    amb, rels = even_trace_relations(ext, n, h, m)
    return _functional_basis(amb, rels)


def odd_trace_basis(ext: UniversalExtension, n: int,
                    h: Optional[HopfAlgebra] = None,
                    m: Optional[SAYDModule] = None) -> Subspace:
    amb, rels = odd_trace_relations(ext, n, h, m)
    return _functional_basis(amb, rels)


def closed_trace_relations(om: OmegaBundle, n: int) -> Tuple[int, List[Vector]]:
    """Relations for degree-n closed graded traces on forms over A."""
    rels = list(om.rel_coeff(n).basis.columns())
    rels += list(om.rel_natural(n, graded=True).basis.columns())
    if n >= 1:
        d = om.d_mat(n - 1)
        if d is None:
            raise ValueError("the form bundle is too shallow for degree "
                             f"{n} closed traces")
        rels += list(d.columns())
    return om.dim(n), rels


def closed_trace_basis(om: OmegaBundle, n: int) -> Subspace:
    amb, rels = closed_trace_relations(om, n)
    return _functional_basis(amb, rels)


def check_trace(tau: Vector, amb: int, rels: List[Vector]) -> None:
    for rel in rels:
        val = sum((tau.get(c, F(0)) * v for c, v in rel.items()), F(0))
        if val:
            raise TraceInvalid("functional does not vanish on the "
                               "relation span")


# ---------------------------------------------------------------------------
# evaluation of generator words on bar tensors
# ---------------------------------------------------------------------------

@dataclass
class RhoSharp:
    """Word-by-word evaluation matrices A^{(x) deg} -> thickening."""

    ext: UniversalExtension
    _letters: Dict[tuple, SparseMatrix] = field(default_factory=dict,
                                                repr=False)
    _words: Dict[tuple, SparseMatrix] = field(default_factory=dict,
                                              repr=False)

    def letter_mat(self, letter: Tuple[int, int]) -> SparseMatrix:
        if letter in self._letters:
            return self._letters[letter]
        ext = self.ext
        a = ext.algebra
        kind, ci = letter
        cols: List[Vector] = []
        if kind == wl.I:
            for ai in range(a.dim):
                cols.append(ext.iota(a.c_act({ci: F(1)}, {ai: F(1)})))
        else:
            cd = ext.coalgebra
            for ai in range(a.dim):
                for aj in range(a.dim):
                    v: Vector = {}
                    for (c1, c2), dc in cd.delta_elem({ci: F(1)}).items():
                        part = ext.mul(
                            ext.iota(a.c_act({c1: F(1)}, {ai: F(1)})),
                            ext.iota(a.c_act({c2: F(1)}, {aj: F(1)})))
                        for cc, x in part.items():
                            v[cc] = v.get(cc, F(0)) + dc * x
                    low = ext.iota(a.c_act({ci: F(1)},
                                           a.mul({ai: F(1)}, {aj: F(1)})))
                    v = _vec_sub(v, low)
                    if not ext.in_ideal_power(v, 1):
                        raise CurvatureEscape((letter, ai, aj))
                    cols.append(v)
        mat = SparseMatrix.from_columns(ext.dim, cols)
        self._letters[letter] = mat
        return mat

    def mat(self, word: tuple) -> SparseMatrix:
        """Evaluation matrix of a word; the bar arity is its degree."""
        if word in self._words:
            return self._words[word]
        ext = self.ext
        adim = ext.algebra.dim
        mat: Optional[SparseMatrix] = None
        arity = 0
        for letter in word:
            lm = self.letter_mat(letter)
            lar = 1 if letter[0] == wl.I else 2
            if mat is None:
                mat, arity = lm, lar
                continue
            cols = []
            for u in range(adim ** arity):
                left = mat.column(u)
                for v in range(adim ** lar):
                    cols.append(ext.mul(left, lm.column(v)))
            mat = SparseMatrix.from_columns(ext.dim, cols)
            arity += lar
        self._words[word] = mat
        return mat

    def verify(self, words: Sequence[tuple]) -> List[str]:
        """Ideal membership and split-multiplicativity on given words."""
        ext = self.ext
        adim = ext.algebra.dim
        bad: List[str] = []
        for word in words:
            mat = self.mat(word)
            k = wl.w_count(word)
            for j in range(mat.cols):
                if not ext.in_ideal_power(mat.column(j), k):
                    bad.append(f"{word} escapes ideal power {k}")
                    break
            for cut in range(1, len(word)):
                left, right = self.mat(word[:cut]), self.mat(word[cut:])
                la = wl.word_degree(word[:cut])
                ra = wl.word_degree(word[cut:])
                for u in range(adim ** la):
                    for v in range(adim ** ra):
                        got = mat.column(u * adim ** ra + v)
                        want = ext.mul(left.column(u), right.column(v))
                        if got != want:
                            bad.append(f"{word} fails the split at {cut}")
                            break
                    else:
                        continue
                    break
        return bad


# ---------------------------------------------------------------------------
# cup products with traces
# ---------------------------------------------------------------------------

def _masked_cocycle(masks: Dict[int, List[int]], quots, cx: GradedComplex,
                    p: int, x: Vector) -> Tuple[Vector, Vector]:
    """Project an ambient vector into a masked quotient complex and check
    closedness; returns the masked vector and its quotient projection."""
    sel = {c: i for i, c in enumerate(masks[p])}
    xm: Vector = {}
    for c, v in x.items():
        if c not in sel:
            raise NotACocycle("representative supported outside the window")
        xm[sel[c]] = v
    pr = quots[p].project(xm)
    d = cx.diff.get(p)
    if d is not None and d.apply(pr):
        raise NotACocycle(f"representative is not closed in degree {p}")
    return xm, pr


def _check_quotient_cocycle(qc: QuotientComplex, p: int, x: Vector) -> Vector:
    return _masked_cocycle(qc.masks, qc.quots, qc.complex, p, x)[0]


def _pair_with_trace(ext: UniversalExtension, rho: RhoSharp,
                     bundle: WeilBundle, tau: Vector,
                     coords: List[int], x: Vector, p: int) -> Vector:
    """chi(a_1 ... a_p) = tau(rho(x)(symmetrized bar tensor))."""
    sel = {c: i for i, c in enumerate(coords)}
    adim = ext.algebra.dim
    chi: Vector = {}
    for coord, coeff in x.items():
        mi, word = bundle.uncoord(p, coord)
        mat = rho.mat(word)
        for (r, col), v in mat.entries.items():
            if r in sel:
                tv = tau.get(mi * len(coords) + sel[r], F(0))
                if tv:
                    chi[col] = chi.get(col, F(0)) + coeff * v * tv
    chi = {c: v for c, v in chi.items() if v}
    bar = BarBundle(ext.algebra, p)
    return bar.n_mat(p).transpose().apply(chi)


def cup_even(ext: UniversalExtension, rho: RhoSharp, bundle: WeilBundle,
             n: int, tau: Vector, x: Vector, p: int,
             tower: Optional[QuotientComplex] = None,
             h: Optional[HopfAlgebra] = None,
             m: Optional[SAYDModule] = None) -> Vector:
    """Pair an order-n trace with a degree-p tower cocycle.

    The output is a cyclic cochain of degree p - 1 on A, given in bar
    tensor coordinates on A^{(x) p}.
    """
    amb, rels = even_trace_relations(ext, n, h, m)
    check_trace(tau, amb, rels)
    if tower is None:
        tower = wl.tower_complex(bundle, n)
    _check_quotient_cocycle(tower, p, x)
    coords = list(range(ext.offsets[n + 1]))
    return _pair_with_trace(ext, rho, bundle, tau, coords, x, p)


def cup_odd(ext: UniversalExtension, rho: RhoSharp, bundle: WeilBundle,
            n: int, tau: Vector, x: Vector, p: int,
            tail: Optional[QuotientComplex] = None,
            h: Optional[HopfAlgebra] = None,
            m: Optional[SAYDModule] = None) -> Vector:
    """Pair an order-n ideal trace with a degree-p tail cocycle."""
    amb, rels = odd_trace_relations(ext, n, h, m)
    check_trace(tau, amb, rels)
    if tail is None:
        tail = wl.ideal_tail_complex(bundle, n + 1)
    _check_quotient_cocycle(tail, p, x)
    coords = list(range(ext.offsets[n + 1], ext.dim))
    return _pair_with_trace(ext, rho, bundle, tau, coords, x, p)


def plain_cocyclic(a: ModuleAlgebra, max_degree: int) -> CocyclicModuleData:
    """The ordinary cyclic cochain complex of A (trivial coefficients)."""
    from . import library as lib
    from .cyclic import build_algebra_cocyclic
    h0 = lib.trivial_hopf()
    ident = [[F(1) if i == j else F(0) for j in range(a.dim)]
             for i in range(a.dim)]
    plain = ModuleAlgebra(dim=a.dim, mu=a.mu, unit=a.unit, h_action=[ident],
                          names=a.names, degrees=a.degrees)
    return build_algebra_cocyclic(h0, plain, lib.sayd_trivial(h0), max_degree)


def is_cyclic_cocycle(data: CocyclicModuleData, q: int, chi: Vector) -> bool:
    lam = data.tau[q].scale(F(-1) ** q)
    if lam.apply(chi) != chi:
        return False
    b = data.hochschild_b(q)
    return b is None or not b.apply(chi)


def cyclic_coboundary_witness(data: CocyclicModuleData, q: int, chi: Vector):
    """A cyclic cochain psi with b(psi) = chi, or INCONSISTENT."""
    if not chi:
        return []
    if q == 0:
        return INCONSISTENT
    lam = data.tau[q - 1].scale(F(-1) ** (q - 1))
    incl = kernel_basis(SparseMatrix.identity(data.dims[q - 1]) - lam).basis
    return solve(data.hochschild_b(q - 1) @ incl, chi)


# ---------------------------------------------------------------------------
# cotraces on the coalgebra side
# ---------------------------------------------------------------------------

def _cotrace_space(c_mod: ModuleCoalgebra, m_mod: SAYDModule,
                   m_deg: int) -> TensorSpace:
    cd = c_mod.coalgebra
    return TensorSpace([m_mod.dim] + [cd.dim] * (m_deg + 1))


def _counit_leg_rows(c_mod: ModuleCoalgebra, m_mod: SAYDModule,
                     m_deg: int) -> List[Vector]:
    """Constraints forcing each leg past the first into ker(counit)."""
    cd = c_mod.coalgebra
    space = _cotrace_space(c_mod, m_mod, m_deg)
    rows: List[Vector] = []
    for t in range(1, m_deg + 1):
        small = TensorSpace([m_mod.dim] + [cd.dim] * m_deg)
        mats: Dict[int, Vector] = {}
        for j in range(space.size):
            multi = space.multi(j)
            eps = cd.counit[multi[1 + t]]
            if eps:
                out = multi[:1 + t] + multi[2 + t:]
                r = small.index(out)
                mats.setdefault(r, {})[j] = eps
        rows.extend(mats.values())
    return rows


def _boundary_rows(c_mod: ModuleCoalgebra, m_mod: SAYDModule,
                   m_deg: int) -> List[Vector]:
    """Constraints expressing closedness under the counit contraction of
    the first leg (the codifferential lowering chain degree by one)."""
    if m_deg == 0:
        return []
    cd = c_mod.coalgebra
    space = _cotrace_space(c_mod, m_mod, m_deg)
    small = TensorSpace([m_mod.dim] + [cd.dim] * m_deg)
    mats: Dict[int, Vector] = {}
    for j in range(space.size):
        multi = space.multi(j)
        eps = cd.counit[multi[1]]
        if eps:
            r = small.index(multi[:1] + multi[2:])
            mats.setdefault(r, {})[j] = eps
    return list(mats.values())


def embed_cotrace(bundle: WeilBundle, c_mod: ModuleCoalgebra,
                  m_mod: SAYDModule, xi: Vector, m_deg: int) -> Vector:
    """A degree-m chain on C as a word of degree-1 letters, degree m+1."""
    space = _cotrace_space(c_mod, m_mod, m_deg)
    out: Vector = {}
    for j, v in xi.items():
        multi = space.multi(j)
        word = tuple((wl.I, t) for t in multi[1:])
        out[bundle.coord(multi[0], word)] = v
    return out


def cotrace_check(c_mod: ModuleCoalgebra, m_mod: SAYDModule, xi: Vector,
                  m_deg: int, bundle: Optional[WeilBundle] = None) -> None:
    """Validate a cotrace; raises :class:`CotraceInvalid` with the reason.

    Degree 0 uses the intrinsic symmetry condition (the twisted flip of
    the coproduct fixes the chain).  Higher degrees are validated
    operationally: the embedded word of degree-1 letters must be closed
    in the w-count-zero piece complex (the cobar differential modulo
    relations and exact forms), which is the condition the class
    comparison uses.
    """
    cd = c_mod.coalgebra
    space = _cotrace_space(c_mod, m_mod, m_deg)
    for row in _counit_leg_rows(c_mod, m_mod, m_deg):
        if sum((xi.get(c, F(0)) * v for c, v in row.items()), F(0)):
            raise CotraceInvalid("a leg is not in the counit kernel")
    for row in _boundary_rows(c_mod, m_mod, m_deg):
        if sum((xi.get(c, F(0)) * v for c, v in row.items()), F(0)):
            raise CotraceInvalid("the chain is not closed")
    if m_deg == 0:
        lhs: Vector = {}
        rhs: Vector = {}
        big = TensorSpace([m_mod.dim, cd.dim, cd.dim])
        for j, v in xi.items():
            mi, c0 = space.multi(j)
            for (c1, c2), dc in cd.delta_elem({c0: F(1)}).items():
                rhs_key = big.index((mi, c1, c2))
                rhs[rhs_key] = rhs.get(rhs_key, F(0)) + v * dc
                for (hm, m0), cm in m_mod.coact({mi: F(1)}).items():
                    for k, ca in c_mod.act({hm: F(1)}, {c1: F(1)}).items():
                        key = big.index((m0, c2, k))
                        lhs[key] = lhs.get(key, F(0)) + v * dc * cm * ca
        if ({k: v for k, v in lhs.items() if v}
                != {k: v for k, v in rhs.items() if v}):
            raise CotraceInvalid("the twisted coproduct flip does not "
                                 "fix the chain")
        return
    if bundle is None:
        raise ValueError("degrees >= 1 need the word bundle for the "
                         "cocycle condition")
    piece0 = wl.graded_piece_complexes(bundle, 0)
    try:
        _masked_cocycle(piece0.masks, piece0.a_quots, piece0.a_complex,
                        m_deg + 1,
                        embed_cotrace(bundle, c_mod, m_mod, xi, m_deg))
    except NotACocycle as exc:
        raise CotraceInvalid(str(exc))


def cotrace_basis(c_mod: ModuleCoalgebra, m_mod: SAYDModule, m_deg: int,
                  bundle: WeilBundle) -> Subspace:
    """All chains passing :func:`cotrace_check`, as a subspace."""
    space = _cotrace_space(c_mod, m_mod, m_deg)
    rows = _counit_leg_rows(c_mod, m_mod, m_deg)
    rows += _boundary_rows(c_mod, m_mod, m_deg)
    if m_deg == 0:
        cd = c_mod.coalgebra
        big = TensorSpace([m_mod.dim, cd.dim, cd.dim])
        mats: Dict[int, Vector] = {}
        for j in range(space.size):
            mi, c0 = space.multi(j)
            for (c1, c2), dc in cd.delta_elem({c0: F(1)}).items():
                row = mats.setdefault(big.index((mi, c1, c2)), {})
                row[j] = row.get(j, F(0)) + dc
                for (hm, m0), cm in m_mod.coact({mi: F(1)}).items():
                    for k, ca in c_mod.act({hm: F(1)}, {c1: F(1)}).items():
                        row = mats.setdefault(big.index((m0, c2, k)), {})
                        row[j] = row.get(j, F(0)) - dc * cm * ca
        rows += [r for r in mats.values() if any(r.values())]
    else:
        piece0 = wl.graded_piece_complexes(bundle, 0)
        p = m_deg + 1
        sel = {c: i for i, c in enumerate(piece0.masks[p])}
        d = piece0.a_complex.diff.get(p)
        comp = (d @ piece0.a_quots[p].projection) if d is not None else None
        if comp is not None:
            mats: Dict[int, Vector] = {}
            for j in range(space.size):
                multi = space.multi(j)
                word = tuple((wl.I, t) for t in multi[1:])
                amb = bundle.coord(multi[0], word)
                for r, v in comp.column(sel[amb]).items():
                    mats.setdefault(r, {})[j] = v
            rows += list(mats.values())
    entries: Dict[Tuple[int, int], Fraction] = {}
    for i, row in enumerate(rows):
        for c, v in row.items():
            entries[(i, c)] = v
    return kernel_basis(SparseMatrix(len(rows), space.size, entries))


def _flip_rows_chain1(hopf: HopfAlgebra, c_mod: ModuleCoalgebra,
                      m_mod: SAYDModule) -> List[Vector]:
    """Constraints for graded cocommutativity of a degree-one chain.

    The coproduct of c0 (x) k1 splits into a 0 (x) 1 part
    c0' (x) (c0'' (x) k1) and a 1 (x) 0 part
    (c0 (x) k1') (x) k1'' - (c0' (x) c0'') (x) k1; the chain is
    cocommutative when moving the left part past the coefficient (with
    the coaction twist) reproduces the same split.  Both crossing
    degrees are 0 * 1, so no Koszul sign appears.
    """
    cd = c_mod.coalgebra
    space = _cotrace_space(c_mod, m_mod, 1)
    big = TensorSpace([m_mod.dim, cd.dim, cd.dim, cd.dim])
    mats: Dict[int, Vector] = {}

    def put(tag: int, mi: int, x: int, y: int, z: int, j: int,
            v: Fraction) -> None:
        row = mats.setdefault(tag * big.size + big.index((mi, x, y, z)), {})
        row[j] = row.get(j, F(0)) + v

    for j in range(space.size):
        mi, c0, k1 = space.multi(j)
        d0 = cd.delta_elem({c0: F(1)})
        d1 = cd.delta_elem({k1: F(1)})
        # the split itself: tag 0 is 0 (x) 1, tag 1 is 1 (x) 0
        for (x, y), dc in d0.items():
            put(0, mi, x, y, k1, j, dc)
            put(1, mi, x, y, k1, j, -dc)
        for (x, y), dk in d1.items():
            put(1, mi, c0, x, y, j, dk)
        # the flip, with the left part twisted through the coaction
        for (hm, m0), cm in m_mod.coact({mi: F(1)}).items():
            for (x, y), dc in d0.items():
                # 0 (x) 1 flips into a 1 (x) 0 part
                for z, ca in c_mod.act({hm: F(1)}, {x: F(1)}).items():
                    put(1, m0, y, k1, z, j, -dc * cm * ca)
                # the correction 1 (x) 0 part flips into 0 (x) 1
                for (h1, h2), dh in hopf.delta_elem({hm: F(1)}).items():
                    for x2, cx in c_mod.act({h1: F(1)}, {x: F(1)}).items():
                        for y2, cy in c_mod.act({h2: F(1)},
                                                {y: F(1)}).items():
                            put(0, m0, k1, x2, y2, j, dc * cm * dh * cx * cy)
            for (x, y), dk in d1.items():
                for (h1, h2), dh in hopf.delta_elem({hm: F(1)}).items():
                    for c2, cx in c_mod.act({h1: F(1)}, {c0: F(1)}).items():
                        for x2, cy in c_mod.act({h2: F(1)},
                                                {x: F(1)}).items():
                            put(0, m0, y, c2, x2, j, -dk * cm * dh * cx * cy)
    return [r for r in mats.values() if any(r.values())]


def cocommutative_cotrace_basis(hopf: HopfAlgebra, c_mod: ModuleCoalgebra,
                                m_mod: SAYDModule, m_deg: int) -> Subspace:
    """Chains with counit-kernel legs, closed and graded cocommutative.

    This is the condition under which the direct pairing of
    :func:`khalkhali_cup` produces a cyclic cocycle; it is strictly
    stronger than :func:`cotrace_check` for chain degree one.  Only
    degrees zero and one are supported.
    """
    space = _cotrace_space(c_mod, m_mod, m_deg)
    rows = _counit_leg_rows(c_mod, m_mod, m_deg)
    rows += _boundary_rows(c_mod, m_mod, m_deg)
    if m_deg == 0:
        cd = c_mod.coalgebra
        big = TensorSpace([m_mod.dim, cd.dim, cd.dim])
        mats: Dict[int, Vector] = {}
        for j in range(space.size):
            mi, c0 = space.multi(j)
            for (c1, c2), dc in cd.delta_elem({c0: F(1)}).items():
                row = mats.setdefault(big.index((mi, c1, c2)), {})
                row[j] = row.get(j, F(0)) + dc
                for (hm, m0), cm in m_mod.coact({mi: F(1)}).items():
                    for k, ca in c_mod.act({hm: F(1)}, {c1: F(1)}).items():
                        row = mats.setdefault(big.index((m0, c2, k)), {})
                        row[j] = row.get(j, F(0)) - dc * cm * ca
        rows += [r for r in mats.values() if any(r.values())]
    elif m_deg == 1:
        rows += _flip_rows_chain1(hopf, c_mod, m_mod)
    else:
        raise NotImplementedError("chain degrees >= 2 are not supported")
    entries: Dict[Tuple[int, int], Fraction] = {}
    for i, row in enumerate(rows):
        for c, v in row.items():
            entries[(i, c)] = v
    return kernel_basis(SparseMatrix(len(rows), space.size, entries))


# ---------------------------------------------------------------------------
# the convolution calculus behind the degree-one direct pairing
# ---------------------------------------------------------------------------
#
# An element of the convolution algebra is kept as (f0, f1, parity):
# f0 maps coalgebra indices to forms, f1 maps pairs (c0, k1) to forms.
# Generators a act through the coalgebra action, the differential is
# d after the map minus a signed counit contraction before it, and the
# product convolves through the coproduct of c (x) k chains (with its
# 1 (x) 0 correction term and a Koszul sign for odd right factors).

_ConvElem = Tuple[Dict[int, Dict[tuple, Fraction]],
                  Dict[Tuple[int, int], Dict[tuple, Fraction]], int]


def _form_acc(out: Dict[tuple, Fraction], key: tuple, v: Fraction) -> None:
    out[key] = out.get(key, F(0)) + v
    if not out[key]:
        del out[key]


def _form_d(om: OmegaBundle, form: Dict[tuple, Fraction]
            ) -> Dict[tuple, Fraction]:
    out: Dict[tuple, Fraction] = {}
    for (s, legs), v in form.items():
        for (_, s2, l2), c in om.d_elem((0, s, legs)).items():
            _form_acc(out, (s2, l2), v * c)
    return out


def _form_mul(om: OmegaBundle, x: Dict[tuple, Fraction],
              y: Dict[tuple, Fraction]) -> Dict[tuple, Fraction]:
    out: Dict[tuple, Fraction] = {}
    for k1, v1 in x.items():
        for k2, v2 in y.items():
            for k, c in om.form_mul(k1, k2).items():
                _form_acc(out, k, v1 * v2 * c)
    return out


def _conv_tau(om: OmegaBundle, cd, at: int) -> _ConvElem:
    alg = om.algebra
    f0 = {}
    for c in range(cd.dim):
        acted = alg.c_act({c: F(1)}, {at: F(1)})
        f0[c] = {(i, ()): v for i, v in acted.items() if v}
    return (f0, {}, 0)


def _conv_d(om: OmegaBundle, cd, f: _ConvElem) -> _ConvElem:
    f0, f1, par = f
    g0 = {c: _form_d(om, form) for c, form in f0.items()}
    g1 = {key: _form_d(om, form) for key, form in f1.items()}
    sgn = -F(-1) ** par
    for c0 in range(cd.dim):
        eps = cd.counit[c0]
        if not eps:
            continue
        for k1, form in f0.items():
            tgt = g1.setdefault((c0, k1), {})
            for k, v in form.items():
                _form_acc(tgt, k, sgn * eps * v)
    return (g0, g1, (par + 1) % 2)


def _conv_mul(om: OmegaBundle, cd, f: _ConvElem, g: _ConvElem) -> _ConvElem:
    f0, f1, pf = f
    g0, g1, pg = g
    h0: Dict[int, Dict[tuple, Fraction]] = {}
    h1: Dict[Tuple[int, int], Dict[tuple, Fraction]] = {}
    for c in range(cd.dim):
        form: Dict[tuple, Fraction] = {}
        for (c1, c2), dc in cd.delta_elem({c: F(1)}).items():
            if c1 in f0 and c2 in g0:
                for k, v in _form_mul(om, f0[c1], g0[c2]).items():
                    _form_acc(form, k, dc * v)
        h0[c] = form
    koszul = F(-1) ** pg
    for c0 in range(cd.dim):
        dc0 = cd.delta_elem({c0: F(1)})
        for k1 in range(cd.dim):
            form = {}
            for (c1, c2), dc in dc0.items():
                if c1 in f0 and (c2, k1) in g1:
                    for k, v in _form_mul(om, f0[c1], g1[(c2, k1)]).items():
                        _form_acc(form, k, dc * v)
            for (ka, kb), dk in cd.delta_elem({k1: F(1)}).items():
                if (c0, ka) in f1 and kb in g0:
                    for k, v in _form_mul(om, f1[(c0, ka)], g0[kb]).items():
                        _form_acc(form, k, koszul * dk * v)
            for (c1, c2), dc in dc0.items():
                if (c1, c2) in f1 and k1 in g0:
                    for k, v in _form_mul(om, f1[(c1, c2)], g0[k1]).items():
                        _form_acc(form, k, -koszul * dc * v)
            if form:
                h1[(c0, k1)] = form
    return (h0, h1, (pf + pg) % 2)


# ---------------------------------------------------------------------------
# the direct pairing with a closed trace
# ---------------------------------------------------------------------------

def khalkhali_cup(a: ModuleAlgebra, c_mod: ModuleCoalgebra,
                  m_mod: SAYDModule, om: OmegaBundle, integral: Vector,
                  xi: Vector, m_deg: int, n_deg: int,
                  bundle: Optional[WeilBundle] = None) -> Vector:
    """Pair a degree-m cotrace with a degree-n closed trace directly.

    The bar tensor a_1 (x) ... (x) a_{m+n+1} is sent to the form
    a_1 da_2 ... da_{m+n+1}, evaluated against the cotrace chain through
    the coalgebra action on A, and integrated.  Chain degree zero reads
    the coproduct splits of the single chain slot; chain degree one
    folds the tensor through the convolution calculus and reads off the
    component at the chain, which demands the stronger cocommutativity
    of :func:`cocommutative_cotrace_basis` (the composite functional on
    forms is then a closed graded trace, making the result cyclic).
    Chain degrees above one are not implemented.
    """
    if m_deg == 0:
        cotrace_check(c_mod, m_mod, xi, m_deg, bundle)
    elif m_deg == 1:
        if om.hopf is None:
            raise ValueError("the form bundle does not carry the Hopf "
                             "algebra needed for the chain validation")
        flip = cocommutative_cotrace_basis(om.hopf, c_mod, m_mod, 1)
        if solve(flip.basis, xi) is INCONSISTENT:
            raise CotraceInvalid("the chain is not graded cocommutative "
                                 "and closed")
    else:
        raise NotImplementedError("cotrace degrees >= 2 are not supported")
    amb, rels = closed_trace_relations(om, n_deg)
    check_trace(integral, amb, rels)
    cd = c_mod.coalgebra
    alg = om.algebra
    total = m_deg + n_deg
    adim = alg.dim
    space = _cotrace_space(c_mod, m_mod, m_deg)
    bar = TensorSpace([adim] * (total + 1))
    chi: Vector = {}

    def integrate(mi: int, term: Dict[tuple, Fraction]) -> Fraction:
        val = F(0)
        for (s, legs), c in term.items():
            if c:
                val += c * integral.get(om.coord((mi, s, legs)), F(0))
        return val

    def leg_elems(parts: Sequence[int], tensors: Sequence[int]
                  ) -> List[Tuple[Tuple[int, ...], Fraction]]:
        """Expand projected leg actions c^{(t)}(a_t) multilinearly."""
        combos: List[Tuple[Tuple[int, ...], Fraction]] = [((), F(1))]
        for ct, at in zip(parts, tensors):
            moved = om._project_leg(alg.c_act({ct: F(1)}, {at: F(1)}))
            combos = [(pref + (lo,), coeff * lc)
                      for pref, coeff in combos for lo, lc in moved.items()]
        return combos

    if m_deg == 0:
        for j, coeff in xi.items():
            mi, c0 = space.multi(j)
            for col in range(bar.size):
                ts = bar.multi(col)
                val = F(0)
                for parts, pc in _split(cd, {c0: F(1)}, total + 1).items():
                    for s, sc in alg.c_act({parts[0]: F(1)},
                                           {ts[0]: F(1)}).items():
                        for legs, lc in leg_elems(parts[1:], ts[1:]):
                            val += pc * sc * lc * integrate(
                                mi, {(s, legs): F(1)})
                if val:
                    chi[col] = chi.get(col, F(0)) + coeff * val
        return {c: v for c, v in chi.items() if v}
    for col in range(bar.size):
        ts = bar.multi(col)
        f = _conv_tau(om, cd, ts[0])
        for at in ts[1:]:
            f = _conv_mul(om, cd, f, _conv_d(om, cd, _conv_tau(om, cd, at)))
        val = F(0)
        for j, coeff in xi.items():
            mi, c0, k1 = space.multi(j)
            form = f[1].get((c0, k1))
            if form:
                val += coeff * integrate(mi, form)
        if val:
            chi[col] = val
    return chi


# ---------------------------------------------------------------------------
# evaluation of the transgression word on cotraces
# ---------------------------------------------------------------------------

def sigma_eval(bundle: WeilBundle, c_mod: ModuleCoalgebra,
               m_mod: SAYDModule, xi: Vector, m_deg: int,
               n_deg: int) -> Tuple[int, Vector]:
    """Evaluate the degree 2(m+n)+1 transgression word on a cotrace.

    A degree-m chain is consumed letter by letter: degree-1 legs of the
    word eat the chain legs in order, remaining degree-2 letters split
    the coproduct of the available leg.  Supported when either m or n is
    zero (the mixed shuffles are not needed by any shipped instance).
    The result sits in word degree m + 2n + 1.
    """
    cd = c_mod.coalgebra
    space = _cotrace_space(c_mod, m_mod, m_deg)
    p = m_deg + 2 * n_deg + 1
    out: Vector = {}
    if n_deg == 0:
        for j, v in xi.items():
            multi = space.multi(j)
            word = tuple((wl.I, t) for t in multi[1:])
            c = bundle.coord(multi[0], word)
            out[c] = out.get(c, F(0)) + v
    elif m_deg == 0:
        for j, v in xi.items():
            mi, c0 = space.multi(j)
            for parts, pc in _split(cd, {c0: F(1)}, n_deg + 1).items():
                word = ((wl.I, parts[0]),) + tuple(
                    (wl.W, t) for t in parts[1:])
                c = bundle.coord(mi, word)
                out[c] = out.get(c, F(0)) + v * pc
    else:
        raise NotImplementedError("mixed chain/excess degrees are not "
                                  "supported")
    return p, {c: v for c, v in out.items() if v}


@dataclass
class PairingComparison:
    """Both routes to the cyclic class of a cotrace, on one instance."""

    m_deg: int
    n_deg: int
    factor: Fraction
    tower_route: List[Fraction]
    direct_route: List[Fraction]
    match: bool
    ratio: Optional[Fraction]


def compare_pairings(h: HopfAlgebra, c_mod: ModuleCoalgebra,
                     m_mod: SAYDModule, xi: Vector, m_deg: int, n_deg: int,
                     bundle: WeilBundle, data: CocyclicModuleData
                     ) -> PairingComparison:
    """Carry a cotrace through the tower and compare with its own class.

    The transgression-word evaluation lands in degree m + 2n + 1 of the
    level-n tower; the class map brings it back to degree m of the
    cyclic quotient complex, where the cotrace itself has a class.  The
    chase inverts the connecting map n times, each step multiplying by
    (k + 2) / (k + 1), so the evaluated word returns to the cotrace's
    class scaled by the reciprocal of (m + 1) / (m + n + 1): the match
    condition is factor * tower_route == direct_route.
    """
    cotrace_check(c_mod, m_mod, xi, m_deg, bundle)
    p, sv = sigma_eval(bundle, c_mod, m_mod, xi, m_deg, n_deg)
    system = wl.alpha_system(bundle, n_deg, h, c_mod, m_mod, data)
    top = system.pieces[n_deg]
    _, prj = _masked_cocycle(top.masks, top.a_quots, top.a_complex, p, sv)
    cc = top.a_complex.cohomology(p).coords(prj)
    if cc is INCONSISTENT:
        raise NotACocycle("the evaluated word has no class in its "
                          "w-count piece")
    vec = {i: c for i, c in enumerate(cc) if c}
    q = p
    for k in range(n_deg, 0, -1):
        phi = wl.phi_matrix(system.pieces[k - 1], system.pieces[k], q - 2)
        vec = wl.invert_class_matrix(phi).apply(vec)
        q -= 2
    src = system.pieces[0].a_complex.cohomology(q)
    rep_vec: Vector = {}
    for i, c in vec.items():
        for r, v in src.reps[i].items():
            rep_vec[r] = rep_vec.get(r, F(0)) + c * v
    dst = system.lam_complex.cohomology(m_deg)
    lhs_co = dst.coords(system.sigma[q].apply(rep_vec))
    if lhs_co is INCONSISTENT:
        raise NotACocycle("the identified class is not closed in the "
                          "cyclic quotient complex")
    lhs = list(lhs_co)
    cd = c_mod.coalgebra
    space = _cotrace_space(c_mod, m_mod, m_deg)
    coc = quotient(space.size, diagonal_h_relations(
        h, m_mod, c_mod.act, cd.dim, m_deg + 1))
    rhs_co = dst.coords(system.lam_quots[m_deg].project(coc.project(xi)))
    if rhs_co is INCONSISTENT:
        raise CotraceInvalid("the cotrace has no class in the cyclic "
                             "quotient complex")
    rhs = list(rhs_co)
    factor = F(m_deg + 1, m_deg + n_deg + 1)
    ratio: Optional[Fraction] = None
    if any(rhs):
        for a, b in zip(lhs, rhs):
            if b:
                ratio = a / b
                break
        if any(a != ratio * b for a, b in zip(lhs, rhs)):
            ratio = None
    return PairingComparison(m_deg, n_deg, factor, lhs, rhs,
                             [factor * a for a in lhs] == rhs, ratio)


# ---------------------------------------------------------------------------
# the periodicity shift, tower side against module side
# ---------------------------------------------------------------------------

@dataclass
class ShiftComparison:
    """Both realizations of the degree-2 shift, in one basis."""

    q: int
    tower_shift: SparseMatrix
    module_shift: SparseMatrix
    scalar: Optional[Fraction]


def _pad_rows(mat: SparseMatrix, rows: int) -> SparseMatrix:
    return SparseMatrix(rows, mat.cols, dict(mat.entries))


def s_compare(bundle: WeilBundle, h: HopfAlgebra, c_mod: ModuleCoalgebra,
              m_mod: SAYDModule, data: CocyclicModuleData, n: int,
              q: int) -> ShiftComparison:
    """Compare the two degree-2 shift operators on cyclic classes.

    Tower side: invert the level n+1 class map, project to level n, and
    apply the level-n class map; in word degree q + 3 + 2n this shifts
    cyclic degree q to q + 2.  Module side: the two-column inclusion on
    the mixed totalization, conjugated into the same cyclic-quotient
    bases through the invariant subcomplex.  Returns both matrices and
    the scalar relating them when they are proportional (the scalar is
    measured, not normalized away).
    """
    p = q + 3 + 2 * n
    sys_lo = wl.alpha_system(bundle, n, h, c_mod, m_mod, data)
    sys_hi = wl.alpha_system(bundle, n + 1, h, c_mod, m_mod, data)
    a_hi = wl.alpha_matrix(sys_hi, p)     # level n+1 classes -> HC^q
    a_lo = wl.alpha_matrix(sys_lo, p)     # level n classes -> HC^{q+2}
    pim = wl.pi_matrix(bundle, n + 1, p)
    tower_shift = a_lo @ pim @ wl.invert_class_matrix(a_hi)

    b = {k: mat for k, mat in ((k, data.hochschild_b(k)) for k in data.dims)
         if mat is not None}
    incl: Dict[int, SparseMatrix] = {}
    for k, t in data.tau.items():
        lam = t.scale(F(-1) ** k)
        incl[k] = kernel_basis(
            SparseMatrix.identity(data.dims[k]) - lam).basis
    inv_cx = restrict_complex(b, incl, 1)
    mixed = data.mixed_complex()
    tot = totalize_mixed(mixed.dims, mixed.diff, mixed.secondary or {}, 1)

    def bridge(k: int) -> Tuple[SparseMatrix, SparseMatrix]:
        jmat = induced_on_cohomology(
            inv_cx.cohomology(k), tot.cohomology(k),
            _pad_rows(incl[k], tot.dims[k]))
        pmat = induced_on_cohomology(
            inv_cx.cohomology(k), sys_lo.lam_complex.cohomology(k),
            sys_lo.lam_quots[k].projection @ incl[k])
        return jmat, pmat

    j_lo, p_lo = bridge(q)
    j_hi, p_hi = bridge(q + 2)
    from .cyclic import s_shift_matrix
    s_tot = induced_on_cohomology(tot.cohomology(q), tot.cohomology(q + 2),
                                  s_shift_matrix(data, tot, q))
    module_shift = (p_hi @ wl.invert_class_matrix(j_hi) @ s_tot
                    @ j_lo @ wl.invert_class_matrix(p_lo))
    scalar: Optional[Fraction] = None
    if module_shift.entries:
        (r0, c0), v0 = next(iter(sorted(module_shift.entries.items())))
        base = tower_shift.entries.get((r0, c0))
        if base is not None:
            cand = base / v0
            if tower_shift == module_shift.scale(cand):
                scalar = cand
    elif not tower_shift.entries:
        scalar = F(1)
    return ShiftComparison(q, tower_shift, module_shift, scalar)
