"""Universal differential calculus of a module algebra, with coefficients.

Forms of degree k are spanned by a0 da1 ... dak.  Two bases are supported:
the *formal* model adjoins a fresh unit to the algebra for the a0 slot and
keeps full algebra legs (so ``dim = (dim A + 1) * dim A ** k``), while the
*reduced* model of a unital algebra uses the algebra itself in slot zero
and kills the d-leg of the unit (``dim = dim A * (dim A - 1) ** k``).  All
operators (d, b, kappa, B), the coefficient and trace relation spans, the
X-complex and small complex of free algebras, the bar spaces with the
universal cotrace, and the Hodge-filtration levels are built on top of
these bases with exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .complexes import GradedComplex
from .exactla import (DescentFailure, QuotientSpace, SparseMatrix, Subspace,
                      kernel_basis, quotient, rank)
from .structures import Element, HopfAlgebra, ModuleAlgebra, SAYDModule

F = Fraction
Vector = Dict[int, Fraction]
FormKey = Tuple[int, int, Tuple[int, ...]]   # (module index, slot 0, d-legs)
Term = Dict[FormKey, Fraction]


def _acc(out, key, c) -> None:
    if not c:
        return
    v = out.get(key, F(0)) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# the form bundle
# ---------------------------------------------------------------------------

@dataclass
class OmegaBundle:
    """Bases and operators of the differential calculus of an algebra."""

    algebra: ModuleAlgebra
    hopf: Optional[HopfAlgebra]
    module: Optional[SAYDModule]
    max_degree: int
    reduced: bool
    unit_index: Optional[int] = None      # reduced model only
    _mats: Dict[Tuple[str, int], Optional[SparseMatrix]] = field(
        default_factory=dict, repr=False)
    _rels: Dict[Tuple[str, int], Subspace] = field(
        default_factory=dict, repr=False)

    # -- basis bookkeeping --------------------------------------------------

    @property
    def m_dim(self) -> int:
        return self.module.dim if self.module is not None else 1

    @property
    def slot_dim(self) -> int:
        a = self.algebra.dim
        return a if self.reduced else a + 1

    @property
    def legs(self) -> List[int]:
        a = self.algebra.dim
        if self.reduced:
            return [i for i in range(a) if i != self.unit_index]
        return list(range(a))

    def dim(self, k: int) -> int:
        if k < 0 or k > self.max_degree:
            return 0
        return self.m_dim * self.slot_dim * len(self.legs) ** k

    def coord(self, key: FormKey) -> int:
        mi, a0, legs = key
        pos = {v: i for i, v in enumerate(self.legs)}
        idx = mi * self.slot_dim + a0
        for leg in legs:
            idx = idx * len(self.legs) + pos[leg]
        return idx

    def basis(self, k: int):
        from itertools import product
        for mi in range(self.m_dim):
            for a0 in range(self.slot_dim):
                for legs in product(self.legs, repeat=k):
                    yield (mi, a0, legs)

    def vector(self, term: Term) -> Vector:
        return {self.coord(key): c for key, c in term.items() if c}

    def _matrix(self, src: int, dst: int,
                fn: Callable[[FormKey], Term]) -> SparseMatrix:
        entries: Dict[Tuple[int, int], Fraction] = {}
        for key in self.basis(src):
            j = self.coord(key)
            for ko, c in fn(key).items():
                if c:
                    i = self.coord(ko)
                    entries[(i, j)] = entries.get((i, j), F(0)) + c
        return SparseMatrix(self.dim(dst), self.dim(src),
                            {k: v for k, v in entries.items() if v})

    # -- slot and leg arithmetic ---------------------------------------------

    def _slot_to_alg(self, a0: int) -> Optional[Element]:
        """Slot-zero basis vector as an algebra element (None = formal unit)."""
        if self.reduced:
            return {a0: F(1)}
        return None if a0 == 0 else {a0 - 1: F(1)}

    def _alg_to_slot(self, x: Element) -> Dict[int, Fraction]:
        if self.reduced:
            return dict(x)
        return {i + 1: c for i, c in x.items()}

    def _project_leg(self, x: Element) -> Dict[int, Fraction]:
        """Project an algebra element onto the d-leg space."""
        if self.reduced:
            return {i: c for i, c in x.items() if i != self.unit_index}
        return dict(x)

    def _slot_mul_right(self, a0: int, b: Element) -> Dict[int, Fraction]:
        x = self._slot_to_alg(a0)
        if x is None:
            return self._alg_to_slot(b)
        return self._alg_to_slot(self.algebra.mul(x, b))

    def _slot_mul_left(self, a: Element, a0: int) -> Dict[int, Fraction]:
        x = self._slot_to_alg(a0)
        if x is None:
            return self._alg_to_slot(a)
        return self._alg_to_slot(self.algebra.mul(a, x))

    def mul_right(self, a0: int, legs: Tuple[int, ...],
                  b: Element) -> Dict[Tuple[int, Tuple[int, ...]], Fraction]:
        """Right multiplication (a0 da1 ... dak) . b via the Leibniz rule."""
        out: Dict[Tuple[int, Tuple[int, ...]], Fraction] = {}
        if not legs:
            for s, c in self._slot_mul_right(a0, b).items():
                _acc(out, (s, ()), c)
            return out
        v = legs[-1]
        # eta d(v b)
        for k, c in self._project_leg(
                self.algebra.mul({v: F(1)}, b)).items():
            _acc(out, (a0, legs[:-1] + (k,)), c)
        # - (eta v) db
        for (s, ls), c in self.mul_right(a0, legs[:-1], {v: F(1)}).items():
            for bk, bc in self._project_leg(b).items():
                _acc(out, (s, ls + (bk,)), -c * bc)
        return out

    def form_mul(self, f1: Tuple[int, Tuple[int, ...]],
                 f2: Tuple[int, Tuple[int, ...]]
                 ) -> Dict[Tuple[int, Tuple[int, ...]], Fraction]:
        """Product of two basis forms (slot, legs) x (slot, legs)."""
        a0, legs1 = f1
        b0, legs2 = f2
        x = self._slot_to_alg(b0)
        out: Dict[Tuple[int, Tuple[int, ...]], Fraction] = {}
        if x is None:
            out[(a0, legs1 + legs2)] = F(1)
            return out
        for (s, ls), c in self.mul_right(a0, legs1, x).items():
            _acc(out, (s, ls + legs2), c)
        return out

    # -- coefficient twist ---------------------------------------------------

    def _twist_alg(self, m_idx: int, a: Element
                   ) -> List[Tuple[int, Element, Fraction]]:
        """m (x) . -> (m^{(0)}, S^{-1}(m^{(-1)})(a), coeff) triples."""
        if self.module is None:
            return [(m_idx, a, F(1))]
        out = []
        for (hm, m0), cm in self.module.coact({m_idx: F(1)}).items():
            sh = self.hopf.apply_antipode_inv({hm: F(1)})
            for hk, hc in sh.items():
                moved = self.algebra.h_act({hk: F(1)}, a)
                if moved:
                    out.append((m0, moved, cm * hc))
        return out

    # -- operators -----------------------------------------------------------

    def d_elem(self, key: FormKey) -> Term:
        mi, a0, legs = key
        x = self._slot_to_alg(a0)
        out: Term = {}
        if x is None:
            return out
        unit_slot = self.unit_index if self.reduced else 0
        for k, c in self._project_leg(x).items():
            _acc(out, (mi, unit_slot, (k,) + legs), c)
        return out

    def b_elem(self, key: FormKey) -> Term:
        mi, a0, legs = key
        if not legs:
            return {}
        sign = F(-1) ** (len(legs) - 1)
        v = legs[-1]
        out: Term = {}
        for (s, ls), c in self.mul_right(a0, legs[:-1], {v: F(1)}).items():
            _acc(out, (mi, s, ls), sign * c)
        for m0, moved, cm in self._twist_alg(mi, {v: F(1)}):
            for s, c in self._slot_mul_left(moved, a0).items():
                _acc(out, (m0, s, legs[:-1]), -sign * cm * c)
        return out

    def _cached(self, name: str, k: int, build) -> Optional[SparseMatrix]:
        key = (name, k)
        if key not in self._mats:
            self._mats[key] = build()
        return self._mats[key]

    def d_mat(self, k: int) -> Optional[SparseMatrix]:
        if k + 1 > self.max_degree:
            return None
        return self._cached("d", k, lambda: self._matrix(k, k + 1,
                                                         self.d_elem))

    def b_mat(self, k: int) -> SparseMatrix:
        return self._cached("b", k, lambda: self._matrix(k, k - 1,
                                                         self.b_elem))

    def kappa_mat(self, k: int) -> Optional[SparseMatrix]:
        """kappa = id - (d b + b d) on degree k."""
        d = self.d_mat(k)
        if d is None:
            return None
        bd = self.b_mat(k + 1) @ d
        db = (self.d_mat(k - 1) @ self.b_mat(k)) if k > 0 else \
            SparseMatrix.zero(self.dim(k), self.dim(k))
        return SparseMatrix.identity(self.dim(k)) - bd - db

    def connes_b_mat(self, k: int) -> Optional[SparseMatrix]:
        """B = (1 + kappa + ... + kappa^k) d on degree k."""
        d = self.d_mat(k)
        if d is None or self.kappa_mat(k + 1) is None:
            return None
        kp = self.kappa_mat(k + 1)
        total = SparseMatrix.zero(self.dim(k + 1), self.dim(k))
        power = d
        for _ in range(k + 1):
            total = total + power
            power = kp @ power
        return total

    # -- relation spans ------------------------------------------------------

    def _slot_action(self, h_idx: int, a0: int) -> Dict[int, Fraction]:
        x = self._slot_to_alg(a0)
        if x is None:
            return {0: self.hopf.counit[h_idx]}
        return self._alg_to_slot(
            self.algebra.h_act({h_idx: F(1)}, x))

    def _form_action(self, h_idx: int, a0: int,
                     legs: Tuple[int, ...]
                     ) -> Dict[Tuple[int, Tuple[int, ...]], Fraction]:
        """Diagonal H-action on a basis form through the coproduct."""
        parts = self.hopf.iterated_coproduct({h_idx: F(1)}, len(legs))
        out: Dict[Tuple[int, Tuple[int, ...]], Fraction] = {}
        for key, hv in parts.items():
            key = key if isinstance(key, tuple) else (key,)
            for s, sc in self._slot_action(key[0], a0).items():
                terms: List[Tuple[Tuple[int, ...], Fraction]] = [((), sc)]
                for hleg, leg in zip(key[1:], legs):
                    nxt = []
                    for pref, coeff in terms:
                        acted = self._project_leg(self.algebra.h_act(
                            {hleg: F(1)}, {leg: F(1)}))
                        for lo, lc in acted.items():
                            nxt.append((pref + (lo,), coeff * lc))
                    terms = nxt
                for ls, coeff in terms:
                    _acc(out, (s, ls), hv * coeff)
        return out

    def rel_coeff(self, k: int) -> Subspace:
        """m.h (x) x - m (x) h(x): relations of the tensor product over H."""
        key = ("rel_coeff", k)
        if key in self._rels:
            return self._rels[key]
        vectors: List[Vector] = []
        if self.module is not None:
            for hi in range(self.hopf.dim):
                for mi in range(self.m_dim):
                    mh = self.module.act({mi: F(1)}, {hi: F(1)})
                    for _, a0, legs in self._pure_basis(k):
                        term: Term = {}
                        for mk, mc in mh.items():
                            _acc(term, (mk, a0, legs), mc)
                        for (s, ls), c in self._form_action(
                                hi, a0, legs).items():
                            _acc(term, (mi, s, ls), -c)
                        if term:
                            vectors.append(self.vector(term))
        sub = Subspace.from_vectors(self.dim(k), vectors)
        self._rels[key] = sub
        return sub

    def rel_natural(self, k: int, graded: bool = False) -> Subspace:
        """Twisted trace relations m (x) w f - m^{(0)} (x) tw(f) w.

        With ``graded`` the factor f runs over forms of every degree with
        the Koszul sign, which is the span used by the de Rham quotient;
        otherwise f runs over the algebra only.
        """
        key = ("rel_nat_g" if graded else "rel_nat", k)
        if key in self._rels:
            return self._rels[key]
        vectors: List[Vector] = []
        degrees = range(k + 1) if graded else [0]
        for j in degrees:
            for mi in range(self.m_dim):
                for _, a0, legs in self._pure_basis(k - j):
                    for _, b0, blegs in self._pure_basis(j):
                        if not self.reduced and b0 == 0 and not blegs:
                            continue    # the formal unit is central
                        term = self._commutator(mi, (a0, legs), (b0, blegs))
                        if term:
                            vectors.append(self.vector(term))
        sub = Subspace.from_vectors(self.dim(k), vectors)
        self._rels[key] = sub
        return sub

    def _pure_basis(self, k: int):
        for key in self.basis(k):
            if key[0] == 0:
                yield key

    def _commutator(self, mi: int, w: Tuple[int, Tuple[int, ...]],
                    f: Tuple[int, Tuple[int, ...]]) -> Term:
        """m (x) w f - (-1)^{|w||f|} m^{(0)} (x) S^{-1}(m^{(-1)})(f) w."""
        term: Term = {}
        for (s, ls), c in self.form_mul(w, f).items():
            _acc(term, (mi, s, ls), c)
        sign = F(-1) ** (len(w[1]) * len(f[1]))
        if self.module is None:
            fronts = [(mi, {f: F(1)}, F(1))]
        else:
            fronts = []
            for (hm, m0), cm in self.module.coact({mi: F(1)}).items():
                for hk, hc in self.hopf.apply_antipode_inv(
                        {hm: F(1)}).items():
                    acted = self._form_action(hk, f[0], f[1])
                    if acted:
                        fronts.append((m0, acted, cm * hc))
        for m0, acted, cm in fronts:
            for front, fc in acted.items():
                for (s, ls), c in self.form_mul(front, w).items():
                    _acc(term, (m0, s, ls), -sign * cm * fc * c)
        return term

    def rel_full(self, k: int) -> Subspace:
        return self.rel_coeff(k).sum(self.rel_natural(k))

    def coord_lengths(self, k: int) -> Optional[List[int]]:
        """Word-length grading of the coordinates, when the algebra has one."""
        deg = self.algebra.degrees
        if deg is None:
            return None
        out = []
        for _, a0, legs in self.basis(k):
            x = self._slot_to_alg(a0)
            base = 0 if x is None else deg[a0 if self.reduced else a0 - 1]
            out.append(base + sum(deg[leg] for leg in legs))
        return out


def build_omega(a: ModuleAlgebra, h: Optional[HopfAlgebra] = None,
                m: Optional[SAYDModule] = None, max_degree: int = 3,
                reduced: bool = False) -> OmegaBundle:
    """Form bases and operators for a module algebra, to a degree cap."""
    if m is not None and h is None:
        raise ValueError("coefficients need the Hopf algebra")
    unit_index = None
    if reduced:
        unit = [i for i, c in enumerate(a.unit) if c]
        if len(unit) != 1 or a.unit[unit[0]] != 1:
            raise ValueError("the reduced model needs a basis-vector unit")
        unit_index = unit[0]
    return OmegaBundle(algebra=a, hopf=h, module=m, max_degree=max_degree,
                       reduced=reduced, unit_index=unit_index)


# ---------------------------------------------------------------------------
# super-complexes and Hodge levels
# ---------------------------------------------------------------------------

@dataclass
class SuperComplex:
    """Two spaces with maps back and forth squaring to zero."""

    even_dim: int
    odd_dim: int
    d_eo: SparseMatrix    # even -> odd
    d_oe: SparseMatrix    # odd -> even

    def verify(self) -> List[str]:
        bad = []
        if not (self.d_eo @ self.d_oe).is_zero():
            bad.append("odd -> even -> odd does not vanish")
        if not (self.d_oe @ self.d_eo).is_zero():
            bad.append("even -> odd -> even does not vanish")
        return bad

    def homology(self) -> Dict[int, int]:
        return {
            0: kernel_basis(self.d_eo).dim - rank(self.d_oe),
            1: kernel_basis(self.d_oe).dim - rank(self.d_eo),
        }


@dataclass
class HodgeLevel:
    """The quotient of the form bundle by one Hodge-filtration step."""

    bundle: OmegaBundle
    level: int
    quots: Dict[int, QuotientSpace]
    offsets_even: Dict[int, int]
    offsets_odd: Dict[int, int]
    super: SuperComplex


def hodge_level(bundle: OmegaBundle, n: int) -> HodgeLevel:
    """Super-complex of forms of degree <= n, the top one mod boundaries.

    The differential is the induced b + B; the filtration removes all
    degrees above n together with the b-image of degree n + 1.
    """
    if n + 1 > bundle.max_degree:
        raise ValueError("the level needs degree n + 1 represented")
    quots: Dict[int, QuotientSpace] = {}
    for k in range(n + 1):
        rel = bundle.rel_coeff(k)
        if k == n:
            rel = rel.sum(Subspace.from_vectors(
                bundle.dim(k), bundle.b_mat(k + 1).columns()))
        quots[k] = quotient(bundle.dim(k), rel)
    evens = [k for k in range(n + 1) if k % 2 == 0]
    odds = [k for k in range(n + 1) if k % 2 == 1]

    def offsets(ks):
        out, total = {}, 0
        for k in ks:
            out[k] = total
            total += quots[k].dim
        return out, total

    off_e, dim_e = offsets(evens)
    off_o, dim_o = offsets(odds)

    def total_map(src_ks, dst_ks, src_off, dst_off, dim_dst, dim_src):
        entries: Dict[Tuple[int, int], Fraction] = {}
        for k in src_ks:
            pieces = []
            if k - 1 >= 0:
                pieces.append((k - 1, quots[k].induced_map_between(
                    quots[k - 1], bundle.b_mat(k))))
            if k + 1 <= n:
                pieces.append((k + 1, quots[k].induced_map_between(
                    quots[k + 1], bundle.connes_b_mat(k))))
            for dst, mat in pieces:
                for (r, c), v in mat.entries.items():
                    entries[(dst_off[dst] + r, src_off[k] + c)] = v
        return SparseMatrix(dim_dst, dim_src, entries)

    sc = SuperComplex(
        even_dim=dim_e, odd_dim=dim_o,
        d_eo=total_map(evens, odds, off_e, off_o, dim_o, dim_e),
        d_oe=total_map(odds, evens, off_o, off_e, dim_e, dim_o))
    return HodgeLevel(bundle, n, quots, off_e, off_o, sc)


# ---------------------------------------------------------------------------
# the I-adic filtration of the X-complex
# ---------------------------------------------------------------------------

def ideal_powers(a: ModuleAlgebra, ideal: Subspace, top: int
                 ) -> List[Subspace]:
    """[A, I, I^2, ..., I^top] as subspaces of the algebra."""
    out = [Subspace.full(a.dim), ideal]
    for _ in range(top - 1):
        prev = out[-1]
        vecs = []
        for x in prev.basis.columns():
            for y in ideal.basis.columns():
                prod: Element = {}
                for i, xi in x.items():
                    for j, yj in y.items():
                        for k, c in a.mul({i: F(1)}, {j: F(1)}).items():
                            prod[k] = prod.get(k, F(0)) + xi * yj * c
                vecs.append({k: v for k, v in prod.items() if v})
        out.append(Subspace.from_vectors(a.dim, vecs))
    return out


def _check_ideal(bundle: OmegaBundle, ideal: Subspace) -> None:
    a = bundle.algebra
    for x in ideal.basis.columns():
        for r in range(a.dim):
            left = a.mul({r: F(1)}, x)
            right = a.mul(x, {r: F(1)})
            for y in (left, right):
                if not ideal.contains(y):
                    raise ValueError("the span is not a two-sided ideal")
        if bundle.hopf is not None:
            for hi in range(bundle.hopf.dim):
                if not ideal.contains(a.h_act({hi: F(1)}, x)):
                    raise DescentFailure(x)


def x_filtration(bundle: OmegaBundle, ideal: Subspace, p: int
                 ) -> Tuple[Subspace, Subspace]:
    """Degree-p step of the ideal filtration of the X-complex.

    Returns the even and odd subspaces in ambient degree-0 and degree-1
    form coordinates: for p = 2n + 1 these are M (x) I^{n+1} and
    M (x) (I^{n+1} dR + I^n dI), for p = 2n the even part also adds the
    twisted commutators [M (x) I^n, R] and the odd part is M (x) I^n dR.
    """
    if not bundle.reduced:
        raise ValueError("the X-complex uses the reduced model")
    _check_ideal(bundle, ideal)
    a = bundle.algebra
    n, odd = divmod(p, 2)
    powers = ideal_powers(a, ideal, n + 1)

    def span0(power: Subspace) -> List[Vector]:
        vecs = []
        for x in power.basis.columns():
            for mi in range(bundle.m_dim):
                vecs.append({bundle.coord((mi, i, ())): c
                             for i, c in x.items()})
        return vecs

    def span1(power: Subspace, dlegs: Subspace) -> List[Vector]:
        vecs = []
        for x in power.basis.columns():
            for y in dlegs.basis.columns():
                for mi in range(bundle.m_dim):
                    term: Term = {}
                    for i, xi in x.items():
                        for j, yj in bundle._project_leg(y).items():
                            _acc(term, (mi, i, (j,)), xi * yj)
                    vecs.append(bundle.vector(term))
        return vecs

    full = Subspace.full(a.dim)
    if odd:
        even = Subspace.from_vectors(bundle.dim(0), span0(powers[n + 1]))
        odd_sub = Subspace.from_vectors(
            bundle.dim(1),
            span1(powers[n + 1], full) + span1(powers[n], ideal))
    else:
        vecs = span0(powers[n + 1])
        for x in powers[n].basis.columns():
            for r in range(a.dim):
                for mi in range(bundle.m_dim):
                    term: Term = {}
                    for s, c in bundle._alg_to_slot(
                            a.mul(x, {r: F(1)})).items():
                        _acc(term, (mi, s, ()), c)
                    for m0, moved, cm in bundle._twist_alg(mi, {r: F(1)}):
                        for s, c in bundle._alg_to_slot(
                                a.mul(moved, x)).items():
                            _acc(term, (m0, s, ()), -cm * c)
                    vecs.append(bundle.vector(term))
        even = Subspace.from_vectors(bundle.dim(0), vecs)
        odd_sub = Subspace.from_vectors(bundle.dim(1), span1(powers[n], full))
    return even, odd_sub


def check_x_filtration(bundle: OmegaBundle, ideal: Subspace,
                       p_max: int) -> List[str]:
    """Inclusion chain and differential stability of the filtration steps."""
    bad = []
    steps = [x_filtration(bundle, ideal, p) for p in range(1, p_max + 1)]
    rel0 = bundle.rel_coeff(0)
    rel1 = bundle.rel_full(1)
    for p in range(1, p_max):
        lo_e, lo_o = steps[p]
        hi_e, hi_o = steps[p - 1]
        if not hi_e.sum(rel0).contains_subspace(lo_e):
            bad.append(f"even step {p + 1} is not inside step {p}")
        if not hi_o.sum(rel1).contains_subspace(lo_o):
            bad.append(f"odd step {p + 1} is not inside step {p}")
    for p, (even, odd_sub) in enumerate(steps, start=1):
        d = bundle.d_mat(0)
        for v in even.basis.columns():
            if not odd_sub.sum(rel1).contains(d.apply(v)):
                bad.append(f"d leaves the odd part of step {p}")
                break
        b = bundle.b_mat(1)
        for v in odd_sub.basis.columns():
            if not even.sum(rel0).contains(b.apply(v)):
                bad.append(f"b leaves the even part of step {p}")
                break
    return bad


# ---------------------------------------------------------------------------
# the X-complex of a free algebra
# ---------------------------------------------------------------------------

@dataclass
class XComplex:
    """M (x)_H F  <->  one-forms modulo twisted traces, with gradings."""

    bundle: OmegaBundle
    q0: QuotientSpace
    q1: QuotientSpace
    nd: SparseMatrix          # q0 -> q1, the projected differential
    bm: SparseMatrix          # q1 -> q0
    lengths0: List[int]
    lengths1: List[int]
    word_cap: int

    def homology(self, reduced: bool = True) -> Dict[int, int]:
        """Chain homology summed over faithful word lengths.

        Degree 0 is the cokernel of the trace boundary (the twisted trace
        quotient of M (x)_H F); degree 1 is its kernel modulo the image of
        the projected differential.
        """
        total = {0: 0, 1: 0}
        lows = 1 if reduced else 0
        for ell in range(lows, self.word_cap + 1):
            piece = self.homology_by_length(ell)
            total[0] += piece[0]
            total[1] += piece[1]
        return total

    def homology_by_length(self, ell: int) -> Dict[int, int]:
        c0 = [i for i, L in enumerate(self.lengths0) if L == ell]
        c1 = [i for i, L in enumerate(self.lengths1) if L == ell]
        nd = _submatrix(self.nd, c1, c0)
        bm = _submatrix(self.bm, c0, c1)
        return {0: len(c0) - rank(bm),
                1: kernel_basis(bm).dim - rank(nd)}


def _submatrix(mat: SparseMatrix, rows: Sequence[int],
               cols: Sequence[int]) -> SparseMatrix:
    ri = {r: i for i, r in enumerate(rows)}
    ci = {c: i for i, c in enumerate(cols)}
    entries = {(ri[r], ci[c]): v for (r, c), v in mat.entries.items()
               if r in ri and c in ci}
    return SparseMatrix(len(rows), len(cols), entries)


def _quotient_lengths(q: QuotientSpace, lengths: List[int]) -> List[int]:
    """Lengths of the free coordinates of a quotient by homogeneous spans."""
    out = []
    for j in range(q.dim):
        lifted = q.lift({j: F(1)})
        vals = {lengths[i] for i in lifted}
        if len(vals) != 1:
            raise ValueError("the quotient mixes word lengths")
        out.append(vals.pop())
    return out


def x_complex_free(v_dim: int, word_cap: int,
                   h: Optional[HopfAlgebra] = None,
                   m: Optional[SAYDModule] = None,
                   v_action=None) -> XComplex:
    """X-complex of a truncated tensor algebra with coefficients."""
    from . import library as _lib
    algebra = _lib.free_module_algebra(v_dim, word_cap, h, v_action)
    bundle = build_omega(algebra, h, m, max_degree=1, reduced=True)
    q0 = quotient(bundle.dim(0), bundle.rel_coeff(0))
    q1 = quotient(bundle.dim(1), bundle.rel_full(1))
    nd = q0.induced_map_between(q1, bundle.d_mat(0))
    bm = q1.induced_map_between(q0, bundle.b_mat(1))
    return XComplex(
        bundle=bundle, q0=q0, q1=q1, nd=nd, bm=bm,
        lengths0=_quotient_lengths(q0, bundle.coord_lengths(0)),
        lengths1=_quotient_lengths(q1, bundle.coord_lengths(1)),
        word_cap=word_cap)


def natural_zero_form_dim(xc: XComplex, reduced: bool = True) -> int:
    """dim of M (x)_H F modulo twisted traces, the degree-0 target."""
    bundle = xc.bundle
    q = quotient(bundle.dim(0), bundle.rel_full(0))
    lengths = _quotient_lengths(q, bundle.coord_lengths(0))
    lows = 1 if reduced else 0
    return sum(1 for L in lengths if lows <= L <= xc.word_cap)


# ---------------------------------------------------------------------------
# the small complex of a free algebra
# ---------------------------------------------------------------------------

def _word_list(v_dim: int, cap: int) -> List[Tuple[int, ...]]:
    words: List[Tuple[int, ...]] = [()]
    frontier = [()]
    for _ in range(cap):
        frontier = [w + (i,) for w in frontier for i in range(v_dim)]
        words.extend(frontier)
    return words


@dataclass
class SmallComplex:
    """Two-term replacement of the Hochschild chains of a free algebra.

    Chain degree q of the big complex is M (x) F (x) Fbar^q; the small
    complex is M (x) (F (x) V) -> M (x) F.  The projection phi, the
    contracting homotopy h and the map gamma realize the equivalence.
    """

    algebra: ModuleAlgebra
    hopf: Optional[HopfAlgebra]
    module: Optional[SAYDModule]
    word_cap: int
    words: List[Tuple[int, ...]]
    b1: SparseMatrix          # C1 -> C0
    b2: SparseMatrix          # C2 -> C1
    b_small: SparseMatrix     # S1 -> S0 = C0
    incl1: SparseMatrix       # S1 -> C1
    phi1: SparseMatrix        # C1 -> S1
    h1: SparseMatrix          # C1 -> C2
    gamma: SparseMatrix       # C0 -> S1
    lengths: Dict[str, List[int]]

    def in_cap(self, space: str) -> List[int]:
        return [i for i, L in enumerate(self.lengths[space])
                if L <= self.word_cap]

    def verify(self) -> List[str]:
        """All structure identities, restricted to faithful word lengths."""
        bad = []
        s1 = self.lengths["s1"]
        if _submatrix(self.phi1 @ self.incl1 - SparseMatrix.identity(
                len(s1)), range(len(s1)), self.in_cap("s1")).entries:
            bad.append("phi o incl != id on the small complex")
        c1 = self.lengths["c1"]
        gap = (self.b2 @ self.h1
               - SparseMatrix.identity(len(c1))
               + self.incl1 @ self.phi1)
        if _submatrix(gap, range(len(c1)), self.in_cap("c1")).entries:
            bad.append("b h + h b != id - incl phi in degree 1")
        if _submatrix(self.b1 @ self.incl1 - self.b_small,
                      range(self.b1.rows), self.in_cap("s1")).entries:
            bad.append("the small boundary is not the restricted one")
        if _submatrix(self.b_small @ self.phi1 - self.b1,
                      range(self.b1.rows), self.in_cap("c1")).entries:
            bad.append("phi is not a chain map")
        return bad


def free_small_complex(v_dim: int, word_cap: int,
                       h: Optional[HopfAlgebra] = None,
                       m: Optional[SAYDModule] = None,
                       v_action=None) -> SmallComplex:
    from . import library as _lib
    algebra = _lib.free_module_algebra(v_dim, word_cap, h, v_action)
    words = _word_list(v_dim, word_cap)
    index = {w: i for i, w in enumerate(words)}
    nbar = len(words) - 1          # nonempty words, offset by one
    m_dim = m.dim if m is not None else 1
    nf = algebra.dim

    def twist(mi: int, x: Element) -> List[Tuple[int, Element, Fraction]]:
        if m is None:
            return [(mi, x, F(1))]
        out = []
        for (hm, m0), cm in m.coact({mi: F(1)}).items():
            for hk, hc in h.apply_antipode_inv({hm: F(1)}).items():
                moved = algebra.h_act({hk: F(1)}, x)
                if moved:
                    out.append((m0, moved, cm * hc))
        return out

    # -- coordinates ---------------------------------------------------------
    def c_dim(q: int) -> int:
        return m_dim * nf * nbar ** q

    def c_coord(mi: int, f0: int, legs: Tuple[int, ...]) -> int:
        idx = mi * nf + f0
        for leg in legs:
            idx = idx * nbar + (leg - 1)
        return idx

    def s1_coord(mi: int, f0: int, v: int) -> int:
        return (mi * nf + f0) * v_dim + (v - 1)

    # -- the big boundary ----------------------------------------------------
    def b_entries(q: int) -> SparseMatrix:
        entries: Dict[Tuple[int, int], Fraction] = {}

        def emit(i, j, c):
            if c:
                entries[(i, j)] = entries.get((i, j), F(0)) + c

        from itertools import product as _prod
        for mi in range(m_dim):
            for f0 in range(nf):
                for legs in _prod(range(1, nbar + 1), repeat=q):
                    j = c_coord(mi, f0, legs)
                    chain = (f0,) + legs
                    for i in range(q):
                        sign = F(-1) ** i
                        for k, c in algebra.mul({chain[i]: F(1)},
                                                {chain[i + 1]: F(1)}).items():
                            if i == 0:
                                emit(c_coord(mi, k, chain[2:]), j, sign * c)
                            elif k != 0:    # normalized middle legs
                                nlegs = chain[1:i] + (k,) + chain[i + 2:]
                                emit(c_coord(mi, chain[0], nlegs), j,
                                     sign * c)
                    sign = F(-1) ** q
                    for m0, moved, cm in twist(mi, {legs[-1]: F(1)}):
                        for k, c in algebra.mul(moved, {f0: F(1)}).items():
                            emit(c_coord(m0, k, legs[:-1]), j,
                                 sign * cm * c)
        return SparseMatrix(c_dim(q - 1), c_dim(q), entries)

    b1 = b_entries(1)
    b2 = b_entries(2)

    # -- the small boundary and structure maps -------------------------------
    sb: Dict[Tuple[int, int], Fraction] = {}
    inc: Dict[Tuple[int, int], Fraction] = {}
    for mi in range(m_dim):
        for f0 in range(nf):
            for v in range(1, v_dim + 1):
                j = s1_coord(mi, f0, v)
                inc[(c_coord(mi, f0, (v,)), j)] = F(1)
                for k, c in algebra.mul({f0: F(1)}, {v: F(1)}).items():
                    sb[(mi * nf + k, j)] = sb.get((mi * nf + k, j), F(0)) + c
                for m0, moved, cm in twist(mi, {v: F(1)}):
                    for k, c in algebra.mul(moved, {f0: F(1)}).items():
                        key = (m0 * nf + k, j)
                        sb[key] = sb.get(key, F(0)) - cm * c
    b_small = SparseMatrix(m_dim * nf, m_dim * nf * v_dim,
                           {k: v for k, v in sb.items() if v})
    incl1 = SparseMatrix(c_dim(1), m_dim * nf * v_dim, inc)

    def mul_words(*factors: Tuple[int, ...]) -> Element:
        out: Element = {index[()]: F(1)}
        for w in factors:
            nxt: Element = {}
            for i, c in out.items():
                for k, c2 in algebra.mul({i: F(1)}, {index[w]: F(1)}).items():
                    nxt[k] = nxt.get(k, F(0)) + c * c2
            out = nxt
        return out

    phi_entries: Dict[Tuple[int, int], Fraction] = {}
    for mi in range(m_dim):
        for f0 in range(nf):
            for leg in range(1, nbar + 1):
                j = c_coord(mi, f0, (leg,))
                w = words[leg]
                for i in range(1, len(w) + 1):
                    v = w[i - 1] + 1
                    suffix, prefix = w[i:], w[:i - 1]
                    for m0, moved, cm in twist(mi, {index[suffix]: F(1)}):
                        for k1, c1 in moved.items():
                            prod: Element = {}
                            for k2, c2 in mul_words(words[f0],
                                                    prefix).items():
                                for k3, c3 in algebra.mul(
                                        {k1: F(1)}, {k2: F(1)}).items():
                                    prod[k3] = prod.get(k3, F(0)) + c2 * c3
                            for k3, c3 in prod.items():
                                key = (s1_coord(m0, k3, v), j)
                                phi_entries[key] = phi_entries.get(
                                    key, F(0)) + cm * c1 * c3
    phi1 = SparseMatrix(m_dim * nf * v_dim, c_dim(1),
                        {k: v for k, v in phi_entries.items() if v})

    # -- homotopy h1 by recursion on the last leg ----------------------------
    h_cache: Dict[Tuple[int, int, int], Dict[Tuple[int, int, int], Fraction]] \
        = {}

    def h1_elem(mi: int, f0: int, leg: int
                ) -> Dict[Tuple[int, int, int], Fraction]:
        key = (mi, f0, leg)
        if key in h_cache:
            return h_cache[key]
        w = words[leg]
        out: Dict[Tuple[int, int, int], Fraction] = {}
        if len(w) > 1:
            u, v = w[:-1], w[-1]
            for m0, moved, cm in twist(mi, {v + 1: F(1)}):
                for k1, c1 in moved.items():
                    for k2, c2 in algebra.mul({k1: F(1)},
                                              {f0: F(1)}).items():
                        for ko, co in h1_elem(m0, k2, index[u]).items():
                            _acc(out, ko, cm * c1 * c2 * co)
            _acc(out, (mi, f0, c_leg2(index[u], v + 1)), F(-1))
        h_cache[key] = out
        return out

    def c_leg2(leg1: int, leg2: int) -> int:
        return (leg1 - 1) * nbar + (leg2 - 1)

    h_entries: Dict[Tuple[int, int], Fraction] = {}
    for mi in range(m_dim):
        for f0 in range(nf):
            for leg in range(1, nbar + 1):
                j = c_coord(mi, f0, (leg,))
                for (m0, k, legs2), c in h1_elem(mi, f0, leg).items():
                    h_entries[(m0 * nf * nbar ** 2 + k * nbar ** 2 + legs2,
                               j)] = c
    h1 = SparseMatrix(c_dim(2), c_dim(1),
                      {k: v for k, v in h_entries.items() if v})

    gamma_entries: Dict[Tuple[int, int], Fraction] = {}
    for mi in range(m_dim):
        for f0 in range(1, nf):       # gamma kills the unit word
            j = mi * nf + f0
            for (r, c), v in phi1.entries.items():
                if c == c_coord(mi, 0, (f0,)):
                    gamma_entries[(r, j)] = gamma_entries.get(
                        (r, j), F(0)) + v
    gamma = SparseMatrix(m_dim * nf * v_dim, m_dim * nf,
                         {k: v for k, v in gamma_entries.items() if v})

    deg = algebra.degrees
    from itertools import product as _prod
    lengths = {
        "c0": [deg[f0] for mi in range(m_dim) for f0 in range(nf)],
        "c1": [deg[f0] + len(words[leg])
               for mi in range(m_dim) for f0 in range(nf)
               for leg in range(1, nbar + 1)],
        "c2": [deg[f0] + len(words[l1]) + len(words[l2])
               for mi in range(m_dim) for f0 in range(nf)
               for l1, l2 in _prod(range(1, nbar + 1), repeat=2)],
        "s1": [deg[f0] + 1 for mi in range(m_dim) for f0 in range(nf)
               for v in range(v_dim)],
    }
    return SmallComplex(algebra=algebra, hopf=h, module=m, word_cap=word_cap,
                        words=words, b1=b1, b2=b2, b_small=b_small,
                        incl1=incl1, phi1=phi1, h1=h1, gamma=gamma,
                        lengths=lengths)


def small_x_agreement(small: SmallComplex, xc: XComplex) -> List[str]:
    """The small complex is the X-complex under f (x) v -> f dv."""
    bundle = xc.bundle
    m_dim = small.module.dim if small.module is not None else 1
    nf = small.algebra.dim
    v_dim = sum(1 for w in small.words if len(w) == 1)
    cols = []
    for mi in range(m_dim):
        for f0 in range(nf):
            for v in range(1, v_dim + 1):
                amb = {bundle.coord((mi, f0, (v,))): F(1)}
                cols.append(xc.q1.project(amb))
    j = SparseMatrix(xc.q1.dim, m_dim * nf * v_dim,
                     {(r, c): val for c, col in enumerate(cols)
                      for r, val in col.items()})
    p0 = SparseMatrix(xc.q0.dim, m_dim * nf,
                      {(r, c): val for c in range(m_dim * nf)
                       for r, val in xc.q0.project({c: F(1)}).items()})
    bad = []
    ok_s1 = small.in_cap("s1")
    if _submatrix(j @ small.gamma - xc.nd @ p0,
                  range(xc.q1.dim), small.in_cap("c0")).entries:
        bad.append("gamma does not match the projected differential")
    if _submatrix(p0 @ small.b_small - xc.bm @ j,
                  range(xc.q0.dim), ok_s1).entries:
        bad.append("the small boundary does not match the trace boundary")
    cut = _submatrix(j, range(xc.q1.dim), ok_s1)
    faithful = [i for i, L in enumerate(xc.lengths1) if L <= xc.word_cap]
    if rank(cut) != len(faithful):
        bad.append("f (x) v -> f dv is not onto the faithful one-forms")
    return bad


# ---------------------------------------------------------------------------
# bar spaces and the universal cotrace
# ---------------------------------------------------------------------------

@dataclass
class BarBundle:
    """Tensor powers of an algebra with shift, cotrace and codifferential."""

    algebra: ModuleAlgebra
    degree_cap: int

    def dim(self, p: int) -> int:
        return self.algebra.dim ** p

    def t_mat(self, p: int) -> SparseMatrix:
        """Signed cyclic shift moving the last tensor factor to the front."""
        a = self.algebra.dim
        sign = F(-1) ** (p - 1)
        entries = {}
        for j in range(self.dim(p)):
            digits = _digits(j, a, p)
            shifted = (digits[-1],) + digits[:-1]
            entries[(_undigits(shifted, a), j)] = sign
        return SparseMatrix(self.dim(p), self.dim(p), entries)

    def n_mat(self, p: int) -> SparseMatrix:
        total = SparseMatrix.zero(self.dim(p), self.dim(p))
        power = SparseMatrix.identity(self.dim(p))
        t = self.t_mat(p)
        for _ in range(p):
            total = total + power
            power = t @ power
        return total

    def nat(self, p: int) -> Subspace:
        """The cyclically invariant subspace, the image of the cotrace."""
        return Subspace.from_vectors(self.dim(p), self.n_mat(p).columns())

    def codiff(self, p: int) -> SparseMatrix:
        """a1 (x) ... (x) ap -> sum (-1)^{i-1} ... ai a_{i+1} ..."""
        a = self.algebra.dim
        entries: Dict[Tuple[int, int], Fraction] = {}
        for j in range(self.dim(p)):
            digits = _digits(j, a, p)
            for i in range(p - 1):
                sign = F(-1) ** i
                for k, c in self.algebra.mul({digits[i]: F(1)},
                                             {digits[i + 1]: F(1)}).items():
                    out = digits[:i] + (k,) + digits[i + 2:]
                    key = (_undigits(out, a), j)
                    entries[key] = entries.get(key, F(0)) + sign * c
        return SparseMatrix(self.dim(p - 1), self.dim(p),
                            {k: v for k, v in entries.items() if v})


def _digits(j: int, base: int, width: int) -> Tuple[int, ...]:
    out = []
    for _ in range(width):
        out.append(j % base)
        j //= base
    return tuple(reversed(out))


def _undigits(digits: Sequence[int], base: int) -> int:
    j = 0
    for d in digits:
        j = j * base + d
    return j


def bar_and_cotrace(a: ModuleAlgebra, degree_cap: int) -> BarBundle:
    return BarBundle(algebra=a, degree_cap=degree_cap)


# ---------------------------------------------------------------------------
# the de Rham quotient
# ---------------------------------------------------------------------------

def de_rham_complex(bundle: OmegaBundle
                    ) -> Tuple[GradedComplex, Dict[int, QuotientSpace]]:
    """Forms modulo coefficient and graded trace relations, with d."""
    quots = {k: quotient(bundle.dim(k),
                         bundle.rel_coeff(k).sum(bundle.rel_natural(k, True)))
             for k in range(bundle.max_degree + 1)}
    diff = {}
    for k in range(bundle.max_degree):
        diff[k] = quots[k].induced_map_between(quots[k + 1],
                                               bundle.d_mat(k))
    cx = GradedComplex({k: q.dim for k, q in quots.items()}, diff, 1)
    return cx, quots


def de_rham_homology(bundle: OmegaBundle,
                     length: Optional[int] = None) -> Dict[int, int]:
    """Quotient cohomology per degree, optionally one word length only."""
    cx, quots = de_rham_complex(bundle)
    if length is None:
        return cx.cohomology_dims()
    cols = {k: [i for i, L in enumerate(_quotient_lengths(
        quots[k], bundle.coord_lengths(k))) if L == length]
        for k in quots}
    out = {}
    for k in cx.safe_degrees():
        d_out = _submatrix(cx.diff[k], cols[k + 1], cols[k])
        dims = kernel_basis(d_out).dim
        if k - 1 in cx.diff:
            dims -= rank(_submatrix(cx.diff[k - 1], cols[k], cols[k - 1]))
        out[k] = dims
    return out
