"""Free differential graded algebra on degree-1 and degree-2 generators.

For a coalgebra C we build the nonunital free DG algebra on letters i_c
(degree 1) and w_c (degree 2), with

    d i_c = w_c,   d w_c = 0,
    delta i_c = -i_{c1} i_{c2},
    delta w_c = w_{c1} i_{c2} - i_{c1} w_{c2},

partial = d + delta, together with the twisted cyclic operator t, the
norm N, the extra boundary b_t, the form-degree-lowering boundary b, the
Karoubi operator kappa and the contracting homotopy for d.  Coefficients
in a module-comodule M (over a Hopf algebra H acting on C) twist all
cyclic structure through S^{-1}(m^{(-1)}).

Everything is bigraded by (total degree, w-letter count); relations are
homogeneous in the w-count, so truncations by w-count, their natural
(trace) quotients, the per-w-count form complexes and all connecting
maps between them are masks, relation spans and canonical solves over
one word basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .complexes import (
    GradedComplex,
    IdentityFailure,
    TensorSpace,
)
from .cyclic import CocyclicModuleData, diagonal_h_relations
from .exactla import (
    INCONSISTENT,
    QuotientSpace,
    SparseMatrix,
    Subspace,
    Vector,
    kernel_basis,
    quotient,
    rank,
    solve,
)
from .structures import (
    Coalgebra,
    HopfAlgebra,
    ModuleCoalgebra,
    SAYDModule,
)

F = Fraction

# a letter is (kind, c_index); kind 0 is an i-letter (degree 1), kind 1
# is a w-letter (degree 2)
Letter = Tuple[int, int]
Word = Tuple[Letter, ...]

I, W = 0, 1


def letter_degree(letter: Letter) -> int:
    return 1 + letter[0]


def word_degree(word: Word) -> int:
    return sum(1 + k for k, _ in word)


def w_count(word: Word) -> int:
    return sum(k for k, _ in word)


# ---------------------------------------------------------------------------
# bundle
# ---------------------------------------------------------------------------

Term = Dict[Tuple[int, Word], Fraction]


def _acc(out, key, c) -> None:
    if c:
        s = out.get(key, F(0)) + c
        if s:
            out[key] = s
        else:
            del out[key]


@dataclass
class WeilBundle:
    """Word bases and operators of the free DG algebra of a coalgebra."""

    coalgebra: Coalgebra
    hopf: Optional[HopfAlgebra]
    module: Optional[SAYDModule]
    max_degree: int
    w_cap: Optional[int]
    c_action: Optional[Callable] = None   # H x C -> C, elementwise
    words: Dict[int, List[Word]] = field(default_factory=dict)
    windex: Dict[Word, int] = field(default_factory=dict)
    _mats: Dict[Tuple[str, int], Optional[SparseMatrix]] = field(
        default_factory=dict, repr=False)
    _rels: Dict[Tuple[str, int], Subspace] = field(
        default_factory=dict, repr=False)

    # -- basis bookkeeping --------------------------------------------------

    @property
    def m_dim(self) -> int:
        return self.module.dim if self.module is not None else 1

    def dim(self, p: int) -> int:
        return self.m_dim * len(self.words.get(p, ()))

    def coord(self, m_idx: int, word: Word) -> int:
        return m_idx * len(self.words[word_degree(word)]) + self.windex[word]

    def uncoord(self, p: int, idx: int) -> Tuple[int, Word]:
        nw = len(self.words[p])
        return idx // nw, self.words[p][idx % nw]

    def coord_w_counts(self, p: int) -> List[int]:
        counts = [w_count(w) for w in self.words.get(p, ())]
        return counts * self.m_dim

    def _admissible(self, word: Word) -> bool:
        if self.w_cap is not None and w_count(word) > self.w_cap:
            return False
        return word_degree(word) <= self.max_degree

    def vector(self, p: int, term: Term) -> Vector:
        return {self.coord(mi, w): c for (mi, w), c in term.items() if c}

    def _matrix(self, src: int, dst: int,
                fn: Callable[[int, Word], Term]) -> SparseMatrix:
        entries: Dict[Tuple[int, int], Fraction] = {}
        for j in range(self.dim(src)):
            mi, word = self.uncoord(src, j)
            for (mo, wo), c in fn(mi, word).items():
                if c:
                    i = self.coord(mo, wo)
                    entries[(i, j)] = entries.get((i, j), F(0)) + c
        return SparseMatrix(self.dim(dst), self.dim(src),
                            {k: v for k, v in entries.items() if v})

    # -- elementwise generator algebra --------------------------------------

    def _letter_action(self, h_elem: Dict[int, Fraction],
                       letter: Letter) -> Dict[Letter, Fraction]:
        """Diagonal H-action on a single generator: h(i_c) = i_{h(c)}."""
        kind, ci = letter
        out: Dict[Letter, Fraction] = {}
        for k, c in self.c_action(h_elem, {ci: F(1)}).items():
            out[(kind, k)] = out.get((kind, k), F(0)) + c
        return out

    def _word_action(self, h_idx: int, word: Word) -> Dict[Word, Fraction]:
        """Diagonal H-action on a word through the iterated coproduct."""
        legs = self.hopf.iterated_coproduct({h_idx: F(1)}, len(word) - 1)
        out: Dict[Word, Fraction] = {}
        for key, hv in legs.items():
            terms: List[Tuple[Word, Fraction]] = [((), hv)]
            for lh, letter in zip(key, word):
                nxt = []
                for pref, coeff in terms:
                    for lo, lc in self._letter_action(
                            {lh: F(1)}, letter).items():
                        nxt.append((pref + (lo,), coeff * lc))
                terms = nxt
            for wkey, coeff in terms:
                out[wkey] = out.get(wkey, F(0)) + coeff
        return {w: c for w, c in out.items() if c}

    def _twist(self, m_idx: int, beta: Word, alpha: Word) -> Term:
        """m (x) . -> m^{(0)} (x) S^{-1}(m^{(-1)})(beta) . alpha."""
        out: Term = {}
        if self.module is None or not beta:
            word = beta + alpha
            if self._admissible(word):
                out[(m_idx, word)] = F(1)
            return out
        for (hm, m0), cm in self.module.coact({m_idx: F(1)}).items():
            sh = self.hopf.apply_antipode_inv({hm: F(1)})
            for hk, hc in sh.items():
                for bw, bc in self._word_action(hk, beta).items():
                    word = bw + alpha
                    if self._admissible(word):
                        _acc(out, (m0, word), cm * hc * bc)
        return out

    def _derive(self, word: Word,
                letter_out: Callable[[Letter], Dict[Word, Fraction]]
                ) -> Dict[Word, Fraction]:
        """Extend a map on generators as a derivation with Koszul signs."""
        out: Dict[Word, Fraction] = {}
        sign = F(1)
        for k, letter in enumerate(word):
            for repl, c in letter_out(letter).items():
                nw = word[:k] + repl + word[k + 1:]
                if nw and self._admissible(nw):
                    out[nw] = out.get(nw, F(0)) + sign * c
            sign *= F(-1) ** letter_degree(letter)
        return {w: c for w, c in out.items() if c}

    def _d_letter(self, letter: Letter) -> Dict[Word, Fraction]:
        kind, ci = letter
        return {((W, ci),): F(1)} if kind == I else {}

    def _delta_letter(self, letter: Letter) -> Dict[Word, Fraction]:
        kind, ci = letter
        out: Dict[Word, Fraction] = {}
        for (a, b), v in self.coalgebra.delta_elem({ci: F(1)}).items():
            if kind == I:
                _acc(out, ((I, a), (I, b)), -v)
            else:
                _acc(out, ((W, a), (I, b)), v)
                _acc(out, ((I, a), (W, b)), -v)
        return out

    def _h_letter(self, letter: Letter) -> Dict[Word, Fraction]:
        kind, ci = letter
        return {((I, ci),): F(1)} if kind == W else {}

    def d_word(self, word: Word) -> Dict[Word, Fraction]:
        return self._derive(word, self._d_letter)

    def delta_word(self, word: Word) -> Dict[Word, Fraction]:
        return self._derive(word, self._delta_letter)

    def t_elem(self, m_idx: int, word: Word) -> Term:
        """Twisted cyclic rotation: move the last generator to the front."""
        a = word[-1]
        x = word[:-1]
        sign = F(-1) ** (letter_degree(a) * word_degree(x))
        out: Term = {}
        for (mo, wo), c in self._twist(m_idx, (a,), x).items():
            _acc(out, (mo, wo), sign * c)
        return out

    def n_elem(self, m_idx: int, word: Word) -> Term:
        """N = 1 + t + ... + t^{l-1} where l is the letter count."""
        out: Term = {(m_idx, word): F(1)}
        cur: Term = {(m_idx, word): F(1)}
        for _ in range(len(word) - 1):
            nxt: Term = {}
            for (mi, w), c in cur.items():
                for key, v in self.t_elem(mi, w).items():
                    _acc(nxt, key, c * v)
            cur = nxt
            for key, v in cur.items():
                _acc(out, key, v)
        return out

    def bt_elem(self, m_idx: int, word: Word) -> Term:
        """b_t(m (x) xa) = (-1)^{|a|} t(m (x) a delta(x))."""
        a = word[-1]
        x = word[:-1]
        if not x:
            return {}
        sign = F(-1) ** letter_degree(a)
        out: Term = {}
        for dw, dc in self.delta_word(x).items():
            nw = (a,) + dw
            if not self._admissible(nw):
                continue
            for key, v in self.t_elem(m_idx, nw).items():
                _acc(out, key, sign * dc * v)
        return out

    # -- form-degree-lowering boundary --------------------------------------

    def _normal_form(self, word: Word) -> List[Tuple[Fraction, Word, Word]]:
        """Write a word with at least one w-letter as a sum of eta . d(f).

        Returns triples (coefficient, eta, f) with f a nonempty i-word,
        using w_c u = d(i_c u) + i_c d(u) recursively on the trailing
        i-block u after the last w-letter (the derivation d contributes
        alternating signs along the odd letters of u).
        """
        last = max(k for k, letter in enumerate(word) if letter[0] == W)
        eta, (_, ci), u = word[:last], word[last], word[last + 1:]
        head = ((I, ci),)
        out = [(F(1), eta, head + u)]
        sign = F(1)
        for k, (_, uk) in enumerate(u):
            rest = head + u[:k] + ((W, uk),) + u[k + 1:]
            for c2, eta2, f2 in self._normal_form(eta + rest):
                out.append((sign * c2, eta2, f2))
            sign = -sign
        return out

    def b_elem(self, m_idx: int, word: Word) -> Term:
        """Hochschild-type boundary lowering the w-count by one:
        b(eta . d f) = (-1)^{|eta|}(eta f - (-1)^{|eta||f|} f eta),
        with the wrapped term twisted through the coefficients."""
        if w_count(word) == 0:
            return {}
        out: Term = {}
        for c, eta, f in self._normal_form(word):
            se = F(-1) ** word_degree(eta)
            st = F(-1) ** (word_degree(eta) * word_degree(f))
            wd = eta + f
            if self._admissible(wd):
                _acc(out, (m_idx, wd), c * se)
            for key, v in self._twist(m_idx, f, eta).items():
                _acc(out, key, -c * se * st * v)
        return out

    # -- matrices ------------------------------------------------------------

    def _cached(self, name: str, p: int, build) -> Optional[SparseMatrix]:
        key = (name, p)
        if key not in self._mats:
            self._mats[key] = build()
        return self._mats[key]

    def d_mat(self, p: int) -> Optional[SparseMatrix]:
        if p + 1 > self.max_degree:
            return None
        return self._cached("d", p, lambda: self._matrix(
            p, p + 1, lambda mi, w: {(mi, wo): c
                                     for wo, c in self.d_word(w).items()}))

    def delta_mat(self, p: int) -> Optional[SparseMatrix]:
        if p + 1 > self.max_degree:
            return None
        return self._cached("delta", p, lambda: self._matrix(
            p, p + 1,
            lambda mi, w: {(mi, wo): c
                           for wo, c in self.delta_word(w).items()}))

    def partial_mat(self, p: int) -> Optional[SparseMatrix]:
        d = self.d_mat(p)
        if d is None:
            return None
        return d + self.delta_mat(p)

    def t_mat(self, p: int) -> SparseMatrix:
        return self._cached("t", p, lambda: self._matrix(p, p, self.t_elem))

    def n_mat(self, p: int) -> SparseMatrix:
        return self._cached("N", p, lambda: self._matrix(p, p, self.n_elem))

    def bt_mat(self, p: int) -> Optional[SparseMatrix]:
        if p + 1 > self.max_degree:
            return None
        return self._cached("bt", p,
                            lambda: self._matrix(p, p + 1, self.bt_elem))

    def b_total_mat(self, p: int) -> Optional[SparseMatrix]:
        """b = partial + b_t, the total degree +1 differential."""
        pm = self.partial_mat(p)
        if pm is None:
            return None
        return pm + self.bt_mat(p)

    def hoch_b_mat(self, p: int) -> SparseMatrix:
        return self._cached("b", p,
                            lambda: self._matrix(p, p - 1, self.b_elem))

    def homotopy_mat(self, p: int) -> SparseMatrix:
        def fn(mi, w):
            return {(mi, wo): c
                    for wo, c in self._derive(w, self._h_letter).items()}
        return self._cached("H", p, lambda: self._matrix(p, p - 1, fn))

    def kappa_mat(self, p: int) -> Optional[SparseMatrix]:
        """kappa = id - (b d + d b) on degree p."""
        d = self.d_mat(p)
        if d is None:
            return None
        bd = self.hoch_b_mat(p + 1) @ d
        db = self.d_mat(p - 1) @ self.hoch_b_mat(p)
        return SparseMatrix.identity(self.dim(p)) - bd - db

    # -- relation spans ------------------------------------------------------

    def rel_coeff(self, p: int) -> Subspace:
        """m.h (x) x - m (x) h(x): relations of the tensor product over H."""
        key = ("rel_coeff", p)
        if key in self._rels:
            return self._rels[key]
        vectors: List[Vector] = []
        if self.module is not None:
            for hi in range(self.hopf.dim):
                for mi in range(self.m_dim):
                    mh = self.module.act({mi: F(1)}, {hi: F(1)})
                    for word in self.words.get(p, ()):
                        term: Term = {}
                        for mk, mc in mh.items():
                            _acc(term, (mk, word), mc)
                        for wo, wc in self._word_action(hi, word).items():
                            _acc(term, (mi, wo), -wc)
                        if term:
                            vectors.append(self.vector(p, term))
        sub = Subspace.from_vectors(self.dim(p), vectors)
        self._rels[key] = sub
        return sub

    def rel_natural(self, p: int, signed: bool = True) -> Subspace:
        """Twisted commutator relations from all two-sided word splits:
        m (x) ab  ~  (-1)^{|a||b|} m^{(0)} (x) S^{-1}(m^{(-1)})(b) a."""
        key = ("rel_nat_s" if signed else "rel_nat_u", p)
        if key in self._rels:
            return self._rels[key]
        vectors: List[Vector] = []
        for word in self.words.get(p, ()):
            for s in range(1, len(word)):
                alpha, beta = word[:s], word[s:]
                sign = (F(-1) ** (word_degree(alpha) * word_degree(beta))
                        if signed else F(1))
                for mi in range(self.m_dim):
                    term: Term = {(mi, word): F(1)}
                    for tk, v in self._twist(mi, beta, alpha).items():
                        _acc(term, tk, -sign * v)
                    if term:
                        vectors.append(self.vector(p, term))
        sub = Subspace.from_vectors(self.dim(p), vectors)
        self._rels[key] = sub
        return sub

    def rel_full(self, p: int, signed: bool = True) -> Subspace:
        return self.rel_coeff(p).sum(self.rel_natural(p, signed))


def build_weil(c, h: Optional[HopfAlgebra] = None,
               m: Optional[SAYDModule] = None, max_degree: int = 6,
               w_cap: Optional[int] = None) -> WeilBundle:
    """Enumerate word bases up to ``max_degree`` and wrap the operators.

    ``c`` may be a bare coalgebra or a module coalgebra; the latter is
    required when coefficients (h, m) are given.
    """
    if isinstance(c, ModuleCoalgebra):
        coalgebra, act = c.coalgebra, c.act
    else:
        coalgebra, act = c, None
    if m is not None and (h is None or act is None):
        raise ValueError("coefficients require a Hopf algebra acting on C")
    bundle = WeilBundle(coalgebra, h, m, max_degree, w_cap, act)
    cdim = coalgebra.dim
    letters = ([(I, ci) for ci in range(cdim)]
               + [(W, ci) for ci in range(cdim)])
    by_degree: Dict[int, List[Word]] = {p: []
                                        for p in range(1, max_degree + 1)}

    def extend(word: Word, deg: int, wc: int) -> None:
        if word:
            by_degree[deg].append(word)
        for letter in letters:
            nd = deg + letter_degree(letter)
            nc = wc + letter[0]
            if nd <= max_degree and (w_cap is None or nc <= w_cap):
                extend(word + (letter,), nd, nc)

    extend((), 0, 0)
    for p, ws in by_degree.items():
        ws.sort()
        bundle.words[p] = ws
        for i, w in enumerate(ws):
            bundle.windex[w] = i
    return bundle


# ---------------------------------------------------------------------------
# block masks and submatrices
# ---------------------------------------------------------------------------

def submatrix(mat: SparseMatrix, rows: Sequence[int],
              cols: Sequence[int]) -> SparseMatrix:
    rsel = {r: i for i, r in enumerate(rows)}
    csel = {c: i for i, c in enumerate(cols)}
    entries = {(rsel[r], csel[c]): v for (r, c), v in mat.entries.items()
               if r in rsel and c in csel}
    return SparseMatrix(len(rows), len(cols), entries)


def mask_le(bundle: WeilBundle, p: int, n: Optional[int]) -> List[int]:
    """Coordinates of degree p with w-count <= n (all if n is None)."""
    return [i for i, c in enumerate(bundle.coord_w_counts(p))
            if n is None or c <= n]


def mask_eq(bundle: WeilBundle, p: int, n: int) -> List[int]:
    return [i for i, c in enumerate(bundle.coord_w_counts(p)) if c == n]


def mask_ge(bundle: WeilBundle, p: int, n: int) -> List[int]:
    return [i for i, c in enumerate(bundle.coord_w_counts(p)) if c >= n]


def _restrict_subspace(sub: Subspace, mask: Sequence[int]) -> List[Vector]:
    """Relation vectors supported on a w-count-homogeneous mask."""
    sel = {c: i for i, c in enumerate(mask)}
    out = []
    for v in sub.basis.columns():
        if all(i in sel for i in v):
            out.append({sel[i]: x for i, x in v.items()})
    return out


# ---------------------------------------------------------------------------
# natural quotients and truncation-tower complexes
# ---------------------------------------------------------------------------

def natural_quotient(bundle: WeilBundle, flavor: str, signed: bool = True
                     ) -> Dict[int, QuotientSpace]:
    """Per-degree quotient spaces for one relation flavor.

    ``commutator``: (twisted) commutator span only; ``coeff``: tensoring
    over H plus twisted commutators; ``mod_im_d``: image of d;
    ``mod_one_minus_t``: image of 1 - t.
    """
    out: Dict[int, QuotientSpace] = {}
    for p in range(1, bundle.max_degree + 1):
        dim = bundle.dim(p)
        if flavor == "commutator":
            rel = bundle.rel_natural(p, signed)
        elif flavor == "coeff":
            rel = bundle.rel_full(p, signed)
        elif flavor == "mod_im_d":
            dm = bundle.d_mat(p - 1)
            rel = Subspace.from_vectors(
                dim, dm.columns() if dm is not None else [])
        elif flavor == "mod_one_minus_t":
            one = SparseMatrix.identity(dim)
            rel = Subspace.from_vectors(dim,
                                        (one - bundle.t_mat(p)).columns())
        else:
            raise ValueError(f"unknown flavor {flavor!r}")
        out[p] = quotient(dim, rel)
    return out


@dataclass
class QuotientComplex:
    """A per-degree quotient of masked word coordinates with partial."""

    complex: GradedComplex
    quots: Dict[int, QuotientSpace]
    masks: Dict[int, List[int]]


def _masked_quotient_complex(bundle: WeilBundle,
                             masks: Dict[int, List[int]],
                             signed: bool) -> QuotientComplex:
    quots: Dict[int, QuotientSpace] = {}
    for p, mask in masks.items():
        rel = _restrict_subspace(bundle.rel_full(p, signed), mask)
        quots[p] = quotient(len(mask),
                            Subspace.from_vectors(len(mask), rel))
    diff: Dict[int, SparseMatrix] = {}
    for p in range(1, bundle.max_degree):
        cut = submatrix(bundle.partial_mat(p), masks[p + 1], masks[p])
        diff[p] = quots[p].induced_map_between(quots[p + 1], cut)
    cx = GradedComplex({p: q.dim for p, q in quots.items()}, diff, 1)
    return QuotientComplex(cx, quots, masks)


def tower_complex(bundle: WeilBundle, n: Optional[int],
                  signed: bool = True) -> QuotientComplex:
    """Natural quotient of the w-count <= n truncation with partial;
    n = None gives the untruncated algebra."""
    masks = {p: mask_le(bundle, p, n)
             for p in range(1, bundle.max_degree + 1)}
    return _masked_quotient_complex(bundle, masks, signed)


def ideal_tail_complex(bundle: WeilBundle, n: int,
                       signed: bool = True) -> QuotientComplex:
    """Natural quotient of the w-count >= n part with partial."""
    masks = {p: mask_ge(bundle, p, n)
             for p in range(1, bundle.max_degree + 1)}
    return _masked_quotient_complex(bundle, masks, signed)


def tower_cohomology(bundle: WeilBundle, n: Optional[int] = None,
                     signed: bool = True) -> Dict[int, int]:
    cx = tower_complex(bundle, n, signed).complex
    cx.verify()
    return {p: cx.cohomology(p).dim
            for p in cx.safe_degrees() if p <= bundle.max_degree - 1}


def ideal_tail_cohomology(bundle: WeilBundle, n: int,
                          signed: bool = True) -> Dict[int, int]:
    cx = ideal_tail_complex(bundle, n, signed).complex
    cx.verify()
    return {p: cx.cohomology(p).dim
            for p in cx.safe_degrees() if p <= bundle.max_degree - 1}


# ---------------------------------------------------------------------------
# contracting homotopy
# ---------------------------------------------------------------------------

def contracting_homotopy(bundle: WeilBundle) -> Dict[int, SparseMatrix]:
    """Normalized homotopy H' with d H' + H' d = id in all degrees.

    The raw derivation homotopy (w_c -> i_c, i_c -> 0) satisfies
    dH + Hd = l . id on words of letter count l; each column is divided
    by the letter count of its source word.
    """
    out: Dict[int, SparseMatrix] = {}
    for p in range(1, bundle.max_degree + 1):
        raw = bundle.homotopy_mat(p)
        entries = {}
        for (r, c), v in raw.entries.items():
            _, word = bundle.uncoord(p, c)
            entries[(r, c)] = v / len(word)
        out[p] = SparseMatrix(raw.rows, raw.cols, entries)
    return out


def verify_homotopy(bundle: WeilBundle) -> List[str]:
    """Exact matrix check of d H' + H' d = id where both sides exist."""
    if bundle.w_cap is not None:
        raise ValueError("the contracting homotopy needs the uncapped algebra")
    hp = contracting_homotopy(bundle)
    bad = []
    for p in range(1, bundle.max_degree):
        lhs = hp[p + 1] @ bundle.d_mat(p)
        if p > 1:
            lhs = lhs + bundle.d_mat(p - 1) @ hp[p]
        if lhs != SparseMatrix.identity(bundle.dim(p)):
            bad.append(f"dH' + H'd != id in degree {p}")
    return bad


# ---------------------------------------------------------------------------
# four-term sequences
# ---------------------------------------------------------------------------

def sequence_check(bundle: WeilBundle, which: str, n: Optional[int] = None,
                   signed: bool = True) -> Dict[int, Dict[str, bool]]:
    """Exactness of 0 -> V_nat -N-> V -(t-1)-> V -nat-> V_nat -> 0 per
    degree, where V_nat is V modulo the twisted trace relations.

    ``which`` selects the ambient V: ``"comw1"`` uses the w-count <= n
    truncation (all of it when n is None), ``"comi1"`` the w-count >= n
    ideal part (n defaults to 1).
    """
    report: Dict[int, Dict[str, bool]] = {}
    for p in range(1, bundle.max_degree):
        if which == "comw1":
            mask = mask_le(bundle, p, n)
        elif which == "comi1":
            mask = mask_ge(bundle, p, n if n is not None else 1)
        else:
            raise ValueError(f"unknown sequence {which!r}")
        dim = len(mask)
        # the ambient of the sequence is V = M (x)_H (masked words)
        coeff = quotient(dim, Subspace.from_vectors(
            dim, _restrict_subspace(bundle.rel_coeff(p), mask)))
        t = coeff.induced_map(submatrix(bundle.t_mat(p), mask, mask))
        nm = coeff.induced_map(submatrix(bundle.n_mat(p), mask, mask))
        one = SparseMatrix.identity(coeff.dim)
        tm1 = t - one
        rel = Subspace.from_vectors(
            coeff.dim,
            [coeff.project(v) for v in _restrict_subspace(
                bundle.rel_natural(p, signed), mask)])
        quot = quotient(coeff.dim, rel)
        im_n = Subspace.from_vectors(coeff.dim, nm.columns())
        im_tm1 = Subspace.from_vectors(coeff.dim, tm1.columns())
        report[p] = {
            "N_kills_relations": all(not nm.apply(v)
                                     for v in rel.basis.columns()),
            "N_injective_on_quotient": rank(nm @ quot.section) == quot.dim,
            "ker_tm1_eq_im_N": im_n == kernel_basis(tm1),
            "im_tm1_eq_ker_nat": im_tm1 == rel,
        }
    return report


# ---------------------------------------------------------------------------
# w-count-graded form complexes: A_n = block_n / (rel + Im b + Im d)
# ---------------------------------------------------------------------------

@dataclass
class GradedPieceComplexes:
    """The delta-complexes on one w-count block of the natural quotient.

    ``a_quots[p]``: block_n(p) / (relations + Im b + Im d), the reduced
    form space; ``b_quots[p]``: block_n(p) / (relations + Im d +
    Im(1 - kappa)), the middle term of the short exact sequence whose
    connecting homomorphism raises the w-count.
    """

    bundle: WeilBundle
    n: int
    masks: Dict[int, List[int]]
    a_quots: Dict[int, QuotientSpace]
    b_quots: Dict[int, QuotientSpace]
    a_complex: GradedComplex
    b_complex: GradedComplex


def graded_piece_complexes(bundle: WeilBundle, n: int,
                           signed: bool = True) -> GradedPieceComplexes:
    masks = {p: mask_eq(bundle, p, n)
             for p in range(1, bundle.max_degree + 1)}
    a_quots: Dict[int, QuotientSpace] = {}
    b_quots: Dict[int, QuotientSpace] = {}
    for p, mask in masks.items():
        dim = len(mask)
        base = Subspace.from_vectors(
            dim, _restrict_subspace(bundle.rel_coeff(p), mask))
        extra_a: List[Vector] = []
        extra_b: List[Vector] = []
        if p + 1 <= bundle.max_degree:
            bm = submatrix(bundle.hoch_b_mat(p + 1),
                           mask, mask_eq(bundle, p + 1, n + 1))
            extra_a.extend(bm.columns())
        if p >= 2 and n >= 1:
            dm = submatrix(bundle.d_mat(p - 1),
                           mask, mask_eq(bundle, p - 1, n - 1))
            extra_a.extend(dm.columns())
            extra_b.extend(dm.columns())
        km = bundle.kappa_mat(p)
        if km is not None:
            one = SparseMatrix.identity(bundle.dim(p))
            extra_b.extend(submatrix(one - km, mask, mask).columns())
        a_quots[p] = quotient(
            dim, base.sum(Subspace.from_vectors(dim, extra_a)))
        b_quots[p] = quotient(
            dim, base.sum(Subspace.from_vectors(dim, extra_b)))
    a_diff: Dict[int, SparseMatrix] = {}
    b_diff: Dict[int, SparseMatrix] = {}
    # the top degree has an incomplete relation span (boundaries from
    # above the cap are missing), so stop one step early
    for p in range(1, bundle.max_degree - 1):
        dl = submatrix(bundle.delta_mat(p), masks[p + 1], masks[p])
        a_diff[p] = a_quots[p].induced_map_between(a_quots[p + 1], dl)
        b_diff[p] = b_quots[p].induced_map_between(b_quots[p + 1], dl)
    a_cx = GradedComplex({p: q.dim for p, q in a_quots.items()}, a_diff, 1)
    b_cx = GradedComplex({p: q.dim for p, q in b_quots.items()}, b_diff, 1)
    return GradedPieceComplexes(bundle, n, masks, a_quots, b_quots,
                                a_cx, b_cx)


def phi_matrix(low: GradedPieceComplexes, high: GradedPieceComplexes,
               p: int) -> SparseMatrix:
    """Connecting map H^p(A_n) -> H^{p+2}(A_{n+1}) on harvested bases.

    Chase: lift a cocycle from A_n to the middle quotient, apply delta
    there, and solve the result as a b-boundary from the next block.
    """
    bundle = low.bundle
    src = low.a_complex.cohomology(p)
    dst = high.a_complex.cohomology(p + 2)
    bm = submatrix(bundle.hoch_b_mat(p + 2),
                   low.masks[p + 1], high.masks[p + 2])
    b_to_mid = low.b_quots[p + 1].projection @ bm
    dl = submatrix(bundle.delta_mat(p), low.masks[p + 1], low.masks[p])
    cols = []
    for r in src.reps:
        ambient = low.a_quots[p].lift(r)
        image = low.b_quots[p + 1].project(dl.apply(ambient))
        x = solve(b_to_mid, image)
        if x is INCONSISTENT:
            raise IdentityFailure("connecting chase failed: the delta-image "
                                  "is not a boundary from the next block")
        wvec = high.a_quots[p + 2].project(
            {i: c for i, c in enumerate(x) if c})
        coords = dst.coords(wvec)
        if coords is INCONSISTENT:
            raise IdentityFailure("connecting image is not a cocycle class")
        cols.append({i: c for i, c in enumerate(coords) if c})
    return SparseMatrix.from_columns(dst.dim, cols)


def invert_class_matrix(mat: SparseMatrix) -> SparseMatrix:
    """Inverse of a square matrix on cohomology bases (canonical solves)."""
    if mat.rows != mat.cols or rank(mat) != mat.rows:
        raise IdentityFailure("class matrix is not invertible")
    cols = []
    for j in range(mat.rows):
        x = solve(mat, {j: F(1)})
        cols.append({i: c for i, c in enumerate(x) if c})
    return SparseMatrix.from_columns(mat.rows, cols)


# ---------------------------------------------------------------------------
# identification with the cyclic complex of the coefficient coalgebra
# ---------------------------------------------------------------------------

def lambda_quotient_complex(data: CocyclicModuleData
                            ) -> Tuple[GradedComplex,
                                       Dict[int, QuotientSpace]]:
    """Cochain complex C^q / Im(1 - lambda) with the induced differential.

    The coboundary that descends to the coinvariant quotient is b' (the
    alternating sum of cofaces without the wrapping one); its quotient
    cohomology agrees with the cyclic cohomology of the module in
    characteristic zero.
    """
    if data.direction != 1:
        raise ValueError("expected a cocyclic (cochain) module")
    quots: Dict[int, QuotientSpace] = {}
    for q, dim in data.dims.items():
        lam = data.tau[q].scale(F(-1) ** q)
        rel = Subspace.from_vectors(
            dim, (SparseMatrix.identity(dim) - lam).columns())
        quots[q] = quotient(dim, rel)
    diff: Dict[int, SparseMatrix] = {}
    for q in sorted(data.dims):
        fs = data.faces.get(q)
        if fs is None or q + 1 not in quots:
            continue
        bp = None
        for i, f in enumerate(fs[:-1]):
            term = f if i % 2 == 0 else f.scale(F(-1))
            bp = term if bp is None else bp + term
        diff[q] = quots[q].induced_map_between(quots[q + 1], bp)
    return GradedComplex({q: qt.dim for q, qt in quots.items()},
                         diff, 1), quots


def sigma_matrices(bundle: WeilBundle, h: HopfAlgebra, c: ModuleCoalgebra,
                   m: SAYDModule, lam_quots: Dict[int, QuotientSpace],
                   pieces0: GradedPieceComplexes
                   ) -> Dict[int, SparseMatrix]:
    """Identify A_0 in degree p with the lambda-quotient in degree p - 1.

    The w-count-zero block in degree p is spanned by m (x) i_{c_1} ...
    i_{c_p}; sending this to m (x) c_1 (x) ... (x) c_p carries the
    relation span of A_0 into the lambda-quotient relations, so the
    basis bijection descends.  Raises if some relation fails to map.
    """
    cd = c.coalgebra
    out: Dict[int, SparseMatrix] = {}
    for p, mask in pieces0.masks.items():
        q = p - 1
        if q not in lam_quots:
            continue
        space = TensorSpace([m.dim] + [cd.dim] * p)
        coc_quot = quotient(space.size,
                            diagonal_h_relations(h, m, c.act, cd.dim, p))
        cols = []
        for j in mask:
            mi, word = bundle.uncoord(p, j)
            tensor_idx = space.index((mi,) + tuple(ci for _, ci in word))
            cols.append(lam_quots[q].project(
                coc_quot.project({tensor_idx: F(1)})))
        amb = SparseMatrix.from_columns(lam_quots[q].dim, cols)
        for v in pieces0.a_quots[p].relations.basis.columns():
            if amb.apply(v):
                raise IdentityFailure(
                    f"w-count-zero relations do not descend in degree {p}")
        out[p] = amb @ pieces0.a_quots[p].section
    return out


# ---------------------------------------------------------------------------
# the composite class map down to the cyclic complex
# ---------------------------------------------------------------------------

@dataclass
class AlphaSystem:
    """Everything needed to carry truncation-tower classes to cyclic ones."""

    bundle: WeilBundle
    n: int
    tower: QuotientComplex
    pieces: Dict[int, GradedPieceComplexes]
    lam_complex: GradedComplex
    lam_quots: Dict[int, QuotientSpace]
    sigma: Dict[int, SparseMatrix]


def alpha_system(bundle: WeilBundle, n: int, h: HopfAlgebra,
                 c: ModuleCoalgebra, m: SAYDModule,
                 data: CocyclicModuleData) -> AlphaSystem:
    tower = tower_complex(bundle, n)
    pieces = {k: graded_piece_complexes(bundle, k) for k in range(n + 1)}
    lam_cx, lam_quots = lambda_quotient_complex(data)
    sigma = sigma_matrices(bundle, h, c, m, lam_quots, pieces[0])
    return AlphaSystem(bundle, n, tower, pieces, lam_cx, lam_quots, sigma)


def top_piece_matrix(system: AlphaSystem, p: int) -> SparseMatrix:
    """H^p of the truncated tower -> H^p(A_n) via the top w-count part."""
    n = system.n
    src = system.tower.complex.cohomology(p)
    dst = system.pieces[n].a_complex.cohomology(p)
    sel = {c: i for i, c in enumerate(system.tower.masks[p])}
    block = {sel[c]: i for i, c in enumerate(system.pieces[n].masks[p])}
    cols = []
    for r in src.reps:
        ambient = system.tower.quots[p].lift(r)
        top = {block[i]: v for i, v in ambient.items() if i in block}
        coords = dst.coords(system.pieces[n].a_quots[p].project(top))
        if coords is INCONSISTENT:
            raise IdentityFailure("top w-count part is not a cocycle class")
        cols.append({i: c for i, c in enumerate(coords) if c})
    return SparseMatrix.from_columns(dst.dim, cols)


def alpha_matrix(system: AlphaSystem, p: int) -> SparseMatrix:
    """H^p(W_n natural) -> H^{p-1-2n} of the lambda-quotient complex."""
    mat = top_piece_matrix(system, p)
    q = p
    for k in range(system.n, 0, -1):
        phi = phi_matrix(system.pieces[k - 1], system.pieces[k], q - 2)
        mat = invert_class_matrix(phi) @ mat
        q -= 2
    src = system.pieces[0].a_complex.cohomology(q)
    dst = system.lam_complex.cohomology(q - 1)
    cols = []
    for r in src.reps:
        coords = dst.coords(system.sigma[q].apply(r))
        if coords is INCONSISTENT:
            raise IdentityFailure("identified class is not a cocycle class")
        cols.append({i: c for i, c in enumerate(coords) if c})
    return SparseMatrix.from_columns(dst.dim, cols) @ mat


def beta_matrix(bundle: WeilBundle, n: int, p: int,
                signed: bool = True) -> SparseMatrix:
    """Connecting map H^p(W_n natural) -> H^{p+1} of the w-count > n tail."""
    tower = tower_complex(bundle, n, signed)
    tail = ideal_tail_complex(bundle, n + 1, signed)
    src = tower.complex.cohomology(p)
    dst = tail.complex.cohomology(p + 1)
    sel_low = tower.masks[p]
    sel_hi = {c: i for i, c in enumerate(tail.masks[p + 1])}
    pm = bundle.partial_mat(p)
    cols = []
    for r in src.reps:
        ambient_masked = tower.quots[p].lift(r)
        full = {sel_low[i]: v for i, v in ambient_masked.items()}
        image = pm.apply(full)
        tail_part = {sel_hi[i]: v for i, v in image.items() if i in sel_hi}
        low_part = {i: v for i, v in image.items() if i not in sel_hi}
        if not bundle.rel_full(p + 1, signed).contains(low_part):
            raise IdentityFailure("lift of a cocycle is not closed below "
                                  "the ideal part")
        coords = dst.coords(tail.quots[p + 1].project(tail_part))
        if coords is INCONSISTENT:
            raise IdentityFailure("connecting image is not a cocycle class")
        cols.append({i: c for i, c in enumerate(coords) if c})
    return SparseMatrix.from_columns(dst.dim, cols)


def pi_matrix(bundle: WeilBundle, n: int, p: int,
              signed: bool = True) -> SparseMatrix:
    """Truncation projection on classes: H^p(W_n nat) -> H^p(W_{n-1} nat)."""
    hi = tower_complex(bundle, n, signed)
    lo = tower_complex(bundle, n - 1, signed)
    src = hi.complex.cohomology(p)
    dst = lo.complex.cohomology(p)
    sel = {c: i for i, c in enumerate(hi.masks[p])}
    keep = {sel[c]: i for i, c in enumerate(lo.masks[p])}
    cols = []
    for r in src.reps:
        ambient = hi.quots[p].lift(r)
        cut = {keep[i]: v for i, v in ambient.items() if i in keep}
        coords = dst.coords(lo.quots[p].project(cut))
        if coords is INCONSISTENT:
            raise IdentityFailure("projection image is not a cocycle class")
        cols.append({i: c for i, c in enumerate(coords) if c})
    return SparseMatrix.from_columns(dst.dim, cols)


# ---------------------------------------------------------------------------
# transgression-style identities over the ground field
# ---------------------------------------------------------------------------

def cs_word(n: int) -> Word:
    """The degree 2n+1 word i w^n over a one-dimensional coalgebra."""
    return ((I, 0),) + ((W, 0),) * n


def cs_identity_check(max_degree: int = 12
                      ) -> Dict[int, Dict[str, Dict[str, bool]]]:
    """Membership report for the transgression identities over k.

    For each n with 2n + 2 < max_degree the following are checked in
    degree 2n + 2:
      (a) i w^n i = (n+1) i^2 w^n,
      (b) d(sum_k i^2 w^k i w^{n-k-1}) = (n+1) i^2 w^n - i w^n i,
      (c) delta(i w^n) = -(n+1) i^2 w^n,
      (d) b(i w^{n+1}) = -(n+2) i^2 w^n,
    each as a strict identity and modulo the spans Im d + Im(1 - t) and
    Im d + Im(1 - kappa).
    """
    point = Coalgebra(dim=1, delta=[[(0, 0, F(1))]], counit=[F(1)])
    bundle = build_weil(point, max_degree=max_degree)
    ii = (I, 0)
    ww = (W, 0)

    def spans(q: int) -> Dict[str, Subspace]:
        dim = bundle.dim(q)
        dm = bundle.d_mat(q - 1)
        base = Subspace.from_vectors(
            dim, dm.columns() if dm is not None else [])
        one = SparseMatrix.identity(dim)
        tm = Subspace.from_vectors(dim, (one - bundle.t_mat(q)).columns())
        km = bundle.kappa_mat(q)
        ks = (Subspace.from_vectors(dim, (one - km).columns())
              if km is not None else Subspace.zero(dim))
        return {"mod_d_t": base.sum(tm), "mod_d_kappa": base.sum(ks)}

    def vec(terms: Dict[Word, Fraction]) -> Vector:
        out: Vector = {}
        for word, c in terms.items():
            _acc(out, bundle.coord(0, word), c)
        return out

    def diff(a: Vector, b: Vector) -> Vector:
        out = dict(a)
        for k, v in b.items():
            _acc(out, k, -v)
        return out

    report: Dict[int, Dict[str, Dict[str, bool]]] = {}
    n = 1
    # stay below the cap so the kappa span at degree 2n+2 is complete
    while 2 * n + 2 < max_degree:
        q = 2 * n + 2
        sp = spans(q)
        iwni = vec({(ii,) + (ww,) * n + (ii,): F(1)})
        iiwn = vec({(ii, ii) + (ww,) * n: F(1)})

        sigma_terms: Dict[Word, Fraction] = {}
        for k in range(n):
            word = (ii, ii) + (ww,) * k + (ii,) + (ww,) * (n - k - 1)
            for wo, c in bundle.d_word(word).items():
                sigma_terms[wo] = sigma_terms.get(wo, F(0)) + c
        d_sigma = vec(sigma_terms)

        delta_cs = vec(bundle.delta_word(cs_word(n)))
        b_cs = vec({w: c for (_, w), c in
                    bundle.b_elem(0, cs_word(n + 1)).items()})

        def member(v: Vector, sp=sp) -> Dict[str, bool]:
            out = {name: span.contains(v) for name, span in sp.items()}
            out["strict"] = not v
            return out

        scale = {k: F(n + 1) * v for k, v in iiwn.items()}
        report[n] = {
            "iwni_eq_np1_iiwn": member(diff(iwni, scale)),
            "d_sigma_expansion": member(diff(d_sigma, diff(scale, iwni))),
            "delta_cs": member(diff(delta_cs,
                                    {k: -v for k, v in scale.items()})),
            "b_cs": member(diff(b_cs, {k: -F(n + 2) * v
                                       for k, v in iiwn.items()})),
        }
        n += 1
    return report
