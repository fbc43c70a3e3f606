"""Shipped example structures.

Small, hand-checkable fixtures used by the test suite and the CLI demos:
the trivial Hopf algebra, the group algebra k[Z/2], the 4-dimensional
Sweedler algebra, point and k[Z/2] coalgebras, 1-dimensional AYD modules
over k[Z/2] (stable and non-stable), a comatrix coalgebra, group algebras
as module algebras, and truncated tensor algebras.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple

from .structures import (
    Coalgebra,
    HopfAlgebra,
    ModuleAlgebra,
    ModuleCoalgebra,
    SAYDModule,
)

F = Fraction


def _zeros(n: int) -> List[List[Fraction]]:
    return [[F(0)] * n for _ in range(n)]


# ---------------------------------------------------------------------------
# Hopf algebras
# ---------------------------------------------------------------------------

def trivial_hopf() -> HopfAlgebra:
    """The ground field as a Hopf algebra."""
    return HopfAlgebra(
        dim=1, names=["1"],
        delta=[[(0, 0, F(1))]], counit=[F(1)],
        mu=[[[(0, F(1))]]], unit=[F(1)],
        antipode=[[F(1)]])


def group_algebra_z2() -> HopfAlgebra:
    """k[Z/2] with basis {1, g}; S = id."""
    mu = [[[] for _ in range(2)] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            mu[i][j] = [(i ^ j, F(1))]
    return HopfAlgebra(
        dim=2, names=["1", "g"],
        delta=[[(0, 0, F(1))], [(1, 1, F(1))]],
        counit=[F(1), F(1)],
        mu=mu, unit=[F(1), F(0)],
        antipode=[[F(1), F(0)], [F(0), F(1)]])


def sweedler_hopf() -> HopfAlgebra:
    """The 4-dim Sweedler algebra: g^2=1, x^2=0, xg=-gx, Dx = x(x)1 + g(x)x.

    Basis order: 1, g, x, gx (index = a + 2b for g^a x^b).
    """
    def idx(a: int, b: int) -> int:
        return (a % 2) + 2 * b

    dim = 4
    mu = [[[] for _ in range(dim)] for _ in range(dim)]
    for a, b in product(range(2), repeat=2):
        for c, d in product(range(2), repeat=2):
            if b + d >= 2:
                continue
            sign = F(-1) if (b and c) else F(1)
            mu[idx(a, b)][idx(c, d)] = [(idx(a + c, b + d), sign)]
    delta: List[List[Tuple[int, int, Fraction]]] = [[] for _ in range(dim)]
    for a in range(2):
        delta[idx(a, 0)] = [(idx(a, 0), idx(a, 0), F(1))]
        # Delta(g^a x) = g^a x (x) g^a + g^{a+1} (x) g^a x
        delta[idx(a, 1)] = [(idx(a, 1), idx(a, 0), F(1)),
                            (idx(a + 1, 0), idx(a, 1), F(1))]
    counit = [F(1), F(1), F(0), F(0)]
    # S: 1->1, g->g, x->-gx, gx->x
    antipode = _zeros(dim)
    antipode[0][0] = F(1)
    antipode[1][1] = F(1)
    antipode[3][2] = F(-1)
    antipode[2][3] = F(1)
    return HopfAlgebra(dim=dim, names=["1", "g", "x", "gx"],
                       delta=delta, counit=counit, mu=mu,
                       unit=[F(1), F(0), F(0), F(0)], antipode=antipode)


# ---------------------------------------------------------------------------
# module coalgebras
# ---------------------------------------------------------------------------

def _counit_action(h: HopfAlgebra, dim: int) -> List[List[List[Fraction]]]:
    mats = []
    for i in range(h.dim):
        m = _zeros(dim)
        for d in range(dim):
            m[d][d] = h.counit[i]
        mats.append(m)
    return mats


def point_coalgebra(h: HopfAlgebra) -> ModuleCoalgebra:
    """One grouplike point; H acts through the counit."""
    c = Coalgebra(dim=1, names=["pt"], delta=[[(0, 0, F(1))]], counit=[F(1)])
    return ModuleCoalgebra(c, _counit_action(h, 1))


def coalgebra_z2(h: HopfAlgebra) -> ModuleCoalgebra:
    """Grouplike coalgebra on {1, g}.

    If H = k[Z/2] it acts by left multiplication; a 1-dim H acts trivially.
    """
    c = Coalgebra(dim=2, names=["1", "g"],
                  delta=[[(0, 0, F(1))], [(1, 1, F(1))]],
                  counit=[F(1), F(1)])
    if h.dim == 1:
        return ModuleCoalgebra(c, _counit_action(h, 2))
    if h.dim == 2:
        mats = [[[F(1), F(0)], [F(0), F(1)]],
                [[F(0), F(1)], [F(1), F(0)]]]
        return ModuleCoalgebra(c, mats)
    raise ValueError("no shipped k[Z/2]-coalgebra action for this H")


def comatrix_coalgebra(h: HopfAlgebra, n: int = 2) -> ModuleCoalgebra:
    """n x n comatrix coalgebra: Delta e_ij = sum_k e_ik (x) e_kj."""
    dim = n * n
    def idx(i, j):
        return i * n + j
    delta = [[] for _ in range(dim)]
    counit = [F(0)] * dim
    for i in range(n):
        for j in range(n):
            delta[idx(i, j)] = [(idx(i, k), idx(k, j), F(1)) for k in range(n)]
            counit[idx(i, j)] = F(1) if i == j else F(0)
    c = Coalgebra(dim=dim, delta=delta, counit=counit,
                  names=[f"e{i}{j}" for i in range(n) for j in range(n)])
    return ModuleCoalgebra(c, _counit_action(h, dim))


# ---------------------------------------------------------------------------
# SAYD modules
# ---------------------------------------------------------------------------

def sayd_trivial(h: HopfAlgebra) -> SAYDModule:
    """M = k with counit action and trivial coaction m -> 1 (x) m."""
    action = [[[h.counit[i]]] for i in range(h.dim)]
    one = [i for i, c in enumerate(h.unit) if c]
    coaction = [[(one[0], 0, F(1))]]
    return SAYDModule(dim=1, right_action=action, coaction=coaction)


def sayd_z2_stable() -> SAYDModule:
    """1-dim over k[Z/2]: coaction m -> g (x) m, action via the counit; stable."""
    return SAYDModule(dim=1,
                      right_action=[[[F(1)]], [[F(1)]]],
                      coaction=[[(1, 0, F(1))]])


def sayd_z2_nonstable() -> SAYDModule:
    """1-dim over k[Z/2]: coaction m -> g (x) m, sign action; AYD but not stable."""
    return SAYDModule(dim=1,
                      right_action=[[[F(1)]], [[F(-1)]]],
                      coaction=[[(1, 0, F(1))]])


def sayd_z2_nonayd() -> SAYDModule:
    """2-dim over k[Z/2]: regular action, grading coaction m_j -> g^j (x) m_j.

    A valid module and comodule whose action/coaction compatibility fails, so
    cyclic operators do not descend to the (x)_H quotient.
    """
    return SAYDModule(dim=2,
                      right_action=[[[F(1), F(0)], [F(0), F(1)]],
                                    [[F(0), F(1)], [F(1), F(0)]]],
                      coaction=[[(0, 0, F(1))], [(1, 1, F(1))]])


def sayd_z2_broken() -> SAYDModule:
    """Deliberately corrupted coaction (not a comodule) for failure demos."""
    return SAYDModule(dim=1,
                      right_action=[[[F(1)]], [[F(-1)]]],
                      coaction=[[(1, 0, F(2))]])


def sayd_sweedler_modular_pair(delta_sign: int = 1, sigma_index: int = 1) -> SAYDModule:
    """1-dim module over the Sweedler algebra from a character and a grouplike.

    Action m.h = delta(h) m with delta(g) = delta_sign, delta(x) = 0;
    coaction m -> sigma (x) m with sigma = basis element sigma_index.
    The AYD condition holds for (1, 1) (counit character, sigma = g) and
    (-1, 0) (sign character, sigma = 1), not for the other two combinations.
    """
    d = {0: F(1), 1: F(delta_sign), 2: F(0), 3: F(0)}
    action = [[[d[i]]] for i in range(4)]
    return SAYDModule(dim=1, right_action=action,
                      coaction=[[(sigma_index, 0, F(1))]])


# ---------------------------------------------------------------------------
# module algebras
# ---------------------------------------------------------------------------

def algebra_from_hopf(h: HopfAlgebra, adjoint: bool = True) -> ModuleAlgebra:
    """The underlying algebra of h as an H-module algebra (adjoint action)."""
    if adjoint:
        mats = []
        for i in range(h.dim):
            m = _zeros(h.dim)
            for a in range(h.dim):
                # h.a = h^{(1)} a S(h^{(2)})
                out: Dict[int, Fraction] = {}
                for (h1, h2), v in h.delta_elem({i: F(1)}).items():
                    s = h.apply_antipode({h2: F(1)})
                    prod = h.mul(h.mul({h1: F(1)}, {a: F(1)}), s)
                    for k, c in prod.items():
                        out[k] = out.get(k, F(0)) + v * c
                for k, c in out.items():
                    m[k][a] = c
            mats.append(m)
    else:
        mats = _counit_action(h, h.dim)
    return ModuleAlgebra(dim=h.dim, mu=h.mu, unit=h.unit,
                         h_action=mats, names=h.names)


def conjugation_c_action(h: HopfAlgebra, cdim: int,
                         broken: bool = False) -> List[List[List[Fraction]]]:
    """C = underlying coalgebra of h acting on A = h by c.a = c^{(1)} a S(c^{(2)}).

    With broken=True the antipode is dropped (c.a = ca), violating the
    product-compatibility law -- used as a negative fixture.
    """
    mats = []
    for i in range(cdim):
        m = _zeros(h.dim)
        for a in range(h.dim):
            out: Dict[int, Fraction] = {}
            if broken:
                for k, c in h.mul({i: F(1)}, {a: F(1)}).items():
                    out[k] = out.get(k, F(0)) + c
            else:
                for (c1, c2), v in h.delta_elem({i: F(1)}).items():
                    s = h.apply_antipode({c2: F(1)})
                    prod = h.mul(h.mul({c1: F(1)}, {a: F(1)}), s)
                    for k, c in prod.items():
                        out[k] = out.get(k, F(0)) + v * c
            for k, c in out.items():
                m[k][a] = c
        mats.append(m)
    return mats


def algebra_z2(h: HopfAlgebra, with_c_action: bool = True,
               broken_action: bool = False) -> ModuleAlgebra:
    """A = k[Z/2] as a module algebra; optional coalgebra action by conjugation."""
    g2 = group_algebra_z2()
    a = ModuleAlgebra(dim=2, mu=g2.mu, unit=g2.unit,
                      h_action=_counit_action(h, 2), names=["1", "g"])
    if with_c_action:
        a.c_action = conjugation_c_action(g2, 2, broken=broken_action)
    return a


def free_module_algebra(v_dim: int, cap: int,
                        h: Optional[HopfAlgebra] = None,
                        v_action: Optional[List[List[List[Fraction]]]] = None
                        ) -> ModuleAlgebra:
    """Unital tensor algebra T(V) truncated at word length `cap`.

    Products whose length exceeds the cap are zero; this keeps the algebra
    associative (length is additive). H acts letterwise via `v_action`.
    """
    if h is None:
        h = trivial_hopf()
    words: List[Tuple[int, ...]] = [()]
    frontier = [()]
    for _ in range(cap):
        frontier = [w + (i,) for w in frontier for i in range(v_dim)]
        words.extend(frontier)
    index = {w: i for i, w in enumerate(words)}
    dim = len(words)
    mu = [[[] for _ in range(dim)] for _ in range(dim)]
    for wi, w in enumerate(words):
        for ui, u in enumerate(words):
            cat = w + u
            if len(cat) <= cap:
                mu[wi][ui] = [(index[cat], F(1))]
    unit = [F(0)] * dim
    unit[0] = F(1)
    if v_action is None:
        h_mats = _counit_action(h, dim)
    else:
        h_mats = []
        for hi in range(h.dim):
            m = _zeros(dim)
            for wi, w in enumerate(words):
                # act diagonally: h(v1...vn) = h^{(1)}(v1)...h^{(n)}(vn)
                terms: Dict[Tuple[int, ...], Fraction] = {w: F(1)} if not w else {}
                if w:
                    legs = h.iterated_coproduct({hi: F(1)}, len(w) - 1)
                    for key, v in legs.items():
                        for out_word, coeff in _act_letters(v_action, key, w):
                            terms[out_word] = terms.get(out_word, F(0)) + v * coeff
                else:
                    terms = {(): h.counit[hi]}
                for out_word, coeff in terms.items():
                    if coeff:
                        m[index[out_word]][wi] += coeff
            h_mats.append(m)
    names = ["1"] + ["".join(f"v{i}" for i in w) for w in words[1:]]
    return ModuleAlgebra(dim=dim, mu=mu, unit=unit, h_action=h_mats,
                         names=names, degrees=[len(w) for w in words])


def _act_letters(v_action, h_key: Tuple[int, ...], word: Tuple[int, ...]):
    """All (word, coeff) from applying h-legs h_key to the letters of word."""
    results: List[Tuple[Tuple[int, ...], Fraction]] = [((), F(1))]
    for hleg, letter in zip(h_key, word):
        mat = v_action[hleg]
        nxt = []
        for pref, coeff in results:
            for out_letter, row in enumerate(mat):
                c = row[letter]
                if c:
                    nxt.append((pref + (out_letter,), coeff * c))
        results = nxt
    return results


def primitive_coalgebra(h: Optional[HopfAlgebra] = None,
                        n: int = 2) -> ModuleCoalgebra:
    """A grouplike element with n primitives over it; H acts by the counit."""
    if h is None:
        h = trivial_hopf()
    dim = n + 1
    delta = [[(0, 0, F(1))]]
    for i in range(1, dim):
        delta.append([(0, i, F(1)), (i, 0, F(1))])
    counit = [F(1)] + [F(0)] * n
    c = Coalgebra(dim=dim, names=["u"] + [f"p{i}" for i in range(n)],
                  delta=delta, counit=counit)
    return ModuleCoalgebra(c, _counit_action(h, dim))


def counting_word_algebra(v_dim: int, cap: int,
                          h: Optional[HopfAlgebra] = None) -> ModuleAlgebra:
    """The truncated word algebra acted on by :func:`primitive_coalgebra`.

    The grouplike acts as the identity and the i-th primitive multiplies
    each word by its number of occurrences of the i-th letter.  Counting
    letters is a derivation that preserves word length, so it descends to
    every truncation and the result is a module algebra.
    """
    a = free_module_algebra(v_dim, cap, h)
    words: List[Tuple[int, ...]] = [()]
    frontier = [()]
    for _ in range(cap):
        frontier = [w + (i,) for w in frontier for i in range(v_dim)]
        words.extend(frontier)
    mats = [_zeros(a.dim) for _ in range(v_dim + 1)]
    for wi, w in enumerate(words):
        mats[0][wi][wi] = F(1)
        for i in range(v_dim):
            cnt = sum(1 for letter in w if letter == i)
            if cnt:
                mats[i + 1][wi][wi] = F(cnt)
    return ModuleAlgebra(dim=a.dim, mu=a.mu, unit=a.unit,
                         h_action=a.h_action, c_action=mats,
                         names=a.names, degrees=a.degrees)


def sign_action_z2() -> List[List[List[Fraction]]]:
    """k[Z/2] acting on a 1-dim V by the sign character."""
    return [[[F(1)]], [[F(-1)]]]


# ---------------------------------------------------------------------------
# JSON documents (schema v1) for the shipped fixtures
# ---------------------------------------------------------------------------

def _s(x) -> str:
    return str(x)

def _ser_matrix(m):
    return [[_s(c) for c in row] for row in m]

def _ser_mats(ms):
    return [_ser_matrix(m) for m in ms]

def _ser_delta(delta):
    return [[[i, j, _s(c)] for i, j, c in row] for row in delta]

def _ser_mu(mu):
    return [[[[k, _s(c)] for k, c in cell] for cell in row] for row in mu]

def _ser_hopf(h: HopfAlgebra) -> dict:
    return {
        "dim": h.dim,
        "names": h.names,
        "delta": _ser_delta(h.delta),
        "counit": [_s(c) for c in h.counit],
        "mu": _ser_mu(h.mu),
        "unit": [_s(c) for c in h.unit],
        "antipode": _ser_matrix(h.antipode),
    }

def _ser_coalgebra(mc: ModuleCoalgebra) -> dict:
    c = mc.coalgebra
    return {
        "dim": c.dim,
        "names": c.names,
        "delta": _ser_delta(c.delta),
        "counit": [_s(x) for x in c.counit],
        "h_action": _ser_mats(mc.h_action),
    }

def _ser_algebra(a: ModuleAlgebra) -> dict:
    out = {
        "dim": a.dim,
        "names": a.names,
        "mu": _ser_mu(a.mu),
        "unit": [_s(c) for c in a.unit],
        "h_action": _ser_mats(a.h_action),
    }
    if a.degrees is not None:
        out["degrees"] = a.degrees
    return out

def _ser_sayd(m: SAYDModule) -> dict:
    return {
        "dim": m.dim,
        "names": m.names,
        "right_action": _ser_mats(m.right_action),
        "coaction": [[[hi, mi, _s(c)] for hi, mi, c in row] for row in m.coaction],
    }


def document_point() -> dict:
    """H = k, C = point, A = k[Z/2] with trivial C-action, M = k."""
    h = trivial_hopf()
    c = point_coalgebra(h)
    a = algebra_z2(h, with_c_action=False)
    # point coalgebra acts on A through the counit: c(x) = eps(c) x
    a.c_action = [[[F(1), F(0)], [F(0), F(1)]]]
    return {
        "schema_version": 1,
        "hopf": _ser_hopf(h),
        "coalgebras": {"C": _ser_coalgebra(c)},
        "algebras": {"A": _ser_algebra(a)},
        "sayd_modules": {"M": _ser_sayd(sayd_trivial(h))},
        "actions": [{"coalgebra": "C", "algebra": "A",
                     "matrices": _ser_mats(a.c_action)}],
    }


def document_z2() -> dict:
    """H = C = k[Z/2], A = k[Z/2] with conjugation C-action, stable and
    non-stable 1-dim coefficient modules."""
    h = group_algebra_z2()
    c = coalgebra_z2(h)
    a = algebra_z2(h, with_c_action=True)
    return {
        "schema_version": 1,
        "hopf": _ser_hopf(h),
        "coalgebras": {"C": _ser_coalgebra(c)},
        "algebras": {"A": _ser_algebra(a)},
        "sayd_modules": {"M_stable": _ser_sayd(sayd_z2_stable()),
                         "M_sign": _ser_sayd(sayd_z2_nonstable())},
        "actions": [{"coalgebra": "C", "algebra": "A",
                     "matrices": _ser_mats(a.c_action)}],
    }


def document_sweedler() -> dict:
    """H = Sweedler 4-dim algebra, A = H adjointly, modular-pair coefficients."""
    h = sweedler_hopf()
    a = algebra_from_hopf(h, adjoint=True)
    return {
        "schema_version": 1,
        "hopf": _ser_hopf(h),
        "coalgebras": {},
        "algebras": {"A": _ser_algebra(a)},
        "sayd_modules": {"M": _ser_sayd(sayd_sweedler_modular_pair())},
        "actions": [],
    }
