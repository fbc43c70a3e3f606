"""(Para)cocyclic and cyclic modules with AYD coefficients.

Builds, on explicit bases:

* the cocyclic module of a module coalgebra, C^n_H(C,M) = M (x)_H C^{(x)n+1},
* the cocyclic module of a module algebra, C^n_H(A,M) = Hom_H(M (x) A^{(x)n+1}, k),
* the cyclic module C_n^H(A,M) = M (x)_H A^{(x)n+1},

verifies all (co)simplicial and cyclic relations as exact matrix identities,
and computes Hochschild / cyclic / periodic (co)homology together with the
S-operation on harvested bases.

The operators are built on the free tensor spaces first and then descended
to the ⊗_H quotient (or restricted to the Hom_H constraint kernel); descent
fails with an explicit witness exactly when the coefficients are not
anti-Yetter-Drinfeld.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .complexes import (
    GradedComplex,
    HarvestedCohomology,
    IdentityFailure,
    TensorSpace,
    build_operator,
    induced_on_cohomology,
    restrict_complex,
    totalize_mixed,
)
from .exactla import (
    DescentFailure,
    Echelon,
    QuotientSpace,
    SparseMatrix,
    Subspace,
    Vector,
    kernel_basis,
    quotient,
    solve,
    INCONSISTENT,
)
from .structures import (
    Element,
    HopfAlgebra,
    ModuleAlgebra,
    ModuleCoalgebra,
    SAYDModule,
)

F = Fraction


class Unstabilized(RuntimeError):
    """Periodic cohomology did not stabilize within the degree cap."""


# ---------------------------------------------------------------------------
# tensor-leg helpers
# ---------------------------------------------------------------------------

def _accumulate(out: Dict[tuple, Fraction], key: tuple, c: Fraction) -> None:
    if c:
        s = out.get(key, F(0)) + c
        if s:
            out[key] = s
        else:
            del out[key]


def diagonal_h_relations(h: HopfAlgebra, m: SAYDModule, leg_act,
                         leg_dim: int, n_legs: int) -> Subspace:
    """Relation span of M (x)_H V^{(x)n_legs}: m.h (x) x - m (x) h(x) diagonal."""
    space = TensorSpace([m.dim] + [leg_dim] * n_legs)
    vectors: List[Vector] = []
    for hi in range(h.dim):
        legs = h.iterated_coproduct({hi: F(1)}, n_legs - 1) if n_legs else None
        for mi in range(m.dim):
            mh = m.act({mi: F(1)}, {hi: F(1)})
            for multi in space.basis():
                x = multi[1:]
                if multi[0] != mi:
                    continue
                vec: Dict[tuple, Fraction] = {}
                for mk, mc in mh.items():
                    _accumulate(vec, (mk,) + x, mc)
                if n_legs == 0:
                    if h.counit[hi]:
                        _accumulate(vec, (mi,), -h.counit[hi])
                else:
                    for hkey, hv in legs.items():
                        terms: List[Tuple[tuple, Fraction]] = [((), hv)]
                        for leg_h, leg_x in zip(hkey, x):
                            nxt = []
                            for pref, coeff in terms:
                                for k, c in leg_act({leg_h: F(1)}, {leg_x: F(1)}).items():
                                    nxt.append((pref + (k,), coeff * c))
                            terms = nxt
                        for key, coeff in terms:
                            _accumulate(vec, (mi,) + key, -coeff)
                if vec:
                    vectors.append({space.index(k): c for k, c in vec.items()})
    return Subspace.from_vectors(space.size, vectors)


# ---------------------------------------------------------------------------
# cocyclic module data
# ---------------------------------------------------------------------------

@dataclass
class CocyclicModuleData:
    """Operators of a (para)(co)cyclic module on quotient/constraint bases.

    direction=+1 (cocyclic): faces[n][i] : C^n -> C^{n+1} (0 <= i <= n+1),
    degens[n][i] : C^{n+1} -> C^n (0 <= i <= n), tau[n] on C^n.
    direction=-1 (cyclic): faces[n][i] : C_n -> C_{n-1} (0 <= i <= n),
    degens[n][i] : C_n -> C_{n+1} (0 <= i <= n), tau[n] on C_n.
    """

    max_degree: int
    dims: Dict[int, int]
    faces: Dict[int, List[SparseMatrix]]
    degens: Dict[int, List[SparseMatrix]]
    tau: Dict[int, SparseMatrix]
    direction: int = 1
    stable_expected: Optional[bool] = None
    # total degree of each quotient coordinate, for graded (truncated) algebras
    coord_degrees: Optional[Dict[int, List[int]]] = None

    def hochschild_b(self, n: int) -> Optional[SparseMatrix]:
        fs = self.faces.get(n)
        if fs is None:
            if self.direction == -1 and n == 0:
                # terminal zero boundary out of degree 0
                return SparseMatrix.zero(0, self.dims[0])
            return None
        out = None
        for i, f in enumerate(fs):
            term = f if i % 2 == 0 else f.scale(F(-1))
            out = term if out is None else out + term
        return out

    def connes_B(self, n: int) -> Optional[SparseMatrix]:
        """Loday-normalized B.

        Cochain case: B : C^{n+1} -> C^n, B = N_n . sigma_{-1} . (1 - lambda),
        with lambda = (-1)^deg tau and sigma_{-1} = sigma_n tau_{n+1}.
        Chain case: B : C_n -> C_{n+1}, B = (1 - lambda) s_{-1} N_n with
        s_{-1} = tau_{n+1} sigma_n.
        """
        if self.direction == 1:
            degs = self.degens.get(n)
            tau_hi = self.tau.get(n + 1)
            tau_lo = self.tau.get(n)
            if degs is None or tau_hi is None or tau_lo is None:
                return None
            dim_hi = self.dims[n + 1]
            dim_lo = self.dims[n]
            lam_hi = tau_hi.scale(F(-1) ** (n + 1))
            lam_lo = tau_lo.scale(F(-1) ** n)
            one_hi = SparseMatrix.identity(dim_hi)
            one_lo = SparseMatrix.identity(dim_lo)
            norm = SparseMatrix.zero(dim_lo, dim_lo)
            p = one_lo
            for _ in range(n + 1):
                norm = norm + p
                p = p @ lam_lo
            sigma_last = degs[n]
            extra = sigma_last @ tau_hi
            return norm @ extra @ (one_hi - lam_hi)
        else:
            degs = self.degens.get(n)
            tau_lo = self.tau.get(n)
            tau_hi = self.tau.get(n + 1)
            if degs is None or tau_lo is None or tau_hi is None:
                return None
            dim_lo = self.dims[n]
            dim_hi = self.dims[n + 1]
            lam_lo = tau_lo.scale(F(-1) ** n)
            lam_hi = tau_hi.scale(F(-1) ** (n + 1))
            one_lo = SparseMatrix.identity(dim_lo)
            one_hi = SparseMatrix.identity(dim_hi)
            norm = SparseMatrix.zero(dim_lo, dim_lo)
            p = one_lo
            for _ in range(n + 1):
                norm = norm + p
                p = p @ lam_lo
            s_extra = tau_hi @ degs[n]
            return (one_hi - lam_hi) @ s_extra @ norm

    def mixed_complex(self) -> GradedComplex:
        b = {n: self.hochschild_b(n) for n in self.dims}
        b = {n: m for n, m in b.items() if m is not None}
        B = {}
        for n in self.dims:
            mat = self.connes_B(n)
            if mat is not None:
                if self.direction == 1:
                    B[n + 1] = mat   # acts out of degree n+1 downward
                else:
                    B[n] = mat
        return GradedComplex(dict(self.dims), b, self.direction, B)


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------

def verify_identities(data: CocyclicModuleData, check_tau_power: bool = False
                      ) -> List[str]:
    """All (co)simplicial + cyclic relations as exact matrix identities.

    Returns the list of violated relations (empty = pass). With
    check_tau_power, also checks tau_n^{n+1} = id.
    """
    bad: List[str] = []
    d = data
    if d.direction == 1:
        _verify_cocyclic(d, bad)
    else:
        _verify_cyclic_chain(d, bad)
    if check_tau_power:
        for n, t in d.tau.items():
            p = SparseMatrix.identity(d.dims[n])
            for _ in range(n + 1):
                p = p @ t
            if p != SparseMatrix.identity(d.dims[n]):
                bad.append(f"tau_{n}^{n + 1} != id")
    return bad


def _verify_cocyclic(d: CocyclicModuleData, bad: List[str]) -> None:
    for n in range(d.max_degree - 1):
        f_lo = d.faces[n]          # C^n -> C^{n+1}, i in 0..n+1
        f_hi = d.faces[n + 1]      # C^{n+1} -> C^{n+2}, i in 0..n+2
        for j in range(n + 3):
            for i in range(j):
                if f_hi[j] @ f_lo[i] != f_hi[i] @ f_lo[j - 1]:
                    bad.append(f"coface relation at n={n}, (i,j)=({i},{j})")
    for n in range(d.max_degree - 1):
        s_lo = d.degens[n]         # C^{n+1} -> C^n, i in 0..n
        s_hi = d.degens[n + 1]     # C^{n+2} -> C^{n+1}, i in 0..n+1
        for i in range(n + 1):
            for j in range(i, n + 1):
                if s_lo[j] @ s_hi[i] != s_lo[i] @ s_hi[j + 1]:
                    bad.append(f"codegeneracy relation at n={n}, (i,j)=({i},{j})")
    for n in range(d.max_degree):
        s = d.degens[n]            # C^{n+1} -> C^n, j in 0..n
        f = d.faces[n]             # C^n -> C^{n+1}, i in 0..n+1
        ident = SparseMatrix.identity(d.dims[n])
        for j in range(n + 1):
            for i in range(n + 2):
                got = s[j] @ f[i]
                if i == j or i == j + 1:
                    want = ident
                elif i < j:
                    if n == 0:
                        continue
                    want = d.faces[n - 1][i] @ d.degens[n - 1][j - 1]
                else:
                    if n == 0:
                        continue
                    want = d.faces[n - 1][i - 1] @ d.degens[n - 1][j]
                if got != want:
                    bad.append(f"mixed relation at n={n}, (i,j)=({i},{j})")
    for n in range(d.max_degree):
        f = d.faces[n]
        t_hi = d.tau[n + 1]
        t_lo = d.tau[n]
        for i in range(1, n + 2):
            if t_hi @ f[i] != f[i - 1] @ t_lo:
                bad.append(f"tau-coface at n={n}, i={i}")
        if t_hi @ f[0] != f[n + 1]:
            bad.append(f"tau-coface at n={n}, i=0")
    for n in range(d.max_degree):
        s = d.degens[n]
        t_lo = d.tau[n]
        t_hi = d.tau[n + 1]
        for i in range(1, n + 1):
            if t_lo @ s[i] != s[i - 1] @ t_hi:
                bad.append(f"tau-codegeneracy at n={n}, i={i}")
        if t_lo @ s[0] != s[n] @ t_hi @ t_hi:
            bad.append(f"tau-codegeneracy at n={n}, i=0")


def _verify_cyclic_chain(d: CocyclicModuleData, bad: List[str]) -> None:
    for n in range(2, d.max_degree + 1):
        f_hi = d.faces[n]          # C_n -> C_{n-1}
        f_lo = d.faces[n - 1]
        for j in range(n + 1):
            for i in range(j):
                if f_lo[i] @ f_hi[j] != f_lo[j - 1] @ f_hi[i]:
                    bad.append(f"face relation at n={n}, (i,j)=({i},{j})")
    for n in range(d.max_degree - 1):
        s_lo = d.degens[n]         # C_n -> C_{n+1}
        s_hi = d.degens[n + 1]
        for i in range(n + 1):
            for j in range(i, n + 1):
                if s_hi[i] @ s_lo[j] != s_hi[j + 1] @ s_lo[i]:
                    bad.append(f"degeneracy relation at n={n}, (i,j)=({i},{j})")
    for n in range(d.max_degree):
        s = d.degens[n]            # C_n -> C_{n+1}
        f = d.faces[n + 1]         # C_{n+1} -> C_n
        ident = SparseMatrix.identity(d.dims[n])
        for j in range(n + 1):
            for i in range(n + 2):
                got = f[i] @ s[j]
                if i == j or i == j + 1:
                    want = ident
                elif i < j:
                    want = d.degens[n - 1][j - 1] @ d.faces[n][i]
                else:
                    want = d.degens[n - 1][j] @ d.faces[n][i - 1]
                if got != want:
                    bad.append(f"mixed relation at n={n}, (i,j)=({i},{j})")
    for n in range(1, d.max_degree + 1):
        f = d.faces[n]
        t = d.tau[n]
        t_lo = d.tau[n - 1]
        for i in range(1, n + 1):
            if f[i] @ t != t_lo @ f[i - 1]:
                bad.append(f"tau-face at n={n}, i={i}")
        if f[0] @ t != f[n]:
            bad.append(f"tau-face at n={n}, i=0")
    for n in range(d.max_degree):
        s = d.degens[n]
        t = d.tau[n]
        t_hi = d.tau[n + 1]
        for i in range(1, n + 1):
            if s[i] @ t != t_hi @ s[i - 1]:
                bad.append(f"tau-degeneracy at n={n}, i={i}")
        if s[0] @ t != t_hi @ t_hi @ s[n]:
            bad.append(f"tau-degeneracy at n={n}, i=0")


# ---------------------------------------------------------------------------
# descent helper
# ---------------------------------------------------------------------------

def verify_descent(ops: List[Tuple[str, SparseMatrix, Subspace, Subspace]]):
    """Check that each (name, op, src_relations, dst_relations) descends.

    Returns (True, []) or (False, [(name, witness_vector), ...]).
    """
    failures = []
    for name, op, src, dst in ops:
        ech = dst.echelon()
        for v in src.basis.columns():
            if not ech.contains(op.apply(v)):
                failures.append((name, v))
                break
    return (not failures, failures)


# ---------------------------------------------------------------------------
# coalgebra cocyclic module
# ---------------------------------------------------------------------------

def build_coalgebra_cocyclic(h: HopfAlgebra, c: ModuleCoalgebra, m: SAYDModule,
                             max_degree: int) -> CocyclicModuleData:
    cd = c.coalgebra
    spaces = {n: TensorSpace([m.dim] + [cd.dim] * (n + 1))
              for n in range(max_degree + 1)}
    rels = {n: diagonal_h_relations(h, m, c.act, cd.dim, n + 1)
            for n in range(max_degree + 1)}
    quots = {n: quotient(spaces[n].size, rels[n]) for n in range(max_degree + 1)}

    def face(n: int, i: int) -> SparseMatrix:
        def fn(multi):
            mi, legs = multi[0], multi[1:]
            out: Dict[tuple, Fraction] = {}
            if i <= n:
                for (a, b), v in cd.delta_elem({legs[i]: F(1)}).items():
                    _accumulate(out, (mi,) + legs[:i] + (a, b) + legs[i + 1:], v)
            else:
                # last coface wraps around through the coaction
                for (hm, m0), cm in m.coact({mi: F(1)}).items():
                    for (c1, c2), cc in cd.delta_elem({legs[0]: F(1)}).items():
                        for k, ca in c.act({hm: F(1)}, {c2: F(1)}).items():
                            _accumulate(out, (m0, c1) + legs[1:] + (k,),
                                        cm * cc * ca)
            return out
        return build_operator(spaces[n], spaces[n + 1], fn)

    def degen(n: int, i: int) -> SparseMatrix:
        def fn(multi):
            mi, legs = multi[0], multi[1:]
            # apply the counit to leg i+1
            v = cd.counit[legs[i + 1]]
            if not v:
                return {}
            return {(mi,) + legs[:i + 1] + legs[i + 2:]: v}
        return build_operator(spaces[n + 1], spaces[n], fn)

    def tau(n: int) -> SparseMatrix:
        def fn(multi):
            mi, legs = multi[0], multi[1:]
            out: Dict[tuple, Fraction] = {}
            for (hm, m0), cm in m.coact({mi: F(1)}).items():
                for k, ca in c.act({hm: F(1)}, {legs[0]: F(1)}).items():
                    _accumulate(out, (m0,) + legs[1:] + (k,), cm * ca)
            return out
        return build_operator(spaces[n], spaces[n], fn)

    dims = {n: quots[n].dim for n in range(max_degree + 1)}
    faces: Dict[int, List[SparseMatrix]] = {}
    degens: Dict[int, List[SparseMatrix]] = {}
    taus: Dict[int, SparseMatrix] = {}
    for n in range(max_degree + 1):
        taus[n] = quots[n].induced_map(tau(n))
        if n < max_degree:
            faces[n] = [quots[n].induced_map_between(quots[n + 1], face(n, i))
                        for i in range(n + 2)]
            degens[n] = [quots[n + 1].induced_map_between(quots[n], degen(n, i))
                         for i in range(n + 1)]
    data = CocyclicModuleData(max_degree, dims, faces, degens, taus, 1)
    bad = verify_identities(data)
    if bad:
        raise IdentityFailure("; ".join(bad[:5]))
    return data


# ---------------------------------------------------------------------------
# algebra-side tensor operators (chain direction), shared by both builders
# ---------------------------------------------------------------------------

def _algebra_chain_ops(h: HopfAlgebra, a: ModuleAlgebra, m: SAYDModule,
                       max_degree: int):
    """Ambient chain operators on M (x) A^{(x)n+1} plus diagonal relations.

    Diagonal H-structure used for (x)_H: m.h (x) x ~ m (x) h(x) with
    h acting on all legs through the H-action on A.
    """
    spaces = {n: TensorSpace([m.dim] + [a.dim] * (n + 1))
              for n in range(max_degree + 1)}
    rels = {n: diagonal_h_relations(h, m, a.h_act, a.dim, n + 1)
            for n in range(max_degree + 1)}
    unit = a.unit_element()

    def face(n: int, i: int) -> SparseMatrix:
        def fn(multi):
            mi, legs = multi[0], multi[1:]
            out: Dict[tuple, Fraction] = {}
            if i < n:
                for k, v in a.mul({legs[i]: F(1)}, {legs[i + 1]: F(1)}).items():
                    _accumulate(out, (mi,) + legs[:i] + (k,) + legs[i + 2:], v)
            else:
                # wrap-around face: twist the last leg by S^{-1}(m^{(-1)})
                for (hm, m0), cm in m.coact({mi: F(1)}).items():
                    sh = h.apply_antipode_inv({hm: F(1)})
                    twisted = a.h_act(sh, {legs[n]: F(1)})
                    for t, ct in twisted.items():
                        for k, v in a.mul({t: F(1)}, {legs[0]: F(1)}).items():
                            _accumulate(out, (m0, k) + legs[1:n], cm * ct * v)
            return out
        return build_operator(spaces[n], spaces[n - 1], fn)

    def degen(n: int, i: int) -> SparseMatrix:
        def fn(multi):
            mi, legs = multi[0], multi[1:]
            out: Dict[tuple, Fraction] = {}
            for u, cu in unit.items():
                _accumulate(out, (mi,) + legs[:i + 1] + (u,) + legs[i + 1:], cu)
            return out
        return build_operator(spaces[n], spaces[n + 1], fn)

    def tau(n: int) -> SparseMatrix:
        def fn(multi):
            mi, legs = multi[0], multi[1:]
            out: Dict[tuple, Fraction] = {}
            for (hm, m0), cm in m.coact({mi: F(1)}).items():
                sh = h.apply_antipode_inv({hm: F(1)})
                for t, ct in a.h_act(sh, {legs[n]: F(1)}).items():
                    _accumulate(out, (m0, t) + legs[:n], cm * ct)
            return out
        return build_operator(spaces[n], spaces[n], fn)

    return spaces, rels, face, degen, tau


def build_algebra_cyclic_homology(h: HopfAlgebra, a: ModuleAlgebra,
                                  m: SAYDModule, max_degree: int
                                  ) -> CocyclicModuleData:
    spaces, rels, face, degen, tau = _algebra_chain_ops(h, a, m, max_degree)
    quots = {n: quotient(spaces[n].size, rels[n]) for n in range(max_degree + 1)}
    dims = {n: quots[n].dim for n in range(max_degree + 1)}
    faces: Dict[int, List[SparseMatrix]] = {}
    degens: Dict[int, List[SparseMatrix]] = {}
    taus: Dict[int, SparseMatrix] = {}
    for n in range(max_degree + 1):
        taus[n] = quots[n].induced_map(tau(n))
        if n >= 1:
            faces[n] = [quots[n].induced_map_between(quots[n - 1], face(n, i))
                        for i in range(n + 1)]
        if n < max_degree:
            degens[n] = [quots[n].induced_map_between(quots[n + 1], degen(n, i))
                         for i in range(n + 1)]
    coord_degrees = None
    if a.degrees is not None:
        # the quotient section picks unit vectors on free ambient coordinates,
        # so each quotient coordinate carries a well-defined total word length
        coord_degrees = {}
        for n in range(max_degree + 1):
            degs = []
            for j in range(quots[n].dim):
                amb = next(iter(quots[n].section.column(j)))
                legs = spaces[n].multi(amb)[1:]
                degs.append(sum(a.degrees[x] for x in legs))
            coord_degrees[n] = degs
    data = CocyclicModuleData(max_degree, dims, faces, degens, taus, -1,
                              coord_degrees=coord_degrees)
    bad = verify_identities(data)
    if bad:
        raise IdentityFailure("; ".join(bad[:5]))
    return data


def build_algebra_cocyclic(h: HopfAlgebra, a: ModuleAlgebra, m: SAYDModule,
                           max_degree: int) -> CocyclicModuleData:
    """Cochain module Hom_H(M (x) A^{(x)n+1}, k) via constraint kernels.

    H acts on M (x) A^{(x)n+1} by h.(m (x) a_0 ... a_n) =
    m S(h^{(1)}) (x) h^{(2)}(a_0) (x) ... ; Hom_H is the space of functionals
    with f(h.x) = eps(h) f(x), realized as the kernel of the stacked
    transposed constraints. Operators are transposes of the chain operators
    restricted to those kernels.
    """
    spaces, _, face, degen, tau = _algebra_chain_ops(h, a, m, max_degree)

    def h_action_matrix(n: int, hi: int) -> SparseMatrix:
        def fn(multi):
            mi, legs = multi[0], multi[1:]
            out: Dict[tuple, Fraction] = {}
            for key, v in h.iterated_coproduct({hi: F(1)}, n + 1).items():
                h1, rest = key[0], key[1:]
                ms = m.act({mi: F(1)}, h.apply_antipode({h1: F(1)}))
                terms: List[Tuple[tuple, Fraction]] = [((), F(1))]
                for leg_h, leg_x in zip(rest, legs):
                    nxt = []
                    for pref, coeff in terms:
                        for k2, c2 in a.h_act({leg_h: F(1)}, {leg_x: F(1)}).items():
                            nxt.append((pref + (k2,), coeff * c2))
                    terms = nxt
                for mk, mc in ms.items():
                    for key2, coeff in terms:
                        _accumulate(out, (mk,) + key2, v * mc * coeff)
            return out
        return build_operator(spaces[n], spaces[n], fn)

    incl: Dict[int, SparseMatrix] = {}
    for n in range(max_degree + 1):
        sz = spaces[n].size
        stacked_entries: Dict[Tuple[int, int], Fraction] = {}
        row_off = 0
        for hi in range(h.dim):
            act_t = h_action_matrix(n, hi).transpose()
            eps = h.counit[hi]
            for (r, cc), v in act_t.entries.items():
                stacked_entries[(row_off + r, cc)] = v
            if eps:
                for d in range(sz):
                    key = (row_off + d, d)
                    s = stacked_entries.get(key, F(0)) - eps
                    if s:
                        stacked_entries[key] = s
                    else:
                        stacked_entries.pop(key, None)
            row_off += sz
        constraint = SparseMatrix(row_off, sz, stacked_entries)
        incl[n] = kernel_basis(constraint).basis

    def restrict(op_t: SparseMatrix, src: int, dst: int) -> SparseMatrix:
        cols = []
        for v in incl[src].columns():
            img = op_t.apply(v)
            x = solve(incl[dst], img)
            if x is INCONSISTENT:
                raise IdentityFailure(
                    "dual operator does not preserve Hom_H constraints")
            cols.append({i: cc for i, cc in enumerate(x) if cc})
        return SparseMatrix.from_columns(incl[dst].cols, cols)

    dims = {n: incl[n].cols for n in range(max_degree + 1)}
    faces: Dict[int, List[SparseMatrix]] = {}
    degens: Dict[int, List[SparseMatrix]] = {}
    taus: Dict[int, SparseMatrix] = {}
    for n in range(max_degree + 1):
        taus[n] = restrict(tau(n).transpose(), n, n)
        if n < max_degree:
            faces[n] = [restrict(face(n + 1, i).transpose(), n, n + 1)
                        for i in range(n + 2)]
            degens[n] = [restrict(degen(n, i).transpose(), n + 1, n)
                         for i in range(n + 1)]
    data = CocyclicModuleData(max_degree, dims, faces, degens, taus, 1)
    bad = verify_identities(data)
    if bad:
        raise IdentityFailure("; ".join(bad[:5]))
    return data


# ---------------------------------------------------------------------------
# cohomology modes
# ---------------------------------------------------------------------------

def cohomology(data: CocyclicModuleData, mode: str,
               degree_cap: Optional[int] = None) -> Dict[int, int]:
    cap = data.max_degree - 1 if degree_cap is None else min(
        degree_cap, data.max_degree - 1)
    if mode == "hochschild":
        cx = GradedComplex(dict(data.dims),
                           {n: m for n, m in
                            ((n, data.hochschild_b(n)) for n in data.dims)
                            if m is not None},
                           data.direction)
        cx.verify()
        return {n: cx.cohomology(n).dim for n in cx.safe_degrees() if n <= cap}
    if mode == "cyclic":
        mixed = data.mixed_complex()
        mixed.verify()
        tot = totalize_mixed(mixed.dims, mixed.diff, mixed.secondary or {},
                             data.direction)
        return {n: tot.cohomology(n).dim for n in tot.safe_degrees() if n <= cap}
    if mode == "periodic":
        return periodic_dims(data, cap)
    raise ValueError(f"unknown mode {mode!r}")


def _total_complex(data: CocyclicModuleData):
    mixed = data.mixed_complex()
    tot = totalize_mixed(mixed.dims, mixed.diff, mixed.secondary or {},
                         data.direction)
    return tot


def s_shift_matrix(data: CocyclicModuleData, tot: GradedComplex,
                   p: int) -> SparseMatrix:
    """Chain-level S: Tot^p -> Tot^{p+2}, the two-column shift (inclusion)."""
    # Tot^{p+2} = C^{p+2} (+) Tot^p; the shift is the inclusion onto the tail.
    head = data.dims.get(p + 2, 0)
    entries = {(head + i, i): F(1) for i in range(tot.dims[p])}
    return SparseMatrix(tot.dims[p + 2], tot.dims[p], entries)


def s_matrix(data: CocyclicModuleData, degree: int) -> SparseMatrix:
    """S: HC^p -> HC^{p+2} on harvested cohomology bases."""
    tot = _total_complex(data)
    src = tot.cohomology(degree)
    dst = tot.cohomology(degree + 2)
    return induced_on_cohomology(src, dst, s_shift_matrix(data, tot, degree))


def periodic_dims(data: CocyclicModuleData, cap: int) -> Dict[int, int]:
    """HP^0 / HP^1 via S-stabilization, or raise Unstabilized."""
    tot = _total_complex(data)
    safe = [n for n in tot.safe_degrees() if n <= cap]
    out: Dict[int, int] = {}
    for parity in (0, 1):
        degs = [n for n in safe if n % 2 == parity]
        if len(degs) < 3 or degs[-1] - 4 < degs[0]:
            raise Unstabilized(f"not enough degrees of parity {parity}")
        p = degs[-1] - 4
        h0 = tot.cohomology(p)
        h1 = tot.cohomology(p + 2)
        h2 = tot.cohomology(p + 4)
        s1 = induced_on_cohomology(h0, h1, s_shift_matrix(data, tot, p))
        s2 = induced_on_cohomology(h1, h2, s_shift_matrix(data, tot, p + 2))
        from .exactla import rank
        if (h0.dim == h1.dim == h2.dim and rank(s1) == h0.dim
                and rank(s2) == h1.dim):
            out[parity] = h2.dim
        else:
            raise Unstabilized(
                f"S not yet an isomorphism near degree {p} (parity {parity})")
    return out


# ---------------------------------------------------------------------------
# lambda-complex cross-check (char 0)
# ---------------------------------------------------------------------------

def lambda_complex_dims(data: CocyclicModuleData,
                        cap: Optional[int] = None) -> Dict[int, int]:
    """(Co)homology of the cyclic (lambda) complex with b.

    Cochain direction: the invariant subcomplex Ker(1 - lambda).
    Chain direction: the coinvariant quotient C_n / Im(1 - lambda).
    Over the rationals both compute cyclic (co)homology.
    """
    cap = data.max_degree - 1 if cap is None else cap
    b = {n: m for n, m in ((n, data.hochschild_b(n)) for n in data.dims)
         if m is not None}
    if data.direction == 1:
        incl: Dict[int, SparseMatrix] = {}
        for n, t in data.tau.items():
            lam = t.scale(F(-1) ** n)
            incl[n] = kernel_basis(
                SparseMatrix.identity(data.dims[n]) - lam).basis
        cx = restrict_complex(b, incl, data.direction)
    else:
        quots = {}
        for n, t in data.tau.items():
            lam = t.scale(F(-1) ** n)
            one = SparseMatrix.identity(data.dims[n])
            quots[n] = quotient(data.dims[n], Subspace.from_vectors(
                data.dims[n], (one - lam).columns()))
        diff: Dict[int, SparseMatrix] = {}
        for n, bn in b.items():
            tgt = quots.get(n - 1)
            if tgt is not None:
                diff[n] = quots[n].induced_map_between(tgt, bn)
            elif bn.rows == 0:
                diff[n] = SparseMatrix.zero(0, quots[n].dim)
        cx = GradedComplex({n: q.dim for n, q in quots.items()}, diff, -1)
    return {n: cx.cohomology(n).dim for n in cx.safe_degrees() if n <= cap}


# ---------------------------------------------------------------------------
# graded pieces (truncated graded algebras)
# ---------------------------------------------------------------------------

def graded_piece(data: CocyclicModuleData, ell: int) -> CocyclicModuleData:
    """Restrict a graded cyclic module to its total-word-length ``ell`` part.

    For a graded algebra truncated above some length cap, the cyclic module
    splits along total word length and only the pieces with length <= cap are
    faithful to the untruncated algebra; this extracts one such piece.
    """
    if data.coord_degrees is None:
        raise ValueError("cyclic module carries no grading data")
    masks = {n: [j for j, d in enumerate(data.coord_degrees[n]) if d == ell]
             for n in data.dims}

    def cut(mat: SparseMatrix, src: int, dst: int) -> SparseMatrix:
        rsel = {r: i for i, r in enumerate(masks[dst])}
        csel = {c: i for i, c in enumerate(masks[src])}
        cset = set(csel)
        entries: Dict[Tuple[int, int], Fraction] = {}
        for (r, c), v in mat.entries.items():
            if c in cset:
                if r not in rsel:
                    raise IdentityFailure(
                        f"operator is not homogeneous of length {ell}")
                entries[(rsel[r], csel[c])] = v
        return SparseMatrix(len(masks[dst]), len(masks[src]), entries)

    dims = {n: len(masks[n]) for n in data.dims}
    faces = {n: [cut(f, n, n + data.direction) for f in fs]
             for n, fs in data.faces.items()}
    degens = {n: [cut(s, *((n + 1, n) if data.direction == 1 else (n, n + 1)))
                  for s in ss]
              for n, ss in data.degens.items()}
    taus = {n: cut(t, n, n) for n, t in data.tau.items()}
    return CocyclicModuleData(data.max_degree, dims, faces, degens, taus,
                              data.direction, data.stable_expected,
                              {n: [ell] * dims[n] for n in data.dims})
