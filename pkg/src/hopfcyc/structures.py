"""Finite-dimensional algebraic input structures.

Coalgebras, Hopf algebras with invertible antipode, (stable)
anti-Yetter-Drinfeld modules, module algebras and module coalgebras, all
given by rational structure constants and validated by direct contraction.

Conventions
-----------
* elements are sparse dicts ``{basis_index: Fraction}``
* ``delta[k]`` is a list of ``(i, j, c)`` with Delta(e_k) = sum c e_i (x) e_j
* matrices are dense row-lists ``mat[r][c]``: the image of e_c is
  sum_r mat[r][c] e_r
* SAYD coaction ``coaction[m]`` lists ``(h, m', c)`` meaning
  Delta_M(e_m) = sum c e_h (x) e_{m'}  (i.e. m^{(-1)} (x) m^{(0)})

Structure constants are stored densely (input dims are tiny); everything
big lives in the operator matrices built downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactla import INCONSISTENT, SparseMatrix, solve

F = Fraction
Element = Dict[int, Fraction]
Tensor = Dict[tuple, Fraction]

# ---------------------------------------------------------------------------
# element / tensor helpers
# ---------------------------------------------------------------------------

def _clean(t):
    return {k: v for k, v in t.items() if v}

def unit_elem(i: int) -> Element:
    return {i: F(1)}

def mat_apply(mat: Sequence[Sequence[Fraction]], x: Element) -> Element:
    out: Element = {}
    for c, xc in x.items():
        for r, row in enumerate(mat):
            v = row[c]
            if v:
                out[r] = out.get(r, F(0)) + v * xc
    return _clean(out)

def mat_mul_dense(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[r][t] * b[t][c] for t in range(k)) for c in range(m)]
            for r in range(n)]

def mat_identity(n):
    return [[F(1) if r == c else F(0) for c in range(n)] for r in range(n)]

def mat_inverse(mat):
    """Exact inverse of a dense square matrix, or None if singular."""
    n = len(mat)
    cols = []
    m = SparseMatrix.from_rows(mat)
    for j in range(n):
        e = [F(1) if i == j else F(0) for i in range(n)]
        x = solve(m, e)
        if x is INCONSISTENT:
            return None
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]

def tensor_scale(t: Tensor, c: Fraction) -> Tensor:
    return {k: c * v for k, v in t.items() if c * v}

def tensor_add(a: Tensor, b: Tensor) -> Tensor:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, F(0)) + v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out

def tensor_eq(a: Tensor, b: Tensor) -> bool:
    return _clean(a) == _clean(b)


# ---------------------------------------------------------------------------
# validation reports
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    passed: bool
    violations: List[str] = field(default_factory=list)
    flags: Dict[str, bool] = field(default_factory=dict)

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.passed and other.passed,
                                self.violations + other.violations,
                                {**self.flags, **other.flags})


# ---------------------------------------------------------------------------
# coalgebras
# ---------------------------------------------------------------------------

@dataclass
class Coalgebra:
    dim: int
    delta: List[List[Tuple[int, int, Fraction]]]
    counit: List[Fraction]
    names: Optional[List[str]] = None

    def delta_elem(self, x: Element) -> Tensor:
        out: Tensor = {}
        for k, xk in x.items():
            for i, j, c in self.delta[k]:
                key = (i, j)
                out[key] = out.get(key, F(0)) + c * xk
        return _clean(out)

    def counit_elem(self, x: Element) -> Fraction:
        return sum((self.counit[k] * xk for k, xk in x.items()), F(0))

    def iterated_coproduct(self, x: Element, n: int) -> Tensor:
        """x^{(1)} (x) ... (x) x^{(n+1)} by left-iterated Delta."""
        cur: Tensor = {(k,): v for k, v in x.items()}
        for _ in range(n):
            nxt: Tensor = {}
            for key, v in cur.items():
                # expand the leftmost leg
                for i, j, c in self.delta[key[0]]:
                    nk = (i, j) + key[1:]
                    nxt[nk] = nxt.get(nk, F(0)) + c * v
            cur = _clean(nxt)
        return cur

    def iterated_coproduct_right(self, x: Element, n: int) -> Tensor:
        cur: Tensor = {(k,): v for k, v in x.items()}
        for _ in range(n):
            nxt: Tensor = {}
            for key, v in cur.items():
                for i, j, c in self.delta[key[-1]]:
                    nk = key[:-1] + (i, j)
                    nxt[nk] = nxt.get(nk, F(0)) + c * v
            cur = _clean(nxt)
        return cur


def validate_coalgebra(c: Coalgebra) -> ValidationReport:
    viol: List[str] = []
    for k in range(c.dim):
        e = unit_elem(k)
        left = c.iterated_coproduct(e, 2)
        right = c.iterated_coproduct_right(e, 2)
        if not tensor_eq(left, right):
            viol.append(f"coassociativity fails at basis index {k}")
        # (eps (x) id) Delta = id = (id (x) eps) Delta
        l: Element = {}
        r: Element = {}
        for (i, j), v in c.delta_elem(e).items():
            l[j] = l.get(j, F(0)) + c.counit[i] * v
            r[i] = r.get(i, F(0)) + c.counit[j] * v
        if _clean(l) != e or _clean(r) != e:
            viol.append(f"counit axiom fails at basis index {k}")
    return ValidationReport(not viol, viol)


# ---------------------------------------------------------------------------
# Hopf algebras
# ---------------------------------------------------------------------------

@dataclass
class HopfAlgebra(Coalgebra):
    mu: List[List[List[Tuple[int, Fraction]]]] = None  # mu[i][j] -> [(k, c)]
    unit: List[Fraction] = None
    antipode: List[List[Fraction]] = None
    antipode_inv: Optional[List[List[Fraction]]] = None

    def __post_init__(self):
        if self.antipode_inv is None and self.antipode is not None:
            self.antipode_inv = mat_inverse(self.antipode)

    def mul(self, x: Element, y: Element) -> Element:
        out: Element = {}
        for i, xi in x.items():
            for j, yj in y.items():
                for k, c in self.mu[i][j]:
                    out[k] = out.get(k, F(0)) + c * xi * yj
        return _clean(out)

    def unit_element(self) -> Element:
        return _clean({i: c for i, c in enumerate(self.unit)})

    def apply_antipode(self, x: Element) -> Element:
        return mat_apply(self.antipode, x)

    def apply_antipode_inv(self, x: Element) -> Element:
        return mat_apply(self.antipode_inv, x)


def validate_hopf(h: HopfAlgebra) -> ValidationReport:
    rep = validate_coalgebra(h)
    viol = list(rep.violations)
    one = h.unit_element()
    basis = [unit_elem(i) for i in range(h.dim)]
    # associativity and unit laws
    for i in range(h.dim):
        for j in range(h.dim):
            for k in range(h.dim):
                lhs = h.mul(h.mul(basis[i], basis[j]), basis[k])
                rhs = h.mul(basis[i], h.mul(basis[j], basis[k]))
                if lhs != rhs:
                    viol.append(f"associativity fails at ({i},{j},{k})")
    for i in range(h.dim):
        if h.mul(one, basis[i]) != basis[i] or h.mul(basis[i], one) != basis[i]:
            viol.append(f"unit law fails at {i}")
    # Delta and eps are algebra maps
    for i in range(h.dim):
        for j in range(h.dim):
            prod = h.mul(basis[i], basis[j])
            lhs = h.delta_elem(prod)
            rhs: Tensor = {}
            for (a, b), v in h.delta_elem(basis[i]).items():
                for (c_, d), w in h.delta_elem(basis[j]).items():
                    for p, cp in h.mu[a][c_]:
                        for q, cq in h.mu[b][d]:
                            key = (p, q)
                            rhs[key] = rhs.get(key, F(0)) + v * w * cp * cq
            if not tensor_eq(lhs, rhs):
                viol.append(f"Delta not multiplicative at ({i},{j})")
            if h.counit_elem(prod) != h.counit_elem(basis[i]) * h.counit_elem(basis[j]):
                viol.append(f"counit not multiplicative at ({i},{j})")
    one_sq = _clean({(a, b): va * vb
                     for a, va in one.items() for b, vb in one.items()})
    if not tensor_eq(h.delta_elem(one), one_sq):
        viol.append("Delta(1) != 1 (x) 1")
    # antipode axiom: mu(S (x) id)Delta = unit eps = mu(id (x) S)Delta
    for i in range(h.dim):
        target = _clean({k: h.counit[i] * v for k, v in one.items()})
        l: Element = {}
        r: Element = {}
        for (a, b), v in h.delta_elem(basis[i]).items():
            sa = h.apply_antipode(unit_elem(a))
            for k, c in h.mul(sa, unit_elem(b)).items():
                l[k] = l.get(k, F(0)) + v * c
            sb = h.apply_antipode(unit_elem(b))
            for k, c in h.mul(unit_elem(a), sb).items():
                r[k] = r.get(k, F(0)) + v * c
        if _clean(l) != target or _clean(r) != target:
            viol.append(f"antipode axiom fails at {i}")
    # invertibility
    if h.antipode_inv is None:
        viol.append("antipode is not invertible")
    else:
        if (mat_mul_dense(h.antipode, h.antipode_inv) != mat_identity(h.dim)
                or mat_mul_dense(h.antipode_inv, h.antipode) != mat_identity(h.dim)):
            viol.append("antipode_inv is not a two-sided inverse")
    return ValidationReport(not viol, viol)


def antipode_antihomomorphism(h: HopfAlgebra) -> bool:
    """S(xy) = S(y)S(x) on all basis pairs (corollary, used as a test)."""
    for i in range(h.dim):
        for j in range(h.dim):
            lhs = h.apply_antipode(h.mul(unit_elem(i), unit_elem(j)))
            rhs = h.mul(h.apply_antipode(unit_elem(j)),
                        h.apply_antipode(unit_elem(i)))
            if lhs != rhs:
                return False
    return True


# ---------------------------------------------------------------------------
# SAYD modules
# ---------------------------------------------------------------------------

@dataclass
class SAYDModule:
    dim: int
    right_action: List[List[List[Fraction]]]  # per H index: matrix m -> m.h
    coaction: List[List[Tuple[int, int, Fraction]]]  # per M index: [(h, m, c)]
    names: Optional[List[str]] = None

    def act(self, x: Element, h_elem: Element) -> Element:
        out: Element = {}
        for hidx, hc in h_elem.items():
            y = mat_apply(self.right_action[hidx], x)
            for k, v in y.items():
                out[k] = out.get(k, F(0)) + hc * v
        return _clean(out)

    def coact(self, x: Element) -> Tensor:
        """m^{(-1)} (x) m^{(0)} as {(h_idx, m_idx): c}."""
        out: Tensor = {}
        for k, xk in x.items():
            for hi, mi, c in self.coaction[k]:
                key = (hi, mi)
                out[key] = out.get(key, F(0)) + c * xk
        return _clean(out)


def validate_sayd(h: HopfAlgebra, m: SAYDModule) -> ValidationReport:
    viol: List[str] = []
    basis = [unit_elem(i) for i in range(m.dim)]
    one = h.unit_element()
    # right module axioms
    for i in range(m.dim):
        if m.act(basis[i], one) != basis[i]:
            viol.append(f"unit action fails at m{i}")
        for a in range(h.dim):
            for b in range(h.dim):
                lhs = m.act(basis[i], h.mul(unit_elem(a), unit_elem(b)))
                rhs = m.act(m.act(basis[i], unit_elem(a)), unit_elem(b))
                if lhs != rhs:
                    viol.append(f"action associativity fails at (m{i},h{a},h{b})")
    # left comodule axioms
    for i in range(m.dim):
        co = m.coact(basis[i])
        ce: Element = {}
        for (hi, mi), c in co.items():
            ce[mi] = ce.get(mi, F(0)) + c * h.counit[hi]
        if _clean(ce) != basis[i]:
            viol.append(f"comodule counit fails at m{i}")
        lhs: Tensor = {}
        for (hi, mi), c in co.items():
            for (a, b), v in h.delta_elem(unit_elem(hi)).items():
                key = (a, b, mi)
                lhs[key] = lhs.get(key, F(0)) + c * v
        rhs: Tensor = {}
        for (hi, mi), c in co.items():
            for (hj, mj), d in m.coact(unit_elem(mi)).items():
                key = (hi, hj, mj)
                rhs[key] = rhs.get(key, F(0)) + c * d
        if not tensor_eq(lhs, rhs):
            viol.append(f"comodule coassociativity fails at m{i}")
    # AYD: (mh)^{(-1)} (x) (mh)^{(0)} = S(h^{(3)}) m^{(-1)} h^{(1)} (x) m^{(0)} h^{(2)}
    ayd = True
    for i in range(m.dim):
        for a in range(h.dim):
            lhs = m.coact(m.act(basis[i], unit_elem(a)))
            rhs: Tensor = {}
            for (h1, h2, h3), v in h.iterated_coproduct(unit_elem(a), 2).items():
                sh3 = h.apply_antipode(unit_elem(h3))
                for (hi, mi), c in m.coact(basis[i]).items():
                    left = h.mul(h.mul(sh3, unit_elem(hi)), unit_elem(h1))
                    right = m.act(unit_elem(mi), unit_elem(h2))
                    for p, cp in left.items():
                        for q, cq in right.items():
                            key = (p, q)
                            rhs[key] = rhs.get(key, F(0)) + v * c * cp * cq
            if not tensor_eq(lhs, rhs):
                ayd = False
                viol.append(f"AYD condition fails at (m{i},h{a})")
    # stability: m^{(0)}.m^{(-1)} = m (recorded flag, not a failure)
    stable = True
    for i in range(m.dim):
        acc: Element = {}
        for (hi, mi), c in m.coact(basis[i]).items():
            for k, v in m.act(unit_elem(mi), unit_elem(hi)).items():
                acc[k] = acc.get(k, F(0)) + c * v
        if _clean(acc) != basis[i]:
            stable = False
    passed = not viol
    return ValidationReport(passed, viol, {"ayd": ayd, "stable": stable})


# ---------------------------------------------------------------------------
# module coalgebras / module algebras
# ---------------------------------------------------------------------------

@dataclass
class ModuleCoalgebra:
    coalgebra: Coalgebra
    h_action: List[List[List[Fraction]]]  # per H basis index: matrix on C

    def act(self, h_elem: Element, x: Element) -> Element:
        out: Element = {}
        for hi, hc in h_elem.items():
            y = mat_apply(self.h_action[hi], x)
            for k, v in y.items():
                out[k] = out.get(k, F(0)) + hc * v
        return _clean(out)


@dataclass
class ModuleAlgebra:
    dim: int
    mu: List[List[List[Tuple[int, Fraction]]]]
    unit: List[Fraction]
    h_action: List[List[List[Fraction]]]
    c_action: Optional[List[List[List[Fraction]]]] = None  # per C basis index
    names: Optional[List[str]] = None
    degrees: Optional[List[int]] = None  # grading, when meaningful

    def mul(self, x: Element, y: Element) -> Element:
        out: Element = {}
        for i, xi in x.items():
            for j, yj in y.items():
                for k, c in self.mu[i][j]:
                    out[k] = out.get(k, F(0)) + c * xi * yj
        return _clean(out)

    def unit_element(self) -> Element:
        return _clean({i: c for i, c in enumerate(self.unit)})

    def h_act(self, h_elem: Element, x: Element) -> Element:
        out: Element = {}
        for hi, hc in h_elem.items():
            y = mat_apply(self.h_action[hi], x)
            for k, v in y.items():
                out[k] = out.get(k, F(0)) + hc * v
        return _clean(out)

    def c_act(self, c_elem: Element, x: Element) -> Element:
        out: Element = {}
        for ci, cc in c_elem.items():
            y = mat_apply(self.c_action[ci], x)
            for k, v in y.items():
                out[k] = out.get(k, F(0)) + cc * v
        return _clean(out)


def _validate_h_module(h: HopfAlgebra, dim: int, act, what: str) -> List[str]:
    viol = []
    one = h.unit_element()
    for i in range(dim):
        e = unit_elem(i)
        if act(one, e) != e:
            viol.append(f"{what}: unit action fails at {i}")
        for a in range(h.dim):
            for b in range(h.dim):
                lhs = act(h.mul(unit_elem(a), unit_elem(b)), e)
                rhs = act(unit_elem(a), act(unit_elem(b), e))
                if lhs != rhs:
                    viol.append(f"{what}: action compatibility fails at ({a},{b},{i})")
    return viol


def validate_module_actions(h: HopfAlgebra, c: Optional[ModuleCoalgebra],
                            a: Optional[ModuleAlgebra]) -> ValidationReport:
    viol: List[str] = []
    if c is not None:
        viol += _validate_h_module(h, c.coalgebra.dim, c.act, "module coalgebra")
        # (hc)^{(1)} (x) (hc)^{(2)} = h^{(1)}c^{(1)} (x) h^{(2)}c^{(2)}
        for hi in range(h.dim):
            for ci in range(c.coalgebra.dim):
                lhs = c.coalgebra.delta_elem(c.act(unit_elem(hi), unit_elem(ci)))
                rhs: Tensor = {}
                for (h1, h2), v in h.delta_elem(unit_elem(hi)).items():
                    for (c1, c2), w in c.coalgebra.delta_elem(unit_elem(ci)).items():
                        for p, cp in c.act(unit_elem(h1), unit_elem(c1)).items():
                            for q, cq in c.act(unit_elem(h2), unit_elem(c2)).items():
                                key = (p, q)
                                rhs[key] = rhs.get(key, F(0)) + v * w * cp * cq
                if not tensor_eq(lhs, rhs):
                    viol.append(f"coalgebra action not comultiplicative at (h{hi},c{ci})")
        # counit compatibility eps(hc) = eps(h)eps(c)
        for hi in range(h.dim):
            for ci in range(c.coalgebra.dim):
                lhs = c.coalgebra.counit_elem(c.act(unit_elem(hi), unit_elem(ci)))
                if lhs != h.counit[hi] * c.coalgebra.counit[ci]:
                    viol.append(f"coalgebra action breaks counit at (h{hi},c{ci})")
    if a is not None:
        viol += _validate_h_module(h, a.dim, a.h_act, "module algebra")
        # h(xy) = h^{(1)}(x) h^{(2)}(y)
        for hi in range(h.dim):
            for x in range(a.dim):
                for y in range(a.dim):
                    lhs = a.h_act(unit_elem(hi), a.mul(unit_elem(x), unit_elem(y)))
                    rhs: Element = {}
                    for (h1, h2), v in h.delta_elem(unit_elem(hi)).items():
                        prod = a.mul(a.h_act(unit_elem(h1), unit_elem(x)),
                                     a.h_act(unit_elem(h2), unit_elem(y)))
                        for k, cv in prod.items():
                            rhs[k] = rhs.get(k, F(0)) + v * cv
                    if lhs != _clean(rhs):
                        viol.append(f"algebra H-action breaks products at (h{hi},{x},{y})")
        if a.c_action is not None and c is not None:
            cd = c.coalgebra
            # c(xy) = c^{(1)}(x) c^{(2)}(y)
            for ci in range(cd.dim):
                for x in range(a.dim):
                    for y in range(a.dim):
                        lhs = a.c_act(unit_elem(ci), a.mul(unit_elem(x), unit_elem(y)))
                        rhs: Element = {}
                        for (c1, c2), v in cd.delta_elem(unit_elem(ci)).items():
                            prod = a.mul(a.c_act(unit_elem(c1), unit_elem(x)),
                                         a.c_act(unit_elem(c2), unit_elem(y)))
                            for k, cv in prod.items():
                                rhs[k] = rhs.get(k, F(0)) + v * cv
                        if lhs != _clean(rhs):
                            viol.append(f"C-action breaks products at (c{ci},{x},{y})")
            # (h(c))(x) = h(c(x))  -- with H acting on A too, the equivariant form
            for hi in range(h.dim):
                for ci in range(cd.dim):
                    for x in range(a.dim):
                        lhs = a.c_act(c.act(unit_elem(hi), unit_elem(ci)), unit_elem(x))
                        rhs = a.h_act(unit_elem(hi), a.c_act(unit_elem(ci), unit_elem(x)))
                        if lhs != rhs:
                            viol.append(f"(h(c))(a)=h(c(a)) fails at (h{hi},c{ci},{x})")
    return ValidationReport(not viol, viol)


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------

SCHEMA_VERSION = 1


class ParseError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _scalar(s, path: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(path, f"bad scalar {s!r}: {exc}") from None

def _scalar_list(xs, path: str) -> List[Fraction]:
    return [_scalar(x, f"{path}[{i}]") for i, x in enumerate(xs)]

def _matrix(mat, n_rows, n_cols, path: str) -> List[List[Fraction]]:
    if len(mat) != n_rows:
        raise ParseError(path, f"expected {n_rows} rows, got {len(mat)}")
    out = []
    for r, row in enumerate(mat):
        if len(row) != n_cols:
            raise ParseError(f"{path}[{r}]", f"expected {n_cols} cols")
        out.append(_scalar_list(row, f"{path}[{r}]"))
    return out

def _delta(raw, dim, path: str):
    if len(raw) != dim:
        raise ParseError(path, f"expected {dim} entries")
    out = []
    for k, terms in enumerate(raw):
        row = []
        for t, term in enumerate(terms):
            i, j, c = term
            if not (0 <= i < dim and 0 <= j < dim):
                raise ParseError(f"{path}[{k}][{t}]", f"index ({i},{j}) out of range")
            row.append((i, j, _scalar(c, f"{path}[{k}][{t}]")))
        out.append(row)
    return out

def _mu(raw, dim, path: str):
    if len(raw) != dim:
        raise ParseError(path, f"expected {dim} rows")
    out = []
    for i, row in enumerate(raw):
        if len(row) != dim:
            raise ParseError(f"{path}[{i}]", f"expected {dim} cols")
        orow = []
        for j, terms in enumerate(row):
            cell = []
            for t, term in enumerate(terms):
                k, c = term
                if not 0 <= k < dim:
                    raise ParseError(f"{path}[{i}][{j}][{t}]", f"index {k} out of range")
                cell.append((k, _scalar(c, f"{path}[{i}][{j}][{t}]")))
            orow.append(cell)
        out.append(orow)
    return out

def _actions(raw, h_dim, dim, path: str):
    if len(raw) != h_dim:
        raise ParseError(path, f"expected {h_dim} action matrices")
    return [_matrix(m, dim, dim, f"{path}[{i}]") for i, m in enumerate(raw)]


@dataclass
class StructureBundle:
    hopf: HopfAlgebra
    coalgebras: Dict[str, ModuleCoalgebra]
    algebras: Dict[str, ModuleAlgebra]
    sayd_modules: Dict[str, SAYDModule]


def load_structure(document: str) -> StructureBundle:
    """Parse and cross-resolve a JSON definition document (schema v1)."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"invalid JSON: {exc}") from None
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError("$.schema_version",
                         f"unsupported schema_version {doc.get('schema_version')!r}")
    hraw = doc.get("hopf")
    if hraw is None:
        raise ParseError("$.hopf", "missing")
    hd = int(hraw["dim"])
    hopf = HopfAlgebra(
        dim=hd,
        names=hraw.get("names"),
        delta=_delta(hraw["delta"], hd, "$.hopf.delta"),
        counit=_scalar_list(hraw["counit"], "$.hopf.counit"),
        mu=_mu(hraw["mu"], hd, "$.hopf.mu"),
        unit=_scalar_list(hraw["unit"], "$.hopf.unit"),
        antipode=_matrix(hraw["antipode"], hd, hd, "$.hopf.antipode"),
        antipode_inv=(_matrix(hraw["antipode_inv"], hd, hd, "$.hopf.antipode_inv")
                      if "antipode_inv" in hraw else None),
    )
    coalgebras: Dict[str, ModuleCoalgebra] = {}
    for name, raw in doc.get("coalgebras", {}).items():
        p = f"$.coalgebras.{name}"
        d = int(raw["dim"])
        coa = Coalgebra(dim=d, names=raw.get("names"),
                        delta=_delta(raw["delta"], d, f"{p}.delta"),
                        counit=_scalar_list(raw["counit"], f"{p}.counit"))
        coalgebras[name] = ModuleCoalgebra(
            coa, _actions(raw["h_action"], hd, d, f"{p}.h_action"))
    algebras: Dict[str, ModuleAlgebra] = {}
    for name, raw in doc.get("algebras", {}).items():
        p = f"$.algebras.{name}"
        d = int(raw["dim"])
        algebras[name] = ModuleAlgebra(
            dim=d, names=raw.get("names"),
            mu=_mu(raw["mu"], d, f"{p}.mu"),
            unit=_scalar_list(raw["unit"], f"{p}.unit"),
            h_action=_actions(raw["h_action"], hd, d, f"{p}.h_action"),
            degrees=raw.get("degrees"))
    sayd_modules: Dict[str, SAYDModule] = {}
    for name, raw in doc.get("sayd_modules", {}).items():
        p = f"$.sayd_modules.{name}"
        d = int(raw["dim"])
        coaction = []
        for k, terms in enumerate(raw["coaction"]):
            row = []
            for t, (hi, mi, c) in enumerate(terms):
                if not (0 <= hi < hd and 0 <= mi < d):
                    raise ParseError(f"{p}.coaction[{k}][{t}]", "index out of range")
                row.append((hi, mi, _scalar(c, f"{p}.coaction[{k}][{t}]")))
            coaction.append(row)
        sayd_modules[name] = SAYDModule(
            dim=d, names=raw.get("names"),
            right_action=_actions(raw["right_action"], hd, d, f"{p}.right_action"),
            coaction=coaction)
    for entry in doc.get("actions", []):
        cname = entry.get("coalgebra")
        aname = entry.get("algebra")
        if cname not in coalgebras:
            raise ParseError("$.actions", f"unresolved coalgebra {cname!r}")
        if aname not in algebras:
            raise ParseError("$.actions", f"unresolved algebra {aname!r}")
        a = algebras[aname]
        cdim = coalgebras[cname].coalgebra.dim
        a.c_action = _actions(entry["matrices"], cdim, a.dim,
                              f"$.actions[{cname}->{aname}]")
    return StructureBundle(hopf, coalgebras, algebras, sayd_modules)
