"""Sparse exact polynomials over three variable families, plus the Gaussian
differential calculus on them.

Variable keys:
    ('z', i, j)   coordinate j of the i-th replicated Gaussian slot, i in <n>,
                  j >= 0
    ('q', i, j)   off-diagonal entry of a symmetric matrix, canonicalized to
                  i < j; diagonal entries are pinned to 1, matching the
                  unit-diagonal state space of the interpolation measures
    ('N',)        the matrix-size variable of trace-power cumulants

Coefficients are Fractions.  Polynomials are immutable values: every
operation builds a fresh object and the term map is never mutated after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

from .partitions import SetPartition, pair_partitions

Var = tuple
Monomial = tuple  # sorted tuple of (Var, positive exponent)

N_VAR: Var = ("N",)


def zkey(i: int, j: int) -> Var:
    return ("z", i, j)


def qkey(i: int, j: int) -> "Var | None":
    """Canonical key for a symmetric-matrix entry; None for the diagonal,
    which is identically 1."""
    if i == j:
        return None
    return ("q", min(i, j), max(i, j))


def _make_mono(exps: Mapping[Var, int]) -> Monomial:
    return tuple(sorted((v, e) for v, e in exps.items() if e))


class RationalPolynomial:
    """A sparse polynomial with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: "Mapping[Monomial, Fraction] | None" = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[mono] = c
        self.terms = clean

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero() -> "RationalPolynomial":
        return RationalPolynomial()

    @staticmethod
    def constant(c) -> "RationalPolynomial":
        return RationalPolynomial({(): Fraction(c)})

    @staticmethod
    def one() -> "RationalPolynomial":
        return RationalPolynomial.constant(1)

    @staticmethod
    def variable(var: "Var | None") -> "RationalPolynomial":
        if var is None:
            return RationalPolynomial.one()
        return RationalPolynomial({((var, 1),): Fraction(1)})

    @staticmethod
    def z(i: int, j: int) -> "RationalPolynomial":
        return RationalPolynomial.variable(zkey(i, j))

    @staticmethod
    def q(i: int, j: int) -> "RationalPolynomial":
        return RationalPolynomial.variable(qkey(i, j))

    @staticmethod
    def n_variable() -> "RationalPolynomial":
        return RationalPolynomial.variable(N_VAR)

    @staticmethod
    def monomial(exps: Mapping[Var, int], coeff=1) -> "RationalPolynomial":
        return RationalPolynomial({_make_mono(exps): Fraction(coeff)})

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> "RationalPolynomial":
        other = _coerce(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            new = out.get(mono, Fraction(0)) + c
            if new:
                out[mono] = new
            else:
                out.pop(mono, None)
        return RationalPolynomial(out)

    def __radd__(self, other):
        return self + other

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            c = Fraction(other)
            return RationalPolynomial({m: c * v for m, v in self.terms.items()})
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            d1 = dict(m1)
            for m2, c2 in other.terms.items():
                merged = dict(d1)
                for v, e in m2:
                    merged[v] = merged.get(v, 0) + e
                key = _make_mono(merged)
                new = out.get(key, Fraction(0)) + c1 * c2
                if new:
                    out[key] = new
                else:
                    out.pop(key, None)
        return RationalPolynomial(out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int) -> "RationalPolynomial":
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = RationalPolynomial.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPolynomial):
            return self == _coerce(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), Fraction(0))

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e for _, e in m) for m in self.terms)

    def variables(self) -> set[Var]:
        return {v for m in self.terms for v, _ in m}

    def coefficient(self, exps: Mapping[Var, int]) -> Fraction:
        return self.terms.get(_make_mono(exps), Fraction(0))

    def split_z_homogeneous(self) -> dict[int, "RationalPolynomial"]:
        """Group terms by total degree in the z family."""
        pieces: dict[int, dict[Monomial, Fraction]] = {}
        for mono, c in self.terms.items():
            d = sum(e for v, e in mono if v[0] == "z")
            pieces.setdefault(d, {})[mono] = c
        return {d: RationalPolynomial(t) for d, t in pieces.items()}

    # -- calculus ----------------------------------------------------------

    def diff(self, var: Var) -> "RationalPolynomial":
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            exps = dict(mono)
            e = exps.get(var, 0)
            if not e:
                continue
            exps[var] = e - 1
            key = _make_mono(exps)
            new = out.get(key, Fraction(0)) + c * e
            if new:
                out[key] = new
            else:
                out.pop(key, None)
        return RationalPolynomial(out)

    def evaluate(self, assignment: Mapping[Var, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            val = c
            for v, e in mono:
                if v not in assignment:
                    raise ValueError(f"no value supplied for variable {v}")
                val *= Fraction(assignment[v]) ** e
            total += val
        return total

    def evaluate_n(self, n_value: int) -> Fraction:
        """Evaluate a polynomial in the N variable alone."""
        return self.evaluate({N_VAR: Fraction(n_value)})

    def evaluate_q(self, matrix) -> Fraction:
        """Evaluate a polynomial in q variables at a symmetric matrix given
        as rows (1-based variable indices map to 0-based rows)."""
        assignment = {}
        for v in self.variables():
            if v[0] != "q":
                raise ValueError(f"not a q-polynomial, found variable {v}")
            assignment[v] = Fraction(matrix[v[1] - 1][v[2] - 1])
        return self.evaluate(assignment)

    # -- presentation -----------------------------------------------------

    def term_lines(self) -> list[str]:
        lines = []
        for mono, c in sorted(self.terms.items()):
            factors = [str(c)]
            for v, e in mono:
                if v[0] == "N":
                    name = "N"
                else:
                    name = f"{v[0]}[{v[1]},{v[2]}]"
                factors.append(name if e == 1 else f"{name}^{e}")
            lines.append(" * ".join(factors))
        return lines

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "\n".join(self.term_lines())

    def __repr__(self) -> str:
        flat = " + ".join(self.term_lines()) if self.terms else "0"
        return f"RationalPolynomial({flat})"


def _coerce(value) -> RationalPolynomial:
    if isinstance(value, RationalPolynomial):
        return value
    return RationalPolynomial.constant(value)


# -- second-order operators on the z family -------------------------------

def d_edge(g: RationalPolynomial, edge: Iterable[int]) -> RationalPolynomial:
    """Sum over j of the mixed second derivative in z[i,j] and z[i',j] for
    the bond {i, i'}."""
    i, ip = sorted(edge)
    if i == ip:
        raise ValueError("edge must join two distinct indices")
    out: dict[Monomial, Fraction] = {}
    for mono, c in g.terms.items():
        exps = dict(mono)
        js = {v[2] for v in exps if v[0] == "z" and v[1] == i}
        for j in js:
            v1, v2 = zkey(i, j), zkey(ip, j)
            e1, e2 = exps.get(v1, 0), exps.get(v2, 0)
            if not (e1 and e2):
                continue
            new = dict(exps)
            new[v1] -= 1
            new[v2] -= 1
            key = _make_mono(new)
            add = c * e1 * e2
            tot = out.get(key, Fraction(0)) + add
            if tot:
                out[key] = tot
            else:
                out.pop(key, None)
    return RationalPolynomial(out)


def d_gamma(g: RationalPolynomial, bonds: Iterable[Iterable[int]]) -> RationalPolynomial:
    """Product of the d_edge operators over a bond set (they commute)."""
    for e in sorted(bonds, key=lambda b: tuple(sorted(b))):
        g = d_edge(g, e)
        if g.is_zero():
            break
    return g


def partial_sym(f: RationalPolynomial, edge: Iterable[int]) -> RationalPolynomial:
    """Directional derivative of a polynomial on symmetric matrices along the
    elementary symmetric direction of a bond {i, j}."""
    i, j = sorted(edge)
    if i == j:
        raise ValueError("edge must join two distinct indices")
    return f.diff(qkey(i, j))


def partial_sym_gamma(f: RationalPolynomial,
                      bonds: Iterable[Iterable[int]]) -> RationalPolynomial:
    for e in sorted(bonds, key=lambda b: tuple(sorted(b))):
        f = partial_sym(f, e)
        if f.is_zero():
            break
    return f


# -- Gaussian expectation machinery ----------------------------------------

@dataclass(frozen=True)
class CovarianceSpec:
    """Covariance data for a replicated centered Gaussian family.

    ``matrix[i-1][i'-1]`` is the covariance of slots i and i' inside one
    replica; distinct replicas (distinct j indices) are independent copies.
    ``copies`` optionally records how many replicas exist (2N+1 in the
    tridiagonal application); it is bookkeeping only.
    """

    n: int
    matrix: tuple[tuple[Fraction, ...], ...]
    copies: "int | None" = None

    def __post_init__(self):
        if len(self.matrix) != self.n or any(len(r) != self.n for r in self.matrix):
            raise ValueError("covariance matrix has wrong shape")
        for i in range(self.n):
            for j in range(self.n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError("covariance matrix must be symmetric")
        if not _is_psd([list(r) for r in self.matrix]):
            raise ValueError("covariance matrix must be positive semidefinite")

    @staticmethod
    def from_rows(rows, copies: "int | None" = None) -> "CovarianceSpec":
        mat = tuple(tuple(Fraction(x) for x in r) for r in rows)
        return CovarianceSpec(len(mat), mat, copies)

    @staticmethod
    def standard(n: int, copies: "int | None" = None) -> "CovarianceSpec":
        rows = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        return CovarianceSpec.from_rows(rows, copies)

    def cov(self, i: int, ip: int) -> Fraction:
        return self.matrix[i - 1][ip - 1]


def _is_psd(m: list[list[Fraction]]) -> bool:
    """Exact positive-semidefiniteness by pivoted fraction-free elimination
    (Schur complements on positive diagonal pivots)."""
    active = list(range(len(m)))
    while active:
        pivot = None
        for a in active:
            if m[a][a] < 0:
                return False
            if m[a][a] > 0 and pivot is None:
                pivot = a
        if pivot is None:
            # all active diagonal entries are zero; PSD forces the block to vanish
            return all(m[a][b] == 0 for a in active for b in active)
        active.remove(pivot)
        p = m[pivot][pivot]
        for a in active:
            for b in active:
                m[a][b] -= m[a][pivot] * m[pivot][b] / p
    return True


def _wick_step(poly: RationalPolynomial, cov: CovarianceSpec) -> RationalPolynomial:
    """One application of the contraction operator
    (1/2) sum_{i,i',J} q(i,i') C(i,i') d^2/dz[i,J] dz[i',J], with q on the
    diagonal read as 1."""
    out: dict[Monomial, Fraction] = {}
    for mono, c in poly.terms.items():
        zslots = [(v, e) for v, e in mono if v[0] == "z"]
        base = dict(mono)
        for v1, e1 in zslots:
            for v2, e2 in zslots:
                if v1[2] != v2[2]:
                    continue
                cv = cov.cov(v1[1], v2[1])
                if not cv:
                    continue
                new = dict(base)
                if v1 == v2:
                    if e1 < 2:
                        continue
                    coeff = c * e1 * (e1 - 1) * cv / 2
                    new[v1] = e1 - 2
                    qv = None
                else:
                    coeff = c * e1 * e2 * cv / 2
                    new[v1] = e1 - 1
                    new[v2] = e2 - 1
                    qv = qkey(v1[1], v2[1])
                if qv is not None:
                    new[qv] = new.get(qv, 0) + 1
                key = _make_mono(new)
                tot = out.get(key, Fraction(0)) + coeff
                if tot:
                    out[key] = tot
                else:
                    out.pop(key, None)
    return RationalPolynomial(out)


def natural(g: RationalPolynomial, cov: CovarianceSpec) -> RationalPolynomial:
    """The q-polynomial whose value at a unit-diagonal symmetric matrix Q is
    the expectation of g under the Q-recoupled Gaussian law.

    A homogeneous piece of odd z-degree maps to zero; a piece of degree 2m
    gets m contraction steps divided by m!.  Mixed inputs are split
    internally.
    """
    total = RationalPolynomial.zero()
    for d, piece in sorted(g.split_z_homogeneous().items()):
        if d % 2:
            continue
        m = d // 2
        cur = piece
        for _ in range(m):
            cur = _wick_step(cur, cov)
            if cur.is_zero():
                break
        total = total + Fraction(1, factorial(m)) * cur
    return total


def _q_entry(matrix, i: int, ip: int) -> Fraction:
    return Fraction(matrix[i - 1][ip - 1])


def gaussian_expectation(g: RationalPolynomial, cov: CovarianceSpec, q_matrix,
                         check_state_space: bool = True) -> Fraction:
    """Expectation of a z-polynomial under the Q-recoupled Gaussian law,
    computed directly as a sum over Wick pairings of the variable slots.

    ``q_matrix`` is a SetPartition or rows of a symmetric matrix with unit
    diagonal (membership is checked unless disabled).
    """
    if isinstance(q_matrix, SetPartition):
        q_matrix = q_matrix.matrix()
    if check_state_space:
        size = len(q_matrix)
        for i in range(size):
            if Fraction(q_matrix[i][i]) != 1:
                raise ValueError("matrix must have unit diagonal")
            for j in range(size):
                if Fraction(q_matrix[i][j]) != Fraction(q_matrix[j][i]):
                    raise ValueError("matrix must be symmetric")

    total = Fraction(0)
    for mono, c in g.terms.items():
        slots: list[Var] = []
        for v, e in mono:
            if v[0] != "z":
                raise ValueError(f"expectation needs a z-polynomial, found {v}")
            slots.extend([v] * e)
        if len(slots) % 2:
            continue
        acc = Fraction(0)
        for matching in pair_partitions(range(len(slots))):
            term = Fraction(1)
            for a, b in matching:
                va, vb = slots[a], slots[b]
                if va[2] != vb[2]:
                    term = Fraction(0)
                    break
                term *= _q_entry(q_matrix, va[1], vb[1]) * cov.cov(va[1], vb[1])
                if not term:
                    break
            acc += term
        total += c * acc
    return total
