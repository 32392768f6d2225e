"""
Exact Linear Algebra
Gaussian-rational scalars, finitely supported vectors, tensors,
sparse linear maps and an exact fraction-free solver.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import CoercionFailed

logger = logging.getLogger(__name__)

Scalar = GaussianRational
Key = Hashable

ZERO = QQ_I.zero
ONE = QQ_I.one


class InconsistentSystem(ValueError):
    """An affine system with no solution (distinct from a zero solution space)."""


# --- Scalars ---

def scalar(value) -> Scalar:
    """Convert int, sympy number, "p/q" or "a + b*I" text into a canonical Scalar."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return QQ_I(value)
    if isinstance(value, float):
        raise TypeError("floating point values are not exact scalars")
    try:
        expr = sympy.sympify(value, rational=True) if isinstance(value, str) else value
        return QQ_I.from_sympy(expr)
    except (sympy.SympifyError, CoercionFailed, TypeError) as e:
        raise ValueError(f"not a Gaussian rational: {value!r}") from e


def format_scalar(value: Scalar) -> str:
    """Deterministic text form, e.g. '3/2' or '1/2 + I'."""
    return sympy.sstr(QQ_I.to_sympy(value))


def format_key(key: Key) -> str:
    if isinstance(key, tuple):
        return "(" + ",".join(format_key(k) for k in key) + ")"
    return str(key)


# --- Vectors ---

class FinVec(Mapping):
    """Finitely supported vector: sorted keys, no stored zeros, immutable.

    Missing keys read as zero, so ``v[k]`` is the coefficient of basis key k.
    Tensor keys are tuples with one component per factor.
    """

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping | Iterable = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict = {}
        for key, value in items:
            if not isinstance(value, GaussianRational):
                value = scalar(value)
            if key in acc:
                acc[key] = acc[key] + value
            else:
                acc[key] = value
        self._entries = {k: acc[k] for k in sorted(acc) if acc[k]}
        self._hash = None

    @classmethod
    def basis(cls, key: Key, coeff=ONE) -> FinVec:
        return cls({key: coeff})

    @classmethod
    def zero(cls) -> FinVec:
        return cls()

    def __getitem__(self, key):
        return self._entries.get(key, ZERO)

    def __contains__(self, key) -> bool:
        return key in self._entries

    def __iter__(self) -> Iterator:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other) -> bool:
        if isinstance(other, FinVec):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._entries.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{format_key(k)}: {format_scalar(v)}" for k, v in self._entries.items())
        return f"FinVec({{{body}}})"

    @property
    def support(self) -> tuple:
        return tuple(self._entries)

    def __add__(self, other: FinVec) -> FinVec:
        merged = dict(self._entries)
        for key, value in other._entries.items():
            merged[key] = merged[key] + value if key in merged else value
        return FinVec(merged)

    def __neg__(self) -> FinVec:
        return FinVec({k: -v for k, v in self._entries.items()})

    def __sub__(self, other: FinVec) -> FinVec:
        return self + (-other)

    def scale(self, coeff) -> FinVec:
        coeff = scalar(coeff)
        if not coeff:
            return FinVec()
        return FinVec({k: coeff * v for k, v in self._entries.items()})

    def __rmul__(self, coeff) -> FinVec:
        return self.scale(coeff)

    def dot(self, other: Mapping) -> Scalar:
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        total = ZERO
        for key, value in small.items():
            if key in large:
                total = total + value * large[key]
        return total

    def map_keys(self, fn: Callable[[Key], Key]) -> FinVec:
        return FinVec((fn(k), v) for k, v in self._entries.items())

    def to_json(self) -> list:
        return [[_key_to_json(k), format_scalar(v)] for k, v in self._entries.items()]


def _key_to_json(key: Key):
    if isinstance(key, tuple):
        return [_key_to_json(k) for k in key]
    return key


def accumulate(terms: Iterable[tuple[Scalar, FinVec]]) -> FinVec:
    """Sum of coeff * vector over the given terms."""
    acc: dict = {}
    for coeff, vec in terms:
        if not coeff:
            continue
        for key, value in vec.items():
            prod = coeff * value
            acc[key] = acc[key] + prod if key in acc else prod
    return FinVec(acc)


def extend(vec: FinVec, fn: Callable[[Key], FinVec]) -> FinVec:
    """Linear extension of a map defined on basis keys."""
    return accumulate((coeff, fn(key)) for key, coeff in vec.items())


def tensor(*vecs: FinVec) -> FinVec:
    """Tensor product; keys are tuples with one component per factor."""
    if len(vecs) < 2:
        raise ValueError("tensor needs at least two factors")
    result = {(): ONE}
    for vec in vecs:
        result = {
            key + (k,): coeff * v
            for key, coeff in result.items()
            for k, v in vec.items()
        }
    return FinVec(result)


def map_leg(vec: FinVec, position: int, fn: Callable[[Key], FinVec]) -> FinVec:
    """Apply a linear map (given on basis keys) to one tensor leg."""
    def on_key(key):
        image = fn(key[position])
        return FinVec(
            (key[:position] + (k,) + key[position + 1:], v) for k, v in image.items()
        )
    return extend(vec, on_key)


def flip(vec: FinVec) -> FinVec:
    return vec.map_keys(lambda key: (key[1], key[0]))


def leg_span(vec: FinVec, position: int) -> list[FinVec]:
    """Vectors whose span is the span of the chosen leg of a tensor."""
    slices: dict = {}
    for key, value in vec.items():
        rest = key[:position] + key[position + 1:]
        slices.setdefault(rest, {})[key[position]] = value
    return [FinVec(entries) for entries in slices.values()]


# --- Solver ---

@dataclass(frozen=True)
class SolutionSpace:
    """Solution set of an affine system: particular + span(basis)."""

    particular: FinVec
    basis: tuple[FinVec, ...] = field(default_factory=tuple)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def unique(self) -> bool:
        return not self.basis


def _reduce(rows: list[dict[int, Scalar]], width: int) -> tuple[list[list[Scalar]], tuple[int, ...]]:
    """Row-reduce with fraction-free (Bareiss) elimination, pivots normalised to 1."""
    if not rows:
        return [], ()
    sparse = {i: row for i, row in enumerate(rows) if row}
    if not sparse:
        return [], ()
    matrix = DomainMatrix(sparse, (len(rows), width), QQ_I)
    try:
        reduced, _den, pivots = matrix.rref_den(method="FF")
    except (AttributeError, TypeError, NotImplementedError):
        # older sympy: plain Gauss-Jordan over the field
        reduced, pivots = matrix.rref()
    dense = reduced.to_list()
    normalised = []
    for i, col in enumerate(pivots):
        lead = dense[i][col]
        normalised.append([entry / lead if entry else ZERO for entry in dense[i]])
    return normalised, tuple(pivots)


def solve_linear(constraints: Iterable[tuple[Mapping, object]], unknowns: Iterable[Key]) -> SolutionSpace:
    """Solve {row · x = rhs} exactly over the given unknowns.

    Returns the particular solution with free variables at zero and a basis of
    the homogeneous solutions. Raises InconsistentSystem when no solution exists.
    """
    keys = sorted(set(unknowns))
    index = {k: i for i, k in enumerate(keys)}
    width = len(keys) + 1
    rows = []
    for row, rhs in constraints:
        entries = {}
        for key, value in row.items():
            if key not in index:
                raise KeyError(f"constraint mentions unknown {format_key(key)} outside the unknown set")
            value = scalar(value)
            if value:
                entries[index[key]] = value
        rhs = scalar(rhs)
        if rhs:
            entries[len(keys)] = rhs
        if entries:
            rows.append(entries)

    reduced, pivots = _reduce(rows, width)
    if len(keys) in pivots:
        raise InconsistentSystem("affine system has no solution")

    pivot_set = set(pivots)
    particular = FinVec(
        (keys[col], reduced[i][len(keys)]) for i, col in enumerate(pivots)
    )
    basis = []
    for free in range(len(keys)):
        if free in pivot_set:
            continue
        entries = {keys[free]: ONE}
        for i, col in enumerate(pivots):
            if reduced[i][free]:
                entries[keys[col]] = -reduced[i][free]
        basis.append(FinVec(entries))
    logger.debug("solve_linear: %d rows, %d unknowns, kernel dim %d", len(rows), len(keys), len(basis))
    return SolutionSpace(particular, tuple(basis))


def nullspace(constraints: Iterable[Mapping], unknowns: Iterable[Key]) -> list[FinVec]:
    """Basis of {x : row · x = 0 for every row}."""
    return list(solve_linear(((row, ZERO) for row in constraints), unknowns).basis)


def row_basis(vectors: Iterable[FinVec]) -> list[FinVec]:
    """Reduced basis of the span of the given vectors."""
    vectors = [v for v in vectors if v]
    if not vectors:
        return []
    keys = sorted({k for v in vectors for k in v})
    index = {k: i for i, k in enumerate(keys)}
    rows = [{index[k]: val for k, val in v.items()} for v in vectors]
    reduced, pivots = _reduce(rows, len(keys))
    return [
        FinVec((keys[j], val) for j, val in enumerate(reduced[i]) if val)
        for i in range(len(pivots))
    ]


def rank(vectors: Iterable[FinVec]) -> int:
    return len(row_basis(vectors))


def in_span(vectors: Sequence[FinVec], target: FinVec) -> bool:
    if not target:
        return True
    return rank(list(vectors) + [target]) == rank(vectors)


def same_span(first: Sequence[FinVec], second: Sequence[FinVec]) -> bool:
    r = rank(first)
    return r == rank(second) == rank(list(first) + list(second))


def coordinates(vectors: Sequence[FinVec], target: FinVec) -> FinVec | None:
    """Coefficients c with Σ c_i vectors[i] = target, or None when outside the span."""
    unknowns = range(len(vectors))
    keys = sorted({k for v in vectors for k in v} | set(target))
    constraints = [
        (FinVec((i, vec[key]) for i, vec in enumerate(vectors)), target[key]) for key in keys
    ]
    try:
        return solve_linear(constraints, unknowns).particular
    except InconsistentSystem:
        return None


# --- Linear maps ---

class LinMap:
    """Linear map stored column-wise: basis key of the domain -> image vector."""

    __slots__ = ("domain", "columns")

    def __init__(self, domain: Iterable[Key], columns: Mapping[Key, FinVec]):
        self.domain = tuple(sorted(domain))
        self.columns = {k: columns.get(k, FinVec()) for k in self.domain}

    @classmethod
    def from_function(cls, domain: Iterable[Key], fn: Callable[[Key], FinVec]) -> LinMap:
        domain = tuple(domain)
        return cls(domain, {k: fn(k) for k in domain})

    @classmethod
    def identity(cls, domain: Iterable[Key]) -> LinMap:
        return cls.from_function(domain, FinVec.basis)

    def __call__(self, vec: FinVec) -> FinVec:
        return accumulate((coeff, self.columns[key]) for key, coeff in vec.items())

    def image_of(self, key: Key) -> FinVec:
        return self.columns[key]

    def compose(self, inner: LinMap) -> LinMap:
        """self ∘ inner."""
        return LinMap(inner.domain, {k: self(inner.columns[k]) for k in inner.domain})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinMap):
            return NotImplemented
        return self.domain == other.domain and self.columns == other.columns

    __hash__ = None

    def rank(self) -> int:
        return rank(self.columns.values())

    def is_injective(self) -> bool:
        return self.rank() == len(self.domain)

    def inverse(self, codomain: Iterable[Key] | None = None) -> LinMap:
        """Inverse of a bijective map, found column by column with the solver."""
        codomain = tuple(sorted(codomain)) if codomain is not None else tuple(
            sorted({k for v in self.columns.values() for k in v})
        )
        if len(codomain) != len(self.domain) or not self.is_injective():
            raise ValueError("linear map is not bijective")
        columns = {}
        for target in codomain:
            coeffs = coordinates([self.columns[k] for k in self.domain], FinVec.basis(target))
            if coeffs is None:
                raise ValueError(f"{format_key(target)} is not in the image")
            columns[target] = FinVec((self.domain[i], c) for i, c in coeffs.items())
        return LinMap(codomain, columns)

    def __repr__(self) -> str:
        return f"LinMap({len(self.domain)} columns)"
