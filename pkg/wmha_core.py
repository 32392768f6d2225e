"""
Weak Multiplier Hopf Algebras
Algebra and Multiplier types, the abstract Wmha interface with its derived
maps (canonical maps, generalized inverses, source/target maps, F-multipliers)
and the law-checking suite.
"""

from __future__ import annotations

import logging
import random
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

from exact_linalg import (
    ZERO,
    FinVec,
    InconsistentSystem,
    Key,
    LinMap,
    Scalar,
    accumulate,
    extend,
    flip,
    format_key,
    in_span,
    leg_span,
    map_leg,
    rank,
    row_basis,
    same_span,
    solve_linear,
    tensor,
)

logger = logging.getLogger(__name__)


class WmhaError(ValueError):
    """An instance cannot provide a structure the caller asked for."""


# --- Algebras and multipliers ---

class Algebra(ABC):
    """Finite-dimensional algebra given by the product of basis elements.

    Basis products are cached per instance; everything else is computed from
    them by bilinear extension.
    """

    name = "algebra"

    def __init__(self, basis: Iterable[Key], name: str | None = None):
        self._basis = tuple(sorted(basis))
        self._products: dict = {}
        self._unit: FinVec | None = None
        if name:
            self.name = name

    @property
    def basis(self) -> tuple:
        return self._basis

    @property
    def dimension(self) -> int:
        return len(self._basis)

    @abstractmethod
    def basis_product(self, left: Key, right: Key) -> FinVec:
        """Product of two basis elements."""

    def product(self, left: Key, right: Key) -> FinVec:
        pair = (left, right)
        if pair not in self._products:
            self._products[pair] = self.basis_product(left, right)
        return self._products[pair]

    def element(self, key: Key) -> FinVec:
        return FinVec.basis(key)

    def multiply(self, x: FinVec, y: FinVec) -> FinVec:
        return accumulate(
            (cx * cy, self.product(kx, ky)) for kx, cx in x.items() for ky, cy in y.items()
        )

    def multiply_tensor(self, x: FinVec, y: FinVec) -> FinVec:
        """Factorwise product in A⊗...⊗A."""
        terms = []
        for kx, cx in x.items():
            for ky, cy in y.items():
                factors = [self.product(a, b) for a, b in zip(kx, ky)]
                if all(factors):
                    terms.append((cx * cy, tensor(*factors)))
        return accumulate(terms)

    def contract(self, x: FinVec) -> FinVec:
        """Multiplication map m: A⊗A → A."""
        return accumulate((c, self.product(a, b)) for (a, b), c in x.items())

    def local_unit(self, elements: Sequence[FinVec]) -> FinVec:
        """An element e with ex = x = xe for every given x."""
        constraints = []
        for x in elements:
            for side in ("left", "right"):
                images = {
                    k: (self.multiply(FinVec.basis(k), x) if side == "left" else self.multiply(x, FinVec.basis(k)))
                    for k in self._basis
                }
                for out in sorted({o for v in images.values() for o in v} | set(x)):
                    constraints.append((FinVec((k, v[out]) for k, v in images.items()), x[out]))
        try:
            return solve_linear(constraints, self._basis).particular
        except InconsistentSystem as e:
            raise WmhaError(f"{self.name}: no local unit for the given elements") from e

    def unit(self) -> FinVec:
        if self._unit is None:
            self._unit = self.local_unit([FinVec.basis(k) for k in self._basis])
        return self._unit

    def tensor_unit(self, factors: int = 2) -> FinVec:
        return tensor(*([self.unit()] * factors))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, dim={self.dimension})"


class StructureAlgebra(Algebra):
    """Algebra given by explicit structure constants {(k1, k2): FinVec}."""

    def __init__(self, basis: Iterable[Key], table: dict, name: str | None = None):
        super().__init__(basis, name)
        self._table = {pair: FinVec(value) for pair, value in table.items()}

    def basis_product(self, left: Key, right: Key) -> FinVec:
        return self._table.get((left, right), FinVec())


@dataclass(frozen=True)
class Multiplier:
    """A lazy pair of operators x ↦ m·x and x ↦ x·m."""

    left_act: Callable[[FinVec], FinVec]
    right_act: Callable[[FinVec], FinVec]
    element: FinVec | None = None
    label: str = ""

    @classmethod
    def of_element(cls, element: FinVec, multiply: Callable[[FinVec, FinVec], FinVec], label: str = "") -> Multiplier:
        return cls(
            left_act=lambda x: multiply(element, x),
            right_act=lambda x: multiply(x, element),
            element=element,
            label=label,
        )

    def then(self, other: Multiplier) -> Multiplier:
        """The product self·other."""
        return Multiplier(
            left_act=lambda x: self.left_act(other.left_act(x)),
            right_act=lambda x: other.right_act(self.right_act(x)),
            label=f"{self.label}{other.label}",
        )

    def is_compatible(self, multiply: Callable[[FinVec, FinVec], FinVec], pairs: Iterable[tuple[FinVec, FinVec]]) -> bool:
        """(x·m)·y = x·(m·y) on the given pairs."""
        return all(multiply(self.right_act(x), y) == multiply(x, self.left_act(y)) for x, y in pairs)

    def agrees_with(self, other: Multiplier, elements: Iterable[FinVec]) -> bool:
        return all(
            self.left_act(x) == other.left_act(x) and self.right_act(x) == other.right_act(x)
            for x in elements
        )


# --- The Wmha interface ---

class Wmha(Algebra):
    """A regular weak multiplier Hopf algebra presented on a finite basis.

    Subclasses provide the two coproduct slices on basis elements, the counit,
    the antipode with its inverse and the canonical idempotent E. All Sweedler
    sums are taken through those slices with an explicit covering element.
    """

    def __init__(self, basis: Iterable[Key], name: str | None = None):
        super().__init__(basis, name)
        self._t1: dict = {}
        self._t2: dict = {}
        self._delta: dict = {}
        self._covers: dict = {}
        self._spaces: dict = {}

    # structure supplied by each instance

    @abstractmethod
    def delta_right_basis(self, a: Key, b: Key) -> FinVec:
        """Δ(a)(1⊗b)"""

    @abstractmethod
    def delta_left_basis(self, c: Key, a: Key) -> FinVec:
        """(c⊗1)Δ(a)"""

    @abstractmethod
    def counit_basis(self, key: Key) -> Scalar:
        ...

    @abstractmethod
    def antipode_basis(self, key: Key) -> FinVec:
        ...

    @abstractmethod
    def antipode_inverse_basis(self, key: Key) -> FinVec:
        ...

    @abstractmethod
    def canonical_idempotent(self) -> Multiplier:
        """E as a multiplier of A⊗A."""

    # canonical maps

    def t1_basis(self, a: Key, b: Key) -> FinVec:
        if (a, b) not in self._t1:
            self._t1[(a, b)] = self.delta_right_basis(a, b)
        return self._t1[(a, b)]

    def t2_basis(self, c: Key, a: Key) -> FinVec:
        if (c, a) not in self._t2:
            self._t2[(c, a)] = self.delta_left_basis(c, a)
        return self._t2[(c, a)]

    def t1(self, a: FinVec, b: FinVec) -> FinVec:
        """T1(a⊗b) = Δ(a)(1⊗b)"""
        return accumulate((ca * cb, self.t1_basis(ka, kb)) for ka, ca in a.items() for kb, cb in b.items())

    def t2(self, c: FinVec, a: FinVec) -> FinVec:
        """T2(c⊗a) = (c⊗1)Δ(a)"""
        return accumulate((cc * ca, self.t2_basis(kc, ka)) for kc, cc in c.items() for ka, ca in a.items())

    def t1_map(self, x: FinVec) -> FinVec:
        return extend(x, lambda key: self.t1_basis(*key))

    def t2_map(self, x: FinVec) -> FinVec:
        return extend(x, lambda key: self.t2_basis(*key))

    def counit(self, a: FinVec) -> Scalar:
        total = ZERO
        for key, coeff in a.items():
            total = total + coeff * self.counit_basis(key)
        return total

    def antipode(self, a: FinVec) -> FinVec:
        return extend(a, self.antipode_basis)

    def antipode_inverse(self, a: FinVec) -> FinVec:
        return extend(a, self.antipode_inverse_basis)

    def covering_element(self, key: Key) -> FinVec:
        """A local unit u with Δ(e_k)(1⊗u) = Δ(e_k).

        The second legs of Δ(e_k)(1⊗b), b running over the basis, span the
        second legs of Δ(e_k) times A; a local unit of that span covers them.
        """
        if key not in self._covers:
            legs = [v for b in self.basis for v in leg_span(self.t1_basis(key, b), 1)]
            self._covers[key] = self.local_unit(row_basis(legs)) if legs else FinVec()
        return self._covers[key]

    def coproduct_basis(self, key: Key) -> FinVec:
        """Δ(e_k) = Δ(e_k)(1⊗u) for the covering element u of e_k."""
        if key not in self._delta:
            self._delta[key] = self.t1(FinVec.basis(key), self.covering_element(key))
        return self._delta[key]

    def full_coproduct_basis(self, key: Key) -> FinVec:
        """Δ(e_k)(1⊗1) through the unit of the whole finite basis; law-check oracle only."""
        return self.t1(FinVec.basis(key), self.unit())

    def coproduct(self, a: FinVec) -> FinVec:
        return extend(a, self.coproduct_basis)

    def coproduct2(self, a: FinVec) -> FinVec:
        """(Δ⊗ι)Δ(a) with keys (x, y, z)."""
        return extend(
            self.coproduct(a),
            lambda key: FinVec(
                (pair + (key[1],), v) for pair, v in self.coproduct_basis(key[0]).items()
            ),
        )

    def r1_map(self, x: FinVec) -> FinVec:
        """R1(a⊗b) = Σ a1 ⊗ S(a2)b"""
        def on_key(key):
            a, b = key
            return accumulate(
                (c, tensor(FinVec.basis(k1), self.multiply(self.antipode_basis(k2), FinVec.basis(b))))
                for (k1, k2), c in self.coproduct_basis(a).items()
            )
        return extend(x, on_key)

    def r2_map(self, x: FinVec) -> FinVec:
        """R2(c⊗a) = Σ cS(a1) ⊗ a2"""
        def on_key(key):
            c, a = key
            return accumulate(
                (coeff, tensor(self.multiply(FinVec.basis(c), self.antipode_basis(k1)), FinVec.basis(k2)))
                for (k1, k2), coeff in self.coproduct_basis(a).items()
            )
        return extend(x, on_key)

    # source and target maps

    def target_element(self, a: FinVec) -> FinVec:
        """ε_t(a) = Σ a1 S(a2)"""
        return self.contract(map_leg(self.coproduct(a), 1, self.antipode_basis))

    def source_element(self, a: FinVec) -> FinVec:
        """ε_s(a) = Σ S(a1) a2"""
        return self.contract(map_leg(self.coproduct(a), 0, self.antipode_basis))

    def eps_s(self, a: FinVec) -> Multiplier:
        return Multiplier.of_element(self.source_element(a), self.multiply, "eps_s")

    def eps_t(self, a: FinVec) -> Multiplier:
        return Multiplier.of_element(self.target_element(a), self.multiply, "eps_t")

    def source_basis(self) -> list[FinVec]:
        """Reduced spanning set of the source algebra ε_s(A)."""
        if "source" not in self._spaces:
            self._spaces["source"] = row_basis(self.source_element(FinVec.basis(k)) for k in self.basis)
        return self._spaces["source"]

    def target_basis(self) -> list[FinVec]:
        if "target" not in self._spaces:
            self._spaces["target"] = row_basis(self.target_element(FinVec.basis(k)) for k in self.basis)
        return self._spaces["target"]

    # E and the F-multipliers

    def idempotent_element(self) -> FinVec:
        """E as an element of A⊗A, covered by a local unit of the legs of E(A⊗A)."""
        E = self.canonical_idempotent()
        if E.element is not None:
            return E.element
        if "E" not in self._spaces:
            images = [E.left_act(FinVec.basis((a, b))) for a in self.basis for b in self.basis]
            legs = [v for x in images for position in (0, 1) for v in leg_span(x, position)]
            u = self.local_unit(row_basis(legs)) if legs else FinVec()
            self._spaces["E"] = E.left_act(tensor(u, u))
        return self._spaces["E"]

    def F_multipliers(self) -> tuple[Multiplier, Multiplier, Multiplier, Multiplier]:
        """(ι⊗S)E, (S⊗ι)E, (ι⊗S⁻¹)E, (S⁻¹⊗ι)E"""
        E = self.idempotent_element()
        legs = (
            (1, self.antipode_basis, "F1"),
            (0, self.antipode_basis, "F2"),
            (1, self.antipode_inverse_basis, "F3"),
            (0, self.antipode_inverse_basis, "F4"),
        )
        return tuple(
            Multiplier.of_element(map_leg(E, position, fn), self.multiply_tensor, label)
            for position, fn, label in legs
        )

    def designated_integral(self):
        """Faithful left integral recorded for this instance, if it has one."""
        return None

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "source_dimension": len(self.source_basis()),
            "target_dimension": len(self.target_basis()),
        }


# --- Law checking ---

@dataclass(frozen=True)
class CheckSettings:
    """Exhaustive below the threshold, seeded sampling above it."""

    max_exhaustive_dim: int = 64
    sample_size: int = 200
    seed: int = 0
    jobs: int = 1


@dataclass(frozen=True)
class LawResult:
    name: str
    status: str
    witness: tuple[str, ...] | None = None
    detail: str = ""
    checked: int = 0
    exhaustive: bool = True

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "status": self.status,
            "witness": list(self.witness) if self.witness is not None else None,
            "checked": self.checked,
            "exhaustive": self.exhaustive,
        }
        if self.detail:
            data["detail"] = self.detail
        return data


@dataclass(frozen=True)
class LawReport:
    results: tuple[LawResult, ...] = ()
    seed: int = 0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[LawResult]:
        return [r for r in self.results if not r.ok]

    def failed_names(self) -> set[str]:
        return {r.name for r in self.failures()}

    def result(self, name: str) -> LawResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def merged(self, other: LawReport) -> LawReport:
        return LawReport(self.results + other.results, self.seed)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "laws": [r.to_dict() for r in self.results]}


@dataclass(frozen=True)
class Law:
    name: str
    arity: int
    check: Callable[[object, tuple], str | None]


def law_tuples(basis: Sequence[Key], arity: int, name: str, settings: CheckSettings) -> tuple[list[tuple], bool]:
    """Returns: (tuples to check, exhaustive flag)"""
    if arity == 0:
        return [()], True
    if len(basis) <= settings.max_exhaustive_dim:
        return list(product(basis, repeat=arity)), True
    rng = random.Random(f"{settings.seed}:{name}")
    logger.warning("%s: dim %d above %d, sampling %d tuples", name, len(basis),
                   settings.max_exhaustive_dim, settings.sample_size)
    return [tuple(rng.choice(basis) for _ in range(arity)) for _ in range(settings.sample_size)], False


def _run_law(law: Law, subject, basis: Sequence[Key], settings: CheckSettings) -> LawResult:
    tuples, exhaustive = law_tuples(basis, law.arity, law.name, settings)
    for count, witness in enumerate(tuples, start=1):
        detail = law.check(subject, witness)
        if detail:
            logger.debug("%s failed at %s: %s", law.name, witness, detail)
            return LawResult(law.name, "fail", tuple(format_key(k) for k in witness), detail, count, exhaustive)
    logger.debug("%s ok (%d tuples)", law.name, len(tuples))
    return LawResult(law.name, "ok", None, "", len(tuples), exhaustive)


def run_laws(laws: Sequence[Law], subject, basis: Sequence[Key], settings: CheckSettings = CheckSettings()) -> LawReport:
    """Run each law over basis tuples; results keep the registry order."""
    if settings.jobs > 1:
        with ThreadPoolExecutor(max_workers=settings.jobs) as pool:
            results = list(pool.map(lambda law: _run_law(law, subject, basis, settings), laws))
    else:
        results = [_run_law(law, subject, basis, settings) for law in laws]
    return LawReport(tuple(results), settings.seed)


def _on_pair(vec: FinVec, position: int, fn: Callable[[Key, Key], FinVec]) -> FinVec:
    """Apply a map A⊗A → A⊗A to legs (position, position + 1) of a tensor."""
    def on_key(key):
        image = fn(key[position], key[position + 1])
        return FinVec((key[:position] + k + key[position + 2:], v) for k, v in image.items())
    return extend(vec, on_key)


def _counit_leg(W: Wmha, x: FinVec, position: int) -> FinVec:
    return accumulate(
        (c * W.counit_basis(key[position]), FinVec.basis(key[1 - position])) for key, c in x.items()
    )


def _associativity(W: Wmha, keys):
    a, b, c = keys
    if W.multiply(W.product(a, b), W.element(c)) != W.multiply(W.element(a), W.product(b, c)):
        return "(ab)c != a(bc)"


def _nondegeneracy(W: Wmha, _):
    for side in ("left", "right"):
        rows = []
        for a in W.basis:
            entries = []
            for b in W.basis:
                prod = W.product(a, b) if side == "left" else W.product(b, a)
                entries += [((b, k), v) for k, v in prod.items()]
            rows.append(FinVec(entries))
        if rank(rows) < W.dimension:
            return f"some nonzero a has {'aA' if side == 'left' else 'Aa'} = 0"


def _idempotent_algebra(W: Wmha, _):
    if rank(W.product(a, b) for a in W.basis for b in W.basis) < W.dimension:
        return "A² is a proper subspace"


def _counit_law(W: Wmha, keys):
    a, b = keys
    ab = W.product(a, b)
    if _counit_leg(W, W.t1_basis(a, b), 0) != ab:
        return "(ε⊗ι)(Δ(a)(1⊗b)) != ab"
    if _counit_leg(W, W.t2_basis(a, b), 1) != ab:
        return "(ι⊗ε)((a⊗1)Δ(b)) != ab"


def _coassociativity(W: Wmha, keys):
    start = FinVec.basis(tuple(keys))
    lhs = _on_pair(_on_pair(start, 0, W.t2_basis), 1, W.t1_basis)
    rhs = _on_pair(_on_pair(start, 1, W.t1_basis), 0, W.t2_basis)
    if lhs != rhs:
        return "(ι⊗T1)(T2⊗ι) != (T2⊗ι)(ι⊗T1)"


def _associativity_dual(W: Wmha, keys):
    start = FinVec.basis(tuple(keys))
    lhs = _on_pair(_on_pair(start, 0, W.t1_basis), 1, W.t2_basis)
    rhs = _on_pair(_on_pair(start, 1, W.t2_basis), 0, W.t1_basis)
    if lhs != rhs:
        return "(ι⊗T2)(T1⊗ι) != (T1⊗ι)(ι⊗T2)"


def _coproduct_multiplicative(W: Wmha, keys):
    a, b = keys
    if W.coproduct(W.product(a, b)) != W.multiply_tensor(W.coproduct_basis(a), W.coproduct_basis(b)):
        return "Δ(ab) != Δ(a)Δ(b)"


def _antipode_identity(W: Wmha, keys):
    (a,) = keys
    triple = W.coproduct2(W.element(a))
    first = accumulate(
        (c, W.multiply(W.multiply(W.element(x), W.antipode_basis(y)), W.element(z)))
        for (x, y, z), c in triple.items()
    )
    if first != W.element(a):
        return "Σ a1 S(a2) a3 != a"
    second = accumulate(
        (c, W.multiply(W.multiply(W.antipode_basis(x), W.element(y)), W.antipode_basis(z)))
        for (x, y, z), c in triple.items()
    )
    if second != W.antipode_basis(a):
        return "Σ S(a1) a2 S(a3) != S(a)"


def _antipode_anti_algebra(W: Wmha, keys):
    a, b = keys
    if W.antipode(W.product(a, b)) != W.multiply(W.antipode_basis(b), W.antipode_basis(a)):
        return "S(ab) != S(b)S(a)"


def _antipode_anti_coalgebra(W: Wmha, keys):
    (a,) = keys
    expected = flip(map_leg(map_leg(W.coproduct_basis(a), 0, W.antipode_basis), 1, W.antipode_basis))
    if W.coproduct(W.antipode_basis(a)) != expected:
        return "Δ(S(a)) != (S⊗S)ζΔ(a)"


def _antipode_inverse(W: Wmha, keys):
    (a,) = keys
    if W.antipode(W.antipode_inverse_basis(a)) != W.element(a):
        return "S(S⁻¹(a)) != a"
    if W.antipode_inverse(W.antipode_basis(a)) != W.element(a):
        return "S⁻¹(S(a)) != a"


def _E_idempotent(W: Wmha, keys):
    E = W.canonical_idempotent()
    x = FinVec.basis(tuple(keys))
    if E.left_act(E.left_act(x)) != E.left_act(x):
        return "E(E x) != E x"
    if E.right_act(E.right_act(x)) != E.right_act(x):
        return "(x E)E != x E"


def _E_multiplier(W: Wmha, keys):
    E = W.canonical_idempotent()
    one = W.tensor_unit()
    x = FinVec.basis(tuple(keys))
    if E.left_act(x) != W.multiply_tensor(E.right_act(one), x):
        return "(1·E)·x != 1·(E·x)"
    if E.right_act(x) != W.multiply_tensor(x, E.left_act(one)):
        return "(x·E)·1 != x·(E·1)"


def _E_full(W: Wmha, _):
    E = W.canonical_idempotent()
    pairs = [(a, b) for a in W.basis for b in W.basis]
    if not same_span([W.t1_basis(a, b) for a, b in pairs], [E.left_act(FinVec.basis(p)) for p in pairs]):
        return "range of T1 != E(A⊗A)"
    if not same_span([W.t2_basis(a, b) for a, b in pairs], [E.right_act(FinVec.basis(p)) for p in pairs]):
        return "range of T2 != (A⊗A)E"


def _coproduct_full(W: Wmha, _):
    deltas = [W.coproduct_basis(k) for k in W.basis]
    for position in (0, 1):
        if rank(v for d in deltas for v in leg_span(d, position)) < W.dimension:
            return f"leg {position + 1} of Δ(A) does not span A"


def _coproduct_covering(W: Wmha, keys):
    (a,) = keys
    if W.coproduct_basis(a) != W.full_coproduct_basis(a):
        return "Δ(a)(1⊗u) != Δ(a)(1⊗1) for the covering element u"


def _E_covers_coproduct(W: Wmha, keys):
    E = W.canonical_idempotent()
    a, b = keys
    if E.left_act(W.t1_basis(a, b)) != W.t1_basis(a, b):
        return "EΔ(a)(1⊗b) != Δ(a)(1⊗b)"
    if E.right_act(W.t2_basis(a, b)) != W.t2_basis(a, b):
        return "(a⊗1)Δ(b)E != (a⊗1)Δ(b)"


def _E_coproduct(W: Wmha, _):
    E = W.idempotent_element()
    u = W.unit()
    delta_E = extend(E, lambda key: FinVec((pair + (key[1],), v) for pair, v in W.coproduct_basis(key[0]).items()))
    left = W.multiply_tensor(_pad(E, u, after=True), _pad(E, u, after=False))
    right = W.multiply_tensor(_pad(E, u, after=False), _pad(E, u, after=True))
    if delta_E != left:
        return "(Δ⊗ι)E != (E⊗1)(1⊗E)"
    if delta_E != right:
        return "(Δ⊗ι)E != (1⊗E)(E⊗1)"


def _pad(E: FinVec, unit: FinVec, after: bool) -> FinVec:
    """E⊗1 (after=True) or 1⊗E as a 3-tensor."""
    terms = []
    for key, c in E.items():
        for k, v in unit.items():
            terms.append(((key + (k,)) if after else ((k,) + key), c * v))
    return FinVec(terms)


def _antipode_flips_E(W: Wmha, _):
    E = W.idempotent_element()
    if map_leg(map_leg(E, 0, W.antipode_basis), 1, W.antipode_basis) != flip(E):
        return "(S⊗S)E != ζE"


def _R1_inverse(W: Wmha, keys):
    x = FinVec.basis(tuple(keys))
    if W.t1_map(W.r1_map(W.t1_map(x))) != W.t1_map(x):
        return "T1R1T1 != T1"
    if W.r1_map(W.t1_map(W.r1_map(x))) != W.r1_map(x):
        return "R1T1R1 != R1"


def _R2_inverse(W: Wmha, keys):
    x = FinVec.basis(tuple(keys))
    if W.t2_map(W.r2_map(W.t2_map(x))) != W.t2_map(x):
        return "T2R2T2 != T2"
    if W.r2_map(W.t2_map(W.r2_map(x))) != W.r2_map(x):
        return "R2T2R2 != R2"


def _RT_is_F(W: Wmha, keys):
    a, b = keys
    u = W.unit()
    F1, F2, _, _ = W.F_multipliers()
    x = FinVec.basis((a, b))
    for label, composite, F in (("R1T1", W.r1_map(W.t1_map(x)), F1), ("R2T2", W.r2_map(W.t2_map(x)), F2)):
        expected = W.multiply_tensor(W.multiply_tensor(tensor(W.element(a), u), F.element), tensor(u, W.element(b)))
        if composite != expected:
            return f"{label}(a⊗b) != (a⊗1)F(1⊗b)"


def _TR_is_E(W: Wmha, keys):
    E = W.canonical_idempotent()
    x = FinVec.basis(tuple(keys))
    if W.t1_map(W.r1_map(x)) != E.left_act(x):
        return "T1R1 != E(·)"
    if W.t2_map(W.r2_map(x)) != E.right_act(x):
        return "T2R2 != (·)E"


def _source_target_commute(W: Wmha, keys):
    a, b = keys
    y = W.source_element(W.element(a))
    z = W.target_element(W.element(b))
    if W.multiply(y, z) != W.multiply(z, y):
        return "ε_s(a)ε_t(b) != ε_t(b)ε_s(a)"


def _E_legs(W: Wmha, _):
    E = W.idempotent_element()
    if not all(in_span(W.source_basis(), v) for v in leg_span(E, 0)):
        return "first leg of E outside ε_s(A)"
    if not all(in_span(W.target_basis(), v) for v in leg_span(E, 1)):
        return "second leg of E outside ε_t(A)"


AXIOMS: tuple[Law, ...] = (
    Law("associativity", 3, _associativity),
    Law("nondegeneracy", 0, _nondegeneracy),
    Law("idempotent algebra", 0, _idempotent_algebra),
    Law("counit", 2, _counit_law),
    Law("coassociativity", 3, _coassociativity),
    Law("associativity dual", 3, _associativity_dual),
    Law("coproduct multiplicative", 2, _coproduct_multiplicative),
    Law("antipode identity", 1, _antipode_identity),
    Law("antipode anti-algebra", 2, _antipode_anti_algebra),
    Law("antipode anti-coalgebra", 1, _antipode_anti_coalgebra),
    Law("antipode inverse", 1, _antipode_inverse),
    Law("E idempotent", 2, _E_idempotent),
    Law("E multiplier", 2, _E_multiplier),
    Law("E full", 0, _E_full),
    Law("coproduct full", 0, _coproduct_full),
    Law("coproduct covering", 1, _coproduct_covering),
    Law("E covers coproduct", 2, _E_covers_coproduct),
    Law("E coproduct", 0, _E_coproduct),
    Law("antipode flips E", 0, _antipode_flips_E),
    Law("R1 generalized inverse", 2, _R1_inverse),
    Law("R2 generalized inverse", 2, _R2_inverse),
    Law("RT equals F", 2, _RT_is_F),
    Law("TR equals E", 2, _TR_is_E),
    Law("source target commute", 2, _source_target_commute),
    Law("E legs in source target", 0, _E_legs),
)


def check_axioms(W: Wmha, settings: CheckSettings = CheckSettings(), names: Iterable[str] | None = None) -> LawReport:
    """Check every law (or the named subset) on basis tuples of W."""
    laws = AXIOMS if names is None else tuple(law for law in AXIOMS if law.name in set(names))
    logger.info("checking %d laws on %r", len(laws), W)
    return run_laws(laws, W, W.basis, settings)


# --- Isomorphisms ---

@dataclass(frozen=True)
class _IsoContext:
    first: Wmha
    second: Wmha
    phi: LinMap

    def image(self, key: Key) -> FinVec:
        return self.phi.image_of(key)

    def image_tensor(self, x: FinVec) -> FinVec:
        return map_leg(map_leg(x, 0, self.image), 1, self.image)


def _iso_bijective(ctx: _IsoContext, _):
    if ctx.first.dimension != ctx.second.dimension:
        return f"dimensions {ctx.first.dimension} != {ctx.second.dimension}"
    if set(ctx.phi.domain) != set(ctx.first.basis) or not ctx.phi.is_injective():
        return "map is not bijective"


def _iso_product(ctx: _IsoContext, keys):
    a, b = keys
    if ctx.phi(ctx.first.product(a, b)) != ctx.second.multiply(ctx.image(a), ctx.image(b)):
        return "φ(ab) != φ(a)φ(b)"


def _iso_coproduct(ctx: _IsoContext, keys):
    a, b = keys
    if ctx.image_tensor(ctx.first.t1_basis(a, b)) != ctx.second.t1(ctx.image(a), ctx.image(b)):
        return "(φ⊗φ)T1 != T1(φ⊗φ)"
    if ctx.image_tensor(ctx.first.t2_basis(a, b)) != ctx.second.t2(ctx.image(a), ctx.image(b)):
        return "(φ⊗φ)T2 != T2(φ⊗φ)"


def _iso_counit(ctx: _IsoContext, keys):
    (a,) = keys
    if ctx.first.counit_basis(a) != ctx.second.counit(ctx.image(a)):
        return "ε∘φ != ε"


def _iso_antipode(ctx: _IsoContext, keys):
    (a,) = keys
    if ctx.phi(ctx.first.antipode_basis(a)) != ctx.second.antipode(ctx.image(a)):
        return "φ∘S != S∘φ"


def _iso_idempotent(ctx: _IsoContext, _):
    if ctx.image_tensor(ctx.first.idempotent_element()) != ctx.second.idempotent_element():
        return "(φ⊗φ)E != E"


ISOMORPHISM_LAWS: tuple[Law, ...] = (
    Law("iso bijective", 0, _iso_bijective),
    Law("iso product", 2, _iso_product),
    Law("iso coproduct", 2, _iso_coproduct),
    Law("iso counit", 1, _iso_counit),
    Law("iso antipode", 1, _iso_antipode),
    Law("iso canonical idempotent", 0, _iso_idempotent),
)


def check_isomorphism(first: Wmha, second: Wmha, phi: LinMap, settings: CheckSettings = CheckSettings()) -> LawReport:
    """phi: first → second must be bijective and preserve product, slices, counit, antipode and E."""
    ctx = _IsoContext(first, second, phi)
    bijective = _run_law(ISOMORPHISM_LAWS[0], ctx, first.basis, settings)
    if not bijective.ok:
        return LawReport((bijective,), settings.seed)
    return LawReport((bijective,), settings.seed).merged(run_laws(ISOMORPHISM_LAWS[1:], ctx, first.basis, settings))
