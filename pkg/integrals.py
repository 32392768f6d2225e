"""
Integrals
Invariant functionals, their enumeration by exact solves, faithfulness tests,
transfer relations between left and right integrals, and modular data.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

from exact_linalg import (
    ZERO,
    FinVec,
    InconsistentSystem,
    Key,
    LinMap,
    Scalar,
    accumulate,
    in_span,
    nullspace,
    same_span,
    solve_linear,
)
from wmha_core import CheckSettings, Law, LawReport, Multiplier, Wmha, run_laws

logger = logging.getLogger(__name__)


class IntegralError(ValueError):
    """A functional does not have the integral property it was claimed to have."""


class NotFaithfulError(IntegralError):
    """A construction needs a faithful integral and did not get one."""


class InternalConsistencyError(RuntimeError):
    """Two independent computations of the same fact disagree."""


@dataclass(frozen=True)
class Functional:
    """Linear functional given by its values on basis keys."""

    values: FinVec
    label: str = ""

    def __call__(self, x: FinVec) -> Scalar:
        return self.values.dot(x)

    def at(self, key: Key) -> Scalar:
        return self.values[key]

    def __bool__(self) -> bool:
        return bool(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Functional):
            return NotImplemented
        return self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __add__(self, other: Functional) -> Functional:
        return Functional(self.values + other.values, self.label)

    def scale(self, coeff) -> Functional:
        return Functional(self.values.scale(coeff), self.label)

    def precompose(self, fn: Callable[[Key], FinVec], basis: Iterable[Key]) -> Functional:
        """φ∘T for T given on basis keys."""
        return Functional(FinVec((k, self(fn(k))) for k in basis), self.label)

    def right_translate(self, W: Wmha, a: FinVec) -> Functional:
        """φ(·a)"""
        return Functional(FinVec((k, self(W.multiply(W.element(k), a))) for k in W.basis))

    def left_translate(self, W: Wmha, a: FinVec) -> Functional:
        """φ(a·)"""
        return Functional(FinVec((k, self(W.multiply(a, W.element(k)))) for k in W.basis))


def compose_antipode(phi: Functional, W: Wmha, power: int = 1) -> Functional:
    """φ∘S^power (negative powers use S⁻¹)."""
    fn = W.antipode_basis if power > 0 else W.antipode_inverse_basis
    result = phi
    for _ in range(abs(power)):
        result = result.precompose(fn, W.basis)
    return Functional(result.values, phi.label)


# --- Invariance ---

def left_slice(W: Wmha, phi: Functional, a: FinVec) -> FinVec:
    """(ι⊗φ)Δ(a)"""
    return accumulate((c * phi.at(y), W.element(x)) for (x, y), c in W.coproduct(a).items())


def right_slice(W: Wmha, psi: Functional, a: FinVec) -> FinVec:
    """(ψ⊗ι)Δ(a)"""
    return accumulate((c * psi.at(x), W.element(y)) for (x, y), c in W.coproduct(a).items())


def is_left_invariant(phi: Functional, W: Wmha) -> bool:
    """(ι⊗φ)Δ(a) lies in ε_t(A) for every basis a."""
    return all(in_span(W.target_basis(), left_slice(W, phi, W.element(k))) for k in W.basis)


def is_right_invariant(psi: Functional, W: Wmha) -> bool:
    """(ψ⊗ι)Δ(a) lies in ε_s(A) for every basis a."""
    return all(in_span(W.source_basis(), right_slice(W, psi, W.element(k))) for k in W.basis)


def integral_status(phi: Functional, W: Wmha, side: str = "left") -> str:
    invariant = is_left_invariant(phi, W) if side == "left" else is_right_invariant(phi, W)
    if not invariant:
        return "not invariant"
    return "integral" if phi else "invariant, not an integral"


@dataclass(frozen=True)
class InvarianceVerdict:
    """Answers of the membership test and the two closed formulas."""

    membership: bool
    sweedler_formula: bool
    f_formula: bool

    @property
    def agree(self) -> bool:
        return self.membership == self.sweedler_formula == self.f_formula

    @property
    def invariant(self) -> bool:
        return self.membership


def _left_sweedler(W: Wmha, phi: Functional, a: FinVec) -> FinVec:
    """Σ a1 S(a2) φ(a3)"""
    return accumulate(
        (c * phi.at(z), W.multiply(W.element(x), W.antipode_basis(y)))
        for (x, y, z), c in W.coproduct2(a).items()
    )


def _right_sweedler(W: Wmha, psi: Functional, a: FinVec) -> FinVec:
    """Σ ψ(a1) S(a2) a3"""
    return accumulate(
        (c * psi.at(x), W.multiply(W.antipode_basis(y), W.element(z)))
        for (x, y, z), c in W.coproduct2(a).items()
    )


def _left_f_formula(W: Wmha, phi: Functional, a: FinVec) -> FinVec:
    """(ι⊗φ)(F2(1⊗a)) = Σ S(E1) φ(E2 a)"""
    return accumulate(
        (c * phi(W.multiply(W.element(n), a)), W.antipode_basis(m))
        for (m, n), c in W.idempotent_element().items()
    )


def _right_f_formula(W: Wmha, psi: Functional, a: FinVec) -> FinVec:
    """(ψ⊗ι)((a⊗1)F1) = Σ ψ(a E1) S(E2)"""
    return accumulate(
        (c * psi(W.multiply(a, W.element(m))), W.antipode_basis(n))
        for (m, n), c in W.idempotent_element().items()
    )


def check_invariance_oracles(phi: Functional, W: Wmha, side: str = "left") -> InvarianceVerdict:
    """Evaluate the three equivalent invariance criteria independently."""
    if side == "left":
        membership = is_left_invariant(phi, W)
        slice_of, sweedler, f_formula = left_slice, _left_sweedler, _left_f_formula
    else:
        membership = is_right_invariant(phi, W)
        slice_of, sweedler, f_formula = right_slice, _right_sweedler, _right_f_formula
    elements = [W.element(k) for k in W.basis]
    return InvarianceVerdict(
        membership=membership,
        sweedler_formula=all(slice_of(W, phi, a) == sweedler(W, phi, a) for a in elements),
        f_formula=all(slice_of(W, phi, a) == f_formula(W, phi, a) for a in elements),
    )


def _enumerate(W: Wmha, span: list[FinVec], leg: int, label: str) -> list[Functional]:
    annihilator = nullspace(span, W.basis)
    constraints = []
    for k in W.basis:
        delta = W.coproduct_basis(k)
        for w in annihilator:
            row: dict = {}
            for key, c in delta.items():
                outer, inner = (key[0], key[1]) if leg == 1 else (key[1], key[0])
                if w[outer]:
                    row[inner] = row.get(inner, ZERO) + c * w[outer]
            constraints.append(FinVec(row))
    basis = nullspace(constraints, W.basis)
    logger.info("%s: %d-dimensional space of %s integrals", W.name, len(basis), label)
    return [Functional(v, label) for v in basis]


def enumerate_left_integrals(W: Wmha) -> list[Functional]:
    """Basis of the left-invariant functionals, from w((ι⊗φ)Δ(e_k)) = 0 for w ⊥ ε_t(A)."""
    return _enumerate(W, W.target_basis(), 1, "left")


def enumerate_right_integrals(W: Wmha) -> list[Functional]:
    return _enumerate(W, W.source_basis(), 0, "right")


# --- Faithfulness ---

def kernel_faithful(functionals: Sequence[Functional], W: Wmha) -> bool:
    """No nonzero x with φ(xa) = 0 for all a and φ, and likewise for φ(ax)."""
    for side in ("right", "left"):
        rows = []
        for phi in functionals:
            for k in W.basis:
                e = W.element(k)
                if side == "right":
                    rows.append(FinVec((x, phi(W.multiply(W.element(x), e))) for x in W.basis))
                else:
                    rows.append(FinVec((x, phi(W.multiply(e, W.element(x)))) for x in W.basis))
        if nullspace(rows, W.basis):
            return False
    return True


def e_span_faithful(functionals: Sequence[Functional], W: Wmha) -> bool:
    """ε_t(A) is spanned by (φ⊗ι)((a⊗1)E) and also by (φ⊗ι)(E(a⊗1))."""
    E = W.idempotent_element()
    before, after = [], []
    for phi in functionals:
        for k in W.basis:
            e = W.element(k)
            before.append(accumulate((c * phi(W.multiply(e, W.element(m))), W.element(n)) for (m, n), c in E.items()))
            after.append(accumulate((c * phi(W.multiply(W.element(m), e)), W.element(n)) for (m, n), c in E.items()))
    target = W.target_basis()
    return same_span(before, target) and same_span(after, target)


@dataclass(frozen=True)
class FaithfulnessComparison:
    kernel: bool
    e_span: bool

    @property
    def agree(self) -> bool:
        return self.kernel == self.e_span


def single_faithfulness_criterion(phi: Functional, W: Wmha) -> FaithfulnessComparison:
    return FaithfulnessComparison(kernel_faithful([phi], W), e_span_faithful([phi], W))


def faithful_set_check(functionals: Sequence[Functional], W: Wmha, side: str = "left") -> bool:
    """Decide whether the integrals form a faithful set, by two independent tests."""
    invariant = is_left_invariant if side == "left" else is_right_invariant
    for phi in functionals:
        if not invariant(phi, W):
            raise IntegralError(f"{phi.label or 'functional'} is not {side} invariant on {W.name}")
    kernel = kernel_faithful(functionals, W)
    as_left = functionals if side == "left" else [compose_antipode(psi, W, -1) for psi in functionals]
    e_span = e_span_faithful(as_left, W)
    if kernel != e_span:
        raise InternalConsistencyError(
            f"{W.name}: kernel test says {kernel}, E-span test says {e_span}"
        )
    return kernel


def _require_faithful(phi: Functional, W: Wmha) -> None:
    if not kernel_faithful([phi], W):
        raise NotFaithfulError(f"{phi.label or 'integral'} is not faithful on {W.name}")


# --- Modular data ---

def _solve_density(phi: Functional, target: Functional, W: Wmha, on_right: bool = True) -> FinVec:
    """The unique y with target(x) = φ(xy) (on_right) or φ(yx), for every basis x."""
    constraints = []
    for x in W.basis:
        ex = W.element(x)
        row = FinVec(
            (k, phi(W.multiply(ex, W.element(k)) if on_right else W.multiply(W.element(k), ex)))
            for k in W.basis
        )
        constraints.append((row, target.at(x)))
    try:
        space = solve_linear(constraints, W.basis)
    except InconsistentSystem as e:
        raise NotFaithfulError(f"{W.name}: no density exists for {target.label or 'functional'}") from e
    if not space.unique:
        raise NotFaithfulError(f"{W.name}: density is not unique, integral is not faithful")
    return space.particular


def inverse_element(W: Wmha, y: FinVec) -> FinVec | None:
    """Two-sided inverse of y in A, or None."""
    unit = W.unit()
    constraints = []
    for side in ("left", "right"):
        images = {k: W.multiply(y, W.element(k)) if side == "left" else W.multiply(W.element(k), y) for k in W.basis}
        for out in W.basis:
            constraints.append((FinVec((k, v[out]) for k, v in images.items()), unit[out]))
    try:
        return solve_linear(constraints, W.basis).particular
    except InconsistentSystem:
        return None


def modular_automorphism(phi: Functional, W: Wmha) -> LinMap:
    """σ with φ(ax) = φ(xσ(a)) for all a, x."""
    _require_faithful(phi, W)
    columns = {}
    for a in W.basis:
        target = phi.left_translate(W, W.element(a))
        columns[a] = _solve_density(phi, target, W, on_right=True)
    sigma = LinMap(W.basis, columns)
    logger.debug("modular automorphism of %s computed", W.name)
    return sigma


def radon_nikodym(phi: Functional, phi1: Functional, W: Wmha) -> Multiplier:
    """y in ε_s(A) with φ1 = φ(·y)."""
    _require_faithful(phi, W)
    y = _solve_density(phi, phi1, W)
    if not in_span(W.source_basis(), y):
        raise InternalConsistencyError(f"{W.name}: Radon-Nikodym density is outside ε_s(A)")
    return Multiplier.of_element(y, W.multiply, "y")


def modular_element(phi: Functional, psi: Functional, W: Wmha) -> Multiplier:
    """δ with ψ = φ(·δ); invertible whenever ψ is faithful."""
    _require_faithful(phi, W)
    delta = _solve_density(phi, psi, W)
    if kernel_faithful([psi], W) and inverse_element(W, delta) is None:
        raise InternalConsistencyError(f"{W.name}: modular element of a faithful pair is not invertible")
    return Multiplier.of_element(delta, W.multiply, "δ")


def distinguished_square_element(phi: Functional, W: Wmha) -> Multiplier:
    """Invertible y in ε_s(A) with φ(S²(x)) = φ(xy)."""
    y = radon_nikodym(phi, compose_antipode(phi, W, 2), W)
    if inverse_element(W, y.element) is None:
        raise InternalConsistencyError(f"{W.name}: S² density is not invertible")
    return y


@dataclass(frozen=True)
class IntegralCertificate:
    functional: Functional
    side: str
    faithful: bool
    modular_automorphism: LinMap | None = None
    modular_element: Multiplier | None = None

    @classmethod
    def build(cls, phi: Functional, W: Wmha, side: str = "left") -> IntegralCertificate:
        """Re-verify the side claim and attach modular data when faithful."""
        if not phi:
            raise IntegralError("the zero functional is not an integral")
        left, right = is_left_invariant(phi, W), is_right_invariant(phi, W)
        claims = {"left": left, "right": right, "two-sided": left and right}
        if side not in claims:
            raise ValueError(f"unknown side {side!r}")
        if not claims[side]:
            raise IntegralError(f"{phi.label or 'functional'} is not a {side} integral on {W.name}")
        faithful = kernel_faithful([phi], W)
        sigma = delta = None
        if faithful and left:
            sigma = modular_automorphism(phi, W)
            delta = modular_element(phi, compose_antipode(phi, W), W)
        return cls(phi, side, faithful, sigma, delta)


# --- Spanning forms ---

def spanning_forms(W: Wmha, left: Sequence[Functional], right: Sequence[Functional]) -> dict[str, list[FinVec]]:
    elements = [W.element(k) for k in W.basis]
    return {
        "φ(·a)": [phi.right_translate(W, a).values for phi in left for a in elements],
        "φ(a·)": [phi.left_translate(W, a).values for phi in left for a in elements],
        "ψ(·a)": [psi.right_translate(W, a).values for psi in right for a in elements],
        "ψ(a·)": [psi.left_translate(W, a).values for psi in right for a in elements],
    }


def spanning_forms_check(W: Wmha, left: Sequence[Functional], right: Sequence[Functional] | None = None) -> bool:
    """The four functional forms built from the integrals span one space."""
    if right is None:
        right = [compose_antipode(phi, W) for phi in left]
    forms = list(spanning_forms(W, left, right).values())
    return all(same_span(forms[0], other) for other in forms[1:])


# --- Transfer relations ---

class _TransferContext:
    def __init__(self, W: Wmha, phi: Functional, psi: Functional):
        self.W, self.phi, self.psi = W, phi, psi
        self._pairs: dict = {}

    def pair(self, item: str, p: Key, q: Key) -> tuple[FinVec, FinVec]:
        if (item, p, q) not in self._pairs:
            self._pairs[(item, p, q)] = _TRANSFER_PAIRS[item](self, p, q)
        return self._pairs[(item, p, q)]

    def mul(self, *factors: FinVec) -> FinVec:
        result = factors[0]
        for f in factors[1:]:
            result = self.W.multiply(result, f)
        return result


def _pair_i(ctx: _TransferContext, p, q):
    W, e, S, Si = ctx.W, ctx.W.element, ctx.W.antipode_basis, ctx.W.antipode_inverse_basis
    a = accumulate((c * ctx.phi(ctx.mul(S(n), e(q))), e(m)) for (m, n), c in W.coproduct_basis(p).items())
    b = accumulate((c * ctx.psi(ctx.mul(Si(m), e(p))), e(n)) for (m, n), c in W.coproduct_basis(q).items())
    return a, b


def _pair_ii(ctx: _TransferContext, p, q):
    W, e, S, Si = ctx.W, ctx.W.element, ctx.W.antipode_basis, ctx.W.antipode_inverse_basis
    a = accumulate((c * ctx.phi(ctx.mul(e(q), Si(n))), e(m)) for (m, n), c in W.coproduct_basis(p).items())
    b = accumulate((c * ctx.psi(ctx.mul(e(p), S(m))), e(n)) for (m, n), c in W.coproduct_basis(q).items())
    return a, b


def _pair_iii(ctx: _TransferContext, p, q):
    W, e, S = ctx.W, ctx.W.element, ctx.W.antipode_basis
    a = accumulate((c * ctx.phi(ctx.mul(e(q), S(n))), e(m)) for (m, n), c in W.coproduct_basis(p).items())
    b = accumulate((c * ctx.psi(ctx.mul(S(m), e(p))), e(n)) for (m, n), c in W.coproduct_basis(q).items())
    return a, b


def _pair_iv(ctx: _TransferContext, p, q):
    W, e, Si = ctx.W, ctx.W.element, ctx.W.antipode_inverse_basis
    a = accumulate((c * ctx.phi(ctx.mul(Si(n), e(q))), e(m)) for (m, n), c in W.coproduct_basis(p).items())
    b = accumulate((c * ctx.psi(ctx.mul(e(p), Si(m))), e(n)) for (m, n), c in W.coproduct_basis(q).items())
    return a, b


_TRANSFER_PAIRS = {"i": _pair_i, "ii": _pair_ii, "iii": _pair_iii, "iv": _pair_iv}

# which side x multiplies a (for ψ) and b (for φ) on
_TRANSFER_SHAPES = {"i": ("xa", "xb"), "ii": ("ax", "bx"), "iii": ("xa", "bx"), "iv": ("ax", "xb")}


def _transfer_law(item: str) -> Law:
    psi_shape, phi_shape = _TRANSFER_SHAPES[item]

    def check(ctx: _TransferContext, keys):
        p, q, x = keys
        a, b = ctx.pair(item, p, q)
        ex = ctx.W.element(x)
        lhs = ctx.psi(ctx.mul(ex, a) if psi_shape == "xa" else ctx.mul(a, ex))
        rhs = ctx.phi(ctx.mul(ex, b) if phi_shape == "xb" else ctx.mul(b, ex))
        if lhs != rhs:
            return f"ψ({psi_shape}) != φ({phi_shape})"

    return Law(f"transfer {item}", 3, check)


TRANSFER_LAWS: tuple[Law, ...] = tuple(_transfer_law(item) for item in ("i", "ii", "iii", "iv"))


def check_transfer_relations(phi: Functional, psi: Functional, W: Wmha,
                             settings: CheckSettings = CheckSettings()) -> LawReport:
    """The four relations tying a left integral φ to a right integral ψ, over (p, q, x)."""
    if not is_left_invariant(phi, W):
        raise IntegralError(f"{phi.label or 'φ'} is not left invariant on {W.name}")
    if not is_right_invariant(psi, W):
        raise IntegralError(f"{psi.label or 'ψ'} is not right invariant on {W.name}")
    return run_laws(TRANSFER_LAWS, _TransferContext(W, phi, psi), W.basis, settings)


def transfer_pair(item: str, phi: Functional, psi: Functional, W: Wmha, p: Key, q: Key) -> tuple[FinVec, FinVec]:
    """The (a, b) pair of a transfer relation for basis elements p, q."""
    return _TRANSFER_PAIRS[item](_TransferContext(W, phi, psi), p, q)
