"""Exponential-polynomial trial states and their exactly solvable potentials.

For ``phi(x) = exp(-h(x))`` with ``h(x) = a_1 x + ... + a_M x**M`` one has
``phi''/phi = h'**2 - h''``, so ``phi`` is the exact ground state of
``V0 = h'**2 - h'' + E0`` with ``E0 = 2 a_2 - a_1**2`` (that choice of ``E0``
removes the constant term of ``V0``). :func:`solve` picks ``a`` so that the
lowest-degree coefficients of ``V - V0`` vanish.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .polynomial import Parity, Polynomial, parity
from .quadrature import (
    QuadratureConfig,
    QuadratureError,
    exponent_polynomial,
    first_order_correction,
    is_admissible,
)

__all__ = [
    "AnsatzConfig",
    "AnsatzSolution",
    "AnsatzSolveError",
    "StartDiagnostic",
    "default_exponent_degree",
    "default_multistart_grid",
    "zeroth_order_potential",
    "residual",
    "target_degrees",
    "find_roots",
    "solve",
]

log = logging.getLogger(__name__)

EVEN_START_A2 = (0.25, 0.5, 1.0, 2.0)
EVEN_START_HIGHER = (0.01, 0.1, 0.3)
MAX_HALVINGS = 30
POLISH_STEPS = 3  # extra full steps after convergence, kept while the residual shrinks
SNAP_RELATIVE = 1e-9
DEDUP_TOLERANCE = 1e-8


def default_exponent_degree(V: Polynomial) -> int:
    """Smallest even ``M >= 4`` with ``2M - 2 > deg V``."""
    m = 4
    while 2 * m - 2 <= V.degree:
        m += 2
    return m


def default_multistart_grid(exponent_degree: int) -> list[tuple]:
    """Start vectors (length M) from the default coefficient box; odd entries start at 0."""
    n_even = exponent_degree // 2
    axes = [EVEN_START_A2] + [EVEN_START_HIGHER] * (n_even - 1)
    grid = []
    for combo in itertools.product(*axes):
        start = [0.0] * exponent_degree
        for j, value in enumerate(combo):
            start[2 * j + 1] = value
        grid.append(tuple(start))
    return grid


@dataclass(frozen=True)
class AnsatzConfig:
    exponent_degree: int
    newton_tolerance: float = 1e-12
    max_iterations: int = 100
    multistart_grid: Optional[Sequence[Sequence[float]]] = None
    reduce_parity: bool = True  # solve in the even-coefficient subspace for even V

    def __post_init__(self):
        m = self.exponent_degree
        if not isinstance(m, (int, np.integer)) or m < 2 or m % 2:
            raise ValueError(f"exponent_degree must be an even integer >= 2, got {m!r}")
        if not self.newton_tolerance > 0:
            raise ValueError("newton_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.multistart_grid is not None:
            for start in self.multistart_grid:
                if len(start) != m:
                    raise ValueError(f"multistart vectors must have length {m}")

    def starts(self) -> list[tuple]:
        if self.multistart_grid is None:
            return default_multistart_grid(self.exponent_degree)
        return [tuple(float(v) for v in s) for s in self.multistart_grid]

    def validate_for(self, V: Polynomial) -> None:
        if not V.is_confining():
            raise ValueError("potential must have even degree >= 2 and a positive leading coefficient")
        if not 2 * self.exponent_degree - 2 > V.degree:
            raise ValueError(
                f"exponent degree M={self.exponent_degree} too small for a degree-{V.degree} "
                "potential: need 2M - 2 > deg V"
            )


@dataclass(frozen=True)
class AnsatzSolution:
    a: tuple
    e0: float
    v0: Polynomial
    residual: Polynomial
    annihilated_degrees: tuple

    @property
    def exponent_degree(self) -> int:
        return len(self.a)

    def to_dict(self) -> dict:
        return {
            "a": list(self.a),
            "e0": self.e0,
            "v0": list(self.v0.coefficients),
            "residual": list(self.residual.coefficients),
            "annihilated_degrees": list(self.annihilated_degrees),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "AnsatzSolution":
        return cls(
            a=tuple(float(v) for v in data["a"]),
            e0=float(data["e0"]),
            v0=Polynomial(data["v0"]),
            residual=Polynomial(data["residual"]),
            annihilated_degrees=tuple(int(d) for d in data["annihilated_degrees"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "AnsatzSolution":
        return cls.from_dict(json.loads(text))


@dataclass
class StartDiagnostic:
    start: tuple
    status: str  # "converged", "inadmissible", "singular", "stalled", "max_iterations"
    iterations: int
    residual_norm: float
    a: Optional[tuple] = None
    total_energy: Optional[float] = None


class AnsatzSolveError(RuntimeError):
    def __init__(self, message: str, diagnostics: Sequence[StartDiagnostic] = ()):
        self.diagnostics = list(diagnostics)
        lines = [message]
        for d in self.diagnostics:
            lines.append(
                f"  start={d.start} status={d.status} iterations={d.iterations} "
                f"|F|={d.residual_norm:.3e}"
            )
        super().__init__("\n".join(lines))


def _check_vector(a: Sequence[float]) -> tuple:
    a = tuple(float(v) for v in a)
    if not a:
        raise ValueError("exponent coefficient vector is empty")
    if len(a) % 2:
        raise ValueError(f"exponent coefficient vector must have even length, got {len(a)}")
    return a


def _v0_coefficients(a: np.ndarray) -> np.ndarray:
    """Coefficients of V0 for a numpy vector ``a`` (fast path for Newton)."""
    m = a.size
    powers = np.arange(1, m + 1)
    hp = a * powers  # h' coefficients, degree 0..M-1
    hpp = hp[1:] * np.arange(1, m)  # h'' coefficients, degree 0..M-2
    v0 = np.convolve(hp, hp)
    v0[: hpp.size] -= hpp
    v0[0] = 0.0  # E0 cancels the constant of h'**2 - h''
    return v0


def zeroth_order_potential(a: Sequence[float]) -> tuple[Polynomial, float]:
    """Return ``(V0, E0)`` with ``V0 = h'**2 - h'' + E0`` and ``E0 = 2 a_2 - a_1**2``."""
    a = _check_vector(a)
    e0 = 2.0 * a[1] - a[0] ** 2
    h = exponent_polynomial(a)
    hp = h.derivative()
    v0 = hp * hp - hp.derivative()
    coeffs = list(v0.as_array(max(v0.degree + 1, 1)))
    coeffs[0] = 0.0
    return Polynomial(coeffs), e0


def residual(V: Polynomial, a: Sequence[float]) -> Polynomial:
    """Perturbation ``V - V0``."""
    v0, _ = zeroth_order_potential(a)
    return V - v0


def _check_potential(V: Polynomial, M: int) -> None:
    if M < 2 or M % 2:
        raise ValueError(f"exponent degree must be an even integer >= 2, got {M!r}")
    if not 2 * M - 2 > V.degree:
        raise ValueError(f"need 2M - 2 > deg V (M={M}, deg V={V.degree})")


def target_degrees(V: Polynomial, M: int) -> list[int]:
    """Degrees of ``V - V0`` the solver zeroes: 2, 4, ..., M for even V, else 1..M."""
    _check_potential(V, M)
    if parity(V) is Parity.EVEN:
        return list(range(2, M + 1, 2))
    return list(range(1, M + 1))


class _System:
    """Residual map from free exponent coefficients to targeted coefficients of V0 - V."""

    def __init__(self, V: Polynomial, M: int, free: list[int], targets: list[int]):
        self.M = M
        self.free = free
        self.targets = np.array(targets)
        self.v = V.as_array(2 * M - 1)

    def expand(self, params: np.ndarray) -> np.ndarray:
        a = np.zeros(self.M)
        a[self.free] = params
        return a

    def __call__(self, params: np.ndarray) -> np.ndarray:
        v0 = _v0_coefficients(self.expand(params))
        return v0[self.targets] - self.v[self.targets]

    def jacobian(self, params: np.ndarray) -> np.ndarray:
        n = params.size
        jac = np.empty((self.targets.size, n))
        for k in range(n):
            step = 1e-7 * max(1.0, abs(params[k]))
            e = np.zeros(n)
            e[k] = step
            jac[:, k] = (self(params + e) - self(params - e)) / (2.0 * step)
        return jac


def _newton(system: _System, x0: np.ndarray, tol: float, max_iterations: int):
    x = np.array(x0, dtype=float)
    f = system(x)
    norm = float(np.max(np.abs(f)))
    for it in range(max_iterations + 1):
        if norm < tol:
            x, norm = _polish(system, x, f, norm)
            return x, "converged", it, norm
        if it == max_iterations:
            break
        jac = system.jacobian(x)
        try:
            if np.linalg.cond(jac) > 1e14:
                raise np.linalg.LinAlgError
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return x, "singular", it, norm
        base = np.linalg.norm(f)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = x + t * step
            f_trial = system(trial)
            if np.linalg.norm(f_trial) < base:
                break
            t *= 0.5
        else:
            return x, "stalled", it, norm
        x, f = trial, f_trial
        norm = float(np.max(np.abs(f)))
    return x, "max_iterations", max_iterations, norm


def _polish(system: _System, x: np.ndarray, f: np.ndarray, norm: float):
    """Push a converged root towards machine precision."""
    for _ in range(POLISH_STEPS):
        if norm == 0.0:
            break
        try:
            trial = x + np.linalg.solve(system.jacobian(x), -f)
        except np.linalg.LinAlgError:
            break
        f_trial = system(trial)
        trial_norm = float(np.max(np.abs(f_trial)))
        if not trial_norm < norm:
            break
        x, f, norm = trial, f_trial, trial_norm
    return x, norm


def _snap(system: _System, params: np.ndarray, tol: float) -> np.ndarray:
    """Zero out negligible coefficients if that keeps the targets annihilated."""
    cutoff = SNAP_RELATIVE * max(1.0, float(np.max(np.abs(params))))
    snapped = np.where(np.abs(params) <= cutoff, 0.0, params)
    if np.array_equal(snapped, params):
        return params
    if float(np.max(np.abs(system(snapped)))) < tol:
        return snapped
    return params


def _closed_form_even_quartic(V: Polynomial) -> Optional[np.ndarray]:
    """(a2, a4) for even V of degree <= 4 with M = 4, or None if no admissible root.

    Matching x**2 and x**4 gives 4 a2**2 - 12 a4 = b2 and 16 a2 a4 = b4.
    """
    b2, b4 = V.coefficient(2), V.coefficient(4)
    if b4 == 0.0:
        if b2 <= 0.0:
            return None
        return np.array([np.sqrt(b2) / 2.0, 0.0])
    if b4 < 0.0:
        return None
    # eliminate a4 = b4 / (16 a2): 4 a2**3 - b2 a2 - 3 b4 / 4 = 0, one positive root
    roots = np.roots([4.0, 0.0, -b2, -0.75 * b4])
    real = [r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0]
    if not real:
        return None
    a2 = max(real)
    for _ in range(3):
        a2 -= (4 * a2**3 - b2 * a2 - 0.75 * b4) / (12 * a2**2 - b2)
    return np.array([a2, b4 / (16.0 * a2)])


def _build_solution(V: Polynomial, a: np.ndarray, targets: list[int]) -> AnsatzSolution:
    a_t = tuple(float(v) for v in a)
    v0, e0 = zeroth_order_potential(a_t)
    return AnsatzSolution(a=a_t, e0=e0, v0=v0, residual=V - v0, annihilated_degrees=tuple(targets))


def find_roots(V: Polynomial, config: AnsatzConfig | None = None) -> list[AnsatzSolution]:
    """All distinct admissible roots reached from the multistart grid, in start order.

    Raises
    ------
    ValueError
        If V is not a confining polynomial or the exponent degree is too small.
    AnsatzSolveError
        If no start yields an admissible root.
    """
    if config is None:
        config = AnsatzConfig(default_exponent_degree(V))
    M = config.exponent_degree
    config.validate_for(V)

    even = config.reduce_parity and parity(V) is Parity.EVEN
    if even:
        free = list(range(1, M, 2))  # a_2, a_4, ..., a_M
        targets = list(range(2, M + 1, 2))
    else:
        free = list(range(M))
        targets = list(range(1, M + 1))
    system = _System(V, M, free, targets)

    starts: list[tuple] = []
    if even and M == 4 and V.degree <= 4:
        closed = _closed_form_even_quartic(V)
        if closed is not None:
            starts.append(tuple(system.expand(closed)))
    starts.extend(config.starts())

    diagnostics: list[StartDiagnostic] = []
    roots: list[np.ndarray] = []
    for start in starts:
        x0 = np.asarray(start, dtype=float)[free]
        x, status, iterations, norm = _newton(system, x0, config.newton_tolerance, config.max_iterations)
        diag = StartDiagnostic(tuple(start), status, iterations, norm)
        diagnostics.append(diag)
        if status != "converged":
            continue
        x = _snap(system, x, config.newton_tolerance)
        a = system.expand(x)
        diag.a = tuple(a)
        if not is_admissible(a):
            diag.status = "inadmissible"
            continue
        if not any(np.max(np.abs(a - other)) <= DEDUP_TOLERANCE for other in roots):
            roots.append(a)

    if not roots:
        if diagnostics and all(d.status == "singular" for d in diagnostics):
            raise AnsatzSolveError("Jacobian numerically singular at every start", diagnostics)
        raise AnsatzSolveError("no admissible root found from any start", diagnostics)
    return [_build_solution(V, a, targets) for a in roots]


def solve(
    V: Polynomial,
    config: AnsatzConfig | None = None,
    quadrature: QuadratureConfig | None = None,
) -> AnsatzSolution:
    """Solve for exponent coefficients that annihilate the low-degree residual.

    Every start in the multistart grid is run through damped Newton; among the
    admissible roots found, the one with the lowest variational energy
    ``E0 + E1`` wins (ties go to the earlier start).
    """
    roots = find_roots(V, config)
    if len(roots) == 1:
        return roots[0]
    best: Optional[AnsatzSolution] = None
    best_energy = np.inf
    failures = []
    for solution in roots:
        try:
            energy = first_order_correction(V, solution, quadrature).total
        except (QuadratureError, ValueError) as exc:
            log.debug("skipping root %s: %s", solution.a, exc)
            failures.append(f"a={solution.a}: {exc}")
            continue
        if energy < best_energy:
            best, best_energy = solution, energy
    if best is None:
        raise AnsatzSolveError("quadrature failed for every admissible root:\n" + "\n".join(failures))
    return best
