"""System description: resonator networks, modulation protocols, occupations.

All quantities are SI: angular frequencies and rates in rad/s, temperatures
in K, powers in W.  Resonator indices in the Python API are 0-based; the
text formats (config files, CSV output) label resonators 1-based.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalConstants",
    "SI",
    "ResonatorNetwork",
    "ModulationProtocol",
    "PowerMatrix",
    "Violation",
    "occupation",
    "validate",
    "ensure_valid",
    "build_chain4",
    "FloqheatError",
    "ValidationError",
    "SingularBlockError",
    "QuadratureError",
    "ConvergenceError",
]


class FloqheatError(Exception):
    """Base class for solver errors."""


class ValidationError(FloqheatError):
    """Inputs violate a structural invariant (zero damping, bad shapes, ...)."""


class SingularBlockError(FloqheatError):
    """A frequency-domain block is numerically singular; valid inputs with
    strictly positive damping cannot produce this."""


class QuadratureError(FloqheatError):
    """Adaptive quadrature did not reach the requested tolerance.

    Carries the best estimate and the error bound reported by the
    integrator.
    """

    def __init__(self, message, estimate, bound):
        super().__init__(message)
        self.estimate = estimate
        self.bound = bound


class ConvergenceError(FloqheatError):
    """Time stepping did not reach a periodic steady state."""


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar and kB, defaulting to the CODATA SI values."""

    hbar: float = 1.054571817e-34  # J s
    kB: float = 1.380649e-23       # J/K

    def __post_init__(self):
        if self.hbar <= 0 or self.kB <= 0:
            raise ValueError("physical constants must be positive")


SI = PhysicalConstants()


def occupation(T, omega, consts=SI):
    """Bose-Einstein occupation 1/(exp(hbar*omega/kB*T) - 1) of a bath mode.

    Returns exactly 0.0 at T = 0.  Raises ValueError for omega <= 0 or
    negative temperature.
    """
    if omega <= 0.0:
        raise ValueError(f"occupation requires omega > 0, got {omega}")
    if T < 0.0:
        raise ValueError(f"occupation requires T >= 0, got {T}")
    if T == 0.0:
        return 0.0
    x = consts.hbar * omega / (consts.kB * T)
    if x > 700.0:
        # exp would overflow; the occupation is below ~1e-304 anyway
        return 0.0
    return 1.0 / math.expm1(x)


def _frozen_array(value, dtype):
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ResonatorNetwork:
    """A static network of damped resonators, each with its own heat bath.

    omega : (N,) resonance frequencies [rad/s]
    g     : (N, N) complex coupling matrix [rad/s], zero diagonal
    kappa : (N,) damping rates [rad/s], strictly positive
    T     : (N,) bath temperatures [K]
    hermitian : when True, ``validate`` additionally enforces g = g^dagger
    """

    omega: np.ndarray
    g: np.ndarray
    kappa: np.ndarray
    T: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        omega = _frozen_array(self.omega, float)
        g = _frozen_array(self.g, complex)
        kappa = _frozen_array(self.kappa, float)
        temp = _frozen_array(self.T, float)
        n = omega.shape[0]
        if omega.ndim != 1:
            raise ValueError("omega must be a 1-d array")
        if g.shape != (n, n):
            raise ValueError(f"g must be shaped ({n}, {n}), got {g.shape}")
        if kappa.shape != (n,) or temp.shape != (n,):
            raise ValueError("kappa and T must have the same length as omega")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "T", temp)

    @property
    def N(self):
        return self.omega.shape[0]

    def occupations(self, consts=SI):
        """Per-bath occupation evaluated at the unmodulated resonance."""
        return np.array(
            [occupation(t, w, consts) for t, w in zip(self.T, self.omega)]
        )

    def with_temperatures(self, T):
        """Copy of the network with the bath temperature vector replaced."""
        return dataclasses.replace(self, T=np.asarray(T, dtype=float))

    def with_hot_bath(self, k, T_hot):
        """Copy with bath k at T_hot and every other bath at 0 K."""
        temp = np.zeros(self.N)
        temp[k] = T_hot
        return self.with_temperatures(temp)


@dataclass(frozen=True)
class ModulationProtocol:
    """Periodic frequency modulation omega_k -> omega_k + m_k beta cos(Omega t + theta_k).

    beta  : modulation amplitude [rad/s], >= 0
    Omega : drive frequency [rad/s], > 0
    theta : (N,) per-resonator phases [rad]
    mask  : (N,) 0/1 switches selecting which resonators are modulated
    """

    beta: float
    Omega: float
    theta: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen_array(self.theta, float))
        object.__setattr__(self, "mask", _frozen_array(self.mask, int))
        if self.theta.ndim != 1 or self.mask.shape != self.theta.shape:
            raise ValueError("theta and mask must be 1-d arrays of equal length")

    @property
    def period(self):
        return 2.0 * math.pi / self.Omega


@dataclass(frozen=True)
class PowerMatrix:
    """Cycle-averaged pairwise powers P[k, l] = P_{k->l} and emitted powers."""

    P: np.ndarray      # (N, N), zero diagonal [W]
    P_em: np.ndarray   # (N,) [W]

    def __post_init__(self):
        object.__setattr__(self, "P", _frozen_array(self.P, float))
        object.__setattr__(self, "P_em", _frozen_array(self.P_em, float))

    def conservation_residual(self, k):
        """|P_em[k] - sum_l P[k, l]|, the energy balance defect for source k."""
        return abs(self.P_em[k] - self.P[k].sum())


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" or "warning"
    message: str


def validate(net, mod, consts=SI):
    """Check all structural invariants plus the white-noise applicability rules.

    Returns a list of Violation records; empty iff every invariant holds and
    no white-noise warning fires.  Warnings are non-fatal: solvers only
    refuse to run on severity "error".
    """
    out = []
    err = lambda m: out.append(Violation("error", m))
    warn = lambda m: out.append(Violation("warning", m))

    n = net.N
    if np.any(net.omega <= 0.0):
        err("omega must be strictly positive")
    if np.any(np.abs(np.diag(net.g)) != 0.0):
        err("coupling matrix must have zero diagonal (g_ii = 0)")
    if np.any(net.kappa <= 0.0):
        err("kappa must be strictly positive")
    if np.any(net.T < 0.0):
        err("temperatures must be nonnegative")
    if net.hermitian and not np.allclose(net.g, net.g.conj().T, rtol=0.0,
                                         atol=1e-15 * max(1.0, np.abs(net.g).max())):
        err("hermitian flag set but g != conj(g).T")

    if len(mod.theta) != n:
        err(f"theta has length {len(mod.theta)}, network has {n} resonators")
    if len(mod.mask) != n:
        err(f"mask has length {len(mod.mask)}, network has {n} resonators")
    if not np.all(np.isin(mod.mask, (0, 1))):
        err("mask entries must be exactly 0 or 1")
    if mod.beta < 0.0:
        err("beta must be nonnegative")
    if mod.Omega <= 0.0:
        err("Omega must be strictly positive")

    # white-noise applicability: constant bath occupations need
    # beta << omega_k and hbar*Omega << kB*T for every thermally occupied bath
    if n and not np.any(net.omega <= 0.0):
        if mod.beta >= 0.1 * net.omega.min():
            warn(
                "white-noise regime questionable: beta = "
                f"{mod.beta:.3e} >= 0.1 * min(omega)"
            )
        hot = net.T[net.T > 0.0]
        if hot.size and mod.Omega > 0.0 and consts.hbar * mod.Omega >= 0.1 * consts.kB * hot.min():
            warn(
                "white-noise regime questionable: hbar*Omega = "
                f"{consts.hbar * mod.Omega:.3e} J >= 0.1 * kB * min nonzero T"
            )
    return out


def ensure_valid(net, mod, consts=SI):
    """Raise ValidationError on any invariant violation; forward warnings."""
    report = validate(net, mod, consts)
    errors = [v.message for v in report if v.severity == "error"]
    if errors:
        raise ValidationError("; ".join(errors))
    for v in report:
        if v.severity == "warning":
            warnings.warn(v.message, stacklevel=3)


def build_chain4(omega0, g, kappa, beta, Omega, theta):
    """Four identical resonators in a line with equal nearest-neighbor coupling.

    Resonators 2 and 3 (1-based) are modulated, with resonator 3 dephased by
    theta.  Bath temperatures start at 0 K; callers pick the hot bath.
    """
    gm = np.zeros((4, 4), dtype=complex)
    for i, j in ((0, 1), (1, 2), (2, 3)):
        gm[i, j] = gm[j, i] = g
    net = ResonatorNetwork(
        omega=np.full(4, float(omega0)),
        g=gm,
        kappa=np.full(4, float(kappa)),
        T=np.zeros(4),
        hermitian=True,
    )
    mod = ModulationProtocol(
        beta=float(beta),
        Omega=float(Omega),
        theta=np.array([0.0, 0.0, float(theta), 0.0]),
        mask=np.array([0, 1, 1, 0]),
    )
    return net, mod
