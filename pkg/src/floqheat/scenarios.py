"""Four-resonator chain drivers: forward/backward runs, sweeps, method checks.

The measurement protocol keeps the modulation fixed and moves only the hot
bath: forward puts resonator 1 at T_hot, backward resonator 4.  Rectification
is the normalized asymmetry E = (P14 - P41)/(P14 + P41).
"""
from __future__ import annotations

import csv
import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import langevin, master, perturbation, timedomain
from .model import SI, FloqheatError, build_chain4

__all__ = [
    "DEFAULT_OMEGA0",
    "DEFAULT_T_HOT",
    "default_chain",
    "run_forward_backward",
    "rectification",
    "SweepSpec",
    "SweepRow",
    "sweep",
    "default_spectrum_grid",
    "spectrum_run",
    "MethodComparison",
    "compare_methods",
    "write_sweep_csv",
]

# defaults of the bundled chain scenario (rates fitted to a pair of graphene
# flakes 100 nm apart; any four-resonator realization works the same way)
DEFAULT_OMEGA0 = 1.69e14          # rad/s
DEFAULT_KAPPA_FRAC = 0.013        # kappa / omega0
DEFAULT_COUPLING_FRAC = 0.011     # g / kappa
DEFAULT_DRIVE_FRAC = 0.05         # Omega / omega0
DEFAULT_T_HOT = 300.0             # K

METHODS = ("qme", "qle", "oracle", "pert1", "pert2", "closed")
DEFAULT_N_MAX = {"qme": 15, "qle": 10}


def default_chain(beta=0.0, theta=0.5 * math.pi, Omega=None, omega0=DEFAULT_OMEGA0):
    """Standard four-resonator chain; beta/theta set the synthetic fields."""
    kappa = DEFAULT_KAPPA_FRAC * omega0
    if Omega is None:
        Omega = DEFAULT_DRIVE_FRAC * omega0
    return build_chain4(omega0, DEFAULT_COUPLING_FRAC * kappa, kappa,
                        beta, Omega, theta)


def _ends(net):
    return 0, net.N - 1


def run_forward_backward(net, mod, method="qme", n_max=None, quad_tol=1e-6,
                         rtol=1e-7, T_hot=DEFAULT_T_HOT, consts=SI):
    """(P14, P41) with the hot bath on the first then on the last resonator.

    The backward run reuses the identical modulation (phases untouched);
    only the temperature assignment moves.
    """
    first, last = _ends(net)
    if n_max is None:
        n_max = DEFAULT_N_MAX.get(method, 15)

    def one_direction(source, observer):
        hot = net.with_hot_bath(source, T_hot)
        if method == "qme":
            pm = master.power_matrix(hot, mod, n_max, consts)
            return pm.P[source, observer]
        if method == "qle":
            return langevin.integrate_power(hot, mod, source, observer,
                                            n_max, quad_tol, consts)
        if method == "oracle":
            samples = timedomain.evolve_to_cycle(hot, mod, rtol=rtol, consts=consts)
            row, _ = timedomain.cycle_average_power(samples, hot, source, consts)
            return row[observer]
        raise ValueError(f"unknown method {method!r}")

    if method in ("pert1", "pert2"):
        variant = "matrix_inverse" if method == "pert1" else "neumann"
        return perturbation.power_second_order(net, mod, variant, T_hot, consts)
    return (one_direction(first, last), one_direction(last, first))


def rectification(P14, P41):
    """Normalized forward/backward asymmetry (P14 - P41)/(P14 + P41)."""
    total = P14 + P41
    if total == 0.0:
        raise ZeroDivisionError("both powers are zero; rectification undefined")
    return (P14 - P41) / total


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep over a fixed chain context.

    parameter is "beta", "theta" or "Omega"; theta values address the
    dephasing of the third resonator (chain convention).  Angles in rad,
    rates in rad/s.
    """

    network: object
    modulation: object
    parameter: str
    values: np.ndarray
    methods: tuple = ("qme",)
    n_max_qme: int = 15
    n_max_qle: int = 10
    quad_tol: float = 1e-6
    rtol: float = 1e-7
    T_hot: float = DEFAULT_T_HOT

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.parameter not in ("beta", "theta", "Omega"):
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if self.values.size == 0 or not np.all(np.isfinite(self.values)):
            raise ValueError("sweep values must be nonempty and finite")
        if not self.methods:
            raise ValueError("select at least one method")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.parameter == "theta" and self.network.N != 4:
            raise ValueError("theta sweeps assume the four-resonator chain")


@dataclass(frozen=True)
class SweepRow:
    method: str
    beta: float
    Omega: float
    theta: float          # dephasing between the two modulated resonators
    P14: float
    P41: float
    E: float
    dP: float
    status: str = "ok"


def _apply_parameter(mod, parameter, value):
    if parameter == "beta":
        return dataclasses.replace(mod, beta=float(value))
    if parameter == "Omega":
        return dataclasses.replace(mod, Omega=float(value))
    theta = np.array(mod.theta)
    theta[2] = float(value)
    return dataclasses.replace(mod, theta=theta)


def _dephasing(mod):
    if len(mod.theta) == 4:
        return float(mod.theta[2] - mod.theta[1])
    return float("nan")


def _n_max_for(spec, method):
    return spec.n_max_qle if method == "qle" else spec.n_max_qme


def _sweep_point(spec, value, method):
    mod = _apply_parameter(spec.modulation, spec.parameter, value)
    nan = float("nan")
    try:
        if method == "closed":
            res = perturbation.perturbation_result(spec.network, mod,
                                                   spec.T_hot)
            return SweepRow(method, mod.beta, mod.Omega, _dephasing(mod),
                            nan, nan, nan, res.deltaP_closedform)
        p14, p41 = run_forward_backward(
            spec.network, mod, method, n_max=_n_max_for(spec, method),
            quad_tol=spec.quad_tol, rtol=spec.rtol, T_hot=spec.T_hot,
        )
        total = p14 + p41
        e = (p14 - p41) / total if total != 0.0 else nan
        return SweepRow(method, mod.beta, mod.Omega, _dephasing(mod),
                        p14, p41, e, p14 - p41)
    except (FloqheatError, ValueError) as exc:
        # a failing point must not abort the sweep; flag the row instead
        return SweepRow(method, mod.beta, mod.Omega, _dephasing(mod),
                        nan, nan, nan, nan, status=f"error: {exc}")


def sweep(spec, workers=1):
    """One SweepRow per (value, method), ordered by value then method."""
    tasks = [(value, method) for value in spec.values for method in spec.methods]
    if workers <= 1:
        return [_sweep_point(spec, v, m) for v, m in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_sweep_point, [spec] * len(tasks),
                             [v for v, _ in tasks], [m for _, m in tasks]))
    return rows


def default_spectrum_grid(net, mod, n_max, halfwidth=8.0, per_peak=121,
                          background=600):
    """Frequency grid resolving each expected peak plus a coarse background.

    halfwidth is in units of the largest linewidth.
    """
    lo, hi, peaks = langevin.integration_window(net, mod, n_max)
    width = halfwidth * net.kappa.max()
    pieces = [np.linspace(lo, hi, background)]
    for p in peaks:
        pieces.append(np.linspace(p - width, p + width, per_peak))
    grid = np.unique(np.concatenate(pieces))
    return grid[(grid >= lo) & (grid <= hi)]


def spectrum_run(net, mod, grid=None, n_max=10, T_hot=DEFAULT_T_HOT, consts=SI):
    """Forward and backward heat-flux spectra of the chain on a shared grid.

    Returns (grid, forward, backward): forward is P_{1->4, omega} with the
    first resonator hot, backward P_{4->1, omega} with the last hot.
    """
    first, last = _ends(net)
    if grid is None:
        grid = default_spectrum_grid(net, mod, n_max)
    fwd = langevin.heat_flux_spectrum(net.with_hot_bath(first, T_hot), mod,
                                      first, last, grid, n_max, consts)
    bwd = langevin.heat_flux_spectrum(net.with_hot_bath(last, T_hot), mod,
                                      last, first, grid, n_max, consts)
    return grid, fwd, bwd


@dataclass(frozen=True)
class MethodComparison:
    """Cross-method agreement report on one operating point."""

    powers: dict                   # method -> (P14, P41) or error string
    deviations: dict               # pair label -> max relative deviation
    passed: bool
    tol_qme_qle: float
    tol_qme_oracle: float

    def lines(self):
        out = []
        for method, val in self.powers.items():
            if isinstance(val, str):
                out.append(f"{method:>7}: FAILED ({val})")
            else:
                out.append(f"{method:>7}: P14 = {val[0]:.6e} W   P41 = {val[1]:.6e} W")
        for label, dev in self.deviations.items():
            out.append(f"{label}: max rel deviation {dev:.3e}")
        out.append("cross-validation " + ("PASS" if self.passed else "FAIL"))
        return out


def compare_methods(net, mod, n_max_qme=15, n_max_qle=10, quad_tol=1e-6,
                    rtol=1e-7, T_hot=DEFAULT_T_HOT, consts=SI,
                    tol_qme_qle=5e-3, tol_qme_oracle=1e-4):
    """Run qme, qle and oracle on the same point and grade the agreement."""
    settings = {"qme": n_max_qme, "qle": n_max_qle, "oracle": None}
    powers = {}
    for method, n_max in settings.items():
        try:
            powers[method] = run_forward_backward(
                net, mod, method, n_max=n_max, quad_tol=quad_tol,
                rtol=rtol, T_hot=T_hot, consts=consts,
            )
        except (FloqheatError, ValueError) as exc:
            powers[method] = str(exc)

    def rel_dev(a, b):
        return max(abs(x - y) / abs(x) for x, y in zip(a, b))

    deviations = {}
    passed = not any(isinstance(v, str) for v in powers.values())
    if not isinstance(powers["qme"], str):
        if not isinstance(powers["qle"], str):
            deviations["qme-vs-qle"] = rel_dev(powers["qme"], powers["qle"])
            passed = passed and deviations["qme-vs-qle"] <= tol_qme_qle
        if not isinstance(powers["oracle"], str):
            deviations["qme-vs-oracle"] = rel_dev(powers["qme"], powers["oracle"])
            passed = passed and deviations["qme-vs-oracle"] <= tol_qme_oracle
    return MethodComparison(powers=powers, deviations=deviations, passed=passed,
                            tol_qme_qle=tol_qme_qle, tol_qme_oracle=tol_qme_oracle)


def write_sweep_csv(path, rows):
    """Long-format sweep export, one row per point per method."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "beta_rad_s", "Omega_rad_s", "theta_rad",
                    "P14_W", "P41_W", "E", "dP_W", "status"])
        for r in rows:
            w.writerow([r.method, f"{r.beta:.10e}", f"{r.Omega:.10e}",
                        f"{r.theta:.10e}", f"{r.P14:.12e}", f"{r.P41:.12e}",
                        f"{r.E:.12e}", f"{r.dP:.12e}", r.status])
