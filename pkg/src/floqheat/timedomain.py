"""Brute-force time integration of the moment equations to the periodic state.

Structurally independent of the Fourier solver: the generator is assembled
directly from the coupled moment ODEs, stepped with fixed-step RK4, and
cycle averages are taken by trapezoid over one converged period.  Exists to
catch transcription errors that a shared matrix assembly would repeat.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import SI, ConvergenceError, ensure_valid, occupation
from .master import moment_index_map

__all__ = [
    "MomentSamples",
    "generator",
    "evolve_to_cycle",
    "cycle_averaged_moments",
    "cycle_average_power",
    "write_trajectory_csv",
]


@dataclass(frozen=True)
class MomentSamples:
    """Moment-vector samples over one period, endpoints included."""

    t: np.ndarray          # (S + 1,) [s]
    y: np.ndarray          # (S + 1, N^2) complex, MomentIndexMap order
    periods_used: int


def _static_generator(net, consts=SI):
    """Time-independent part of dy/dt = G(t) y + s, plus the source vector."""
    N = net.N
    imap = moment_index_map(N)
    g = net.g
    gen = np.zeros((imap.size, imap.size), dtype=complex)
    src = np.zeros(imap.size, dtype=complex)
    nvec = net.occupations(consts)
    for k in range(N):
        row = imap.index(k, k)
        gen[row, row] = -2.0 * net.kappa[k]
        src[row] = 2.0 * net.kappa[k] * nvec[k]
        for j in range(N):
            if j == k:
                continue
            gen[row, imap.index(k, j)] += -1j * g[k, j]
            gen[row, imap.index(j, k)] += 1j * g[j, k]
    for k in range(N):
        for l in range(N):
            if k == l:
                continue
            row = imap.index(k, l)
            gen[row, row] = 1j * (net.omega[k] - net.omega[l]) - net.kappa[k] - net.kappa[l]
            for j in range(N):
                if j == k or j == l:
                    continue
                gen[row, imap.index(k, j)] += -1j * g[l, j]
                gen[row, imap.index(j, l)] += 1j * g[j, k]
            gen[row, imap.index(k, k)] += -1j * g[l, k]
            gen[row, imap.index(l, l)] += 1j * g[l, k]
    return gen, src


def generator(net, mod, t, consts=SI):
    """Full generator at time t: returns (G(t), s) with G periodic in 2 pi / Omega."""
    imap = moment_index_map(net.N)
    gen, src = _static_generator(net, consts)
    gen = gen.copy()
    c = mod.mask * np.cos(mod.Omega * t + mod.theta)
    drive = 1j * mod.beta * (c[imap.bra] - c[imap.ket])
    gen[np.arange(imap.size), np.arange(imap.size)] += drive
    return gen, src


def evolve_to_cycle(net, mod, rtol=1e-7, max_periods=256, steps_per_period=4096,
                    consts=SI):
    """Integrate from vacuum until cycle-averaged occupations stop moving.

    Fixed-step RK4 for reproducibility; convergence is declared when the
    period-to-period relative change of the cycle-averaged diagonal moments
    drops below rtol (phases of cross moments settle later, the averages
    are what powers need).
    """
    ensure_valid(net, mod, consts)
    if rtol <= 0.0:
        raise ValueError("rtol must be positive")
    if steps_per_period < 2000:
        raise ValueError("need at least 2000 steps per period")
    N = net.N
    imap = moment_index_map(N)
    gen0, src = _static_generator(net, consts)
    bra, ket = imap.bra, imap.ket
    beta, big_omega, theta, mask = mod.beta, mod.Omega, mod.theta, mod.mask

    period = 2.0 * np.pi / big_omega
    dt = period / steps_per_period
    # RK4 stability: the stiffest rates are the moment detunings plus the
    # drive excursion; keep |lambda| dt well inside the stability region
    rate = (np.abs(np.diag(gen0)).max() + 2.0 * beta) * dt
    if rate > 2.5:
        raise ConvergenceError(
            f"step size unstable: |lambda| dt = {rate:.2f} > 2.5; "
            "raise steps_per_period"
        )

    def drive_diag(t):
        c = mask * np.cos(big_omega * t + theta)
        return 1j * beta * (c[bra] - c[ket])

    def rhs(t, y):
        return gen0 @ y + drive_diag(t) * y + src

    y = np.zeros(imap.size, dtype=complex)
    times = np.arange(steps_per_period + 1) * dt
    traj = np.empty((steps_per_period + 1, imap.size), dtype=complex)
    prev_avg = None
    for p in range(max_periods):
        t0 = p * period
        traj[0] = y
        for s in range(steps_per_period):
            t = t0 + s * dt
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
            k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
            k4 = rhs(t + dt, y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            traj[s + 1] = y
        if not np.all(np.isfinite(y)):
            raise ConvergenceError(f"non-finite state after period {p + 1}")
        avg = np.trapezoid(traj[:, :N].real, dx=dt, axis=0) / period
        if prev_avg is not None:
            # per-component: every occupation (hence every power) settles to
            # rtol of itself; the floor keeps roundoff-dead entries from
            # stalling the loop
            floor = max(np.abs(avg).max(), 1e-300) * 1e-12
            tol = rtol * np.maximum(np.abs(avg), floor)
            if np.all(np.abs(avg - prev_avg) <= tol):
                return MomentSamples(t=t0 + times, y=traj.copy(), periods_used=p + 1)
        prev_avg = avg
    raise ConvergenceError(
        f"no periodic steady state after {max_periods} periods at rtol {rtol:g}"
    )


def cycle_averaged_moments(samples):
    """Trapezoid average of every moment over the stored period."""
    dt = samples.t[1] - samples.t[0]
    span = samples.t[-1] - samples.t[0]
    return np.trapezoid(samples.y, dx=dt, axis=0) / span


def cycle_average_power(samples, net, source, consts=SI):
    """Powers from converged samples: returns (row P_{source->l}, P_em).

    Same prefactors as the Fourier route, with the zeroth coefficient
    replaced by the explicit period average.
    """
    N = net.N
    imap = moment_index_map(N)
    avg = cycle_averaged_moments(samples)
    n_src = occupation(net.T[source], net.omega[source], consts)
    pref = consts.hbar * net.omega[source]
    row = np.zeros(N)
    for l in range(N):
        if l != source:
            row[l] = pref * 2.0 * net.kappa[l] * avg[imap.index(l, l)].real
    p_em = pref * 2.0 * net.kappa[source] * (n_src - avg[imap.index(source, source)].real)
    return row, p_em


def write_trajectory_csv(path, samples):
    """Debug dump of the stored period, one row per (t, moment)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_s", "moment_index", "re", "im"])
        for t, row in zip(samples.t, samples.y):
            for idx, val in enumerate(row):
                w.writerow([f"{t:.10e}", idx, f"{val.real:.12e}", f"{val.imag:.12e}"])
