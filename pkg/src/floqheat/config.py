"""YAML run configuration: constants overrides, network and modulation.

Unknown keys anywhere in the document are rejected so a typo cannot
silently fall back to a default.  Resonator indices in ``couplings`` are
1-based, matching the labels used in the CSV output.
"""
from __future__ import annotations

import numpy as np
import yaml

from .model import (FloqheatError, ModulationProtocol, PhysicalConstants,
                    ResonatorNetwork)

__all__ = ["ConfigError", "load_config", "parse_config"]


class ConfigError(FloqheatError):
    """Malformed or inconsistent run configuration."""


_TOP_KEYS = {"constants", "network", "modulation"}
_CONST_KEYS = {"hbar", "kB"}
_NET_KEYS = {"N", "omega", "kappa", "T", "couplings", "hermitian"}
_MOD_KEYS = {"beta", "Omega", "theta", "mask"}


def _check_keys(section, mapping, allowed):
    if not isinstance(mapping, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {section!r}: {', '.join(unknown)}")


def _vector(section, mapping, key, n=None, required=True):
    if key not in mapping:
        if required:
            raise ConfigError(f"missing {section}.{key}")
        return None
    try:
        vec = np.asarray(mapping[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key} must be a list of numbers") from exc
    if vec.ndim != 1:
        raise ConfigError(f"{section}.{key} must be a flat list")
    if n is not None and vec.size != n:
        raise ConfigError(f"{section}.{key} must have {n} entries, got {vec.size}")
    return vec


def _scalar(section, mapping, key):
    if key not in mapping:
        raise ConfigError(f"missing {section}.{key}")
    value = mapping[key]
    if isinstance(value, bool):
        raise ConfigError(f"{section}.{key} must be a number")
    try:
        # YAML 1.1 reads unsigned exponents like 8.45e12 as strings;
        # accept anything float() does
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key} must be a number") from exc


def parse_config(doc):
    """Build (constants, network, modulation) from a parsed YAML mapping."""
    _check_keys("top level", doc, _TOP_KEYS)
    for key in ("network", "modulation"):
        if key not in doc:
            raise ConfigError(f"missing section {key!r}")

    consts_map = doc.get("constants", {}) or {}
    _check_keys("constants", consts_map, _CONST_KEYS)
    consts = PhysicalConstants(
        hbar=float(consts_map.get("hbar", PhysicalConstants.hbar)),
        kB=float(consts_map.get("kB", PhysicalConstants.kB)),
    )

    net_map = doc["network"]
    _check_keys("network", net_map, _NET_KEYS)
    omega = _vector("network", net_map, "omega")
    n = omega.size
    if "N" in net_map and int(net_map["N"]) != n:
        raise ConfigError(f"network.N = {net_map['N']} but omega has {n} entries")
    kappa = _vector("network", net_map, "kappa", n)
    temp = _vector("network", net_map, "T", n, required=False)
    if temp is None:
        temp = np.zeros(n)
    hermitian = bool(net_map.get("hermitian", False))

    g = np.zeros((n, n), dtype=complex)
    explicit = set()
    for entry in net_map.get("couplings", []) or []:
        try:
            i, j, re, im = entry
            i, j = int(i), int(j)
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"coupling entries must be [i, j, re, im], got {entry!r}"
            ) from exc
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ConfigError(f"coupling indices out of range or diagonal: {entry!r}")
        g[i - 1, j - 1] = complex(float(re), float(im))
        explicit.add((i - 1, j - 1))
    if hermitian:
        for (i, j) in list(explicit):
            if (j, i) not in explicit:
                g[j, i] = np.conj(g[i, j])

    net = ResonatorNetwork(omega=omega, g=g, kappa=kappa, T=temp,
                           hermitian=hermitian)

    mod_map = doc["modulation"]
    _check_keys("modulation", mod_map, _MOD_KEYS)
    theta = _vector("modulation", mod_map, "theta", n)
    mask_vec = _vector("modulation", mod_map, "mask", n)
    if not np.all(np.isin(mask_vec, (0.0, 1.0))):
        raise ConfigError("modulation.mask entries must be 0 or 1")
    mod = ModulationProtocol(
        beta=_scalar("modulation", mod_map, "beta"),
        Omega=_scalar("modulation", mod_map, "Omega"),
        theta=theta,
        mask=mask_vec.astype(int),
    )
    return consts, net, mod


def load_config(path):
    """Read and parse a YAML configuration file."""
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} does not contain a configuration mapping")
    return parse_config(doc)
