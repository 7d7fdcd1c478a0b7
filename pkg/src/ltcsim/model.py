"""Liquid time-constant network data model and ODE right-hand sides.

A network is a list of membrane-integrator neurons wired by sigmoid-gated
chemical synapses and Ohmic gap junctions.  Neuron ``i`` obeys

    cm_i * dv_i/dt = g_leak_i * (v_leak_i - v_i)
                     + sum over incoming chemical synapses of
                           w * sigma(v_src) * (e_rev - v_i)
                     + sum over touching gap junctions of
                           w_hat * (v_other - v_i)

with sigma(v) = 1 / (1 + exp(-gamma * (v + mu))).  The per-synapse form
above is the canonical semantics; the vectorized evaluator reproduces it
componentwise exactly (same accumulation order).

Ordering convention: hidden neurons occupy indices 0 .. n_hidden-1 and
output neurons the last ``n_output`` indices.  Output neurons may only
receive chemical synapses; any edge leaving an output neuron (including
gap junctions, which are bidirectional) is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatchError, TopologyError

__all__ = [
    "NeuronParams",
    "ChemicalSynapse",
    "GapJunction",
    "LtcNetwork",
    "sigmoid_activation",
    "chemical_current",
    "gap_current",
    "neuron_derivative",
    "network_derivative",
    "effective_time_constant",
    "validate_state",
]


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class NeuronParams:
    """Membrane parameters of one neuron.

    ``g_leak == 0`` is admitted so that leakless gap-only networks (used by
    the conservation check) are constructible; negative values are rejected.
    """

    cm: float
    g_leak: float
    v_leak: float

    def __post_init__(self):
        object.__setattr__(self, "cm", _require_finite("cm", self.cm))
        object.__setattr__(self, "g_leak", _require_finite("g_leak", self.g_leak))
        object.__setattr__(self, "v_leak", _require_finite("v_leak", self.v_leak))
        if self.cm <= 0:
            raise ValueError(f"cm must be > 0, got {self.cm}")
        if self.g_leak < 0:
            raise ValueError(f"g_leak must be >= 0, got {self.g_leak}")


@dataclass(frozen=True)
class ChemicalSynapse:
    """Sigmoid-gated synapse from neuron ``src`` into neuron ``dst``.

    Autapses (src == dst) are permitted.
    """

    src: int
    dst: int
    w: float
    gamma: float
    mu: float
    e_rev: float

    def __post_init__(self):
        object.__setattr__(self, "src", int(self.src))
        object.__setattr__(self, "dst", int(self.dst))
        for name in ("w", "gamma", "mu", "e_rev"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.src < 0 or self.dst < 0:
            raise ValueError(f"synapse indices must be >= 0, got ({self.src}, {self.dst})")
        if self.w < 0:
            raise ValueError(f"w must be >= 0, got {self.w}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class GapJunction:
    """Bidirectional Ohmic coupling between neurons ``a`` and ``b``."""

    a: int
    b: int
    w_hat: float

    def __post_init__(self):
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        object.__setattr__(self, "w_hat", _require_finite("w_hat", self.w_hat))
        if self.a < 0 or self.b < 0:
            raise ValueError(f"junction indices must be >= 0, got ({self.a}, {self.b})")
        if self.a == self.b:
            raise ValueError(f"gap junction endpoints must differ, got a == b == {self.a}")
        if self.w_hat < 0:
            raise ValueError(f"w_hat must be >= 0, got {self.w_hat}")


@dataclass(frozen=True)
class LtcNetwork:
    """Immutable network: neurons, synapses, junctions and output split.

    Output neurons are the last ``n_output`` indices.  Construction
    validates index ranges and the feed-forward output rule, then caches
    flat parameter arrays used by the vectorized evaluators.
    """

    neurons: tuple[NeuronParams, ...]
    chem: tuple[ChemicalSynapse, ...] = field(default=())
    gaps: tuple[GapJunction, ...] = field(default=())
    n_output: int = 0

    def __post_init__(self):
        object.__setattr__(self, "neurons", tuple(self.neurons))
        object.__setattr__(self, "chem", tuple(self.chem))
        object.__setattr__(self, "gaps", tuple(self.gaps))
        object.__setattr__(self, "n_output", int(self.n_output))
        size = len(self.neurons)
        if not 0 <= self.n_output <= size:
            raise ValueError(
                f"n_output must be between 0 and {size}, got {self.n_output}"
            )
        n_hidden = size - self.n_output
        for k, syn in enumerate(self.chem):
            if syn.src >= size or syn.dst >= size:
                raise ValueError(
                    f"chemical_synapses[{k}]: index out of range for {size} neurons"
                )
            if syn.src >= n_hidden:
                raise TopologyError(
                    f"chemical_synapses[{k}]: source {syn.src} is an output neuron; "
                    "outputs must not project to any neuron"
                )
        for k, gj in enumerate(self.gaps):
            if gj.a >= size or gj.b >= size:
                raise ValueError(
                    f"gap_junctions[{k}]: index out of range for {size} neurons"
                )
            if gj.a >= n_hidden or gj.b >= n_hidden:
                raise TopologyError(
                    f"gap_junctions[{k}]: endpoint touches an output neuron; "
                    "gap junctions are bidirectional and must stay hidden-hidden"
                )
        self._build_caches()

    def _build_caches(self):
        neurons = self.neurons
        object.__setattr__(self, "_cm", np.array([p.cm for p in neurons]))
        object.__setattr__(self, "_g", np.array([p.g_leak for p in neurons]))
        object.__setattr__(self, "_vleak", np.array([p.v_leak for p in neurons]))
        chem = self.chem
        object.__setattr__(self, "_src", np.array([s.src for s in chem], dtype=np.intp))
        object.__setattr__(self, "_dst", np.array([s.dst for s in chem], dtype=np.intp))
        object.__setattr__(self, "_w", np.array([s.w for s in chem]))
        object.__setattr__(self, "_gamma", np.array([s.gamma for s in chem]))
        object.__setattr__(self, "_mu", np.array([s.mu for s in chem]))
        object.__setattr__(self, "_erev", np.array([s.e_rev for s in chem]))
        # Gap endpoints concatenated a-side first, then b-side, so that a
        # single bincount accumulates in the same order as the two-pass
        # per-neuron loop in neuron_derivative.
        ga = np.array([g.a for g in self.gaps], dtype=np.intp)
        gb = np.array([g.b for g in self.gaps], dtype=np.intp)
        gw = np.array([g.w_hat for g in self.gaps])
        object.__setattr__(self, "_gself", np.concatenate([ga, gb]))
        object.__setattr__(self, "_gother", np.concatenate([gb, ga]))
        object.__setattr__(self, "_gw2", np.concatenate([gw, gw]))

    @property
    def size(self) -> int:
        return len(self.neurons)

    @property
    def n_hidden(self) -> int:
        return len(self.neurons) - self.n_output


def validate_state(u, net: LtcNetwork) -> np.ndarray:
    """Coerce ``u`` to a float vector and check length and finiteness."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.ndim != 1 or u.shape[0] != net.size:
        raise DimensionMismatchError(
            f"state has shape {u.shape}, network has {net.size} neurons"
        )
    if u.size and not np.isfinite(u).all():
        raise ValueError("state contains non-finite entries")
    return u


def sigmoid_activation(v_pre: float, gamma: float, mu: float) -> float:
    """Synaptic gating 1 / (1 + exp(-gamma * (v_pre + mu)))."""
    return float(expit(gamma * (v_pre + mu)))


def chemical_current(syn: ChemicalSynapse, v_pre: float, v_post: float) -> float:
    """Current injected into ``syn.dst`` for the given pre/post potentials."""
    sig = sigmoid_activation(v_pre, syn.gamma, syn.mu)
    return syn.w * sig * (syn.e_rev - v_post)


def gap_current(gj: GapJunction, v_self: float, v_other: float) -> float:
    """Current into the endpoint held at ``v_self``; antisymmetric on swap."""
    return gj.w_hat * (v_other - v_self)


def neuron_derivative(i: int, state, net: LtcNetwork) -> float:
    """dv_i/dt from leak, incoming chemical and touching gap currents.

    Accumulation order (chemical sum, then gap a-side pass, then b-side
    pass) matches the vectorized ``network_derivative`` exactly.
    """
    u = np.asarray(state, dtype=float)
    if not 0 <= i < net.size:
        raise IndexError(f"neuron index {i} out of range for {net.size} neurons")
    chem = 0.0
    for syn in net.chem:
        if syn.dst == i:
            chem += chemical_current(syn, u[syn.src], u[i])
    gap = 0.0
    for gj in net.gaps:
        if gj.a == i:
            gap += gap_current(gj, u[gj.a], u[gj.b])
    for gj in net.gaps:
        if gj.b == i:
            gap += gap_current(gj, u[gj.b], u[gj.a])
    p = net.neurons[i]
    return (p.g_leak * (p.v_leak - u[i]) + chem + gap) / p.cm


def _chem_activations(net: LtcNetwork, u: np.ndarray) -> np.ndarray:
    """Per-synapse sigmoid activations at state ``u``."""
    return expit(net._gamma * (u[net._src] + net._mu))


def _conductance_loads(net: LtcNetwork, sig: np.ndarray) -> np.ndarray:
    """Per-neuron g_leak + sum(w * sig) + sum(w_hat) for given activations.

    Shared by the effective time-constant and the interval bounds of
    ``verify.tau_bounds`` so the membership inequality holds exactly in
    floating point (one accumulation order for all three).
    """
    size = net.size
    chem = np.bincount(net._dst, weights=net._w * sig, minlength=size)
    gap = np.bincount(net._gself, weights=net._gw2, minlength=size)
    return net._g + chem + gap


def network_derivative(state, net: LtcNetwork) -> np.ndarray:
    """All-neuron derivative; componentwise equal to neuron_derivative."""
    u = np.asarray(state, dtype=float)
    if u.ndim != 1 or u.shape[0] != net.size:
        raise DimensionMismatchError(
            f"state has shape {u.shape}, network has {net.size} neurons"
        )
    size = net.size
    sig = _chem_activations(net, u)
    chem = np.bincount(
        net._dst, weights=net._w * sig * (net._erev - u[net._dst]), minlength=size
    )
    gap = np.bincount(
        net._gself, weights=net._gw2 * (u[net._gother] - u[net._gself]), minlength=size
    )
    return (net._g * (net._vleak - u) + chem + gap) / net._cm


def effective_time_constant(i: int, state, net: LtcNetwork) -> float:
    """State-dependent time constant cm / (g_leak + sum w*sigma + sum w_hat).

    Equals cm/g_leak for an isolated neuron; gap junctions contribute their
    conductance linearly.  Always lies in the interval computed by
    ``verify.tau_bounds`` because the activations stay within [0, 1].
    """
    if not 0 <= i < net.size:
        raise IndexError(f"neuron index {i} out of range for {net.size} neurons")
    u = np.asarray(state, dtype=float)
    sig = _chem_activations(net, u)
    loads = _conductance_loads(net, sig)
    with np.errstate(divide="ignore"):
        return float(net._cm[i] / loads[i])
