"""Closed-form bounds on time constants and states, plus trajectory monitors.

The time-constant interval for neuron i is

    cm / (g_leak + sum w + sum w_hat)  <=  tau_i  <=  cm / (g_leak + sum w_hat)

(chemical weights over incoming synapses, junction conductances over
touching junctions).  Membership of the effective time constant is an
algebraic consequence of the activations lying in [0, 1], so the monitor
checks it with zero tolerance.

The state box for chemical-only networks is

    min(v_leak, min incoming e_rev)  <=  v_i(t)  <=  max(v_leak, max incoming e_rev)

and is forward invariant; state checks carry a tolerance because a
discrete solver can transiently overshoot.  Networks with gap junctions
get no state box (the invariance argument only covers chemical synapses),
so the monitor then checks time constants alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, UnsupportedTopologyError
from .model import (
    ChemicalSynapse,
    GapJunction,
    LtcNetwork,
    NeuronParams,
    _chem_activations,
    _conductance_loads,
)
from .solver import Trajectory

__all__ = [
    "TauInterval",
    "StateBox",
    "ViolationKind",
    "Violation",
    "ViolationReport",
    "tau_bounds",
    "state_bounds",
    "monitor_trajectory",
    "conservation_check",
    "random_network",
]


@dataclass(frozen=True)
class TauInterval:
    neuron: int
    tau_min: float
    tau_max: float

    def __post_init__(self):
        if not (0 < self.tau_min <= self.tau_max):
            raise ValueError(
                f"need 0 < tau_min <= tau_max, got [{self.tau_min}, {self.tau_max}]"
            )


@dataclass(frozen=True)
class StateBox:
    neuron: int
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"need lo <= hi, got [{self.lo}, {self.hi}]")


class ViolationKind(enum.Enum):
    TAU_LOW = "TAU_LOW"
    TAU_HIGH = "TAU_HIGH"
    STATE_LOW = "STATE_LOW"
    STATE_HIGH = "STATE_HIGH"


@dataclass(frozen=True)
class Violation:
    time: float
    neuron: int
    kind: ViolationKind
    value: float
    bound: float


@dataclass
class ViolationReport:
    entries: list[Violation] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.entries


def _load_vectors(net: LtcNetwork) -> tuple[np.ndarray, np.ndarray]:
    """Per-neuron conductance loads at full (sigma=1) and zero (sigma=0) gating."""
    n_syn = len(net.chem)
    full = _conductance_loads(net, np.ones(n_syn))
    empty = _conductance_loads(net, np.zeros(n_syn))
    return full, empty


def tau_bounds(i: int, net: LtcNetwork) -> TauInterval:
    """Closed-form interval for the time constant of neuron ``i``."""
    if not 0 <= i < net.size:
        raise IndexError(f"neuron index {i} out of range for {net.size} neurons")
    full, empty = _load_vectors(net)
    with np.errstate(divide="ignore"):
        tau_min = float(net._cm[i] / full[i])
        tau_max = float(net._cm[i] / empty[i])
    return TauInterval(i, tau_min, tau_max)


def state_bounds(net: LtcNetwork) -> list[StateBox]:
    """Per-neuron reachable box; defined for chemical-only networks."""
    if net.gaps:
        raise UnsupportedTopologyError(
            "state bounds are defined for chemical-synapse-only networks; "
            f"this network has {len(net.gaps)} gap junction(s)"
        )
    boxes = []
    for i, p in enumerate(net.neurons):
        erevs = [s.e_rev for s in net.chem if s.dst == i]
        if erevs:
            lo = min(p.v_leak, min(erevs))
            hi = max(p.v_leak, max(erevs))
        else:
            lo = hi = p.v_leak
        boxes.append(StateBox(i, lo, hi))
    return boxes


def monitor_trajectory(
    traj: Trajectory, net: LtcNetwork, tolerance: float = 1e-6
) -> ViolationReport:
    """Check every recorded state against the tau intervals and state boxes.

    Tau membership is exact (no tolerance); state boxes are widened by
    ``tolerance``.  Gap-junction networks are checked for tau only.
    """
    if traj.states.shape[1] != net.size:
        raise DimensionMismatchError(
            f"trajectory has {traj.states.shape[1]} columns, network has "
            f"{net.size} neurons"
        )
    full, empty = _load_vectors(net)
    with np.errstate(divide="ignore"):
        tau_min = net._cm / full
        tau_max = net._cm / empty
    if net.gaps:
        boxes = None
    else:
        boxes = state_bounds(net)
        lo = np.array([b.lo for b in boxes]) - tolerance
        hi = np.array([b.hi for b in boxes]) + tolerance
    report = ViolationReport(tolerance=tolerance)
    for t, u in zip(traj.times, traj.states):
        sig = _chem_activations(net, u)
        with np.errstate(divide="ignore"):
            tau = net._cm / _conductance_loads(net, sig)
        for i in np.nonzero(tau < tau_min)[0]:
            report.entries.append(
                Violation(float(t), int(i), ViolationKind.TAU_LOW,
                          float(tau[i]), float(tau_min[i]))
            )
        for i in np.nonzero(tau > tau_max)[0]:
            report.entries.append(
                Violation(float(t), int(i), ViolationKind.TAU_HIGH,
                          float(tau[i]), float(tau_max[i]))
            )
        if boxes is not None:
            for i in np.nonzero(u < lo)[0]:
                report.entries.append(
                    Violation(float(t), int(i), ViolationKind.STATE_LOW,
                              float(u[i]), float(boxes[i].lo))
                )
            for i in np.nonzero(u > hi)[0]:
                report.entries.append(
                    Violation(float(t), int(i), ViolationKind.STATE_HIGH,
                              float(u[i]), float(boxes[i].hi))
                )
    return report


def conservation_check(traj: Trajectory, net: LtcNetwork) -> float:
    """Max drift of sum(cm_i * v_i) for leakless gap-only networks."""
    if net.chem:
        raise UnsupportedTopologyError(
            "conservation check requires a gap-junction-only network"
        )
    if any(p.g_leak != 0.0 for p in net.neurons):
        raise UnsupportedTopologyError(
            "conservation check requires g_leak == 0 for every neuron"
        )
    if traj.states.shape[1] != net.size:
        raise DimensionMismatchError(
            f"trajectory has {traj.states.shape[1]} columns, network has "
            f"{net.size} neurons"
        )
    if net.size == 0:
        return 0.0
    totals = traj.states @ net._cm
    return float(np.max(np.abs(totals - totals[0])))


def random_network(
    rng: np.random.Generator,
    chemical_only: bool = False,
    p_chem: float = 0.5,
    p_gap: float = 0.3,
) -> LtcNetwork:
    """Random small network for property suites.

    Sizes 2-8 neurons; weights U[0,2], gamma U[0.5,2], mu U[-1,1],
    e_rev U[-1,1], v_leak U[-0.5,0.5], cm and g_leak U[0.5,2].  Edges obey
    the feed-forward output rule; hidden autapses are allowed.
    """
    size = int(rng.integers(2, 9))
    n_output = int(rng.integers(1, size))
    n_hidden = size - n_output
    neurons = tuple(
        NeuronParams(
            cm=rng.uniform(0.5, 2.0),
            g_leak=rng.uniform(0.5, 2.0),
            v_leak=rng.uniform(-0.5, 0.5),
        )
        for _ in range(size)
    )
    chem = []
    for src in range(n_hidden):
        for dst in range(size):
            if rng.uniform() < p_chem:
                chem.append(
                    ChemicalSynapse(
                        src=src,
                        dst=dst,
                        w=rng.uniform(0.0, 2.0),
                        gamma=rng.uniform(0.5, 2.0),
                        mu=rng.uniform(-1.0, 1.0),
                        e_rev=rng.uniform(-1.0, 1.0),
                    )
                )
    gaps = []
    if not chemical_only:
        for a in range(n_hidden):
            for b in range(a + 1, n_hidden):
                if rng.uniform() < p_gap:
                    gaps.append(GapJunction(a=a, b=b, w_hat=rng.uniform(0.0, 2.0)))
    return LtcNetwork(neurons, tuple(chem), tuple(gaps), n_output)
