"""Network document (JSON) and trajectory CSV formats.

The network document is a JSON object with keys ``neurons`` (ordered list
of {cm, g_leak, v_leak}), ``chemical_synapses`` (list of {src, dst, w,
gamma, mu, e_rev}), ``gap_junctions`` (list of {a, b, w_hat}) and
``n_output``; output neurons are the LAST n_output indices.  Parse
failures name the offending key or list index.

Trajectory CSV: header ``t,v0,v1,...``, one row per recorded time, every
value serialized with 17 significant digits so read-back is bit-exact.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DimensionMismatchError, FormatError, TopologyError
from .model import ChemicalSynapse, GapJunction, LtcNetwork, NeuronParams
from .solver import Trajectory

__all__ = [
    "serialize_network",
    "parse_network",
    "trajectory_to_csv",
    "trajectory_from_csv",
    "write_network",
    "read_network",
    "write_trajectory",
    "read_trajectory",
]

_NEURON_KEYS = ("cm", "g_leak", "v_leak")
_SYNAPSE_KEYS = ("src", "dst", "w", "gamma", "mu", "e_rev")
_GAP_KEYS = ("a", "b", "w_hat")
_TOP_KEYS = ("neurons", "chemical_synapses", "gap_junctions", "n_output")


def serialize_network(net: LtcNetwork) -> str:
    doc = {
        "neurons": [
            {"cm": p.cm, "g_leak": p.g_leak, "v_leak": p.v_leak} for p in net.neurons
        ],
        "chemical_synapses": [
            {
                "src": s.src,
                "dst": s.dst,
                "w": s.w,
                "gamma": s.gamma,
                "mu": s.mu,
                "e_rev": s.e_rev,
            }
            for s in net.chem
        ],
        "gap_junctions": [
            {"a": g.a, "b": g.b, "w_hat": g.w_hat} for g in net.gaps
        ],
        "n_output": net.n_output,
    }
    return json.dumps(doc, indent=2) + "\n"


def _check_keys(item, required, path):
    if not isinstance(item, dict):
        raise FormatError(f"{path} must be an object, got {type(item).__name__}")
    missing = [k for k in required if k not in item]
    if missing:
        raise FormatError(f"{path}: missing key {missing[0]!r}")
    extra = [k for k in item if k not in required]
    if extra:
        raise FormatError(f"{path}: unknown key {extra[0]!r}")


def _number(item, key, path):
    v = item[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(f"{path}.{key}: expected a number, got {v!r}")
    return float(v)


def _integer(item, key, path):
    v = item[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(f"{path}.{key}: expected an integer, got {v!r}")
    return v


def parse_network(text: str) -> LtcNetwork:
    """Parse and validate a network document; topology rules included."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise FormatError("top level must be a JSON object")
    for key in doc:
        if key not in _TOP_KEYS:
            raise FormatError(f"unknown top-level key {key!r}")
    for key in ("neurons", "n_output"):
        if key not in doc:
            raise FormatError(f"missing top-level key {key!r}")
    if isinstance(doc["n_output"], bool) or not isinstance(doc["n_output"], int):
        raise FormatError(f"n_output: expected an integer, got {doc['n_output']!r}")
    if not isinstance(doc["neurons"], list):
        raise FormatError("neurons must be a list")

    neurons = []
    for i, item in enumerate(doc["neurons"]):
        path = f"neurons[{i}]"
        _check_keys(item, _NEURON_KEYS, path)
        values = {k: _number(item, k, path) for k in _NEURON_KEYS}
        try:
            neurons.append(NeuronParams(**values))
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc

    synapses = []
    for i, item in enumerate(doc.get("chemical_synapses", []) or []):
        path = f"chemical_synapses[{i}]"
        _check_keys(item, _SYNAPSE_KEYS, path)
        try:
            synapses.append(
                ChemicalSynapse(
                    src=_integer(item, "src", path),
                    dst=_integer(item, "dst", path),
                    w=_number(item, "w", path),
                    gamma=_number(item, "gamma", path),
                    mu=_number(item, "mu", path),
                    e_rev=_number(item, "e_rev", path),
                )
            )
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc

    gaps = []
    for i, item in enumerate(doc.get("gap_junctions", []) or []):
        path = f"gap_junctions[{i}]"
        _check_keys(item, _GAP_KEYS, path)
        try:
            gaps.append(
                GapJunction(
                    a=_integer(item, "a", path),
                    b=_integer(item, "b", path),
                    w_hat=_number(item, "w_hat", path),
                )
            )
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc

    try:
        return LtcNetwork(tuple(neurons), tuple(synapses), tuple(gaps),
                          doc["n_output"])
    except (ValueError, TopologyError) as exc:
        raise FormatError(str(exc)) from exc


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def trajectory_to_csv(traj: Trajectory) -> str:
    n = traj.states.shape[1]
    header = "t" + "".join(f",v{i}" for i in range(n))
    lines = [header]
    for t, row in zip(traj.times, traj.states):
        lines.append(",".join([_fmt(t), *(_fmt(v) for v in row)]))
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str) -> Trajectory:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty trajectory file")
    header = lines[0].split(",")
    if header[0] != "t" or any(
        h != f"v{i}" for i, h in enumerate(header[1:])
    ):
        raise FormatError(f"bad trajectory header {lines[0]!r}")
    n_cols = len(header)
    times = []
    states = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != n_cols:
            raise FormatError(
                f"line {lineno}: expected {n_cols} columns, got {len(parts)}"
            )
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        times.append(row[0])
        states.append(row[1:])
    try:
        return Trajectory(
            np.array(times), np.array(states).reshape(len(times), n_cols - 1)
        )
    except (ValueError, DimensionMismatchError) as exc:
        raise FormatError(str(exc)) from exc


def write_network(net: LtcNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_network(net))


def read_network(path) -> LtcNetwork:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read network file {path}: {exc}") from exc
    return parse_network(text)


def write_trajectory(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trajectory_to_csv(traj))


def read_trajectory(path) -> Trajectory:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read trajectory file {path}: {exc}") from exc
    return trajectory_from_csv(text)
