"""Shared network builders for the test suite."""

import numpy as np

from ltcsim import ChemicalSynapse, GapJunction, LtcNetwork, NeuronParams


def leak_neuron(cm=1.0, g=1.0, v_leak=0.0):
    return LtcNetwork((NeuronParams(cm, g, v_leak),), (), (), 1)


def two_neuron_chain():
    """Hidden neuron 0 drives output neuron 1; fixed parameters used by the
    hand-computed derivative values and the solver order tests."""
    return LtcNetwork(
        (NeuronParams(2.0, 1.0, 0.5), NeuronParams(1.0, 0.5, -0.1)),
        (ChemicalSynapse(0, 1, 1.5, 2.0, 0.1, 0.8),),
        (),
        1,
    )


def driven_pair():
    """Presynaptic neuron 0 rests at its leak potential, so the output
    neuron obeys cm dv/dt = A - B v with constant A, B.

    Returns (network, A, B): A = g*v_leak + w*sigma*e_rev, B = g + w*sigma
    with sigma = 0.5 by construction (mu cancels the presynaptic state).
    """
    net = LtcNetwork(
        (NeuronParams(1.0, 1.0, 0.3), NeuronParams(1.0, 1.0, 0.0)),
        (ChemicalSynapse(0, 1, 2.0, 1.0, -0.3, 1.0),),
        (),
        1,
    )
    return net, 1.0, 2.0


def gap_ring(w_hat=1.0, cms=(1.0, 1.0, 1.0)):
    """Leakless symmetric three-neuron ring coupled by gap junctions."""
    return LtcNetwork(
        tuple(NeuronParams(cm, 0.0, 0.0) for cm in cms),
        (),
        (GapJunction(0, 1, w_hat), GapJunction(1, 2, w_hat), GapJunction(0, 2, w_hat)),
        0,
    )


def rotation_field():
    from ltcsim import VectorField

    return VectorField(
        2, lambda x: np.array([x[1], -x[0]]), [[-1.5, 1.5], [-1.5, 1.5]]
    )


def box_arrays(boxes):
    lo = np.array([b.lo for b in boxes])
    hi = np.array([b.hi for b in boxes])
    return lo, hi
