"""Network reduction against a direct closed-loop oracle, and the
coupling-gain designer."""

import numpy as np
import pytest

from qlinbae import bae, feedback, matcore, qsys
from qlinbae.errors import DimensionError, WellPosednessError

from conftest import random_feedback_network

# the two-mode worked interconnection used as a regression anchor: an
# indefinite-real-part Hamiltonian whose loop shift renders it purely
# imaginary
OM_MINUS = np.array([[2.0, 3.0 + 2.0j], [3.0 - 2.0j, 4.0]])
OM_PLUS = np.array([[2.0, 3.0 - 1.0j], [3.0 - 1.0j, 5.0]])
K11 = np.array([[1.0, 1.0 + 1.0j]])
K12 = np.array([[1.0, 2.0 - 1.0j]])
K21 = np.array([[1.0 + 1.0j, 1.0 + 1.0j]])
K22 = np.array([[1.0 + 1.0j, 2.0 + 2.0j]])


def _anchor_network():
    return feedback.make_network(OM_MINUS, OM_PLUS, K11, K12, K21, K22,
                                 s_b=-1j * np.eye(1))


# ------------------------------------------------------------ construction

def test_make_network_partitions():
    net = _anchor_network()
    assert net.m1 == 1 and net.m2 == 1
    assert np.allclose(net.k11, K11)
    assert np.allclose(net.k22, K22)
    assert np.allclose(net.plant.s, np.eye(2))


def test_nonunitary_beamsplitter_rejected():
    with pytest.raises(DimensionError):
        feedback.make_network(OM_MINUS, OM_PLUS, K11, K12, K21, K22,
                              s_b=2.0 * np.eye(1))


def test_singular_loop_raises():
    net = feedback.make_network(OM_MINUS, OM_PLUS, K11, K12, K21, K22,
                                s_b=np.eye(1))  # I - S22 S_b = 0
    with pytest.raises(WellPosednessError):
        feedback.reduce_network(net)


# -------------------------------------------------------------- reduction

def test_open_loop_reduction_is_trivial():
    """With the looped couplings removed the reduction returns the outer
    subsystem untouched."""
    z = np.zeros((1, 2))
    net = feedback.make_network(OM_MINUS, OM_PLUS, K11, K12, z, z,
                                s_b=-np.eye(1))
    red = feedback.reduce_network(net)
    assert np.allclose(red.c_minus, K11)
    assert np.allclose(red.c_plus, K12)
    assert np.allclose(red.omega_minus, OM_MINUS)
    assert np.allclose(red.omega_plus, OM_PLUS)


def test_reduction_matches_closed_loop_oracle():
    rng = np.random.default_rng(0)
    for _ in range(25):
        net = random_feedback_network(rng, n=2, m1=1, m2=2)
        report = feedback.verify_reduction(net, tol=1e-9)
        assert report.passed, report.max_deviation


def test_reduction_preserves_structural_validity():
    rng = np.random.default_rng(1)
    for _ in range(10):
        net = random_feedback_network(rng, n=2, m1=2, m2=1)
        red = feedback.reduce_network(net)  # new_system re-validates
        assert np.allclose(red.omega_minus, red.omega_minus.conj().T)
        assert np.allclose(red.omega_plus, red.omega_plus.T)
        assert matcore.inf_norm(red.s @ red.s.conj().T - np.eye(net.m1)) < 1e-9


def test_anchor_network_oracle_and_crossterm_shift():
    """The worked interconnection: the reduction must match the closed-loop
    oracle, and the simplified cross-term shift must land on purely
    imaginary Hamiltonian blocks."""
    net = _anchor_network()
    report = feedback.verify_reduction(net, tol=1e-9)
    assert report.passed
    om, op = feedback.crossterm_hamiltonian_shift(net)
    assert matcore.is_imag(om, tol=1e-10)
    assert matcore.is_imag(op, tol=1e-10)
    assert np.allclose(om, np.array([[0.0, 1.0j], [-1.0j, 0.0]]))
    assert np.allclose(op, np.array([[0.0, 0.0], [0.0, 3.0j]]))


# ---------------------------------------------------------------- designer

def test_designer_trivial_target():
    """An already purely imaginary Hamiltonian needs no loop: the search
    must return certified candidates from the open-loop start."""
    om = np.array([[1.0j * 0.0]])  # zero is trivially purely imaginary
    op = np.array([[0.5j]])
    cfg = feedback.SearchConfig(n_starts=2, seed=1)
    cands = feedback.design_couplings(om, op, (1, 1), search_cfg=cfg,
                                      s_b_candidates=("identity", "-i"),
                                      s_g_candidates=("identity",))
    assert cands
    best = cands[0]
    assert best.objective <= 1e-12
    assert best.report.consistency
    red = best.reduced
    assert matcore.is_imag(red.omega_minus, tol=1e-5)
    assert matcore.is_imag(red.omega_plus, tol=1e-5)


def test_designer_indefinite_target_needs_swap_topology():
    """The anchor Hamiltonian has an indefinite real part, which the
    identity routing cannot cancel; the swap routing can."""
    cfg = feedback.SearchConfig(n_starts=3, seed=0)
    only_identity = feedback.design_couplings(
        OM_MINUS, OM_PLUS, (1, 1), search_cfg=cfg,
        s_b_candidates=("-i",), s_g_candidates=("identity",))
    assert only_identity == []
    with_swap = feedback.design_couplings(
        OM_MINUS, OM_PLUS, (1, 1), search_cfg=cfg,
        s_g_candidates=("swap",))
    assert with_swap
    best = with_swap[0]
    assert best.objective <= 1e-12
    red = best.reduced
    assert matcore.is_imag(red.omega_minus, tol=1e-5)
    assert matcore.is_imag(red.omega_plus, tol=1e-5)
    assert best.report.certified_pairs
    assert best.report.consistency
