import numpy as np
import pytest

from cpforce import (AtomModel, PoleError, dipole_from_gamma0, polarizability_generalized,
                     polarizability_lowest_order, two_level_atom)
from cpforce.dynamics import LevelDressing


def test_static_two_level_polarizability():
    atom = two_level_atom(1.3, 1e-7, theta=0.4, phi=1.1)
    d = atom.dipoles[1, 0].real
    alpha = polarizability_lowest_order(atom, 0, 0.0)
    assert np.allclose(alpha, 2 * np.outer(d, d) / 1.3, rtol=1e-14, atol=0)
    assert np.dot(d, d) == pytest.approx(3 * np.pi * 1e-7, rel=1e-14)


def test_decays_at_large_imaginary_frequency():
    atom = two_level_atom(1.0, 1e-7)
    a0 = np.abs(polarizability_lowest_order(atom, 0, 0.0)).max()
    assert np.abs(polarizability_lowest_order(atom, 0, 1e5j)).max() < 1e-9 * a0


def test_real_on_imaginary_axis_and_schwarz():
    atom = two_level_atom(1.0, 1e-7, theta=0.9)
    a = polarizability_lowest_order(atom, 0, 0.7j)
    assert np.all(a.imag == 0)
    assert np.allclose(a, a.T)
    w = 0.4 + 0.2j
    assert np.allclose(polarizability_lowest_order(atom, 1, -np.conj(w)),
                       np.conj(polarizability_lowest_order(atom, 1, w)), rtol=1e-14)


def test_resonance_of_undamped_polarizability_is_refused():
    with pytest.raises(PoleError):
        polarizability_lowest_order(two_level_atom(1.0, 1e-7), 0, 1.0)


def test_isotropic_average_matches_orientation_average():
    u = 0.8j
    iso = polarizability_lowest_order(two_level_atom(1.0, 1e-7), 0, u, isotropic=True)
    # Fibonacci lattice: near-uniform directions on the unit sphere.
    n = 3000
    k = np.arange(n) + 0.5
    cz = 1.0 - 2.0 * k / n
    ang = np.pi * (1.0 + 5**0.5) * k
    r = np.sqrt(1.0 - cz**2)
    vecs = np.column_stack([r * np.cos(ang), r * np.sin(ang), cz])
    acc = np.zeros((3, 3), complex)
    for v in vecs:
        theta = np.arccos(v[2])
        phi = np.arctan2(v[1], v[0])
        acc += polarizability_lowest_order(two_level_atom(1.0, 1e-7, theta, phi), 0, u)
    acc /= len(vecs)
    assert np.max(np.abs(acc - iso)) < 0.01 * np.abs(iso).max()


def test_generalized_reduces_to_lowest_order_without_dressing():
    atom = AtomModel([0.0, 1.0, 2.3], _ladder())
    bare = LevelDressing.bare(atom, 0.1)
    for l in range(3):
        for w in (0.37, 0.5j, 0.2 + 0.1j):
            assert np.allclose(polarizability_generalized(atom, bare, l, l, w),
                               polarizability_lowest_order(atom, l, w), rtol=1e-12, atol=0)


def test_generalized_lorentzian_line():
    atom = two_level_atom(1.0, 1e-7)
    widths = np.array([0.0, 2e-3])
    dressing = LevelDressing.bare(atom, 0.1, widths=widths)
    hw = 0.5 * (widths[0] + widths[1])
    peak = abs(polarizability_generalized(atom, dressing, 0, 0, 1.0)[2, 2]) ** 2
    side = abs(polarizability_generalized(atom, dressing, 0, 0, 1.0 + hw)[2, 2]) ** 2
    assert side / peak == pytest.approx(0.5, rel=1e-2)


def test_generalized_even_combination_is_real():
    atom = two_level_atom(1.0, 1e-7, theta=0.6)
    dressing = LevelDressing.bare(atom, 0.1, widths=[0.0, 1e-3])
    for u in (0.1, 1.0, 5.0):
        s = (polarizability_generalized(atom, dressing, 0, 0, 1j * u)
             + polarizability_generalized(atom, dressing, 0, 0, -1j * u))
        assert np.max(np.abs(s.imag)) < 1e-14 * np.abs(s).max()


def _ladder():
    d = np.zeros((3, 3, 3), complex)
    d[1, 0] = d[0, 1] = [0.01, 0.0, 0.02]
    d[2, 1] = [0.0, 0.01 + 0.005j, 0.01]
    d[1, 2] = np.conj(d[2, 1])
    return d


def test_validation():
    d = _ladder()
    with pytest.raises(ValueError):
        AtomModel([0.0, 1.0, 1.0 + 1e-8], d)
    bad = d.copy()
    bad[1, 2] = bad[2, 1]
    with pytest.raises(ValueError):
        AtomModel([0.0, 1.0, 2.0], bad)
    perm = d.copy()
    perm[1, 1] = [0, 0, 0.1]
    with pytest.raises(ValueError):
        AtomModel([0.0, 1.0, 2.0], perm)
    with pytest.raises(ValueError):
        dipole_from_gamma0(-1.0)


def test_value_semantics():
    a = two_level_atom(1.0, 1e-7)
    assert a == two_level_atom(1.0, 1e-7)
    assert hash(a) == hash(two_level_atom(1.0, 1e-7))
    assert a.scaled(2.0).dipoles[1, 0, 2] == pytest.approx(2 * a.dipoles[1, 0, 2])
    assert np.allclose(a.transition_frequencies, [[0, -1], [1, 0]])
