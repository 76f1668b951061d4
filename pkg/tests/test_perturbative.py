import numpy as np
import pytest

from cpforce import (VACUUM, AtomModel, HalfSpace, MaterialModel, cp_force_perturbative,
                     ground_state_vdw_halfspace, two_level_atom, vdw_off_resonant, vdw_potential,
                     vdw_resonant)
from cpforce.perturbative import normalized_energy, nonretarded_c3, perturbative_force_parts
from cpforce.quadrature import QuadratureSpec

from conftest import SET_A_EPS, set_a_material


def test_vacuum_is_zero(ground_atom):
    res = vdw_potential(ground_atom, 0, HalfSpace(0.5, VACUUM))
    assert res.total == 0.0 and res.resonant == 0.0
    assert np.all(cp_force_perturbative(ground_atom, 0, HalfSpace(0.5, VACUUM)) == 0.0)


def test_ground_state_has_no_resonant_part(ground_atom, geom):
    assert vdw_resonant(ground_atom, 0, geom) == 0.0


def test_total_is_sum_of_parts(geom):
    atom = two_level_atom(1.1, 1e-7, theta=0.7)
    res = vdw_potential(atom, 1, geom)
    assert res.total == pytest.approx(res.off_resonant + res.resonant, rel=1e-15)
    assert res.resonant != 0.0
    assert res.quadrature_error < 1e-6 * abs(res.off_resonant)


def test_dual_path_ground_state(set_a_mat):
    atom = two_level_atom(1.0, 1e-7)
    geom = HalfSpace(0.7, set_a_mat)
    a, _ = vdw_off_resonant(atom, 0, geom, isotropic=True)
    b = ground_state_vdw_halfspace(atom, geom)
    assert a == pytest.approx(b, rel=1e-6)


def test_isotropic_energy_is_orientation_invariant(geom):
    vals = [vdw_potential(two_level_atom(1.0, 1e-7, th, ph), 0, geom, isotropic=True).total
            for th, ph in [(0.0, 0.0), (0.9, 0.3), (np.pi / 2, 2.0)]]
    assert np.allclose(vals, vals[0], rtol=1e-14)


def test_isotropic_equals_orientation_average(geom):
    # U(theta) = a + b cos^2 theta, so the sphere average is U(x) + (U(z) - U(x))/3.
    ux = vdw_potential(two_level_atom(1.0, 1e-7, np.pi / 2), 0, geom).total
    uz = vdw_potential(two_level_atom(1.0, 1e-7, 0.0), 0, geom).total
    iso = vdw_potential(two_level_atom(1.0, 1e-7), 0, geom, isotropic=True).total
    assert iso == pytest.approx(ux + (uz - ux) / 3.0, rel=1e-12)


def test_energy_scales_with_dipole_strength(geom):
    u1 = vdw_potential(two_level_atom(1.0, 1e-7), 0, geom).total
    u2 = vdw_potential(two_level_atom(1.0, 4e-7), 0, geom).total
    assert u2 == pytest.approx(4.0 * u1, rel=1e-12)


def test_dielectric_ground_state_attractive(dielectric):
    atom = two_level_atom(1.0, 1e-7)
    for z in (0.02, 0.3, 2.0):
        geom = HalfSpace(z, dielectric)
        assert vdw_potential(atom, 0, geom).total < 0
        assert cp_force_perturbative(atom, 0, geom)[2] < 0


def test_excited_state_resonant_part_short_distance(dielectric):
    # Nonretarded image-dipole form: U_r = -(|d|^2 + |d_z|^2) Re[(eps-1)/(eps+1)] / (32 pi z^3).
    atom = two_level_atom(0.8, 1e-7, theta=0.4)
    z = 3e-3
    eps = SET_A_EPS(0.8)
    d = atom.dipoles[1, 0].real
    expected = -(d @ d + d[2] ** 2) * ((eps - 1) / (eps + 1)).real / (32 * np.pi * z**3)
    assert vdw_resonant(atom, 1, HalfSpace(z, dielectric)) == pytest.approx(expected, rel=1e-3)


@pytest.mark.parametrize("level,theta,z", [(0, 0.3, 0.05), (1, 1.1, 0.4), (0, 0.0, 2.5)])
def test_force_matches_finite_difference(set_a_mat, level, theta, z):
    atom = two_level_atom(0.9, 1e-7, theta=theta)
    spec = QuadratureSpec(rel_tol=1e-10)
    h = 3e-4 * z
    up = vdw_potential(atom, level, HalfSpace(z + h, set_a_mat), spec).total
    dn = vdw_potential(atom, level, HalfSpace(z - h, set_a_mat), spec).total
    fd = -(up - dn) / (2 * h)
    f = cp_force_perturbative(atom, level, HalfSpace(z, set_a_mat), spec)[2]
    assert f == pytest.approx(fd, rel=1e-5)


def test_force_parts_split(geom):
    atom = two_level_atom(1.15, 1e-7)
    f_or, f_r = perturbative_force_parts(atom, 1, geom)
    assert cp_force_perturbative(atom, 1, geom)[2] == pytest.approx(f_or + f_r, rel=1e-15)
    assert perturbative_force_parts(atom, 0, geom)[1] == 0.0


def test_short_distance_c3(dielectric):
    atom = two_level_atom(1.0, 1e-7)
    c3 = nonretarded_c3(atom, dielectric)
    z = 1e-3
    u = vdw_potential(atom, 0, HalfSpace(z, dielectric), isotropic=True).total
    assert -u * z**3 == pytest.approx(c3, rel=1e-3)


def test_normalized_energy():
    atom = two_level_atom(1.0, 1e-7)
    d2 = 3 * np.pi * 1e-7
    assert normalized_energy(1.0, atom) == pytest.approx(12 * np.pi**2 / d2)
    assert normalized_energy(1.0, atom, 2.0) == pytest.approx(12 * np.pi**2 / (8 * d2))


def test_magnetic_material_reduces_attraction():
    atom = two_level_atom(1.0, 1e-7)
    z = 0.5
    plain = vdw_potential(atom, 0, HalfSpace(z, MaterialModel(SET_A_EPS))).total
    magnetic = vdw_potential(atom, 0, HalfSpace(z, set_a_material(1.5))).total
    assert magnetic > plain


def test_multilevel_ground_state_is_additive(dielectric):
    d = np.zeros((3, 3, 3), complex)
    d[1, 0] = d[0, 1] = [0.0, 0.0, 1e-3]
    d[2, 0] = d[0, 2] = [2e-3, 0.0, 0.0]
    full = AtomModel([0.0, 1.0, 1.7], d)
    d1, d2 = d.copy(), d.copy()
    d1[2, 0] = d1[0, 2] = 0.0
    d2[1, 0] = d2[0, 1] = 0.0
    only1, only2 = AtomModel([0.0, 1.0, 1.7], d1), AtomModel([0.0, 1.0, 1.7], d2)
    geom = HalfSpace(0.2, dielectric)
    u = vdw_potential(full, 0, geom).total
    assert u == pytest.approx(vdw_potential(only1, 0, geom).total + vdw_potential(only2, 0, geom).total,
                              rel=1e-7)
