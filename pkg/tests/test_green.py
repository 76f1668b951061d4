import numpy as np
import pytest

from cpforce import (VACUUM, DrudeLorentzParams, HalfSpace, MaterialModel, PolePathError,
                     QuadratureSpec, dipole_from_gamma0, fresnel_rs_rp, scattering_green_coincident,
                     scattering_green_curl, scattering_green_gradient, scattering_green_two_point,
                     vacuum_im_green_coincident)
from cpforce.green import green_components

TIGHT = QuadratureSpec(rel_tol=1e-12)
FREQS = [1.1, 0.7j, 0.8 + 0.05j]


def test_fresnel_vacuum_is_zero():
    rs, rp = fresnel_rs_rp(VACUUM, np.array([0.3, 2.0]), 1.0)
    assert np.all(rs == 0) and np.all(rp == 0)


def test_fresnel_perfect_mirror_limit():
    conductor = MaterialModel(DrudeLorentzParams(omega_P=1e7, omega_T=1.0, gamma=0.0))
    rs, rp = fresnel_rs_rp(conductor, 50.0, 0.3)
    assert rp == pytest.approx(1.0, abs=1e-6)
    assert rs == pytest.approx(-1.0, abs=1e-4)


def test_fresnel_real_on_imaginary_axis(magnetodielectric):
    rs, rp = fresnel_rs_rp(magnetodielectric, np.linspace(0, 5, 11), 0.9j)
    assert np.all(rs.imag == 0) and np.all(rp.imag == 0)


@pytest.mark.parametrize("w", FREQS)
def test_vacuum_material_gives_zero(w):
    g = HalfSpace(0.5, VACUUM)
    assert np.all(scattering_green_coincident(g, w).tensor == 0)
    assert np.all(scattering_green_gradient(g, w) == 0)
    assert np.all(scattering_green_curl(g, w) == 0)


def test_structure_diagonal_and_isotropic_in_plane(geom):
    t = scattering_green_coincident(geom, 1.3).tensor
    assert np.all(t[~np.eye(3, dtype=bool)] == 0)
    assert t[0, 0] == t[1, 1]


def test_schwarz_reflection_random_frequencies(magnetodielectric):
    rng = np.random.default_rng(17)
    for _ in range(20):
        w = complex(rng.uniform(-2, 2), rng.uniform(0.01, 2))
        g = HalfSpace(rng.uniform(0.05, 1.0), magnetodielectric)
        a = scattering_green_coincident(g, w).tensor
        b = scattering_green_coincident(g, -np.conj(w)).tensor
        assert np.max(np.abs(b - np.conj(a))) <= 1e-10 * np.max(np.abs(a))


@pytest.mark.parametrize("u", [0.01, 0.5, 3.0])
def test_real_on_imaginary_axis(magnetodielectric, u):
    g = HalfSpace(0.2, magnetodielectric)
    for arr in (scattering_green_coincident(g, 1j * u).tensor, scattering_green_gradient(g, 1j * u),
                scattering_green_curl(g, 1j * u)):
        assert np.all(np.abs(arr.imag) <= 1e-12 * np.max(np.abs(arr)))


def test_imaginary_axis_sign_and_nonretarded_asymptote(dielectric):
    u, z = 0.8, 1e-3
    g = HalfSpace(z, dielectric)
    t = scattering_green_coincident(g, 1j * u).tensor.real
    e = dielectric.epsilon.on_imaginary_axis(u)
    gzz = -(e - 1) / (e + 1) / (16 * np.pi * u**2 * z**3)
    assert t[2, 2] < 0
    assert t[2, 2] == pytest.approx(gzz, rel=1e-3)
    assert t[0, 0] == pytest.approx(gzz / 2, rel=1e-3)


@pytest.mark.parametrize("w", [0.6, 1.1, 1.5])
def test_real_frequency_nonretarded_asymptote(dielectric, w):
    eps = complex(dielectric.epsilon(w))
    z = 1e-3 / (np.sqrt(abs(eps)) * w)
    t = scattering_green_coincident(HalfSpace(z, dielectric), w).tensor
    gzz = (eps - 1) / (eps + 1) / (16 * np.pi * w**2 * z**3)
    assert abs(t[2, 2] / gzz - 1) < 1e-3
    assert abs(t[0, 0] / (gzz / 2) - 1) < 1e-3


@pytest.mark.parametrize("w", FREQS)
def test_gradient_matches_finite_difference_of_coincident(magnetodielectric, w):
    z = 0.3
    h = 1e-4 * z
    g = HalfSpace(z, magnetodielectric)
    fd = (scattering_green_coincident(g.moved(z + h), w, TIGHT).tensor
          - scattering_green_coincident(g.moved(z - h), w, TIGHT).tensor) / (2 * h)
    # Moving the atom moves both arguments: d/dz_A = 2 x first-argument derivative.
    grad = scattering_green_gradient(g, w, TIGHT)
    assert np.max(np.abs(fd - 2 * grad[2])) <= 1e-5 * np.max(np.abs(fd))


@pytest.mark.parametrize("w", FREQS)
def test_gradient_and_curl_match_two_point_finite_difference(magnetodielectric, w):
    z = 0.3
    h = 1e-4 * z
    g = HalfSpace(z, magnetodielectric)
    r = np.array([0.0, 0.0, z])
    fds = []
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        fds.append((scattering_green_two_point(g, r + e, r, w, TIGHT)
                    - scattering_green_two_point(g, r - e, r, w, TIGHT)) / (2 * h))
    fds = np.array(fds)
    grad = scattering_green_gradient(g, w, TIGHT)
    assert np.max(np.abs(fds - grad)) <= 1e-5 * np.max(np.abs(grad))
    levi = np.zeros((3, 3, 3))
    levi[0, 1, 2] = levi[1, 2, 0] = levi[2, 0, 1] = 1
    levi[0, 2, 1] = levi[2, 1, 0] = levi[1, 0, 2] = -1
    curl_fd = np.einsum("ikl,klj->ij", levi, fds)
    curl = scattering_green_curl(g, w, TIGHT)
    assert np.max(np.abs(curl_fd - curl)) <= 1e-5 * np.max(np.abs(curl))
    assert np.allclose(curl, -curl.T)


def test_two_point_reduces_to_coincident(geom):
    r = np.array([0.0, 0.0, geom.z])
    a = scattering_green_two_point(geom, r, r, 1.1, TIGHT)
    b = scattering_green_coincident(geom, 1.1, TIGHT).tensor
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(b))


def test_lateral_derivatives(geom):
    grad = scattering_green_gradient(geom, 0.9)
    # Diagonal entries depend on z only.
    for a in (0, 1):
        assert np.all(grad[a].diagonal() == 0)
    # The xz / zx pair is odd under lateral reflection, so its lateral
    # derivative is equal and opposite and drops out of symmetric contractions.
    assert grad[0, 0, 2] != 0
    assert grad[0, 2, 0] == -grad[0, 0, 2]
    assert grad[1, 2, 1] == -grad[1, 1, 2]
    sym = np.array([[1.0, 0.2, 0.7], [0.2, 2.0, 0.1], [0.7, 0.1, 3.0]])
    assert abs(np.einsum("ij,ij", sym, grad[0])) < 1e-14 * np.abs(grad).max()


def test_vacuum_imaginary_part():
    assert np.all(vacuum_im_green_coincident(0.0) == 0)
    t = vacuum_im_green_coincident(2.0)
    assert np.allclose(t, 2.0 / (6 * np.pi) * np.eye(3), rtol=1e-15)
    with pytest.raises(ValueError):
        vacuum_im_green_coincident(-1.0)


def test_free_space_rate_reproduces_strength_parameter():
    d = dipole_from_gamma0(1e-7)
    w = 1.0
    rate = 2 * w**2 * d**2 * vacuum_im_green_coincident(w)[2, 2]
    assert rate == pytest.approx(1e-7, rel=1e-14)


@pytest.mark.parametrize("w", [1.1, 0.7j])
def test_tolerance_halving_within_error_estimate(geom, w):
    spec = QuadratureSpec(rel_tol=1e-8)
    v1, e1 = green_components(geom, w, "coincident", spec)
    v2, _ = green_components(geom, w, "coincident", spec.tightened(2))
    assert np.all(np.abs(v1 - v2) <= e1 + 1e-15 * np.abs(v1))


def test_lossless_surface_pole_is_refused():
    lossless = MaterialModel(DrudeLorentzParams(0.75, 1.0, 0.0))
    with pytest.raises(PolePathError):
        scattering_green_coincident(HalfSpace(0.05, lossless), 1.1)


def test_nonpositive_height_rejected(geom):
    with pytest.raises(ValueError):
        HalfSpace(0.0, geom.material)


def test_fresnel_precision_for_nearly_vacuum_response():
    # At large imaginary frequency eps - 1 ~ 1e-10; the reflection coefficients are
    # of that size and must keep full relative accuracy.
    mat = MaterialModel(DrudeLorentzParams(0.75, 1.0, 0.0))
    u, q = 1e5, 3e4
    rs, rp = fresnel_rs_rp(mat, q, 1j * u)
    chi = 0.75**2 / (1.0 + u**2)
    b0 = np.hypot(u, q)
    b = np.sqrt(q**2 + (1 + chi) * u**2)
    assert rs.real == pytest.approx(-(u**2 * chi) / (b0 + b) ** 2, rel=1e-10)
    eps = 1 + chi
    assert rp.real == pytest.approx(chi * (eps * u**2 + q**2 * (2 + chi)) / (eps * b0 + b) ** 2,
                                    rel=1e-10)
