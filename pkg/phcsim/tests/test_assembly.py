"""Tests of the finite element matrices."""

from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg

from phcsim import PoleProximityError
from phcsim.assembly import OperatorBundle, assemble, operator_at
from phcsim.dielectric import Constant, DrudeLossy, Lorentz
from phcsim.mesh import build_periodic_dof_map, generate_structured
from phcsim.sim import SearchRegion
from phcsim.testing import empty_lattice_frequencies

TOLERANCE = 1e-12

rng = np.random.default_rng(1234)
RANDOM_WAVEVECTORS = [
    tuple(float(v) for v in rng.uniform(-math.pi, math.pi, size=2))
    for _ in range(5)
]


def _bundle(n: int, r: float = 0.3) -> OperatorBundle:
    mesh = generate_structured(n, r)
    return assemble(mesh, build_periodic_dof_map(mesh))


@pytest.mark.parametrize("n", [2, 10, 20])
def test_symmetries(n: int) -> None:
    """A and M are symmetric and Sx, Sy antisymmetric."""
    bundle = _bundle(n)
    for matrix in (bundle.A, bundle.M_a, bundle.M_b):
        assert abs(matrix - matrix.T).max() <= TOLERANCE
    for matrix in (bundle.Sx, bundle.Sy):
        assert abs(matrix + matrix.T).max() <= TOLERANCE


@pytest.mark.parametrize("n", [2, 10, 20])
def test_mass(n: int) -> None:
    """The mass matrices add up to the area of the cell and of the disc."""
    mesh = generate_structured(n, 0.3)
    bundle = assemble(mesh, build_periodic_dof_map(mesh))
    assert bundle.M.sum() == pytest.approx(1, abs=TOLERANCE)
    assert bundle.M_b.sum() == pytest.approx(mesh.inclusion_area, abs=TOLERANCE)
    assert np.all(np.linalg.eigvalsh(bundle.M.toarray()) > 0)


@pytest.mark.parametrize("n", [2, 10, 20])
def test_stiffness_null_space(n: int) -> None:
    """The kernel of A is spanned by the constants."""
    bundle = _bundle(n)
    ones = np.ones(bundle.n_dofs)
    assert np.abs(bundle.A @ ones).max() <= TOLERANCE
    assert np.abs(bundle.Sx @ ones).max() <= TOLERANCE
    assert np.abs(bundle.Sy @ ones).max() <= TOLERANCE

    eigenvalues = np.linalg.eigvalsh(bundle.A.toarray())
    assert abs(eigenvalues[0]) <= 1e-10
    assert eigenvalues[1] > 1e-3


@pytest.mark.parametrize("n", [2, 10, 20])
@pytest.mark.parametrize(
    "k",
    RANDOM_WAVEVECTORS,
    ids=[f"k{i}" for i in range(len(RANDOM_WAVEVECTORS))],
)
def test_hermitian_part(n: int, k: tuple[float, float]) -> None:
    """A + 2iS(k) + |k|²M is Hermitian positive semidefinite."""
    hermitian = _bundle(n).hermitian_part(k).toarray()
    assert np.abs(hermitian - hermitian.conj().T).max() <= TOLERANCE
    assert np.linalg.eigvalsh(hermitian)[0] >= -1e-10


def test_convection_element_values() -> None:
    """On the 2 × 2 mesh, the convection entries are ±|T|·∂λ/3."""
    bundle = _bundle(2)
    values = np.abs(bundle.Sx.toarray())
    nonzero = values[values > TOLERANCE]
    # Sums of contributions ±(1/8)(2)/3 = ±1/12 from several triangles
    np.testing.assert_allclose(nonzero * 12, np.round(nonzero * 12))


def test_empty_lattice() -> None:
    """With ε ≡ 1 the discrete spectrum approaches |2πm + k|."""
    k = (math.pi, math.pi / 2)
    bundle = _bundle(24)
    hermitian = bundle.hermitian_part(k).toarray()
    computed = scipy.linalg.eigh(
        hermitian,
        bundle.M.toarray(),
        eigvals_only=True,
    )
    exact = np.array(empty_lattice_frequencies(k)[:6]) ** 2
    np.testing.assert_allclose(computed[:6], exact, rtol=0.05)
    assert np.all(computed[:6] >= exact * (1 - 1e-9))


def test_operator_at() -> None:
    """T(ω) subtracts ω²ε_a·M_a and ω²ε_b(ω)·M_b from H(k)."""
    bundle = _bundle(6)
    k = (0.3, -1.2)
    omega = 1.7 - 0.1j
    model = DrudeLossy(omega_p=2 * math.pi, gamma=0.1, eps_background=2.0)

    expected = (
        bundle.hermitian_part(k)
        - 2.0 * omega**2 * bundle.M_a
        - omega**2 * model.eval(omega) * bundle.M_b
    ).toarray()
    np.testing.assert_allclose(
        operator_at(bundle, k, model, omega).toarray(),
        expected,
        atol=1e-12,
    )


def test_operator_at_pole() -> None:
    """Evaluating T next to a pole of the permittivity fails."""
    bundle = _bundle(4)
    model = Lorentz(eps_inf=10.9, omega_L=7.0, omega_T=2 * math.pi)
    with pytest.raises(PoleProximityError):
        operator_at(bundle, (0, 0), model, 2 * math.pi + 1e-6)


def test_holomorphic_function() -> None:
    """The bound matrix function reports the poles of the model."""
    bundle = _bundle(4)
    fn = bundle.at_wavevector((1.0, 0.0), Constant(eps_b=8.9))
    assert fn.dimension == bundle.n_dofs == 16
    assert fn.admissible(SearchRegion(0, 100))

    lorentz = Lorentz(eps_inf=10.9, omega_L=7.0, omega_T=2 * math.pi)
    fn = bundle.at_wavevector((1.0, 0.0), lorentz)
    assert not fn.admissible(SearchRegion(6, 1))
    assert fn.admissible(SearchRegion(2, 1))


def test_matrices_are_read_only() -> None:
    """The named matrices cannot be replaced."""
    bundle = _bundle(3)
    assert set(bundle.matrices()) == {"A", "Sx", "Sy", "M_a", "M_b"}
    with pytest.raises(TypeError):
        bundle.matrices()["A"] = bundle.M  # type: ignore[index]


def test_dof_map_mismatch() -> None:
    """A DOF map of another mesh is rejected."""
    mesh = generate_structured(4, 0.3)
    other = generate_structured(5, 0.3)
    with pytest.raises(ValueError, match="(?i)DOF map"):
        assemble(mesh, build_periodic_dof_map(other))
