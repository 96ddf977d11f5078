import numpy as np
import pytest

from paramqed.hilbert import (
    CompositeSpace,
    DimensionError,
    annihilation,
    check_hermitian,
    creation,
    embed,
    number,
)


def test_annihilation_qubit_truncation():
    np.testing.assert_array_equal(annihilation(2), [[0, 1], [0, 0]])


def test_annihilation_dim3_entries():
    a = annihilation(3)
    expected = np.zeros((3, 3))
    expected[0, 1] = 1.0
    expected[1, 2] = np.sqrt(2.0)
    np.testing.assert_allclose(a, expected)


def test_commutator_truncation_artifact_dim4():
    # oracle: direct matrix multiplication of the truncated ladder pair
    a = annihilation(4)
    comm = a @ a.conj().T - a.conj().T @ a
    np.testing.assert_allclose(comm, np.diag([1.0, 1.0, 1.0, -3.0]), atol=1e-15)


def test_number_operator_spectrum():
    for dim in (2, 3, 7):
        a = annihilation(dim)
        np.testing.assert_allclose(a.conj().T @ a, number(dim), atol=1e-15)
        np.testing.assert_allclose(np.diag(number(dim)).real, np.arange(dim))


def test_invalid_dimension_rejected():
    with pytest.raises(DimensionError):
        annihilation(1)
    with pytest.raises(DimensionError):
        number(0)


def test_creation_is_exact_adjoint():
    for dim in (2, 5, 9):
        assert np.array_equal(creation(dim), annihilation(dim).conj().T)


def test_commutator_defect_confined_to_top_level():
    for dim in (3, 5, 8):
        a = annihilation(dim)
        defect = a.conj().T @ a - a @ a.conj().T + np.eye(dim)
        defect[dim - 1, dim - 1] = 0.0
        assert np.max(np.abs(defect)) < 1e-14  # sqrt(n)^2 round-off only


def test_embed_number_slot0():
    out = embed(number(2), [2, 2], 0)
    np.testing.assert_allclose(out, np.diag([0.0, 0.0, 1.0, 1.0]))


def test_embed_number_slot1():
    out = embed(number(2), [2, 2], 1)
    np.testing.assert_allclose(out, np.diag([0.0, 1.0, 0.0, 1.0]))


def test_embed_ladder_action_on_basis_state():
    space = CompositeSpace((3, 2))
    op = embed(annihilation(3), space, 0)
    ket = np.zeros(space.total_dim)
    ket[space.basis_index((2, 0))] = 1.0
    out = op @ ket
    expected = np.zeros(space.total_dim, dtype=complex)
    expected[space.basis_index((1, 0))] = np.sqrt(2.0)
    np.testing.assert_allclose(out, expected)


def test_embed_errors():
    with pytest.raises(IndexError):
        embed(number(2), [2, 2], 2)
    with pytest.raises(DimensionError):
        embed(number(3), [2, 2], 0)


def test_check_hermitian_examples():
    assert check_hermitian(np.eye(4, dtype=complex), 1e-12)
    assert not check_hermitian(annihilation(3), 1e-12)
    a = annihilation(5)
    assert check_hermitian(a + a.conj().T, 1e-12)
    with pytest.raises(ValueError):
        check_hermitian(np.ones((2, 3)))


def test_embed_preserves_hermiticity_and_commutes_across_slots():
    rng = np.random.default_rng(7)
    dims = (3, 2, 4)
    for _ in range(5):
        herm = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        herm = herm + herm.conj().T
        emb = embed(herm, dims, 0)
        assert check_hermitian(emb, 1e-12)

        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        ea = embed(herm, dims, 0)
        eb = embed(b, dims, 2)
        np.testing.assert_allclose(ea @ eb, eb @ ea, atol=1e-12)


def test_composite_space_total_dim():
    assert CompositeSpace((2, 3, 4)).total_dim == 24
    with pytest.raises(DimensionError):
        CompositeSpace((2, 1))
