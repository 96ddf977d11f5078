"""Acceptance gate: every criterion at its stated tolerance, one line each."""

import pytest

from paramqed import acceptance


def _run(criterion_fn, *args, **kwargs):
    result = criterion_fn(*args, **kwargs)
    print(f"{'PASS' if result.passed else 'FAIL'}  criterion {result.number:2d}  "
          f"{result.name}: {result.detail}")
    assert result.passed, f"criterion {result.number} ({result.name}): {result.detail}"


def test_criterion_01_series_diagonalization_equivalence():
    _run(acceptance.criterion_1)


def test_criterion_02_resonance_positions():
    _run(acceptance.criterion_2)


def test_criterion_03_splitting_readout():
    _run(acceptance.criterion_3)


def test_criterion_04_gp_linearity():
    _run(acceptance.criterion_4)


def test_criterion_05_straddling_sign_structure():
    _run(acceptance.criterion_5)


def test_criterion_06_two_photon_lineshape():
    _run(acceptance.criterion_6)


def test_criterion_07_dephasing_formula():
    _run(acceptance.criterion_7)


def test_criterion_08_calibration_closure():
    _run(acceptance.criterion_8)


def test_criterion_09_floquet_validation():
    _run(acceptance.criterion_9)


def test_criterion_10_csv_determinism(tmp_path):
    _run(acceptance.criterion_10, jobs=4, out_dir=tmp_path)
