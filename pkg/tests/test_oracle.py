"""Finite-difference eigensolver against closed-form spectra."""

import numpy as np
import pytest

from swkb_lab.errors import BoxTooSmall, NotConverged, ValidityError
from swkb_lab.oracle import (
    OracleConfig,
    default_box,
    fd_eigenvalues,
    isospectrality_check,
    reference_energies,
    solve_spectrum,
)
from swkb_lab.spectrum import SpectrumModel
from swkb_lab.superpotentials import DomainInterval, conventional_names, get_entry, make_spec


def test_harmonic_levels():
    r = solve_spectrum(make_spec("harmonic"), "minus", OracleConfig(eigen_count=5))
    np.testing.assert_allclose(r.eigenvalues, [0, 2, 4, 6, 8], atol=1e-6)
    assert r.converged and r.box_shift is not None


def test_coulomb_levels():
    r = solve_spectrum(make_spec("coulomb"), "minus", OracleConfig(eigen_count=3))
    np.testing.assert_allclose(r.eigenvalues, [0, 0.75, 8 / 9], atol=1e-5)


def test_harmonic_plus_partner():
    r = solve_spectrum(make_spec("harmonic"), "plus", OracleConfig(eigen_count=3))
    np.testing.assert_allclose(r.eigenvalues, [2, 4, 6], atol=1e-6)


@pytest.mark.parametrize("name", conventional_names())
def test_ground_state_is_zero(name):
    s = make_spec(name)
    r = solve_spectrum(s, "minus", OracleConfig(eigen_count=1))
    assert abs(r.eigenvalues[0]) <= 1e-6


@pytest.mark.parametrize("name", conventional_names())
@pytest.mark.parametrize("sign", ["minus", "plus"])
def test_matches_algebraic(name, sign):
    s = make_spec(name)
    entry = get_entry(name)
    # the plus partner holds one level fewer than the minus ladder
    ladder = SpectrumModel.from_spec(s).n_max + (1 if sign == "minus" else 0)
    k = min(4, ladder)
    r = solve_spectrum(s, sign, OracleConfig(eigen_count=k))
    assert r.max_rel_deviation <= entry.oracle_tolerance


@pytest.mark.parametrize("name, count, tol", [
    ("harmonic", 4, 1e-6),
    ("morse", 2, 1e-5),
    ("scarf_I", 4, 1e-6),
])
def test_isospectrality(name, count, tol):
    assert isospectrality_check(make_spec(name), OracleConfig(eigen_count=count)) <= tol


def test_second_order_convergence():
    # halving h cuts the raw error by close to four
    s = make_spec("harmonic")
    box = default_box(s)
    errs = [abs(fd_eigenvalues(s, "minus", box, n, 3)[2] - 4.0) for n in (500, 1000, 2000)]
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def test_critical_scarf_converges_only_logarithmically():
    # at a = 1, beta = 0.5 the left-edge exponent is 1/2 and V_- ~ -1/(4u^2):
    # doubling the grid barely moves E_0, so the run is reported unconverged
    s = make_spec("scarf_I", a=1.0, beta=0.5)
    e = [fd_eigenvalues(s, "minus", default_box(s), n, 1)[0] for n in (1000, 2000, 4000)]
    assert 0.5 < (e[0] - e[1]) / (e[1] - e[2]) < 1.5
    with pytest.raises(NotConverged) as info:
        solve_spectrum(s, "minus", OracleConfig(eigen_count=3))
    assert info.value.report.max_rel_deviation > 1e-3


def test_box_too_small():
    s = make_spec("morse")
    cfg = OracleConfig(eigen_count=3, box=DomainInterval(-2.0, 3.0, False, False))
    with pytest.raises(BoxTooSmall) as info:
        solve_spectrum(s, "minus", cfg)
    assert info.value.report.box_shift > 1e-4


def test_box_outside_domain():
    cfg = OracleConfig(box=DomainInterval(-1.0, 10.0, False, False))
    with pytest.raises(ValidityError):
        solve_spectrum(make_spec("coulomb"), "minus", cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(eigen_count=0)
    with pytest.raises(ValueError):
        OracleConfig(grid_points=100)
    with pytest.raises(ValueError):
        OracleConfig(convergence_rel_tol=0.0)
    with pytest.raises(ValueError):
        solve_spectrum(make_spec("harmonic"), "both")


def test_too_few_bound_states():
    with pytest.raises(ValidityError):
        solve_spectrum(make_spec("morse"), "minus", OracleConfig(eigen_count=4))


def test_not_converged_carries_report():
    cfg = OracleConfig(eigen_count=2, convergence_rel_tol=1e-15, max_refinements=2)
    with pytest.raises(NotConverged) as info:
        solve_spectrum(make_spec("coulomb"), "minus", cfg)
    assert len(info.value.report.eigenvalues) == 2
    assert not info.value.report.converged


def test_report_serialises():
    r = solve_spectrum(make_spec("harmonic"), "minus", OracleConfig(eigen_count=2))
    d = r.to_dict()
    assert d["name"] == "harmonic" and len(d["eigenvalues"]) == 2
    assert len(r.rows()) == 2


def test_edge_amplitude_small_for_default_box():
    r = solve_spectrum(make_spec("harmonic"), "minus", OracleConfig(eigen_count=4))
    assert r.edge_amplitude < 1e-8


def test_control_reference_energies():
    s = make_spec("perturbed_harmonic")
    e = reference_energies(s, 4)
    assert abs(e[0]) <= 1e-8
    assert all(b > a for a, b in zip(e, e[1:]))
    # zero amplitude collapses to the oscillator ladder
    np.testing.assert_allclose(reference_energies(make_spec("perturbed_harmonic", amplitude=0.0), 3),
                               [0, 2, 4], atol=1e-8)
