import numpy as np
import pytest

import holodisc


def test_closed_form_disc():
    d = holodisc.solve_disc("const 0.3", "zeta", grid=(32, 64))
    z = d["components"][0]
    zeta = d["nodes"]
    assert d["solved"]
    assert np.max(np.abs(z - (zeta + 0.3 * np.conj(zeta)))) < 1e-8


def test_cauchy_green_of_one_is_conjugate():
    zeta = holodisc.grid_nodes(16, 32)
    t = holodisc.cauchy_green(np.ones_like(zeta))
    assert np.max(np.abs(t - np.conj(zeta))) < 1e-12
    outside = holodisc.cauchy_green(np.ones_like(zeta), [2.0 + 0j])
    assert abs(outside[0] - 0.5) < 1e-12


def test_schwarz_of_cosine():
    theta = 2 * np.pi * np.arange(64) / 64
    v = holodisc.schwarz(list(np.cos(2 * theta)), [0.3 + 0.4j])
    assert abs(v[0] - (0.3 + 0.4j) ** 2) < 1e-10


def test_flat_family_sign():
    d = holodisc.flat_family([0.2], [1.5], grid=(16, 64))
    for comp in d["components"]:
        assert np.all(comp.real < 0)


def test_holder_of_conjugate():
    zeta = holodisc.grid_nodes(16, 32)
    h = holodisc.holder_check(np.conj(zeta), np.ones_like(zeta))
    assert h["finite"]
    assert h["exponent"] >= 0.5


def test_ray_summary():
    s = holodisc.ray_summary(edge_samples=50, slice_samples=3)
    assert s["exceptional_none"] == s["exceptional_points"] == 3
    assert s["nontangential_fraction"] >= 0.99


def test_run_and_errors():
    rep = holodisc.run("solve-disc", grid="16x32")
    assert rep["pass"]
    assert rep["rng-seed"] == 1
    assert "solve-disc" in holodisc.commands()
    with pytest.raises(holodisc.HolodiscError):
        holodisc.run("solve-disc", tol="-1")
