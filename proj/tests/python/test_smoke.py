import math

import pytest

import cpshell


def c60(r=0.5, T=300.0):
    s = cpshell.c60_hydrogen()
    s.separation_d = r * s.radius_R
    s.temperature_T = T
    return s


def test_reduce_preset():
    p = cpshell.reduce(cpshell.c60_hydrogen())
    assert p.Q == pytest.approx(0.0494, rel=1e-2)
    assert p.q_a == pytest.approx(0.0202, rel=1e-2)
    assert p.chi == pytest.approx(1.5)


def test_representations_agree():
    s = c60()
    pol = cpshell.polarizability_of(s)
    ctrl = cpshell.SeriesControl(rel_tol=1e-10)
    m = cpshell.matsubara_free_energy(s, pol, ctrl)
    a = cpshell.abel_plana_free_energy(s, pol, ctrl)
    assert m.total < 0.0
    assert a.total == pytest.approx(m.total, rel=1e-6)
    assert a.E0 + a.F1 + a.F2 == pytest.approx(a.total, rel=1e-15)


def test_zero_mode_and_jost():
    assert cpshell.zero_mode_coefficient(1.0) == pytest.approx(85.0 / 864.0, rel=1e-15)
    assert cpshell.jost_te(1, 1.0, 0.0) == 1.0
    assert cpshell.jost_tm(1, 1.0, 1.0) >= 1.0


def test_entropy_routes():
    s = c60(T=3000.0)
    pol = cpshell.polarizability_of(s)
    a = cpshell.entropy_analytic(s, pol)
    f = cpshell.entropy_fd(s, pol)
    assert a.total > 0.0
    assert a.total == pytest.approx(f.total, rel=1e-4)


def test_sigma():
    assert cpshell.sigma(0.0, 40.0) == pytest.approx(1.0 / 6.0, rel=1e-6)
    tau, value = cpshell.sigma_minimum(0.0, 0.05, 20.0)
    assert value < 0.0 and 0.05 <= tau <= 20.0


def test_errors_map_to_python():
    s = c60()
    static = cpshell.polarizability_of(s, cpshell.PolarizabilityMode.static)
    with pytest.raises(cpshell.DomainError):
        cpshell.abel_plana_free_energy(s, static)
    hot = c60(T=1e5)
    with pytest.raises(cpshell.SingularityError):
        cpshell.entropy_analytic(hot, cpshell.polarizability_of(hot))
    assert issubclass(cpshell.SingularityError, cpshell.Error)
    assert issubclass(cpshell.Error, RuntimeError)


def test_run_and_verify_config(tmp_path):
    ini = tmp_path / "point.ini"
    ini.write_text("[system]\npreset = c60-hydrogen\n[outputs]\ninclude = free_energy\n")
    text = cpshell.run_config(str(ini))
    header, row = text.strip().splitlines()
    assert header == "T_K,F_J,truncation_bound_J,route,status,message"
    assert math.isfinite(float(row.split(",")[1]))
    report = cpshell.verify_config(str(ini))
    assert report["passed"]
    assert any(c["name"] == "representation_equivalence" for c in report["checks"])
