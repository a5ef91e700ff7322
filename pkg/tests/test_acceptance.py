"""Acceptance suite: one test per criterion, each printing a PASS line with
the measured numbers when it succeeds (a failed criterion shows up as the
usual pytest FAILED line)."""

import filecmp
import json
import time

import numpy as np
import pytest

from r2tr.cli import (glycine_defaults, build_system, build_drive, main,
                      preset_config, run_fig4, transfer_fraction,
                      _simulate_report)
from r2tr.gates import (cns, cns_circuit, iswap, makhlin_invariants,
                        operator_fidelity, u_flip, universality_class)
from r2tr.hamiltonian import dipolar_constants, effective_field
from r2tr.operators import (SpinSystem, basis_state, check_density_matrix,
                            check_unitary)
from r2tr.propagator import (CWSegment, Delay, IdealRotation, RFDrive,
                             extract_gate, run_sequence, segment_propagator,
                             _segment_hamiltonian)
from r2tr.recoupling import (condition_residual, solve_amplitude,
                             theta_from_period)
from r2tr.units import (GAMMA_C13, GLYCINE_CC_DISTANCE, TWO_PI, deg_to_rad,
                        hz_to_angular)

W_R = TWO_PI * 7884.0
D_I = TWO_PI * 2000.0
D_S = TWO_PI * 18699.0
W_1 = TWO_PI * 2339.0


@pytest.fixture
def announce(capsys):
    def _announce(line):
        with capsys.disabled():
            print(line)
    return _announce


@pytest.fixture(scope="module")
def fig3a_result():
    cfg = preset_config("fig3a")
    t0 = time.perf_counter()
    traj, report = _simulate_report(cfg)
    report["_runtime"] = time.perf_counter() - t0
    return traj, report


def test_criterion_01_recoupling_match(announce):
    t0 = time.perf_counter()
    residual = condition_residual(D_I, D_S, W_1, W_R, "a", 2)
    roots = solve_amplitude(D_I, D_S, W_R, "a", 2)
    elapsed = time.perf_counter() - t0
    residual_hz = abs(residual) / TWO_PI
    assert residual_hz < 2.0
    assert len(roots) == 1
    root_hz = roots[0] / TWO_PI
    assert root_hz == pytest.approx(2338.0, abs=5.0)
    assert elapsed < 1.0
    announce(f"criterion 1 PASS: |residual| = {residual_hz:.3f} Hz < 2 Hz; "
             f"solver gives {root_hz:.1f} Hz (2338 +- 5); {elapsed:.2f} s")


def test_criterion_02_default_off(announce):
    t0 = time.perf_counter()
    sys = SpinSystem(gamma=GAMMA_C13, r=GLYCINE_CC_DISTANCE,
                     theta_d=deg_to_rad(64.0), phi=0.0, omega_r=W_R,
                     offsets=(0.0, 0.0))
    events = [IdealRotation((0,), "x", np.pi), Delay(5e-3)]
    traj = run_sequence(basis_state("00"), sys, events,
                        sample_every=sys.rotor_period)
    transfer = transfer_fraction(traj)
    elapsed = time.perf_counter() - t0
    assert transfer < 0.05
    assert elapsed < 30.0
    announce(f"criterion 2 PASS: free-MAS transfer {transfer:.4f} < 0.05 "
             f"over 5 ms; {elapsed:.1f} s")


def test_criterion_03_fig3a_exchange(fig3a_result, announce):
    traj, report = fig3a_result
    elapsed = report["_runtime"]
    period = report["fitted_period_s"]
    amplitude = report["fitted_amplitude"]
    analytic = report["analytic_period_s"]
    assert abs(period - 3.3e-3) / 3.3e-3 < 0.10
    assert amplitude >= 0.9
    assert abs(analytic - period) / period < 0.05
    assert elapsed < 120.0
    announce(f"criterion 3 PASS: fitted period {period * 1e3:.3f} ms "
             f"(3.3 ms +- 10%), amplitude {amplitude:.3f} >= 0.9, analytic "
             f"{analytic * 1e3:.3f} ms within 5%; {elapsed:.1f} s")


def test_criterion_04_fig3b_off_condition(announce):
    t0 = time.perf_counter()
    traj, report = _simulate_report(preset_config("fig3b"))
    elapsed = time.perf_counter() - t0
    transfer = report["max_transfer_fraction"]
    assert transfer < 0.05
    assert elapsed < 120.0
    announce(f"criterion 4 PASS: off-condition transfer {transfer:.4f} "
             f"< 0.05 over 5 ms; {elapsed:.1f} s")


def test_criterion_05_fig4_truth_table(announce):
    report, spectra = run_fig4(preset_config("fig4"))
    expected = {"00": "00", "01": "10", "10": "01", "11": "11"}
    assert report["truth_table"] == expected
    min_peak = min(abs(amp) for sp in spectra.values() for _, amp in sp.peaks)
    assert min_peak >= 0.9
    announce(f"criterion 5 PASS: truth table {report['truth_table']}, "
             f"smallest |peak| {min_peak:.3f} >= 0.9")


def test_criterion_06_geometry_inversion(announce):
    c = dipolar_constants(GAMMA_C13, GLYCINE_CC_DISTANCE, deg_to_rad(64.0))
    from r2tr.hamiltonian import bq_factors
    bi = effective_field(D_I, W_1).beta
    bs = effective_field(D_S, W_1).beta
    b, _ = bq_factors(bi, bs)
    theta = np.degrees(theta_from_period(3.3e-3, b, c.omega_full))
    assert theta == pytest.approx(64.0, abs=3.0)
    announce(f"criterion 6 PASS: theta_from_period(3.3 ms) = {theta:.2f} deg "
             f"(64 +- 3)")


def test_criterion_07_trim_angles(announce):
    beta_i = np.degrees(effective_field(D_I, W_1).beta)
    beta_s = np.degrees(effective_field(D_S, W_1).beta)
    assert beta_i == pytest.approx(49.0, abs=1.0)
    assert beta_s == pytest.approx(7.0, abs=1.0)
    announce(f"criterion 7 PASS: trim angles {beta_i:.2f} deg (49 +- 1), "
             f"{beta_s:.2f} deg (7 +- 1)")


def test_criterion_08_gate_suite(announce):
    assert np.array_equal(u_flip(0.0), iswap())
    for phi in np.linspace(0.0, 2 * np.pi, 64):
        g1, g2 = makhlin_invariants(u_flip(phi))
        assert abs(g1) < 1e-9
        assert abs(g2 + 1.0) < 1e-9
    fidelities = []
    for phi in (0.0, 0.3, np.pi / 2):
        f = operator_fidelity(cns_circuit(phi).compose(), cns())
        fidelities.append(f)
        assert f >= 1.0 - 1e-9
    assert universality_class((0.0, 0.0, 0.0)) == "non-entangling"
    assert universality_class((np.pi / 4,) * 3) == "excluded-swap-class"
    assert universality_class((np.pi / 4, np.pi / 4, 0.0)) == "universal"
    announce(f"criterion 8 PASS: u_flip(0) == iswap exactly; invariants "
             f"(0, -1) on 64-point grid to 1e-9; cns fidelity >= "
             f"{min(fidelities):.12f}; universality trio correct")


def test_criterion_09_numerical_hygiene(fig3a_result, announce):
    cfg = glycine_defaults()
    system = build_system(cfg)
    drive = build_drive(cfg)
    constants = dipolar_constants(system.gamma, system.r, system.theta_d)

    # propagator unitarity
    seg = CWSegment(drive=drive, duration=7 * system.rotor_period,
                    skip_trim=(1,))
    u = extract_gate(system, [IdealRotation((0,), "x", np.pi), seg])
    check_unitary(u, tol=1e-9)

    # density-matrix preservation through the full gate
    rho = u @ basis_state("00") @ u.conj().T
    check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-10, eig_tol=1e-9)

    # integrator self-convergence on step doubling
    fn = _segment_hamiltonian(system, drive, constants)
    u1 = segment_propagator(fn, 0.0, system.rotor_period, 1024)
    u2 = segment_propagator(fn, 0.0, system.rotor_period, 2048)
    step_err = float(np.max(np.abs(u1 - u2)))
    assert step_err < 1e-8

    # average-Hamiltonian vs full propagation over one exchange period
    traj, report = fig3a_result
    period = report["analytic_period_s"]
    mask = traj.times <= period + 1e-9
    iz_avg = -0.5 * np.cos(TWO_PI * traj.times[mask] / period)
    sz_avg = -iz_avg
    rms = float(np.sqrt(np.mean((traj.iz[mask] - iz_avg) ** 2
                                + (traj.sz[mask] - sz_avg) ** 2)))
    assert rms <= 0.05
    announce(f"criterion 9 PASS: unitarity/trace/Hermiticity within bounds; "
             f"step-doubling error {step_err:.2e} < 1e-8; avg-vs-full RMS "
             f"{rms:.3f} <= 0.05")


def test_criterion_10_determinism(tmp_path, announce):
    dirs = (tmp_path / "run1", tmp_path / "run2")
    files = ("fig3a_trajectory.csv", "fig3a_report.json",
             "fig3b_trajectory.csv", "fig3b_report.json",
             "fig4_report.json", "fig4_00_spectrum.csv",
             "fig4_01_spectrum.csv", "fig4_10_spectrum.csv",
             "fig4_11_spectrum.csv")
    for d in dirs:
        for preset in ("fig3a", "fig3b", "fig4"):
            assert main(["repro", preset, "--out", str(d)]) == 0
    for name in files:
        assert filecmp.cmp(dirs[0] / name, dirs[1] / name, shallow=False), name
    announce(f"criterion 10 PASS: {len(files)} repro data files byte-identical "
             f"across two runs")
