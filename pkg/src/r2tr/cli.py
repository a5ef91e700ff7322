"""Command-line surface: config ingestion, reproduction presets, and
CSV/JSON emission.

Config files are JSON with a versioned schema; quantities cross the
boundary in degrees and Hz (matching how experiments are specified) and
are converted to radians and rad/s internally. All emitted data files use
fixed formatting and carry no timestamps, so identical configs produce
byte-identical output.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .gates import (cns, gate_to_json, iswap, locally_equivalent,
                    makhlin_invariants, universality_class, weyl_coordinates)
from .hamiltonian import bq_factors, dipolar_constants, effective_field
from .operators import SpinSystem, basis_state
from .propagator import (DEFAULT_STEPS_PER_PERIOD, CWSegment, Delay,
                         IdealRotation, RFDrive, extract_gate, run_sequence)
from .readout import classify_state, fid_to_csv, simulate_fid, stick_spectrum
from .recoupling import (plans_to_json, predicted_exchange_period,
                         solve_plans, theta_from_period)
from .units import (GAMMA_C13, GLYCINE_CC_DISTANCE, HBAR, MU0_OVER_4PI,
                    TWO_PI, deg_to_rad, hz_to_angular, ppm_to_hz, rad_to_deg)

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


# ---------------------------------------------------------------- config

def glycine_defaults():
    """Built-in config: the doubly labeled glycine operating point."""
    return {
        "schema_version": SCHEMA_VERSION,
        "system": {
            "gamma_rad_per_s_per_t": GAMMA_C13,
            "r_angstrom": 1.53,
            "theta_d_deg": 64.0,
            "phi_deg": 0.0,
            "spin_rate_hz": 7884.0,
            "offsets_hz": [2000.0, 18699.0],
        },
        "drive": {"amplitude_hz": 2339.0, "phase_deg": 0.0,
                  "trim": True, "skip_trim": [1]},
        "sequence": [],
        "integrator": {"steps_per_period": DEFAULT_STEPS_PER_PERIOD},
        "initial_state": "00",
        "solve": {"classes": ["a", "b"], "harmonics": [1, 2]},
    }


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    version = cfg.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    return cfg


def _radius_from_coupling(gamma, coupling_hz):
    # invert omega_full = (mu0/4pi) gamma^2 hbar / r^3
    w = hz_to_angular(coupling_hz)
    if w <= 0:
        raise ConfigError("coupling_hz must be positive")
    return (MU0_OVER_4PI * gamma**2 * HBAR / w) ** (1.0 / 3.0)


def build_system(cfg):
    """SpinSystem from the config's system block (degrees/Hz boundary)."""
    try:
        blk = cfg["system"]
    except KeyError:
        raise ConfigError("config is missing the 'system' block") from None
    gamma = float(blk.get("gamma_rad_per_s_per_t", GAMMA_C13))
    has_r = "r_angstrom" in blk
    has_coupling = "coupling_hz" in blk
    if has_r == has_coupling:
        raise ConfigError(
            "system block needs exactly one of 'r_angstrom' or 'coupling_hz'")
    if has_r:
        r = float(blk["r_angstrom"]) * 1e-10
    else:
        r = _radius_from_coupling(gamma, float(blk["coupling_hz"]))
    if "offsets_hz" in blk:
        offsets_hz = [float(o) for o in blk["offsets_hz"]]
    elif "offsets_ppm" in blk:
        carrier = blk.get("carrier_mhz")
        if carrier is None:
            raise ConfigError("'offsets_ppm' requires 'carrier_mhz'")
        offsets_hz = [ppm_to_hz(float(p), float(carrier))
                      for p in blk["offsets_ppm"]]
    else:
        raise ConfigError("system block needs 'offsets_hz' or 'offsets_ppm'")
    try:
        return SpinSystem(
            gamma=gamma,
            r=r,
            theta_d=deg_to_rad(float(blk.get("theta_d_deg", 0.0))),
            phi=deg_to_rad(float(blk.get("phi_deg", 0.0))),
            omega_r=hz_to_angular(float(blk["spin_rate_hz"])),
            offsets=tuple(hz_to_angular(o) for o in offsets_hz),
        )
    except KeyError as exc:
        raise ConfigError(f"system block is missing {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"invalid system block: {exc}") from None


def build_drive(cfg):
    blk = cfg.get("drive")
    if blk is None:
        return None
    return RFDrive(omega_1=hz_to_angular(float(blk["amplitude_hz"])),
                   phase=deg_to_rad(float(blk.get("phase_deg", 0.0))))


def build_events(cfg, drive=None):
    """Event list from the config's sequence block."""
    if drive is None:
        drive = build_drive(cfg)
    drive_blk = cfg.get("drive", {})
    trim = bool(drive_blk.get("trim", True))
    skip_trim = tuple(drive_blk.get("skip_trim", ()))
    events = []
    for k, ev in enumerate(cfg.get("sequence", [])):
        kind = ev.get("type")
        if kind == "pulse":
            events.append(IdealRotation(
                targets=tuple(ev["targets"]),
                axis=ev["axis"],
                angle=deg_to_rad(float(ev["angle_deg"]))))
        elif kind == "cw":
            if drive is None:
                raise ConfigError(f"sequence[{k}]: cw event needs a drive block")
            events.append(CWSegment(
                drive=drive,
                duration=float(ev["duration_s"]),
                trim=bool(ev.get("trim", trim)),
                skip_trim=tuple(ev.get("skip_trim", skip_trim))))
        elif kind == "delay":
            events.append(Delay(duration=float(ev["duration_s"]),
                                dipolar_on=bool(ev.get("dipolar_on", True))))
        else:
            raise ConfigError(f"sequence[{k}]: unknown event type {kind!r}")
    return events


def _steps_per_period(cfg, override=None):
    if override is not None:
        return int(override)
    return int(cfg.get("integrator", {}).get("steps_per_period",
                                             DEFAULT_STEPS_PER_PERIOD))


# --------------------------------------------------------------- analysis

@dataclass(frozen=True)
class PeriodFit:
    """Least-squares cosine fit a + b cos(2 pi t / period + phase)."""

    period: float
    amplitude: float  # peak-to-peak swing, 2|b|
    offset: float
    phase: float


def fit_exchange_period(times, values, period_guess, window_periods=2.0):
    """Fit a sinusoid to an exchange trajectory and return its period.

    The fit window defaults to two predicted periods; the initial guess
    comes from the analytic prediction so the optimizer only refines it.
    """
    from scipy.optimize import curve_fit

    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window_periods is not None:
        mask = times <= window_periods * period_guess + 1e-12
        if mask.sum() >= 8:
            times, values = times[mask], values[mask]

    def model(t, a, b, w, c):
        return a + b * np.cos(w * t + c)

    p0 = (float(values.mean()),
          0.5 * float(values.max() - values.min()),
          TWO_PI / period_guess,
          math.pi)
    popt, _ = curve_fit(model, times, values, p0=p0, maxfev=20000)
    a, b, w, c = popt
    if b < 0:
        b, c = -b, c + math.pi
    return PeriodFit(period=TWO_PI / abs(w), amplitude=2.0 * b,
                     offset=a, phase=c % TWO_PI)


def transfer_fraction(traj):
    """Fraction of the initial I/S polarization difference actually exchanged.

    Uses min(I gain, S loss) so a single-spin wobble (which moves one
    observable without the other) does not count as transfer.
    """
    gap = traj.sz[0] - traj.iz[0]
    if abs(gap) < 1e-9:
        return 0.0
    sign = 1.0 if gap > 0 else -1.0
    exchanged = np.minimum(sign * (traj.iz - traj.iz[0]),
                           sign * (traj.sz[0] - traj.sz))
    return max(0.0, float(exchanged.max()) / abs(gap))


def analytic_period(system, drive):
    """Predicted exchange period for the class-a, m=2 condition."""
    constants = dipolar_constants(system.gamma, system.r, system.theta_d)
    beta_i = effective_field(system.offsets[0], drive.omega_1).beta
    beta_s = effective_field(system.offsets[1], drive.omega_1).beta
    b, _ = bq_factors(beta_i, beta_s)
    coupling = 0.5 * abs(b) * constants.harmonic(2)
    return predicted_exchange_period(coupling)


# ---------------------------------------------------------------- presets

def preset_config(name):
    """Config dict for one of the reproduction presets."""
    cfg = glycine_defaults()
    if name == "fig3a":
        system = build_system(cfg)
        drive = build_drive(cfg)
        duration = 2.0 * analytic_period(system, drive)
        cfg["sequence"] = [
            {"type": "pulse", "targets": [0], "axis": "x", "angle_deg": 180.0},
            {"type": "cw", "duration_s": duration},
        ]
    elif name == "fig3b":
        # at this amplitude the S tilt is no longer negligible, so both
        # trim pulses are applied
        cfg["drive"]["amplitude_hz"] = 8823.0
        cfg["drive"]["skip_trim"] = []
        cfg["sequence"] = [
            {"type": "pulse", "targets": [0], "axis": "x", "angle_deg": 180.0},
            {"type": "cw", "duration_s": 5e-3},
        ]
    elif name == "fig4":
        cfg["sequence"] = []  # built per basis state at run time
    else:
        raise ConfigError(f"unknown preset {name!r}")
    return cfg


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _simulate_report(cfg, steps_override=None):
    """Run the configured sequence; return (trajectory, report dict)."""
    system = build_system(cfg)
    drive = build_drive(cfg)
    events = build_events(cfg, drive)
    steps = _steps_per_period(cfg, steps_override)
    sample_every = float(cfg.get("sample_every_s") or system.rotor_period)
    initial = basis_state(cfg.get("initial_state", "00"))
    traj = run_sequence(initial, system, events, sample_every,
                        steps_per_period=steps)
    report = {"max_transfer_fraction": transfer_fraction(traj)}
    if drive is not None and any(isinstance(e, CWSegment) for e in events):
        guess = analytic_period(system, drive)
        report["analytic_period_s"] = guess
        try:
            fit = fit_exchange_period(traj.times, traj.iz, guess)
        except RuntimeError:
            fit = None
        if fit is not None and fit.amplitude > 0.05:
            constants = dipolar_constants(system.gamma, system.r,
                                          system.theta_d)
            beta_i = effective_field(system.offsets[0], drive.omega_1).beta
            beta_s = effective_field(system.offsets[1], drive.omega_1).beta
            b, _ = bq_factors(beta_i, beta_s)
            report["fitted_period_s"] = fit.period
            report["fitted_amplitude"] = fit.amplitude
            try:
                theta = theta_from_period(fit.period, b, constants.omega_full)
                report["theta_d_deg_from_period"] = rad_to_deg(theta)
            except ValueError as exc:
                report["theta_d_deg_from_period"] = None
                report["theta_note"] = str(exc)
    return traj, report


def run_fig4(cfg, steps_override=None, threshold=0.2):
    """Truth table: prepare each basis state, evolve half a period, classify."""
    system = build_system(cfg)
    drive = build_drive(cfg)
    steps = _steps_per_period(cfg, steps_override)

    fit_cfg = preset_config("fig3a")
    fit_cfg["integrator"] = {"steps_per_period": steps}
    _, fit_report = _simulate_report(fit_cfg)
    half_period = 0.5 * fit_report["fitted_period_s"]

    segment = CWSegment(drive=drive, duration=half_period,
                        trim=bool(cfg.get("drive", {}).get("trim", True)),
                        skip_trim=tuple(cfg.get("drive", {}).get("skip_trim", ())))
    gate = extract_gate(system, [segment], steps_per_period=steps)

    table = {}
    spectra = {}
    for label in ("00", "01", "10", "11"):
        rho = basis_state(label)
        rho = gate @ rho @ gate.conj().T
        spectrum = stick_spectrum(rho, system)
        spectra[label] = spectrum
        table[label] = classify_state(spectrum, threshold=threshold)
    report = {
        "truth_table": table,
        "half_period_s": half_period,
        "half_period_nominal_s": 1.6e-3,
        "fitted_period_s": fit_report["fitted_period_s"],
        "peak_amplitudes": {label: [[off, amp] for off, amp in sp.peaks]
                            for label, sp in spectra.items()},
    }
    return report, spectra


# ------------------------------------------------------------ subcommands

def _out_path(out_dir, name):
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        return os.path.join(out_dir, name)
    return name


def cmd_solve(cfg, args):
    system = build_system(cfg)
    constants = dipolar_constants(system.gamma, system.r, system.theta_d)
    solve_blk = cfg.get("solve", {})
    classes = tuple(solve_blk.get("classes", ("a", "b")))
    harmonics = tuple(int(m) for m in solve_blk.get("harmonics", (1, 2)))
    plans = solve_plans(system.offsets[0], system.offsets[1], system.omega_r,
                        constants, classes=classes, harmonics=harmonics)
    text = plans_to_json(plans)
    if args.out:
        path = _out_path(args.out, "plans.json")
        with open(path, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {path}")
    else:
        print(text)
    if not plans:
        print("no solution for the requested classes/harmonics")
    return 0


def cmd_simulate(cfg, args):
    traj, report = _simulate_report(cfg, args.steps_per_period)
    if args.format == "json":
        path = _out_path(args.out, "trajectory.json")
        _write_json(path, {"t_s": [float(t) for t in traj.times],
                           "Iz": [float(v) for v in traj.iz],
                           "Sz": [float(v) for v in traj.sz]})
    else:
        path = _out_path(args.out, "trajectory.csv")
        traj.to_csv(path)
    print(f"wrote {path}")
    for key in ("fitted_period_s", "analytic_period_s",
                "theta_d_deg_from_period", "max_transfer_fraction"):
        if key in report and report[key] is not None:
            print(f"{key} = {report[key]:.6g}")
    return 0


def cmd_gate(cfg, args):
    system = build_system(cfg)
    events = build_events(cfg)
    steps = _steps_per_period(cfg, args.steps_per_period)
    u = extract_gate(system, events, steps_per_period=steps,
                     remove_effective_precession=True)
    g1, g2 = makhlin_invariants(u)
    angles = weyl_coordinates(u)
    coords = (angles.theta_x, angles.theta_y, angles.theta_z)
    report = {
        "unitary": gate_to_json(u),
        "makhlin_g1": [g1.real, g1.imag],
        "makhlin_g2": g2,
        # the verdict tolerance absorbs the second-order shift of the
        # matching condition left when operating at the nominal amplitude
        "locally_equivalent_iswap": bool(
            locally_equivalent(u, iswap(), tol=2.5e-2)),
        "locally_equivalent_cns": bool(locally_equivalent(u, cns(), tol=2.5e-2)),
        "weyl_coordinates": list(coords),
        "universality_class": universality_class(
            tuple(c / 4.0 for c in coords), tol=1e-2),
    }
    path = _out_path(args.out, "gate.json")
    _write_json(path, report)
    print(f"wrote {path}")
    print(f"makhlin invariants: g1 = {g1.real:.6g}{g1.imag:+.6g}j, "
          f"g2 = {g2:.6g}")
    print(f"locally equivalent to ISWAP: {report['locally_equivalent_iswap']}")
    return 0


def cmd_spectrum(cfg, args):
    system = build_system(cfg)
    events = build_events(cfg)
    steps = _steps_per_period(cfg, args.steps_per_period)
    rho = basis_state(cfg.get("initial_state", "00"))
    if events:
        u = extract_gate(system, events, steps_per_period=steps)
        rho = u @ rho @ u.conj().T
    spectrum = stick_spectrum(rho, system)
    if args.format == "json":
        path = _out_path(args.out, "spectrum.json")
        _write_json(path, {"peaks": [[off, amp] for off, amp in spectrum.peaks]})
    else:
        path = _out_path(args.out, "spectrum.csv")
        spectrum.to_csv(path)
    print(f"wrote {path}")
    fid_blk = cfg.get("fid")
    if fid_blk:
        fid = simulate_fid(rho, system, float(fid_blk["duration_s"]),
                           float(fid_blk["dwell_s"]))
        fid_path = _out_path(args.out, "fid.csv")
        fid_to_csv(fid, float(fid_blk["dwell_s"]), fid_path)
        print(f"wrote {fid_path}")
    return 0


def cmd_repro(args):
    name = args.preset
    cfg = preset_config(name)
    if args.steps_per_period:
        cfg["integrator"] = {"steps_per_period": int(args.steps_per_period)}
    if name in ("fig3a", "fig3b"):
        traj, report = _simulate_report(cfg)
        csv_path = _out_path(args.out, f"{name}_trajectory.csv")
        traj.to_csv(csv_path)
        report_path = _out_path(args.out, f"{name}_report.json")
        _write_json(report_path, report)
        print(f"wrote {csv_path}")
        print(f"wrote {report_path}")
        if name == "fig3a":
            print(f"fitted period: {report['fitted_period_s'] * 1e3:.4g} ms "
                  f"(analytic {report['analytic_period_s'] * 1e3:.4g} ms)")
        else:
            print(f"max transfer: {report['max_transfer_fraction']:.4g}")
        return 0
    report, spectra = run_fig4(cfg, args.steps_per_period)
    for label, spectrum in spectra.items():
        spectrum.to_csv(_out_path(args.out, f"fig4_{label}_spectrum.csv"))
    report_path = _out_path(args.out, "fig4_report.json")
    _write_json(report_path, report)
    print(f"wrote {report_path}")
    print("truth table:", json.dumps(report["truth_table"], sort_keys=True))
    return 0


# --------------------------------------------------------------- top level

def build_parser():
    parser = argparse.ArgumentParser(
        prog="r2tr",
        description="Selective dipolar recoupling simulator: condition "
                    "solving, spin dynamics, gate analysis, and readout.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", metavar="PATH",
                       help="JSON experiment config (default: built-in "
                            "glycine parameters)")
        p.add_argument("--out", metavar="DIR", default="",
                       help="output directory (default: current directory)")
        p.add_argument("--steps-per-period", type=int, metavar="N",
                       help="integrator steps per rotor period")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    for name in ("solve", "simulate", "gate", "spectrum"):
        add_common(sub.add_parser(name))
    repro = sub.add_parser("repro", help="reproduction presets")
    repro.add_argument("preset", choices=("fig3a", "fig3b", "fig4"))
    add_common(repro)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "repro":
            return cmd_repro(args)
        cfg = load_config(args.config) if args.config else glycine_defaults()
        handler = {"solve": cmd_solve, "simulate": cmd_simulate,
                   "gate": cmd_gate, "spectrum": cmd_spectrum}[args.command]
        return handler(cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
