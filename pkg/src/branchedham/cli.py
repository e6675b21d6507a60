"""Command-line entry point.

    branchedham <command> [--config cfg.json] [--out DIR]
                [--format csv,json,svg] [--tol X]

Commands and what they emit (all datasets CSV/JSON, figures SVG):

* branches   gaussian kinetic-energy ("fedora") curve, the closed three-cusp
             H(p) curve; for family models the H_+/- kinetic branches.
* classical  energy contours in (x, p) for a list of energies, plus optional
             integrated trajectories.
* quantum    eigenvalues/eigenfunctions of a profile under a boundary
             condition: one bracket or a full scan below e_max.
* deform     w_kappa, phi0 and U_kappa tables for a list of kappas, with
             residual diagnostics.

Flags override config fields.  Exit codes: 0 success, 2 config validation
error, 1 computation error.  A run_report.json manifest lists every file
produced.  Outputs are deterministic for a fixed config (floats are written
with shortest round-trip repr).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import classical, deformation, models, quantum
from .errors import BranchedHamError, ValidationError
from .svg import PlotStyle, Series, render_svg

__all__ = ["main", "run", "validate_config", "DEFAULT_CONFIGS"]

_FORMATS = ("csv", "json", "svg")

_COMMON_KEYS = {"command", "model", "output"}
_KEYS_BY_COMMAND = {
    "branches": _COMMON_KEYS | {"n_points"},
    "classical": _COMMON_KEYS | {"energies", "grid", "trajectories", "tol",
                                 "t_max", "n_samples"},
    "quantum": _COMMON_KEYS | {"profile", "kappa", "bc", "bracket", "e_max",
                               "tol_e", "tol", "p_max"},
    "deform": _COMMON_KEYS | {"kappas", "p_grid"},
}

DEFAULT_CONFIGS = {
    "branches": {"model": {"kind": "gaussian", "m": 1.0, "C": 1.0,
                           "potential": {"kind": "zero"}}, "n_points": 801},
    "classical": {"model": {"kind": "susy"},
                  "energies": [-0.5, 0.0, 0.5, 1.0, 1.2, 1.4],
                  "tol": 1e-9, "t_max": 20.0, "n_samples": 2000},
    "quantum": {"model": {"kind": "susy"}, "profile": "susy_minus",
                "bc": "neumann", "bracket": [-0.5, 0.5],
                "tol_e": 1e-7, "tol": 1e-9},
    "deform": {"model": {"kind": "susy"}, "kappas": [1.0, 0.5, 0.25, 0.125],
               "p_grid": {"max": 10.0, "n": 1001}},
}


def validate_config(cfg: dict) -> dict:
    """Full validation with field-path error messages; returns the config."""
    if not isinstance(cfg, dict):
        raise ValidationError("config: must be a JSON object")
    command = cfg.get("command")
    if command not in _KEYS_BY_COMMAND:
        raise ValidationError(f"config.command: unknown command {command!r}")
    extra = set(cfg) - _KEYS_BY_COMMAND[command]
    if extra:
        raise ValidationError(f"config: unknown fields {sorted(extra)}")

    out = cfg.get("output", {})
    if not isinstance(out, dict) or set(out) - {"directory", "formats"}:
        raise ValidationError("config.output: expects {directory, formats}")
    for f in out.get("formats", []):
        if f not in _FORMATS:
            raise ValidationError(f"config.output.formats: unknown format {f!r}")

    try:
        models.model_from_config(cfg.get("model", {"kind": "susy"}))
    except BranchedHamError as exc:
        raise ValidationError(f"config.model: {exc}") from exc

    if command == "classical":
        energies = cfg.get("energies", [])
        if not isinstance(energies, list) or not all(
                isinstance(e, (int, float)) for e in energies):
            raise ValidationError("config.energies: must be a list of numbers")
        for k, tr in enumerate(cfg.get("trajectories", [])):
            allowed = {"x", "p", "branch", "t_max", "x_v"}
            if not isinstance(tr, dict) or set(tr) - allowed:
                raise ValidationError(f"config.trajectories[{k}]: bad fields")
    if command == "quantum":
        if cfg.get("profile", "susy_minus") not in ("susy_minus", "susy_plus",
                                                    "deformed_plus"):
            raise ValidationError("config.profile: unknown profile")
        if cfg.get("bc", "neumann") not in ("dirichlet", "neumann", "robin"):
            raise ValidationError("config.bc: unknown boundary condition")
        if "bracket" not in cfg and "e_max" not in cfg:
            raise ValidationError("config: quantum needs 'bracket' or 'e_max'")
    if command == "deform":
        kappas = cfg.get("kappas", [])
        if not isinstance(kappas, list) or not kappas or any(
                not isinstance(k, (int, float)) or k < 0 for k in kappas):
            raise ValidationError("config.kappas: must be a list of kappa >= 0")
    return cfg


def run(cfg: dict, out_dir: str | Path, formats: tuple[str, ...] = ("csv", "json")) -> dict:
    """Execute a validated config; returns the run report (also written)."""
    t0 = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    command = cfg["command"]
    model = models.model_from_config(cfg.get("model", {"kind": "susy"}))
    manifest: list[str] = []
    diagnostics: dict = {}

    if command == "branches":
        _run_branches(cfg, model, out, formats, manifest)
    elif command == "classical":
        _run_classical(cfg, model, out, formats, manifest, diagnostics)
    elif command == "quantum":
        _run_quantum(cfg, out, formats, manifest, diagnostics)
    elif command == "deform":
        _run_deform(cfg, out, formats, manifest, diagnostics)

    report = {
        "command": command,
        "config": cfg,
        "files": sorted(manifest + ["run_report.json"]),
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "diagnostics": diagnostics,
    }
    with open(out / "run_report.json", "w") as fh:
        json.dump(report, fh, indent=1, default=_json_default)
        fh.write("\n")
    return report


def _json_default(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    raise TypeError(f"not JSON serializable: {v!r}")


def _write(path: Path, text: str, manifest: list[str]) -> None:
    path.write_text(text)
    manifest.append(path.name)


def _run_branches(cfg, model, out, formats, manifest):
    n = int(cfg.get("n_points", 801))
    rows_k = []
    rows_h = []
    if isinstance(model, models.GaussianModel):
        vc = model.v_cusp
        zs = np.linspace(-4.0 * vc, 4.0 * vc, n)
        for z in zs:
            kin = models.gaussian_lagrangian(model, 0.0, float(z)) \
                + model.potential(0.0)
            rows_k.append((float(z), kin / model.C))
        pc = model.p_cusp
        ps = np.linspace(-pc, pc, n)
        for branch in (models.BranchId.MINUS, models.BranchId.MIDDLE,
                       models.BranchId.PLUS):
            for p in ps:
                pv = float(p)
                if branch is models.BranchId.MINUS and pv > 0.0:
                    continue
                if branch is models.BranchId.PLUS and pv < 0.0:
                    continue
                h = models.gaussian_hamiltonian(model, 0.0, pv, branch)
                rows_h.append((branch.value, pv, h))
    else:
        ps = np.linspace(0.05, 6.0, n)
        for branch in (models.BranchId.H_MINUS, models.BranchId.H_PLUS):
            for p in ps:
                h = models.family_hamiltonian(model, 0.0, float(p), branch) \
                    - model.potential(0.0)
                rows_h.append((branch.value, float(p), h))

    if "csv" in formats:
        if rows_k:
            text = "z,kinetic_over_C\n" + "".join(
                f"{v!r},{k!r}\n" for v, k in rows_k)
            _write(out / "kinetic_curve.csv", text, manifest)
        text = "branch,p,H\n" + "".join(
            f"{b},{p!r},{h!r}\n" for b, p, h in rows_h)
        _write(out / "hamiltonian_branches.csv", text, manifest)
    if "svg" in formats:
        series = []
        for b in dict.fromkeys(r[0] for r in rows_h):
            pts = [(p, h) for bb, p, h in rows_h if bb == b]
            series.append(Series(b, pts))
        _write(out / "hamiltonian_branches.svg",
               render_svg(series, PlotStyle(title="Hamiltonian branches",
                                            x_label="p", y_label="H")),
               manifest)
        if rows_k:
            _write(out / "kinetic_curve.svg",
                   render_svg([Series("kinetic", rows_k)],
                              PlotStyle(title="Kinetic energy",
                                        x_label="v sqrt(m/C)", y_label="(L+V)/C")),
                   manifest)
    if "json" in formats:
        data = {"hamiltonian_branches": [
            {"branch": b, "p": p, "H": h} for b, p, h in rows_h]}
        if rows_k:
            data["kinetic_curve"] = [{"z": z, "kin": k} for z, k in rows_k]
        _write(out / "branches.json", json.dumps(data, indent=1) + "\n", manifest)


def _branches_for(model):
    if isinstance(model, models.GaussianModel):
        return (models.BranchId.MINUS, models.BranchId.MIDDLE, models.BranchId.PLUS)
    return (models.BranchId.H_MINUS, models.BranchId.H_PLUS)


def _run_classical(cfg, model, out, formats, manifest, diagnostics):
    energies = cfg.get("energies", [])
    all_series = []
    for e in energies:
        lines_all = []
        for branch in _branches_for(model):
            lines = classical.energy_contour(model, float(e), branch)
            lines_all.extend((branch, ln) for ln in lines)
        name = f"contour_E{_slug(e)}"
        if "csv" in formats:
            classical.contours_to_csv([ln for _, ln in lines_all],
                                      out / f"{name}.csv")
            manifest.append(f"{name}.csv")
        for branch, ln in lines_all:
            all_series.append(Series(f"E={e:g} {branch.value}",
                                     [(float(a), float(b)) for a, b in ln]))
    if "svg" in formats and all_series:
        _write(out / "phase_portrait.svg",
               render_svg(all_series, PlotStyle(title="Constant-energy curves",
                                                x_label="x", y_label="p",
                                                legend=len(all_series) <= 12)),
               manifest)

    drifts = {}
    for k, tr in enumerate(cfg.get("trajectories", [])):
        t_max = float(tr.get("t_max", cfg.get("t_max", 20.0)))
        tol = float(cfg.get("tol", 1e-9))
        if "x_v" in tr:
            traj = classical.integrate_lagrangian_flow(
                tuple(tr["x_v"]), t_max, tol,
                n_samples=int(cfg.get("n_samples", 2000)))
        else:
            branch = models.BranchId(tr["branch"])
            init = classical.make_state(model, 0.0, float(tr["x"]),
                                        float(tr["p"]), branch)
            traj = classical.integrate_branch_flow(
                model, init, t_max, tol,
                n_samples=int(cfg.get("n_samples", 2000)))
        name = f"trajectory_{k}"
        if "csv" in formats:
            classical.trajectory_to_csv(traj, model, out / f"{name}.csv")
            manifest.append(f"{name}.csv")
        if "json" in formats:
            classical.trajectory_to_json(traj, model, out / f"{name}.json")
            manifest.append(f"{name}.json")
        drifts[name] = traj.energy_drift
    if drifts:
        diagnostics["energy_drift"] = drifts


def _run_quantum(cfg, out, formats, manifest, diagnostics):
    kind = cfg.get("profile", "susy_minus")
    kappa = float(cfg.get("kappa", 0.0))
    if kind == "susy_minus":
        profile = quantum.PotentialProfile.susy_minus()
    elif kind == "susy_plus":
        profile = quantum.PotentialProfile.susy_plus()
    else:
        profile = quantum.PotentialProfile.deformed_plus(kappa)
    bc_kind = cfg.get("bc", "neumann")
    bc = quantum.BoundaryCondition(bc_kind,
                                   kappa if bc_kind == "robin" else 0.0)
    tol_e = float(cfg.get("tol_e", 1e-7))
    tol = float(cfg.get("tol", 1e-9))
    p_max = cfg.get("p_max")
    p_max = float(p_max) if p_max is not None else None

    if "bracket" in cfg:
        sols = [quantum.solve_eigenvalue(profile, bc, tuple(cfg["bracket"]),
                                         tol_e, p_max=p_max, tol=tol)]
    else:
        sols = quantum.spectrum(profile, bc, float(cfg["e_max"]), tol_e,
                                p_max=p_max, tol=tol)

    if "json" in formats:
        quantum.spectrum_to_json(sols, out / "spectrum.json")
        manifest.append("spectrum.json")
    for k, sol in enumerate(sols):
        if "csv" in formats:
            quantum.eigensolution_to_csv(sol, out / f"state_{k}.csv")
            manifest.append(f"state_{k}.csv")
    if "svg" in formats and sols:
        series = [Series(f"E={s.E:.6f}",
                         list(zip(s.grid.tolist(), s.psi.tolist())))
                  for s in sols]
        _write(out / "wavefunctions.svg",
               render_svg(series, PlotStyle(title=f"{kind} / {bc_kind}",
                                            x_label="p", y_label="psi")),
               manifest)
    diagnostics["eigenvalues"] = [s.E for s in sols]


def _run_deform(cfg, out, formats, manifest, diagnostics):
    kappas = cfg.get("kappas", [1.0, 0.5, 0.25, 0.125])
    gridspec = cfg.get("p_grid", {})
    p_hi = float(gridspec.get("max", 10.0))
    n = int(gridspec.get("n", 1001))
    ps = np.linspace(p_hi / n, p_hi, n)
    resid_grid = np.linspace(0.3, min(p_hi, 10.0), 3881)
    per_kappa = {}
    series_phi = []
    series_w = []
    for kap in kappas:
        prof = deformation.DeformationProfile(float(kap))
        name = f"deform_kappa_{_slug(kap)}"
        if "csv" in formats:
            deformation.profile_to_csv(prof, ps, out / f"{name}.csv")
            manifest.append(f"{name}.csv")
        if kap > 0.0:
            per_kappa[str(kap)] = prof.residuals(resid_grid)
            series_phi.append(Series(f"kappa={kap:g}",
                                     list(zip(ps.tolist(), prof.phi0(ps).tolist()))))
        series_w.append(Series(f"kappa={kap:g}",
                               list(zip(ps.tolist(), prof.w(ps).tolist()))))
    if "svg" in formats:
        if series_phi:
            _write(out / "phi0.svg",
                   render_svg(series_phi, PlotStyle(title="Deformed zero modes",
                                                    x_label="p", y_label="phi0")),
                   manifest)
        _write(out / "w_kappa.svg",
               render_svg(series_w, PlotStyle(title="Superpotentials",
                                              x_label="p", y_label="w_kappa")),
               manifest)
    if "json" in formats:
        _write(out / "deform_diagnostics.json",
               json.dumps(per_kappa, indent=1) + "\n", manifest)
    diagnostics.update(per_kappa)


def _slug(v) -> str:
    return f"{float(v):g}".replace("-", "m").replace(".", "p")


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="branchedham",
        description="Branched-Hamiltonian models: classical flows, "
                    "half-line spectra, isospectral deformations.")
    ap.add_argument("command", choices=sorted(_KEYS_BY_COMMAND))
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--format", default=None,
                    help="comma-separated subset of csv,json,svg")
    ap.add_argument("--tol", type=float, default=None,
                    help="override the command's main tolerance")
    ns = ap.parse_args(argv)

    try:
        if ns.config:
            with open(ns.config) as fh:
                cfg = json.load(fh)
        else:
            cfg = dict(DEFAULT_CONFIGS[ns.command])
            cfg["command"] = ns.command
        if "command" not in cfg:
            cfg["command"] = ns.command
        if cfg.get("command") != ns.command:
            raise ValidationError(
                f"config.command={cfg.get('command')!r} does not match "
                f"the command line ({ns.command})")
        if ns.tol is not None:
            if ns.command == "classical":
                cfg["tol"] = ns.tol
            elif ns.command == "quantum":
                cfg["tol_e"] = ns.tol
            # table commands (branches, deform) have no tolerance knob
        cfg = validate_config(cfg)
        out_cfg = cfg.get("output", {})
        out_dir = ns.out if ns.out != "out" or "directory" not in out_cfg \
            else out_cfg["directory"]
        formats = tuple(ns.format.split(",")) if ns.format else \
            tuple(out_cfg.get("formats", ("csv", "json")))
        for f in formats:
            if f not in _FORMATS:
                raise ValidationError(f"--format: unknown format {f!r}")
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run(cfg, out_dir, formats)
    except BranchedHamError as exc:
        print(f"computation error [{cfg['command']}]: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"files": report["files"],
                      "wall_time_s": report["wall_time_s"]}, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
