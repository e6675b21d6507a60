import json
import math
from pathlib import Path

import pytest

from branchedham.cli import DEFAULT_CONFIGS, main, run, validate_config
from branchedham.errors import EmptyDatasetError, ValidationError
from branchedham.svg import PlotStyle, Series, render_svg

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name):
    with open(FIXTURES / name) as fh:
        return json.load(fh)


class TestValidation:
    def test_unknown_top_level_field(self):
        cfg = {"command": "branches", "frobnicate": 1}
        with pytest.raises(ValidationError, match="unknown fields"):
            validate_config(cfg)

    def test_unknown_command(self):
        with pytest.raises(ValidationError, match="command"):
            validate_config({"command": "simulate"})

    def test_bad_model(self):
        with pytest.raises(ValidationError, match="model"):
            validate_config({"command": "branches", "model": {"kind": "x"}})

    def test_quantum_needs_bracket_or_scan(self):
        with pytest.raises(ValidationError):
            validate_config({"command": "quantum", "model": {"kind": "susy"}})

    def test_fixtures_validate(self):
        for fx in FIXTURES.glob("*.json"):
            validate_config(load_fixture(fx.name))

    def test_rejected_config_produces_no_files(self, tmp_path):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps({"command": "branches", "oops": 1}))
        out = tmp_path / "out"
        code = main(["branches", "--config", str(cfg_path), "--out", str(out)])
        assert code == 2
        assert not out.exists() or not list(out.iterdir())


class TestRun:
    def test_branches_manifest_complete(self, tmp_path):
        cfg = validate_config(load_fixture("gaussian_branches.json"))
        report = run(cfg, tmp_path, ("csv", "json", "svg"))
        on_disk = sorted(p.name for p in tmp_path.iterdir())
        assert report["files"] == on_disk
        assert "hamiltonian_branches.csv" in on_disk
        assert "kinetic_curve.csv" in on_disk

    def test_branches_csv_closes_with_cusps(self, tmp_path):
        cfg = validate_config(load_fixture("gaussian_branches.json"))
        run(cfg, tmp_path, ("csv",))
        rows = (tmp_path / "hamiltonian_branches.csv").read_text().splitlines()[1:]
        pc = 1.0 / math.sqrt(math.e)
        by_branch = {}
        for row in rows:
            b, p, h = row.split(",")
            by_branch.setdefault(b, []).append((float(p), float(h)))
        assert set(by_branch) == {"minus", "middle", "plus"}
        # the three branches span exactly [-pc, pc] and meet at the cusps
        assert min(p for p, _ in by_branch["middle"]) == pytest.approx(-pc)
        assert max(p for p, _ in by_branch["middle"]) == pytest.approx(pc)
        h_mid_end = dict(by_branch["middle"])[pc]
        h_plus_end = dict(by_branch["plus"])[pc]
        assert h_mid_end == pytest.approx(h_plus_end, abs=1e-12)
        assert h_mid_end == pytest.approx(2.0 / math.sqrt(math.e) - 1.0, abs=1e-12)

    def test_determinism(self, tmp_path):
        cfg = validate_config(load_fixture("deform_profiles.json"))
        run(cfg, tmp_path / "a", ("csv", "json", "svg"))
        run(cfg, tmp_path / "b", ("csv", "json", "svg"))
        for fa in sorted((tmp_path / "a").iterdir()):
            if fa.name == "run_report.json":  # carries wall time
                continue
            fb = tmp_path / "b" / fa.name
            assert fa.read_bytes() == fb.read_bytes()

    def test_quantum_excited_level(self, tmp_path):
        cfg = validate_config(load_fixture("quantum_excited.json"))
        run(cfg, tmp_path, ("json",))
        data = json.loads((tmp_path / "spectrum.json").read_text())
        assert abs(data[0]["E"] - 1.89379) < 1e-3

    def test_susy_portrait_emits_all_energies(self, tmp_path):
        cfg = validate_config(load_fixture("susy_portrait.json"))
        report = run(cfg, tmp_path, ("csv",))
        for e in (-0.5, 0.0, 0.5, 1.0, 1.2, 1.4):
            tag = f"{e:g}".replace("-", "m").replace(".", "p")
            assert (tmp_path / f"contour_E{tag}.csv").exists()
        assert (tmp_path / "trajectory_0.csv").exists()
        assert report["diagnostics"]["energy_drift"]["trajectory_1"] < 1e-6

    def test_deform_diagnostics(self, tmp_path):
        cfg = validate_config(load_fixture("deform_profiles.json"))
        report = run(cfg, tmp_path, ("csv", "json"))
        for kappa in ("1.0", "0.5", "0.25", "0.125"):
            d = report["diagnostics"][kappa]
            assert d["zero_mode_first_order"] < 1e-4
            assert d["robin"] < 1e-6
        rows = (tmp_path / "deform_kappa_1.csv").read_text().splitlines()
        assert rows[0] == "p,w_kappa,phi0,U_kappa"


class TestMain:
    def test_default_config_runs(self, tmp_path):
        code = main(["branches", "--out", str(tmp_path), "--format", "csv"])
        assert code == 0
        assert (tmp_path / "run_report.json").exists()

    def test_command_mismatch_rejected(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(load_fixture("quantum_ground.json")))
        assert main(["deform", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_bad_format_flag(self, tmp_path):
        assert main(["branches", "--out", str(tmp_path), "--format", "png"]) == 2


class TestRenderSvg:
    def test_single_polyline(self):
        doc = render_svg([Series("y=x", [(0.0, 0.0), (1.0, 1.0)])])
        assert doc.count("<polyline") == 1
        assert doc.startswith("<?xml")
        assert "</svg>" in doc

    def test_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            render_svg([])
        with pytest.raises(EmptyDatasetError):
            render_svg([Series("empty", [])])

    def test_separatrix_two_black_components(self):
        # inner oval and outer cusped curve at the separatrix energy
        from branchedham.classical import energy_contour
        from branchedham.models import (BranchId, GaussianModel, Potential)
        m = GaussianModel(1.0, 1.0, Potential("harmonic_shifted", c0=1.0, a=1.0))
        e_sep = 2.0 / math.sqrt(math.e)
        series = []
        for branch in (BranchId.MINUS, BranchId.MIDDLE, BranchId.PLUS):
            for ln in energy_contour(m, e_sep, branch):
                series.append(Series("separatrix", [(x, p) for x, p in ln],
                                     color="#000000"))
        assert len(series) >= 2
        doc = render_svg(series, PlotStyle(legend=False))
        assert doc.count('stroke="#000000"') >= 2

    def test_phi0_series_order(self):
        import numpy as np
        from branchedham.deformation import DeformationProfile
        ps = np.linspace(0.01, 8.0, 120)
        series = []
        for kappa in (1.0, 0.5, 0.25, 0.125):
            prof = DeformationProfile(kappa)
            series.append(Series(f"kappa={kappa:g}",
                                 list(zip(ps.tolist(), prof.phi0(ps).tolist()))))
        doc = render_svg(series)
        order = [doc.index(f"kappa={k:g}") for k in (1.0, 0.5, 0.25, 0.125)]
        assert order == sorted(order)

    def test_deterministic_bytes(self):
        s = [Series("a", [(0.0, 1.0), (2.0, 3.0)], color="#123456")]
        assert render_svg(s) == render_svg(s)


class TestDefaults:
    def test_default_configs_validate(self):
        for command, cfg in DEFAULT_CONFIGS.items():
            full = dict(cfg)
            full["command"] = command
            validate_config(full)
