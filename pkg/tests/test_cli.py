import json

import numpy as np
import pytest

from sphwass.cli import main, run_verification_checks


def write_config(path, **overrides):
    cfg = {
        "family": "expansion_1d",
        "gamma": 2.0,
        "theta": 1,
        "resolutions": [1, 2, 3],
        "dt": 1e-2,
        "t_end": 0.2,
        "n_snapshots": 3,
        "output_dir": str(path.parent / "out"),
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return cfg


def write_cloud(path, points, masses):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dim = points.shape[1]
    header = "id," + ",".join(f"x{i}" for i in range(dim)) + ",mass"
    rows = [header]
    for pid, (pt, m) in enumerate(zip(points, masses)):
        coords = ",".join(f"{float(v)!r}" for v in pt)
        rows.append(f"{pid},{coords},{float(m)!r}")
    path.write_text("\n".join(rows) + "\n")


class TestRunCommand:
    def test_minimal_config_succeeds(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        write_config(cfg_path)
        assert main(["run", str(cfg_path)]) == 0
        out_dir = tmp_path / "out"
        rates = (out_dir / "rates.csv").read_text().splitlines()
        assert rates[0] == "family,k,n,W_k_kplus1,C_rate"
        assert (out_dir / "manifest.json").exists()

    def test_gamma_zero_rejected_naming_field(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        write_config(cfg_path, gamma=0.0)
        assert main(["run", str(cfg_path)]) == 2
        assert "gamma" in capsys.readouterr().err

    def test_theta_two_rejected(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        write_config(cfg_path, theta=2)
        assert main(["run", str(cfg_path)]) == 2
        assert "theta" in capsys.readouterr().err

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        write_config(cfg_path, viscosity=0.5)
        assert main(["run", str(cfg_path)]) == 2
        assert "viscosity" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text("{not json")
        assert main(["run", str(cfg_path)]) == 2

    def test_emitted_clouds_feed_the_distance_command(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        write_config(cfg_path)
        assert main(["run", str(cfg_path)]) == 0
        capsys.readouterr()
        a = tmp_path / "out" / "cloud_final_k1.csv"
        b = tmp_path / "out" / "cloud_final_k2.csv"
        assert main(["distance", str(a), str(b)]) == 0
        printed = float(capsys.readouterr().out.split("=")[1].split()[0])
        assert printed > 0.0

    def test_manifest_round_trip_reproduces_outputs(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        write_config(cfg_path, output_dir=str(tmp_path / "out1"))
        assert main(["run", str(cfg_path)]) == 0
        manifest = tmp_path / "out1" / "manifest.json"
        assert main(["run", str(manifest), "--output-dir", str(tmp_path / "out2")]) == 0
        for name in ("rates.csv", "distances.csv", "snapshots_k1.csv", "snapshots_k3.csv"):
            a = (tmp_path / "out1" / name).read_bytes()
            b = (tmp_path / "out2" / name).read_bytes()
            assert a == b, name


class TestDistanceCommand:
    def test_file_vs_itself(self, tmp_path, capsys):
        cloud = tmp_path / "a.csv"
        write_cloud(cloud, [[0.1], [0.7], [0.3]], [0.2, 0.5, 0.3])
        assert main(["distance", str(cloud), str(cloud)]) == 0
        out = capsys.readouterr().out
        assert "W1 = 0" in out
        assert "CDF" in out

    def test_two_single_point_files(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_cloud(a, [[0.0]], [1.0])
        write_cloud(b, [[1.0]], [1.0])
        assert main(["distance", str(a), str(b)]) == 0
        assert "W1 = 1 " in capsys.readouterr().out

    def test_matches_library_solver(self, tmp_path, capsys, rng):
        from sphwass import DiscreteMeasure, w1_1d_discrete

        pts_a, w_a = rng.random((7, 1)), rng.random(7) + 0.1
        pts_b, w_b = rng.random((5, 1)), rng.random(5) + 0.1
        w_a, w_b = w_a / w_a.sum(), w_b / w_b.sum()
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_cloud(a, pts_a, w_a)
        write_cloud(b, pts_b, w_b)
        assert main(["distance", str(a), str(b)]) == 0
        printed = float(capsys.readouterr().out.split("=")[1].split()[0])
        expected = w1_1d_discrete(
            DiscreteMeasure(pts_a, w_a), DiscreteMeasure(pts_b, w_b)
        )
        assert printed == pytest.approx(expected, abs=1e-15)

    def test_dimension_mismatch_exits_2(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_cloud(a, [[0.0]], [1.0])
        write_cloud(b, [[1.0, 1.0]], [1.0])
        assert main(["distance", str(a), str(b)]) == 2
        assert "dimension" in capsys.readouterr().err

    def test_lp_solver_on_2d_clouds(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_cloud(a, [[0.0, 0.0]], [1.0])
        write_cloud(b, [[3.0, 4.0]], [1.0])
        assert main(["distance", str(a), str(b)]) == 0
        out = capsys.readouterr().out
        assert "W1 = 5 " in out
        assert "LP" in out

    def test_full_precision_output(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_cloud(a, [[1.0 / 3.0]], [1.0])
        write_cloud(b, [[0.0]], [1.0])
        assert main(["distance", str(a), str(b)]) == 0
        printed = capsys.readouterr().out.split("=")[1].split()[0]
        assert float(printed) == 1.0 / 3.0


class TestVerifyCommand:
    def test_fresh_build_passes(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 4
        assert "FAIL" not in out

    def test_injected_gradient_asymmetry_fails_momentum_check(self, monkeypatch, capsys):
        # mutation harness: flip the sign of grad W for half of the pair
        # evaluations, destroying the pairwise antisymmetry
        from sphwass.kernels import WendlandCubic2D

        original = WendlandCubic2D.grad_scale_from_sq

        def corrupted(self, r2, w=None):
            g = original(self, r2, w)
            g = np.atleast_2d(np.asarray(g, dtype=float).copy())
            g[:, ::2] *= -1.0
            return g

        monkeypatch.setattr(WendlandCubic2D, "grad_scale_from_sq", corrupted)
        assert main(["verify"]) == 1
        out = capsys.readouterr().out
        momentum_line = [l for l in out.splitlines() if "momentum" in l][0]
        assert "FAIL" in momentum_line

    def test_checks_are_fast(self):
        import time

        t0 = time.time()
        checks = run_verification_checks()
        assert time.time() - t0 <= 60.0
        assert all(ok for _, ok, _ in checks)


class TestProfileCommand:
    def test_1d_profile_csv(self, tmp_path, capsys):
        cloud = tmp_path / "a.csv"
        write_cloud(cloud, [[0.0]], [1.0])
        out_file = tmp_path / "prof.csv"
        code = main(
            ["profile", str(cloud), "--kernel", "gaussian1d", "--h", "1.0",
             "--grid", "0:1:3", "--out", str(out_file)]
        )
        assert code == 0
        rows = out_file.read_text().splitlines()
        assert rows[0] == "x0,rho"
        first = rows[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == pytest.approx(1.0 / np.sqrt(np.pi), rel=1e-12)

    def test_2d_profile_grid_size(self, tmp_path, capsys):
        cloud = tmp_path / "a.csv"
        write_cloud(cloud, [[0.5, 0.5]], [1.0])
        assert main(
            ["profile", str(cloud), "--kernel", "wendland2d", "--h", "1.0",
             "--grid", "0:1:5"]
        ) == 0
        rows = capsys.readouterr().out.splitlines()
        assert rows[0] == "x0,x1,rho"
        assert len(rows) == 1 + 25

    def test_bad_grid_spec(self, tmp_path, capsys):
        cloud = tmp_path / "a.csv"
        write_cloud(cloud, [[0.0]], [1.0])
        assert main(
            ["profile", str(cloud), "--kernel", "gaussian1d", "--h", "1.0",
             "--grid", "nope"]
        ) == 2
