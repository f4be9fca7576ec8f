import subprocess
import sys

import numpy as np
import pytest

from ptu.cli import main
from ptu.core import read_matrix_csv, write_matrix_csv


def run(*argv):
    return main([str(a) for a in argv])


def manifest(path):
    return dict(line.split("=", 1) for line in path.read_text().splitlines())


@pytest.fixture
def flat_files(tmp_path):
    pts, truth = tmp_path / "pts.csv", tmp_path / "truth.csv"
    assert run("generate", "flat", "--n", 300, "--seed", 2, "--lift", 6, "--out", pts, "--truth", truth) == 0
    return tmp_path, pts, truth


def test_embed_flat_patch_is_exact(flat_files, capsys):
    tmp, pts, truth = flat_files
    emb = tmp / "emb.csv"
    assert run("embed", "--method", "ptu", "--k", 10, "--K", 10, "--d", 2, "-i", pts, "-o", emb) == 0
    assert read_matrix_csv(emb).shape == (300, 2)
    assert read_matrix_csv(tmp / "emb.eigenvalues.csv").shape == (2, 1)
    m = manifest(tmp / "emb.manifest.txt")
    assert m["stages"] == "graph,frames,connection,geodesics,mds"
    for key in ("method", "k", "K", "d", "landmarks", "seed", "rescale", "time_mds"):
        assert key in m
    capsys.readouterr()
    assert run("evaluate", "--embedding", emb, "--truth", truth) == 0
    report = dict(line.split("=") for line in capsys.readouterr().out.splitlines())
    assert float(report["distortion_max_rel_error"]) <= 1e-6


def test_isomap_manifest_has_no_ptu_stages(flat_files):
    tmp, pts, _ = flat_files
    assert run("embed", "--method", "isomap", "--k", 10, "-i", pts, "-o", tmp / "iso.csv") == 0
    m = manifest(tmp / "iso.manifest.txt")
    assert m["stages"] == "graph,geodesics,mds"
    assert "time_frames" not in m and "time_connection" not in m


def test_embed_outputs_are_byte_identical(flat_files):
    tmp, pts, _ = flat_files
    args = ["embed", "--k", 10, "--landmarks", 12, "--seed", 5, "-i", pts]
    assert run(*args, "-o", tmp / "a.csv") == 0
    assert run(*args, "-o", tmp / "b.csv") == 0
    for suffix in (".csv", ".eigenvalues.csv"):
        assert (tmp / f"a{suffix}").read_bytes() == (tmp / f"b{suffix}").read_bytes()
    ma, mb = manifest(tmp / "a.manifest.txt"), manifest(tmp / "b.manifest.txt")
    strip = lambda m: {k: v for k, v in m.items() if not k.startswith("time_") and k not in ("output", "eigenvalues")}
    assert strip(ma) == strip(mb)


def test_geodesics_matrix(flat_files):
    tmp, pts, _ = flat_files
    out, hops = tmp / "geo.csv", tmp / "hops.csv"
    assert run("geodesics", "--k", 10, "-i", pts, "-o", out, "--hops", hops) == 0
    D = read_matrix_csv(out)
    assert np.all(np.diag(D) == 0)
    assert np.array_equal(D, D.T)
    P = read_matrix_csv(pts)
    E = np.linalg.norm(P[:, None] - P[None], axis=-1)
    np.testing.assert_allclose(D, E, rtol=1e-8, atol=1e-12)
    assert read_matrix_csv(hops).shape == D.shape


def test_cap_geodesics_feed_evaluate(tmp_path, capsys):
    pts, ref = tmp_path / "cap.csv", tmp_path / "ref.csv"
    assert run("generate", "cap", "--n", 300, "--out", pts, "--distances", ref) == 0
    for method in ("ptu", "isomap"):
        assert run("geodesics", "--method", method, "--k", 8, "-i", pts, "-o", tmp_path / f"{method}.csv") == 0
    errs = {}
    for method in ("ptu", "isomap"):
        capsys.readouterr()
        assert run("evaluate", "--geodesics", tmp_path / f"{method}.csv", "--truth-distances", ref) == 0
        out = dict(l.split("=") for l in capsys.readouterr().out.splitlines())
        errs[method] = float(out["geodesic_mean_rel_error"])
    assert errs["ptu"] < errs["isomap"]


def test_generate_deterministic_and_truth(tmp_path):
    for name in ("petals", "swissroll", "flat"):
        a, b, t = tmp_path / f"{name}a.csv", tmp_path / f"{name}b.csv", tmp_path / f"{name}t.csv"
        assert run("generate", name, "--n", 200, "--seed", 4, "--out", a, "--truth", t) == 0
        assert run("generate", name, "--n", 200, "--seed", 4, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()
        assert read_matrix_csv(t).shape == (200, 2)


def test_generate_noise_specs(tmp_path):
    out = tmp_path / "x.csv"
    assert run("generate", "swissroll", "--n", 100, "--noise", "gaussian:0.02", "--out", out) == 0
    assert run("generate", "swissroll", "--n", 100, "--noise", "sparse:0.1,0.05,0.001", "--out", out) == 0
    assert run("generate", "petals", "--n", 100, "--noise", "0.03", "--out", out) == 0
    assert run("generate", "swissroll", "--n", 100, "--noise", "laplace:1", "--out", out) == 2
    assert run("generate", "petals", "--n", 100, "--noise", "lots", "--out", out) == 2
    assert run("generate", "sshape", "--n", 100, "--hole", "a,b", "--out", out) == 2
    assert run("generate", "landscape", "--n", 100, "--out", out, "--truth", tmp_path / "t.csv") == 2


def test_unknown_generator_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("generate", "klein", "--out", tmp_path / "x.csv")
    assert exc.value.code == 2


def test_evaluate_self_is_zero(tmp_path, capsys):
    z = np.random.default_rng(0).standard_normal((50, 2))
    write_matrix_csv(z, tmp_path / "z.csv")
    pp = tmp_path / "pp.csv"
    assert run("evaluate", "--embedding", tmp_path / "z.csv", "--truth", tmp_path / "z.csv", "--per-point", pp) == 0
    out = dict(l.split("=") for l in capsys.readouterr().out.splitlines())
    assert float(out["distortion_max_rel_error"]) <= 1e-14
    assert read_matrix_csv(pp).shape == (50, 1)


def test_evaluate_missing_truth(tmp_path):
    write_matrix_csv(np.eye(3), tmp_path / "z.csv")
    assert run("evaluate", "--embedding", tmp_path / "z.csv") == 2


def test_report_keys_stable(tmp_path):
    z = np.random.default_rng(1).standard_normal((30, 2))
    write_matrix_csv(z, tmp_path / "z.csv")
    reports = []
    for name in ("r1.txt", "r2.txt"):
        assert run("evaluate", "--embedding", tmp_path / "z.csv", "--truth", tmp_path / "z.csv",
                   "--report", tmp_path / name) == 0
        reports.append((tmp_path / name).read_text())
    assert reports[0] == reports[1]
    keys = [l.split("=")[0] for l in reports[0].splitlines()]
    assert keys == ["n", "d", "distortion_mean_rel_error", "distortion_median_rel_error",
                    "distortion_max_rel_error", "distortion_min_rel_error", "distortion_count"]


def test_runtime_failure_exit_code(tmp_path, capsys):
    r = np.random.default_rng(2)
    X = np.vstack([r.standard_normal((20, 3)), 100 + r.standard_normal((20, 3))])
    write_matrix_csv(X, tmp_path / "two.csv")
    assert run("embed", "--k", 3, "-i", tmp_path / "two.csv", "-o", tmp_path / "e.csv") == 1
    assert "error [graph]" in capsys.readouterr().err


def test_bad_parameters_exit_code(flat_files):
    tmp, pts, _ = flat_files
    assert run("embed", "--d", 2, "--K", 1, "-i", pts, "-o", tmp / "e.csv") == 2
    assert run("geodesics", "--landmarks", 5, "-i", pts, "-o", tmp / "g.csv") == 2


def test_missing_input_file(tmp_path, capsys):
    assert run("embed", "-i", tmp_path / "nope.csv", "-o", tmp_path / "e.csv") == 1
    assert "error [io]" in capsys.readouterr().err


def test_console_entry_point(tmp_path):
    out = tmp_path / "p.csv"
    proc = subprocess.run([sys.executable, "-m", "ptu.cli", "generate", "petals", "--n", "50", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert read_matrix_csv(out).shape == (50, 3)
