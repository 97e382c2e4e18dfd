import json

import pytest

from bergdbar.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_example(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "standard:n=2,gamma=1", "--mmax", "1")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["eigenvalues"] == pytest.approx([1, 1, 2, 2, 2, 4], abs=1e-12)


def test_solve_example(capsys, tmp_path):
    eta = tmp_path / "const-dz1.json"
    eta.write_text(json.dumps([{"J": [0, 0], "k": 1, "re": 1.0, "im": 0.0}]))
    code, out, _ = run(capsys, "solve", "--model", "standard:n=2,gamma=1", "--eta", str(eta))
    assert code == 0
    assert json.loads(out)["norm_ratio"] == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--model", "hyperbolic:n=2,alpha=1.5", "--mmax", "4"],
        ["spectrum", "--model", "standard:n=3,gamma=1", "--mmax", "3", "--emit", "csv"],
        ["norms", "--model", "standard:n=2,gamma=1.5", "--max-degree", "3"],
        ["block", "--model", "hyperbolic:n=2,alpha=1", "--degree", "2"],
        ["geometry", "--profile", "standard:n=2,gamma=1", "--epsilon", "0.1", "--sigma", "2"],
    ],
)
def test_output_is_deterministic(capsys, argv):
    first = run(capsys, *argv, "--workers", "1")
    second = run(capsys, *argv, "--workers", "4")
    assert first[0] == 0 and first[1] == second[1]
    assert "schema" in first[1]


def test_emit_to_file(capsys, tmp_path):
    target = tmp_path / "matrix.json"
    code, out, _ = run(capsys, "block", "--model", "standard:n=2,gamma=1", "--degree", "1", "--emit", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text(encoding="utf-8"))
    assert data["basis"][0] == [[1, 0], 1]
    assert data["matrix"][1][2] == pytest.approx(-1.0)


@pytest.mark.parametrize(
    "argv,code",
    [
        (["frobnicate"], 1),
        (["spectrum", "--model", "standard:n=2,gamma=1", "--bogus"], 1),
        (["spectrum", "--model", "standard:n=2,gamma=0"], 1),
        (["spectrum", "--model", "standard:n=2,gamma=1", "--workers", "0"], 1),
        (["solve", "--model", "standard:n=2,gamma=1", "--eta", "/nonexistent/eta.json"], 3),
        (["spectrum", "--model", "cigar:alpha=5", "--emit", "/nonexistent/dir/out.json"], 3),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err.startswith("bergdbar:")


def test_parse_error_names_the_hypothesis(capsys):
    _, _, err = run(capsys, "spectrum", "--model", "standard:n=2,gamma=0")
    assert "gamma > 0 required" in err


def test_non_closed_eta_is_a_domain_error(capsys, tmp_path):
    eta = tmp_path / "eta.json"
    eta.write_text(json.dumps([{"J": [1, 0], "k": 2, "re": 1.0, "im": 0.0}]))
    code, _, err = run(capsys, "solve", "--model", "standard:n=2,gamma=1", "--eta", str(eta))
    assert code == 1 and "d(eta) != 0" in err


def test_accuracy_errors_map_to_two(capsys, monkeypatch):
    from bergdbar import cli
    from bergdbar.errors import AccuracyError

    def boom(*a, **k):
        raise AccuracyError("did not converge")

    monkeypatch.setattr(cli, "spectrum", boom)
    code, _, err = run(capsys, "spectrum", "--model", "segal-bargmann:n=1")
    assert code == 2 and "accuracy" in err


def test_norms_csv_columns(capsys):
    code, out, _ = run(capsys, "norms", "--model", "hyperbolic:n=1,alpha=2", "--max-degree", "2")
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "model,p,J,k,closed_form,quadrature,rel_diff,duality_residual"
    assert len(lines) == 4


def test_user_profile(capsys):
    code, out, _ = run(capsys, "geometry", "--profile", "kahler:h=-log(1-r),psi=2/(1-r),R=1", "--n", "2",
                       "--epsilon", "0")
    data = json.loads(out)
    assert code == 0 and data["holomorphicity_constant"] == pytest.approx(2.0)
    assert min(data["curvature_verdicts"]) == pytest.approx(-1.0, abs=1e-9)
