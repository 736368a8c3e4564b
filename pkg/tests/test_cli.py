"""Command surface: descriptors, cache manifest discipline, exit codes."""

import json

import pytest

from extforge import cli


def run(argv, capsys=None):
    code = cli.main(argv)
    if capsys is None:
        return code, "", ""
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ----- descriptor grammar -----


def test_parse_atoms():
    plan = cli.parse_descriptor("f2")
    assert plan.cell is None and plan.factors == (cli.Factor("f2", None, 0),)
    plan = cli.parse_descriptor("bo:3")
    assert plan.factors == (cli.Factor("bo", 3, 0),)
    plan = cli.parse_descriptor("h8v18")
    assert plan.cell == "h8v18" and plan.factors == ()


def test_parse_tensor_and_suspension():
    plan = cli.parse_descriptor("bo:1 ⊗ h8v18")
    assert plan.cell == "h8v18"
    assert plan.factors == (cli.Factor("bo", 1, 0),)
    plan = cli.parse_descriptor("s^8 bo:2 * tmfbg:1")
    assert plan.factors == (cli.Factor("bo", 2, 8), cli.Factor("tmfbg", 1, 0))


def test_parse_rejects_garbage():
    for bad in ("", "nope", "bo:x", "bo:-1", "h8 ⊗ h8v18", "s^2 h8", "s^ bo:1"):
        with pytest.raises(cli.UsageError):
            cli.parse_descriptor(bad)


def test_slug_is_filesystem_safe():
    assert cli.parse_descriptor("bo:1 ⊗ h8v18").slug == "bo-1-h8v18"


# ----- cache store -----


def test_resolve_cache_hit_and_corruption(tmp_path, capsys):
    code, out, _ = run(
        ["resolve", "--algebra", "A1", "--max-s", "5", "--max-t", "12", "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0 and "computed and cached" in out
    code, out, _ = run(
        ["resolve", "--algebra", "A1", "--max-s", "5", "--max-t", "12", "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0 and "cache hit" in out

    payload = tmp_path / "res-A1-s5-t12.json.gz"
    payload.write_bytes(payload.read_bytes() + b"x")
    code, out, err = run(
        ["resolve", "--algebra", "A1", "--max-s", "5", "--max-t", "12", "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 1 and "corrupt cache entry" in err and "--force" in err

    code, out, _ = run(
        ["resolve", "--algebra", "A1", "--max-s", "5", "--max-t", "12", "--cache-dir", str(tmp_path), "--force"],
        capsys,
    )
    assert code == 0 and "computed and cached" in out


def test_manifest_contents(tmp_path):
    cli.main(["resolve", "--algebra", "A1", "--max-s", "4", "--max-t", "10", "--cache-dir", str(tmp_path)])
    doc = json.loads((tmp_path / "res-A1-s4-t10.manifest.json").read_text())
    manifest = cli.CacheManifest.from_json_dict(doc)
    assert manifest.format_version == cli.MANIFEST_FORMAT
    assert manifest.algebra == "A[2, 1]"
    assert manifest.exponents == [2, 1]
    assert (manifest.max_s, manifest.max_t) == (4, 10)
    assert list(manifest.content_hashes) == ["res-A1-s4-t10.json.gz"]
    assert manifest.producer


def test_cache_dir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.CACHE_ENV_VAR, str(tmp_path / "envcache"))
    code, out, _ = run(["resolve", "--algebra", "A1", "--max-s", "3", "--max-t", "8"], capsys)
    assert code == 0
    assert (tmp_path / "envcache" / "res-A1-s3-t8.json.gz").exists()


# ----- ext command -----


def test_ext_writes_tsv_and_png(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code, out, _ = run(
        [
            "ext", "f2", "--algebra", "A1", "--max-s", "6", "--max-stem", "12",
            "--cache-dir", str(tmp_path), "--out", str(out_dir),
        ],
        capsys,
    )
    assert code == 0
    tsv = out_dir / "ext-f2-A1-s6-t18.tsv"
    assert tsv.exists()
    assert (out_dir / "ext-f2-A1-s6-t18.png").exists()
    assert tsv.read_text().startswith("stem\tfiltration\tdim\tlabels\n")


def test_ext_svg_and_json_formats(tmp_path, capsys):
    args = [
        "ext", "f2", "--algebra", "A1", "--max-s", "5", "--max-stem", "10",
        "--cache-dir", str(tmp_path), "--out", str(tmp_path), "--no-png",
    ]
    assert run(args + ["--format", "svg"], capsys)[0] == 0
    assert run(args + ["--format", "json"], capsys)[0] == 0
    svg = (tmp_path / "ext-f2-A1-s5-t15.svg").read_text()
    assert svg.startswith("<?xml")
    doc = json.loads((tmp_path / "ext-f2-A1-s5-t15.json").read_text())
    assert doc["coefficients"] == "F2" and doc["dims"]


def test_ext_window_filter(tmp_path, capsys):
    code, out, _ = run(
        [
            "ext", "f2", "--algebra", "A1", "--max-s", "6", "--max-stem", "12",
            "--window", "3..9", "--cache-dir", str(tmp_path), "--out", str(tmp_path),
            "--no-png",
        ],
        capsys,
    )
    assert code == 0
    rows = (tmp_path / "ext-f2-A1-s6-t18-w3-9.tsv").read_text().splitlines()[1:]
    stems = [int(r.split("\t")[0]) for r in rows]
    assert stems and all(3 <= v <= 9 for v in stems)


def test_ext_window_beyond_bound_is_usage_error(tmp_path, capsys):
    code, _, err = run(
        [
            "ext", "f2", "--algebra", "A1", "--max-s", "4", "--max-stem", "8",
            "--window", "0..20", "--cache-dir", str(tmp_path),
        ],
        capsys,
    )
    assert code == 2 and "exceeds" in err


def test_ext_jobs_identical_output(tmp_path, capsys):
    base = [
        "ext", "bo:1 * bo:1", "--algebra", "A1", "--max-s", "5", "--max-stem", "10",
        "--cache-dir", str(tmp_path), "--no-png",
    ]
    assert run(base + ["--out", str(tmp_path / "j1"), "--jobs", "1"], capsys)[0] == 0
    assert run(base + ["--out", str(tmp_path / "j4"), "--jobs", "4"], capsys)[0] == 0
    name = "ext-bo-1-bo-1-A1-s5-t15.tsv"
    assert (tmp_path / "j1" / name).read_text() == (tmp_path / "j4" / name).read_text()


# ----- bgpoly command -----


def test_bgpoly_output(capsys):
    code, out, _ = run(["bgpoly", "2"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "f_2 = t x + s t^2"
    code, out, _ = run(["bgpoly", "3"], capsys)
    assert out.splitlines()[0] == "f_3 = t x^2"
    code, out, _ = run(["bgpoly", "1,1"], capsys)
    assert out.splitlines()[0] == "f_{1,1} = x^2"
    assert "summand" in out


def test_bgpoly_bad_index(capsys):
    code, _, err = run(["bgpoly", "two"], capsys)
    assert code == 2 and "error:" in err


# ----- verify command -----


def test_verify_fast_suites(capsys):
    for suite in ("bg-lemma", "splitting", "bo-sequences"):
        code, out, _ = run(["verify", suite], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert all(ln.startswith("ok\t") for ln in lines)
        assert lines[-1].startswith("ok\tsummary\t")


def test_verify_unknown_suite(capsys):
    code, _, err = run(["verify", "nonsense"], capsys)
    assert code == 2 and "unknown suite" in err


def test_verify_oracle_small_window(capsys):
    code, out, _ = run(
        ["verify", "oracle", "--suite-max-s", "3", "--suite-max-stem", "6"], capsys
    )
    assert code == 0
    assert "oracle.A1.trivial" in out and "oracle.A2.bo1" in out
