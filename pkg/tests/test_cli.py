import json
import subprocess
import sys

import pytest

from gtlimit import cli
from gtlimit.liealg import AlgebraKind, CacheError, build_irrep


def run_json(*argv):
    code, out = cli.run(list(argv))
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_patterns_count_c():
    code, rep = run_json("patterns", "--kind", "C", "--rank", "2", "--hw", "0,-1")
    assert code == 0 and rep["data"]["count"] == 4 and rep["version"] == "v1"


def test_patterns_count_b_trivial():
    code, rep = run_json("patterns", "--kind", "B", "--rank", "1", "--hw", "0")
    assert code == 0 and rep["data"]["count"] == 1


def test_patterns_csv():
    code, out = cli.run(["patterns", "--kind", "B", "--rank", "1", "--hw", "-1", "--format", "csv"])
    assert code == 0
    assert out.splitlines()[0] == "lambda_1,lambda'_1,sigma_1"
    assert len(out.splitlines()) == 4


def test_verify_theorem_a_sp2():
    code, rep = run_json("verify-theorem-a", "--kind", "C", "--rank", "1", "--hw", "-1")
    assert code == 0 and rep["status"] == "pass"
    assert rep["data"]["spectrum"] == [[-1, 6], [1, 6]]


def test_verify_yangian_single_module():
    code, rep = run_json("verify-yangian", "--twist", "plus", "--module", "1:0:2;1/2:-1/2", "--tail", "1/2",
                         "--depth", "4")
    assert code == 0 and all(c["status"] == "pass" for c in rep["checks"])


def test_poisson_rank_cap():
    code, _ = cli.run(["poisson", "--kind", "C", "--rank", "3"])
    assert code == 2


def test_poisson_sp4():
    code, rep = run_json("poisson", "--kind", "C", "--rank", "2")
    assert code == 0 and rep["data"]["shift_family"]["count"] == 6


def test_track_command():
    code, rep = run_json("track", "--kind", "C", "--rank", "2", "--hw", "0,-2", "--mu", "-1")
    assert code == 0 and len(rep["data"]["tracks"]) == 1


def test_label_command():
    code, rep = run_json("label", "--kind", "B", "--rank", "1", "--hw", "-1/2", "--stability")
    assert code == 0 and len(rep["data"]["labels"]) == 2


@pytest.mark.parametrize("argv", [
    ["patterns", "--kind", "C", "--rank", "2", "--hw", "0,1"],
    ["patterns", "--kind", "C", "--rank", "2"],
    ["patterns", "--kind", "X", "--rank", "2", "--hw", "0,-1"],
    ["no-such-command"],
    ["verify-yangian", "--module", "1:2:3:4"],
])
def test_usage_errors_exit_2(argv):
    assert cli.run(argv)[0] == 2


def test_verification_failure_exit_1(monkeypatch):
    monkeypatch.setattr(cli, "weyl_dimension", lambda kind, hw: -1)
    code, rep = run_json("patterns", "--kind", "C", "--rank", "1", "--hw", "-1")
    assert code == 1 and rep["status"] == "fail"
    assert rep["checks"][0]["identity"]


def test_reports_are_reproducible():
    argv = ["verify-theorem-a", "--kind", "B", "--rank", "1", "--hw", "-1"]
    a, b = run_json(*argv)[1], run_json(*argv)[1]
    a.pop("timing"), b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    code, out = cli.run(["patterns", "--kind", "C", "--rank", "1", "--hw", "-1", "--out", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["data"]["count"] == 2


def test_cache_roundtrip_sp2(tmp_path):
    rep = build_irrep(AlgebraKind("C", 1), (-1,))
    back = cli.cache_roundtrip(rep, tmp_path)
    assert cli.same_irrep(rep, back)


def test_cache_roundtrip_sp4_adjoint(tmp_path):
    rep = build_irrep(AlgebraKind("C", 2), (0, -2))
    back = cli.cache_roundtrip(rep, tmp_path)
    assert cli.same_irrep(rep, back)
    assert cli.cache_path(rep.kind, rep.hw, tmp_path).stat().st_size < 1_000_000


def test_cache_corruption_detected(tmp_path):
    rep = build_irrep(AlgebraKind("B", 1), (-1,))
    path = cli.save_irrep(rep, tmp_path)
    path.write_text(path.read_text()[:-20])
    with pytest.raises(CacheError):
        cli.load_irrep(path)


def test_cache_version_mismatch(tmp_path):
    rep = build_irrep(AlgebraKind("B", 1), (-1,))
    path = cli.save_irrep(rep, tmp_path)
    obj = json.loads(path.read_text())
    obj["version"] = "v0"
    path.write_text(json.dumps(obj))
    with pytest.raises(CacheError, match="version"):
        cli.load_irrep(path)
    code, _ = cli.run(["irrep", "--kind", "B", "--rank", "1", "--hw", "-1", "--cache-dir", str(tmp_path)])
    assert code == 2


def test_cache_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("GTLIMIT_CACHE", str(tmp_path / "here"))
    code, rep = run_json("irrep", "--kind", "C", "--rank", "2", "--hw", "-1,-1")
    assert code == 0 and rep["data"]["dim"] == 5
    assert (tmp_path / "here").is_dir() and list((tmp_path / "here").glob("C2_*.json"))
    # second call loads from the cache
    assert run_json("irrep", "--kind", "C", "--rank", "2", "--hw", "-1,-1")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gtlimit", "patterns", "--kind", "C", "--rank", "1",
                           "--hw", "-2", "--count-only"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["data"]["count"] == 3


def test_track_sector_survey():
    code, rep = run_json("track", "--kind", "C", "--rank", "2", "--hw=0,-2", "--mu=-1", "--sector")
    assert code == 0
    names = {c["name"]: c["status"] for c in rep["checks"]}
    assert names["simple spectrum on the real sector (sampled)"] == "pass"
    assert rep["data"]["sector"]["counterexamples"] == []


def test_theorem_a_spectrum_csv(tmp_path):
    out = tmp_path / "spec.csv"
    code, rep = run_json("verify-theorem-a", "--kind", "C", "--rank", "2", "--hw=0,-1", "--spectrum-csv", str(out))
    assert code == 0 and str(out) in rep["artifacts"]
    lines = out.read_text().splitlines()
    assert lines[0].startswith("line,") and len(lines) == 1 + 4
    assert len(lines[0].split(",")) == 1 + 2 * len(rep["data"]["spectrum"][0])


def test_track_step_log(tmp_path):
    log = tmp_path / "track.jsonl"
    code, rep = run_json("track", "--kind", "C", "--rank", "2", "--hw=0,-2", "--mu=-1", "--log", str(log))
    assert code == 0 and str(log) in rep["artifacts"]
    entries = [json.loads(line) for line in log.read_text().splitlines()]
    assert entries
    assert all({"t", "detours", "sigma"} <= set(e) for e in entries)
    assert all("eigenvalues" in e and "overlaps" in e for e in entries if "detour" not in e)


def test_yangian_check_anchors():
    code, rep = run_json("verify-yangian", "--twist", "minus", "--module", "1:0:1/3", "--depth", "4")
    assert code == 0
    anchors = {c["name"].split(",")[0]: c["identity"] for c in rep["checks"]}
    assert anchors["yangian relation"] == "sootnY(N)"
    assert anchors["symmetry relation"] == "scruch4"
    assert anchors["quaternary relation"] == "scruch3"
