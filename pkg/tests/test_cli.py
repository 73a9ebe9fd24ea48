import os
import subprocess
import sys

import pytest

from spreadlab.cli import main


def run(capsys, *argv):
    code = main([*argv, "--memory-gib", "0"])
    out = capsys.readouterr()
    return code, out.out, out.err


def fields(text):
    return dict(ln.split(" = ", 1) for ln in text.splitlines() if " = " in ln)


def test_spread_exact_s6(capsys):
    code, out, err = run(capsys, "spread", "exact", "atlas:S6")
    assert code == 0
    f = fields(out)
    assert f["s"] == "2" and f["u"] == "0" and f["order"] == "720"
    assert "wall_time" in err and "wall_time" not in out


def test_output_is_deterministic(capsys):
    a = run(capsys, "spread", "uniform", "atlas:A5")[1]
    b = run(capsys, "spread", "uniform", "atlas:A5")[1]
    assert a == b and fields(a)["u"] == "2"


def test_certify_jobs_do_not_change_output(capsys):
    argv = ["spread", "certify", "atlas:A6", "--class", "5", "-k", "2", "-N", "20", "--seed", "3"]
    c1, one, _ = run(capsys, *argv, "--jobs", "1")
    c8, eight, _ = run(capsys, *argv, "--jobs", "8")
    strip = lambda t: [ln for ln in t.splitlines() if not ln.startswith("config.jobs")]
    assert strip(one) == strip(eight)
    assert c1 == c8 == 1 and fields(one)["result"] == "failure"


def test_certify_then_replay(capsys, tmp_path):
    cert = tmp_path / "a5.cert"
    code, out, _ = run(capsys, "spread", "certify", "atlas:A5", "--auto-class", "-k", "2",
                       "-N", "20", "-o", str(cert))
    assert code == 0 and fields(out)["result"] == "success"
    code, out, _ = run(capsys, "spread", "replay", str(cert))
    assert code == 0 and fields(out)["replay"] == "verified"
    # a tampered certificate is rejected or unreadable
    text = cert.read_text()
    cert.write_text(text.replace("P=1/3", "P=1/7", 1))
    code, _, _ = run(capsys, "spread", "replay", str(cert))
    assert code in (1, 2)


def test_bad_input_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.grp"
    bad.write_text("perm-group degree 4\n(0 1 7\n")
    code, out, err = run(capsys, "classes", str(bad))
    assert code == 2 and out == ""
    assert "line 2" in err
    assert run(capsys, "classes", "zoo:nope")[0] == 2


def test_classes_and_report_file(capsys, tmp_path):
    path = tmp_path / "rep.txt"
    code, out, _ = run(capsys, "classes", "atlas:A5", "-o", str(path))
    assert code == 0 and path.read_text() == out
    assert fields(out)["classes"] == "5"


def test_seed_environment_variable(tmp_path):
    env = dict(os.environ, SPREADLAB_SEED="11")
    cmd = [sys.executable, "-m", "spreadlab.cli", "spread", "certify", "atlas:A5",
           "--auto-class", "-k", "2", "-N", "5"]
    a = subprocess.run(cmd, env=env, capture_output=True, text=True)
    assert a.returncode == 0
    assert fields(a.stdout)["config.seed"] == "11"
    b = subprocess.run(cmd + ["--seed", "4"], env=env, capture_output=True, text=True)
    assert fields(b.stdout)["config.seed"] == "4"


def test_figures_written(capsys, tmp_path):
    figs = tmp_path / "figs"
    code, out, _ = run(capsys, "spread", "uniform", "atlas:A5", "--figures", str(figs))
    assert code == 0
    pngs = sorted(p.name for p in figs.iterdir())
    assert pngs and all(n.endswith(".png") for n in pngs)
    data = (figs / pngs[0]).read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    run(capsys, "spread", "uniform", "atlas:A5", "--figures", str(figs))
    assert (figs / pngs[0]).read_bytes() == data


@pytest.mark.parametrize("argv", [
    ["fpr", "atlas:A5", "--subgroups", "tiny"],
    ["probbound", "atlas:A5", "--class", "4"],
    ["graph", "diameter", "atlas:A5"],
    ["coset-classes", "atlas:A6", "--theta", "(3 6)(4 7)(5 8)"],
    ["zoo", "build", "zoo:Sp4(2)"],
])
def test_other_commands_run(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.startswith("tool = spreadlab")


def test_replay_reads_gzip(capsys, tmp_path):
    import gzip

    cert = tmp_path / "a5.cert"
    run(capsys, "spread", "certify", "atlas:A5", "--auto-class", "-k", "2", "-N", "20",
        "-o", str(cert))
    gz = tmp_path / "a5.cert.gz"
    gz.write_bytes(gzip.compress(cert.read_bytes()))
    code, out, _ = run(capsys, "spread", "replay", str(gz))
    assert code == 0 and fields(out)["replay"] == "verified"
