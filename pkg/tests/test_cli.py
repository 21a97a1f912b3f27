import json
import subprocess
import sys

import pytest

from dbcs.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records))
    return str(path)


TWO = [{"unit": 0, "t": 1, "w": 1, "y": 1.0, "p1": 0.5}, {"unit": 1, "t": 2, "w": 0, "y": 1.0, "p1": 0.5}]


def test_stream_two_lines(tmp_path, capsys):
    code, out, _ = run(["stream", write(tmp_path / "s.jsonl", TWO)], capsys)
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "step,t,center,half_width,lower,upper,decision"
    assert lines[1].split(",")[2] == "2" and lines[2].split(",")[2] == "0"
    assert lines[1].split(",")[3] == "6.40177046"


def test_stream_positivity(tmp_path, capsys):
    bad = [dict(TWO[0], p1=1.0)]
    code, _, err = run(["stream", write(tmp_path / "s.jsonl", bad)], capsys)
    assert code == 1 and "positivity" in err and "line 1" in err


def test_stream_malformed_line_number(tmp_path, capsys):
    p = tmp_path / "s.jsonl"
    p.write_text(json.dumps(TWO[0]) + "\n{not json\n")
    code, _, err = run(["stream", str(p)], capsys)
    assert code == 1 and "line 2" in err


def test_stream_strict_unknown_key(tmp_path, capsys):
    path = write(tmp_path / "s.jsonl", [dict(TWO[0], extra=1)])
    code, _, err = run(["stream", path], capsys)
    assert code == 0 and "warning" in err
    code, _, err = run(["stream", "--strict", path], capsys)
    assert code == 1 and "unknown keys" in err


def test_stream_stop_exit_code(tmp_path, capsys):
    recs = [{"unit": t, "t": t, "w": t % 2, "y": 1.0 if t % 2 == 0 else 0.0, "p1": 0.5} for t in range(1, 400)]
    code, out, _ = run(["stream", write(tmp_path / "s.jsonl", recs), "--rule", "null-exclusion"], capsys)
    assert code == 3
    assert out.strip().splitlines()[-1].endswith("stop_reject_null")


def test_usage_errors(tmp_path, capsys):
    path = write(tmp_path / "s.jsonl", TWO)
    assert run(["stream", path, "--rule", "futility"], capsys)[0] == 2
    assert run(["stream", path, "--boundary", "exact"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["stream", path, "--alpha", "1.5"])
    assert exc.value.code == 2
    assert run(["simulate", "--kind", "binary_signup", "--param", "bogus=1"], capsys)[0] == 2


def test_simulate_byte_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        o, t = tmp_path / f"o{i}.jsonl", tmp_path / f"t{i}.csv"
        assert run(["simulate", "--kind", "binary_signup", "--seed", "7", "--out", str(o), "--truth-out", str(t)], capsys)[0] == 0
        outs.append((o.read_bytes(), t.read_bytes()))
    assert outs[0] == outs[1]
    assert len(outs[0][0].splitlines()) == 500


def test_snapshot_resume_equivalence(tmp_path, capsys):
    sim = tmp_path / "p.jsonl"
    run(["simulate", "--kind", "panel_linear", "--seed", "3", "--horizon", "60", "--proxy-model", "ols", "--out", str(sim)], capsys)
    lines = sim.read_text().splitlines()
    cut = next(i for i, l in enumerate(lines) if json.loads(l)["t"] == 31)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    a.write_text("\n".join(lines[:cut]) + "\n")
    b.write_text("\n".join(lines[cut:]) + "\n")
    flags = ["--design", "panel", "--proxy"]
    _, full, _ = run(["stream", str(sim)] + flags, capsys)
    snap = tmp_path / "snap.json"
    _, first, _ = run(["stream", str(a), "--snapshot-out", str(snap)] + flags, capsys)
    _, rest, _ = run(["stream", str(b), "--snapshot-in", str(snap)] + flags, capsys)
    head = full.splitlines()[0]
    assert full.splitlines() == first.splitlines() + rest.splitlines()[1:]
    assert rest.splitlines()[0] == head
    code, _, err = run(["stream", str(b), "--snapshot-in", str(snap), "--design", "panel"], capsys)
    assert code == 1 and "proxy" in err


def test_every_downsamples_output_only(tmp_path, capsys):
    recs = [{"unit": t, "t": t, "w": t % 2, "y": 0.3, "p1": 0.5} for t in range(1, 21)]
    path = write(tmp_path / "s.jsonl", recs)
    _, full, _ = run(["stream", path], capsys)
    _, thin, _ = run(["stream", path, "--every", "5"], capsys)
    rows = full.splitlines()
    assert thin.splitlines() == [rows[0]] + [rows[i] for i in (5, 10, 15, 20)]


def test_tune_eta(capsys):
    code, out, _ = run(["tune-eta", "0.05", "10"], capsys)
    assert code == 0 and abs(float(out) - 0.77) <= 0.005
    code, out, _ = run(["tune-eta", "0.05", "10", "--exact"], capsys)
    assert abs(float(out) - 0.906199099) < 1e-9


def test_eval_table2_csv(capsys):
    code, out, _ = run(["eval", "--scenario", "table2", "--reps", "200"], capsys)
    assert code == 0
    rows = [l.split(",") for l in out.strip().splitlines()[1:]]
    have = {(r[1], r[2]) for r in rows}
    for m in ("ci", "hybrid", "cs"):
        for metric in ("coverage", "stop", "width", "power"):
            assert (m, metric) in have
    assert main(["eval", "--scenario", "table2", "--reps", "200"]) == 0
    again, _ = capsys.readouterr()
    assert again == out


def test_signup_replay_detects_negative_effect(tmp_path, capsys):
    hits = 0
    for seed in range(20):
        sim = tmp_path / f"e{seed}.jsonl"
        run(["simulate", "--kind", "binary_signup", "--seed", str(seed), "--horizon", "2000", "--out", str(sim)], capsys)
        code, out, _ = run(["stream", str(sim), "--rule", "null-exclusion"], capsys)
        if code == 3:
            last = out.strip().splitlines()[-1].split(",")
            assert float(last[5]) < 0.0
            hits += 1
    assert hits >= 15


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "dbcs.cli", "tune-eta", "0.05"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.769861873"
