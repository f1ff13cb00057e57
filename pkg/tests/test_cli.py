import json
import subprocess
import sys

import pytest

from farmtwin import ledger as ledger_io
from farmtwin.cli import main


@pytest.fixture
def s1_ledger(tmp_path, s1):
    path = tmp_path / "s1.json"
    ledger_io.save(s1.ledger(), path)
    return path


@pytest.fixture
def small_run(tmp_path):
    cfg = tmp_path / "scenario.json"
    out = tmp_path / "ledger.json"
    assert main(["gen-farm", "--rows", "6", "--cols", "6", "--seed", "4", "--duration", "60", "--out", str(cfg)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    return out


def test_gen_farm_and_run(small_run, capsys):
    assert small_run.exists()
    led = ledger_io.load(small_run)
    assert led.decisions


def test_replay_is_stable(small_run, capsys):
    capsys.readouterr()
    main(["replay", "--ledger", str(small_run), "--all"])
    first = capsys.readouterr().out
    main(["replay", "--ledger", str(small_run), "--all"])
    assert capsys.readouterr().out == first
    assert "Decision 1 @" in first


def test_replay_one(s1_ledger, capsys):
    assert main(["replay", "--ledger", str(s1_ledger), "--decision", "1"]) == 0
    out = capsys.readouterr().out
    assert "outcome: dispatched -> drone 1" in out
    assert "battery_below_threshold" in out


def test_ask_stub(s1_ledger, capsys, monkeypatch):
    for var in ("EXPLAIN_LLM_ENDPOINT", "EXPLAIN_LLM_MODEL", "EXPLAIN_LLM_API_KEY"):
        monkeypatch.delenv(var, raising=False)
    code = main(
        ["ask", "--ledger", str(s1_ledger), "--decision", "1", "--question", "Why was Drone 1 chosen instead of Drone 2?",
         "--backend", "stub"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "battery threshold T_b = 20" in out
    assert "grounding: ok" in out


def test_ask_json(s1_ledger, capsys):
    assert main(["ask", "--ledger", str(s1_ledger), "--decision", "1", "--question", "Why?", "--k", "2", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["grounding"]["passed"] and len(doc["used_chunk_ids"]) == 2


def test_ask_unknown_decision(s1_ledger, capsys):
    assert main(["ask", "--ledger", str(s1_ledger), "--decision", "42", "--question", "?"]) == 2
    assert "decision not found" in capsys.readouterr().err


def test_ask_remote_without_config(s1_ledger, capsys, monkeypatch):
    for var in ("EXPLAIN_LLM_ENDPOINT", "EXPLAIN_LLM_MODEL", "EXPLAIN_LLM_API_KEY"):
        monkeypatch.delenv(var, raising=False)
    assert main(["ask", "--ledger", str(s1_ledger), "--decision", "1", "--question", "Why?", "--backend", "remote"]) == 3
    assert "backend error" in capsys.readouterr().err


def test_ask_remote_unreachable(s1_ledger, capsys, monkeypatch):
    monkeypatch.setenv("EXPLAIN_LLM_ENDPOINT", "http://127.0.0.1:9/v1/chat/completions")
    monkeypatch.setenv("EXPLAIN_LLM_MODEL", "m")
    monkeypatch.setenv("EXPLAIN_LLM_API_KEY", "k")
    code = main(["ask", "--ledger", str(s1_ledger), "--decision", "1", "--question", "Why?", "--backend", "remote",
                 "--timeout", "2"])
    assert code == 3


@pytest.mark.parametrize(
    "argv",
    [[], ["run", "--config", "x.json"], ["replay"], ["ask", "--ledger", "l.json"], ["bogus"],
     ["run", "--config", "a", "--out", "b", "--extra"]],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def test_io_errors(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"rows": 3, "wind": 2}')
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o.json")]) == 2
    assert main(["replay", "--ledger", str(bad)]) == 2


def test_empty_question_is_usage_error(s1_ledger):
    assert main(["ask", "--ledger", str(s1_ledger), "--decision", "1", "--question", " ?? "]) == 1


def test_module_entry_point(s1_ledger):
    proc = subprocess.run(
        [sys.executable, "-m", "farmtwin", "replay", "--ledger", str(s1_ledger)], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "Decision 1" in proc.stdout
