import json

import pytest

from hepath.cli import create_parser, main, normalize_argv
from hepath.corelib.keystore import load_keypair
from hepath.corelib.geometry import Path
from hepath.utils import load_path, parse_coord_range, parse_hostport, save_path


def test_parser_run_alias():
    args = create_parser().parse_args(["run", "--role", "bob", "--listen", ":9000", "--path", "p.txt"])
    assert (args.command, args.role, args.listen) == ("run", "bob", ":9000")


def test_parser_bench_defaults(monkeypatch):
    monkeypatch.setenv("HEPATH_KEY_BITS", "1024")
    args = create_parser().parse_args(["bench", "--coord-range=-5:5"])
    assert args.trials == 30
    assert args.key_bits == 1024
    assert parse_coord_range(args.coord_range) == (-5, 5)


def test_parser_bench_negative_range_as_separate_token():
    args = create_parser().parse_args(normalize_argv(["bench", "--coord-range", "-99:99", "--trials", "2"]))
    assert parse_coord_range(args.coord_range) == (-99, 99)
    assert args.trials == 2


def test_normalize_argv_leaves_other_options():
    argv = ["bench", "--trials", "3", "--coord-range=-1:1", "--seed", "4"]
    assert normalize_argv(argv) == argv


def test_bench_command_negative_range(tmp_path):
    out = tmp_path / "bench.json"
    argv = ["bench", "--coord-range", "-5:5", "--trials", "1", "--key-bits", "1024", "--seed", "3", "--out", str(out)]
    assert main(argv) == 0
    config = json.loads(out.read_text())["config"]
    assert (config["coord_min"], config["coord_max"]) == (-5, 5)


def test_run_alias_requires_address(tmp_path):
    with pytest.raises(SystemExit):
        main(["run", "--role", "alice", "--path", str(tmp_path / "p.txt")])


def test_parse_hostport():
    assert parse_hostport("127.0.0.1:9000") == ("127.0.0.1", 9000)
    assert parse_hostport(":9000") == ("0.0.0.0", 9000)
    with pytest.raises(ValueError):
        parse_hostport("localhost")


def test_parse_coord_range_errors():
    with pytest.raises(ValueError):
        parse_coord_range("5")
    with pytest.raises(ValueError):
        parse_coord_range("5:1")


def test_load_path(tmp_path):
    f = tmp_path / "route.txt"
    f.write_text("# route\n0,0\n\n10, -5\n20,5\n")
    path = load_path(str(f))
    assert path.to_pairs() == [(0, 0), (10, -5), (20, 5)]
    assert path.segment_count == 2


@pytest.mark.parametrize(
    "content",
    ["", "# only a comment\n", "1.5,2\n", "a,b\n", "1,2,3\n", f"{1 << 32},0\n"],
)
def test_load_path_rejects_bad_files(tmp_path, content):
    f = tmp_path / "route.txt"
    f.write_text(content)
    with pytest.raises(ValueError):
        load_path(str(f))


def test_save_path_reloads(tmp_path):
    f = tmp_path / "out" / "route.txt"
    route = Path.from_pairs([(-99, 0), (0, 99), ((1 << 32) - 1, -5)])
    save_path(route, str(f))
    assert load_path(str(f)) == route


def test_load_path_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_path(str(tmp_path / "nope.txt"))


def test_bench_command(tmp_path, capsys):
    out = tmp_path / "bench.json"
    status = main(["bench", "--trials", "1", "--key-bits", "1024", "--seed", "9", "--out", str(out)])
    assert status == 0
    stdout = capsys.readouterr().out
    assert "trial=0" in stdout
    assert json.loads(out.read_text())["trials"][0]["trial"] == 0


def test_keygen_command(tmp_path, monkeypatch):
    monkeypatch.delenv("HEPATH_KEY_PASSPHRASE", raising=False)
    key_file = tmp_path / "bob.key"
    assert main(["keygen", "--key-bits", "1024", "--out", str(key_file)]) == 0
    pk, _ = load_keypair(str(key_file))
    assert pk.bits == 1024
    assert main(["keygen", "--key-bits", "1024", "--out", str(key_file), "--passphrase-env"]) == 1


def test_sim_command(tmp_path, capsys):
    scenario = {
        "flight": {"initiation_range": 50, "key_bits": 1024},
        "drones": [
            {"id": "a", "speed": 5, "path": [[0, 0], [100, 100]]},
            {"id": "b", "speed": 5, "path": [[0, 100], [100, 0]]},
        ],
    }
    config = tmp_path / "scenario.json"
    config.write_text(json.dumps(scenario))
    trace = tmp_path / "trace.jsonl"
    assert main(["sim", "--config", str(config), "--out", str(trace), "--seed", "1"]) == 0
    rows = [json.loads(line) for line in trace.read_text().splitlines()]
    assert {r["drone_id"] for r in rows} == {"a", "b"}
    assert any(r["altitude"] == 120 for r in rows if r["drone_id"] == "a")


def test_probe_command(tmp_path, capsys):
    config = tmp_path / "probe.json"
    config.write_text(json.dumps({"x_min": 0, "y_min": 0, "x_max": 50, "y_max": 50,
                                  "spacing": 25, "segment_length": 25, "key_bits": 1024}))
    route = tmp_path / "bob.txt"
    route.write_text("10,-5\n10,60\n")
    assert main(["probe", "--config", str(config), "--path", str(route), "--seed", "2"]) == 0
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert lines[0]["record"] == "summary"
    assert [(r["band"], r["column"]) for r in lines[1:]] == [(0, 0), (1, 0)]


def test_command_error_returns_nonzero(tmp_path, capsys):
    status = main(["probe", "--config", str(tmp_path / "missing.json"), "--path", "x.txt"])
    assert status == 1
    assert "❌" in capsys.readouterr().err
