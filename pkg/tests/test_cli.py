import json

import pytest

from diffauction import load_scenario
from diffauction.cli import CSV_COLUMNS, RunConfig, InputError, main
from diffauction.generators import line_graph


def cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_line5_idm(capsys):
    code, out, _ = cli(capsys, "run", "line5", "--output", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["winner"] == "1" and rec["revenue"] == "0"


def test_run_line5_vcg(capsys):
    code, out, _ = cli(capsys, "run", "line5", "--mechanism", "vcg", "--output", "json")
    assert json.loads(out)["revenue"] == "-4"


def test_run_fig2_pretty_and_dot(capsys, tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = cli(capsys, "run", "fig2", "--dot", str(dot))
    assert code == 0
    assert "winner:    I" in out
    assert "revenue:   10" in out
    line_c = next(l for l in out.splitlines() if l.startswith("C "))
    assert line_c.split()[3] == "-1" and "OnPath" in line_c
    assert '"D" -> "G";' in dot.read_text()


def test_run_csv(capsys):
    code, out, _ = cli(capsys, "run", "fig2", "--output", "csv", "--tie-break", "seeded", "--seed", "3")
    lines = out.strip().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert lines[1].split(",") == ["fig2", "idm", "I", "10", "12", "13", "3"]


def test_declared_infeasible_profile_warns(capsys, tmp_path):
    doc = {
        "schema_version": 1,
        "seller": 0,
        "agents": [
            {"id": 0, "neighbors": [1], "valuation": "0"},
            {"id": 1, "neighbors": [0, 2], "valuation": "1"},
            {"id": 2, "neighbors": [1], "valuation": "5"},
        ],
        "declared_profile": [
            {"id": 1, "bid": "1", "diffusion_set": []},
            {"id": 2, "bid": "5", "diffusion_set": [1]},
        ],
    }
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    code, out, err = cli(capsys, "run", str(path))
    assert code == 0
    assert "forced to null: 2" in err
    assert "winner:    1" in out


def test_compare(capsys):
    code, out, _ = cli(capsys, "compare", "line5", "--output", "json")
    assert code == 0
    revs = {o["mechanism"]: o["revenue"] for o in json.loads(out)["outcomes"]}
    assert revs == {"idm": "0", "vcg": "-4", "spl": "0"}
    code, out, _ = cli(capsys, "compare", "fig2", "--output", "json")
    idm = json.loads(out)["outcomes"][0]
    assert (idm["revenue"], idm["welfare"]) == ("10", "12")
    code, out, _ = cli(capsys, "compare", "single")
    assert code == 0 and "VIOLATION" not in out


@pytest.mark.parametrize(
    "argv",
    [
        ("run", "no-such-scenario"),
        ("run", "line5", "--mechanism", "dutch"),
        ("run", "line5", "--tie-break", "seeded"),
        ("verify", "ic", "--n-max", "9"),
        ("verify", "ic", "--grid", "a,b"),
    ],
)
def test_input_errors(capsys, argv):
    code, _, err = cli(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_run_config_seed_contract():
    with pytest.raises(InputError):
        RunConfig(tie_break="seeded")
    with pytest.raises(InputError):
        RunConfig(seed=3)
    assert RunConfig(tie_break="seeded", seed=1).rng() is not None


def test_verify_ic_small_sweep(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = cli(capsys, "verify", "ic", "--n-max", "4", "--grid", "0,1,2", "--processes", "1", "--json", str(report))
    assert code == 0
    assert "IC[idm]" in out and "FAIL" not in out
    doc = json.loads(report.read_text())
    assert doc["complete"] and all(r["holds"] for r in doc["reports"])


def test_verify_wbb_vcg_line5_is_expected(capsys):
    code, out, _ = cli(capsys, "verify", "wbb", "--mechanism", "vcg", "--scenario", "line5")
    assert code == 0
    assert "VIOLATED (expected)" in out
    assert "revenue -4" in out


def test_verify_scenario_ic_ir(capsys):
    code, out, _ = cli(capsys, "verify", "ic", "--scenario", "fig2", "--others-samples", "1")
    assert code == 0
    assert out.count("PASS") == 4


def test_verify_dominance_and_dominators(capsys):
    code, out, _ = cli(capsys, "verify", "dominance", "--trials", "200", "--seed", "7")
    assert code == 0 and "PASS" in out
    code, out, _ = cli(capsys, "verify", "dominators", "--trials", "20", "--seed", "7")
    assert code == 0 and "PASS" in out


def test_verify_time_limit_exit_3(capsys):
    code, _, err = cli(capsys, "verify", "ic", "--n-max", "5", "--processes", "1", "--time-limit", "0")
    assert code == 3
    assert "partial" in err


def test_gen_line_is_the_line_scenario(capsys, tmp_path):
    out_path = tmp_path / "line.json"
    assert main(["gen", "line", "5", "--out", str(out_path)]) == 0
    net, _ = load_scenario(out_path)
    assert net == line_graph(5)
    assert net.valuations == (0, 0, 0, 0, 0, 1)


def test_gen_er_is_deterministic(capsys):
    _, a, _ = cli(capsys, "gen", "er", "50", "0.1", "--seed", "1")
    _, b, _ = cli(capsys, "gen", "er", "50", "0.1", "--seed", "1")
    _, c, _ = cli(capsys, "gen", "er", "50", "0.1", "--seed", "2")
    assert a == b != c


def test_gen_tree(capsys, tmp_path):
    path = tmp_path / "t.json"
    main(["gen", "tree", "10", "--seed", "2", "--out", str(path)])
    net, _ = load_scenario(path)
    assert net.n == 10 and net.is_connected() and len(net.edges()) == 9


def test_bench(capsys):
    code, out, _ = cli(capsys, "bench", "--sizes", "1,10,100", "--repeats", "1")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 3 and all(r.endswith("True") for r in rows)
