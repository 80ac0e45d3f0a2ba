import json

import pytest

from pottsforge.cli import main
from pottsforge.graphs import parse_instance


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / "triangle.graph"
    path.write_text("# triangle\ngraph 3 3\n0 1 1\n1 2 1\n0 2 1\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEval:
    def test_triangle_value(self, capsys, triangle_file):
        code, out, _ = run(capsys, "eval", "--q", "2", triangle_file)
        assert code == 0
        assert out.splitlines()[0].startswith("28 ")

    def test_json_fields(self, capsys, triangle_file):
        code, out, _ = run(capsys, "eval", "--q", "2", "--json", triangle_file)
        payload = json.loads(out)
        assert payload == {"value_num": "28", "value_den": "1",
                           "value_decimal": "28.0"}

    def test_potts_and_terminals(self, capsys, triangle_file):
        code, out, _ = run(capsys, "eval", "--q", "2", "--potts", triangle_file)
        assert out.startswith("28")
        code, out, _ = run(capsys, "eval", "--q", "3", "--terminals", "0,1",
                           triangle_file)
        assert "z_st = 21" in out and "z_s|t = 45" in out

    def test_bipartite_needs_mu(self, capsys, tmp_path):
        path = tmp_path / "b.txt"
        path.write_text("bipartite 1 1 1\n0 0\n")
        code, _, err = run(capsys, "eval", str(path))
        assert code == 1 and "mu" in err
        code, out, _ = run(capsys, "eval", "--mu", "1", str(path))
        assert code == 0 and out.startswith("3 ")

    def test_cap_exit_code(self, capsys, tmp_path):
        lines = ["graph 2 30"] + ["0 1 1"] * 30
        path = tmp_path / "big.graph"
        path.write_text("\n".join(lines) + "\n")
        code, _, err = run(capsys, "eval", "--q", "2", str(path))
        assert code == 2 and "too large" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "eval", "--q", "2", "/nonexistent.graph")
        assert code == 1


class TestSample:
    def test_byte_identical_for_seed(self, capsys, triangle_file):
        args = ("sample", triangle_file, "--model", "rc", "--q", "2",
                "--sweeps", "8", "--seed", "13", "--json")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2
        payload = json.loads(out1)
        assert payload["edge_count"] == len(payload["edges"])

    def test_forced_edges(self, capsys, triangle_file):
        code, out, _ = run(capsys, "sample", triangle_file, "--q", "2",
                           "--sweeps", "3", "--seed", "1",
                           "--force-in", "0", "--force-out", "2", "--json")
        payload = json.loads(out)
        assert 0 in payload["edges"] and 2 not in payload["edges"]

    def test_trace_csv(self, capsys, triangle_file):
        code, out, _ = run(capsys, "sample", triangle_file, "--q", "2",
                           "--sweeps", "4", "--seed", "3", "--trace", "csv")
        lines = out.strip().splitlines()
        assert lines[0] == "sweep,largest_component"
        assert len(lines) == 5


class TestTune:
    def test_success_json(self, capsys):
        code, out, _ = run(capsys, "tune", "--N", "16", "--t", "2", "--q", "3",
                           "--gamma", "1/5", "--chi", "272", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["rho_den"] == "4096"

    def test_no_crossing_exit_2(self, capsys):
        code, _, err = run(capsys, "tune", "--N", "16", "--t", "2", "--q", "3",
                           "--gamma", "100000", "--chi", "1")
        assert code == 2 and "window" in err


class TestReduce:
    def test_writes_stages_and_trace(self, capsys, tmp_path):
        bip = tmp_path / "b.txt"
        bip.write_text("bipartite 1 0 0\n")
        out_dir = tmp_path / "stages"
        code, out, _ = run(capsys, "reduce", str(bip), "--q", "3",
                           "--gamma", "2", "--eps", "1",
                           "--out-dir", str(out_dir))
        assert code == 0
        payload = json.loads(out)
        assert [s["stage"] for s in payload["stages"]] == [
            "maxis-blowup", "semiregular-pad", "apex-hypertutte",
            "two-weight", "uniform-weight"]
        # every stage file parses back (round-trip property)
        for s in payload["stages"]:
            parse_instance((tmp_path / s["file"]).read_text()
                           if not s["file"].startswith("/") else
                           open(s["file"]).read())


class TestVerifyAndMisc:
    def test_verify_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "sp")
        assert code == 0 and out.startswith("[PASS] sp")

    def test_roundtrip_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "roundtrip")
        assert code == 0

    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0 and out.startswith("pottsforge ")

    def test_usage_errors(self, capsys):
        code, _, err = run(capsys)
        assert code == 1
        code, _, err = run(capsys, "eval")
        assert code == 1

    def test_gadget_dump(self, capsys):
        code, out, _ = run(capsys, "gadget", "dump-dp", "--t", "1", "--N", "1",
                           "--gamma-prime", "1/3", "--gamma-dblprime", "2/5")
        lines = out.strip().splitlines()
        assert lines[0] == "t,N,k,l,w_num,w_den"
        assert "1,1,1,0,2,5" in lines

    def test_demo_csv(self, capsys):
        code, out, err = run(capsys, "demo", "phase", "--q", "3", "--N", "10",
                             "--sweeps", "3", "--seed", "2",
                             "--lambdas", "2,4", "--starts", "empty")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "lambda,start,sweep,largest_component,fraction"
        assert len(lines) == 1 + 2 * 3
        assert "theta" in err
