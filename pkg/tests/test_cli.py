import subprocess
import sys

import pytest

from pmuplace.cli import main, parse_record, strip_timings
from pmuplace.observability import is_observable, sori
from pmuplace.topology import build_connectivity, load_network


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_bip_ieee14(capsys, tmp_path):
    rec = tmp_path / "r.txt"
    code, out, _ = run(capsys, "solve", "ieee14", "--method", "bip", "--record", str(rec))
    assert code == 0
    assert "4 PMUs" in out
    fields = parse_record(rec.read_text())
    assert fields["record_version"] == "1"
    assert fields["result.pmus"] == "4"
    assert fields["result.observable"] == "true"


def test_solve_nlp_ieee14(capsys):
    code, out, _ = run(capsys, "solve", "ieee14", "--method", "nlp", "--starts", "5")
    assert code == 0 and "4 PMUs" in out


def test_solve_ieee300_original_labels(capsys, tmp_path):
    rec = tmp_path / "r.txt"
    code, out, _ = run(capsys, "solve", "ieee300", "--method", "bip", "--record", str(rec))
    assert code == 0 and "87 PMUs" in out
    labels = [int(v) for v in parse_record(rec.read_text())["result.placement"].split(",")]
    assert max(labels) > 300  # source labels, not dense indices
    net = load_network("ieee300")
    assert is_observable(build_connectivity(net), net.placement(labels))


def test_record_round_trip(capsys, tmp_path):
    rec = tmp_path / "r.txt"
    run(capsys, "solve", "ieee57", "--method", "bip", "--record", str(rec))
    fields = parse_record(rec.read_text())
    code, _, _ = run(capsys, "verify", "ieee57", "--placement", fields["result.placement"],
                     "--record", str(tmp_path / "v.txt"))
    verify = parse_record((tmp_path / "v.txt").read_text())
    assert code == 0
    assert verify["observable"] == fields["result.observable"] == "true"
    assert verify["sori"] == fields["result.sori"]


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", "ieee14", "--placement", "2,6,7,9")
    assert code == 0 and "observable  yes" in out and "SORI        19" in out
    code, out, _ = run(capsys, "verify", "ieee14", "--placement", "2,6,7")
    assert code == 3 and "unobserved  10, 14" in out
    code, out, _ = run(capsys, "verify", "ieee14", "--placement", ",".join(map(str, range(1, 15))))
    assert code == 0 and "SORI        54" in out


def test_verify_unknown_bus(capsys):
    code, _, err = run(capsys, "verify", "ieee14", "--placement", "2,99")
    assert code == 2 and "99" in err


def test_enumerate_ieee14(capsys, tmp_path):
    rec = tmp_path / "e.txt"
    code, out, _ = run(capsys, "enumerate", "ieee14", "--starts", "50", "--seed", "7", "--record", str(rec))
    assert code == 0
    fields = parse_record(rec.read_text())
    fours = [k for k in fields if k.endswith(".pmus") and fields[k] == "4"]
    assert len(fours) >= 2
    if "2,6,7,9" in {fields[k.replace("pmus", "placement")] for k in fours}:
        assert fields["solution.1.placement"] == "2,6,7,9"
        assert fields["solution.1.flag"] == "max-SORI"
    assert "* max SORI" in out


def test_enumerate_ieee30_counts(capsys, tmp_path):
    rec = tmp_path / "e.txt"
    run(capsys, "enumerate", "ieee30", "--starts", "100", "--seed", "7", "--record", str(rec))
    fields = parse_record(rec.read_text())
    for k, v in fields.items():
        if k.endswith(".pmus") and v != "10":
            assert fields[k.replace("pmus", "flag")] == "suboptimal"


def test_enumerate_single_start(capsys, tmp_path):
    rec = tmp_path / "e.txt"
    run(capsys, "enumerate", "ieee14", "--starts", "1", "--record", str(rec))
    assert parse_record(rec.read_text())["distinct"] == "1"


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "ieee14")
    assert code == 0 and "minimum size 4, 5 optimal placements" in out
    code, _, err = run(capsys, "oracle", "ieee57")
    assert code == 2 and "cap" in err


def test_bench_small_and_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    args = ["bench", "--systems", "ieee14,ieee30", "--starts", "5", "--seed", "3"]
    assert run(capsys, *args, "--record", str(a))[0] == 0
    assert run(capsys, *args, "--record", str(b))[0] == 0
    assert strip_timings(a.read_text()) == strip_timings(b.read_text())
    fields = parse_record(a.read_text())
    assert fields["bench.ieee30.bip.pmus"] == "10"


def test_bench_empty(capsys):
    code, out, _ = run(capsys, "bench", "--systems", "")
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("system")


def test_bench_unknown_system(capsys):
    code, _, err = run(capsys, "bench", "--systems", "ieee15")
    assert code == 2 and "ieee15" in err


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n1 1\n")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2 and "line 2" in err


def test_weights_file(capsys, tmp_path):
    wf = tmp_path / "w.txt"
    wf.write_text("# expensive buses\n2 10\n6 10\n")
    code, out, _ = run(capsys, "solve", "ieee14", "--weights", str(wf), "--record", "-")
    fields = parse_record(out)  # human lines come first, record keys follow
    assert code == 0
    placed = fields["result.placement"].split(",")
    assert "2" not in placed and "6" not in placed


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pmuplace", "verify", "ieee14", "--placement", "2,6,7,9"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "observable  yes" in res.stdout


def test_strip_timings():
    text = "a=1\nresult.wall_time_s=0.5\nb=2\n"
    assert strip_timings(text) == "a=1\nb=2\n"
