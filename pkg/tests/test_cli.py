import io
import subprocess
import sys


from binpack_lab.cli import run_command


def run(argv):
    out = io.StringIO()
    code = run_command(argv, out)
    return code, out.getvalue()


def strip_time(text):
    return "\n".join(line for line in text.splitlines() if not line.startswith("wall time"))


def test_constants_commands():
    code, out = run(["k3-limit"])
    assert code == 0 and "77275651/39923650" in out and "1.935585824442" in out
    code, out = run(["lb-formula", "--k", "4"])
    assert code == 0 and "1.87813180" in out
    code, out = run(["rho", "--terms", "30"])
    assert code == 0 and "0.46402519384" in out and "3.15505540059" in out
    code, out = run(["pi", "--terms", "5"])
    assert "509/301" in out


def test_tsv_columns():
    code, out = run(["--format=tsv", "k3-limit"])
    row = [line for line in out.splitlines() if line.startswith("k3 limit")][0]
    assert row.split("\t")[1] == "77275651/39923650"


def test_usage_errors():
    assert run(["lb-formula", "--k", "3"])[0] == 2
    assert run(["verify-weights", "--trials", "3"])[0] == 2  # --seed is mandatory
    assert run(["suite"])[0] == 2
    assert run(["no-such-command"])[0] == 2
    assert run(["gen-lb", "--N", "91"])[0] == 2
    assert run(["pack", "/nonexistent/file"])[0] == 2


def test_pack_and_parse_error(tmp_path):
    f = tmp_path / "p.inst"
    f.write_text("kind plain\nitem 3/5\nitem 1/2\nitem 2/5\nitem 3/10\n")
    code, out = run(["pack", str(f)])
    assert code == 0 and "tau" in out
    code, out = run(["pack", "--algorithm", "exact", str(f)])
    assert code == 0
    bad = tmp_path / "bad.inst"
    bad.write_text("kind plain\nitem 5/4\n")
    assert run(["pack", str(bad)])[0] == 2


def test_gen_lb_emit_then_price(tmp_path):
    prefix = tmp_path / "lb90"
    code, out = run(["gen-lb", "--N", "90", "--emit", str(prefix)])
    assert code == 0 and "29/18" in out
    code, out = run(["price", str(prefix) + ".inst", "--certificate", str(prefix) + ".cert"])
    assert code == 0 and "145" in out and "certificate+large-item-bound" in out


def test_price_violation_exit_code(tmp_path):
    f = tmp_path / "c.inst"
    f.write_text("kind clustered k=3\nitem 51/100 count=2 cluster=a\nitem 49/100 cluster=a\n")
    assert run(["price", str(f)])[0] == 1


def test_timed_commands(tmp_path):
    f = tmp_path / "t.inst"
    f.write_text("kind timed\nitem 3/10 count=2 arrive=0/1 delay=linear:1\nitem 1/2 arrive=3/1 delay=linear:2\n")
    code, out = run(["simulate", str(f)])
    assert code == 0 and "phase 1" in out
    code, out = run(["oracle", str(f)])
    assert code == 0 and "0,1 | 2" in out
    code, out = run(["check-bound", str(f)])
    assert code == 0 and "ALG within bounds" in out and "pass" in out
    g = tmp_path / "b.inst"
    g.write_text("kind timed\nitem 1/2 arrive=0/1 delay=table:1/1:1/10\n")
    assert run(["simulate", str(g)])[0] == 2
    assert run(["simulate", str(g), "--horizon", "4"])[0] == 0


def test_seed_determinism():
    argv = ["verify-weights", "--seed", "9", "--trials", "50", "--suite", "clusters"]
    assert strip_time(run(argv)[1]) == strip_time(run(argv)[1])


def test_suite_subset():
    code, out = run(["suite", "--seed", "1", "--only", "1,2,3"])
    assert code == 0 and out.count("pass") == 3


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "binpack_lab.cli", "k3-limit"], capture_output=True, text=True)
    assert proc.returncode == 0 and "1.9355858" in proc.stdout
