import io
import json
import subprocess
import sys

import pytest

from ltr.cli import main
from ltr.stdlib import load_fixture, read_asset
from ltr.syntax import export_json, parse_language, print_language


@pytest.fixture
def stlc_file(tmp_path):
    p = tmp_path / "stlc.lang"
    p.write_text(read_asset("stlc.lang"))
    return str(p)


@pytest.fixture
def stlc_if_file(tmp_path):
    p = tmp_path / "stlc_if.lang"
    p.write_text(read_asset("stlc_if.lang"))
    return str(p)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def script(tmp_path, text, name="s.ltr"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_add_subtyping(stlc_file):
    code, out, _ = cli("run", "--lang", stlc_file, "--asset", "add-subtyping")
    assert code == 0
    lang = parse_language(out)
    assert any(f.pred == "<:" for r in lang.rules for f in r.premises)


def test_run_arity_breaking_script(stlc_file, tmp_path):
    s = script(tmp_path, "setRules (getRules @ [(nil --- (|- ?a ?b))])")
    code, out, err = cli("run", "--lang", stlc_file, "--script", s)
    assert code == 2 and out == ""
    assert "unchanged" in err


def test_run_missing_file(tmp_path):
    code, _, err = cli("run", "--lang", str(tmp_path / "nope.lang"), "--asset", "big-step")
    assert code == 4 and "nope.lang" in err


def test_check_big_step(stlc_file):
    code, out, _ = cli("check", "--lang", stlc_file, "--asset", "big-step")
    assert code == 0 and out.strip() == "Language"


def test_check_non_language_script(stlc_file, tmp_path):
    code, _, err = cli("check", "--lang", stlc_file, "--script", script(tmp_path, "getRules"))
    assert code == 3 and "expected Language, found List Rule" in err


def test_check_empty_script(stlc_file, tmp_path):
    code, _, _ = cli("check", "--lang", stlc_file, "--script", script(tmp_path, ""))
    assert code == 4


def test_parse_error_location(stlc_file, tmp_path):
    code, _, err = cli("check", "--lang", stlc_file, "--script", script(tmp_path, "skip ;\n  (", "bad.ltr"))
    assert code == 4 and "bad.ltr:2:" in err


def test_fuel_exhaustion(stlc_file):
    code, _, err = cli("run", "--lang", stlc_file, "--asset", "big-step", "--fuel", "5")
    assert code == 5 and "fuel" in err


def test_export_plain(stlc_file):
    code, out, _ = cli("export", "--lang", stlc_file)
    assert code == 0
    assert out.strip() == export_json(load_fixture("stlc"))


def test_export_after_big_step(stlc_if_file):
    code, out, _ = cli("export", "--lang", stlc_if_file, "--asset", "big-step")
    assert code == 0
    data = json.loads(out)
    assert "plug" not in json.dumps(data)
    assert all(r["conclusion"]["pred"] == "-->" for r in data["rules"]
               if r["conclusion"]["pred"] != "|-")


def test_export_text(stlc_file):
    code, out, _ = cli("export", "--lang", stlc_file, "--format", "text")
    assert code == 0 and out == print_language(load_fixture("stlc"))


def test_out_file(stlc_file, tmp_path):
    target = tmp_path / "o.json"
    code, out, _ = cli("export", "--lang", stlc_file, "--out", str(target))
    assert code == 0 and out == "" and json.loads(target.read_text())


def test_trace_goes_to_stderr(stlc_file, tmp_path):
    code, out, err = cli("run", "--lang", stlc_file, "--script", script(tmp_path, "skip ; skip"),
                         "--trace")
    assert code == 0 and parse_language(out) == load_fixture("stlc")
    assert len(err.strip().splitlines()) == 2


def test_user_maps_file(stlc_file, tmp_path):
    maps = tmp_path / "m.maps"
    maps.write_text("mode: |- = inp inp out\nvariance: arrow = cova cova\n")
    code, out, _ = cli("run", "--lang", stlc_file, "--asset", "add-subtyping", "--maps", str(maps))
    assert code == 0
    # covariant argument: the subtyping premise is not flipped
    lang = parse_language(out)
    (sub,) = [f for r in lang.rules for f in r.premises if f.pred == "<:"]
    app = [r for r in lang.rules if sub in r.premises][0]
    arrow_arg = app.premises[0].args[2].args[0]
    assert sub.args[0] == arrow_arg


def test_module_entry_point(stlc_file):
    proc = subprocess.run([sys.executable, "-m", "ltr", "check", "--lang", stlc_file,
                           "--asset", "explicit-equality"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "Language"
