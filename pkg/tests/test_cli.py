import io
import json
import subprocess
import sys

import pytest

from cmdecomp.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_classgroup():
    code, out, _ = call("classgroup", "--disc", "-971")
    d = json.loads(out)
    assert code == EXIT_OK and d["h"] == 15
    assert [(g["norm"], g["relative_order"]) for g in d["presentation"]] == [(3, 5), (5, 3)]


def test_heights():
    assert json.loads(call("heights", "--disc", "-971", "--order", "5")[1])["bound_opt"] == 340
    assert json.loads(call("heights", "--disc", "-971", "--order", "3", "--arbitrary")[1])["bound_opt"] == 342
    d = json.loads(call("heights", "--disc", "-971", "--all")[1])
    assert len(d["subgroups"]) == 3


def test_find_primes():
    d = json.loads(call("find-primes", "--disc", "-971", "--bits", "340")[1])
    assert d["count"] == 25 and d["primes"][0] == {"p": "263", "t": "9", "v": 1}


def test_hilbert():
    d = json.loads(call("hilbert", "--disc", "-23")[1])
    assert d["coefficients"] == ["12771880859375", "-5151296875", "3491750", "1"]
    d = json.loads(call("hilbert", "--disc", "-23", "--mod", "101")[1])
    assert d["coefficients"] == [str(c % 101) for c in (12771880859375, -5151296875, 3491750, 1)]


def test_construct_and_verify():
    code, out, _ = call("construct", "--disc", "-971", "--q", "1029167", "--alg", "2",
                        "--order", "5", "--s", "-e1")
    d = json.loads(out)
    assert code == 0 and d["x"] == "590272" and d["w"] == ["180694", "270105", "92440", "110998"]
    c = d["curve"]
    code, out, _ = call("verify", "--q", "1029167", "--a", c["a"], "--b", c["b"], "--order", d["order"])
    assert code == 0 and json.loads(out)["matches"]
    code, _, _ = call("verify", "--q", "1029167", "--a", c["a"], "--b", c["b"], "--order", "1029168")
    assert code == EXIT_DOMAIN


def test_text_format():
    code, out, _ = call("--format", "text", "classgroup", "--disc", "-23")
    assert code == 0 and "h: 3" in out


@pytest.mark.parametrize("argv", [[], ["nope"], ["classgroup"], ["construct", "--disc", "-971"],
                                  ["construct", "--disc", "-971", "--q", "5", "--alg", "7"]])
def test_usage_errors(argv):
    code, _, err = call(*argv)
    assert code == EXIT_USAGE and err


@pytest.mark.parametrize("argv", [["classgroup", "--disc", "7"],
                                  ["construct", "--disc", "-971", "--q", "1029169"],
                                  ["hilbert", "--disc", "-972"]])
def test_domain_errors(argv):
    code, _, err = call(*argv)
    assert code == EXIT_DOMAIN and err.startswith("error:")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmdecomp", "classgroup", "--disc", "-971"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["h"] == 15
