"""Exit codes and file formats of every subcommand, run in-process."""

import json

import pytest

from fsq.cli import OK, REJECT, USAGE, main


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture
def keys(tmp_path):
    paths = {}
    for name, scheme in [("seq", "seq"), ("plain", "schnorr"), ("plain2", "schnorr"), ("other", "seq")]:
        key, pub = tmp_path / f"{name}.key", tmp_path / f"{name}.pub"
        assert run("keygen", "--scheme", scheme, "--bits", 32, "--seed", name, "--out", key, "--pub-out", pub) == OK
        paths[name] = (key, pub)
    return paths


def flip_last_byte(path):
    data = bytearray(path.read_bytes())
    data[-1] ^= 1
    path.write_bytes(bytes(data))


# signatures


def test_sign_verify_roundtrip(keys, tmp_path):
    key, pub = keys["seq"]
    sig = tmp_path / "m.sig"
    assert run("sign", "--key", key, "--message", "hello", "--seed", "s", "--out", sig) == OK
    assert sig.read_bytes()[:4] == b"FSQS"
    assert run("verify", "--key", pub, "--message", "hello", "--sig", sig) == OK
    assert run("verify", "--key", pub, "--message", "hellO", "--sig", sig) == REJECT
    assert run("verify", "--key", keys["other"][1], "--message", "hello", "--sig", sig) == REJECT
    assert run("verify", "--key", keys["plain"][1], "--message", "hello", "--sig", sig) == REJECT


def test_message_file(keys, tmp_path):
    key, pub = keys["seq"]
    msg, sig = tmp_path / "msg.bin", tmp_path / "m.sig"
    msg.write_bytes(bytes(range(256)))
    assert run("sign", "--key", key, "--message-file", msg, "--seed", "s", "--out", sig) == OK
    assert run("verify", "--key", pub, "--message-file", msg, "--sig", sig) == OK


def test_flipped_signature_byte_rejects(keys, tmp_path):
    key, pub = keys["seq"]
    sig = tmp_path / "m.sig"
    run("sign", "--key", key, "--message", "m", "--seed", "s", "--out", sig)
    flip_last_byte(sig)
    assert run("verify", "--key", pub, "--message", "m", "--sig", sig) == REJECT


def test_signature_usage_errors(keys, tmp_path, capsys):
    key, pub = keys["seq"]
    sig = tmp_path / "m.sig"
    assert run("verify", "--key", tmp_path / "missing.key", "--message", "m", "--sig", sig) == USAGE
    assert "missing.key" in capsys.readouterr().err
    assert run("sign", "--key", pub, "--message", "m", "--seed", "s", "--out", sig) == USAGE
    assert run("sign", "--key", key, "--seed", "s", "--out", sig) == USAGE
    assert run("sign", "--key", key, "--message", "m", "--out", sig) == USAGE
    (tmp_path / "bad.key").write_text("{not json")
    assert run("verify", "--key", tmp_path / "bad.key", "--message", "m", "--sig", sig) == USAGE
    (tmp_path / "junk.sig").write_bytes(b"FSQS\x01\x00")
    assert run("verify", "--key", pub, "--message", "m", "--sig", tmp_path / "junk.sig") == USAGE


def test_keygen_usage_errors(tmp_path):
    assert run("keygen", "--scheme", "rsa", "--seed", "s", "--out", tmp_path / "k") == USAGE
    assert run("keygen", "--seed", "s", "--out", tmp_path / "no/such/dir/k") == USAGE
    assert run("keygen", "--scheme", "schnorr-toy", "--seed", "s", "--out", tmp_path / "toy.key") == OK
    assert run() == USAGE
    assert run("frobnicate") == USAGE


def test_key_file_format(keys):
    key, pub = keys["seq"]
    data = json.loads(key.read_text())
    assert {"scheme", "params", "pk_hex", "sk_hex"} <= set(data)
    assert "sk_hex" not in json.loads(pub.read_text())


# proofs


@pytest.mark.parametrize("name", ["plain", "seq"])
def test_fs_prove_verify(keys, tmp_path, name):
    key, pub = keys[name]
    proof = tmp_path / "p.bin"
    assert run("fs-prove", "--key", key, "--seed", "s", "--out", proof) == OK
    assert run("fs-verify", "--key", pub, "--proof", proof) == OK
    assert run("fs-verify", "--key", keys["other"][1], "--proof", proof) == REJECT
    flip_last_byte(proof)
    assert run("fs-verify", "--key", pub, "--proof", proof) == REJECT
    proof.write_bytes(proof.read_bytes()[:-2])
    assert run("fs-verify", "--key", pub, "--proof", proof) == USAGE


def test_mq_keys_work_with_fs(tmp_path):
    key, pub, proof = tmp_path / "mq.key", tmp_path / "mq.pub", tmp_path / "p.bin"
    assert run("keygen", "--scheme", "mq", "--seed", "mq", "--out", key, "--pub-out", pub) == OK
    assert run("fs-prove", "--key", key, "--seed", "s", "--out", proof) == OK
    assert run("fs-verify", "--key", pub, "--proof", proof) == OK


@pytest.mark.parametrize("branch", [0, 1])
def test_or_prove_verify(keys, tmp_path, branch):
    k0, k1 = keys["plain"], keys["plain2"]
    known = (k0[0], k1[1]) if branch == 0 else (k0[1], k1[0])
    proof = tmp_path / "or.bin"
    assert run("or-prove", "--key0", known[0], "--key1", known[1], "--branch", branch, "--seed", "s", "--out", proof) == OK
    assert run("or-verify", "--key0", k0[1], "--key1", k1[1], "--proof", proof) == OK
    assert run("or-verify", "--key0", k1[1], "--key1", k0[1], "--proof", proof) == REJECT
    proof.write_bytes(proof.read_bytes()[:-3])
    assert run("or-verify", "--key0", k0[1], "--key1", k1[1], "--proof", proof) == USAGE


def test_or_prove_without_secret(keys, tmp_path):
    pub0, pub1 = keys["plain"][1], keys["plain2"][1]
    assert run("or-prove", "--key0", pub0, "--key1", pub1, "--branch", 0, "--seed", "s", "--out", tmp_path / "o") == USAGE
    assert run("or-prove", "--key0", pub0, "--key1", pub1, "--branch", 2, "--seed", "s", "--out", tmp_path / "o") == USAGE


def test_or_flipped_byte_rejects(keys, tmp_path):
    proof = tmp_path / "or.bin"
    assert run("or-prove", "--key0", keys["plain"][0], "--key1", keys["plain2"][1], "--branch", 0, "--seed", "s",
               "--out", proof) == OK
    flip_last_byte(proof)
    assert run("or-verify", "--key0", keys["plain"][1], "--key1", keys["plain2"][1], "--proof", proof) == REJECT


def test_or_needs_sigma_protocols(keys, tmp_path):
    assert run("or-prove", "--key0", keys["seq"][0], "--key1", keys["plain"][1], "--branch", 0, "--seed", "s",
               "--out", tmp_path / "o") == USAGE


def test_q2_demo(capsys):
    assert run("q2-demo", "--seed", "demo") == OK
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] and report["pattern_ok"]
    assert len(report["extracted"]) == 5
    assert run("q2-demo") == USAGE


# experiments


def test_exp_requires_seed(tmp_path):
    for name in ("lemma1", "lemma2", "theorem5", "grover", "tightness", "q2-extract"):
        assert run("exp", name, "--out", tmp_path / "r.json") == USAGE
    assert run("exp", "theorem1", "--out", tmp_path / "r.json") == USAGE
    assert run("exp", "nonsense", "--seed", 1) == USAGE


def test_exp_dimension_cap(capsys):
    assert run("exp", "lemma1", "--q", 1, "--X", 40, "--Y", 4, "--trials", 1, "--seed", 1) == USAGE
    err = capsys.readouterr().err
    assert "25600" in err


def test_exp_bad_option_values():
    assert run("exp", "lemma1", "--q", "one", "--seed", 1) == USAGE
    assert run("exp", "lemma1", "--Y", 3, "--q", 1, "--trials", 1, "--seed", 1) == USAGE


def strip_clock(text: str) -> dict:
    d = json.loads(text)
    d.pop("wall_clock")
    return d


def test_lemma1_report(tmp_path):
    out = tmp_path / "l1.json"
    assert run("exp", "lemma1", "--q", 1, "--X", 2, "--Y", 2, "--trials", 10, "--seed", 7, "--out", out) == OK
    report = json.loads(out.read_text())
    assert report["passed"] and report["aggregate"]["min_margin"] >= -1e-9
    assert report["config"]["seed"] == 7 and report["records"][0]["trials"] == 10
    assert {"experiment", "config", "records", "aggregate", "passed", "wall_clock", "version"} == set(report)


@pytest.mark.parametrize(
    "argv",
    [
        ("lemma1", "--q", 1, "--X", 2, "--Y", 2, "--trials", 6, "--seed", 3),
        ("lemma2", "--q", 1, "--trials", 3, "--seed", 3),
        ("lemma2", "--q", 1, "--trials", 3, "--seed", 3, "--all-slots"),
        ("theorem1", "--q", 1, "--trials", 4, "--enumerate"),
        ("theorem5", "--Y", 16, "--trials", 3, "--samples", 10, "--seed", 3),
        ("grover", "--C", 64, "--gamma", 6, "--q", "1,2", "--samples", 10, "--seed", 3),
        ("grover", "--C", 2, "--gamma", 2, "--q", "1,2", "--exhaustive", "--seed", 3),
        ("grover-circuit", "--N", 6, "--q", 2),
        ("tightness", "--C", 16, "--gamma", 4, "--q", 4, "--samples", 5, "--seed", 3),
        ("q2-extract", "--trials", 5, "--seed", 3),
    ],
    ids=lambda a: "-".join(str(v) for v in a[:1]),
)
def test_exp_reports_are_reproducible(tmp_path, argv):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code = run("exp", *argv, "--out", a)
    assert code in (OK, REJECT)
    assert run("exp", *argv, "--out", b) == code
    assert strip_clock(a.read_text()) == strip_clock(b.read_text())
    assert (code == OK) == json.loads(a.read_text())["passed"]


def test_theorem1_enumeration_is_seed_independent(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("exp", "theorem1", "--X", 2, "--Y", 2, "--q", 1, "--trials", 3, "--enumerate", "--out", a)
    run("exp", "theorem1", "--X", 2, "--Y", 2, "--q", 1, "--trials", 3, "--enumerate", "--out", b)
    assert strip_clock(a.read_text()) == strip_clock(b.read_text())


def test_grover_csv(tmp_path):
    out = tmp_path / "g.csv"
    assert run("exp", "grover", "--C", 64, "--gamma", 6, "--q", "1,2", "--samples", 10, "--seed", 3,
               "--format", "csv", "--out", out) in (OK, REJECT)
    lines = out.read_text().splitlines()
    assert lines[0] == "kind,q,n,C,gamma,samples,mean_p1,mean_p2,bound,precond_ok,seed"
    assert len(lines) == 3


def test_csv_needs_tabular_experiment(tmp_path):
    assert run("exp", "q2-extract", "--trials", 2, "--seed", 3, "--format", "csv", "--out", tmp_path / "r.csv") == USAGE


def test_report_to_stdout(capsys):
    assert run("exp", "grover-circuit", "--N", 3, "--q", 1) == OK
    assert json.loads(capsys.readouterr().out)["experiment"] == "grover-circuit"
