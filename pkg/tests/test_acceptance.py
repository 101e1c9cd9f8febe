"""Acceptance criteria, each at its stated parameters and tolerance.

Every check carries a `criterion` mark; conftest prints one PASS/FAIL line
per criterion at the end of the run. Runtime budgets are asserted on the
reported wall clock.
"""

import random
from fractions import Fraction

import pytest

from test_attacks import EXPECTED

from fsq.attacks import LOSS_KINDS, attack_scaling, theoretical_loss
from fsq.encoding import labelled
from fsq.experiments import (
    EXACT_TOL,
    MARGIN_TOL,
    run_grover,
    run_grover_circuit,
    run_lemma1,
    run_lemma2,
    run_q2_extract,
    run_theorem1,
    run_theorem5,
    run_tightness,
)
from fsq.fs.oracle import XofOracle
from fsq.fs.transform import FSProof, fs_prove, fs_verify
from fsq.or_proof import OrProof, or_prove, or_verify
from fsq.protocol.base import Transcript, run_interactive, verify_transcript
from fsq.protocol.mock import MockSigma
from fsq.protocol.sequential import sequential_repeat
from fsq.q2.mq import MqParams, MqScheme
from fsq.signatures import Signature, keygen, sign, verify

TRIALS = 1000
MINUTE = 60.0

criterion = pytest.mark.criterion
slow = pytest.mark.slow


def seeds(tag: bytes, count: int = TRIALS):
    return [labelled(b"acceptance", tag, k.to_bytes(4, "big")) for k in range(count)]


def flip(data: bytes, bit: int) -> bytes:
    out = bytearray(data)
    out[bit // 8] ^= 1 << (bit % 8)
    return bytes(out)


def flip_random(data: bytes, rng: random.Random) -> bytes:
    return flip(data, rng.randrange(len(data) * 8))


# 1: single-input reprogramming bound


@slow
@criterion(1, "single-input reprogramming bound, 200 adversaries per cell")
def test_single_input_bound_suite():
    rep = run_lemma1(seed=7)
    assert len(rep.records) == 3 * 2 * 2
    for r in rep.records:
        assert r["trials"] == 200
        assert r["mode"] == ("enumerate" if r["Y"] ** r["X"] <= 256 else "sampled")
        assert r["failures"] == 0, r
        assert r["min_margin"] >= -MARGIN_TOL
    assert {(r["q"], r["X"], r["Y"]) for r in rep.records} == {
        (q, X, Y) for q in (1, 2, 3) for X in (2, 3) for Y in (2, 4)
    }
    assert rep.passed
    assert rep.wall_clock < 5 * MINUTE


# 2: exact single-input extraction


@criterion(2, "extraction bound by full enumeration at |X| = |Y| = 2")
def test_extraction_bound_exact():
    rep = run_theorem1(seed=0, qs=(1, 2), X=2, Y=2)
    assert [r["q"] for r in rep.records] == [1, 2]
    for r in rep.records:
        assert r["failures"] == 0 and r["min_margin"] >= -EXACT_TOL
    assert rep.aggregate["tolerance"] == EXACT_TOL
    assert rep.passed
    assert rep.wall_clock < MINUTE


# 3: two-input reprogramming bound


@slow
@criterion(3, "two-input reprogramming bound, denominator 625")
def test_two_input_bound():
    rep = run_lemma2(seed=1, q=2, X=3, Y=2, n=2, trials=50, distinct=True)
    assert rep.config["denominator"] == 625
    (r,) = rep.records
    assert r["trials"] == 50 and r["failures"] == 0
    assert r["min_margin"] >= -MARGIN_TOL
    assert rep.passed
    assert rep.wall_clock < 20 * MINUTE


# 4: ordered chain extraction


@slow
@criterion(4, "hash-chain aggregate bound and in-order extraction")
def test_chain_aggregate_bound():
    rep = run_theorem5(seed=1, Ys=(16, 64), trials=50, samples=100)
    assert [r["Y"] for r in rep.records] == [16, 64]
    for r in rep.records:
        assert r["trials"] >= 50
        # slack is n!/|Y|
        assert r["slack"] == pytest.approx(2 / r["Y"])
        assert r["max_aggregate"] <= r["slack"] + MARGIN_TOL
        assert r["chain_extraction_min"] == pytest.approx(1, abs=MARGIN_TOL)
    assert rep.aggregate["chain_ok"]
    assert rep.passed
    assert rep.wall_clock < 10 * MINUTE


# 5: Grover exactness


@criterion(5, "Grover circuit against closed form, 25/32 exact")
def test_grover_exactness():
    rep = run_grover_circuit(N_max=64, q_max=5)
    assert len(rep.records) == 64
    assert rep.aggregate["max_deviation"] <= 1e-9
    assert rep.aggregate["exact_N8_M1_q1"] == Fraction(25, 32)
    assert rep.passed
    assert rep.wall_clock < MINUTE


# 6: attack scaling


@slow
@criterion(6, "Grover attack scaling at gamma = 14")
def test_attack_scaling():
    rep = run_grover(seed=3, C=1 << 14, gamma=14, qs=(1, 2, 4, 8, 16), samples=100)
    assert [r["q"] for r in rep.records] == [1, 2, 4, 8, 16]
    for r in rep.records:
        assert r["samples"] == 100
        assert r["mean_p2"] >= r["bound"] == r["q"] ** 2 / (1 << 14), r
        # preconditions are reported, and unmet at this scale
        assert r["precond_ok"] is False
    assert rep.passed
    assert rep.wall_clock < 10 * MINUTE


@criterion(6, "Grover attack scaling at gamma = 14")
def test_exhaustive_matches_monte_carlo():
    mock = MockSigma(2, 2, labelled(b"acceptance", b"exhaustive"))
    qs = [1, 2, 4, 8, 16]
    exact = attack_scaling(mock, qs, 0, 5, exhaustive=True)
    sampled = attack_scaling(mock, qs, 2000, 5)
    for e, s in zip(exact, sampled):
        assert e.samples == 16
        assert e.exact_mean_p1 == Fraction(1, 2)
        assert s.stderr_p2 > 0
        assert abs(float(e.exact_mean_p2) - s.mean_p2) <= 3 * s.stderr_p2, (e.q, e.exact_mean_p2, s.mean_p2)


# 7: multi-round attack


@slow
@criterion(7, "multi-round attack at n = 2, |C^| = 2^10, q' = 8")
def test_multiround_attack():
    rep = run_tightness(seed=1, n=2, C_hat=1 << 10, gamma=10, q_total=16, samples=50)
    (r,) = rep.records
    assert r["q_round"] == 8 and r["samples"] == 50
    assert rep.aggregate["bound"] == 2.0**-8
    assert rep.aggregate["mean_success"] >= 2.0**-8
    assert r["forgeries_valid"]
    assert rep.passed
    assert rep.wall_clock < 10 * MINUTE


# 8: completeness and tamper rejection


@pytest.fixture(scope="module")
def mq():
    return MqScheme(MqParams.random(7, 5, 5, labelled(b"acceptance", b"mq")))


@criterion(8, "completeness and single-bit tamper rejection")
@pytest.mark.parametrize("reps", [1, 2, 3])
def test_fs_completeness(schnorr64, reps, stopwatch):
    spec = sequential_repeat(schnorr64, reps, 2) if reps > 1 else schnorr64
    H = XofOracle()
    for seed in seeds(b"fs%d" % reps):
        w, x = spec.instance_gen(seed)
        assert fs_verify(spec, H, fs_prove(spec, w, H, x, seed))
    assert stopwatch() < 2 * MINUTE


@criterion(8, "completeness and single-bit tamper rejection")
def test_signature_completeness(schnorr64, stopwatch):
    spec = sequential_repeat(schnorr64, 2)
    for seed in seeds(b"sig"):
        kp = keygen(spec, seed)
        assert verify(spec, kp.public_key, seed, sign(spec, kp.secret_key, kp.public_key, seed, seed))
    assert stopwatch() < 2 * MINUTE


@criterion(8, "completeness and single-bit tamper rejection")
@pytest.mark.parametrize("branch", [0, 1])
def test_or_completeness(schnorr64, branch, stopwatch):
    for seed in seeds(b"or%d" % branch):
        w0, x0 = schnorr64.instance_gen(seed + b"0")
        w1, x1 = schnorr64.instance_gen(seed + b"1")
        proof = or_prove(schnorr64, schnorr64, x0, x1, branch, (w0, w1)[branch], seed=seed)
        assert or_verify(schnorr64, schnorr64, x0, x1, proof)
    assert stopwatch() < 2 * MINUTE


@criterion(8, "completeness and single-bit tamper rejection")
def test_mq_completeness(mq, stopwatch):
    rng = random.Random(8)
    H = XofOracle()
    for seed in seeds(b"mq"):
        s, v = mq.instance_gen(seed)
        t = run_interactive(mq, s, v, [rng.randrange(7), rng.randrange(2)], seed)
        assert verify_transcript(mq, t)
        assert fs_verify(mq, H, fs_prove(mq, s, H, v, seed))
    assert stopwatch() < 2 * MINUTE


@criterion(8, "completeness and single-bit tamper rejection")
def test_fs_tamper(schnorr64):
    rng = random.Random(1)
    specs = {1: schnorr64, 2: sequential_repeat(schnorr64, 2, 2), 3: sequential_repeat(schnorr64, 3, 2)}
    accepted = 0
    for k, seed in enumerate(seeds(b"fs-tamper")):
        spec = specs[1 + k % 3]
        w, x = spec.instance_gen(seed)
        p = fs_prove(spec, w, XofOracle(), x, seed)
        target = rng.randrange(len(p.messages) + 1)
        if target == len(p.messages):
            bad = FSProof(x, p.messages, flip_random(p.response, rng))
        else:
            msgs = list(p.messages)
            msgs[target] = flip_random(msgs[target], rng)
            bad = FSProof(x, tuple(msgs), p.response)
        accepted += fs_verify(spec, XofOracle(), bad)
    assert accepted == 0


@criterion(8, "completeness and single-bit tamper rejection")
def test_signature_tamper(schnorr64):
    rng = random.Random(2)
    spec = sequential_repeat(schnorr64, 2)
    accepted = 0
    for seed in seeds(b"sig-tamper"):
        kp = keygen(spec, seed)
        m = b"message " + seed
        sig = sign(spec, kp.secret_key, kp.public_key, m, seed)
        target = rng.randrange(4)
        if target == 3:
            accepted += verify(spec, kp.public_key, flip_random(m, rng), sig)
        elif target == 2:
            accepted += verify(spec, kp.public_key, m, Signature(sig.messages, flip_random(sig.response, rng)))
        else:
            msgs = list(sig.messages)
            msgs[target] = flip_random(msgs[target], rng)
            accepted += verify(spec, kp.public_key, m, Signature(tuple(msgs), sig.response))
    assert accepted == 0


@criterion(8, "completeness and single-bit tamper rejection")
def test_or_tamper(schnorr64):
    rng = random.Random(3)
    accepted = 0
    for k, seed in enumerate(seeds(b"or-tamper")):
        w0, x0 = schnorr64.instance_gen(seed + b"0")
        w1, x1 = schnorr64.instance_gen(seed + b"1")
        b = k % 2
        p = or_prove(schnorr64, schnorr64, x0, x1, b, (w0, w1)[b], seed=seed)
        parts = [p.a0, p.a1, p.z0, p.z1]
        target = rng.randrange(4)
        parts[target] = flip_random(parts[target], rng)
        accepted += or_verify(schnorr64, schnorr64, x0, x1, OrProof(*parts))
    assert accepted == 0


@criterion(8, "completeness and single-bit tamper rejection")
def test_mq_tamper(mq):
    """Flips in the second prover message and the response; see the ledger for the first commitment pair."""
    rng = random.Random(4)
    accepted = 0
    for seed in seeds(b"mq-tamper"):
        s, v = mq.instance_gen(seed)
        t = run_interactive(mq, s, v, [rng.randrange(7), rng.randrange(2)], seed)
        if rng.randrange(2):
            msgs = (t.messages[0], flip_random(t.messages[1], rng))
            bad = Transcript(v, msgs, t.challenges, t.response)
        else:
            bad = Transcript(v, t.messages, t.challenges, flip_random(t.response, rng))
        accepted += verify_transcript(mq, bad)
    assert accepted == 0


# 9: q2 extraction


@criterion(9, "q2 extraction over GF(7), nv = m = 5")
def test_q2_extraction():
    rep = run_q2_extract(seed=1, trials=200, p=7, nv=5, m=5)
    assert rep.aggregate == {"extracted": 200, "pattern_ok": 200}
    assert rep.passed
    assert rep.wall_clock < MINUTE


# 10: constants


@criterion(10, "loss constants table")
def test_constants_table(stopwatch):
    for q in range(4):
        for n in (1, 2, 3):
            assert theoretical_loss("single", q, n) == EXPECTED["single"][q]
            for kind in ("multi", "ordered", "mfs"):
                assert theoretical_loss(kind, q, n) == EXPECTED[kind][n][q], (kind, q, n)
            assert theoretical_loss("attack_c1", q, n) == EXPECTED["attack_c1"][n]
            assert theoretical_loss("attack_c2", q, n) == EXPECTED["attack_c2"][n]
    assert set(LOSS_KINDS) == set(EXPECTED)
    assert stopwatch() < 1.0
