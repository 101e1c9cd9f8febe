"""Framing, challenge derivation, the FS prover/verifier and hash chains."""

import hashlib
import itertools
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsq.encoding import ParseError, frame, parse_frames, round_index
from fsq.fs.oracle import ConstantOracle, OracleTable, ReprogrammedOracle, XofOracle
from fsq.fs.transform import FSProof, challenge_input, derive_challenges, fs_prove, fs_verify, hash_chain
from fsq.protocol.base import ChallengeSpace, ShapeError
from fsq.protocol.schnorr import Schnorr, SchnorrParams
from fsq.protocol.sequential import sequential_repeat


def ref_below(data: bytes, card: int) -> int:
    """Rejection sampling on fixed-width blocks of SHAKE256(data), written out independently."""
    width = max(1, ((card - 1).bit_length() + 7) // 8)
    mask = (1 << (card - 1).bit_length()) - 1
    n = 64
    while True:
        buf = hashlib.shake_256(data).digest(n)
        for k in range(0, n - width + 1, width):
            v = int.from_bytes(buf[k : k + width], "big") & mask
            if v < card:
                return v
        n *= 4


def ref_field(b: bytes) -> bytes:
    return struct.pack(">Q", len(b)) + b


def ref_challenges(x: bytes, messages, card: int) -> list[int]:
    width = max(1, ((card - 1).bit_length() + 7) // 8)
    out, prev = [], x
    for i, a in enumerate(messages):
        c = ref_below(b"FSQ/v1/chal" + struct.pack(">I", i) + ref_field(prev) + ref_field(a), card)
        out.append(c)
        prev = c.to_bytes(width, "big")
    return out


# framing


small_fields = st.lists(st.binary(max_size=6), max_size=4)


@given(small_fields, small_fields)
def test_frame_is_injective(f1, f2):
    if f1 != f2:
        assert frame(*f1) != frame(*f2)


def test_frame_injective_exhaustive_short_inputs():
    """All tuples of up to three fields over {'', 'a', 'b', 'ab'}."""
    alphabet = [b"", b"a", b"b", b"ab"]
    tuples = [t for k in range(4) for t in itertools.product(alphabet, repeat=k)]
    assert len({frame(*t) for t in tuples}) == len(tuples)


@given(small_fields)
def test_parse_inverts_frame(fields):
    assert parse_frames(frame(*fields)) == fields


@given(st.lists(st.binary(min_size=1, max_size=6), min_size=1, max_size=3), st.integers(1, 7))
def test_parse_rejects_truncation(fields, cut):
    # every frame is at least 9 bytes, so the cut lands inside the last one
    with pytest.raises(ParseError):
        parse_frames(frame(*fields)[:-cut])


@given(
    st.integers(0, 5), st.lists(st.binary(max_size=4), min_size=1, max_size=2), st.binary(max_size=4),
    st.integers(0, 5), st.lists(st.binary(max_size=4), min_size=1, max_size=2), st.binary(max_size=4),
)
def test_challenge_inputs_distinct_for_distinct_arguments(i1, p1, a1, i2, p2, a2):
    if (i1, p1, a1) != (i2, p2, a2):
        assert challenge_input(i1, p1, a1) != challenge_input(i2, p2, a2)


def test_challenge_input_layout():
    assert challenge_input(2, [b"pv"], b"msg") == b"\x00\x00\x00\x02" + ref_field(b"pv") + ref_field(b"msg")
    assert challenge_input(0, [b"x"], b"a", ad=b"ctx").endswith(ref_field(b"ctx"))
    assert round_index(1) == b"\x00\x00\x00\x01"


# challenge derivation


def test_single_round_is_classic_fs():
    H = XofOracle(ChallengeSpace(11))
    assert derive_challenges(H, b"x", [b"a"]) == [ref_below(b"FSQ/v1/chal" + challenge_input(0, [b"x"], b"a"), 11)]


def test_constant_oracle_gives_constant_challenges():
    assert derive_challenges(ConstantOracle(3, ChallengeSpace(5)), b"x", [b"a", b"b", b"c"]) == [3, 3, 3]


def test_two_round_kats():
    """Pinned from the independent hashlib reconstruction above."""
    msgs = [b"first", b"second"]
    for card, expected in [(1000003, [325439, 757966]), (11, [4, 6])]:
        assert ref_challenges(b"instance", msgs, card) == expected
        assert derive_challenges(XofOracle(ChallengeSpace(card)), b"instance", msgs) == expected


@settings(max_examples=50)
@given(st.binary(max_size=8), st.lists(st.binary(max_size=8), min_size=1, max_size=4), st.integers(2, 1 << 20))
def test_derivation_matches_reference(x, msgs, card):
    H = XofOracle(ChallengeSpace(card))
    assert derive_challenges(H, x, msgs) == ref_challenges(x, msgs, card)
    assert H.query_count == len(msgs)
    assert derive_challenges(H, x, msgs) == ref_challenges(x, msgs, card)


def test_derivation_needs_a_message():
    with pytest.raises(ShapeError):
        derive_challenges(XofOracle(ChallengeSpace(5)), b"x", [])


def test_associated_data_changes_challenges():
    H = XofOracle(ChallengeSpace(1 << 30))
    assert derive_challenges(H, b"x", [b"a"], ad=b"ctx") != derive_challenges(H, b"x", [b"a"])


# prover and verifier


@pytest.fixture(scope="module")
def schnorr32():
    return Schnorr(SchnorrParams.generate(32, b"fs-tests"))


@pytest.mark.parametrize("reps", [1, 2, 3])
def test_fs_roundtrip_and_query_count(schnorr32, reps):
    spec = sequential_repeat(schnorr32, reps, 2) if reps > 1 else schnorr32
    w, x = spec.instance_gen(b"key")
    H = XofOracle()
    proof = fs_prove(spec, w, H, x, b"coins")
    assert H.query_count == reps
    assert fs_verify(spec, H, proof)
    assert H.query_count == 2 * reps
    assert proof == fs_prove(spec, w, XofOracle(), x, b"coins")
    assert proof.to_bytes() == FSProof.from_bytes(proof.to_bytes()).to_bytes()


def test_fs_rejects_flipped_bits(schnorr32):
    spec = sequential_repeat(schnorr32, 2)
    w, x = spec.instance_gen(b"key")
    H = XofOracle()
    proof = fs_prove(spec, w, H, x, b"coins")
    for bit in range(len(proof.messages[0]) * 8):
        a1 = bytearray(proof.messages[0])
        a1[bit // 8] ^= 1 << (bit % 8)
        assert not fs_verify(spec, H, FSProof(x, (bytes(a1), proof.messages[1]), proof.response))
    for bit in range(len(proof.response) * 8):
        z = bytearray(proof.response)
        z[bit // 8] ^= 1 << (bit % 8)
        assert not fs_verify(spec, H, FSProof(x, proof.messages, bytes(z)))


def test_fs_shape_mismatch(schnorr32):
    w, x = schnorr32.instance_gen(b"k")
    proof = fs_prove(schnorr32, w, XofOracle(), x, b"")
    with pytest.raises(ShapeError):
        fs_verify(sequential_repeat(schnorr32, 2), XofOracle(), proof)


def test_fs_with_associated_data(schnorr32):
    w, x = schnorr32.instance_gen(b"k")
    proof = fs_prove(schnorr32, w, XofOracle(), x, b"", ad=b"session-1")
    assert fs_verify(schnorr32, XofOracle(), proof, ad=b"session-1")
    assert not fs_verify(schnorr32, XofOracle(), proof, ad=b"session-2")


class Recorder(XofOracle):
    def __init__(self, space=None):
        super().__init__(space)
        self.seen = []

    def _evaluate(self, data, space):
        self.seen.append((data, space))
        return super()._evaluate(data, space)


@pytest.mark.parametrize("reps", [1, 2])
def test_oracle_substitution_rejects(toy, reps):
    """Every other value at every queried point, toy group, no padding."""
    spec = sequential_repeat(toy, reps, 0)
    w, x = spec.instance_gen(b"nonzero")
    assert w != 0
    H = Recorder()
    proof = fs_prove(spec, w, H, x, b"coins")
    for data, space in list(H.seen):
        honest = H.query(data, space)
        for other in range(space.cardinality):
            if other != honest:
                assert not fs_verify(spec, ReprogrammedOracle(H, {data: other}), proof)


def test_proof_file_rejects_garbage():
    with pytest.raises(ParseError):
        FSProof.from_bytes(b"FSQX\x01")
    good = FSProof(b"x", (b"a",), b"z").to_bytes()
    with pytest.raises(ParseError):
        FSProof.from_bytes(good[:-1])
    with pytest.raises(ParseError):
        FSProof.from_bytes(good[:4] + b"\x02" + good[5:])


# hash chains


def test_chain_base_case():
    H = XofOracle(ChallengeSpace(64))
    assert hash_chain(H, b"x0", [b"x1"]) == [H.query(frame(b"x0", b"x1"))]


def test_chain_constant_oracle():
    assert hash_chain(ConstantOracle(9, ChallengeSpace(16)), b"x0", [b"1", b"2", b"3"]) == [9, 9, 9]


def test_chain_over_table():
    space = ChallengeSpace(4)
    # h_1 = T[(x0, x1)] and h_2 = T[(enc(h_1), x2)] by direct lookup
    domain = [frame(b"x0", b"x1")] + [frame(space.encode(h), b"x2") for h in range(4)]
    T = OracleTable(domain, [2, 0, 1, 3, 1], 4)
    h1 = T[frame(b"x0", b"x1")]
    h2 = T[frame(space.encode(h1), b"x2")]
    assert (h1, h2) == (2, 3)
    assert hash_chain(T, b"x0", [b"x1", b"x2"]) == [2, 3]
    with pytest.raises(ShapeError):
        hash_chain(T, b"x0", [])


# oracle tables


def test_table_reprogramming():
    T = OracleTable(range(4), [0, 1, 2, 3], 4)
    assert T.reprogram(2, 0)[2] == 0
    assert T.reprogram(1, T[1]) == T
    assert T.reprogram(0, 3).reprogram(1, 2) == T.reprogram(1, 2).reprogram(0, 3)
    assert T.reprogram_multi((0, 1), (3, 2)) == T.reprogram(0, 3).reprogram(1, 2)
    with pytest.raises(ValueError):
        T.reprogram_multi((1, 1), (0, 0))


def test_enumerate_all_tables():
    tables = list(OracleTable.enumerate_all(("a", "b"), 3))
    assert len(tables) == 9 == len(set(tables))
