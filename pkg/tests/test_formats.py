import struct

import numpy as np
import pytest

from specseg.errors import FormatError
from specseg.formats import (SPSG_HEADER_SIZE, load_pgm, load_tensor, parse_pgm, save_pgm,
                             save_tensor)
from specseg.segmap import LabelMap


def test_p2_sample():
    m = parse_pgm(b"P2 2 1 1\n0 1\n")
    np.testing.assert_array_equal(m.labels, [[0, 1]])
    assert m.num_classes == 2


def test_p2_with_comments():
    m = parse_pgm(b"P2\n# a comment\n3 1\n# another\n2\n2 0 1\n", num_classes=3)
    np.testing.assert_array_equal(m.labels, [[2, 0, 1]])


@pytest.mark.parametrize("binary", [True, False])
def test_pgm_round_trip(tmp_path, rng, binary):
    m = LabelMap(rng.integers(0, 6, (16, 16)), 6)
    path = tmp_path / "m.pgm"
    save_pgm(m, path, binary=binary)
    assert load_pgm(path, 6) == m


def test_label_above_class_count_rejected():
    data = b"P5 2 1 255\n" + bytes([0, 7])
    with pytest.raises(FormatError):
        parse_pgm(data, num_classes=3)


@pytest.mark.parametrize("data", [b"P3 1 1 1\n0", b"P5 2 2 255\n\x00", b"P2 2 1", b"", b"P2 2 1 1\n0 9\n"])
def test_malformed_pgm(data):
    with pytest.raises(FormatError):
        parse_pgm(data)


def test_tensor_round_trip(tmp_path, rng):
    field = rng.standard_normal((3, 5, 4))
    path = tmp_path / "f.spsg"
    save_tensor(field, path)
    np.testing.assert_array_equal(load_tensor(path), field)


def test_tensor_header_is_17_bytes(tmp_path):
    path = tmp_path / "f.spsg"
    save_tensor(np.zeros((2, 3, 4)), path)
    raw = path.read_bytes()
    assert SPSG_HEADER_SIZE == 17
    assert len(raw) == 17 + 2 * 3 * 4 * 8
    magic, version, c, h, w = struct.unpack("<4sBIII", raw[:17])
    assert (magic, version, c, h, w) == (b"SPSG", 1, 2, 3, 4)


def test_tensor_payload_order(tmp_path):
    field = np.arange(24, dtype=float).reshape(2, 3, 4)
    path = tmp_path / "f.spsg"
    save_tensor(field, path)
    np.testing.assert_array_equal(np.frombuffer(path.read_bytes()[17:], dtype="<f8"), np.arange(24.0))


def test_truncated_tensor(tmp_path):
    path = tmp_path / "f.spsg"
    save_tensor(np.ones((1, 2, 2)), path)
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(FormatError):
        load_tensor(path)
    path.write_bytes(b"SPS")
    with pytest.raises(FormatError):
        load_tensor(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "f.spsg"
    path.write_bytes(b"XXXX" + bytes(13))
    with pytest.raises(FormatError):
        load_tensor(path)
