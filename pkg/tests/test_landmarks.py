import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mimickit import (
    FacePart,
    FacePartition,
    FormatError,
    LandmarkFrame,
    LandmarkSequence,
    parse_mediapipe_export,
    read_canonical,
    to_pixel,
    validate_partition,
    write_canonical,
)
from mimickit.landmarks import ParseReport, load_partition

from conftest import random_sequence

DATA = Path(__file__).parent / "data"


# --- export parsing ---------------------------------------------------------

def test_parse_sample_export():
    report = parse_mediapipe_export((DATA / "sample_export.json").read_bytes())
    seq = report.sequence
    assert isinstance(report, ParseReport)
    assert report.out_of_range_count == 0
    assert len(seq) == 2
    assert seq.fps == 25.0
    assert seq.source_width == 640
    assert seq.source_height == 480
    assert seq.topology_size == 4
    np.testing.assert_array_equal(
        seq.frames[0].points, [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6], [0.7, 0.8]]
    )
    np.testing.assert_array_equal(
        seq.frames[1].points, [[0.15, 0.25], [0.35, 0.45], [0.55, 0.65], [0.75, 0.85]]
    )


def _doc(**overrides):
    base = {
        "version": "1",
        "fps": 25,
        "width": 640,
        "height": 480,
        "topology_size": 2,
        "frames": [[[0.1, 0.2], [0.3, 0.4]]],
    }
    base.update(overrides)
    return json.dumps(base).encode()


def test_parse_empty_frames():
    with pytest.raises(FormatError, match="no frames"):
        parse_mediapipe_export(_doc(frames=[]))


def test_parse_inconsistent_point_count_names_frame():
    doc = _doc(
        topology_size=4,
        frames=[
            [[0.1, 0.1], [0.2, 0.2], [0.3, 0.3], [0.4, 0.4]],
            [[0.1, 0.1], [0.2, 0.2], [0.3, 0.3]],
        ],
    )
    with pytest.raises(FormatError, match="frame 2"):
        parse_mediapipe_export(doc)


def test_parse_nan_coordinate_located():
    raw = _doc().decode().replace("0.3", "NaN")
    with pytest.raises(FormatError, match="frame 1 point 1: non-finite x"):
        parse_mediapipe_export(raw)


@pytest.mark.parametrize("field,value", [("fps", 0), ("fps", -1), ("width", 0), ("height", -3)])
def test_parse_rejects_nonpositive_header(field, value):
    with pytest.raises(FormatError):
        parse_mediapipe_export(_doc(**{field: value}))


def test_parse_rejects_unknown_version():
    with pytest.raises(FormatError, match="version"):
        parse_mediapipe_export(_doc(version="2"))


def test_parse_drops_z_coordinate():
    doc = _doc(frames=[[[0.1, 0.2, 9.9], [0.3, 0.4, -9.9]]])
    seq = parse_mediapipe_export(doc).sequence
    np.testing.assert_array_equal(seq.frames[0].points, [[0.1, 0.2], [0.3, 0.4]])


def test_parse_tallies_out_of_range_coordinates():
    doc = _doc(frames=[[[-0.7, 0.2], [0.3, 1.9]]])
    report = parse_mediapipe_export(doc)
    assert report.out_of_range_count == 2
    # values preserved verbatim despite the warning
    np.testing.assert_array_equal(report.sequence.frames[0].points, [[-0.7, 0.2], [0.3, 1.9]])


def test_parse_malformed_document():
    with pytest.raises(FormatError, match="malformed"):
        parse_mediapipe_export(b"{not json")


@settings(max_examples=150, deadline=None)
@given(st.binary(max_size=400))
def test_parse_total_over_garbage(data):
    # fuzz: anything either parses or raises a located FormatError
    try:
        parse_mediapipe_export(data)
    except FormatError:
        pass


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 40))
def test_parse_total_over_corrupted_fixture(seed, flips):
    data = bytearray((DATA / "sample_export.json").read_bytes())
    gen = np.random.default_rng(seed)
    for _ in range(flips):
        data[int(gen.integers(len(data)))] = int(gen.integers(256))
    try:
        parse_mediapipe_export(bytes(data))
    except FormatError:
        pass


# --- canonical round trip ---------------------------------------------------

def test_canonical_round_trip_small():
    seq = parse_mediapipe_export((DATA / "sample_export.json").read_bytes()).sequence
    assert read_canonical(write_canonical(seq)) == seq


def test_canonical_round_trip_478_points_exact():
    seq = random_sequence(seed=7, n_frames=1, topology=478)
    restored = read_canonical(write_canonical(seq))
    assert restored == seq
    np.testing.assert_array_equal(restored.as_array(), seq.as_array())


def test_canonical_round_trip_preserves_timestamps():
    seq = random_sequence(seed=8, n_frames=3, topology=5, with_timestamps=True)
    restored = read_canonical(write_canonical(seq))
    assert [f.timestamp_ms for f in restored.frames] == [0, 40, 80]
    assert restored == seq


def test_canonical_write_is_stable_bytes():
    seq = random_sequence(seed=9, n_frames=2, topology=6)
    assert write_canonical(seq) == write_canonical(seq)


def test_read_canonical_rejects_wrong_format_tag():
    doc = json.loads(write_canonical(random_sequence(seed=1, topology=3)))
    doc["format"] = "other-landmarks"
    with pytest.raises(FormatError, match="mimic-landmarks"):
        read_canonical(json.dumps(doc))


def test_read_canonical_rejects_unknown_version():
    doc = json.loads(write_canonical(random_sequence(seed=1, topology=3)))
    doc["version"] = "99"
    with pytest.raises(FormatError, match="version"):
        read_canonical(json.dumps(doc))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 5), st.integers(1, 24))
def test_canonical_round_trip_property(seed, n_frames, topology):
    seq = random_sequence(seed=seed, n_frames=n_frames, topology=topology)
    assert read_canonical(write_canonical(seq)) == seq


# --- types ------------------------------------------------------------------

def test_sequence_rejects_mismatched_frame():
    frames = (LandmarkFrame([[0.0, 0.0]]), LandmarkFrame([[0.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(ValueError, match="frame 2"):
        LandmarkSequence(frames, 25.0, 10, 10, 1)


def test_frame_rejects_nonfinite():
    with pytest.raises(ValueError, match="non-finite"):
        LandmarkFrame([[0.0, np.nan]])


def test_frame_points_are_immutable():
    frame = LandmarkFrame([[0.1, 0.2]])
    with pytest.raises(ValueError):
        frame.points[0, 0] = 5.0


# --- to_pixel ---------------------------------------------------------------

def test_to_pixel_center():
    frame = LandmarkFrame([[0.5, 0.5]])
    np.testing.assert_array_equal(to_pixel(frame, 512, 512), [[256.0, 256.0]])


def test_to_pixel_origin():
    frame = LandmarkFrame([[0.0, 0.0]])
    np.testing.assert_array_equal(to_pixel(frame, 123, 77), [[0.0, 0.0]])


def test_to_pixel_rectangular():
    frame = LandmarkFrame([[0.25, 0.75]])
    np.testing.assert_array_equal(to_pixel(frame, 640, 480), [[160.0, 360.0]])


# --- partition validation ---------------------------------------------------

def test_validate_disjoint_partition_clean():
    p = FacePartition(
        parts={"a": FacePart(indices=(0, 1)), "b": FacePart(indices=(2, 3))},
        topology_size=4,
    )
    assert validate_partition(p, 4) == []


def test_validate_reports_overlap():
    p = FacePartition(
        parts={"a": FacePart(indices=(1, 7)), "b": FacePart(indices=(7, 9))},
        topology_size=10,
    )
    findings = validate_partition(p, 10)
    assert any("overlap: index 7" in f for f in findings)


def test_validate_reports_edge_endpoint_outside_part():
    p = FacePartition(
        parts={"a": FacePart(indices=(3, 4), edges=((3, 99),))},
        topology_size=100,
    )
    findings = validate_partition(p, 100)
    assert any("edge" in f and "outside part" in f for f in findings)


def test_validate_reports_out_of_range_index():
    p = FacePartition(parts={"a": FacePart(indices=(0, 50))}, topology_size=10)
    findings = validate_partition(p, 10)
    assert any("outside [0, 10)" in f for f in findings)


def test_default_partition_is_valid(face_partition):
    assert face_partition.topology_size == 478
    assert validate_partition(face_partition, 478) == []
    assert set(face_partition.parts) == {"eyebrows", "eyes", "pupils", "nose", "mouth"}


def test_load_partition_rejects_overlap():
    doc = {"topology_size": 4, "parts": {"a": {"indices": [0, 1]}, "b": {"indices": [1]}}}
    with pytest.raises(FormatError, match="overlap"):
        load_partition(json.dumps(doc))
