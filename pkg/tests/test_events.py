import io

import pytest

from conftest import make_pass
from pass_patterns.errors import EventRecordError, SchemaError
from pass_patterns.events import (
    COLUMNS,
    SegmentationPolicy,
    build_possessions,
    make_seq_id,
    parse_events,
    read_events,
    serialize_events,
    team_pass_totals,
)

HEADER = ",".join(COLUMNS)


def _csv(*rows: str) -> io.BytesIO:
    return io.BytesIO(("\n".join([HEADER, *rows]) + "\n").encode())


def test_row_maps_to_event():
    (ev,) = parse_events(_csv("g1,home,1,10.0,11.2,50,34,60,30,p7,p9,,true"))
    assert ev.game_id == "g1"
    assert ev.team_id == "home"
    assert ev.period == 1
    assert (ev.t_start, ev.t_end) == (10.0, 11.2)
    assert (ev.x_start, ev.y_start, ev.x_end, ev.y_end) == (50.0, 34.0, 60.0, 30.0)
    assert (ev.passer_id, ev.receiver_id) == ("p7", "p9")
    assert ev.possession_id is None
    assert ev.completed


def test_bad_number_names_the_record():
    stream = _csv(
        "g1,home,1,10.0,11.2,50,34,60,30,p7,p9,,true",
        "g1,home,1,12.0,13.0,abc,34,60,30,p7,p9,,true",
    )
    with pytest.raises(ValueError) as excinfo:
        parse_events(stream)
    assert isinstance(excinfo.value, EventRecordError)
    assert excinfo.value.record == 1
    assert excinfo.value.line == 3
    assert "x_start" in str(excinfo.value)


def test_line_numbers_count_blank_lines():
    stream = _csv(
        "g1,home,1,10.0,11.2,50,34,60,30,p7,p9,,true",
        "",
        "g1,home,1,12.0,13.0,abc,34,60,30,p7,p9,,true",
    )
    with pytest.raises(EventRecordError) as excinfo:
        parse_events(stream)
    assert excinfo.value.record == 1
    assert excinfo.value.line == 4


def test_blank_lines_are_skipped():
    stream = _csv("", "g1,home,1,10.0,11.2,50,34,60,30,p7,p9,,true", "", "g1,home,2,10.0,11.2,50,34,60,30,p7,p9,,true")
    assert [ev.period for ev in parse_events(stream)] == [1, 2]


@pytest.mark.parametrize("period", ["1.6", "x", "nan", "inf", ""])
def test_period_must_be_a_whole_number(period):
    with pytest.raises(EventRecordError, match="period"):
        parse_events(_csv(f"g1,home,{period},10.0,11.2,50,34,60,30,p7,p9,,true"))


def test_whole_float_period_is_accepted():
    (ev,) = parse_events(_csv("g1,home,2.0,10.0,11.2,50,34,60,30,p7,p9,,true"))
    assert ev.period == 2


def test_empty_file():
    assert parse_events(io.BytesIO(b"")) == []
    assert parse_events(io.BytesIO(b""), "json") == []


def test_missing_column():
    stream = io.BytesIO(b"game_id,team_id\ng1,home\n")
    with pytest.raises(SchemaError, match="period"):
        parse_events(stream)


@pytest.mark.parametrize(
    "row, message",
    [
        ("g1,home,1,12.0,11.0,50,34,60,30,p7,p9,,true", "before t_start"),
        ("g1,home,1,-1.0,11.0,50,34,60,30,p7,p9,,true", "negative"),
        ("g1,home,1,10.0,11.0,50,34,60,30,p7,p9,,maybe", "boolean"),
        ("g1,,1,10.0,11.0,50,34,60,30,p7,p9,,true", "required"),
    ],
)
def test_rejected_rows(row, message):
    with pytest.raises(EventRecordError, match=message):
        parse_events(_csv(row))


def test_incomplete_pass_drops_receiver():
    (ev,) = parse_events(_csv("g1,home,1,10.0,11.2,50,34,60,30,p7,p9,,false"))
    assert not ev.completed
    assert ev.receiver_id is None


def test_json_matches_csv(tmp_path):
    events = parse_events(_csv("g1,home,2,10.0,11.2,50,34,60,30,p7,p9,P1,true"))
    path = tmp_path / "events.json"
    path.write_bytes(serialize_events(events, "json"))
    assert read_events(path) == events


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_serialize_is_byte_stable(fmt):
    events = [
        make_pass(0.1, 2.0, 3.333333333, 4.0, t0=0.0, t1=1.25, possession="P1"),
        make_pass(3.333333333, 4.0, 7.0, 8.5, t0=2.0, completed=False),
    ]
    first = serialize_events(events, fmt)
    again = serialize_events(parse_events(io.BytesIO(first), fmt), fmt)
    assert again == first


def test_unknown_format():
    with pytest.raises(ValueError):
        parse_events(io.BytesIO(b"[]"), "xml")


# ── Possessions ───────────────────────────────────────────────────────────────


def test_team_change_breaks_possession():
    events = [
        make_pass(10, 10, 20, 10, t0=0.0, team="A"),
        make_pass(20, 10, 30, 10, t0=3.0, team="A"),
        make_pass(30, 10, 40, 10, t0=6.0, team="B"),
    ]
    seqs = build_possessions(events)
    assert [len(s) for s in seqs] == [2, 1]
    assert [s.team_id for s in seqs] == ["A", "B"]


def test_gap_breaks_possession():
    events = [
        make_pass(10, 10, 20, 10, t0=0.0, t1=1.0),
        make_pass(20, 10, 30, 10, t0=21.0, t1=22.0),
    ]
    seqs = build_possessions(events, SegmentationPolicy(max_gap_seconds=15.0))
    assert [len(s) for s in seqs] == [1, 1]


def test_possession_id_breaks_possession():
    events = [
        make_pass(10, 10, 20, 10, t0=0.0, possession="P1"),
        make_pass(20, 10, 30, 10, t0=2.0, possession="P1"),
        make_pass(30, 10, 40, 10, t0=4.0, possession="P2"),
    ]
    assert [len(s) for s in build_possessions(events)] == [2, 1]
    ignored = SegmentationPolicy(use_provided_possession_id=False)
    assert [len(s) for s in build_possessions(events, ignored)] == [3]


def test_period_change_and_incomplete_pass():
    events = [
        make_pass(10, 10, 20, 10, t0=0.0, period=1),
        make_pass(20, 10, 30, 10, t0=2.0, period=2),
        make_pass(30, 10, 40, 10, t0=4.0, period=2, completed=False),
        make_pass(40, 10, 50, 10, t0=6.0, period=2),
    ]
    seqs = build_possessions(events)
    assert [len(s) for s in seqs] == [1, 1, 1]
    assert all(p.completed for s in seqs for p in s.passes)


def test_seq_ids_count_per_game():
    events = [
        make_pass(10, 10, 20, 10, t0=0.0, team="A"),
        make_pass(20, 10, 30, 10, t0=2.0, team="B"),
        make_pass(10, 10, 20, 10, t0=0.0, team="A", game="G002"),
    ]
    ids = [s.seq_id for s in build_possessions(events)]
    assert ids == [make_seq_id("G001", "A", 0), make_seq_id("G001", "B", 1), make_seq_id("G002", "A", 0)]
    assert ids[0] == "G001:A:0000"


def test_empty_events():
    assert build_possessions([]) == []


def test_team_pass_totals():
    events = [
        make_pass(10, 10, 20, 10, team="A"),
        make_pass(10, 10, 20, 10, team="A", completed=False),
        make_pass(10, 10, 20, 10, team="A", game="G002"),
        make_pass(10, 10, 20, 10, team="B"),
    ]
    assert team_pass_totals(events) == {"A": {"passes": 3, "games": 2}, "B": {"passes": 1, "games": 1}}
