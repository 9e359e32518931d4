import json

import pytest
from PIL import Image

from conftest import THREE_PASSES, densified, make_match, make_result
from pass_patterns.analytics import PatternCluster, analyze
from pass_patterns.discovery import find_matches
from pass_patterns.discovery.model import Segment
from pass_patterns.errors import EmptyInput, MissingArtifact
from pass_patterns.generators.charts import render_overlap_chart, render_spread_scatter, write_chart_files
from pass_patterns.generators.pitch import point_roles, render_match, write_match_files
from pass_patterns.generators.tables import (
    TABLE1_COLUMNS,
    generate_table1_csv,
    generate_table2_csv,
    write_table_files,
)
from pass_patterns.style import PitchStyle, team_color


# ── Pitch drawings ────────────────────────────────────────────────────────────


def test_point_roles_walk_to_the_nearest_original():
    seq = densified(THREE_PASSES)
    roles = point_roles(seq, Segment(seq.seq_id, 1, 5))
    assert roles == ["pre"] + ["pattern"] * 5 + ["post", "post"] + ["background"] * 4


def test_whole_sequence_has_no_context_points():
    seq = densified(THREE_PASSES)
    roles = point_roles(seq, Segment(seq.seq_id, 0, len(seq) - 1))
    assert set(roles) == {"pattern"}


def test_render_match(line_pair):
    a, b = line_pair
    (m,) = find_matches(a, b)
    seqs = {a.seq_id: a, b.seq_id: b}
    svg = render_match(m, seqs)
    assert svg.count('class="pattern"') == len(m.reference) + len(m.found)
    assert 'class="pre"' not in svg
    assert 'class="post"' not in svg
    # originals are triangles, virtual points circles
    assert svg.count('<polygon class="pattern"') == 2 * sum(p.is_original for p in a.points)
    assert render_match(m, seqs) == svg


def test_render_match_needs_both_sequences(line_pair):
    a, b = line_pair
    (m,) = find_matches(a, b)
    with pytest.raises(MissingArtifact, match=b.seq_id):
        render_match(m, {a.seq_id: a})


def test_write_match_files(tmp_path, line_pair):
    a, b = line_pair
    result = make_result("A", find_matches(a, b))
    written = write_match_files(tmp_path, result, {a.seq_id: a, b.seq_id: b}, png=True)
    (svg,) = written
    assert svg.parent == tmp_path / "teams" / "A" / "matches"
    assert svg.name == f"{result.matches[0].match_id}.svg"
    with Image.open(svg.with_suffix(".png")) as img:
        assert img.width > img.height


def test_write_match_files_replaces_old_drawings(tmp_path, line_pair):
    a, b = line_pair
    seqs = {a.seq_id: a, b.seq_id: b}
    write_match_files(tmp_path, make_result("A", find_matches(a, b)), seqs, png=True)
    assert write_match_files(tmp_path, make_result("A", []), seqs) == []
    assert not list((tmp_path / "teams" / "A" / "matches").iterdir())


def test_pitch_style_validation():
    with pytest.raises(ValueError):
        PitchStyle(pre="#1e88e5")
    with pytest.raises(ValueError):
        PitchStyle(original_marker="circle")
    style = PitchStyle()
    assert style.to_px(0, 100) == (style.margin_m * style.scale, style.margin_m * style.scale)


# ── Charts ────────────────────────────────────────────────────────────────────


def test_spread_scatter_places_the_marker():
    svg = render_spread_scatter([("A", 65.0, 0.0)])
    assert svg.count('class="marker"') == 1
    assert 'data-x="65.00" data-y="0.00" cx="316.00" cy="436.00"' in svg
    assert team_color("A") in svg


def test_spread_scatter_clips_out_of_range():
    svg = render_spread_scatter([("A", -5.0, 120.0)])
    assert 'class="marker clipped" data-x="-5.00" data-y="120.00" cx="56.00" cy="36.00"' in svg


def test_overlap_chart_places_the_cluster():
    cluster = PatternCluster(
        cluster_id="A-c000",
        team_id="A",
        segments=(),
        ranges=tuple(Segment(s, 0, 9) for s in "ABCDE"),
        overlap_profile={4: 0.1, 5: 0.9},
    )
    svg = render_overlap_chart([cluster])
    assert 'data-x="5.00" data-y="90.00" cx="256.00" cy="76.00"' in svg
    assert "<title>A-c000</title>" in svg


def test_charts_refuse_empty_input(tmp_path):
    with pytest.raises(EmptyInput):
        render_spread_scatter([])
    with pytest.raises(EmptyInput):
        render_overlap_chart([])
    log = write_chart_files(tmp_path, [], [])
    assert [line.split(" ", 1)[0] for line in log] == ["[SKIP]", "[SKIP]"]
    assert not (tmp_path / "spreads.svg").exists()


def test_team_names_are_escaped():
    svg = render_spread_scatter([("<A&B>", 10.0, 10.0)])
    assert "&lt;A&amp;B&gt;" in svg
    assert "<A&B>" not in svg


# ── Tables ────────────────────────────────────────────────────────────────────


def test_table2_matrix():
    csv = generate_table2_csv({(2, 0): 1, (2, 2): 2, (4, 2): 1})
    assert csv == "n_involved,overlap_0,overlap_1,overlap_2\n2,1,0,2\n4,0,0,1\n"
    assert generate_table2_csv({}) == "n_involved\n"


def test_table1_header_without_rows():
    assert generate_table1_csv([]) == ",".join(TABLE1_COLUMNS) + "\n"


def test_write_table_files(tmp_path):
    results = [
        make_result("A", [make_match(("G001:A:0000", 0, 9), ("G001:A:0001", 0, 9), "A")]),
        make_result("B", [make_match(("G001:B:0000", 0, 9), ("G001:B:0001", 0, 9), "B", ((10, 50), (75, 50)))]),
    ]
    analysis = analyze(results, {"A": {"passes": 100, "games": 1}, "B": {"passes": 300, "games": 1}})
    log = write_table_files(tmp_path, analysis)
    assert all(line.startswith("[OK]") for line in log)

    team_table = (tmp_path / "teams" / "A" / "table1.csv").read_text().splitlines()
    assert len(team_table) == 2
    assert team_table[1].startswith("A,1,")
    league = tmp_path / "league"
    assert len((league / "table1.csv").read_text().splitlines()) == 3
    assert (league / "table2.csv").read_text() == "n_involved,overlap_0,overlap_1,overlap_2\n2,0,0,2\n"
    spreads = (league / "spreads.csv").read_text().splitlines()
    assert spreads[0] == "team_id,match_id,side,dx,dy,duration_s,length_m,fte"
    clusters = json.loads((league / "clusters.json").read_text())
    assert [c["occurrences"] for c in clusters] == [2, 2]
    summary = json.loads((league / "summary.json").read_text())
    assert (summary["n_teams"], summary["n_matches"], summary["n_clusters"]) == (2, 2, 2)


def test_table_files_are_stable(tmp_path):
    results = [make_result("A", [make_match(("G001:A:0000", 0, 9), ("G001:A:0001", 0, 9), "A")])]
    first, second = tmp_path / "one", tmp_path / "two"
    write_table_files(first, analyze(results))
    write_table_files(second, analyze(results))
    for name in ("table1.csv", "table2.csv", "spreads.csv", "clusters.json", "summary.json"):
        assert (first / "league" / name).read_bytes() == (second / "league" / name).read_bytes()
