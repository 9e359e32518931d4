"""CSV and JSON tables of the season analysis."""

from __future__ import annotations

import json
from dataclasses import asdict, fields
from pathlib import Path
from typing import Iterable

import pandas as pd

from pass_patterns.analytics import PatternCluster, SeasonAnalysis, SpreadRow, TeamSeasonStats
from pass_patterns.discovery.model import team_dir

TABLE1_COLUMNS = [f.name for f in fields(TeamSeasonStats)]
SPREAD_COLUMNS = [f.name for f in fields(SpreadRow)]


def _csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def generate_table1_csv(rows: Iterable[TeamSeasonStats]) -> str:
    return _csv(pd.DataFrame([r.to_dict() for r in rows], columns=TABLE1_COLUMNS))


def generate_table2_csv(counts: dict[tuple[int, int], int]) -> str:
    """Matrix of match counts: one row per n_involved, one overlap_<k> column per n_overlap."""
    if not counts:
        return "n_involved\n"
    matrix = pd.Series(counts).rename_axis(["n_involved", "n_overlap"]).unstack(fill_value=0)
    matrix = matrix.reindex(columns=range(int(matrix.columns.max()) + 1), fill_value=0)
    matrix.columns = [f"overlap_{k}" for k in matrix.columns]
    return _csv(matrix.astype(int).reset_index())


def generate_spreads_csv(rows: Iterable[SpreadRow]) -> str:
    return _csv(pd.DataFrame([asdict(r) for r in rows], columns=SPREAD_COLUMNS))


def generate_clusters_json(clusters: Iterable[PatternCluster]) -> str:
    return json.dumps([c.to_dict() for c in clusters], indent=1, sort_keys=True) + "\n"


def generate_summary_json(analysis: SeasonAnalysis) -> str:
    payload = dict(analysis.summary)
    payload["n_teams"] = len(analysis.table1)
    payload["n_matches"] = sum(r.n_patterns for r in analysis.table1)
    payload["n_clusters"] = len(analysis.clusters)
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def write_table_files(output_dir: Path, analysis: SeasonAnalysis) -> list[str]:
    """Per-team table1.csv under <output_dir>/teams/<team>/, league tables under <output_dir>/league/."""
    log: list[str] = []
    for row in analysis.table1:
        target = team_dir(output_dir, row.team_id)
        target.mkdir(parents=True, exist_ok=True)
        (target / "table1.csv").write_text(generate_table1_csv([row]), encoding="utf-8")
    log.append(f"[OK] table1.csv for {len(analysis.table1)} team(s)")

    league = output_dir / "league"
    league.mkdir(parents=True, exist_ok=True)
    (league / "table1.csv").write_text(generate_table1_csv(analysis.table1), encoding="utf-8")
    (league / "table2.csv").write_text(generate_table2_csv(analysis.table2), encoding="utf-8")
    (league / "spreads.csv").write_text(generate_spreads_csv(analysis.spreads), encoding="utf-8")
    (league / "clusters.json").write_text(generate_clusters_json(analysis.clusters), encoding="utf-8")
    (league / "summary.json").write_text(generate_summary_json(analysis), encoding="utf-8")
    log.append(f"[OK] league tables in {league}")
    return log
