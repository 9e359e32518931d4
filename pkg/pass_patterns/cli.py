"""CLI entry point for Pass Pattern Miner."""

import argparse
import json
import logging
import shutil
import sys
from pathlib import Path

from pass_patterns import __version__
from pass_patterns.analytics import analyze
from pass_patterns.config import RunConfig, build_run_config, load_config
from pass_patterns.discovery import DiscoveryResult, discover_team
from pass_patterns.discovery.model import team_dir
from pass_patterns.errors import InvariantViolation, MissingArtifact, PassPatternError
from pass_patterns.events import build_possessions, read_events, serialize_events, team_pass_totals
from pass_patterns.generators.charts import write_chart_files
from pass_patterns.generators.pitch import write_match_files
from pass_patterns.generators.tables import write_table_files
from pass_patterns.preprocess import DensifiedSequence, prepare_sequences, sequences_from_json, sequences_to_json
from pass_patterns.style import PitchStyle
from pass_patterns.synth import generate_season

# ── ANSI helpers ──────────────────────────────────────────────────────────────

BOLD = "\033[1m"
DIM = "\033[2m"
RESET = "\033[0m"
RED = "\033[31m"
GREEN = "\033[32m"
YELLOW = "\033[33m"
CYAN = "\033[36m"

def _print_header() -> None:
    print()
    print(f"{BOLD}{CYAN}  Pass Pattern Miner{RESET}  {DIM}v{__version__}{RESET}")
    print(f"{DIM}  Recurring pass sequences of soccer teams from event logs.{RESET}")
    print()


def _print_log(lines: list[str]) -> None:
    colors = {"[OK]": GREEN, "[SKIP]": YELLOW, "[FAIL]": RED}
    for line in lines:
        tag = line.split(" ", 1)[0]
        color = colors.get(tag)
        print(f"  {color}{tag}{RESET}{line[len(tag):]}" if color else f"  {line}")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ── Artifacts ─────────────────────────────────────────────────────────────────


def _sequences_path(cfg: RunConfig) -> Path:
    return cfg.out / "ingest" / "sequences.json"


def _totals_path(cfg: RunConfig) -> Path:
    return cfg.out / "ingest" / "team_totals.json"


def load_sequences(cfg: RunConfig) -> list[DensifiedSequence]:
    path = _sequences_path(cfg)
    if not path.exists():
        raise MissingArtifact(f"{path} not found; run `pass-patterns ingest` first")
    return sequences_from_json(path.read_text(encoding="utf-8"))


def load_results(cfg: RunConfig) -> list[DiscoveryResult]:
    teams = cfg.out / "teams"
    paths = sorted(teams.glob("*/discovery.json")) if teams.exists() else []
    if cfg.team is not None:
        paths = [p for p in paths if p.parent == team_dir(cfg.out, cfg.team)]
    if not paths:
        raise MissingArtifact(f"no discovery results under {teams}; run `pass-patterns discover` first")
    return [DiscoveryResult.from_json(p.read_text(encoding="utf-8")) for p in paths]


def _drop_stale_teams(cfg: RunConfig, teams: list[str]) -> None:
    """Remove team outputs left by an earlier discover run over other teams."""
    root = cfg.out / "teams"
    if not root.exists():
        return
    keep = {team_dir(cfg.out, team) for team in teams}
    for stale in sorted(p for p in root.iterdir() if p.is_dir() and p not in keep):
        shutil.rmtree(stale)
        print(f"    {DIM}removed stale results in {stale}{RESET}")


def load_totals(cfg: RunConfig) -> dict[str, dict[str, int]]:
    path = _totals_path(cfg)
    if not path.exists():
        logging.getLogger(__name__).warning("%s not found; season pass totals default to 0", path)
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


# ── Stages ────────────────────────────────────────────────────────────────────


def cmd_ingest(cfg: RunConfig) -> int:
    events = []
    for path in cfg.require_inputs():
        events.extend(read_events(path, cfg.input_format))
    possessions = build_possessions(events, cfg.segmentation)
    seqs = prepare_sequences(possessions, cfg.field, cfg.densify_step)

    _write(_sequences_path(cfg), sequences_to_json(seqs))
    _write(_totals_path(cfg), json.dumps(team_pass_totals(events), indent=1, sort_keys=True) + "\n")
    teams = sorted({s.team_id for s in seqs})
    print(f"  {BOLD}Ingested{RESET} {len(events)} passes into {len(seqs)} possessions of {len(teams)} team(s)")
    print(f"  {DIM}{_sequences_path(cfg)}{RESET}")
    return 0


def cmd_discover(cfg: RunConfig) -> int:
    if cfg.input_paths:
        cmd_ingest(cfg)
    seqs = load_sequences(cfg)
    teams = sorted({s.team_id for s in seqs})
    if cfg.team is not None:
        if cfg.team not in teams:
            raise ValueError(f"team {cfg.team!r} not found; known teams: {', '.join(teams)}")
        teams = [cfg.team]

    print(f"  {BOLD}Mining {len(teams)} team(s) with {cfg.jobs} worker(s)...{RESET}")
    for team in teams:
        result = discover_team([s for s in seqs if s.team_id == team], cfg.match, cfg.jobs)
        _write(team_dir(cfg.out, team) / "discovery.json", result.to_json())
        print(f"    {team}  {GREEN}{len(result.matches)} patterns{RESET}")
    _drop_stale_teams(cfg, teams)
    print()
    return 0


def cmd_analyze(cfg: RunConfig) -> int:
    results = load_results(cfg)
    analysis = analyze(results, load_totals(cfg), cfg.field, cfg.per_occurrence)
    print(f"  {BOLD}Season tables{RESET} {DIM}({'per occurrence' if cfg.per_occurrence else 'reference side'}){RESET}")
    for row in analysis.table1:
        flag = f"  {DIM}no patterns{RESET}" if row.no_patterns else ""
        print(
            f"    {row.team_id}  {row.n_patterns} patterns  "
            f"{row.mean_passes:.2f}({row.std_passes:.2f}) passes  {row.n_fte} FTE{flag}"
        )
    regression = analysis.summary.get("regression")
    if regression:
        print(f"    {DIM}passes vs patterns R^2 = {regression['r2']:.3f}{RESET}")
    _print_log(write_table_files(cfg.out, analysis))
    print()
    return 0


def cmd_report(cfg: RunConfig) -> int:
    results = load_results(cfg)
    if not any(r.matches for r in results):
        print(f"  {YELLOW}No patterns to draw.{RESET} {DIM}Nothing written.{RESET}")
        return 0
    seqs = {s.seq_id: s for s in load_sequences(cfg)}
    style = PitchStyle(field=cfg.field)
    log = []
    for result in results:
        written = write_match_files(cfg.out, result, seqs, style, png=cfg.png)
        log.append(f"[OK] {result.team_id}: {len(written)} match drawing(s)")
    analysis = analyze(results, load_totals(cfg), cfg.field, cfg.per_occurrence)
    spreads = [(row.team_id, row.dx, row.dy) for row in analysis.spreads]
    log.extend(write_chart_files(cfg.out / "league", spreads, analysis.clusters))
    _print_log(log)
    print()
    return 0


def cmd_synth(cfg: RunConfig) -> int:
    events, truth = generate_season(cfg.synth, cfg.field)
    target = cfg.out / "synth"
    target.mkdir(parents=True, exist_ok=True)
    (target / "season.csv").write_bytes(serialize_events(events, "csv"))
    _write(target / "ground_truth.json", truth.to_json())
    kind = "null season" if cfg.synth.null else f"{len(truth.plants)} planted copies"
    print(f"  {BOLD}Synthesized{RESET} {len(events)} passes, {kind} {DIM}(seed {cfg.synth.seed}){RESET}")
    print(f"  {DIM}{target / 'season.csv'}{RESET}")
    return 0


def cmd_run(cfg: RunConfig) -> int:
    cfg.require_inputs()
    for stage in (cmd_discover, cmd_analyze, cmd_report):
        code = stage(cfg)
        if code:
            return code
    return 0


COMMANDS = {
    "ingest": (cmd_ingest, "Parse events into densified possession sequences"),
    "discover": (cmd_discover, "Mine recurring patterns per team"),
    "analyze": (cmd_analyze, "Season tables from discovery results"),
    "report": (cmd_report, "Pitch drawings and league charts"),
    "synth": (cmd_synth, "Write a synthetic season with planted patterns"),
    "run": (cmd_run, "All stages: ingest, discover, analyze, report"),
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="*", help="Pass-event files (CSV or JSON)")
    common.add_argument("-c", "--config", help="TOML config file with dotted keys")
    common.add_argument("-o", "--out", help="Output directory (default: out)")
    common.add_argument("-j", "--jobs", type=int, help="Worker processes for discovery")
    common.add_argument("--seed", type=int, help="Random seed for synth")
    common.add_argument("--team", help="Only process this team")
    common.add_argument("--per-occurrence", action="store_true", default=None, help="Count both segments of every match")
    common.add_argument("--png", action="store_true", default=None, help="Also write PNG previews of match drawings")
    common.add_argument("--null", action="store_true", default=None, help="synth: band-separated random walks without patterns")
    for flag, kind in (
        ("local-threshold", float),
        ("global-threshold", float),
        ("min-positions", int),
        ("max-outlier-run", int),
        ("max-outlier-fraction", float),
        ("max-stall", int),
    ):
        common.add_argument(f"--{flag}", type=kind, help=f"Override match.{flag.replace('-', '_')}")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        prog="pass-patterns",
        description="Pass Pattern Miner - Discover recurring pass patterns in soccer event logs.",
    )
    parser.add_argument("-V", "--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    _print_header()

    try:
        file_values = load_config(Path(args.config)) if args.config else {}
        cfg = build_run_config(
            file_values,
            {
                "input.paths": args.inputs or None,
                "run.out": args.out,
                "run.jobs": args.jobs,
                "run.seed": args.seed,
                "run.team": args.team,
                "run.per_occurrence": args.per_occurrence,
                "run.png": args.png,
                "synth.null": args.null,
                "match.local_threshold": args.local_threshold,
                "match.global_threshold": args.global_threshold,
                "match.min_positions": args.min_positions,
                "match.max_outlier_run": args.max_outlier_run,
                "match.max_outlier_fraction": args.max_outlier_fraction,
                "match.max_stall": args.max_stall,
            },
        )
        handler, _ = COMMANDS[args.command]
        return handler(cfg)
    except InvariantViolation as exc:
        print(f"  {RED}Internal error:{RESET} {exc}")
        return 2
    except (PassPatternError, OSError, ValueError) as exc:
        print(f"  {RED}Error:{RESET} {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
