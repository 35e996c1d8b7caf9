"""Command-line entry point: serve the API, run batch jobs, simulate, replay."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .change import DecayConfig
from .core import GeoPoint
from .engine import Engine, ServiceConfig, run_batch
from .geofilter import FilterConfig
from .learner import LearnerConfig
from .ranker import RankWeights
from .simulate import SimScenario, replay, simulate
from .store import CorruptRecord

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_ENV_OVERRIDES = {
    "HYPERFEED_RADIUS_KM": ("filter", "radius_km", float),
    "HYPERFEED_MAX_AGE_HOURS": ("filter", "max_age_hours", float),
    "HYPERFEED_ALPHA": ("learner", "alpha", float),
    "HYPERFEED_GAMMA": ("learner", "gamma", float),
    "HYPERFEED_EPSILON": ("weights", "epsilon", float),
    "HYPERFEED_SEED": (None, "seed", int),
}


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Build a ServiceConfig from an optional JSON file plus env overrides."""
    env = os.environ if env is None else env
    raw: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))

    sections = {
        "filter": dict(raw.get("filter", {})),
        "weights": dict(raw.get("weights", {})),
        "learner": dict(raw.get("learner", {})),
        "decay": dict(raw.get("decay", {})),
    }
    top = {k: raw[k] for k in ("host", "port", "seed", "test_mode") if k in raw}
    if "data_dir" in raw and raw["data_dir"]:
        top["data_dir"] = Path(raw["data_dir"])

    for var, (section, key, cast) in _ENV_OVERRIDES.items():
        if var in env and env[var] != "":
            if section is None:
                top[key] = cast(env[var])
            else:
                sections[section][key] = cast(env[var])

    return ServiceConfig(
        filter=FilterConfig(**sections["filter"]),
        weights=RankWeights(**sections["weights"]),
        learner=LearnerConfig(**sections["learner"]),
        decay=DecayConfig(**sections["decay"]),
        **top,
    )


@click.group()
def cli():
    """Hyper-local context-aware news recommender."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    cfg = load_config(config_path)
    if host:
        cfg.host = host
    if port:
        cfg.port = port
    app = create_app(Engine(cfg))
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")


@cli.command()
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--top-k", type=int, default=20, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def batch(data_dir, out_dir, workers, top_k, config_path):
    """Rebuild the similarity and base-score tables from the store."""
    cfg = load_config(config_path)
    n_sim, n_base = run_batch(Path(data_dir), Path(out_dir), cfg, workers=workers, top_k=top_k)
    click.echo(f"news_similarity rows: {n_sim}")
    click.echo(f"user_news_base rows: {n_base}")


@cli.command(name="simulate")
@click.option("--users", type=int, default=1, show_default=True)
@click.option("--items", type=int, default=200, show_default=True)
@click.option("--steps", type=int, default=1000, show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def simulate_cmd(users, items, steps, k, seed, out, config_path):
    """Run the synthetic-user harness and write per-step metrics CSV."""
    cfg = load_config(config_path)
    scenario = SimScenario(n_users=users, n_items=items, steps=steps, k=k, seed=seed)
    metrics = simulate(scenario, cfg)
    metrics.write_csv(out)
    click.echo(f"steps: {len(metrics.rows)}")
    click.echo(f"final greedy accuracy: {metrics.final_greedy_accuracy():.3f}")


@cli.command(name="replay")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def replay_cmd(log_path, k, out, config_path):
    """Replay a historical events.jsonl and report offline hit-rate."""
    cfg = load_config(config_path)
    metrics = replay(log_path, k=k, config=cfg)
    metrics.write_csv(out)
    rate = metrics.rows[-1][1] if metrics.rows else 0.0
    click.echo(f"reads: {len(metrics.rows)}")
    click.echo(f"hit rate: {rate:.3f}")


def main(argv=None):
    try:
        return cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except (CorruptRecord, OSError, ValueError) as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
