"""Command-line front end.

Subcommands: generate | train | rank | attack | spread | reproduce.
Configuration is a single JSON document (schema_version 1); CLI flags
override config keys. Every command honors --seed, writes files atomically
(temp file + rename), and two runs with identical config and seed produce
byte-identical outputs. Exit codes: 0 success, 1 usage error, 2 data error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import centrality, evaluation, pipeline, sir
from .embedding import embed_graph, write_embedding_csv
from .errors import DataError, UsageError, VitalnodesError
from .graphs import Graph, NodeMap, generate_ba, load_edge_list_path, save_edge_list
from .nn import GatRegressor, GcnRegressor, load_checkpoint, save_checkpoint
from .rng import derive_seed

log = logging.getLogger("vitalnodes")

METHODS = ("HC", "DC", "CI", "CC", "EC", "BC", "KSHELL", "IKS",
           "GAT", "GCN", "GEHC", "GNNE", "RANDOM")

_SEED_BA = 11
_SEED_LABELS = 12
_SEED_EMBEDDING = 13
_SEED_SPREAD = 14
_SEED_RANDOM = 15

SCHEMA_VERSION = 1

DEFAULT_CONFIG: dict = {
    "schema_version": SCHEMA_VERSION,
    "seed": 7,
    "output_dir": None,  # falls back to $VITALNODES_OUT or ./runs
    "train_network": {"n": 1000, "m": 2},
    "label_runs": 1000,
    "methods": list(METHODS),
    "datasets": [],
    "ci_radius": 2,
    "train": {
        "lr": 0.001,
        "weight_decay": 0.0005,
        "epochs_feature": 500,
        "epochs_task": 2000,
        "gcn_hidden": 16,
        "feature_dim": 64,
        "gat_hidden": 16,
        "gat_heads": 2,
        "gcn_layers": 2,
        "gat_layers": 2,
    },
    "sir": {
        "beta": None,
        "gamma": 1.0,
        "runs": 1000,
        "max_steps": 10000,
        "top_frac": 0.05,
    },
    "evaluation": {
        "curve_step": 0.02,
        "lcc_threshold": 0.01,
        "efficiency_threshold_frac": 0.01,
    },
    "embedding": {
        "dim": 64,
        "walks_per_node": 10,
        "walk_length": 80,
        "window": 5,
        "negatives": 5,
        "epochs": 5,
        "lr": 0.025,
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | None, overrides: dict | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                user = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read config {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"config {path!r} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise DataError("config root must be a JSON object")
        unknown = set(user) - set(DEFAULT_CONFIG)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg = _merge(cfg, user)
    if overrides:
        cfg = _merge(cfg, {k: v for k, v in overrides.items() if v is not None})
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise DataError(
            f"unsupported config schema_version {cfg.get('schema_version')!r}; "
            f"expected {SCHEMA_VERSION}")
    bad = [m for m in cfg["methods"] if m not in METHODS]
    if bad:
        raise UsageError(
            f"unknown methods {bad}; valid methods: {', '.join(METHODS)}")
    for ds in cfg["datasets"]:
        if not isinstance(ds, dict) or "name" not in ds or "path" not in ds:
            raise DataError("each dataset needs 'name' and 'path'")
        if not os.path.exists(ds["path"]):
            raise DataError(f"dataset file not found: {ds['path']}")
    tn = cfg["train_network"]
    if tn["n"] <= tn["m"]:
        raise UsageError("train_network.n must exceed train_network.m")
    if cfg["label_runs"] < 1:
        raise UsageError("label_runs must be >= 1")


def train_config_from(cfg: dict) -> pipeline.TrainConfig:
    t = cfg["train"]
    return pipeline.TrainConfig(
        lr=t["lr"], weight_decay=t["weight_decay"],
        epochs_feature=t["epochs_feature"], epochs_task=t["epochs_task"],
        gcn_hidden=t["gcn_hidden"], feature_dim=t["feature_dim"],
        gat_hidden=t["gat_hidden"], gat_heads=t["gat_heads"],
        gcn_layers=t["gcn_layers"], gat_layers=t["gat_layers"],
        seed=cfg["seed"])


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_curve_csv(path: Path, curve: evaluation.AttackCurve) -> None:
    lines = ["r,value"]
    lines += [f"{float(r)!r},{float(v)!r}"
              for r, v in zip(curve.r, curve.values)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_spread_csv_path(path: Path, curve: sir.SpreadCurve) -> None:
    lines = ["t,F_mean"]
    lines += [f"{int(t)},{float(f)!r}" for t, f in zip(curve.t, curve.f)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_thresholds_csv(path: Path, rows: list[evaluation.MethodResult]) -> None:
    lines = ["method,lcc_removal_ratio,lcc_reached,"
             "efficiency_removal_ratio,efficiency_reached,spread_steady"]
    for row in rows:
        lines.append(
            f"{row.method},{row.lcc_removal_ratio!r},{int(row.lcc_reached)},"
            f"{row.efficiency_removal_ratio!r},{int(row.efficiency_reached)},"
            f"{row.spread_steady!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_ranking_file(path: Path, ranking: centrality.RankedList,
                       nodemap: NodeMap) -> None:
    import io

    buf = io.StringIO()
    centrality.write_ranking_csv(ranking, nodemap, buf)
    atomic_write_text(path, buf.getvalue())


def _resolve_out_dir(cfg_value: str | None, flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    if cfg_value:
        return Path(cfg_value)
    return Path(os.environ.get("VITALNODES_OUT", "runs"))


def make_run_dir(base: Path, run_name: str | None) -> Path:
    name = run_name or time.strftime("run-%Y%m%d-%H%M%S")
    run_dir = base / name
    if run_dir.exists():
        raise UsageError(f"run directory already exists: {run_dir}")
    run_dir.mkdir(parents=True)
    return run_dir


class RankContext:
    """Shared lazily-computed state for ranking one dataset under many
    methods: embeddings, the retrained feature extractor, checkpoints."""

    def __init__(self, g: Graph, nodemap: NodeMap, cfg: dict,
                 checkpoint_dir: Path | None,
                 feature_cache: Path | None = None):
        self.g = g
        self.nodemap = nodemap
        self.cfg = cfg
        self.checkpoint_dir = checkpoint_dir
        self.feature_cache = feature_cache
        self._embedding = None
        self._features = None
        self._models: dict[str, object] = {}

    @property
    def computed_embedding(self):
        """The embedding table if some method already needed it."""
        return self._embedding

    def embedding(self):
        if self._embedding is None:
            e = self.cfg["embedding"]
            log.info("computing random-walk embedding (d=%d)", e["dim"])
            self._embedding = embed_graph(
                self.g, dim=e["dim"], walks_per_node=e["walks_per_node"],
                walk_length=e["walk_length"], window=e["window"],
                negatives=e["negatives"], epochs=e["epochs"], lr=e["lr"],
                seed=derive_seed(self.cfg["seed"], _SEED_EMBEDDING))
        return self._embedding

    def _checkpoint(self, filename: str, expect_kind: type):
        if filename in self._models:
            return self._models[filename]
        if self.checkpoint_dir is None:
            raise UsageError(
                f"method needs a trained checkpoint ({filename}); pass "
                "--checkpoint-dir or run the train command first")
        model = load_checkpoint(str(self.checkpoint_dir / filename))
        if not isinstance(model, expect_kind):
            raise DataError(f"{filename} holds the wrong model kind")
        self._models[filename] = model
        return model

    def features(self) -> np.ndarray:
        if self._features is None:
            if self.feature_cache is not None and self.feature_cache.exists():
                log.info("loading cached features from %s", self.feature_cache)
                self._features = np.load(self.feature_cache)
            else:
                log.info("training per-network feature extractor")
                extraction = pipeline.train_feature_extractor(
                    self.g, train_config_from(self.cfg))
                self._features = extraction.features
                if self.feature_cache is not None:
                    tmp = self.feature_cache.with_suffix(".tmp.npy")
                    np.save(tmp, self._features)
                    os.replace(tmp, self.feature_cache)
        return self._features

    def ranking(self, method: str) -> centrality.RankedList:
        g = self.g
        if method == "DC":
            return centrality.degree_centrality(g)
        if method == "HC":
            return centrality.harmonic(g)
        if method == "CC":
            return centrality.closeness(g)
        if method == "EC":
            return centrality.eigenvector(g)
        if method == "BC":
            return centrality.betweenness(g)
        if method == "CI":
            return centrality.collective_influence(g, self.cfg["ci_radius"])
        if method == "KSHELL":
            return centrality.k_shell(g)
        if method == "IKS":
            return centrality.iks(g)
        if method == "RANDOM":
            return centrality.random_ranking(
                g, derive_seed(self.cfg["seed"], _SEED_RANDOM))
        if method == "GEHC":
            return centrality.gehc(g, self.embedding().vectors)
        if method == "GCN":
            model = self._checkpoint("baseline_gcn.json", GcnRegressor)
            return pipeline.rank_by_output(g, self.embedding().vectors, model)
        if method == "GAT":
            model = self._checkpoint("baseline_gat.json", GatRegressor)
            return pipeline.rank_by_output(g, self.embedding().vectors, model)
        if method == "GNNE":
            task = self._checkpoint("task_model.json", GatRegressor)
            return pipeline.rank_gnne(g, self.features(), task)
        raise UsageError(
            f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")


def _load_dataset(path: str) -> tuple[Graph, NodeMap]:
    log.info("loading dataset %s", path)
    g, nodemap = load_edge_list_path(path)
    log.info("loaded graph: n=%d m=%d", g.n, g.m)
    return g, nodemap


def cmd_generate(args) -> int:
    g = generate_ba(args.n, args.m, args.seed)
    import io

    buf = io.StringIO()
    save_edge_list(g, NodeMap.identity(g.n), buf)
    atomic_write_text(Path(args.out), buf.getvalue())
    log.info("wrote %s (n=%d m=%d)", args.out, g.n, g.m)
    return 0


def train_models(cfg: dict, run_dir: Path) -> None:
    """Generate the training network, simulate labels, fit the task model
    and both learned baselines, and write all checkpoints."""
    tn = cfg["train_network"]
    train_cfg = train_config_from(cfg)
    ba = generate_ba(tn["n"], tn["m"], derive_seed(cfg["seed"], _SEED_BA))
    import io

    buf = io.StringIO()
    save_edge_list(ba, NodeMap.identity(ba.n), buf)
    atomic_write_text(run_dir / "ba_train.txt", buf.getvalue())
    log.info("training network: n=%d m=%d", ba.n, ba.m)

    beta = cfg["sir"]["beta"]
    log.info("simulating %d-run SIR labels per node", cfg["label_runs"])
    labels = sir.sir_node_scores(
        ba, beta=beta, runs=cfg["label_runs"],
        base_seed=derive_seed(cfg["seed"], _SEED_LABELS),
        gamma=cfg["sir"]["gamma"], max_steps=cfg["sir"]["max_steps"])
    label_lines = ["node_label,score"]
    label_lines += [f"{i},{float(x)!r}" for i, x in enumerate(labels)]
    atomic_write_text(run_dir / "labels_train.csv", "\n".join(label_lines) + "\n")

    log.info("training feature extractor (%d epochs)", train_cfg.epochs_feature)
    extraction = pipeline.train_feature_extractor(ba, train_cfg)
    log.info("feature extractor loss %.4f -> %.4f",
             extraction.losses[0], extraction.losses[-1])
    log.info("training task model (%d epochs)", train_cfg.epochs_task)
    task = pipeline.train_task_model(ba, extraction.features, labels, train_cfg)
    log.info("task model loss %.6f -> %.6f", task.losses[0], task.losses[-1])

    ckpt_dir = run_dir / "checkpoints"
    ckpt_dir.mkdir(exist_ok=True)
    save_checkpoint(task.model, str(ckpt_dir / "task_model.json"))

    emb_cfg = cfg["embedding"]
    log.info("embedding the training network for the learned baselines")
    emb = embed_graph(ba, dim=emb_cfg["dim"],
                      walks_per_node=emb_cfg["walks_per_node"],
                      walk_length=emb_cfg["walk_length"],
                      window=emb_cfg["window"], negatives=emb_cfg["negatives"],
                      epochs=emb_cfg["epochs"], lr=emb_cfg["lr"],
                      seed=derive_seed(cfg["seed"], _SEED_EMBEDDING))
    for kind, fname in (("gcn", "baseline_gcn.json"), ("gat", "baseline_gat.json")):
        log.info("training %s baseline", kind)
        model, _ = pipeline.train_output_regressor(kind, ba, emb.vectors,
                                                   labels, train_cfg)
        save_checkpoint(model, str(ckpt_dir / fname))
    log.info("checkpoints written to %s", ckpt_dir)


def cmd_train(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    run_dir = make_run_dir(_resolve_out_dir(cfg["output_dir"], args.out_dir),
                           args.run_name)
    atomic_write_text(run_dir / "config.json",
                      json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    train_models(cfg, run_dir)
    print(run_dir)
    return 0


def cmd_rank(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    if args.method not in METHODS:
        raise UsageError(f"unknown method {args.method!r}; "
                         f"valid methods: {', '.join(METHODS)}")
    g, nodemap = _load_dataset(args.dataset)
    ctx = RankContext(
        g, nodemap, cfg,
        Path(args.checkpoint_dir) if args.checkpoint_dir else None,
        Path(args.feature_cache) if args.feature_cache else None)
    ranking = ctx.ranking(args.method)
    write_ranking_file(Path(args.out), ranking, nodemap)
    log.info("wrote %s", args.out)
    return 0


def _read_rankings(paths: list[str], nodemap: NodeMap) -> dict[str, centrality.RankedList]:
    rankings: dict[str, centrality.RankedList] = {}
    for path in paths:
        name = Path(path).stem
        if name.startswith("ranking_"):
            name = name[len("ranking_"):]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                rankings[name] = centrality.read_ranking_csv(fh, nodemap)
        except OSError as exc:
            raise DataError(f"cannot read ranking {path!r}: {exc}") from exc
    return rankings


def cmd_attack(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    g, nodemap = _load_dataset(args.dataset)
    rankings = _read_rankings(args.rankings, nodemap)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ev = cfg["evaluation"]
    mu0 = evaluation.efficiency(g)
    rows = []
    for name, ranking in rankings.items():
        if args.metric in ("lcc", "both"):
            curve = evaluation.lcc_curve(g, ranking, args.step)
            write_curve_csv(out_dir / f"lcc_{name}.csv", curve)
        if args.metric in ("efficiency", "both"):
            curve = evaluation.efficiency_curve(g, ranking, args.step)
            write_curve_csv(out_dir / f"efficiency_{name}.csv", curve)
        fine_lcc = evaluation.lcc_curve(g, ranking, 1.0 / g.n)
        lcc_hit = evaluation.removal_ratio_at(fine_lcc, ev["lcc_threshold"])
        eff_target = ev["efficiency_threshold_frac"] * mu0
        fine_eff = evaluation.efficiency_curve(g, ranking, 1.0 / g.n,
                                               stop_below=eff_target)
        eff_hit = evaluation.removal_ratio_at(fine_eff, eff_target)
        rows.append(evaluation.MethodResult(
            method=name, lcc_removal_ratio=lcc_hit.ratio,
            lcc_reached=lcc_hit.reached,
            efficiency_removal_ratio=eff_hit.ratio,
            efficiency_reached=eff_hit.reached, spread_steady=float("nan")))
        log.info("%s: lcc ratio %.4f, efficiency ratio %.4f",
                 name, lcc_hit.ratio, eff_hit.ratio)
    write_thresholds_csv(out_dir / "thresholds.csv", rows)
    return 0


def cmd_spread(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    g, nodemap = _load_dataset(args.dataset)
    rankings = _read_rankings(args.rankings, nodemap)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, ranking in rankings.items():
        curve = sir.spreading_ability(
            g, ranking, top_frac=args.top_frac, beta=cfg["sir"]["beta"],
            runs=args.runs, base_seed=derive_seed(cfg["seed"], _SEED_SPREAD),
            gamma=cfg["sir"]["gamma"], max_steps=cfg["sir"]["max_steps"])
        write_spread_csv_path(out_dir / f"spread_{name}.csv", curve)
        log.info("%s: steady spread %.1f", name, curve.steady_state)
    return 0


def evaluate_dataset(name: str, path: str, cfg: dict, run_dir: Path) -> None:
    g, nodemap = _load_dataset(path)
    ds_dir = run_dir / "datasets" / name
    ds_dir.mkdir(parents=True, exist_ok=True)
    ctx = RankContext(g, nodemap, cfg, run_dir / "checkpoints",
                      feature_cache=ds_dir / "features.npy")
    rankings: dict[str, centrality.RankedList] = {}
    for method in cfg["methods"]:
        log.info("[%s] ranking via %s", name, method)
        rankings[method] = ctx.ranking(method)
        write_ranking_file(ds_dir / f"ranking_{method}.csv",
                           rankings[method], nodemap)
    if ctx.computed_embedding is not None:
        import io

        buf = io.StringIO()
        write_embedding_csv(ctx.computed_embedding, nodemap, buf)
        atomic_write_text(ds_dir / "embedding.csv", buf.getvalue())
    ev = cfg["evaluation"]
    log.info("[%s] evaluating %d methods", name, len(rankings))
    report = evaluation.compare_methods(
        g, rankings, curve_step=ev["curve_step"],
        lcc_threshold=ev["lcc_threshold"],
        efficiency_threshold_frac=ev["efficiency_threshold_frac"],
        sir_runs=cfg["sir"]["runs"], top_frac=cfg["sir"]["top_frac"],
        beta=cfg["sir"]["beta"],
        base_seed=derive_seed(cfg["seed"], _SEED_SPREAD),
        max_steps=cfg["sir"]["max_steps"])
    for method in rankings:
        write_curve_csv(ds_dir / f"lcc_{method}.csv",
                        report.lcc_curves[method])
        write_curve_csv(ds_dir / f"efficiency_{method}.csv",
                        report.efficiency_curves[method])
        write_spread_csv_path(ds_dir / f"spread_{method}.csv",
                              report.spread_curves[method])
    write_thresholds_csv(ds_dir / "thresholds.csv", report.rows)
    for row in report.rows:
        log.info("[%s] %-6s lcc %.4f  mu %.4f  F %.1f", name, row.method,
                 row.lcc_removal_ratio, row.efficiency_removal_ratio,
                 row.spread_steady)


def cmd_reproduce(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    if not cfg["datasets"]:
        raise UsageError("reproduce needs at least one dataset in the config")
    run_dir = make_run_dir(_resolve_out_dir(cfg["output_dir"], args.out_dir),
                           args.run_name)
    atomic_write_text(run_dir / "config.json",
                      json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    started = time.time()
    train_models(cfg, run_dir)
    for ds in cfg["datasets"]:
        evaluate_dataset(ds["name"], ds["path"], cfg, run_dir)
    log.info("reproduction finished in %.1f s", time.time() - started)
    print(run_dir)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="vitalnodes",
                     description="Vital node identification toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a synthetic scale-free edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train task model and learned baselines")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--run-name")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rank", help="rank one dataset with one method")
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--checkpoint-dir")
    p.add_argument("--feature-cache")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("attack", help="attack curves and threshold table")
    p.add_argument("--dataset", required=True)
    p.add_argument("--rankings", nargs="+", required=True,
                   help="ranking CSV files produced by the rank command")
    p.add_argument("--metric", choices=("lcc", "efficiency", "both"),
                   default="both")
    p.add_argument("--step", type=float, default=0.02)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("spread", help="SIR spreading curves for rankings")
    p.add_argument("--dataset", required=True)
    p.add_argument("--rankings", nargs="+", required=True)
    p.add_argument("--top-frac", type=float, default=0.05)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_spread)

    p = sub.add_parser("reproduce", help="end-to-end experiment reproduction")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--run-name")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
        return args.func(args)
    except VitalnodesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
