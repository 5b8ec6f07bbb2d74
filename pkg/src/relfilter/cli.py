"""relfilter command line: reproducible ranking and filtering pipelines.

Subcommands: embed, dedup, train, tune-c, rank, baseline, eval, stream,
export-pr.  Global flags: --seed, --config, --verbose.  Exit codes:
0 ok, 1 runtime failure, 2 usage or validation problem.  Failures emit a
machine-readable JSON object on stderr.

Every artifact written by a subcommand carries the tool version and a
hash of the resolved configuration, so outputs can be traced back to the
invocation that produced them.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__, baseline, dedup, features, metrics, retrieval, stream, svm
from .data import OBJECTIVES, load_keywords, load_manifest
from .errors import (
    ManifestParseError,
    ParameterError,
    RelfilterError,
    StoreFormatError,
    UndefinedMetricError,
    ValidationError,
)

log = logging.getLogger("relfilter")

_USAGE_ERRORS = (
    ValidationError,
    ParameterError,
    ManifestParseError,
    StoreFormatError,
    UndefinedMetricError,
)


def _config_hash(subcommand: str, resolved: dict) -> str:
    payload = json.dumps({"subcommand": subcommand, "config": resolved},
                         sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def _provenance(args, resolved: dict) -> dict:
    return {
        "tool_version": __version__,
        "config_hash": _config_hash(args.subcommand, resolved),
        "seed": args.seed,
    }


def _comment_header(meta: dict) -> str:
    return (f"# relfilter={meta['tool_version']} "
            f"config_hash={meta['config_hash']} seed={meta['seed']}\n")


def _require_path(path: str | None, what: str) -> Path:
    if not path:
        raise ValidationError(f"missing required {what} path")
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"{what} path does not exist: {p}")
    return p


def _out_path(path: str) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_ranking_csv(path: Path, ranking: metrics.RankedList, meta: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_comment_header(meta))
        fh.write("rank,id,score\n")
        for rank, (item_id, score) in enumerate(ranking.entries, 1):
            fh.write(f"{rank},{item_id},{_fmt(score)}\n")


def read_ranking_csv(path: str | Path) -> metrics.RankedList:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("rank,"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValidationError(f"bad ranking line: {line!r}")
            entries.append((parts[1], float(parts[2])))
    return metrics.RankedList(entries=tuple(entries))


def _json_dump(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        _out_path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_query_set(args, store: features.FeatureStore) -> retrieval.QuerySet:
    """Resolve --queries (feature store or id list) or manifest query_of."""
    objective = getattr(args, "objective", None) or ""
    if getattr(args, "queries", None):
        qpath = _require_path(args.queries, "queries")
        with open(qpath, "rb") as fh:
            magic = fh.read(4)
        if magic == features.STORE_MAGIC:
            qstore = features.load_store(qpath)
            if qstore.dim != store.dim:
                raise ValidationError(
                    f"query store dim {qstore.dim} does not match store dim "
                    f"{store.dim}")
            return retrieval.QuerySet.from_store(qstore, objective)
        ids = [ln.strip() for ln in qpath.read_text(encoding="utf-8").splitlines()
               if ln.strip() and not ln.strip().startswith("#")]
        if not ids:
            raise ValidationError(f"query id list {qpath} is empty")
        return retrieval.QuerySet.from_store(store, objective, ids)
    if getattr(args, "manifest", None) and objective:
        manifest = load_manifest(_require_path(args.manifest, "manifest"))
        ids = sorted(manifest.query_ids(objective))
        if not ids:
            raise ValidationError(
                f"manifest declares no queries for objective '{objective}'")
        ids = [i for i in ids if i in store]
        if not ids:
            raise ValidationError("no manifest query ids present in the store")
        return retrieval.QuerySet.from_store(store, objective, ids)
    raise ValidationError(
        "retrieval mode needs --queries, or --manifest with --objective")


def _effective_backend(args, store: features.FeatureStore) -> str:
    """Feature-space tag used for hyperparameter defaults.

    --backend must agree with a store that carries a real tag; it may
    name the space for stores of external provenance.
    """
    flag = getattr(args, "backend", None)
    if flag is None:
        return store.backend_tag
    if store.backend_tag not in ("external", flag):
        raise ValidationError(
            f"--backend {flag} does not match store feature space "
            f"'{store.backend_tag}'")
    return flag


def _resolve_gamma(args, store: features.FeatureStore) -> float:
    if getattr(args, "gamma", None) is not None:
        return args.gamma
    tag = _effective_backend(args, store)
    gamma = retrieval.DEFAULT_GAMMA.get(tag)
    if gamma is None:
        raise ParameterError(
            f"no default gamma for feature space '{tag}'; "
            f"pass --gamma (defaults exist for "
            f"{sorted(retrieval.DEFAULT_GAMMA)})")
    return gamma


def _resolve_c(args, store: features.FeatureStore) -> float:
    if getattr(args, "C", None) is not None:
        return args.C
    tag = _effective_backend(args, store)
    c = svm.DEFAULT_C.get(tag)
    if c is None:
        raise ParameterError(
            f"no default C for feature space '{tag}'; pass --C "
            f"(defaults exist for {sorted(svm.DEFAULT_C)})")
    return c


def _labels_pm1(manifest, objective: str, store: features.FeatureStore) -> dict:
    labels = {}
    skipped = 0
    for rec in manifest.records:
        flag = rec.is_relevant(objective)
        if flag is None:
            continue
        if rec.id not in store:
            skipped += 1
            continue
        labels[rec.id] = 1 if flag else -1
    if skipped:
        log.warning("%d labeled records have no feature vector; skipped", skipped)
    return labels


# ---------------------------------------------------------------- subcommands


def cmd_embed(args, resolved) -> int:
    model_path = _require_path(args.model, "model")
    manifest = load_manifest(_require_path(args.manifest, "manifest"))
    backend = features.EmbeddingBackend.load(model_path)
    meta = _provenance(args, resolved)

    def on_error(rec_id, exc):
        log.warning("embed failed for '%s': %s", rec_id, exc)

    store = features.embed_manifest(backend, manifest, root=args.root,
                                    workers=args.workers, on_error=on_error)
    features.save_store(store, _out_path(args.out), extra_meta=meta)
    log.info("embedded %d/%d records into %s", len(store),
             len(manifest), args.out)
    return 0


def cmd_dedup(args, resolved) -> int:
    store = features.load_store(_require_path(args.store, "store"))
    pairs = dedup.find_near_duplicates(store, args.threshold)
    meta = _provenance(args, resolved)
    if args.pairs_out:
        with open(_out_path(args.pairs_out), "w", encoding="utf-8") as fh:
            fh.write(_comment_header(meta))
            fh.write("id_a,id_b,similarity\n")
            for pair in pairs:
                fh.write(f"{pair.id_a},{pair.id_b},{_fmt(pair.similarity)}\n")
    if args.apply:
        if not args.kept_out:
            raise ValidationError("--apply requires --kept-out")
        kept = dedup.deduplicate(store, pairs)
        with open(_out_path(args.kept_out), "w", encoding="utf-8") as fh:
            fh.write(_comment_header(meta))
            for item_id in sorted(kept):
                fh.write(item_id + "\n")
        log.info("kept %d of %d ids", len(kept), len(store))
    return 0


def cmd_train(args, resolved) -> int:
    store = features.load_store(_require_path(args.store, "store"))
    manifest = load_manifest(_require_path(args.manifest, "manifest"))
    labels = _labels_pm1(manifest, args.objective, store)
    config = svm.TrainConfig(C=_resolve_c(args, store),
                             tolerance=args.tolerance,
                             max_iterations=args.max_iterations,
                             seed=args.seed)
    resolved["C"] = config.C
    model = svm.train_svm(store, labels, config, objective=args.objective)
    svm.save_model(model, _out_path(args.out),
                   extra_meta=_provenance(args, resolved))
    log.info("trained %s model on %d examples, objective value %.6g",
             args.objective, len(labels), model.train_objective_value)
    return 0


def cmd_tune_c(args, resolved) -> int:
    store = features.load_store(_require_path(args.store, "store"))
    manifest = load_manifest(_require_path(args.manifest, "manifest"))
    labels = _labels_pm1(manifest, args.objective, store)
    grid = [float(v) for v in args.grid.split(",") if v.strip()]
    chosen = svm.cross_validate_C(store, labels, grid=grid, k=args.folds,
                                  seed=args.seed)
    out = {
        "objective": args.objective,
        "grid": grid,
        "folds": args.folds,
        "chosen_C": chosen,
        "_meta": _provenance(args, resolved),
    }
    _json_dump(out, args.summary_out)
    return 0


def cmd_rank(args, resolved) -> int:
    store = features.load_store(_require_path(args.store, "store"))
    if args.mode == "retrieval":
        queries = _load_query_set(args, store)
        gamma = _resolve_gamma(args, store)
        resolved["gamma"] = gamma
        ranking = retrieval.rank_by_retrieval(store, queries,
                                              retrieval.KdeParams(gamma=gamma))
    else:
        model = svm.load_model(_require_path(args.model, "model"))
        ranking = svm.rank_by_classifier(store, model)
    _write_ranking_csv(_out_path(args.out), ranking, _provenance(args, resolved))
    return 0


def cmd_baseline(args, resolved) -> int:
    manifest = load_manifest(_require_path(args.manifest, "manifest"))
    keywords = load_keywords(args.keywords)
    items = baseline.items_from_manifest(manifest)
    ranking = baseline.rank_by_text_time(items, keywords)
    _write_ranking_csv(_out_path(args.out), ranking, _provenance(args, resolved))
    return 0


def _ranking_for_eval(args, objective: str) -> metrics.RankedList:
    if args.ranking:
        return read_ranking_csv(_require_path(args.ranking, "ranking"))
    if not args.mode:
        raise ValidationError("eval needs --ranking or --mode with --store")
    store = features.load_store(_require_path(args.store, "store"))
    if args.mode == "retrieval":
        ns = argparse.Namespace(**{**vars(args), "objective": objective})
        queries = _load_query_set(ns, store)
        gamma = _resolve_gamma(args, store)
        return retrieval.rank_by_retrieval(store, queries,
                                           retrieval.KdeParams(gamma=gamma))
    model = svm.load_model(_require_path(args.model, "model"))
    return svm.rank_by_classifier(store, model)


def _evaluate_objective(ranking: metrics.RankedList, manifest,
                        objective: str) -> dict:
    relevant = manifest.relevant_ids(objective)
    ap = metrics.average_precision(ranking, relevant)
    scores = ranking.scores()
    labels = {i: (i in relevant) for i in scores}
    threshold, f1, precision, recall = metrics.best_f1(scores, labels)
    return {
        "ap": ap,
        "best_f1": f1,
        "threshold": threshold,
        "precision": precision,
        "recall": recall,
    }


def cmd_eval(args, resolved) -> int:
    manifest = load_manifest(_require_path(args.manifest, "manifest"))
    meta = _provenance(args, resolved)
    objectives = list(OBJECTIVES) if args.objective == "all" else [args.objective]

    per_objective = {}
    for objective in objectives:
        ranking = _ranking_for_eval(args, objective)
        per_objective[objective] = _evaluate_objective(ranking, manifest,
                                                       objective)
        if args.pr_out and len(objectives) == 1:
            curve = metrics.pr_curve(ranking, manifest.relevant_ids(objective))
            with open(_out_path(args.pr_out), "w", encoding="utf-8") as fh:
                fh.write(_comment_header(meta))
                fh.write("recall,precision\n")
                for recall, precision in curve.points:
                    fh.write(f"{_fmt(recall)},{_fmt(precision)}\n")

    aps = {obj: res["ap"] for obj, res in per_objective.items()}
    summary: dict = {"map": metrics.mean_ap(aps), "_meta": meta}
    if len(objectives) == 1:
        summary.update(per_objective[objectives[0]])
        summary["objective"] = objectives[0]
    else:
        summary["objectives"] = per_objective
    _json_dump(summary, args.summary_out)
    return 0


def _stream_items(args, store):
    """Yield (id, vector) pairs from a manifest path, stdin, or a directory."""
    source = args.in_path
    if source == "-":
        for line_no, line in enumerate(sys.stdin, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                item_id = obj["id"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ManifestParseError(line_no, f"bad stream record: {exc}")
            yield item_id, (store.get(item_id) if store is not None
                            and item_id in store else None)
        return
    path = _require_path(source, "input")
    if path.is_dir():
        if not args.embed_model:
            raise ValidationError(
                "streaming from an image directory requires --embed-model")
        backend = features.EmbeddingBackend.load(
            _require_path(args.embed_model, "embed model"))
        from PIL import Image
        for img_path in sorted(path.iterdir()):
            if img_path.is_dir():
                continue
            try:
                with Image.open(img_path) as img:
                    yield img_path.name, features.embed(backend, img)
            except Exception as exc:
                log.warning("skipping '%s': %s", img_path.name, exc)
                yield img_path.name, None
        return
    manifest = load_manifest(path)
    for rec in manifest.records:
        yield rec.id, (store.get(rec.id) if store is not None
                       and rec.id in store else None)


def cmd_stream(args, resolved) -> int:
    if args.model:
        model = svm.load_model(_require_path(args.model, "model"))
        state = stream.FilterState.from_model(model, args.threshold)
    elif args.queries:
        qpath = _require_path(args.queries, "queries")
        qstore = features.load_store(qpath)
        queries = retrieval.QuerySet.from_store(qstore, args.objective or "")
        gamma = _resolve_gamma(args, qstore)
        state = stream.FilterState.from_queries(
            queries, retrieval.KdeParams(gamma=gamma), args.threshold)
    else:
        raise ValidationError("stream needs --model or --queries")

    store = None
    if args.store:
        store = features.load_store(_require_path(args.store, "store"))

    meta = _provenance(args, resolved)
    out_fh = (open(_out_path(args.decisions_out), "w", encoding="utf-8")
              if args.decisions_out else sys.stdout)
    n_errors = 0
    try:
        out_fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for item_id, vector in _stream_items(args, store):
            if vector is None:
                log.warning("no feature vector for '%s'; recorded as error",
                            item_id)
                out_fh.write(json.dumps({"id": item_id, "error":
                                         "no feature vector"}) + "\n")
                n_errors += 1
                continue
            try:
                decision = stream.filter_step(state, item_id, vector)
            except RelfilterError as exc:
                log.warning("skipping '%s': %s", item_id, exc)
                out_fh.write(json.dumps({"id": item_id, "error": str(exc)})
                             + "\n")
                n_errors += 1
                continue
            out_fh.write(json.dumps(
                {"id": decision.id, "score": decision.score,
                 "accepted": decision.accepted}, sort_keys=True) + "\n")
    finally:
        if out_fh is not sys.stdout:
            out_fh.close()
    log.info("stream done: %d accepted, %d rejected, %d errors",
             state.accepted, state.rejected, n_errors)
    return 0


def cmd_export_pr(args, resolved) -> int:
    manifest = load_manifest(_require_path(args.manifest, "manifest"))
    meta = _provenance(args, resolved)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for spec_item in args.ranking:
        if "=" not in spec_item:
            raise ValidationError(
                f"--ranking expects objective=path, got {spec_item!r}")
        objective, _, path = spec_item.partition("=")
        if objective not in OBJECTIVES:
            raise ValidationError(f"unknown objective '{objective}'")
        ranking = read_ranking_csv(_require_path(path, "ranking"))
        relevant = manifest.relevant_ids(objective)
        present = relevant & set(ranking.ids())
        if not present:
            log.warning("objective '%s' has no relevant items in the ranking; "
                        "skipped", objective)
            continue
        curve = metrics.pr_curve(ranking, relevant)
        out_path = out_dir / f"{args.method}_{objective}.csv"
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(_comment_header(meta))
            fh.write("recall,precision\n")
            for recall, precision in curve.points:
                fh.write(f"{_fmt(recall)},{_fmt(precision)}\n")
        written += 1
    log.info("wrote %d PR curve files to %s", written, out_dir)
    return 0


# -------------------------------------------------------------------- parser


def _add_global_flags(parser: argparse.ArgumentParser, top: bool) -> None:
    """Accept --seed/--config/--verbose before or after the subcommand.

    The subparser copies default to SUPPRESS so they never clobber a
    value the top-level parser already set.
    """
    default = dict(default=argparse.SUPPRESS) if not top else {}
    parser.add_argument("--seed", type=int,
                        **(default or {"default": None}),
                        help="PRNG seed recorded in all outputs (default 0)")
    parser.add_argument("--config",
                        **(default or {"default": None}),
                        help="JSON file with default values for flags")
    parser.add_argument("--verbose", "-v", action="count",
                        **(default or {"default": 0}),
                        help="increase log verbosity")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relfilter",
        description="Rank and filter disaster social-media images by "
                    "relevance to fixed information objectives.")
    _add_global_flags(parser, top=True)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_parser(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_global_flags(p, top=False)
        return p

    p = add_parser("embed", help="embed manifest images into a store")
    p.add_argument("--model", help="TorchScript model file with .json sidecar")
    p.add_argument("--manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--root", default=None, help="base dir for relative paths")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_embed)

    p = add_parser("dedup", help="find and remove near-duplicates")
    p.add_argument("--store")
    p.add_argument("--threshold", type=float, default=0.95)
    p.add_argument("--pairs-out", default=None)
    p.add_argument("--apply", action="store_true")
    p.add_argument("--kept-out", default=None)
    p.set_defaults(func=cmd_dedup)

    p = add_parser("train", help="train one objective's linear SVM")
    p.add_argument("--store")
    p.add_argument("--manifest")
    p.add_argument("--objective", choices=OBJECTIVES, required=True)
    p.add_argument("--backend", default=None,
                   help="feature space tag for hyperparameter defaults")
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--max-iterations", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = add_parser("tune-c", help="choose C by cross-validated AP")
    p.add_argument("--store")
    p.add_argument("--manifest")
    p.add_argument("--objective", choices=OBJECTIVES, required=True)
    p.add_argument("--backend", default=None,
                   help="feature space tag for hyperparameter defaults")
    p.add_argument("--grid", default="0.005,0.5,2.5")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--summary-out", default=None)
    p.set_defaults(func=cmd_tune_c)

    p = add_parser("rank", help="rank a store by retrieval or classifier")
    p.add_argument("--mode", choices=("retrieval", "classification"),
                   required=True)
    p.add_argument("--store")
    p.add_argument("--queries", default=None,
                   help="query feature store or id list file")
    p.add_argument("--manifest", default=None,
                   help="manifest supplying query ids via query_of")
    p.add_argument("--objective", choices=OBJECTIVES, default=None)
    p.add_argument("--backend", default=None,
                   help="feature space tag for hyperparameter defaults")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--model", default=None, help="trained model JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rank)

    p = add_parser("baseline", help="text-time baseline ranking")
    p.add_argument("--manifest")
    p.add_argument("--keywords", default=None,
                   help="keyword file (default: packaged German list)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = add_parser("eval", help="evaluate a ranking against labels")
    p.add_argument("--manifest")
    p.add_argument("--objective", choices=OBJECTIVES + ("all",),
                   required=True)
    p.add_argument("--ranking", default=None, help="ranking CSV to evaluate")
    p.add_argument("--mode", choices=("retrieval", "classification"),
                   default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--backend", default=None,
                   help="feature space tag for hyperparameter defaults")
    p.add_argument("--queries", default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--pr-out", default=None)
    p.add_argument("--summary-out", default=None)
    p.set_defaults(func=cmd_eval)

    p = add_parser("stream", help="hard-decision filtering of a stream")
    p.add_argument("--model", default=None, help="trained model JSON")
    p.add_argument("--queries", default=None, help="query feature store")
    p.add_argument("--objective", choices=OBJECTIVES, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--in", dest="in_path", required=True,
                   help="manifest path, '-' for stdin, or image directory")
    p.add_argument("--store", default=None, help="feature store for vectors")
    p.add_argument("--embed-model", default=None,
                   help="TorchScript model for directory input")
    p.add_argument("--decisions-out", default=None)
    p.set_defaults(func=cmd_stream)

    p = add_parser("export-pr", help="emit PR curve CSVs for plotting")
    p.add_argument("--manifest")
    p.add_argument("--method", required=True, help="method label for filenames")
    p.add_argument("--ranking", action="append", default=[],
                   metavar="OBJECTIVE=PATH")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_export_pr)

    return parser


_CONFIG_KEYS = {
    "seed", "manifest", "store", "model", "queries", "gamma", "C",
    "threshold", "objective", "keywords", "grid", "folds", "tolerance",
    "max_iterations", "workers", "root", "backend",
}


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset flags from the --config JSON file."""
    if not args.config:
        return
    cfg_path = _require_path(args.config, "config")
    try:
        cfg = json.loads(cfg_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError("config file must hold a JSON object")
    for key, value in cfg.items():
        if key not in _CONFIG_KEYS:
            raise ValidationError(f"unknown config key '{key}'")
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, value)


def _resolved_config(args: argparse.Namespace) -> dict:
    skip = {"func", "config", "verbose", "subcommand"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=(logging.DEBUG if args.verbose > 1
               else logging.INFO if args.verbose == 1 else logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_config(args)
        if args.seed is None:
            args.seed = 0
        resolved = _resolved_config(args)
        return args.func(args, resolved)
    except _USAGE_ERRORS as exc:
        _emit_error(exc)
        return 2
    except RelfilterError as exc:
        _emit_error(exc)
        return 1
    except OSError as exc:
        _emit_error(exc)
        return 1


def _emit_error(exc: Exception) -> None:
    sys.stderr.write(json.dumps(
        {"error": type(exc).__name__, "message": str(exc)},
        sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())
