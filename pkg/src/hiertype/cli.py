"""Command-line entry point: ``hiertype {train,predict,evaluate,gradcheck}``.

Exit codes: 0 success, 1 gradient check failed, 2 malformed or missing input,
3 invalid configuration, 4 ontology does not match the checkpoint.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import gradcheck as gc
from .data import DataError, VectorResolver, load_dataset, read_jsonl, read_vector_table, write_jsonl
from .data import to_instances
from .decoder import hier_type_dec, strip_synthetic
from .encoder import ShapeError
from .metrics import close_paths, evaluate
from .model import CheckpointError, OntologyMismatchError, load_checkpoint, read_checkpoint_header
from .model import save_checkpoint
from .ontology import MODES, OntologyError, build_tree, split_path
from .trainer import ConfigError, Hyperparams, train, wall_clock

logger = logging.getLogger("hiertype")

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_CONFIG, EXIT_MISMATCH = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_lines(path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None


def _tree(path, mode):
    try:
        return build_tree(_read_lines(path), mode)
    except OntologyError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _resolver(args, fallback: dict | None = None) -> VectorResolver:
    if args.vectors:
        try:
            table = read_vector_table(args.vectors)
        except OSError as exc:
            raise CliError(f"cannot read {args.vectors}: {exc.strerror}", EXIT_INPUT) from None
        return VectorResolver(table=table)
    if args.hashed_dim is not None:
        return VectorResolver(hashed_dim=args.hashed_dim, hash_seed=args.hash_seed)
    if fallback and fallback.get("hashed_dim"):
        return VectorResolver(hashed_dim=fallback["hashed_dim"], hash_seed=fallback.get("hash_seed", 0))
    return VectorResolver()


def _load(path, tree, mode, resolver, require_labels=True):
    try:
        return load_dataset(path, tree, mode, resolver, require_labels)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None


def _parse_k(text):
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise CliError(f"bad branching factors {text!r}", EXIT_CONFIG) from None


def cmd_train(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {args.config}: {exc.strerror}", EXIT_INPUT) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.config}:{exc.lineno}: invalid JSON", EXIT_INPUT) from None
    if args.mode:
        cfg["mode"] = args.mode
    if args.seed is not None:
        cfg["seed"] = args.seed
    try:
        hyper = Hyperparams.from_dict(cfg)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None

    tree = _tree(args.ontology, hyper.mode)
    resolver = _resolver(args)
    train_set = _load(args.train, tree, hyper.mode, resolver)
    dev_set = _load(args.dev, tree, hyper.mode, resolver)
    logger.info("token vectors: %s", resolver.describe())
    if not train_set:
        raise CliError(f"{args.train}: no training records", EXIT_INPUT)
    if hyper.k is not None and len(hyper.k) < tree.depth:
        raise CliError(f"k needs {tree.depth} entries, got {len(hyper.k)}", EXIT_CONFIG)
    if hyper.xi is not None and len(hyper.xi) < tree.depth:
        raise CliError(f"xi needs {tree.depth} entries, got {len(hyper.xi)}", EXIT_CONFIG)

    result = train(train_set, dev_set, tree, hyper, clock=wall_clock if args.wall_time else None)
    vectors = {"hashed_dim": resolver.hashed_dim, "hash_seed": resolver.hash_seed} \
        if resolver.table is None and resolver.hashed_dim else {}
    meta = {"hyperparams": hyper.to_dict(), "best_epoch": result.best_epoch, "vectors": vectors}
    save_checkpoint(args.checkpoint, result.model, meta)
    log_path = args.out or f"{args.checkpoint}.log.jsonl"
    with open(log_path, "w", encoding="utf-8") as fh:
        fh.write(result.log_jsonl())
    print(f"best epoch {result.best_epoch}; checkpoint {args.checkpoint}; log {log_path}")
    return EXIT_OK


def cmd_predict(args) -> int:
    try:
        header = read_checkpoint_header(args.checkpoint)
    except OSError as exc:
        raise CliError(f"cannot read {args.checkpoint}: {exc.strerror}", EXIT_INPUT) from None
    except CheckpointError as exc:
        raise CliError(f"{args.checkpoint}: {exc}", EXIT_INPUT) from None
    meta = header.get("meta", {})
    hyper = meta.get("hyperparams", {})
    mode = hyper.get("mode", "exclusive")
    tree = _tree(args.ontology, mode)
    try:
        model, _ = load_checkpoint(args.checkpoint, tree)
    except OntologyMismatchError as exc:
        raise CliError(str(exc), EXIT_MISMATCH) from None
    k = _parse_k(args.k) if args.k else hyper.get("k")
    resolver = _resolver(args, meta.get("vectors"))
    try:
        records = read_jsonl(args.input)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror}", EXIT_INPUT) from None
    # gold labels in the input are irrelevant here
    for rec in records:
        rec.labels = []
    instances = to_instances(records, tree, mode, resolver, args.input, require_labels=False)

    rows = []
    for x in instances:
        scores = model.scores(x)
        labels = hier_type_dec(tree, scores, k)
        if not args.keep_synthetic:
            labels = strip_synthetic(tree, labels)
        ordered = sorted(labels, key=lambda y: tree.paths[y])
        rows.append({
            "labels": [tree.paths[y] for y in ordered],
            "scores": {tree.paths[y]: float(scores[y]) for y in ordered},
        })
    if args.out:
        write_jsonl(args.out, rows)
    else:
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    return EXIT_OK


def _label_sets(path):
    try:
        records = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    labels = obj["labels"]
                    close_paths(labels)
                except (json.JSONDecodeError, KeyError, TypeError, OntologyError) as exc:
                    raise CliError(f"{path}:{lineno}: bad record ({exc})", EXIT_INPUT) from None
                records.append(labels)
        return records
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None


def cmd_evaluate(args) -> int:
    gold = _label_sets(args.gold)
    pred = _label_sets(args.pred)
    if len(gold) != len(pred):
        raise CliError(f"{args.gold} has {len(gold)} records but {args.pred} has {len(pred)}",
                       EXIT_INPUT)
    if not gold:
        raise CliError("no records to evaluate", EXIT_INPUT)
    L = None
    if args.ontology:
        L = _tree(args.ontology, "undefined").depth
    pairs = [(close_paths(g), close_paths(p)) for g, p in zip(gold, pred)]
    if L is None:
        L = max((len(split_path(x)) for g, p in pairs for x in g | p), default=1)
    report = evaluate(pairs, L=L)
    print(report.to_json())
    print(report.to_table())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    try:
        d_w, d_h, d_t = (int(v) for v in args.dims.split(","))
    except ValueError:
        raise CliError("--dims takes three integers d_w,d_h,d_t", EXIT_CONFIG) from None
    if d_t % 2 or min(d_w, d_h, d_t) < 1:
        raise CliError(f"d_t must be even and all dims positive, got {args.dims}", EXIT_CONFIG)
    ok = True
    for seed in range(args.seed, args.seed + args.repeats):
        errors = gc.run_gradcheck(seed, d_w, d_h, d_t)
        for name, err in errors.items():
            status = "ok" if err <= gc.TOLERANCE else "FAIL"
            ok &= err <= gc.TOLERANCE
            print(f"seed {seed}  {name:<9} max rel err {err:.3e}  {status}")
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hiertype", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def vector_flags(sp):
        sp.add_argument("--vectors", help="TSV token-vector table")
        sp.add_argument("--hashed-dim", type=int, help="use hashed token vectors of this size")
        sp.add_argument("--hash-seed", type=int, default=0)

    t = sub.add_parser("train", help="train a model")
    t.add_argument("--ontology", required=True)
    t.add_argument("--train", required=True)
    t.add_argument("--dev", required=True)
    t.add_argument("--config", required=True, help="JSON file of hyperparameters")
    t.add_argument("--checkpoint", required=True, help="output checkpoint path")
    t.add_argument("--out", help="training log path (JSON lines)")
    t.add_argument("--mode", choices=MODES)
    t.add_argument("--seed", type=int)
    t.add_argument("--wall-time", action="store_true", help="record wall_ms in the log")
    vector_flags(t)
    t.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="decode type sets for mentions")
    pr.add_argument("--ontology", required=True)
    pr.add_argument("--checkpoint", required=True)
    pr.add_argument("--input", required=True)
    pr.add_argument("--out")
    pr.add_argument("--k", help="branching factors, e.g. 2,1,1")
    pr.add_argument("--keep-synthetic", action="store_true", help="keep OTHER types in the output")
    pr.add_argument("--seed", type=int)
    vector_flags(pr)
    pr.set_defaults(func=cmd_predict)

    e = sub.add_parser("evaluate", help="score predictions against gold")
    e.add_argument("--gold", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--ontology")
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    g = sub.add_parser("gradcheck", help="finite-difference check of all gradients")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--repeats", type=int, default=1)
    g.add_argument("--dims", default="6,8,8", help="d_w,d_h,d_t")
    g.set_defaults(func=cmd_gradcheck)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DataError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
