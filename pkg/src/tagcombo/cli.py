"""Command line front end.

Every file written is accompanied by ``<file>.manifest.json`` recording the
subcommand, parameters, seed, input digests and package version.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import pickle
import random
import sys
from pathlib import Path

from . import __version__
from .combine import METHODS, combine
from .corpus import (
    AlignmentError,
    CorpusFormatError,
    align_outputs,
    build_lexicon,
    novelty,
    parse_tokens,
    read_column,
    read_corpus,
    read_matrix,
    split_corpus,
    write_column,
    write_corpus,
    write_matrix,
)
from .evaluation import (
    accuracy,
    agreement_breakdown,
    baseline_lexprob,
    baseline_random,
    evaluate,
    format_breakdown,
    format_sweep,
    oracle_bounds,
    sweep_subsets,
)
from .mbl import train_proposer, train_tagger_m
from .pairwise import format_pair_distribution, train_pair_table
from .stacker import StackVariant, disagreement_rate
from .synth import default_ids, generate_corpus, halve, simulate_columns
from .trigram import DEFAULT_LAMBDAS, tag_corpus, train_trigram
from .tree import DEFAULT_CF


class CliError(Exception):
    pass


PATH_ARGS = frozenset({
    "input", "train", "test", "tune", "matrix", "model", "benchmark", "columns",
    "pred", "gold", "against", "table", "output", "report", "save_table", "out", "out_prefix",
})


def digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def run_manifest(args, inputs: dict[str, str]) -> dict:
    """Parameters that determine the outputs; file paths are replaced by the
    digests of the files read."""
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "command") and k not in PATH_ARGS
    }
    return {
        "subcommand": args.command,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "inputs": {k: digest(p) for k, p in sorted(inputs.items()) if p},
        "version": __version__,
    }


def write_manifest(path, manifest: dict) -> None:
    with open(f"{path}.manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_text(path, text: str, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    write_manifest(path, manifest)


def emit(text: str, path, manifest: dict) -> None:
    if path:
        write_text(path, text, manifest)
    else:
        sys.stdout.write(text)


def parse_floats(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def parse_list(s: str) -> list[str]:
    return [x for x in s.split(",") if x]


def save_model(obj, path, manifest) -> None:
    with open(path, "wb") as fh:
        pickle.dump(obj, fh, protocol=4)
    write_manifest(path, manifest)


def load_model(path, kind: str):
    with open(path, "rb") as fh:
        obj = pickle.load(fh)
    if not isinstance(obj, dict) or obj.get("kind") != kind:
        raise CliError(f"{path}: not a {kind} model")
    return obj


# -- subcommands --------------------------------------------------------------

def cmd_synth(args) -> None:
    corpus = generate_corpus(seed=args.seed, n_tokens=args.tokens, n_tags=args.n_tags, n_words=args.words)
    manifest = run_manifest(args, {})
    prefix = args.out_prefix
    write_corpus(corpus, f"{prefix}.vert")
    write_manifest(f"{prefix}.vert", manifest)
    lines = [f"benchmark: {prefix}.vert ({corpus.n_tokens} tokens, {len(corpus)} utterances)"]
    if args.taggers:
        accs = args.acc or [0.9 + 0.01 * k for k in range(args.taggers)]
        if len(accs) != args.taggers:
            raise CliError(f"--acc gives {len(accs)} values for {args.taggers} taggers")
        ids = args.ids or default_ids(args.taggers)
        if len(ids) != args.taggers:
            raise CliError(f"--ids gives {len(ids)} names for {args.taggers} taggers")
        cols = simulate_columns(corpus, accs, seed=args.seed + 1)
        gold = corpus.flat_tags()
        for name, col in zip(ids, cols):
            write_column(col, f"{prefix}.{name}.col")
            write_manifest(f"{prefix}.{name}.col", manifest)
            flat = [t for u in col for t in u]
            lines.append(f"column {name}: accuracy {accuracy(flat, gold):.4f}")
        matrix = align_outputs(corpus, cols, ids)
        write_matrix(matrix, f"{prefix}.matrix")
        write_manifest(f"{prefix}.matrix", manifest)
        # alternate utterances give a Tune and a Test half for the combiners
        for name, part in zip(("tune", "test"), halve(matrix)):
            write_matrix(part, f"{prefix}.{name}.matrix")
            write_manifest(f"{prefix}.{name}.matrix", manifest)
    print("\n".join(lines))


def cmd_split(args) -> None:
    corpus = read_corpus(args.input)
    manifest = run_manifest(args, {"input": args.input})
    parts = split_corpus(corpus)
    lex = build_lexicon(parts[0])
    for name, part in zip(("train", "tune", "test"), parts):
        path = f"{args.out_prefix}.{name}.vert"
        if len(part):
            write_corpus(part, path)
        else:
            Path(path).write_text("", encoding="utf-8")
        write_manifest(path, manifest)
        line = f"{name}: {len(part)} utterances, {part.n_tokens} tokens"
        if name != "train" and len(part):
            new, new_tag = novelty(lex, part)
            line += f", new tokens {100 * new:.2f}%, known with new tag {100 * new_tag:.2f}%"
        print(line)


def cmd_train_t(args) -> None:
    train = read_corpus(args.train)
    lex = build_lexicon(train)
    model = train_trigram(train, args.lambdas, lexicon=lex)
    proposer = train_proposer(train, lex)
    save_model({"kind": "trigram", "model": model, "proposer": proposer}, args.model,
               run_manifest(args, {"train": args.train}))


def cmd_tag_t(args) -> None:
    obj = load_model(args.model, "trigram")
    sents = _read_input(args.input)
    tags = tag_corpus(obj["model"], sents, obj["proposer"])
    write_column(tags, args.output)
    write_manifest(args.output, run_manifest(args, {"model": args.model, "input": args.input}))


def cmd_train_m(args) -> None:
    train = read_corpus(args.train)
    model = train_tagger_m(train)
    save_model({"kind": "memory", "model": model}, args.model, run_manifest(args, {"train": args.train}))


def cmd_tag_m(args) -> None:
    model = load_model(args.model, "memory")["model"]
    tags = [model.tag(s) for s in _read_input(args.input)]
    write_column(tags, args.output)
    write_manifest(args.output, run_manifest(args, {"model": args.model, "input": args.input}))


def _read_input(path) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return parse_tokens(fh)


def cmd_align(args) -> None:
    bench = read_corpus(args.benchmark)
    ids = args.ids or [Path(c).stem for c in args.columns]
    if len(ids) != len(args.columns):
        raise CliError(f"{len(args.columns)} columns but {len(ids)} ids")
    cols = [read_column(c) for c in args.columns]
    matrix = align_outputs(bench, cols, ids, with_gold=not args.no_gold)
    write_matrix(matrix, args.out)
    inputs = {"benchmark": args.benchmark}
    inputs.update({f"column.{i}": c for i, c in zip(ids, args.columns)})
    write_manifest(args.out, run_manifest(args, inputs))


def cmd_combine(args) -> None:
    tune = read_matrix(args.tune) if args.tune else None
    test = read_matrix(args.test)
    inputs = {"tune": args.tune, "test": args.test}
    manifest = run_manifest(args, inputs)
    pred = combine(
        args.method, tune, test, seed=args.seed, variant=args.variant,
        prune_cf=None if args.no_prune else args.prune_cf, min_pair_count=args.min_pair_count,
    )
    if args.output:
        write_column(test.regroup(pred), args.output)
        write_manifest(args.output, manifest)
    if args.save_table:
        if tune is None:
            raise CliError("--save-table needs --tune")
        table = train_pair_table(tune, args.min_pair_count)
        save_model({"kind": "pairs", "model": table}, args.save_table, manifest)
    if test.has_gold:
        report = evaluate(pred, test.gold(), manifest=_report_manifest(manifest))
        emit(report.render(args.format), args.report, manifest)
    elif not args.output:
        sys.stdout.write("".join(f"{t}\n" for t in pred))


def _report_manifest(manifest: dict) -> dict:
    flat = {"subcommand": manifest["subcommand"], "version": manifest["version"]}
    for k, v in manifest["parameters"].items():
        if k != "format":
            flat[f"param.{k}"] = v
    for k, v in manifest["inputs"].items():
        flat[f"input.{k}"] = v[:16]
    return flat


def cmd_eval(args) -> None:
    gold_corpus = read_corpus(args.gold)
    gold = gold_corpus.flat_tags()
    pred_col = read_column(args.pred)
    align_outputs(gold_corpus, [pred_col], ["pred"])
    pred = [t for u in pred_col for t in u]
    against = None
    inputs = {"pred": args.pred, "gold": args.gold}
    if args.against:
        col = read_column(args.against)
        align_outputs(gold_corpus, [col], ["against"])
        against = [t for u in col for t in u]
        inputs["against"] = args.against
    manifest = run_manifest(args, inputs)
    report = evaluate(pred, gold, against, continuity=not args.no_continuity, manifest=_report_manifest(manifest))
    emit(report.render(args.format), args.report, manifest)


def cmd_sweep(args) -> None:
    test = read_matrix(args.matrix)
    tune = read_matrix(args.tune)
    manifest = run_manifest(args, {"matrix": args.matrix, "tune": args.tune})
    rows = sweep_subsets(test, tune, args.method, seed=args.seed, variant=args.variant,
                         min_pair_count=args.min_pair_count)
    emit(format_sweep(rows, args.format), args.report, manifest)


def cmd_agree(args) -> None:
    matrix = read_matrix(args.matrix)
    b = agreement_breakdown(matrix)
    manifest = run_manifest(args, {"matrix": args.matrix})
    if args.format == "machine":
        any_c, not_out = oracle_bounds(b)
        lines = [f"{k}: {v:.6f}" for k, v in b.as_dict().items()]
        lines += [f"oracle.any_correct: {any_c:.6f}", f"oracle.not_outvoted: {not_out:.6f}",
                  f"disagreement: {disagreement_rate(matrix):.6f}"]
        text = "\n".join(lines) + "\n"
    else:
        text = format_breakdown(b) + f"{'rows with disagreement':<32}{100 * disagreement_rate(matrix):6.2f}\n"
    emit(text, args.report, manifest)


def cmd_baseline(args) -> None:
    train = read_corpus(args.train)
    test = read_corpus(args.test)
    lex = build_lexicon(train)
    toks = [w for u in test.tokens() for w in u]
    gold = test.flat_tags()
    rnd = baseline_random(lex, toks, random.Random(args.seed))
    lp = baseline_lexprob(lex, toks)
    manifest = run_manifest(args, {"train": args.train, "test": args.test})
    if args.format == "machine":
        text = f"random: {accuracy(rnd, gold):.6f}\nlexprob: {accuracy(lp, gold):.6f}\n"
    else:
        text = f"Random   {100 * accuracy(rnd, gold):.2f}\nLexProb  {100 * accuracy(lp, gold):.2f}\n"
    emit(text, args.report, manifest)


def cmd_inspect_pairs(args) -> None:
    if args.table:
        table = load_model(args.table, "pairs")["model"]
    elif args.tune:
        table = train_pair_table(read_matrix(args.tune))
    else:
        raise CliError("inspect-pairs needs --table or --tune")
    first, second = args.pair
    t1, t2 = args.tags
    for name in (first, second):
        if name not in table.tagger_ids:
            raise CliError(f"unknown tagger {name!r}; table has {', '.join(table.tagger_ids)}")
    sys.stdout.write(format_pair_distribution(table, first, second, t1, t2))


def _pair(s: str) -> list[str]:
    xs = parse_list(s)
    if len(xs) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {s!r}")
    return xs


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tagcombo", description="Train, combine and evaluate wordclass taggers.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "machine"), default="text")
        sp.add_argument("--report", help="write the report here instead of stdout")

    sp = sub.add_parser("synth", help="generate a synthetic benchmark and simulated tagger columns")
    sp.add_argument("--tokens", type=int, default=50000)
    sp.add_argument("--taggers", type=int, default=0)
    sp.add_argument("--acc", type=parse_floats)
    sp.add_argument("--ids", type=parse_list)
    sp.add_argument("--n-tags", type=int, default=12)
    sp.add_argument("--words", type=int, default=3000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-prefix", required=True)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("split", help="8/1/1 Train/Tune/Test split")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out-prefix", required=True)
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("train-t", help="train the trigram tagger")
    sp.add_argument("--train", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--lambda", dest="lambdas", type=parse_floats, default=list(DEFAULT_LAMBDAS))
    sp.set_defaults(func=cmd_train_t)

    sp = sub.add_parser("tag-t", help="tag with the trigram tagger")
    sp.add_argument("--model", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_tag_t)

    sp = sub.add_parser("train-m", help="train the memory-based tagger")
    sp.add_argument("--train", required=True)
    sp.add_argument("--model", required=True)
    sp.set_defaults(func=cmd_train_m)

    sp = sub.add_parser("tag-m", help="tag with the memory-based tagger")
    sp.add_argument("--model", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_tag_m)

    sp = sub.add_parser("align", help="align tag columns with a benchmark into a matrix")
    sp.add_argument("--benchmark", required=True)
    sp.add_argument("--columns", type=parse_list, required=True)
    sp.add_argument("--ids", type=parse_list)
    sp.add_argument("--no-gold", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_align)

    sp = sub.add_parser("combine", help="combine tagger suggestions")
    sp.add_argument("--method", choices=METHODS, required=True)
    sp.add_argument("--variant", choices=[v.value for v in StackVariant], default="tags")
    sp.add_argument("--tune")
    sp.add_argument("--test", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--prune-cf", type=float, default=DEFAULT_CF)
    sp.add_argument("--no-prune", action="store_true")
    sp.add_argument("--min-pair-count", type=int, default=1)
    sp.add_argument("--output", help="column file for the combined tags")
    sp.add_argument("--save-table", help="also save the TagPair table here")
    fmt(sp)
    sp.set_defaults(func=cmd_combine)

    sp = sub.add_parser("eval", help="accuracy, per-tag scores and McNemar")
    sp.add_argument("--pred", required=True)
    sp.add_argument("--gold", required=True)
    sp.add_argument("--against")
    sp.add_argument("--no-continuity", action="store_true")
    fmt(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("sweep", help="combine every tagger subset")
    sp.add_argument("--method", choices=METHODS, default="tagpair")
    sp.add_argument("--variant", choices=[v.value for v in StackVariant], default="tags")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--tune", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--min-pair-count", type=int, default=1)
    fmt(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("agree", help="agreement patterns and oracle bounds")
    sp.add_argument("--matrix", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_agree)

    sp = sub.add_parser("baseline", help="Random and LexProb baselines")
    sp.add_argument("--train", required=True)
    sp.add_argument("--test", required=True)
    sp.add_argument("--seed", type=int, default=0)
    fmt(sp)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("inspect-pairs", help="show one TagPair distribution")
    sp.add_argument("--table")
    sp.add_argument("--tune")
    sp.add_argument("--pair", type=_pair, required=True)
    sp.add_argument("--tags", type=_pair, required=True)
    sp.set_defaults(func=cmd_inspect_pairs)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except OSError as e:
        print(f"error: {e.filename or ''}: {e.strerror or e}", file=sys.stderr)
        return 1
    except (CliError, CorpusFormatError, AlignmentError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
