"""Experiment driver: synthesize corpora, build representations, evaluate,
verify the bounds, and emit CSV / plot-ready data.

Subcommands
-----------
synth     write a deterministic synthetic corpus directory
run       dataset x method x seed sweep -> one CSV row per run
verify    numerical verification of the bounds -> JSON lines + summary
plotdata  aggregate a run CSV into (x, series, mean, std) rows

Exit codes: 0 success, 1 usage error, 2 data/config error, 3 verification
failure.  All value-taking flags may also come from a ``key = value`` config
file via ``--config``; command line flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, corpus, evalmetrics, matrixio, subspace, theory
from .errors import DataError, IrrspaceError, ParameterError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3

CSV_COLUMNS = (
    "run_id",
    "dataset",
    "dist",
    "seed",
    "method",
    "q",
    "ell",
    "clusters",
    "nonuniformity",
    "mingling",
    "f_estimate",
    "kappa",
    *evalmetrics.ALGORITHMS,
    "floor",
    "ceiling",
    "elapsed_ms",
)

_RUN_DEFAULTS = {
    "methods": "vsm,lsi,irr",
    "metrics": "kappa,cluster",
    "q": "auto",
    "alpha": "3.5",
    "beta": "0.0",
    "seeds": "0",
    "jobs": "1",
}

_SYNTH_DEFAULTS = {"seed": "0"}

_VERIFY_DEFAULTS = {"trials": "12", "seed": "0"}

_PLOT_DEFAULTS = {"x": "nonuniformity", "y": "kappa"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); map to exit code 1
        raise _UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError as exc:
            raise _UsageError(f"bad seed range {text!r}") from exc
        if hi_i <= lo_i:
            raise _UsageError(f"empty seed range {text!r}")
        return list(range(lo_i, hi_i))
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise _UsageError(f"bad seed list {text!r}") from exc


def _parse_dist(text: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(c) for c in text.replace(" ", "").split(",") if c)
    except ValueError as exc:
        raise _UsageError(f"bad distribution {text!r}") from exc
    if not counts:
        raise _UsageError(f"bad distribution {text!r}")
    return counts


def _parse_q(text: str) -> float | None:
    if text == "auto":
        return None
    try:
        q = float(text)
    except ValueError as exc:
        raise _UsageError(f"q must be 'auto' or a number, got {text!r}") from exc
    return q


def _parse_ell(text: str) -> tuple[str, float]:
    if text.startswith("ratio:"):
        try:
            theta = float(text[len("ratio:") :])
        except ValueError as exc:
            raise _UsageError(f"bad ratio in {text!r}") from exc
        return ("theta", theta)
    try:
        return ("ell", int(text))
    except ValueError as exc:
        raise _UsageError(f"ell must be an int or ratio:<float>, got {text!r}") from exc


def _load_config(path: str) -> dict[str, str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        value = value.strip().strip("\"'")
        if not key:
            raise DataError(f"{path}:{lineno}: empty key")
        out[key] = value
    return out


def _merge(args: argparse.Namespace, defaults: dict[str, str]) -> dict[str, str | list[str] | bool | None]:
    """Config-file values fill flags left unset; hard defaults fill the rest."""
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    merged: dict = {}
    for key, original in vars(args).items():
        if key == "config":
            continue
        value = original
        if value is None or (isinstance(value, list) and not value):
            if key in cfg:
                # repeatable flags take ';'-separated config values
                value = cfg[key].split(";") if isinstance(original, list) else cfg[key]
            elif key in defaults:
                value = defaults[key]
        merged[key] = value
    unknown = set(cfg) - set(merged)
    if unknown:
        raise DataError(f"config keys not recognized: {sorted(unknown)}")
    return merged


def _build_parser() -> _Parser:
    parser = _Parser(prog="irrspace", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"irrspace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write a synthetic corpus directory")
    p_synth.add_argument("--dist", help="docs per topic, e.g. 46,4")
    p_synth.add_argument("--seed", help="generator seed (default 0)")
    p_synth.add_argument("--noise", help="shared-vocabulary token rate (default 0)")
    p_synth.add_argument("--vocab-per-topic", dest="vocab_per_topic")
    p_synth.add_argument("--shared-vocab", dest="shared_vocab")
    p_synth.add_argument("--doc-length", dest="doc_length")
    p_synth.add_argument("--out", help="output corpus directory")
    p_synth.add_argument("--config", help="key = value defaults file")

    p_run = sub.add_parser("run", help="run methods over datasets, emit CSV rows")
    p_run.add_argument("--dist", action="append", default=[],
                       help="synthetic dataset, repeatable")
    p_run.add_argument("--corpus", action="append", default=[],
                       help="corpus directory, repeatable")
    p_run.add_argument("--matrix", action="append", default=[],
                       help="term-document matrix file (.csv or binary)")
    p_run.add_argument("--seeds", help="seed list 1,2,3 or range 0:10 (synth only)")
    p_run.add_argument("--methods", help="comma list from vsm,lsi,irr")
    p_run.add_argument("--q", help="'auto' or a nonnegative float (irr)")
    p_run.add_argument("--alpha", help="auto-scale slope (default 3.5)")
    p_run.add_argument("--beta", help="auto-scale intercept (default 0)")
    p_run.add_argument("--ell", help="dimensionality: int, or ratio:<theta>")
    p_run.add_argument("--topics", help="known topic count (sets default ell)")
    p_run.add_argument("--clusters", help="cluster count override")
    p_run.add_argument("--metrics", help="comma list from kappa,cluster "
                                         "(or 'none' with --save-basis)")
    p_run.add_argument("--noise", help="synth shared-token rate")
    p_run.add_argument("--vocab-per-topic", dest="vocab_per_topic")
    p_run.add_argument("--shared-vocab", dest="shared_vocab")
    p_run.add_argument("--doc-length", dest="doc_length")
    p_run.add_argument("--jobs", help="worker threads (default 1)")
    p_run.add_argument("--save-basis", dest="save_basis",
                       help="write the basis of a single-method single-dataset run")
    p_run.add_argument("--out", help="output CSV path (default stdout)")
    p_run.add_argument("--config", help="key = value defaults file")

    p_verify = sub.add_parser("verify", help="verify the bounds numerically")
    p_verify.add_argument("--trials", help="instance count (default 12)")
    p_verify.add_argument("--seed", help="suite seed (default 0)")
    p_verify.add_argument("--noise", help="override instance noise level")
    p_verify.add_argument("--out", help="JSON-lines output path (default stdout)")
    p_verify.add_argument("--inject-bug", dest="inject_bug", action="store_true",
                          help=argparse.SUPPRESS)
    p_verify.add_argument("--config", help="key = value defaults file")

    p_plot = sub.add_parser("plotdata", help="aggregate a run CSV for plotting")
    p_plot.add_argument("--report", help="input CSV from 'run'")
    p_plot.add_argument("--x", help="x-axis column (default nonuniformity)")
    p_plot.add_argument("--y", help="y-axis column (default kappa)")
    p_plot.add_argument("--out", help="output CSV path (default stdout)")
    p_plot.add_argument("--config", help="key = value defaults file")
    return parser


def cmd_synth(opts: dict) -> int:
    if not opts.get("dist"):
        raise _UsageError("synth requires --dist")
    if not opts.get("out"):
        raise _UsageError("synth requires --out")
    mapping = {"distribution": opts["dist"], "rng_seed": opts["seed"]}
    for src, dst in (
        ("noise", "noise_rate"),
        ("vocab_per_topic", "vocab_per_topic"),
        ("shared_vocab", "shared_vocab"),
        ("doc_length", "doc_length"),
    ):
        if opts.get(src) is not None:
            mapping[dst] = opts[src]
    spec = corpus.synth_spec_from_mapping(mapping)
    docs, _ = corpus.synthesize_collection(spec)
    manifest = {
        "distribution": list(spec.distribution),
        "vocab_per_topic": spec.vocab_per_topic,
        "shared_vocab": spec.shared_vocab,
        "doc_length": spec.doc_length,
        "noise_rate": spec.noise_rate,
        "rng_seed": spec.rng_seed,
    }
    corpus.write_corpus_dir(opts["out"], docs, manifest)
    print(f"wrote {len(docs)} documents to {opts['out']}")
    return EXIT_OK


class _Cell:
    """One dataset x seed unit of work."""

    def __init__(self, dataset: str, dist_label: str, seed: int | None, build):
        self.dataset = dataset
        self.dist_label = dist_label
        self.seed = seed
        self.build = build  # () -> (matrix, TopicModel | None)


def _synth_cell_builder(dist, spec_kwargs, seed):
    def build():
        spec = corpus.SynthSpec(distribution=dist, rng_seed=seed, **spec_kwargs)
        docs, tm = corpus.synthesize_collection(spec)
        return corpus.build_matrix(docs).matrix, tm
    return build


def _corpus_cell_builder(path):
    def build():
        docs = corpus.load_corpus_dir(path)
        tdm = corpus.build_matrix(docs)
        labeled = all(d.topics for d in docs)
        tm = corpus.topic_model_from_docs(docs) if labeled else None
        return tdm.matrix, tm
    return build


def _matrix_cell_builder(path):
    def build():
        p = Path(path)
        if p.suffix.lower() == ".csv":
            mat, _ = matrixio.read_matrix_csv(p)
        else:
            mat = matrixio.read_matrix_binary(p)
        return mat, None
    return build


def _collect_cells(opts: dict) -> list[_Cell]:
    spec_kwargs = {}
    if opts.get("noise") is not None:
        spec_kwargs["noise_rate"] = float(opts["noise"])
    for key in ("vocab_per_topic", "shared_vocab", "doc_length"):
        if opts.get(key) is not None:
            spec_kwargs[key] = int(opts[key])
    seeds = _parse_seeds(opts["seeds"])
    cells = []
    for dist_text in opts["dist"]:
        dist = _parse_dist(dist_text)
        label = ",".join(str(c) for c in dist)
        for seed in seeds:
            cells.append(_Cell(f"synth:{label}", label, seed,
                               _synth_cell_builder(dist, spec_kwargs, seed)))
    for path in opts["corpus"]:
        cells.append(_Cell(f"corpus:{Path(path).name}", "", None,
                           _corpus_cell_builder(path)))
    for path in opts["matrix"]:
        cells.append(_Cell(f"matrix:{Path(path).stem}", "", None,
                           _matrix_cell_builder(path)))
    if not cells:
        raise _UsageError("run requires at least one --dist, --corpus, or --matrix")
    return cells


def _resolve_ell(z, ell_mode, topics, q_for_theta):
    if ell_mode is not None:
        kind, value = ell_mode
        if kind == "ell":
            return int(value)
        return subspace.dimensionality_by_residual_ratio(z, value, q=q_for_theta)
    if topics is not None:
        return topics
    raise ParameterError("no dimensionality: give --ell or --topics")


def _run_cell(cell: _Cell, opts: dict) -> tuple[list[dict], dict]:
    z, tm = cell.build()
    methods = [m.strip() for m in opts["methods"].split(",") if m.strip()]
    metrics = [m.strip() for m in opts["metrics"].split(",") if m.strip()]
    if metrics == ["none"]:
        metrics = []
    bad = set(metrics) - {"kappa", "cluster"}
    if bad:
        raise _UsageError(f"unknown metrics: {sorted(bad)}")
    if not methods:
        raise _UsageError("at least one method is required")
    topics = int(opts["topics"]) if opts.get("topics") else (tm.n_topics if tm else None)
    ell_mode = _parse_ell(opts["ell"]) if opts.get("ell") else None
    q = _parse_q(opts["q"])
    alpha, beta = float(opts["alpha"]), float(opts["beta"])
    intra = corpus.intra_topic_pairs(tm) if tm is not None else None

    stats = theory.topic_stats(tm) if tm is not None else None
    seed_text = str(cell.seed) if cell.seed is not None else "-"
    rows = []
    bases = {}
    for method in methods:
        if method not in subspace.METHODS:
            raise ParameterError(f"unknown method {method!r}")
        t0 = time.perf_counter()
        q_out: float | None = None
        ell_out: int | None = None
        if method == "vsm":
            x = z
            basis = None
        elif method == "lsi":
            ell_out = _resolve_ell(z, ell_mode, topics, q_for_theta=0.0)
            basis = subspace.lsi(z, ell_out)
            x = subspace.represent(basis, z)
            q_out = 0.0
        else:
            if ell_mode is not None and ell_mode[0] == "theta":
                config = subspace.IrrConfig(q=q, theta=ell_mode[1], alpha=alpha, beta=beta)
            else:
                ell_req = ell_mode[1] if ell_mode is not None else topics
                if ell_req is None:
                    raise ParameterError("no dimensionality: give --ell or --topics")
                config = subspace.IrrConfig(q=q, ell=int(ell_req), alpha=alpha, beta=beta)
            basis = subspace.irr(z, config)
            x = subspace.represent(basis, z)
            q_out = basis.q
            ell_out = basis.ell
        if basis is not None:
            bases[method] = basis

        row = dict.fromkeys(CSV_COLUMNS, "")
        row.update(
            run_id=f"{cell.dataset}:s{seed_text}:{method}",
            dataset=cell.dataset,
            dist=cell.dist_label,
            seed=seed_text,
            method=method,
            q=_fmt(q_out),
            ell=_fmt(ell_out),
        )
        if stats is not None:
            row.update(
                nonuniformity=_fmt(stats.nonuniformity),
                mingling=_fmt(stats.mingling),
                f_estimate=_fmt(stats.f_estimate),
            )
        if "kappa" in metrics:
            if tm is None:
                raise DataError(
                    f"{cell.dataset}: kappa needs topic labels (topics.tsv)"
                )
            ranked = evalmetrics.rank_pairs(x)
            row["kappa"] = _fmt(evalmetrics.kappa_average_precision(ranked, intra))
        if "cluster" in metrics:
            if tm is None:
                raise DataError(
                    f"{cell.dataset}: clustering metrics need topic labels"
                )
            if opts.get("clusters"):
                n_clusters = int(opts["clusters"])
            elif topics is not None:
                n_clusters = topics
            elif ell_out is not None:
                n_clusters = ell_out
            else:
                raise ParameterError("no cluster count: give --clusters or --topics")
            outcome = evalmetrics.floor_ceiling(x, tm, n_clusters)
            row["clusters"] = _fmt(n_clusters)
            for name in evalmetrics.ALGORITHMS:
                row[name] = _fmt(outcome.scores[name])
            row["floor"] = _fmt(outcome.floor)
            row["ceiling"] = _fmt(outcome.ceiling)
        row["elapsed_ms"] = _fmt(round((time.perf_counter() - t0) * 1000.0, 3))
        rows.append(row)
    return rows, bases


def cmd_run(opts: dict) -> int:
    cells = _collect_cells(opts)
    methods = [m.strip() for m in opts["methods"].split(",") if m.strip()]
    unknown_methods = [m for m in methods if m not in subspace.METHODS]
    if unknown_methods:
        raise _UsageError(f"unknown methods: {unknown_methods}")
    metrics = [m.strip() for m in opts["metrics"].split(",") if m.strip()]
    if metrics == ["none"] and not opts.get("save_basis"):
        raise _UsageError("--metrics none is only valid with --save-basis")
    _parse_q(opts["q"])
    if opts.get("ell"):
        _parse_ell(opts["ell"])
    jobs = int(opts["jobs"])
    if jobs < 1:
        raise _UsageError("--jobs must be >= 1")

    all_rows: list[dict] = []
    all_bases: dict[str, object] = {}
    if jobs == 1:
        results = [_run_cell(cell, opts) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: _run_cell(c, opts), cells))
    for rows, bases in results:
        all_rows.extend(rows)
        all_bases.update(bases)

    if opts.get("save_basis"):
        if len(cells) != 1 or len(all_bases) != 1:
            raise _UsageError(
                "--save-basis needs exactly one dataset and one subspace method"
            )
        matrixio.save_basis(opts["save_basis"], next(iter(all_bases.values())))

    all_rows.sort(key=lambda r: r["run_id"])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(all_rows)
    if opts.get("out"):
        Path(opts["out"]).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_verify(opts: dict) -> int:
    trials = int(opts["trials"])
    seed = int(opts["seed"])
    noise = float(opts["noise"]) if opts.get("noise") is not None else None
    records: list[theory.TheoremRecord] = []

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        shape = (int(rng.integers(2, 40)), int(rng.integers(2, 30)))
        x1 = rng.standard_normal(shape)
        x2 = x1 + rng.standard_normal(shape) * rng.uniform(0.0, 0.5)
        records.append(theory.verify_sv_perturbation(x1, x2))

    for inst in theory.standard_instance_suite(trials, seed=seed, noise=noise):
        records.append(theory.verify_dominance_interval(inst))
        records.append(theory.verify_truncation_angle(inst))
        records.append(theory.verify_cosine_bound(inst))

    if opts.get("inject_bug") and records:
        records[0].holds = not records[0].holds

    lines = [r.to_json() for r in records]
    failures = sum(1 for r in records if not r.holds)
    summary = json.dumps(
        {"checks": len(records), "failures": failures, "summary": True},
        sort_keys=True,
    )
    text = "\n".join(lines + [summary]) + "\n"
    if opts.get("out"):
        Path(opts["out"]).write_text(text, encoding="utf-8")
        print(f"checks: {len(records)}, failures: {failures}")
    else:
        sys.stdout.write(text)
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_plotdata(opts: dict) -> int:
    if not opts.get("report"):
        raise _UsageError("plotdata requires --report")
    x_col, y_col = opts["x"], opts["y"]
    try:
        with open(opts["report"], newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError(f"{opts['report']}: empty CSV")
            for col in (x_col, y_col, "method"):
                if col not in reader.fieldnames:
                    raise DataError(f"{opts['report']}: missing column {col!r}")
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {opts['report']}: {exc}") from exc

    groups: dict[tuple[str, float], list[float]] = {}
    for row in rows:
        if row[y_col] == "" or row[x_col] == "":
            continue
        try:
            key = (row["method"], float(row[x_col]))
            groups.setdefault(key, []).append(float(row[y_col]))
        except ValueError as exc:
            raise DataError(f"non-numeric {x_col}/{y_col} value in report") from exc
    if not groups:
        raise DataError(f"no rows with both {x_col!r} and {y_col!r} present")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([x_col, "method", f"{y_col}_mean", f"{y_col}_std", "n"])
    for (method, x), ys in sorted(groups.items()):
        arr = np.asarray(ys)
        writer.writerow(
            [_fmt(x), method, _fmt(float(arr.mean())), _fmt(float(arr.std())), len(ys)]
        )
    if opts.get("out"):
        Path(opts["out"]).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "synth":
            return cmd_synth(_merge(args, _SYNTH_DEFAULTS))
        if args.command == "run":
            return cmd_run(_merge(args, _RUN_DEFAULTS))
        if args.command == "verify":
            return cmd_verify(_merge(args, _VERIFY_DEFAULTS))
        return cmd_plotdata(_merge(args, _PLOT_DEFAULTS))
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IrrspaceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
