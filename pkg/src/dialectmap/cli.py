"""Command-line pipeline: distances, clustering sweep, evaluation, maps.

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 numerical
failure. All subcommands are deterministic; ``--threads`` only changes
how many workers fill a matrix, never the output bytes.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import cluster as hc
from . import io
from .cdistance import GroundMetric, TransportError, cdistance
from .distmatrix import matrix_from_embeddings, matrix_from_transcriptions
from .dtw import DtwConfig
from .levenshtein import DegenerateTableError, induce
from .mds import classical_mds, mds_to_rgb
from .model import SegmentDistanceTable, ValidationError
from .segments import UnknownSegmentError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

_LD_LAYER = "LD"


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _words_arg(value):
    if value is None:
        return None
    words = [w.strip() for w in value.split(",") if w.strip()]
    return words


def _metric_arg(name):
    return GroundMetric.HAVERSINE_KM if name == "haversine" else GroundMetric.EUCLIDEAN


def _fmt6(v):
    return f"{v:.6f}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_dist_acoustic(args):
    if args.layer < 1:
        raise CliError(f"layer must be >= 1, got {args.layer}", EXIT_VALIDATION)
    locations = io.read_locations(args.locations)
    words = _words_arg(args.words)
    holdout = set(_words_arg(args.holdout_words) or [])
    explicit = words is not None
    if explicit:
        words = [w for w in words if w not in holdout]
    elif holdout:
        found = set()
        for loc in locations.ids():
            found.update(io.archive_words(args.archive, args.model, args.layer, loc))
        words = sorted(found - holdout)
    if words is not None and not words:
        raise CliError("empty word list", EXIT_VALIDATION)
    if explicit:
        # enumerate every missing file before any DTW work starts
        missing = []
        for loc in locations.ids():
            for w in words:
                p = io.embedding_path(args.archive, args.model, args.layer, loc, w)
                if not p.is_file():
                    missing.append(str(p))
        if missing and not args.allow_missing:
            raise CliError("missing embedding files:\n  " + "\n  ".join(missing), EXIT_IO)
        if missing:
            print(f"warning: {len(missing)} embedding files missing, averaging over the rest", file=sys.stderr)
    m = matrix_from_embeddings(
        args.archive,
        args.model,
        args.layer,
        locations,
        words=words,
        config=DtwConfig(band=args.band),
        min_shared_words=args.min_shared_words,
        threads=args.threads,
    )
    io.write_distance_matrix(m, args.out)
    return EXIT_OK


def cmd_dist_ld(args):
    locations = io.read_locations(args.locations)
    corpus = io.read_transcriptions(args.transcriptions)
    holdout = set(_words_arg(args.holdout_words) or [])
    if holdout:
        corpus = [t for t in corpus if t.word_id not in holdout]
        if not corpus:
            raise CliError("no transcriptions left after holdout filtering", EXIT_VALIDATION)
    if args.pmi_iters > 0:
        table, iterations = induce(corpus, max_iter=args.pmi_iters, smoothing=args.smoothing)
        print(f"induced segment distances in {iterations} iteration(s)", file=sys.stderr)
    else:
        table = SegmentDistanceTable.unit()
    m = matrix_from_transcriptions(
        corpus,
        locations,
        table,
        words=_words_arg(args.words),
        min_shared_words=args.min_shared_words,
        threads=args.threads,
    )
    io.write_distance_matrix(m, args.out)
    cost_path = args.cost_table or (str(args.out) + ".costs.tsv")
    io.write_cost_table(table, cost_path)
    return EXIT_OK


def cmd_cluster(args):
    m = io.read_distance_matrix(args.matrix)
    if args.method == "auto":
        method, dendrogram, ccc = hc.select_method(m)
        print(f"method={method} ccc={_fmt6(ccc)}")
    else:
        dendrogram = hc.linkage(m, args.method)
    io.write_dendrogram(dendrogram, args.out)
    return EXIT_OK


def cmd_cut(args):
    d = io.read_dendrogram(args.dendrogram)
    p = hc.cut(d, args.k)
    io.write_partition(p, args.out, index=d.labels)
    return EXIT_OK


def cmd_cophenetic(args):
    m = io.read_distance_matrix(args.matrix)
    d = io.read_dendrogram(args.dendrogram)
    print(_fmt6(hc.cophenetic_correlation(m, d)))
    return EXIT_OK


def cmd_cdistance(args):
    pred = io.read_partition(args.pred)
    table = io.read_locations(args.gold)
    gold = table.gold_partition()
    score = cdistance(pred, gold, table, _metric_arg(args.metric))
    print(f"{score:.4f}")
    return EXIT_OK


def cmd_mds(args):
    m = io.read_distance_matrix(args.matrix)
    dims = args.dims if args.dims is not None else min(3, m.n - 1)
    result = classical_mds(m, dims)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["location"] + [f"dim{k + 1}" for k in range(dims)])
        for i, loc in enumerate(m.index):
            w.writerow([loc] + [f"{v:.9g}" for v in result.coords[i]])
    return EXIT_OK


def cmd_maps(args):
    locations = io.read_locations(args.locations)
    if args.mode == "cluster":
        if not args.partition:
            raise CliError("--mode cluster requires --partition", EXIT_VALIDATION)
        p = io.read_partition(args.partition)
        io.write_geojson(locations, args.out, partition=p)
    else:
        if not args.matrix:
            raise CliError("--mode mds requires --matrix", EXIT_VALIDATION)
        m = io.read_distance_matrix(args.matrix)
        if tuple(sorted(m.index)) != tuple(sorted(locations.ids())):
            raise CliError("matrix index does not match the locations file", EXIT_VALIDATION)
        m = m.reindex(locations.ids())
        result = classical_mds(m, min(3, m.n - 1))
        colors = dict(zip(m.index, mds_to_rgb(result.coords)))
        io.write_geojson(locations, args.out, colors=colors)
    return EXIT_OK


def _parse_source(text):
    parts = text.split(":", 2)
    if len(parts) != 3:
        raise CliError(f"source {text!r} is not of the form model:layer:path", EXIT_VALIDATION)
    model, layer, path = parts
    if layer != _LD_LAYER:
        try:
            layer = int(layer)
        except ValueError:
            raise CliError(f"layer {layer!r} must be an integer or {_LD_LAYER!r}", EXIT_VALIDATION) from None
        if layer < 1:
            raise CliError(f"layer must be >= 1, got {layer}", EXIT_VALIDATION)
    return model, layer, path


def _layer_sort_key(layer):
    return (1, 0) if layer == _LD_LAYER else (0, int(layer))


def cmd_sweep(args):
    sources = [_parse_source(s) for s in args.sources]
    if not sources:
        raise CliError("no matrix sources given", EXIT_VALIDATION)
    table = io.read_locations(args.gold)
    if not table.has_gold():
        raise CliError("gold locations file must label every location", EXIT_VALIDATION)
    gold = table.gold_partition()
    k = args.k if args.k is not None else gold.k
    metric = _metric_arg(args.metric)
    gold_ids = set(table.ids())

    def evaluate(source):
        model, layer, path = source
        m = io.read_distance_matrix(path)
        if set(m.index) != gold_ids:
            raise CliError(
                f"{path}: matrix index does not match the gold locations", EXIT_VALIDATION
            )
        m = m.reindex(table.ids())
        method, dendrogram, ccc = hc.select_method(m)
        partition = hc.cut(dendrogram, k)
        score = cdistance(partition, gold, table, metric)
        return {
            "model": model,
            "layer": layer,
            "method": method,
            "ccc": ccc,
            "cdistance": score,
            "partition": partition,
            "matrix": m,
        }

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(evaluate, sources))
    else:
        rows = [evaluate(s) for s in sources]

    rows.sort(key=lambda r: (r["model"], _layer_sort_key(r["layer"])))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "layer", "method", "ccc", "cdistance"])
        for r in rows:
            w.writerow([r["model"], r["layer"], r["method"], _fmt6(r["ccc"]), _fmt6(r["cdistance"])])

    method_rank = {mth: i for i, mth in enumerate(hc.METHODS)}
    models = sorted({r["model"] for r in rows})
    summary_path = args.summary or (str(Path(args.out).with_suffix("")) + ".summary.csv")
    best_rows = {}
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            ["model", "n_matrices", "best_layer", "best_method", "best_ccc", "best_cdistance", "cdistance_std"]
        )
        for model in models:
            mine = [r for r in rows if r["model"] == model]
            best = min(
                mine,
                key=lambda r: (r["cdistance"], _layer_sort_key(r["layer"]), method_rank[r["method"]]),
            )
            best_rows[model] = best
            std = float(np.std([r["cdistance"] for r in mine]))
            w.writerow(
                [model, len(mine), best["layer"], best["method"], _fmt6(best["ccc"]),
                 _fmt6(best["cdistance"]), _fmt6(std)]
            )
            print(
                f"{model}: best layer={best['layer']} method={best['method']} "
                f"cdistance={_fmt6(best['cdistance'])} (std {_fmt6(std)} over {len(mine)} matrices)"
            )

    if args.maps_dir:
        maps_dir = Path(args.maps_dir)
        maps_dir.mkdir(parents=True, exist_ok=True)
        for model in models:
            best = best_rows[model]
            io.write_geojson(table, maps_dir / f"{model}_cluster.geojson", partition=best["partition"])
            result = classical_mds(best["matrix"], min(3, best["matrix"].n - 1))
            colors = dict(zip(best["matrix"].index, mds_to_rgb(result.coords)))
            io.write_geojson(table, maps_dir / f"{model}_mds.geojson", colors=colors)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dialectmap",
        description="Pronunciation distances, clustering sweep, evaluation and maps for dialect surveys.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist-acoustic", help="DTW distance matrix from an embedding archive")
    p.add_argument("--archive", required=True, help="embedding archive root directory")
    p.add_argument("--model", required=True, help="model id inside the archive")
    p.add_argument("--layer", type=int, required=True, help="1-based layer number")
    p.add_argument("--locations", required=True, help="locations CSV")
    p.add_argument("--out", required=True, help="output distance matrix CSV")
    p.add_argument("--words", help="comma-separated word ids (default: every word in the archive)")
    p.add_argument("--holdout-words", help="comma-separated word ids to exclude")
    p.add_argument("--min-shared-words", type=int, default=1)
    p.add_argument("--band", type=int, default=None, help="Sakoe-Chiba band radius in frames")
    p.add_argument("--allow-missing", action="store_true", help="tolerate missing files for --words")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_dist_acoustic)

    p = sub.add_parser("dist-ld", help="PMI Levenshtein distance matrix from transcriptions")
    p.add_argument("--transcriptions", required=True, help="transcription TSV")
    p.add_argument("--locations", required=True, help="locations CSV")
    p.add_argument("--out", required=True, help="output distance matrix CSV")
    p.add_argument("--cost-table", help="output path for the induced cost table (default: <out>.costs.tsv)")
    p.add_argument("--pmi-iters", type=int, default=15, help="max induction iterations; 0 keeps unit costs")
    p.add_argument("--smoothing", type=float, default=0.5)
    p.add_argument("--words", help="comma-separated word ids to include")
    p.add_argument("--holdout-words", help="comma-separated word ids to exclude")
    p.add_argument("--min-shared-words", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_dist_ld)

    p = sub.add_parser("cluster", help="agglomerative clustering of a distance matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--method", default="auto", choices=list(hc.METHODS) + ["auto"],
                   help="linkage method; auto selects by cophenetic correlation")
    p.add_argument("--out", required=True, help="output dendrogram JSON")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("cut", help="cut a dendrogram into k clusters")
    p.add_argument("--dendrogram", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True, help="output partition CSV")
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("cophenetic", help="cophenetic correlation of a dendrogram against its matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--dendrogram", required=True)
    p.set_defaults(func=cmd_cophenetic)

    p = sub.add_parser("cdistance", help="spatial partition distance against the gold standard")
    p.add_argument("--pred", required=True, help="predicted partition CSV")
    p.add_argument("--gold", required=True, help="locations CSV with gold labels")
    p.add_argument("--metric", default="haversine", choices=["haversine", "euclidean"])
    p.set_defaults(func=cmd_cdistance)

    p = sub.add_parser("mds", help="classical MDS coordinates of a distance matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", required=True, help="output coordinates CSV")
    p.add_argument("--dims", type=int, default=None, help="dimensions (default: min(3, n-1))")
    p.set_defaults(func=cmd_mds)

    p = sub.add_parser("maps", help="GeoJSON cluster or MDS color map")
    p.add_argument("--mode", required=True, choices=["cluster", "mds"])
    p.add_argument("--locations", required=True)
    p.add_argument("--partition", help="partition CSV (cluster mode)")
    p.add_argument("--matrix", help="distance matrix CSV (mds mode)")
    p.add_argument("--out", required=True, help="output GeoJSON")
    p.set_defaults(func=cmd_maps)

    p = sub.add_parser("sweep", help="evaluate matrices against the gold standard and report")
    p.add_argument("sources", nargs="+", metavar="MODEL:LAYER:PATH",
                   help="matrix sources; LAYER is a number or LD")
    p.add_argument("--gold", required=True, help="locations CSV with gold labels")
    p.add_argument("--k", type=int, default=None, help="clusters to cut (default: number of gold labels)")
    p.add_argument("--metric", default="haversine", choices=["haversine", "euclidean"])
    p.add_argument("--out", required=True, help="output report CSV")
    p.add_argument("--summary", help="output summary CSV (default: <out>.summary.csv)")
    p.add_argument("--maps-dir", help="also write cluster and MDS GeoJSON maps per model")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValidationError, io.FileFormatError, UnknownSegmentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (TransportError, DegenerateTableError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
