"""``netdim`` command line.

Every run writes a manifest: flat ``key=value`` lines, sorted, recording the
subcommand, every parameter (defaults included), derived values, input
digests and tool versions.  ``netdim replay --manifest FILE`` re-executes a
run from its manifest.  Standard output carries a single summary line; all
data goes to files.

Exit codes: 0 success, 1 domain or input error, 2 usage error,
3 ``estimate-unweighted`` finished without finding a plateau.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__
from . import io as nio
from .constructors import (
    RNG_NAME,
    NoiseSpec,
    SamplerSpec,
    cube_gap_volume,
    default_k,
    flip_noise,
    geometric_graph,
    knn_graph,
    sample,
)
from .errors import DisconnectedGraphError, NetdimError
from .graph import (
    WeightedGraph,
    dissimilarity_to_similarity,
    pairwise_distances,
    similarity_to_dissimilarity,
)
from .pipeline import SweepConfig, sweep, weighted_estimate
from .spectral import build_laplacian, count_components, giant_component, spectral_embed, spectrum
from .twonn import DEFAULT_WINDOW, neighbour_ratios_from_points, nn_distance_histogram

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NO_PLATEAU = 3

# parameters that never enter the manifest
_UNRECORDED = {"command", "manifest", "handler"}


@dataclass
class _Run:
    summary: str
    outputs: list[str] = field(default_factory=list)
    resolved: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _sniff(path) -> str:
    """``"matrix"`` for MatrixMarket / ``n=`` CSV files, else ``"other"``."""
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.lower().startswith("%%matrixmarket") or s.replace(" ", "").lower().startswith("n="):
                return "matrix"
            return "other"
    return "other"


def _window(args):
    return (args.window_lo, args.window_hi)


def _graph_input(args):
    """Load the graph a spectral subcommand operates on."""
    kind = args.input_kind
    if kind == "auto":
        kind = "weights" if _sniff(args.input) == "matrix" else "edges"
    if kind == "edges":
        g = nio.load_edges(args.input)
    elif kind == "weights":
        g = nio.load_weighted(args.input)
    elif kind == "dissimilarity":
        g = dissimilarity_to_similarity(nio.load_dissimilarity(args.input), "reciprocal")
    else:  # points: inverse Euclidean distance weights
        g = dissimilarity_to_similarity(pairwise_distances(nio.load_points(args.input)), "reciprocal")
    return g, kind


def _maybe_giant(g, args, run):
    if not args.giant_component:
        return g, None
    if isinstance(g, WeightedGraph):
        _, labels = count_components(g)
        nodes = np.flatnonzero(labels == int(np.bincount(labels).argmax()))
        sub = g.dense()[np.ix_(nodes, nodes)]
        g = WeightedGraph(sub)
    else:
        g, nodes = giant_component(g)
    run.resolved["giant_component_size"] = len(nodes)
    return g, nodes


def _write_nodes(path, nodes, run):
    if nodes is None:
        return
    nio.write_csv(path, ["node"], ([int(v)] for v in nodes))
    run.outputs.append(path)


# -- subcommands ------------------------------------------------------------------


def cmd_gen(args):
    p = sample(SamplerSpec(args.dist, args.d, args.n, args.seed))
    nio.save_points(args.output, p)
    return _Run(f"gen: {p.n} points in R^{p.dim} ({args.dist}, seed {args.seed}) -> {args.output}", [args.output])


def cmd_knn(args):
    p = nio.load_points(args.input)
    k = default_k(p.n) if args.k is None else args.k
    g = knn_graph(p, k)
    nio.save_edges(args.output, g)
    return _Run(f"knn: n={g.n} k={k} edges={g.n_edges} -> {args.output}", [args.output], {"k": k})


def cmd_geometric(args):
    p = nio.load_points(args.input)
    g = geometric_graph(p, args.r)
    nio.save_edges(args.output, g)
    return _Run(f"geometric: n={g.n} r={args.r} edges={g.n_edges} -> {args.output}", [args.output])


def cmd_perturb(args):
    g = nio.load_edges(args.input)
    h = flip_noise(g, NoiseSpec(args.p, args.seed))
    nio.save_edges(args.output, h)
    return _Run(
        f"perturb: n={g.n} p={args.p} edges {g.n_edges} -> {h.n_edges} -> {args.output}",
        [args.output],
    )


def cmd_volume(args):
    v = cube_gap_volume(args.d, args.r)
    run = _Run(nio.fmt(v))
    if args.output:
        nio.write_keyvalue(args.output, {"d": args.d, "r": args.r, "volume": v})
        run.outputs.append(args.output)
    return run


def cmd_spectrum(args):
    run = _Run("")
    g, kind = _graph_input(args)
    g, nodes = _maybe_giant(g, args, run)
    m = min(args.m, g.n)
    rep = spectrum(build_laplacian(g), m, seed=args.seed)
    nio.write_csv(args.output, ["index", "eigenvalue"], enumerate(rep.eigenvalues))
    run.outputs.append(args.output)
    _write_nodes(args.output + ".nodes", nodes, run)
    run.resolved.update(input_kind=kind, m=m, zero_multiplicity=rep.zero_multiplicity)
    run.summary = f"spectrum: n={g.n} m={m} zero_multiplicity={rep.zero_multiplicity} -> {args.output}"
    return run


def cmd_embed(args):
    run = _Run("")
    g, kind = _graph_input(args)
    g, nodes = _maybe_giant(g, args, run)
    emb = spectral_embed(g, args.k, seed=args.seed)
    header = [f"y{j + 1}" for j in range(emb.k)]
    nio.write_csv(args.output, header, emb.coordinates)
    run.outputs.append(args.output)
    _write_nodes(args.output + ".nodes", nodes, run)
    run.resolved["input_kind"] = kind
    run.summary = f"embed: n={emb.n} k={emb.k} -> {args.output}"
    return run


def cmd_estimate_weighted(args):
    kind = args.input_kind
    if kind == "auto":
        kind = "dissimilarity" if _sniff(args.input) == "matrix" else "points"
    if kind == "points":
        m = pairwise_distances(nio.load_points(args.input))
    elif kind == "weights":
        m = similarity_to_dissimilarity(nio.load_weighted(args.input), "reciprocal")
    else:
        m = nio.load_dissimilarity(args.input)
    est = weighted_estimate(m, window=_window(args))
    nio.write_csv(
        args.output,
        ["i", "mu_sorted", "d_i"],
        zip(est.ranks, est.mu_sorted[:-1], est.d_curve),
    )
    summary_path = args.summary or args.output + ".summary"
    info = {
        "n": est.n,
        "d_star": est.d_star,
        "d_min": est.d_min,
        "d_max": est.d_max,
        "window_lo": est.window[0],
        "window_hi": est.window[1],
        "n_used": est.n_used,
    }
    nio.write_keyvalue(summary_path, info)
    return _Run(
        f"d_star={nio.fmt(est.d_star)} d_min={nio.fmt(est.d_min)} d_max={nio.fmt(est.d_max)} "
        f"window={est.window[0]}..{est.window[1]}",
        [args.output, summary_path],
        {"input_kind": kind, "window_lo": est.window[0], "window_hi": est.window[1]},
    )


def cmd_estimate_unweighted(args):
    run = _Run("")
    g = nio.load_edges(args.input)
    g, nodes = _maybe_giant(g, args, run)
    cfg = SweepConfig(
        s_min=args.s_min,
        s_max=args.s_max,
        plateau_epsilon=args.plateau_eps,
        plateau_len=args.plateau_len,
        window=_window(args),
        warm_start=args.warm_start,
        stop_at_plateau=not args.full_sweep,
        seed=args.seed,
    )
    n_comp, _ = count_components(g)
    if n_comp > 1:
        # fail before sweeping: every trial dimension would hit the same error
        raise DisconnectedGraphError(n_comp)
    res = sweep(g, cfg)
    nio.write_csv(
        args.output,
        ["s", "d_min", "d_star", "d_max", "error"],
        ((r.s, r.d_min, r.d_star, r.d_max, r.error or "") for r in res.records),
    )
    run.outputs.append(args.output)
    _write_nodes(args.output + ".nodes", nodes, run)
    if res.has_plateau:
        run.resolved.update(
            chosen_dimension=res.chosen_dimension,
            plateau_mean=res.plateau_mean,
            plateau=",".join(str(s) for s in res.plateau),
        )
        run.summary = (
            f"chosen_dimension={res.chosen_dimension} plateau_mean={nio.fmt(res.plateau_mean)} "
            f"plateau_s={res.plateau[0]}..{res.plateau[-1]}"
        )
    else:
        run.resolved["chosen_dimension"] = "none"
        run.summary = f"chosen_dimension=none (no plateau for s={cfg.s_min}..{cfg.s_max})"
        run.exit_code = EXIT_NO_PLATEAU
    return run


def cmd_nn_hist(args):
    r = neighbour_ratios_from_points(nio.load_points(args.input))
    h = nn_distance_histogram(r, args.bins)
    nio.write_csv(args.output, ["bin_left", "bin_right", "count"], zip(h.bin_left, h.bin_right, h.counts))
    mean = float(r.r1.mean())
    return _Run(
        f"nn-hist: n={r.n} bins={args.bins} r1_mean={nio.fmt(mean)} r1_cv={nio.fmt(r.r1.std() / mean)} -> {args.output}",
        [args.output],
    )


# -- parser -----------------------------------------------------------------------


def _add_io(p, input=True, output=True):
    if input:
        p.add_argument("--input", required=True, help="input file")
    if output:
        p.add_argument("--output", required=True, help="output file")
    p.add_argument("--manifest", default=None, help="manifest path (default: <output>.manifest)")


def _add_window(p):
    p.add_argument("--window-lo", type=float, default=DEFAULT_WINDOW[0], help="lower rank fraction of the twoNN window")
    p.add_argument("--window-hi", type=float, default=DEFAULT_WINDOW[1], help="upper rank fraction of the twoNN window")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netdim", description="Intrinsic dimension of networks via twoNN and spectral embedding.")
    parser.add_argument("--version", action="version", version=f"netdim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="sample a point cloud")
    p.add_argument("--dist", choices=["cube", "gauss"], required=True)
    p.add_argument("--d", type=int, required=True, help="ambient dimension")
    p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--seed", type=int, default=0)
    _add_io(p, input=False)
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("knn", help="union-rule KNN graph of a point cloud")
    p.add_argument("--k", type=int, default=None, help="neighbours (default floor(30 ln n))")
    _add_io(p)
    p.set_defaults(handler=cmd_knn)

    p = sub.add_parser("geometric", help="radius graph of a point cloud")
    p.add_argument("--r", type=float, required=True)
    _add_io(p)
    p.set_defaults(handler=cmd_geometric)

    p = sub.add_parser("perturb", help="flip each node pair with probability p")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_io(p)
    p.set_defaults(handler=cmd_perturb)

    p = sub.add_parser("volume", help="volume of the connected cube remainder")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--manifest", default=None)
    p.set_defaults(handler=cmd_volume)

    kinds = ["auto", "edges", "weights", "dissimilarity", "points"]
    for name, handler, helptext in (
        ("spectrum", cmd_spectrum, "lowest Laplacian eigenvalues"),
        ("embed", cmd_embed, "spectral embedding coordinates"),
    ):
        p = sub.add_parser(name, help=helptext)
        if name == "spectrum":
            p.add_argument("--m", type=int, default=30, help="number of eigenvalues")
        else:
            p.add_argument("--k", type=int, required=True, help="embedding dimension")
        p.add_argument("--input-kind", choices=kinds, default="auto")
        p.add_argument("--giant-component", action="store_true", help="restrict to the largest component")
        p.add_argument("--seed", type=int, default=0, help="iterative eigensolver start vector")
        _add_io(p)
        p.set_defaults(handler=handler)

    p = sub.add_parser("estimate-weighted", help="twoNN on a dissimilarity matrix or point cloud")
    p.add_argument("--input-kind", choices=["auto", "dissimilarity", "weights", "points"], default="auto")
    p.add_argument("--summary", default=None, help="sidecar path (default: <output>.summary)")
    _add_window(p)
    _add_io(p)
    p.set_defaults(handler=cmd_estimate_weighted)

    p = sub.add_parser("estimate-unweighted", help="spectral embedding + twoNN sweep over trial dimensions")
    p.add_argument("--s-min", type=int, default=2)
    p.add_argument("--s-max", type=int, default=30)
    p.add_argument("--plateau-eps", type=float, default=0.05)
    p.add_argument("--plateau-len", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warm-start", action="store_true", help="embed once at s-max and reuse leading columns")
    p.add_argument("--full-sweep", action="store_true", help="keep going after the first plateau")
    p.add_argument("--giant-component", action="store_true", help="restrict to the largest component")
    _add_window(p)
    _add_io(p)
    p.set_defaults(handler=cmd_estimate_unweighted)

    p = sub.add_parser("nn-hist", help="histogram of nearest-neighbour distances")
    p.add_argument("--bins", type=int, default=30)
    _add_io(p)
    p.set_defaults(handler=cmd_nn_hist)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(handler=None)
    return parser


# -- manifest ---------------------------------------------------------------------


def _manifest(args, run):
    out = {
        "command": args.command,
        "version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "rng": RNG_NAME,
        "exit_code": run.exit_code,
    }
    for key, value in sorted(vars(args).items()):
        if key in _UNRECORDED:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        out[f"param.{key}"] = "" if value is None else value
    inp = getattr(args, "input", None)
    if inp:
        out["input.sha256"] = _sha256(inp)
    for key, value in run.resolved.items():
        out[f"resolved.{key}"] = value
    for i, path in enumerate(run.outputs):
        out[f"output.{i}"] = path
    return out


def _manifest_path(args):
    if getattr(args, "manifest", None):
        return args.manifest
    if getattr(args, "output", None):
        return args.output + ".manifest"
    return None


def _argv_from_manifest(path) -> list[str]:
    data = nio.read_keyvalue(path)
    if "command" not in data:
        raise NetdimError(f"{path}: not a netdim manifest (no 'command' key)")
    argv = [data["command"]]
    for key in sorted(data):
        if not key.startswith("param."):
            continue
        flag = "--" + key[len("param."):].replace("_", "-")
        value = data[key]
        if value == "true":
            argv.append(flag)
        elif value in ("false", ""):
            continue
        else:
            argv += [flag, value]
    argv += ["--manifest", path]
    if "input.sha256" in data:
        inp = data.get("param.input", "")
        if _sha256(inp) != data["input.sha256"]:
            raise NetdimError(f"input {inp} does not match the digest recorded in {path}")
    return argv


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "replay":
            return main(_argv_from_manifest(args.manifest))
        run = args.handler(args)
    except (NetdimError, OSError) as exc:
        print(f"netdim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    manifest = _manifest(args, run)
    mpath = _manifest_path(args)
    if mpath is None:
        nio.write_keyvalue(sys.stderr, manifest)
    else:
        nio.write_keyvalue(mpath, manifest)
    print(run.summary)
    return run.exit_code


if __name__ == "__main__":
    sys.exit(main())
